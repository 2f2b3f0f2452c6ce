"""Analytic difference operators and non-relativistic Hamiltonians.

An operator is a list of terms. Applying a term to f at X evaluates the left
coefficient at X and both the right coefficient and f at the shifted point:

    sum_terms left(X) * right(X') * f(X') + constant * f(X),   X' = X with X_J -> X_J + delta.

For multiplicative terms (Macdonald form) the shift is X_J -> delta * X_J.
"""
from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .model import (MassLabel, ModelCase, ModelParams, NumericsConfig, ParameterError,
                    Relation, mass_value, relation, xi_offset_labels, _check_sign)
from .specfun import DEFAULT_NUMERICS, DomainError, s_eval
from .wavefun import BranchPolicy, f_pm, log_derivative_s, potential_V

__all__ = [
    "ConfigFunction",
    "Term",
    "DifferenceOperator",
    "apply",
    "term_coefficient",
    "embed",
    "operator_sum",
    "make_S_general",
    "make_S_standard",
    "make_S_deformed",
    "make_S_alternative",
    "make_A",
    "make_A_deformed",
    "make_conjugated_coefficients",
    "make_macdonald",
    "macdonald_variables",
    "macdonald_coordinates",
    "HamiltonianKind",
    "apply_H_nonrel",
    "coupling_gamma",
]

Coeff = Callable[[Sequence[complex]], complex]


def _one(X):
    return 1.0 + 0j


@dataclass(frozen=True)
class ConfigFunction:
    """A function of an ordered configuration, optionally with log-derivatives.

    ``log_grad(X)`` and ``log_hess_diag(X)`` return the first derivatives and the
    diagonal second derivatives of log f; when both are given, Hamiltonians are
    applied without finite differences.
    """

    arity: int
    evaluator: Callable[[Sequence[complex]], complex]
    log_grad: Optional[Callable] = None
    log_hess_diag: Optional[Callable] = None

    def __call__(self, X) -> complex:
        return self.evaluator(X)


@dataclass(frozen=True)
class Term:
    index: int
    delta: complex
    left: Coeff = _one
    right: Coeff = _one
    multiplicative: bool = False
    # SquaredPair branch: coefficient is sqrt(left(X) * right(X'))
    sqrt_pair: bool = False
    scale: complex = 1.0

    def shifted(self, X) -> Tuple[complex, ...]:
        X = list(X)
        if self.multiplicative:
            X[self.index] = X[self.index] * self.delta
        else:
            X[self.index] = X[self.index] + self.delta
        return tuple(X)


@dataclass(frozen=True)
class DifferenceOperator:
    arity: int
    terms: Tuple[Term, ...]
    constant_term: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if not 0 <= t.index < self.arity:
                raise IndexError(f"term index {t.index} out of range for arity {self.arity}")

    def __call__(self, f, X) -> complex:
        return apply(self, f, X)

    def shifted_points(self, X) -> List[Tuple[complex, ...]]:
        return [t.shifted(X) for t in self.terms]


def term_coefficient(term: Term, X) -> complex:
    """Combined coefficient left(X) * right(X') of a term at X."""
    Xs = term.shifted(X)
    lv, rv = term.left(X), term.right(Xs)
    if term.sqrt_pair:
        return term.scale * cmath.sqrt(lv * rv)
    return term.scale * lv * rv


def apply(op: DifferenceOperator, f, X) -> complex:
    """Apply an operator to a configuration function at X."""
    X = tuple(complex(x) for x in X)
    if len(X) != op.arity:
        raise ValueError(f"configuration has {len(X)} coordinates, operator expects {op.arity}")
    total = 0j
    for i, t in enumerate(op.terms):
        try:
            Xs = t.shifted(X)
            total += term_coefficient(t, X) * f(Xs)
        except (ArithmeticError, ValueError) as exc:
            raise type(exc)(f"term {i}: {exc}") from exc
    if op.constant_term:
        total += op.constant_term * f(X)
    return total


def embed(op: DifferenceOperator, offset: int, arity: int, reflect: bool = False,
          scale: complex = 1.0) -> DifferenceOperator:
    """Place ``op`` on coordinates offset..offset+op.arity-1 of a larger configuration.

    With ``reflect=True`` the operator acts on the negated coordinates: a
    function of -y is handled by evaluating coefficients at -y and negating
    the shifts.
    """
    n = op.arity
    sgn = -1 if reflect else 1

    def restrict(c):
        def inner(X, _c=c):
            return _c(tuple(sgn * X[offset + i] for i in range(n)))
        return inner

    terms = []
    for t in op.terms:
        if t.multiplicative and reflect:
            raise ValueError("cannot reflect a multiplicative operator")
        terms.append(Term(t.index + offset, sgn * t.delta if not t.multiplicative else t.delta,
                          restrict(t.left), restrict(t.right), t.multiplicative, t.sqrt_pair,
                          scale * t.scale))
    return DifferenceOperator(arity, terms, scale * op.constant_term)


def operator_sum(*ops: DifferenceOperator, constant: complex = 0j) -> DifferenceOperator:
    arities = {o.arity for o in ops}
    if len(arities) != 1:
        raise ValueError("operators act on configurations of different sizes")
    terms = [t for o in ops for t in o.terms]
    const = sum((o.constant_term for o in ops), 0j) + constant
    return DifferenceOperator(arities.pop(), terms, const)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

class _Ctx:
    """Bundles case, params and numerics with a cached s'(0)."""

    def __init__(self, case, params, numerics):
        params.require(case)
        self.case, self.params, self.numerics = case, params, numerics
        self.ds0 = s_eval(case, params, 0.0, 1, numerics)

    def s(self, x):
        return s_eval(self.case, self.params, complex(x), 0, self.numerics)

    def ratio(self, num, den):
        d = self.s(den)
        if d == 0:
            raise ZeroDivisionError("vanishing s in a coefficient denominator")
        return self.s(num) / d

    def prefactor(self, m):
        gb = self.params.g * self.params.beta
        return self.s(1j * gb * m) / (1j * gb * self.ds0)


def _root(value, branch):
    return value if branch is BranchPolicy.SQUARED_PAIR else cmath.sqrt(value)


# ---------------------------------------------------------------------------
# relativistic operators
# ---------------------------------------------------------------------------

def make_S_general(sign: int, labels: Sequence[MassLabel], case: ModelCase, params: ModelParams,
                   branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
                   numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Generalized operator S^+ (sign=+1) or S^- (sign=-1) for the given mass labels."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    labels = tuple(labels)
    n = len(labels)
    terms = []
    for J in range(n):
        mJ = mass_value(labels[J], params)

        def coeff(X, _J=J, _sg=0):
            acc = 1.0 + 0j
            for K in range(n):
                if K != _J:
                    acc *= f_pm(_sg, X[_J] - X[K], labels[_J], labels[K], case, params, branch, numerics)
            return acc

        def left(X, _J=J):
            return coeff(X, _J, -sign)

        def right(X, _J=J):
            return coeff(X, _J, sign)

        terms.append(Term(J, -sign * 1j * params.beta / mJ, left, right,
                          sqrt_pair=branch is BranchPolicy.SQUARED_PAIR,
                          scale=ctx.prefactor(mJ)))
    return DifferenceOperator(n, terms)


def make_S_standard(sign: int, N: int, case: ModelCase, params: ModelParams,
                    branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
                    numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Standard operator S^+_N or S^-_N."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    gb = params.g * params.beta
    pref = ctx.prefactor(1.0)
    terms = []
    for j in range(N):
        def coeff(X, _j=j, _sg=1):
            acc = 1.0 + 0j
            for k in range(N):
                if k != _j:
                    u = X[_j] - X[k]
                    acc *= _root(ctx.ratio(u + _sg * 1j * gb, u), branch)
            return acc

        terms.append(Term(j, -sign * 1j * params.beta,
                          lambda X, _j=j: coeff(X, _j, -sign),
                          lambda X, _j=j: coeff(X, _j, sign),
                          sqrt_pair=branch is BranchPolicy.SQUARED_PAIR, scale=pref))
    return DifferenceOperator(N, terms)


def make_S_deformed(sign: int, N: int, Ntilde: int, case: ModelCase, params: ModelParams,
                    branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
                    numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Deformed operator S^+-_{N,Ntilde} on (x_1..x_N, x~_1..x~_Ntilde)."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    g, beta = params.g, params.beta
    gb = g * beta
    n = N + Ntilde
    sq = branch is BranchPolicy.SQUARED_PAIR

    def A(X, j, pm):
        acc = 1.0 + 0j
        for jp in range(N):
            if jp != j:
                u = X[j] - X[jp]
                acc *= _root(ctx.ratio(u + pm * 1j * gb, u), branch)
        for k in range(Ntilde):
            u = X[j] - X[N + k]
            acc *= _root(ctx.ratio(u + pm * 0.5j * gb - pm * 0.5j * beta,
                                   u + pm * 0.5j * gb + pm * 0.5j * beta), branch)
        return acc

    def B(X, k, pm):
        acc = 1.0 + 0j
        for kp in range(Ntilde):
            if kp != k:
                u = X[N + k] - X[N + kp]
                acc *= _root(ctx.ratio(u - pm * 1j * beta, u), branch)
        for j in range(N):
            u = X[N + k] - X[j]
            acc *= _root(ctx.ratio(u - pm * 0.5j * beta + pm * 0.5j * gb,
                                   u - pm * 0.5j * beta - pm * 0.5j * gb), branch)
        return acc

    pref_x = ctx.prefactor(1.0)
    pref_t = -ctx.s(1j * beta) / (1j * gb * ctx.ds0)
    terms = []
    for j in range(N):
        terms.append(Term(j, -sign * 1j * beta,
                          lambda X, _j=j: A(X, _j, -sign), lambda X, _j=j: A(X, _j, sign),
                          sqrt_pair=sq, scale=pref_x))
    for k in range(Ntilde):
        terms.append(Term(N + k, sign * 1j * gb,
                          lambda X, _k=k: B(X, _k, -sign), lambda X, _k=k: B(X, _k, sign),
                          sqrt_pair=sq, scale=pref_t))
    return DifferenceOperator(n, terms)


def make_S_alternative(sign: int, labels: Sequence[MassLabel], case: ModelCase,
                       params: ModelParams, branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
                       numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Generalized operator rewritten with the offsets xi(m_J, m_K) inside the ratios."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    labels = tuple(labels)
    n = len(labels)
    gb = params.g * params.beta
    masses = [mass_value(lab, params) for lab in labels]
    xis = [[xi_offset_labels(labels[J], labels[K], params) if J != K else 0.0
            for K in range(n)] for J in range(n)]

    def coeff(X, J, pm):
        acc = 1.0 + 0j
        for K in range(n):
            if K != J:
                u = X[J] - X[K] + pm * 1j * xis[J][K]
                acc *= _root(ctx.ratio(u + pm * 1j * gb * masses[K], u), branch)
        return acc

    terms = [Term(J, -sign * 1j * params.beta / masses[J],
                  lambda X, _J=J: coeff(X, _J, -sign), lambda X, _J=J: coeff(X, _J, sign),
                  sqrt_pair=branch is BranchPolicy.SQUARED_PAIR, scale=ctx.prefactor(masses[J]))
             for J in range(n)]
    return DifferenceOperator(n, terms)


def make_conjugated_coefficients(sign: int, labels: Sequence[MassLabel], case: ModelCase,
                                 params: ModelParams,
                                 numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Phi^-1 S Phi written directly: square-root free, left coefficients only."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    labels = tuple(labels)
    n = len(labels)
    gb = params.g * params.beta
    masses = [mass_value(lab, params) for lab in labels]
    xis = [[xi_offset_labels(labels[J], labels[K], params) if J != K else 0.0
            for K in range(n)] for J in range(n)]

    def left(X, J):
        acc = 1.0 + 0j
        for K in range(n):
            if K != J:
                u = X[J] - X[K] - sign * 1j * xis[J][K]
                acc *= ctx.ratio(u - sign * 1j * gb * masses[K], u)
        return acc

    terms = [Term(J, -sign * 1j * params.beta / masses[J], lambda X, _J=J: left(X, _J),
                  scale=ctx.prefactor(masses[J])) for J in range(n)]
    return DifferenceOperator(n, terms)


def make_A(sign: int, N: int, case: ModelCase, params: ModelParams,
           numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Gauged standard operator (Psi_N^-1 S Psi_N, normalized), square-root free."""
    return make_A_deformed(sign, N, 0, case, params, numerics)


def make_A_deformed(sign: int, N: int, Ntilde: int, case: ModelCase, params: ModelParams,
                    numerics: NumericsConfig = DEFAULT_NUMERICS) -> DifferenceOperator:
    """Gauged deformed operator on (x, x~), normalized so the x-terms have unit prefactor."""
    _check_sign(sign)
    ctx = _Ctx(case, params, numerics)
    g, beta = params.g, params.beta
    gb = g * beta

    def left_x(X, j):
        acc = 1.0 + 0j
        for jp in range(N):
            if jp != j:
                u = X[j] - X[jp]
                acc *= ctx.ratio(u - sign * 1j * gb, u)
        for k in range(Ntilde):
            u = X[j] - X[N + k]
            acc *= ctx.ratio(u - sign * 0.5j * gb + sign * 0.5j * beta,
                             u - sign * 0.5j * gb - sign * 0.5j * beta)
        return acc

    def left_t(X, k):
        acc = 1.0 + 0j
        for kp in range(Ntilde):
            if kp != k:
                u = X[N + k] - X[N + kp]
                acc *= ctx.ratio(u + sign * 1j * beta, u)
        for j in range(N):
            u = X[N + k] - X[j]
            acc *= ctx.ratio(u + sign * 0.5j * beta - sign * 0.5j * gb,
                             u + sign * 0.5j * beta + sign * 0.5j * gb)
        return acc

    pref_t = -ctx.s(1j * beta) / ctx.s(1j * gb)
    terms = [Term(j, -sign * 1j * beta, lambda X, _j=j: left_x(X, _j)) for j in range(N)]
    terms += [Term(N + k, sign * 1j * gb, lambda X, _k=k: left_t(X, _k), scale=pref_t)
              for k in range(Ntilde)]
    return DifferenceOperator(N + Ntilde, terms)


# ---------------------------------------------------------------------------
# Macdonald form
# ---------------------------------------------------------------------------

def macdonald_variables(params: ModelParams) -> Tuple[float, float]:
    """(q, t) = (exp(2 r beta), exp(-2 r g beta))."""
    if params.r is None:
        raise ParameterError("the Macdonald form needs r")
    return cmath.exp(2 * params.r * params.beta).real, cmath.exp(-2 * params.r * params.g * params.beta).real


def macdonald_coordinates(params: ModelParams, xs: Sequence[complex], xts: Sequence[complex] = (),
                          inverse: bool = False) -> Tuple[complex, ...]:
    """Map (x, x~) to (z, z~) = (e^{2irx}/t^{1/2}, e^{2irx~}/q^{1/2}), or back.

    The inverse uses the principal logarithm, so it returns x with
    Re(2 r x) in (-pi, pi].
    """
    q, t = macdonald_variables(params)
    r = params.r
    if not inverse:
        return (tuple(cmath.exp(2j * r * complex(x)) / t ** 0.5 for x in xs)
                + tuple(cmath.exp(2j * r * complex(x)) / q ** 0.5 for x in xts))
    return (tuple(cmath.log(complex(z) * t ** 0.5) / (2j * r) for z in xs)
            + tuple(cmath.log(complex(z) * q ** 0.5) / (2j * r) for z in xts))


def make_macdonald(sign: int, N: int, Ntilde: int, case: ModelCase,
                   params: ModelParams) -> DifferenceOperator:
    """Deformed Macdonald-Ruijsenaars operator M (sign=+1) or M^- (sign=-1) in (z, z~)."""
    _check_sign(sign)
    if case is not ModelCase.TRIGONOMETRIC:
        raise ParameterError("the Macdonald form exists only in the trigonometric case")
    q, t = macdonald_variables(params)
    terms = []
    if sign == 1:
        def lz(Z, j):
            acc = 1.0 + 0j
            for jp in range(N):
                if jp != j:
                    acc *= (Z[j] - t * Z[jp]) / (Z[j] - Z[jp])
            for k in range(Ntilde):
                acc *= (Z[j] - q * Z[N + k]) / (Z[j] - Z[N + k])
            return acc

        def lt(Z, k):
            acc = 1.0 + 0j
            for kp in range(Ntilde):
                if kp != k:
                    acc *= (Z[N + k] - q * Z[N + kp]) / (Z[N + k] - Z[N + kp])
            for j in range(N):
                acc *= (Z[N + k] - t * Z[j]) / (Z[N + k] - Z[j])
            return acc

        pref = (1 - q) / (1 - t)
        terms += [Term(j, q, lambda Z, _j=j: lz(Z, _j), multiplicative=True) for j in range(N)]
        terms += [Term(N + k, t, lambda Z, _k=k: lt(Z, _k), multiplicative=True, scale=pref)
                  for k in range(Ntilde)]
    else:
        def lz(Z, j):
            acc = 1.0 + 0j
            for jp in range(N):
                if jp != j:
                    acc *= (t * Z[j] - Z[jp]) / (t * Z[j] - t * Z[jp])
            for k in range(Ntilde):
                acc *= (t * Z[j] - Z[N + k]) / (t * Z[j] - q * Z[N + k])
            return acc

        def lt(Z, k):
            acc = 1.0 + 0j
            for kp in range(Ntilde):
                if kp != k:
                    acc *= (q * Z[N + k] - Z[N + kp]) / (q * Z[N + k] - q * Z[N + kp])
            for j in range(N):
                acc *= (q * Z[N + k] - Z[j]) / (q * Z[N + k] - t * Z[j])
            return acc

        pref = t * (1 - q) / (q * (1 - t))
        terms += [Term(j, 1 / q, lambda Z, _j=j: lz(Z, _j), multiplicative=True) for j in range(N)]
        terms += [Term(N + k, 1 / t, lambda Z, _k=k: lt(Z, _k), multiplicative=True, scale=pref)
                  for k in range(Ntilde)]
    return DifferenceOperator(N + Ntilde, terms)


# ---------------------------------------------------------------------------
# non-relativistic Hamiltonians
# ---------------------------------------------------------------------------

class HamiltonianKind(enum.Enum):
    STANDARD = "standard"
    GENERAL = "general"
    DEFORMED = "deformed"


def coupling_gamma(mJ: float, mK: float, g: float) -> float:
    """gamma_JK = (m_J + m_K) g (m_J m_K g - 1)."""
    return (mJ + mK) * g * (mJ * mK * g - 1.0)


def _second_derivative_fd(f, X, J, h):
    # central differences at h and h/2, one Richardson step
    def d2(step):
        Xp, Xm = list(X), list(X)
        Xp[J] += step
        Xm[J] -= step
        return (f(tuple(Xp)) - 2.0 * f(tuple(X)) + f(tuple(Xm))) / (step * step)
    return (4.0 * d2(h / 2) - d2(h)) / 3.0


def apply_H_nonrel(kind, case: ModelCase, params: ModelParams, f, X,
                   masses: Optional[Sequence[float]] = None, N: Optional[int] = None,
                   numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """(H f)(X) for the Calogero-Sutherland Hamiltonian and its generalizations.

    ``STANDARD`` uses unit masses on all coordinates, ``DEFORMED`` takes the first
    ``N`` coordinates with mass 1 and the rest with mass -1/g, ``GENERAL`` uses
    ``masses``. If ``f`` is a :class:`ConfigFunction` carrying log-derivatives
    they are used; otherwise second derivatives come from finite differences.
    """
    kind = HamiltonianKind(kind) if not isinstance(kind, HamiltonianKind) else kind
    X = tuple(complex(x) for x in X)
    n = len(X)
    g = params.g
    if kind is HamiltonianKind.STANDARD:
        masses = [1.0] * n
    elif kind is HamiltonianKind.DEFORMED:
        if N is None or not 0 <= N <= n:
            raise ValueError("deformed Hamiltonian needs 0 <= N <= len(X)")
        masses = [1.0] * N + [-1.0 / g] * (n - N)
    elif masses is None or len(masses) != n:
        raise ValueError("general Hamiltonian needs one mass per coordinate")
    for J in range(n):
        for K in range(J + 1, n):
            if abs(s_eval(case, params, X[J] - X[K], 0, numerics)) < 1e-3:
                raise DomainError(f"pair ({J},{K}) too close to a pole of V")
    pot = 0j
    for J in range(n):
        for K in range(J + 1, n):
            gam = coupling_gamma(masses[J], masses[K], g)
            if gam != 0:
                pot += gam * potential_V(case, params, X[J] - X[K], numerics)
    fx = f(X)
    lg = getattr(f, "log_grad", None)
    lh = getattr(f, "log_hess_diag", None)
    if lg is not None and lh is not None:
        grad, hess = lg(X), lh(X)
        kin = sum((hess[J] + grad[J] ** 2) / masses[J] for J in range(n)) * fx
    else:
        h = numerics.fd_step
        if h < 1e-12:
            raise DomainError("finite-difference step underflow")
        kin = sum(_second_derivative_fd(f, X, J, h) / masses[J] for J in range(n))
    return -kin + pot * fx
