"""Eigenfunctions and kernel functions.

Products of pair factors are accumulated as sums of logarithms and exponentiated
once. The half-powers in the equal-mass factor are taken as ``exp(log/2)`` of a sum
of analytic Gamma logarithms, so they vary continuously under the imaginary
shifts applied by the difference operators.
"""
from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .model import (MassLabel, ModelCase, ModelParams, NumericsConfig, ParticleConfig,
                    Relation, mass_value, relation, _check_sign)
from .specfun import DEFAULT_NUMERICS, DomainError, GammaEvaluator, log_s, s_eval

__all__ = [
    "BranchPolicy",
    "KernelKind",
    "KernelSpec",
    "f_pm",
    "phi_pair",
    "log_phi_pair",
    "build_Phi",
    "log_Phi",
    "build_PsiN",
    "build_kernel",
    "build_gauged_kernel",
    "kernel_labels",
    "build_phi_nr",
    "phi_nr_log_grad",
    "phi_nr_log_hess_diag",
    "potential_V",
    "log_derivative_s",
]


class BranchPolicy(enum.Enum):
    """How square roots of s-ratios are resolved.

    ``PRINCIPAL_SQRT`` takes the principal root of each ratio. ``SQUARED_PAIR``
    returns the bare ratio so that an operator can take one square root of the
    combined left/right coefficient.
    """

    PRINCIPAL_SQRT = "principal"
    SQUARED_PAIR = "squared"


class KernelKind(enum.Enum):
    PHI = "Phi"
    PSI_N = "PsiN"
    PSI_MINUS = "PsiMinus"
    FNM = "FNM"
    FTILDE = "FTilde"
    PSI_DEFORMED = "PsiDeformed"
    FDEFORMED = "FDeformed"
    PHI_NONREL = "PhiNonRel"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind
    N: int = 0
    Ntilde: int = 0
    M: int = 0
    Mtilde: int = 0
    v: complex = 0j

    def __post_init__(self):
        for name in ("N", "Ntilde", "M", "Mtilde"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not cmath.isfinite(complex(self.v)):
            raise ValueError("translation v must be finite")
        k = self.kind
        if k in (KernelKind.PSI_N, KernelKind.PSI_MINUS) and (self.Ntilde or self.M or self.Mtilde):
            raise ValueError(f"{k.value} uses only N")
        if k in (KernelKind.FNM, KernelKind.FTILDE) and (self.Ntilde or self.Mtilde):
            raise ValueError(f"{k.value} uses only N and M")
        if k is KernelKind.PSI_DEFORMED and (self.M or self.Mtilde):
            raise ValueError("PsiDeformed uses only N and Ntilde")

    @property
    def arity(self) -> int:
        return self.N + self.Ntilde + self.M + self.Mtilde


# ---------------------------------------------------------------------------
# pair factors
# ---------------------------------------------------------------------------

def _s(case, params, x, numerics=DEFAULT_NUMERICS, order=0):
    return s_eval(case, params, x, order, numerics)


def f_pm(sign: int, x, m: MassLabel, mprime: MassLabel, case: ModelCase, params: ModelParams,
         branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
         numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """Coupling factor f_+ (sign=+1) or f_- (sign=-1) of a pair with labels (m, m')."""
    _check_sign(sign)
    rel = relation(m, mprime)
    if rel in (Relation.OPPOSITE, Relation.DUAL):
        return 1.0 + 0j
    mv, mpv = mass_value(m, params), mass_value(mprime, params)
    gb = params.g * params.beta
    x = complex(x)
    den = _s(case, params, x + sign * 0.5j * gb * (mv - mpv), numerics)
    if den == 0:
        raise ZeroDivisionError("f_pm: vanishing denominator s(...)")
    ratio = _s(case, params, x + sign * 0.5j * gb * (mv + mpv), numerics) / den
    if branch is BranchPolicy.SQUARED_PAIR:
        return ratio
    return cmath.sqrt(ratio)


def log_phi_pair(x, m: MassLabel, mprime: MassLabel, ev: GammaEvaluator) -> complex:
    """Logarithm of the pair factor phi(x; m, m'), analytic along vertical lines."""
    p = ev.params
    x = complex(x)
    rel = relation(m, mprime)
    mv = mass_value(m, p)
    g, beta = p.g, p.beta
    if rel is Relation.SAME:
        al = beta / mv
        lg = ev.log_G
        return 0.5 * (lg(x + 1j * g * beta * mv - 0.5j * beta / mv, al)
                      + lg(x + 0.5j * beta / mv, al)
                      - lg(x - 1j * g * beta * mv + 0.5j * beta / mv, al)
                      - lg(x - 0.5j * beta / mv, al))
    if rel is Relation.OPPOSITE:
        al = beta / mv
        return ev.log_G(x - 0.5j * g * beta * mv, al) - ev.log_G(x + 0.5j * g * beta * mv, al)
    case, num = ev.case, ev.numerics
    if rel is Relation.DUAL:
        return log_s(case, p, x, num)
    # m' = -1/(g m): written with m0 exactly as the closed form has it
    m0 = p.m0
    sh = 0.5j * g * beta * m0 - 0.5j * beta / m0
    return -0.5 * (log_s(case, p, x + sh, num) + log_s(case, p, x - sh, num))


def phi_pair(x, m: MassLabel, mprime: MassLabel, ev: GammaEvaluator) -> complex:
    rel = relation(m, mprime)
    if rel is Relation.DUAL:
        # exactly s(x); no Gamma evaluation
        return _s(ev.case, ev.params, complex(x), ev.numerics)
    return cmath.exp(log_phi_pair(x, m, mprime, ev))


def log_Phi(config: ParticleConfig, ev: GammaEvaluator) -> complex:
    X, labs = config.positions, config.labels
    acc = 0j
    n = len(X)
    for J in range(n):
        for K in range(J + 1, n):
            try:
                acc += log_phi_pair(X[J] - X[K], labs[J], labs[K], ev)
            except (DomainError, ZeroDivisionError) as exc:
                raise type(exc)(f"pair ({J},{K}): {exc}") from exc
    return acc


def build_Phi(config: ParticleConfig, ev: GammaEvaluator,
              branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT) -> complex:
    """Product of phi(X_J - X_K; m_J, m_K) over J < K."""
    if len(config) < 2:
        return 1.0 + 0j
    return cmath.exp(log_Phi(config, ev))


# ---------------------------------------------------------------------------
# Psi_N and kernels
# ---------------------------------------------------------------------------

def _log_psi(xs, g: float, beta: float, ev: GammaEvaluator, reflected: bool = False) -> complex:
    lg = ev.log_G
    if reflected:
        def lg(u, al, _f=ev.log_G):
            return _f(-u, -al)
    acc = 0j
    n = len(xs)
    for j in range(n):
        for k in range(j + 1, n):
            u = complex(xs[j]) - complex(xs[k])
            acc += 0.5 * (lg(u + 1j * g * beta - 0.5j * beta, beta) + lg(u + 0.5j * beta, beta)
                          - lg(u - 1j * g * beta + 0.5j * beta, beta) - lg(u - 0.5j * beta, beta))
    return acc


def build_PsiN(xs: Sequence[complex], ev: GammaEvaluator, variant: str = "plain",
               g: Optional[float] = None, beta: Optional[float] = None) -> complex:
    """Psi_N(x; g, beta); ``variant="reflected"`` gives Psi^(-)_N(x) built from G(-x; -alpha).

    ``g`` and ``beta`` default to the evaluator's parameters and may be overridden,
    e.g. ``(1/g, g beta)`` for the dual species.

    Under the convention G(x; -alpha) = G(-x; alpha) the two variants coincide.
    """
    g = ev.params.g if g is None else g
    beta = ev.params.beta if beta is None else beta
    v = variant.lower()
    if v not in ("plain", "reflected"):
        raise ValueError(f"unknown variant {variant!r}")
    if len(xs) < 2:
        return 1.0 + 0j
    return cmath.exp(_log_psi(list(xs), g, beta, ev, reflected=(v == "reflected")))


def kernel_labels(spec: KernelSpec) -> Tuple[MassLabel, ...]:
    """Labels realizing a kernel as a special case of Phi (m0 = 1 conventions)."""
    k = spec.kind
    P, Mi, Di, Ai = (MassLabel.PLUS_M0, MassLabel.MINUS_M0,
                     MassLabel.PLUS_INV_GM0, MassLabel.MINUS_INV_GM0)
    if k in (KernelKind.PSI_N, KernelKind.PHI):
        return (P,) * spec.N
    if k is KernelKind.FNM:
        return (P,) * spec.N + (Mi,) * spec.M
    if k is KernelKind.FTILDE:
        return (P,) * spec.N + (Di,) * spec.M
    if k is KernelKind.PSI_DEFORMED:
        return (P,) * spec.N + (Ai,) * spec.Ntilde
    if k is KernelKind.FDEFORMED:
        return (P,) * spec.N + (Ai,) * spec.Ntilde + (Mi,) * spec.M + (Di,) * spec.Mtilde
    raise ValueError(f"{k.value} has no label realization")


def _log_cross_G(xs, ys, shift: float, alpha: float, ev: GammaEvaluator, sign: int = -1) -> complex:
    # sum over pairs of log G(x - y + sign*i*shift; alpha) - log G(x - y - sign*i*shift; alpha)
    acc = 0j
    for x in xs:
        for y in ys:
            u = complex(x) - complex(y)
            acc += ev.log_G(u + sign * 1j * shift, alpha) - ev.log_G(u - sign * 1j * shift, alpha)
    return acc


def _log_cross_s(xs, ys, ev: GammaEvaluator) -> complex:
    acc = 0j
    for x in xs:
        for y in ys:
            acc += log_s(ev.case, ev.params, complex(x) - complex(y), ev.numerics)
    return acc


def _log_psi_deformed(xs, xts, ev: GammaEvaluator) -> complex:
    p = ev.params
    g, beta = p.g, p.beta
    acc = _log_psi(xs, g, beta, ev) + _log_psi(xts, 1.0 / g, -g * beta, ev)
    sh = 0.5j * g * beta - 0.5j * beta
    for x in xs:
        for xt in xts:
            u = complex(x) - complex(xt)
            acc -= 0.5 * (log_s(ev.case, p, u + sh, ev.numerics) + log_s(ev.case, p, u - sh, ev.numerics))
    return acc


def _split(coords, sizes):
    out, i = [], 0
    for n in sizes:
        out.append([complex(c) for c in coords[i:i + n]])
        i += n
    if i != len(coords):
        raise ValueError(f"expected {i} coordinates, got {len(coords)}")
    return out


def build_kernel(spec: KernelSpec, coords: Sequence[complex], ev: GammaEvaluator,
                 branch: BranchPolicy = BranchPolicy.PRINCIPAL_SQRT,
                 tilde_cross: str = "derived") -> complex:
    """Closed-form eigenfunction or kernel function.

    ``coords`` is the concatenation (x, x~, y, y~) restricted to the groups the
    kind uses. The translation ``spec.v`` is added to the x group (and to x~ for
    the deformed kinds).

    ``tilde_cross`` selects the x~-y~ factor of the FDeformed kernel:
    ``"derived"`` uses G(-u - i beta/2; g beta)/G(-u + i beta/2; g beta), which is
    the factor Phi produces for labels (-1/g, 1/g); ``"printed"`` uses
    G(u + i beta/2; g beta)/G(u - i beta/2; g beta).
    """
    if tilde_cross not in ("derived", "printed"):
        raise ValueError(f"unknown tilde_cross {tilde_cross!r}")
    p = ev.params
    g, beta = p.g, p.beta
    k = spec.kind
    v = complex(spec.v)
    if k in (KernelKind.PSI_N, KernelKind.PSI_MINUS, KernelKind.PHI):
        (xs,) = _split(coords, [spec.N])
        xs = [x + v for x in xs]
        return build_PsiN(xs, ev, "reflected" if k is KernelKind.PSI_MINUS else "plain")
    if k is KernelKind.PHI_NONREL:
        raise ValueError("use build_phi_nr for the non-relativistic ground state")
    if k is KernelKind.FNM:
        xs, ys = _split(coords, [spec.N, spec.M])
        xs = [x + v for x in xs]
        acc = (_log_psi(xs, g, beta, ev) + _log_psi([-y for y in ys], g, beta, ev)
               + _log_cross_G(xs, ys, 0.5 * g * beta, beta, ev))
        return cmath.exp(acc)
    if k is KernelKind.FTILDE:
        xs, ys = _split(coords, [spec.N, spec.M])
        xs = [x + v for x in xs]
        acc = (_log_psi(xs, g, beta, ev) + _log_psi(ys, 1.0 / g, g * beta, ev)
               + _log_cross_s(xs, ys, ev))
        return cmath.exp(acc)
    # deformed kinds: the operator acting on (x, x~) is invariant only under a
    # common translation, so v moves both groups
    if k is KernelKind.PSI_DEFORMED:
        xs, xts = _split(coords, [spec.N, spec.Ntilde])
        xs, xts = [x + v for x in xs], [x + v for x in xts]
        return cmath.exp(_log_psi_deformed(xs, xts, ev))
    # FDeformed
    xs, xts, ys, yts = _split(coords, [spec.N, spec.Ntilde, spec.M, spec.Mtilde])
    xs, xts = [x + v for x in xs], [x + v for x in xts]
    acc = (_log_psi_deformed(xs, xts, ev)
           + _log_psi_deformed([-y for y in ys], [-y for y in yts], ev)
           + _log_cross_G(xs, ys, 0.5 * g * beta, beta, ev)
           + _log_cross_s(xs, yts, ev) + _log_cross_s(xts, ys, ev))
    if tilde_cross == "derived":
        acc += _log_cross_G([-x for x in xts], [-y for y in yts], 0.5 * beta, g * beta, ev)
    elif tilde_cross == "printed":
        acc += _log_cross_G(xts, yts, 0.5 * beta, g * beta, ev, sign=1)
    else:
        raise ValueError(f"unknown tilde_cross {tilde_cross!r}")
    return cmath.exp(acc)


# ---------------------------------------------------------------------------
# non-relativistic ground state
# ---------------------------------------------------------------------------

def log_derivative_s(case: ModelCase, params: ModelParams, x,
                     numerics: NumericsConfig = DEFAULT_NUMERICS) -> Tuple[complex, complex]:
    """(s'/s, (s'/s)') at x."""
    x = complex(x)
    if case is ModelCase.RATIONAL:
        return 1.0 / x, -1.0 / (x * x)
    if case is ModelCase.TRIGONOMETRIC:
        r = params.r
        c = r / cmath.tan(r * x)
        return c, -(r * r) / cmath.sin(r * x) ** 2
    if case is ModelCase.HYPERBOLIC:
        k = cmath.pi / params.a
        c = k / cmath.tanh(k * x)
        return c, -(k * k) / cmath.sinh(k * x) ** 2
    s0 = _s(case, params, x, numerics)
    if s0 == 0:
        raise DomainError("s(x) vanishes")
    s1 = _s(case, params, x, numerics, 1)
    s2 = _s(case, params, x, numerics, 2)
    u = s1 / s0
    return u, s2 / s0 - u * u


def potential_V(case: ModelCase, params: ModelParams, x,
                numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """V(x) = -(log s)''(x) = (s'/s)^2 - s''/s."""
    x = complex(x)
    if x == 0:
        raise DomainError("V has a pole at x = 0")
    return -log_derivative_s(case, params, x, numerics)[1]


def _nr_couplings(masses, g):
    return [[m1 * m2 * g for m2 in masses] for m1 in masses]


def build_phi_nr(case: ModelCase, params: ModelParams, X: Sequence[complex],
                 masses: Sequence[float], numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """Product of s(X_J - X_K)^(m_J m_K g) over J < K with principal powers."""
    if len(X) != len(masses):
        raise ValueError("positions and masses differ in length")
    acc = 0j
    n = len(X)
    for J in range(n):
        for K in range(J + 1, n):
            u = complex(X[J]) - complex(X[K])
            if u == 0:
                raise DomainError(f"pair ({J},{K}): zero separation")
            acc += masses[J] * masses[K] * params.g * log_s(case, params, u, numerics)
    return cmath.exp(acc)


def phi_nr_log_grad(case, params, X, masses, numerics=DEFAULT_NUMERICS):
    """Gradient of log Phi_nr: L_J = sum_K m_J m_K g (s'/s)(X_J - X_K)."""
    n = len(X)
    out = [0j] * n
    for J in range(n):
        for K in range(J + 1, n):
            u, _ = log_derivative_s(case, params, complex(X[J]) - complex(X[K]), numerics)
            c = masses[J] * masses[K] * params.g
            out[J] += c * u
            out[K] -= c * u
    return out


def phi_nr_log_hess_diag(case, params, X, masses, numerics=DEFAULT_NUMERICS):
    """Diagonal second derivatives of log Phi_nr: sum_K m_J m_K g (s'/s)'(X_J - X_K)."""
    n = len(X)
    out = [0j] * n
    for J in range(n):
        for K in range(J + 1, n):
            _, du = log_derivative_s(case, params, complex(X[J]) - complex(X[K]), numerics)
            c = masses[J] * masses[K] * params.g
            out[J] += c * du
            out[K] += c * du
    return out


def build_gauged_kernel(N: int, Ntilde: int, M: int, Mtilde: int, coords: Sequence[complex],
                        ev: GammaEvaluator, v: complex = 0j, tilde_cross: str = "derived") -> complex:
    """Kernel of the gauged (square-root free) deformed operators on (x, x~) and (y, y~).

    Built from cross factors only, in the variables x + y + v. ``tilde_cross`` has
    the same meaning as in :func:`build_kernel`.
    """
    xs, xts, ys, yts = _split(coords, [N, Ntilde, M, Mtilde])
    v = complex(v)
    g, beta = ev.params.g, ev.params.beta
    xs = [x + v for x in xs]
    xts = [x + v for x in xts]
    acc = (_log_cross_G(xs, [-y for y in ys], 0.5 * g * beta, beta, ev)
           + _log_cross_s(xs, [-y for y in yts], ev) + _log_cross_s(xts, [-y for y in ys], ev))
    if tilde_cross == "derived":
        acc += _log_cross_G([-x for x in xts], yts, 0.5 * beta, g * beta, ev)
    elif tilde_cross == "printed":
        acc += _log_cross_G(xts, [-y for y in yts], 0.5 * beta, g * beta, ev, sign=1)
    else:
        raise ValueError(f"unknown tilde_cross {tilde_cross!r}")
    return cmath.exp(acc)
