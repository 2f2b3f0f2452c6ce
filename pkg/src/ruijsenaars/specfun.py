"""Special functions: s(x) for the four cases, the q-product, Euler Gamma and
the four-case Gamma functions G(x; alpha).

Gamma functions are evaluated in the log domain. Every log used is a sum of
principal logarithms whose arguments stay off their cuts along vertical lines
``Re x = const`` (away from ``Re(r x) in pi Z`` in the periodic cases). Exponentiating
half of such a sum therefore gives half-powers that are analytic along the
imaginary shifts used by the difference operators.
"""
from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as _sp_gamma, loggamma as _sp_loggamma

from .model import ModelCase, ModelParams, NumericsConfig, ParameterError

__all__ = [
    "TruncationError",
    "DomainError",
    "s_eval",
    "s_ratio",
    "log_s",
    "qprod_f",
    "euler_gamma",
    "log_euler_gamma",
    "GammaFamily",
    "GammaEvaluator",
    "gamma_G",
    "gamma_constant",
    "gamma_functional_residual",
    "hyperbolic_GR",
    "log_hyperbolic_GR",
    "trig_gamma_series",
    "elliptic_gamma_series",
    "elliptic_s_product",
]

DEFAULT_NUMERICS = NumericsConfig()


class TruncationError(ArithmeticError):
    """A truncated product or series could not meet its tail bound."""


class DomainError(ValueError):
    """Argument outside the domain of a representation."""


# ---------------------------------------------------------------------------
# s(x)
# ---------------------------------------------------------------------------

def _ell_nome(params: ModelParams) -> float:
    return math.exp(-2.0 * params.r * params.a)


def elliptic_s_product(x, r: float, a: float, L: int = 64, tol: float = 1e-14):
    """Elliptic s(x) from its product form, truncated after ``L`` factors."""
    x = complex(x)
    p = math.exp(-2.0 * r * a)
    e = cmath.exp(2j * r * x)
    growth = max(abs(e), 1.0 / abs(e))
    tail = p ** (L + 1) * growth / (1.0 - p) * 2.0
    if tail > tol:
        raise TruncationError(f"elliptic s: tail bound {tail:.3g} exceeds {tol:.3g} at L={L}")
    ell = np.arange(1, L + 1)
    pl = p ** ell
    fac = (1.0 - pl * e) * (1.0 - pl / e) / (1.0 - pl) ** 2
    return cmath.sin(r * x) / r * complex(np.prod(fac))


# unit-circle stencil nodes for derivatives of the (entire) elliptic s
_STENCIL_K = 24
_OMEGA = np.exp(2j * np.pi * np.arange(_STENCIL_K) / _STENCIL_K)


def _stencil_derivative(f, x: complex, order: int, radius: float) -> complex:
    """Derivative of an entire function from samples on a circle around x.

    A discrete Cauchy formula: exact for polynomials of degree < K, error of
    order ``radius**K`` otherwise. The two radii ``radius`` and ``radius/2`` are
    combined by one Richardson step.
    """
    def estimate(h):
        vals = np.array([f(x + h * w) for w in _OMEGA])
        return math.factorial(order) * np.sum(vals * _OMEGA ** (-order)) / (_STENCIL_K * h ** order)

    d1 = estimate(radius)
    d2 = estimate(radius / 2)
    # leading aliasing error scales as h**K
    w = 2.0 ** _STENCIL_K
    return complex((w * d2 - d1) / (w - 1.0))


def s_eval(case: ModelCase, params: ModelParams, x, order: int = 0,
           numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """s(x) or one of its first three derivatives."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    params.require(case)
    x = complex(x)
    if case is ModelCase.RATIONAL:
        return (x, 1.0 + 0j, 0j, 0j)[order]
    if case is ModelCase.TRIGONOMETRIC:
        r = params.r
        if order == 0:
            return cmath.sin(r * x) / r
        if order == 1:
            return cmath.cos(r * x)
        if order == 2:
            return -r * cmath.sin(r * x)
        return -r * r * cmath.cos(r * x)
    if case is ModelCase.HYPERBOLIC:
        k = math.pi / params.a
        if order == 0:
            return cmath.sinh(k * x) / k
        if order == 1:
            return cmath.cosh(k * x)
        if order == 2:
            return k * cmath.sinh(k * x)
        return k * k * cmath.cosh(k * x)
    r, a, L, tol = params.r, params.a, numerics.truncation_L, numerics.quad_abs_tol
    f = lambda z: elliptic_s_product(z, r, a, L, tol)
    if order == 0:
        return f(x)
    radius = 0.25 * min(1.0 / r, a / math.pi)
    return _stencil_derivative(f, x, order, radius)


def log_s(case: ModelCase, params: ModelParams, x,
          numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """A logarithm of s(x) that is analytic along vertical lines.

    Branch cuts run vertically through the real zeros of s (only through x = 0
    in the rational and hyperbolic cases), so shifting an argument by an
    imaginary amount never crosses one. The principal log of s does not have
    this property.
    """
    params.require(case)
    x = complex(x)
    if x == 0:
        raise DomainError("log s(0) is undefined")
    if case is ModelCase.RATIONAL:
        return cmath.log(x) if x.real >= 0 else cmath.log(-x) + 1j * math.pi
    if case is ModelCase.HYPERBOLIC:
        k = math.pi / params.a
        w = k * x
        if w.real < 0:
            w = -w
            extra = 1j * math.pi
        else:
            extra = 0j
        return w + cmath.log(1.0 - cmath.exp(-2.0 * w)) - math.log(2.0 * k) + extra
    r = params.r
    w = r * x
    # sin is non-vanishing with positive real part on the strip 0 < Re w < pi
    n = math.floor(w.real / math.pi)
    out = cmath.log(cmath.sin(w - n * math.pi)) + 1j * math.pi * n - math.log(r)
    if case is ModelCase.TRIGONOMETRIC:
        return out
    L, tol = numerics.truncation_L, numerics.quad_abs_tol
    elliptic_s_product(x, r, params.a, L, tol)  # truncation check
    p = _ell_nome(params)
    e = cmath.exp(2j * w)
    pl = p ** np.arange(1, L + 1)
    return out + complex(np.sum(np.log(1.0 - pl * e) + np.log(1.0 - pl / e) - 2.0 * np.log(1.0 - pl)))


def s_ratio(case, params, num, den, numerics=DEFAULT_NUMERICS) -> complex:
    return s_eval(case, params, num, 0, numerics) / s_eval(case, params, den, 0, numerics)


def s3_over_s1_at_zero(case: ModelCase, params: ModelParams,
                       numerics: NumericsConfig = DEFAULT_NUMERICS) -> float:
    """s'''(0)/s'(0)."""
    if case is ModelCase.RATIONAL:
        return 0.0
    if case is ModelCase.TRIGONOMETRIC:
        return -params.r ** 2
    if case is ModelCase.HYPERBOLIC:
        return (math.pi / params.a) ** 2
    d3 = s_eval(case, params, 0.0, 3, numerics)
    d1 = s_eval(case, params, 0.0, 1, numerics)
    return (d3 / d1).real


# ---------------------------------------------------------------------------
# q-product
# ---------------------------------------------------------------------------

def _log_qprod(z: complex, q: complex, L: int, tol: float) -> complex:
    """log f(z; q) from the product; principal log of each factor."""
    aq = abs(q)
    if abs(aq - 1.0) < 1e-15:
        raise DomainError("|q| = 1 is excluded")
    k = np.arange(1, L + 1)
    if aq < 1:
        ratio = aq
        tail = aq ** (2 * L + 1) * abs(z) / (1.0 - aq * aq)
        if tail > tol:
            raise TruncationError(f"q-product: tail bound {tail:.3g} exceeds {tol:.3g} at L={L}")
        w = q ** (2 * k - 1) * z
        return complex(-np.sum(np.log1p(-w)))
    qi = 1.0 / q
    tail = abs(qi) ** (2 * L + 1) * abs(z) / (1.0 - abs(qi) ** 2)
    if tail > tol:
        raise TruncationError(f"q-product: tail bound {tail:.3g} exceeds {tol:.3g} at L={L}")
    w = qi ** (2 * k - 1) * z
    return complex(np.sum(np.log1p(-w)))


def _qprod_series(z: complex, q: complex, tol: float) -> complex:
    bound = max(abs(q), 1.0 / abs(q))
    ratio = abs(z) / bound
    if ratio >= 1:
        raise DomainError("log-series requires |z| < max(|q|, 1/|q|)")
    total = 0j
    zn = 1.0 + 0j
    n = 0
    while True:
        n += 1
        zn *= z
        term = zn / (n * (q ** (-n) - q ** n))
        total += term
        if abs(term) < tol * 1e-3 and ratio ** n < tol:
            break
        if n > 100000:
            raise TruncationError("q-product log-series did not converge")
    return cmath.exp(total)


def qprod_f(z, q, rep: str = "auto", numerics: NumericsConfig = DEFAULT_NUMERICS) -> complex:
    """The q-product f(z; q) = prod_k (1 - q^(2k-1) z)^(-1), continued to |q| > 1.

    ``rep`` is ``"product"``, ``"logseries"`` or ``"auto"`` (product).
    """
    z, q = complex(z), complex(q)
    if abs(abs(q) - 1.0) < 1e-15:
        raise DomainError("|q| = 1 is excluded")
    rep = rep.lower()
    if rep in ("auto", "product"):
        return cmath.exp(_log_qprod(z, q, numerics.truncation_L, numerics.quad_abs_tol))
    if rep in ("logseries", "log_series", "series"):
        return _qprod_series(z, q, numerics.quad_abs_tol)
    raise ValueError(f"unknown representation {rep!r}")


# ---------------------------------------------------------------------------
# Euler Gamma
# ---------------------------------------------------------------------------

def _check_pole(z: complex) -> None:
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")


def euler_gamma(z) -> complex:
    """Complex Euler Gamma; raises DomainError at the poles."""
    z = complex(z)
    _check_pole(z)
    return complex(_sp_gamma(z))


def log_euler_gamma(z) -> complex:
    """Principal-branch log Gamma (cut along the negative real axis)."""
    z = complex(z)
    _check_pole(z)
    return complex(_sp_loggamma(z))


# ---------------------------------------------------------------------------
# Hyperbolic Gamma function
# ---------------------------------------------------------------------------

_Y0 = 1e-3


def _hyp_integrand(y: float, x: complex, a: float, alpha: float) -> complex:
    # sin(2xy) / (2 sinh(ay) sinh(alpha y)) in overflow-free form
    decay = (a + alpha) * y
    num = cmath.exp(2j * x * y - decay) - cmath.exp(-2j * x * y - decay)
    den = 1j * (-math.expm1(-2 * a * y)) * (-math.expm1(-2 * alpha * y))
    return (num / den - x / (a * alpha * y)) / y


@lru_cache(maxsize=200000)
def _hyp_log_strip(x: complex, a: float, alpha: float, tol: float) -> complex:
    """log G_R(a, alpha; x) = i * (subtracted integral), |Im x| inside the strip."""
    width = a + alpha - 2.0 * abs(x.imag)
    if width <= 0:
        raise DomainError("hyperbolic integral diverges outside |Im x| < (a+alpha)/2")
    # Taylor expansion of the integrand on [0, y0]: (x/(a alpha)) (d2 + d4 y^2)
    c2 = (a * a + alpha * alpha) / 6.0
    c4 = (a ** 4 + alpha ** 4) / 120.0 + (a * alpha) ** 2 / 36.0
    d2 = -2.0 * x * x / 3.0 - c2
    d4 = 2.0 * x ** 4 / 15.0 + (2.0 * x * x / 3.0) * c2 + c2 * c2 - c4
    head = x / (a * alpha) * (d2 * _Y0 + d4 * _Y0 ** 3 / 3.0)
    upper = max(math.log(1.0 / tol) / width, 10 * _Y0)
    with warnings.catch_warnings():
        # roundoff near the subtraction point caps the attainable accuracy at ~1e-12
        warnings.simplefilter("ignore", IntegrationWarning)
        body, err = quad(_hyp_integrand, _Y0, upper, args=(x, a, alpha), complex_func=True,
                         epsabs=tol, epsrel=1e-13, limit=400)
    # the subtracted x/(a alpha y^2) tail beyond `upper` is integrated exactly
    tail = -x / (a * alpha * upper)
    return 1j * (head + body + tail)


def _log_2cosh(u: complex) -> complex:
    # analytic in u along vertical lines, unlike the principal log of 2 cosh(u)
    if u.real >= 0:
        return u + cmath.log(1.0 + cmath.exp(-2.0 * u))
    return -u + cmath.log(1.0 + cmath.exp(2.0 * u))


def log_hyperbolic_GR(a: float, alpha, z, tol: float = 1e-14) -> complex:
    """log of the hyperbolic Gamma function G_R(a, alpha; z) for Re(alpha) != 0.

    Inside ``|Im z| < (a + alpha)/4`` the integral representation is used
    directly; elsewhere the argument is moved into that band with the
    difference equations in alpha or in a, whichever has the smaller step.
    """
    z = complex(z)
    alpha = complex(alpha)
    if alpha.imag != 0:
        raise DomainError("hyperbolic Gamma is implemented for real alpha")
    al = alpha.real
    if al == 0:
        raise DomainError("Re(alpha) must be non-zero")
    if al < 0:
        return -log_hyperbolic_GR(a, -al, z, tol)
    band = (a + al) / 4.0
    # shifting by i*step multiplies by 2 cosh(pi w / other)
    step, other = (al, a) if al <= a else (a, al)
    acc = 0j
    while z.imag > band:
        w = z - 0.5j * step
        acc += _log_2cosh(math.pi * w / other)
        z = z - 1j * step
    while z.imag < -band:
        w = z + 0.5j * step
        acc -= _log_2cosh(math.pi * w / other)
        z = z + 1j * step
    return acc + _hyp_log_strip(z, float(a), float(al), float(tol))


def hyperbolic_GR(a: float, alpha, z, tol: float = 1e-14) -> complex:
    return cmath.exp(log_hyperbolic_GR(a, alpha, z, tol))


# ---------------------------------------------------------------------------
# Gamma functions G(x; alpha)
# ---------------------------------------------------------------------------

class GammaFamily(enum.Enum):
    G1 = 1
    G2 = 2
    G3 = 3
    G4 = 4


def _log_trig_g1(x: complex, alpha: complex, r: float, L: int, tol: float) -> complex:
    q = cmath.exp(-r * alpha)
    z = cmath.exp(2j * r * x)
    return -r * x * x / (2 * alpha) + _log_qprod(z, q, L, tol)


def _log_ell_GR(x: complex, alpha: complex, r: float, a: float, L: int, tol: float) -> complex:
    q = cmath.exp(-r * alpha)
    p = math.exp(-r * a)
    ep = cmath.exp(2j * r * x)
    em = 1.0 / ep
    k = np.arange(1, L + 1)
    qk = q ** (2 * k - 1)
    pl = p ** (2 * k - 1)
    aq, growth = abs(q), abs(ep) + abs(em)
    tail = (aq ** (2 * L + 1) / (1 - aq * aq) * p / (1 - p * p)
            + p ** (2 * L + 1) / (1 - p * p) * aq / (1 - aq * aq)) * growth
    if tail > tol:
        raise TruncationError(f"elliptic Gamma: tail bound {tail:.3g} exceeds {tol:.3g} at L={L}")
    w = np.outer(qk, pl)
    return complex(np.sum(np.log1p(-w * em)) - np.sum(np.log1p(-w * ep)))


@dataclass(frozen=True)
class GammaEvaluator:
    """Case-dispatched evaluator of G(x; alpha)."""

    case: ModelCase
    params: ModelParams
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def __post_init__(self):
        self.params.require(self.case)

    # -- natural solution G1 -------------------------------------------------
    def log_g1(self, x, alpha) -> complex:
        x, alpha = complex(x), complex(alpha)
        if alpha.real == 0:
            raise DomainError("Re(alpha) must be non-zero")
        case, p = self.case, self.params
        L, tol = self.numerics.truncation_L, self.numerics.quad_abs_tol
        if case is ModelCase.RATIONAL:
            return log_euler_gamma(0.5 + x / (1j * alpha))
        if alpha.real < 0:
            # natural continuation G1(x; alpha) = 1 / G1(x; -alpha)
            return -self.log_g1(x, -alpha)
        if case is ModelCase.TRIGONOMETRIC:
            return _log_trig_g1(x, alpha, p.r, L, tol)
        if case is ModelCase.HYPERBOLIC:
            return log_hyperbolic_GR(p.a, alpha, x + 0.5j * p.a, tol)
        return -p.r * x * x / (2 * alpha) + _log_ell_GR(x - 0.5j * p.a, alpha, p.r, p.a, L, tol)

    def log_family(self, x, alpha, family: GammaFamily) -> complex:
        x, alpha = complex(x), complex(alpha)
        if family is GammaFamily.G1:
            return self.log_g1(x, alpha)
        if family is GammaFamily.G2:
            return self.log_g1(-x, -alpha)
        if family is GammaFamily.G3:
            return -self.log_g1(x, -alpha)
        return -self.log_g1(-x, alpha)

    # -- convention used by eigenfunctions: G1 for Re>0, G2 for Re<0 ----------
    def log_G(self, x, alpha) -> complex:
        alpha = complex(alpha)
        if alpha.real == 0:
            raise DomainError("Re(alpha) must be non-zero")
        if alpha.real > 0:
            return self.log_g1(x, alpha)
        return self.log_g1(-complex(x), -alpha)

    def G(self, x, alpha) -> complex:
        return cmath.exp(self.log_G(x, alpha))

    def constant(self, alpha) -> complex:
        return gamma_constant(self, alpha)


def gamma_G(ev: GammaEvaluator, x, alpha, family: GammaFamily = GammaFamily.G1) -> complex:
    """Value of one of the four Gamma-function families at (x, alpha)."""
    return cmath.exp(ev.log_family(x, alpha, family))


def _g1_constant(ev: GammaEvaluator, alpha: complex) -> complex:
    p = ev.params
    if ev.case is ModelCase.RATIONAL:
        return 1.0 / (1j * alpha)
    if ev.case is ModelCase.TRIGONOMETRIC:
        return -2j * p.r
    if ev.case is ModelCase.HYPERBOLIC:
        return 2j * math.pi / p.a
    L = ev.numerics.truncation_L
    ell = np.arange(1, L + 1)
    return -2j * p.r * complex(np.prod((1.0 - np.exp(-2.0 * ell * p.r * p.a)) ** 2))


def gamma_constant(ev: GammaEvaluator, alpha, family=None) -> complex:
    """Constant c in G(x + i alpha/2)/G(x - i alpha/2) = c s(x).

    ``family=None`` refers to the convention G = G1 (Re alpha > 0), G2 (Re alpha < 0).
    """
    alpha = complex(alpha)
    if family is None:
        family = GammaFamily.G1 if alpha.real > 0 else GammaFamily.G2
    if family is GammaFamily.G1:
        if ev.case is ModelCase.RATIONAL or alpha.real > 0:
            return _g1_constant(ev, alpha)
        return _g1_constant(ev, -alpha)
    if family is GammaFamily.G2:
        # G1(-x; -alpha): ratio is c1(-alpha) s(-x)
        return -gamma_constant(ev, -alpha, GammaFamily.G1)
    if family is GammaFamily.G3:
        # 1/G1(x; -alpha): ratio is c1(-alpha) s(x)
        return gamma_constant(ev, -alpha, GammaFamily.G1)
    # 1/G1(-x; alpha): ratio is c1(alpha) s(-x)
    return -gamma_constant(ev, alpha, GammaFamily.G1)


def gamma_functional_residual(ev: GammaEvaluator, x, alpha) -> complex:
    """G(x + i alpha/2)/G(x - i alpha/2) - c s(x) for the convention G."""
    x, alpha = complex(x), complex(alpha)
    sx = s_eval(ev.case, ev.params, x, 0, ev.numerics)
    if sx == 0:
        raise DomainError("s(x) = 0")
    ratio = cmath.exp(ev.log_G(x + 0.5j * alpha, alpha) - ev.log_G(x - 0.5j * alpha, alpha))
    return ratio - gamma_constant(ev, alpha) * sx


# ---------------------------------------------------------------------------
# series representations (independent cross-checks of the product forms)
# ---------------------------------------------------------------------------

def trig_gamma_series(x, alpha, r: float, tol: float = 1e-17, max_terms: int = 200000) -> complex:
    """Trigonometric G1 from its exponential series; needs Im x > -Re(alpha)/2."""
    x, alpha = complex(x), complex(alpha)
    if alpha.real <= 0 or not x.imag > -alpha.real / 2:
        raise DomainError("trigonometric series needs Re(alpha) > 0 and Im x > -Re(alpha)/2")
    total = -r * x * x / (2 * alpha)
    for n in range(1, max_terms + 1):
        term = cmath.exp(2j * n * r * x - n * r * alpha) / (n * (1.0 - cmath.exp(-2 * n * r * alpha)))
        total += term
        if abs(term) < tol:
            return cmath.exp(total)
    raise TruncationError("trigonometric series did not converge")


def elliptic_gamma_series(x, alpha, r: float, a: float, tol: float = 1e-17,
                          max_terms: int = 200000) -> complex:
    """Elliptic G1 from its exponential series; needs |Im x - a/2| < Re(a+alpha)/2."""
    x, alpha = complex(x), complex(alpha)
    if alpha.real <= 0 or not abs(x.imag - a / 2) < (a + alpha.real) / 2:
        raise DomainError("elliptic series needs |Im x - a/2| < Re(a + alpha)/2")
    total = -r * x * x / (2 * alpha)
    for n in range(1, max_terms + 1):
        num = cmath.exp(-n * r * alpha + 2j * n * r * x) - cmath.exp(-n * r * (2 * a + alpha) - 2j * n * r * x)
        den = n * (1.0 - cmath.exp(-2 * n * r * alpha)) * (1.0 - math.exp(-2 * n * r * a))
        term = num / den
        total += term
        if abs(term) < tol:
            return cmath.exp(total)
    raise TruncationError("elliptic series did not converge")
