"""Model cases, parameters, mass labels and the scalar offset functions.

The mass labels are symbolic. Branch selection anywhere in the package keys on
label relations (``m' = m``, ``m' = -m``, ...) and never on floating-point
coincidence of mass values.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple


class ModelCase(enum.Enum):
    RATIONAL = "rational"
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"

    @classmethod
    def parse(cls, name: str) -> "ModelCase":
        key = name.strip().lower()
        aliases = {"trig": "trigonometric", "hyp": "hyperbolic", "ell": "elliptic",
                   "rat": "rational", "i": "rational", "ii": "trigonometric",
                   "iii": "hyperbolic", "iv": "elliptic"}
        key = aliases.get(key, key)
        for case in cls:
            if case.value == key:
                return case
        raise ValueError(f"unknown model case {name!r}")

    @property
    def needs_r(self) -> bool:
        return self in (ModelCase.TRIGONOMETRIC, ModelCase.ELLIPTIC)

    @property
    def needs_a(self) -> bool:
        return self in (ModelCase.HYPERBOLIC, ModelCase.ELLIPTIC)


class ParameterError(ValueError):
    """Invalid or missing model parameters."""


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the model.

    ``r`` and ``a`` are optional because only some cases use them; evaluators
    reject a case whose scale parameter is missing.
    """

    g: float
    beta: float
    r: Optional[float] = None
    a: Optional[float] = None
    m0: float = 1.0

    def __post_init__(self):
        if self.g == 0:
            raise ParameterError("g must be non-zero")
        if not self.beta > 0:
            raise ParameterError("beta must be positive")
        if self.r is not None and not self.r > 0:
            raise ParameterError("r must be positive")
        if self.a is not None and not self.a > 0:
            raise ParameterError("a must be positive")
        if self.m0 == 0:
            raise ParameterError("m0 must be non-zero")

    @property
    def degenerate_spectrum(self) -> bool:
        """True when g*m0**2 = +-1, i.e. the mass spectrum has repeated values."""
        gm2 = self.g * self.m0 ** 2
        return abs(abs(gm2) - 1.0) < 1e-14

    def require(self, case: ModelCase) -> None:
        if case.needs_r and self.r is None:
            raise ParameterError(f"{case.value} case requires r")
        if case.needs_a and self.a is None:
            raise ParameterError(f"{case.value} case requires a")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"g": self.g, "beta": self.beta, "r": self.r, "a": self.a, "m0": self.m0}


@dataclass(frozen=True)
class NumericsConfig:
    truncation_L: int = 64
    quad_abs_tol: float = 1e-14
    fd_step: float = 1e-4
    residual_tol: float = 1e-8
    rng_seed: int = 20140101

    def __post_init__(self):
        if self.truncation_L < 1:
            raise ParameterError("truncation_L must be >= 1")
        for name in ("quad_abs_tol", "fd_step", "residual_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.rng_seed < 0:
            raise ParameterError("rng_seed must be unsigned")

    def with_(self, **changes) -> "NumericsConfig":
        return replace(self, **changes)


class MassLabel(enum.Enum):
    PLUS_M0 = "+m0"
    MINUS_M0 = "-m0"
    MINUS_INV_GM0 = "-1/(g m0)"
    PLUS_INV_GM0 = "+1/(g m0)"


# (sign, inverted): value = sign * (m0 if not inverted else 1/(g m0))
_LABEL_PARTS = {
    MassLabel.PLUS_M0: (1, False),
    MassLabel.MINUS_M0: (-1, False),
    MassLabel.MINUS_INV_GM0: (-1, True),
    MassLabel.PLUS_INV_GM0: (1, True),
}
_PARTS_LABEL = {v: k for k, v in _LABEL_PARTS.items()}


def mass_value(label: MassLabel, params: ModelParams) -> float:
    sign, inverted = _LABEL_PARTS[label]
    if inverted:
        return sign / (params.g * params.m0)
    return sign * params.m0


def label_negate(label: MassLabel) -> MassLabel:
    """Label of ``-m``."""
    sign, inverted = _LABEL_PARTS[label]
    return _PARTS_LABEL[(-sign, inverted)]


def label_dual(label: MassLabel) -> MassLabel:
    """Label of ``1/(g m)``."""
    sign, inverted = _LABEL_PARTS[label]
    return _PARTS_LABEL[(sign, not inverted)]


def lambda_symmetry(label: MassLabel, which: str) -> MassLabel:
    """Image of a label under ``m0 -> -m0`` (``"negate"``) or ``m0 -> 1/(g m0)`` (``"invert"``).

    Both maps are involutions of the four-element spectrum.
    """
    which = which.lower()
    if which in ("negate", "negatem0", "negate_m0"):
        return label_negate(label)
    if which in ("invert", "invertgm0", "invert_gm0"):
        return label_dual(label)
    raise ValueError(f"unknown symmetry {which!r}")


class Relation(enum.Enum):
    """How a partner label m' relates to m."""

    SAME = "m'=m"
    OPPOSITE = "m'=-m"
    DUAL = "m'=1/(gm)"
    ANTIDUAL = "m'=-1/(gm)"


def relation(m: MassLabel, mprime: MassLabel) -> Relation:
    if mprime == m:
        return Relation.SAME
    if mprime == label_negate(m):
        return Relation.OPPOSITE
    if mprime == label_dual(m):
        return Relation.DUAL
    return Relation.ANTIDUAL


def spectrum(params: ModelParams) -> Tuple[float, float, float, float]:
    return tuple(mass_value(lab, params) for lab in MassLabel)


@dataclass(frozen=True)
class ParticleConfig:
    """Ordered particles: complex positions paired with mass labels."""

    positions: Tuple[complex, ...]
    labels: Tuple[MassLabel, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(complex(x) for x in self.positions))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.positions) != len(self.labels):
            raise ValueError("positions and labels differ in length")
        n = len(self.positions)
        for j in range(n):
            for k in range(j + 1, n):
                if self.positions[j] == self.positions[k]:
                    raise ValueError(f"positions {j} and {k} coincide")

    def __len__(self) -> int:
        return len(self.positions)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[complex, MassLabel]]) -> "ParticleConfig":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def masses(self, params: ModelParams) -> Tuple[float, ...]:
        return tuple(mass_value(lab, params) for lab in self.labels)

    def min_separation(self) -> float:
        n = len(self.positions)
        if n < 2:
            return float("inf")
        return min(abs(self.positions[j] - self.positions[k])
                   for j in range(n) for k in range(j + 1, n))

    def check_separation(self, delta: float) -> None:
        if self.min_separation() < delta:
            raise ValueError(f"pairwise separation below {delta}")


def balancing_deficit(config, params: ModelParams) -> float:
    """Sum of the numeric masses; zero iff the elliptic balancing condition holds.

    ``config`` may be a :class:`ParticleConfig` or a plain sequence of labels.
    """
    labels = config.labels if isinstance(config, ParticleConfig) else config
    return float(sum(mass_value(lab, params) for lab in labels))


def _classify_numeric(m: float, mprime: float, g: float, rtol: float = 1e-12) -> Relation:
    def close(u, v):
        return abs(u - v) <= rtol * max(abs(u), abs(v), 1.0)

    hits = []
    if close(mprime, m):
        hits.append(Relation.SAME)
    if close(mprime, -m):
        hits.append(Relation.OPPOSITE)
    if close(mprime, 1.0 / (g * m)):
        hits.append(Relation.DUAL)
    if close(mprime, -1.0 / (g * m)):
        hits.append(Relation.ANTIDUAL)
    if not hits:
        raise ValueError(f"masses {m}, {mprime} are not related by any spectrum relation")
    zero = {Relation.SAME, Relation.DUAL}
    if any(h in zero for h in hits) and any(h not in zero for h in hits):
        raise ValueError(f"masses {m}, {mprime} match relations with different offsets")
    return hits[0]


def xi_offset(m: float, mprime: float, params: ModelParams) -> float:
    """Real offset between the shifted centres of particles with masses m and m'.

    Zero when ``m' in {m, 1/(g m)}``; ``beta/(2m) + g beta m/2`` when
    ``m' in {-m, -1/(g m)}``.
    """
    rel = _classify_numeric(m, mprime, params.g)
    if rel in (Relation.SAME, Relation.DUAL):
        return 0.0
    return params.beta / (2 * m) + params.g * params.beta * m / 2


def xi_offset_labels(m: MassLabel, mprime: MassLabel, params: ModelParams) -> float:
    """:func:`xi_offset` keyed on symbolic labels (exact branch selection)."""
    rel = relation(m, mprime)
    if rel in (Relation.SAME, Relation.DUAL):
        return 0.0
    mv = mass_value(m, params)
    return params.beta / (2 * mv) + params.g * params.beta * mv / 2


def xi_pm(sign: int, m: float, params: ModelParams) -> complex:
    """Per-particle offset: ``-+ (i g^2 beta/4) ((m0^2 + 1/(m0 g)^2 + 1/g) m - m^3)``."""
    _check_sign(sign)
    g, beta, m0 = params.g, params.beta, params.m0
    k = m0 ** 2 + 1.0 / (m0 * g) ** 2 + 1.0 / g
    return -sign * 1j * g ** 2 * beta / 4 * (k * m - m ** 3)


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


def labels_from_values(values: Sequence[float], params: ModelParams) -> Tuple[MassLabel, ...]:
    """Map numeric masses back to labels; only for generic (non-degenerate) spectra."""
    if params.degenerate_spectrum:
        raise ParameterError("labels are ambiguous for a degenerate spectrum")
    out = []
    for v in values:
        best = min(MassLabel, key=lambda lab: abs(mass_value(lab, params) - v))
        if abs(mass_value(best, params) - v) > 1e-12 * max(1.0, abs(v)):
            raise ValueError(f"mass {v} is not in the spectrum")
        out.append(best)
    return tuple(out)
