"""Command-line front end: ``verify [options]``.

Runs identity checks and writes a JSON report. Exit status is 0 when every
non-skipped check passes, 1 on any failure and 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import __version__
from .model import ModelCase, ModelParams, NumericsConfig, ParameterError
from .verify import (DEFAULT_PARAMS, IDENTITY_INFO, SIGNED_IDENTITIES, IdentityCase, IdentityId,
                     ResidualReport, default_suite, run_suite)

_DEFAULT_SAMPLES = {
    IdentityId.WH: 50, IdentityId.SOURCE: 65, IdentityId.GAMMA: 50, IdentityId.LEMMA2: 20,
    IdentityId.LEMMA_A: 20, IdentityId.ALT_FORM: 20, IdentityId.MACDONALD: 10,
    IdentityId.MACDONALD_MINUS: 10, IdentityId.NONREL_CONSTANCY: 10, IdentityId.NONREL_DA: 10,
    IdentityId.NONREL_LIMIT: 3,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a run depends on; built from argv by :func:`parse_config`."""

    cases: List[ModelCase]
    identities: List[IdentityId]
    params: ModelParams = DEFAULT_PARAMS
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sizes: dict = field(default_factory=dict)
    masses: Optional[tuple] = None
    samples: Optional[int] = None
    seed: int = 20140101
    tol: Optional[float] = None
    expect_fail: bool = False
    out: Optional[str] = None
    timing: bool = False

    @property
    def custom(self) -> bool:
        """True when the flags pin a single configuration instead of the default suite."""
        return bool(self.sizes) or self.masses is not None or self.expect_fail or self.tol is not None

    def suite(self) -> List[IdentityCase]:
        if not self.custom:
            return default_suite(self.seed, self.samples, self.cases, self.identities, self.params)
        out = []
        for ident in self.identities:
            signs = (1, -1) if ident in SIGNED_IDENTITIES else (1,)
            for case in self.cases:
                for sign in signs:
                    out.append(IdentityCase(
                        ident, case, sign=sign, sizes=tuple(self.sizes.items()), masses=self.masses,
                        samples=self.samples or _DEFAULT_SAMPLES.get(ident, 4), rng_seed=self.seed,
                        params=self.params, expect_fail=self.expect_fail, tolerance=self.tol))
        return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Numerically verify the kernel-function "
                                "identities of the relativistic Calogero-Sutherland models.")
    p.add_argument("--case", default="all", help="rational|trig|hyperbolic|elliptic|all")
    p.add_argument("--identity", default="all", help="identity id or alias, or 'all' (see --list)")
    for k in ("N", "M", "Ntilde", "Mtilde"):
        p.add_argument(f"--{k}", type=int, default=None, help=f"group size {k}")
    p.add_argument("--masses", default=None, help="comma-separated masses (WH and non-relativistic checks)")
    for k in ("g", "beta", "r", "a", "m0"):
        p.add_argument(f"--{k}", type=float, default=None, help=f"override {k} (default {getattr(DEFAULT_PARAMS, k)})")
    p.add_argument("--samples", type=int, default=None, help="sample points per check")
    p.add_argument("--seed", type=int, default=20140101)
    p.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
    p.add_argument("--trunc", type=int, default=None, help="truncation length L of products and series")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--expect-fail", action="store_true", help="run as a negative test")
    p.add_argument("--timing", action="store_true",
                   help="record runtime_ms (makes the report non-reproducible)")
    p.add_argument("--list", action="store_true", help="list identities and exit")
    return p


def parse_config(argv: Sequence[str]) -> Optional[RunConfig]:
    """Parse argv; returns None for ``--list``. Raises ConfigError or SystemExit(2)."""
    ns = _parser().parse_args(list(argv))
    if ns.list:
        return None
    try:
        cases = list(ModelCase) if ns.case.lower() == "all" else [ModelCase.parse(ns.case)]
        identities = (list(IdentityId) if ns.identity.lower() == "all"
                      else [IdentityId.parse(ns.identity)])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    changes = {k: getattr(ns, k) for k in ("g", "beta", "r", "a", "m0") if getattr(ns, k) is not None}
    try:
        params = DEFAULT_PARAMS.with_(**changes)
        numerics = NumericsConfig(rng_seed=ns.seed) if ns.trunc is None else \
            NumericsConfig(truncation_L=ns.trunc, rng_seed=ns.seed)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    sizes = {k: getattr(ns, k) for k in ("N", "M", "Ntilde", "Mtilde") if getattr(ns, k) is not None}
    if any(v < 0 for v in sizes.values()):
        raise ConfigError("group sizes must be >= 0")
    masses = None
    if ns.masses:
        try:
            masses = tuple(float(x) for x in ns.masses.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --masses: {ns.masses!r}") from exc
        if any(m == 0 or not math.isfinite(m) for m in masses):
            raise ConfigError("masses must be finite and non-zero")
    if ns.samples is not None and ns.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if ns.seed < 0:
        raise ConfigError("--seed must be >= 0")
    if ns.tol is not None and not ns.tol > 0:
        raise ConfigError("--tol must be positive")
    return RunConfig(cases, identities, params, numerics, sizes, masses, ns.samples, ns.seed,
                     ns.tol, ns.expect_fail, ns.out, ns.timing)


def _fmt(x) -> str:
    # JSON text with floats at 17 significant digits; non-finite floats become null
    if isinstance(x, bool) or x is None:
        return {True: "true", False: "false", None: "null"}[x]
    if isinstance(x, float):
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def render_report(cfg: RunConfig, reports: Sequence[ResidualReport]) -> str:
    doc = {
        "version": __version__,
        "seed": cfg.seed,
        "params": cfg.params.as_dict(),
        "numerics": {"truncation_L": cfg.numerics.truncation_L},
        "results": [r.to_dict(include_timing=cfg.timing) for r in reports],
    }
    return _fmt(doc) + "\n"


def _listing() -> str:
    lines = []
    for ident in IdentityId:
        cases, bal = IDENTITY_INFO[ident]
        signs = "+/-" if ident in SIGNED_IDENTITIES else "n/a"
        lines.append(f"{ident.value:22s} signs={signs:4s} cases={','.join(c.value for c in cases)}; "
                     f"balancing: {bal}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        # argparse usage errors (and --help, which exits 0)
        return int(exc.code or 0)
    if cfg is None:
        print(_listing())
        return 0
    try:
        suite = cfg.suite()
    except ValueError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return 2
    reports = run_suite(suite, cfg.numerics)
    text = render_report(cfg, reports)
    summary = sys.stdout if cfg.out else sys.stderr
    for r in reports:
        status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
        print(f"{status} {r.identity.describe()} max_rel={r.max_rel_residual:.3g}"
              f"{' (' + r.reason + ')' if r.reason else ''}", file=summary)
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"verify: error: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    failed = any(not r.skipped and not r.passed for r in reports)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
