import pytest

from ruijsenaars.model import MassLabel, ModelCase, ModelParams, ParticleConfig
from ruijsenaars.specfun import GammaEvaluator
from ruijsenaars.verify import (DEFAULT_PARAMS, IDENTITY_INFO, SIGNED_IDENTITIES, IdentityCase,
                                IdentityId, ResidualReport, SkipIdentity, check_nonrel,
                                default_suite, nonrel_energy, residual_corollary, residual_lemma2,
                                residual_source_identity, residual_WH, run_case, run_suite)

P, M, A, D = MassLabel.PLUS_M0, MassLabel.MINUS_M0, MassLabel.MINUS_INV_GM0, MassLabel.PLUS_INV_GM0
PAR = DEFAULT_PARAMS


def test_WH_rational_hand_example():
    assert abs(residual_WH(ModelCase.RATIONAL, PAR, 1j, [0, 1], [1, 1])) < 1e-15


@pytest.mark.parametrize("case", list(ModelCase))
def test_WH_single_particle_is_exact(case):
    assert residual_WH(case, PAR, 0.1 + 0.3j, [0.4], [1.3]) == 0


def test_WH_elliptic_unbalanced_is_large():
    res, sc = residual_WH(ModelCase.ELLIPTIC, PAR, 0.05 + 0.3j, [0.5 + 0.02j, -0.3], [1, 1],
                          return_scale=True)
    assert abs(res) / sc > 1e-3
    res, sc = residual_WH(ModelCase.ELLIPTIC, PAR, 0.05 + 0.3j, [0.5 + 0.02j, -0.3], [1, -1],
                          return_scale=True)
    assert abs(res) / sc < 1e-10


def test_WH_rejects_real_gamma():
    with pytest.raises(ValueError):
        residual_WH(ModelCase.RATIONAL, PAR, 0.5, [0, 1], [1, 1])


@pytest.mark.parametrize("case", list(ModelCase))
def test_source_identity_single_particle(case):
    for sign in (1, -1):
        assert abs(residual_source_identity(sign, case, ParticleConfig((0.3,), (A,)), PAR)) < 1e-14


def test_source_identity_examples():
    X = (0.6 + 0.03j, -0.2 - 0.02j)
    res, sc = residual_source_identity(1, ModelCase.RATIONAL, ParticleConfig(X, (P, P)), PAR,
                                       return_scale=True)
    assert abs(res) / sc < 1e-10
    res, sc = residual_source_identity(1, ModelCase.ELLIPTIC, ParticleConfig(X, (P, M)), PAR,
                                       return_scale=True)
    assert abs(res) / sc < 1e-8
    res, sc = residual_source_identity(1, ModelCase.ELLIPTIC, ParticleConfig(X, (P, P)), PAR,
                                       return_scale=True)
    assert abs(res) / sc > 1e-3


def test_cor1_rational_eigenvalue():
    X = (0.6 + 0.03j, -0.2 - 0.02j)
    from ruijsenaars.verify import corollary_operator
    _, c = corollary_operator(1, 1, ModelCase.RATIONAL, {"N": 2}, PAR)
    assert abs(c - 2) < 1e-15
    res, sc = residual_corollary(1, 1, ModelCase.RATIONAL, {"N": 2}, X, PAR, return_scale=True)
    assert abs(res) / sc < 1e-10


def test_cor2_translation():
    X = (0.6 + 0.03j, -0.2 - 0.02j)
    for sign in (1, -1):
        res, sc = residual_corollary(2, sign, ModelCase.RATIONAL, {"N": 1, "M": 1}, X, PAR,
                                     v=0.17 + 0.05j, return_scale=True)
        assert abs(res) / sc < 1e-10


@pytest.mark.parametrize("case", [ModelCase.RATIONAL, ModelCase.HYPERBOLIC])
def test_cor5_reduces_to_cor2(case):
    X = (0.7 + 0.03j, 0.1 - 0.02j, -0.45 + 0.01j)
    a = residual_corollary(5, 1, case, {"N": 2, "M": 1}, X, PAR)
    b = residual_corollary(2, 1, case, {"N": 2, "M": 1}, X, PAR)
    assert a == b


def test_corollary_elliptic_skips():
    X = (0.6, -0.2, 0.9)
    for which, sizes in ((1, {"N": 2}), (3, {"N": 1, "M": 1}), (2, {"N": 2, "M": 1})):
        n = sum(sizes.values())
        with pytest.raises(SkipIdentity):
            residual_corollary(which, 1, ModelCase.ELLIPTIC, sizes, X[:n], PAR)


def test_lemma2_examples():
    ev = GammaEvaluator(ModelCase.RATIONAL, PAR)
    for which in ("upper", "lower"):
        assert abs(residual_lemma2(ModelCase.RATIONAL, PAR, ev, 0.3, 0.7, 0.5, which)) < 1e-12
        assert residual_lemma2(ModelCase.RATIONAL, PAR, ev, 0.0, 0.7, 0.5, which) == 0
    for case in ModelCase:
        ev = GammaEvaluator(case, PAR)
        for which in ("upper", "lower"):
            assert abs(residual_lemma2(case, PAR, ev, 0.3, -0.7, 0.5 + 0.1j, which)) < 1e-10
    with pytest.raises(ValueError):
        residual_lemma2(ModelCase.RATIONAL, PAR, ev, 0.3, 0.7, 0.5, "middle")


def test_nonrel_rational_energy_zero():
    assert abs(nonrel_energy(ModelCase.RATIONAL, PAR, [0.9 + 0.05j, -0.1], [1.0, 1.0])) < 1e-12
    rep = check_nonrel("constancy", ModelCase.RATIONAL, masses=[1.0, 1.0])
    assert rep.passed and rep.max_rel_residual < 1e-9
    assert abs(rep.measured_constants["E_re"]) < 1e-9


@pytest.mark.parametrize("case", [ModelCase.TRIGONOMETRIC, ModelCase.HYPERBOLIC])
def test_nonrel_opposite_masses(case):
    rep = check_nonrel("constancy", case, masses=[0.8, -0.8])
    assert rep.passed and rep.max_rel_residual < 1e-9


def test_nonrel_elliptic_unbalanced_skips():
    rep = check_nonrel("constancy", ModelCase.ELLIPTIC, masses=[1.0, 1.0])
    assert rep.skipped and rep.measured_constants["balancing_deficit"] == 2.0


def test_nonrel_limit_order():
    rep = check_nonrel("limit", ModelCase.RATIONAL, samples=2)
    assert rep.passed and rep.measured_constants["order_min"] >= 1


def test_identity_parse_aliases():
    assert IdentityId.parse("si") is IdentityId.SOURCE
    assert IdentityId.parse("WH") is IdentityId.WH
    assert IdentityId.parse("cor4") is IdentityId.COR4
    assert IdentityId.parse("macdonald-minus") is IdentityId.MACDONALD_MINUS
    with pytest.raises(ValueError):
        IdentityId.parse("bogus")


def test_identity_case_validation():
    with pytest.raises(ValueError):
        IdentityCase(IdentityId.WH, ModelCase.RATIONAL, sign=0)
    with pytest.raises(ValueError):
        IdentityCase(IdentityId.WH, ModelCase.RATIONAL, samples=0)
    with pytest.raises(ValueError):
        IdentityCase(IdentityId.WH, ModelCase.RATIONAL, sizes=(("K", 1),))


def test_empty_suite():
    assert run_suite([]) == []


def test_default_suite_covers_every_identity_and_case():
    suite = default_suite()
    seen = {(ic.id, ic.case) for ic in suite}
    for ident, (cases, _) in IDENTITY_INFO.items():
        for case in cases:
            assert (ident, case) in seen, (ident, case)
    for ident in SIGNED_IDENTITIES:
        assert {ic.sign for ic in suite if ic.id is ident} == {1, -1}
    assert set(IDENTITY_INFO) == set(IdentityId)


def test_determinism_bitwise():
    suite = default_suite(samples=3, cases=[ModelCase.HYPERBOLIC],
                          identities=[IdentityId.SOURCE, IdentityId.WH, IdentityId.COR2])
    a, b = run_suite(suite), run_suite(suite)
    key = lambda reps: [[(s.digest, s.abs_residual, s.scale) for s in r.samples] for r in reps]
    assert key(a) == key(b)
    c = run_suite(default_suite(seed=7, samples=3, cases=[ModelCase.HYPERBOLIC],
                                identities=[IdentityId.WH]))
    assert key(c) != key(a[: len(c)])


def test_run_case_records_skip_and_failure_as_data():
    rep = run_case(IdentityCase(IdentityId.COR1, ModelCase.ELLIPTIC, sizes=(("N", 2),), samples=2))
    assert rep.skipped and rep.status == "skipped" and "N = 0" in rep.reason
    rep = run_case(IdentityCase(IdentityId.WH, ModelCase.ELLIPTIC, masses=(1.0, 1.0), samples=5,
                                expect_fail=True))
    assert rep.passed and rep.measured_constants["fraction_above_threshold"] >= 0.9
    # a positive claim on unbalanced elliptic data fails rather than raising
    rep = run_case(IdentityCase(IdentityId.SOURCE, ModelCase.ELLIPTIC, labels=(P, P), samples=2,
                                tolerance=1e-7))
    assert rep.skipped
    rep = run_case(IdentityCase(IdentityId.WH, ModelCase.RATIONAL, samples=4, tolerance=1e-300))
    assert not rep.passed and rep.status == "failed" and rep.reason


def test_report_dict_keys():
    rep = run_case(IdentityCase(IdentityId.LEMMA2, ModelCase.TRIGONOMETRIC, samples=2))
    d = rep.to_dict()
    for k in ("identity", "case", "sign", "max_rel_residual", "tolerance", "passed", "skipped",
              "reason", "samples", "runtime_ms", "measured_constants"):
        assert k in d
    assert d["runtime_ms"] is None and rep.to_dict(include_timing=True)["runtime_ms"] >= 0
    assert isinstance(rep, ResidualReport)
