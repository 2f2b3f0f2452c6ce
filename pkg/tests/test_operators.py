import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ruijsenaars.model import MassLabel, ModelCase, ModelParams, ParameterError
from ruijsenaars.operators import (ConfigFunction, DifferenceOperator, HamiltonianKind, Term,
                                   apply, coupling_gamma, make_A, make_A_deformed,
                                   make_conjugated_coefficients, make_macdonald,
                                   make_S_alternative, make_S_deformed, make_S_general,
                                   make_S_standard, macdonald_coordinates, macdonald_variables,
                                   apply_H_nonrel, term_coefficient)
from ruijsenaars.specfun import GammaEvaluator, s_eval
from ruijsenaars.verify import residual_gauge, residual_macdonald_correspondence
from ruijsenaars.wavefun import build_Phi, build_phi_nr, phi_nr_log_grad, phi_nr_log_hess_diag
from ruijsenaars.model import ParticleConfig

P, M, A, D = MassLabel.PLUS_M0, MassLabel.MINUS_M0, MassLabel.MINUS_INV_GM0, MassLabel.PLUS_INV_GM0
PAR = ModelParams(g=2.0, beta=0.3, r=1.0, a=1.5)
CASES = list(ModelCase)
X3 = (0.82 + 0.03j, 0.21 - 0.06j, -0.47 + 0.02j)


def ds0(case, p=PAR):
    return s_eval(case, p, 0j, 1)


def h_test(X):
    return cmath.exp(sum(0.3 * (k + 1) * x for k, x in enumerate(X)))


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("sign", (1, -1))
def test_single_particle_standard(case, sign):
    op = make_S_standard(sign, 1, case, PAR)
    x = 0.4 + 0.1j
    gb = PAR.g * PAR.beta
    pref = s_eval(case, PAR, 1j * gb) / (1j * gb * ds0(case))
    f = lambda X: cmath.exp(0.7 * X[0])
    assert abs(apply(op, f, [x]) - pref * f([x - sign * 1j * PAR.beta])) < 1e-13


def test_rational_single_particle_constant_eigenvalue():
    for sign in (1, -1):
        assert abs(apply(make_S_standard(sign, 1, ModelCase.RATIONAL, PAR), lambda X: 1, [0.3]) - 1) < 1e-15


def test_shift_semantics_and_arity():
    op = DifferenceOperator(2, [Term(0, 0.5j), Term(1, -0.25)])
    f = lambda X: X[0] ** 2 + 3 * X[1]
    X = (0.1, 0.2)
    assert abs(apply(op, f, X) - (f((0.1 + 0.5j, 0.2)) + f((0.1, -0.05)))) < 1e-15
    with pytest.raises(ValueError):
        apply(op, f, (0.1,))
    with pytest.raises(IndexError):
        DifferenceOperator(1, [Term(1, 0.1)])


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_linearity(a, b):
    op = make_S_general(1, (P, A, M), ModelCase.HYPERBOLIC, PAR)
    f = lambda X: cmath.exp(0.2 * X[0] - 0.1 * X[2])
    g = lambda X: X[0] * X[1] + 1
    lhs = apply(op, lambda X: a * f(X) + b * g(X), X3)
    rhs = a * apply(op, f, X3) + b * apply(op, g, X3)
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs), abs(a * apply(op, f, X3)), abs(b * apply(op, g, X3)))


@pytest.mark.parametrize("case", CASES)
def test_general_all_plus_is_standard(case):
    for sign in (1, -1):
        gen = make_S_general(sign, (P, P, P), case, PAR)
        std = make_S_standard(sign, 3, case, PAR)
        for tg, ts in zip(gen.terms, std.terms):
            assert tg.delta == ts.delta
            a, b = term_coefficient(tg, X3), term_coefficient(ts, X3)
            assert abs(a - b) <= 1e-14 * abs(b)


@pytest.mark.parametrize("case", CASES)
def test_general_with_deformed_labels_is_deformed(case):
    for sign in (1, -1):
        gen = make_S_general(sign, (P, P, A), case, PAR)
        dfm = make_S_deformed(sign, 2, 1, case, PAR)
        for tg, td in zip(gen.terms, dfm.terms):
            assert abs(tg.delta - td.delta) < 1e-15
            a, b = term_coefficient(tg, X3), term_coefficient(td, X3)
            assert abs(a - b) <= 1e-12 * abs(b)


@pytest.mark.parametrize("case", CASES)
def test_deformed_without_tilde_is_standard(case):
    for sign in (1, -1):
        d, s = make_S_deformed(sign, 3, 0, case, PAR), make_S_standard(sign, 3, case, PAR)
        assert [term_coefficient(t, X3) for t in d.terms] == pytest.approx(
            [term_coefficient(t, X3) for t in s.terms], rel=1e-14)
        a0, a = make_A_deformed(sign, 3, 0, case, PAR), make_A(sign, 3, case, PAR)
        assert [term_coefficient(t, X3) for t in a0.terms] == [term_coefficient(t, X3) for t in a.terms]


@pytest.mark.parametrize("case", CASES)
def test_deformed_without_x_has_tilde_prefactor(case):
    op = make_S_deformed(1, 0, 1, case, PAR)
    gb = PAR.g * PAR.beta
    pref = -s_eval(case, PAR, 1j * PAR.beta) / (1j * gb * ds0(case))
    assert len(op.terms) == 1
    assert abs(term_coefficient(op.terms[0], [0.3 + 0.01j]) - pref) < 1e-13
    assert abs(op.terms[0].delta - 1j * gb) < 1e-15


@pytest.mark.parametrize("case", CASES)
def test_tilde_cross_factor_trivial_at_g_one(case):
    p = PAR.with_(g=1.0)
    d = make_S_deformed(1, 1, 1, case, p)
    s = make_S_standard(1, 1, case, p)
    X = (0.5 + 0.02j, -0.3 + 0.01j)
    assert abs(term_coefficient(d.terms[0], X) - term_coefficient(s.terms[0], X[:1])) < 1e-13


@pytest.mark.parametrize("case", CASES)
def test_alternative_form_matches_general(case):
    for labels in ((P, A, M), (D, P, A), (M, M, D)):
        for sign in (1, -1):
            gen = make_S_general(sign, labels, case, PAR)
            alt = make_S_alternative(sign, labels, case, PAR)
            for tg, ta in zip(gen.terms, alt.terms):
                a, b = term_coefficient(tg, X3), term_coefficient(ta, X3)
                assert abs(a - b) <= 1e-12 * max(abs(a), abs(b))


@pytest.mark.parametrize("case", CASES)
def test_conjugated_coefficients_lemma(case):
    ev = GammaEvaluator(case, PAR)
    for labels in ((P, A, M), (P, P, D)):
        Phi = lambda X: build_Phi(ParticleConfig(tuple(X), labels), ev)
        h = lambda X: cmath.exp(0.4 * X[0] - 0.2 * X[1] + 0.1 * X[2])
        for sign in (1, -1):
            lhs = apply(make_S_general(sign, labels, case, PAR), lambda X: Phi(X) * h(X), X3) / Phi(X3)
            rhs = apply(make_conjugated_coefficients(sign, labels, case, PAR), h, X3)
            assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_single_particle_gauged_and_conjugated():
    f = lambda X: X[0] ** 3
    for case in CASES:
        for sign in (1, -1):
            assert abs(apply(make_A(sign, 1, case, PAR), f, [0.3]) - (0.3 - sign * 0.3j) ** 3) < 1e-14
            op = make_conjugated_coefficients(sign, (P,), case, PAR)
            assert term_coefficient(op.terms[0], [0.3]) == op.terms[0].scale


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("sizes", [(2, 0), (3, 0), (2, 1), (1, 2)])
def test_gauge_identity(case, sizes):
    X = (0.82 + 0.03j, 0.21 - 0.06j, -0.47 + 0.02j)[: sum(sizes)]
    for sign in (1, -1):
        assert residual_gauge(sign, case, sizes[0], sizes[1], X, PAR) < 1e-10


def test_macdonald_single_particle_and_prefactor():
    q, t = macdonald_variables(PAR)
    assert q == pytest.approx(np.exp(0.6)) and t == pytest.approx(np.exp(-1.2))
    op = make_macdonald(1, 1, 0, ModelCase.TRIGONOMETRIC, PAR)
    f = lambda Z: Z[0] ** 2 + 1
    z = 0.7 + 0.2j
    assert abs(apply(op, f, [z]) - f([q * z])) < 1e-14
    op = make_macdonald(1, 0, 1, ModelCase.TRIGONOMETRIC, PAR)
    assert op.terms[0].scale == pytest.approx((1 - q) / (1 - t))
    with pytest.raises(ParameterError):
        make_macdonald(1, 1, 0, ModelCase.RATIONAL, PAR)


def test_macdonald_coordinates_roundtrip():
    xs, xts = (0.3 + 0.02j, -0.5), (0.9 - 0.01j,)
    Z = macdonald_coordinates(PAR, xs, xts)
    back = macdonald_coordinates(PAR, Z[:2], Z[2:], inverse=True)
    assert np.allclose(back, xs + xts, atol=1e-14)


@pytest.mark.parametrize("sizes", [(1, 0), (2, 0), (1, 1), (2, 1), (2, 2), (0, 2)])
def test_macdonald_correspondence(sizes):
    X = (0.42 + 0.03j, -0.31 - 0.02j, 0.11 + 0.05j, -0.64)[: sum(sizes)]
    for sign in (1, -1):
        scale = abs(apply(make_A_deformed(sign, *sizes, ModelCase.TRIGONOMETRIC, PAR), h_test, X))
        assert abs(residual_macdonald_correspondence(sign, *sizes, X, PAR)) < 1e-10 * max(1, scale)


def test_coupling_gamma_vanishing():
    for m in (0.3, -1.7, 2.5):
        assert coupling_gamma(m, -m, 2.0) == 0
        assert abs(coupling_gamma(m, 1 / (2.0 * m), 2.0)) < 1e-15
    assert coupling_gamma(1, 1, 2.0) == 4.0


def test_hamiltonian_examples():
    f = ConfigFunction(1, lambda X: X[0] ** 2)
    assert abs(apply_H_nonrel("standard", ModelCase.RATIONAL, PAR, f, [0.7]) + 2) < 1e-6
    m = [1.0, 1.0]
    phi = ConfigFunction(2, lambda X: build_phi_nr(ModelCase.RATIONAL, PAR, X, m),
                         lambda X: phi_nr_log_grad(ModelCase.RATIONAL, PAR, X, m),
                         lambda X: phi_nr_log_hess_diag(ModelCase.RATIONAL, PAR, X, m))
    assert abs(apply_H_nonrel(HamiltonianKind.STANDARD, ModelCase.RATIONAL, PAR, phi,
                              [0.9 + 0.1j, -0.2])) < 1e-12


@pytest.mark.parametrize("case", CASES)
def test_hamiltonian_exact_path_matches_fd(case):
    m = [0.8, -1.1, 0.45]
    X = [0.9 + 0.05j, 0.2 - 0.03j, -0.6 + 0.01j]
    ev = lambda Y: build_phi_nr(case, PAR, Y, m)
    exact = ConfigFunction(3, ev, lambda Y: phi_nr_log_grad(case, PAR, Y, m),
                           lambda Y: phi_nr_log_hess_diag(case, PAR, Y, m))
    a = apply_H_nonrel("general", case, PAR, exact, X, masses=m)
    b = apply_H_nonrel("general", case, PAR, ev, X, masses=m)
    # the two sides may cancel to ~0, so measure against the kinetic scale
    g, hd = exact.log_grad(X), exact.log_hess_diag(X)
    scale = abs(ev(X)) * sum(abs(hd[J] + g[J] ** 2) / abs(m[J]) for J in range(3))
    assert abs(a - b) <= 1e-7 * scale


def test_hamiltonian_deformed_masses():
    f = lambda X: cmath.exp(0.3 * X[0] + 0.2 * X[1])
    X = [0.6 + 0.02j, -0.4]
    a = apply_H_nonrel("deformed", ModelCase.TRIGONOMETRIC, PAR, f, X, N=1)
    b = apply_H_nonrel("general", ModelCase.TRIGONOMETRIC, PAR, f, X, masses=[1.0, -1 / PAR.g])
    assert a == b
    with pytest.raises(ValueError):
        apply_H_nonrel("deformed", ModelCase.TRIGONOMETRIC, PAR, f, X)
