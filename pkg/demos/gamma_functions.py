"""Evaluate the four Gamma-function realizations and their functional equation."""
from ruijsenaars.model import ModelCase, ModelParams
from ruijsenaars.specfun import GammaEvaluator, gamma_constant, gamma_G, s_eval

params = ModelParams(g=2.0, beta=0.3, r=1.0, a=1.5)
x, alpha = 0.4 + 0.1j, 0.6

for case in ModelCase:
    ev = GammaEvaluator(case, params)
    ratio = gamma_G(ev, x + 0.5j * alpha, alpha) / gamma_G(ev, x - 0.5j * alpha, alpha)
    expected = gamma_constant(ev, alpha) * s_eval(case, params, x)
    print(f"{case.value:14s} G(x) = {gamma_G(ev, x, alpha):.12g}   "
          f"|ratio - c s(x)| = {abs(ratio - expected):.1e}")
