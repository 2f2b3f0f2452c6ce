"""Compare the gauged deformed operator with its Macdonald form in multiplicative variables."""
import cmath

from ruijsenaars.model import ModelParams
from ruijsenaars.verify import residual_macdonald_correspondence

params = ModelParams(g=2.0, beta=0.3, r=1.0)


def h(X):
    return cmath.exp(sum(0.3 * (k + 1) * x for k, x in enumerate(X)))


for N, Nt in [(1, 0), (2, 0), (1, 1), (2, 2)]:
    X = tuple(0.35 * k - 0.4 + 0.02j for k in range(N + Nt))
    res = residual_macdonald_correspondence(+1, N, Nt, X, params, h)
    print(f"N={N} Ntilde={Nt}: |A h - c M h| / |h| = {abs(res) / abs(h(X)):.1e}")
