"""Check the source identity for a few mixed-species configurations.

Run with ``python3 demos/source_identity.py``.
"""
from ruijsenaars.model import MassLabel, ModelCase, ModelParams, ParticleConfig
from ruijsenaars.specfun import GammaEvaluator
from ruijsenaars.verify import residual_source_identity

params = ModelParams(g=2.0, beta=0.3, r=1.0, a=1.5, m0=1.0)
X = (0.7 + 0.03j, 0.25 - 0.05j, -0.15 + 0.02j, -0.6)
P, M, A, D = MassLabel.PLUS_M0, MassLabel.MINUS_M0, MassLabel.MINUS_INV_GM0, MassLabel.PLUS_INV_GM0

for case in ModelCase:
    ev = GammaEvaluator(case, params)
    for labels in [(P, P, A, A), (P, M, D, A), (P, P, P, D)]:
        res, scale = residual_source_identity(+1, case, ParticleConfig(X, labels), params, ev,
                                              return_scale=True)
        names = " ".join(l.value for l in labels)
        print(f"{case.value:14s} [{names:22s}] relative residual {abs(res) / scale:.2e}")
# in the elliptic case only the balanced multisets (zero total mass) give small residuals
