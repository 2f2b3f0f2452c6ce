"""Watch the relativistic operators approach the Calogero-Sutherland Hamiltonian as beta -> 0."""
from ruijsenaars.model import ModelCase
from ruijsenaars.verify import DEFAULT_PARAMS, LIMIT_BETAS, limit_deviation

X = (0.6 + 0.03j, -0.3)
for case in ModelCase:
    devs = [limit_deviation(case, DEFAULT_PARAMS, X, b) for b in LIMIT_BETAS]
    print(case.value.ljust(14), "  ".join(f"beta={b:<6g} dev={d / s:.2e}"
                                         for b, (d, s) in zip(LIMIT_BETAS, devs)))
