"""Analytic difference operators, Gamma functions and kernel-function
identities for the relativistic Calogero-Sutherland (Ruijsenaars) models."""

__version__ = "0.1.0"

from .model import (ModelCase, ModelParams, NumericsConfig, MassLabel, ParticleConfig,
                    ParameterError, Relation, relation, mass_value, balancing_deficit,
                    lambda_symmetry, xi_offset, xi_offset_labels, xi_pm)
from .specfun import (s_eval, log_s, qprod_f, euler_gamma, log_euler_gamma, GammaFamily,
                      GammaEvaluator, gamma_G, gamma_constant, gamma_functional_residual,
                      DomainError, TruncationError)
from .wavefun import (BranchPolicy, KernelKind, KernelSpec, build_Phi, build_kernel,
                      build_gauged_kernel, build_phi_nr)
from .operators import (DifferenceOperator, apply, make_S_general, make_S_standard,
                        make_S_deformed, make_A_deformed, make_macdonald, apply_H_nonrel)
from .verify import (IdentityId, IdentityCase, ResidualReport, run_case, run_suite,
                     default_suite, check_nonrel)
