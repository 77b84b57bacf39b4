"""Numerical verification of intertwinings between beta-Laguerre and beta-Jacobi
particle systems of consecutive sizes, through the Dixon-Anderson kernel."""

__version__ = "0.1.0"

from ._validation import (BetaIntertwineError, DomainError, IntegrationFailure, NumericalFailure,
                          ResonanceError, SamplerError)
from .comparison import Comparison
from .diffusion import (DiffusionState, SimConfig, check_exact_moment, check_norm_process, coupled_bias,
                        simulate, step_jacobi, step_laguerre)
from .dixon_anderson import (DixonAndersonGibbs, InterlacingPair, check_kernel_eigenrelation,
                             da_dirichlet_sample, da_gibbs_sample, da_integrate, da_log_density)
from .ensemble import (EnsembleSpec, check_corollary, check_sde_stationarity, ensemble_mcmc,
                       symmetrize, symmetrize_and_moment)
from .jack import (JackIndex, Partition, SymmetricPoly, apply_operator, eval_eigenvalue,
                   first_order_binomials, jack_eval, jack_expand, jack_norm_at_ones, kernel_eigenvalue)
from .operators import (ModelParams, check_dyson_commutator, check_generator_intertwining,
                        check_semigroup_intertwining, exact_moment, generator_matrix, kernel_matrix,
                        semigroup_matrix, triangular_expm)

import types as _types

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, _types.ModuleType)]
