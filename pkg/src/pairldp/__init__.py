"""Gibbs ensembles of pair interactions prod g(x_i, y_j): kernels, rate functions, samplers, decay checks."""

from .energy import (BivariateAtomic, RateContext, average_rate, check_2K, energy_K, marginal_rate,
                     negdef_check, rate, rate_joint, rank_one_split, tightness_q)
from .experiment import EventSpec, decay_rate, exact_decay, gaussian_tail_reference, predicted_rate
from .kernel import (ConvergenceError, InteractionKernel, check_assumptions, custom_kernel, diagonal_infimum,
                     gaussian_kernel, infimum_k, loggas_kernel, parse_kernel)
from .measure import AtomicMeasure, GriddedDensity, ProductMeasure, atomic, dirac, empirical, moment, smooth
from .sampler import (Ensemble, McmcConfig, log_partition_gaussian, sample_gaussian_exact, sample_mcmc)
from .streams import stream
from .varadhan import (CovarianceFunctional, MinFunctional, SamplerSpec, SimplexGrid, L_of_phi, mc_log_mgf,
                       nonproduct_divergence, varadhan_sup)

__version__ = "0.1.0"
