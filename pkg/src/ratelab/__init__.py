"""Numerical lab for de la Vallee Poussin approximation on truncated R^d."""

from .besov import BesovParams, besov_norm_decomposition, besov_norm_integral
from .extremal import ExtremalId, build_extremal, class_membership_check, extremal_norm_scan
from .field import GridSpec, SampledField, lp_norm, sample, sample_tensor
from .harness import ExperimentConfig, RateReport, emit_report, run_property_suite, run_rate_experiment
from .kernels import KernelId, sample_kernel
from .omega import DomainError, ModulusSpec, UsageError, check_phi, eval_omega

__version__ = "0.1.0"
