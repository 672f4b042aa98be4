"""Reversible grid Langevin kernels, entropic couplings, and numerical
verification of entropy-transport inequalities with their dual, contraction,
tensorization, and concentration forms."""

from .config import RunConfig
from .errors import (DegeneratePotentialError, DomainError, InfeasibleError,
                     NotConvergedError, ParameterError, SizeError,
                     SpaceMismatchError, SupportError)
from .inequalities import (EtiParams, InequalityReport, domination_check,
                           eti_check, eti_m_check, hjb_contraction_ii,
                           hjb_contraction_iii, infconv_lsi_check,
                           lsi_reference_constant, poincare_check,
                           reverse_hc_check, talagrand_check, theta,
                           theta_minus_one)
from .measures import (DiscreteMeasure, GridSpace, ScalarField,
                       ent_functional, p_norm, product_measure,
                       relative_entropy)
from .reference import (Generator, PotentialSpec, ReferenceKernel,
                        build_generator, gaussian_grid, ou_closed_form,
                        product_kernel, stationary_measure, transition_kernel)
from .schrodinger import (CouplingSolution, dual_value, entropic_cost,
                          forward_cost, ipfp)
from .semigroup import apply_heat, apply_hjb, entropy_dual_value, hopf_lax
from .tensor_concentration import (BorelSubset, concentration_fn_check,
                                   concentration_set_check, cost_sublevel_set,
                                   set_hitting_cost, tensor_eti_suite,
                                   tensorized_cost_upper_bound)
from .transport import w2_1d, w2_small_lp

__version__ = "0.1.0"
