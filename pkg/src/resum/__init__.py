"""Global integral representations of functions given by Taylor coefficients."""
__version__ = "0.1.0"

from .analysis import DecayScan, JumpReport, SingularityProbe, decay_scan, jump_check, singularity_type
from .contour import (HankelContour, PathSegment, QuadratureResult, arc, c1_contour, integrate_custom,
                      integrate_segment, line, oint, ray, spiral)
from .errors import (BranchConfluence, ContourPinch, DecayViolation, DenominatorZero, DomainError,
                     EvaluationFailure, ExtrapolationFailure, NoSingularity, NonConvergence, OnCutError,
                     PoleOnContour, ResumError)
from .model import (CoefficientModel, Density, Term, builtin_density, builtin_model,
                    coefficients_from_model, density_exp_sqrt, density_hurwitz, density_logmix,
                    density_stirling_f3)
from .reconstruct import (FunctionSpec, GlobalFunction, borel_sum, coefficients_from_function,
                          eval_entire, eval_f3, eval_f4, eval_finite_radius, laplace_of_entire,
                          lngamma_via_sum)
from .specfun import (BranchPair, ei_complex, exp_integral_ei, lambert_branches, reference_lngamma,
                      scaled_e1, stirling_density)
