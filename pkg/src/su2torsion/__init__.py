"""Dubois torsion on SU(2) character varieties of knot groups."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .su2 import KernelParams, exp_map, log_map, adjoint_matrix, haar_sample  # noqa: F401
from .presentation import (TREFOIL_DOCUMENT, Presentation, Word, builtin, evaluate_word,  # noqa: F401
                           fox_derivative, instantiate_fox, load_presentation,
                           parse_presentation)
from .chain import build_chain_maps, pseudo_det  # noqa: F401
from .repvariety import (RepresentationPoint, TrefoilPath, builtin_trefoil_path,  # noqa: F401
                         continue_path, find_representation, regularity_check,
                         tangent_cocycle, trace_path)
from .torsion import (ONE, PeripheralFunction, evaluate_peripheral, integrate_path,  # noqa: F401
                      seminorm, torsion_at)
from .globalformula import (GlobalEstimate, compare_kernels, global_estimate,  # noqa: F401
                            lambda_sweep, phi)
from .pillowcase import (PillowcasePoint, a_ideal_residual, canonicalize,  # noqa: F401
                         evaluate_on_pillowcase, restrict)
