"""Numerics for smooth Levi-flat germs: counterexample series, Plemelj
boundary values, and the component count of the regions H_{n,eps}."""

from .errors import DomainError, LogOverflowError, NearSingularityError, SingularPointError
from .geometry import (CutoffWindow, LogComplex, PolarGrid, RegionMask, SampledCurve,
                       flood_label, make_circle, make_segment, read_pgm, write_pgm)
from .series import (FAMILY_A, FAMILY_B, CoefficientFamily, NormTable, eval_a, eval_b,
                     growth_fit, radius_estimate, schwarz_reflect)
from .plemelj import (BoundaryFunction, Extension, JumpReport, cauchy_transform,
                      extension_classify, jump_residual, morera_loop_integral,
                      plemelj_boundary_values)
from .foliation import (HalfPlaneFamily, LineFamilyHypersurface, SectorAngles, build_region,
                        count_components, critical_t, eps_threshold, f_h, g_n, h_membership, log_f_h,
                        leaf_center_intersection, psi)

__version__ = "0.1.0"
