"""Structure-preserving simulation of a third-order dispersive curve flow
on the two-sphere, with its reduced constant-coefficient complex solver
and the conservation-law diagnostics connecting the two."""

from .complexflow import (LaureyParams, l2norm_sq, laurey1, laurey2,
                          param_map, rhs_nonlinear, run_complex, step_strang,
                          test1, test2)
from .config import ConfigError, RunConfig, make_initial, parse_config
from .energies import (EnergyReport, energy1, energy2, h2_seminorm_sq,
                       make_report, semi_conservation_ratio)
from .flow import (BlowUpError, CFLViolation, FlowParams, StepperConfig,
                   TrajectoryState, rhs_darios, rhs_fm, rhs_intrinsic, run,
                   step_rk4, suggest_dt)
from .frame import FrameData, ResolutionError, build_parallel_frame, extract_q
from .geometry import (ConstraintError, complex_structure, curvature_op,
                       metric, project_tangent, renormalize)
from .grid import (DiscreteCurve, covariant_derivative, derivative,
                   diff_matrix, integrate)

__version__ = "0.1.0"
