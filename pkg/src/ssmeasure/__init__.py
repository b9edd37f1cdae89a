"""Certified estimates of the packing and centered Hausdorff measures of
self-similar sets satisfying the strong separation condition."""

from .chausdorff import (CenteredBoundInputs, centered_error_bound, estimate_centered,
                         first_admissible_index, run_centered)
from .cloud import PointCloud, build_cloud, extend_cloud, fixed_points, mass_of_code_prefix
from .config import load_config, parse_config
from .errors import *  # noqa: F401,F403
from .formulas import (FormulaResult, HypothesisVerdict, closed_form, spectral_interval,
                       test_hypothesis)
from .ifs import (IFSystem, KnownConstants, Similitude, build_system, cantor, derive_constants,
                  diameter, planar_cantor, separation_gap, sierpinski, similarity_dimension,
                  window_feasible)
from .neighbors import build_index, cumulative_mass_below, ranked_distances
from .oracle import brute_centered, brute_packing
from .packing import (ErrorBoundInputs, MeasureEstimate, detect_stabilization, estimate_packing,
                      packing_error_bound, run_packing)

__version__ = "0.1.0"
