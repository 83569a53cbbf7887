"""Volume-preserving mean curvature flow of revolution graphs between
two equidistant hypersurfaces in a rotationally symmetric ambient space.

The ambient geometry is a doubly warped metric dz^2 + f(z)^2 dr^2 +
f(z)^2 h(r)^2 g_sphere; hypersurfaces are generated by radial graphs
r(z) over a slab [a, b] and move with normal speed avg_H - H.  The
package computes the flow, the closed-form a-priori bounds available
for it, and monitors the bounds along every run.
"""

from .ambient import AmbientSpace, CurvatureComponents, Rect, SupNorms, make_space
from .bounds import BoundSet, ViolationReport, compute_bound_set
from .config import ConfigError, RunConfig, parse_config
from .curve import GraphProfile, ParamCurve
from .flow import DtPolicy, FlowConfig, RunResult, detect_steady, run, step
from .geometry import GeometrySummary, summarize

__all__ = [
    "AmbientSpace", "CurvatureComponents", "Rect", "SupNorms", "make_space",
    "BoundSet", "ViolationReport", "compute_bound_set",
    "ConfigError", "RunConfig", "parse_config",
    "GraphProfile", "ParamCurve",
    "DtPolicy", "FlowConfig", "RunResult", "detect_steady", "run", "step",
    "GeometrySummary", "summarize",
]

__version__ = "0.1.0"
