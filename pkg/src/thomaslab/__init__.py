"""Numerical toolkit for the cyclically symmetric Thomas flow

    dx/dt = sin(y) - b x,  dy/dt = sin(z) - b y,  dz/dt = sin(x) - b z.

The package enumerates and classifies the diagonal equilibria, locates the
pitchfork / Hopf / double saddle-node bifurcation families, measures
Lyapunov spectra and the Kaplan-Yorke dimension, collects Poincare sections
on the surface sin(x) = b z, and characterizes the divergence-free b = 0
regime as a chaotic walk.  See the `thomaslab` command line tool for the
report formats.
"""
from ._version import __version__
from .equilibria import (BifKind, BifurcationEvent, Equilibrium,
                         LyapunovAudit, StabilityClass, all_bifurcations,
                         classify, find_fixed_points, hopf_points,
                         lyapunov_function_check, pitchfork_estimate,
                         saddle_node_points)
from .errors import (DomainError, InsufficientDataError, IntegrationError,
                     SchemaError, ThomasLabError)
from .integrate import (IntegratorConfig, Method, TangentRun, Trajectory,
                        integrate, integrate_with_tangent)
from .metrics import (LyapunovReport, kaplan_yorke, lyapunov_spectrum,
                      spectrum_scan)
from .model import (EigenTriple, as_state, check_damping,
                    circulant_eigenvalues, cyclic_permute, divergence, field,
                    jacobian, reflect)
from .sections import (CycleReport, CycleStatus, Direction, EnsembleSection,
                       SectionHit, SweepRow, bifurcation_sweep,
                       detect_limit_cycle, ensemble_section, poincare_section)
from .walk import (DensityReport, LatticePoint, WalkStats, density_check,
                   diffusion_estimate, lattice_eigenvalues, mean_speed,
                   msd_curve, sin_sq_means, streamed_speed_stats, walk_stats)

__all__ = [
    "__version__",
    "BifKind", "BifurcationEvent", "Equilibrium", "LyapunovAudit",
    "StabilityClass", "all_bifurcations", "classify", "find_fixed_points",
    "hopf_points", "lyapunov_function_check", "pitchfork_estimate",
    "saddle_node_points",
    "DomainError", "InsufficientDataError", "IntegrationError",
    "SchemaError", "ThomasLabError",
    "IntegratorConfig", "Method", "TangentRun", "Trajectory", "integrate",
    "integrate_with_tangent",
    "LyapunovReport", "kaplan_yorke", "lyapunov_spectrum", "spectrum_scan",
    "EigenTriple", "as_state", "check_damping", "circulant_eigenvalues",
    "cyclic_permute", "divergence", "field", "jacobian", "reflect",
    "CycleReport", "CycleStatus", "Direction", "EnsembleSection",
    "SectionHit", "SweepRow", "bifurcation_sweep", "detect_limit_cycle",
    "ensemble_section", "poincare_section",
    "DensityReport", "LatticePoint", "WalkStats", "density_check",
    "diffusion_estimate", "lattice_eigenvalues", "mean_speed", "msd_curve",
    "sin_sq_means", "streamed_speed_stats", "walk_stats",
]
