"""Sharp Bernstein and Markov factors for rational functions on smooth
Jordan curves and arcs."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .exact import (blaschke_deriv, blaschke_eval, disk_normal_density, mobius_transfer,
                    segment_normal_density)
from .extremal import (ExtremalFamily, extremal_blaschke, faa_di_bruno, lemniscate_power,
                       markov_extremal, mobius_power)
from .factors import FactorReport, bernstein_factor_arc, bernstein_factor_curve, markov_factor
from .geometry import Arc, BoundaryFrame, Curve, Side, frame_at, make_arc, make_curve, make_domain, side_of
from .greens import GreenProblem, GreenSolution, green_value, normal_derivative, solve_green
from .harness import ExperimentConfig, VerifyReport, run_experiment, verify_inequality
from .openup import OmegaValue, OpenUp, arc_normal_density, omega, open_up, symmetrize
from .points import INF
from .rational import PoleSet, RationalFn, eval_deriv, make_rational, sup_norm
