"""Phase-space machinery for coupled harmonic oscillators with time-dependent
spring and coupling constants."""

from .coupled import (CoupledSystem, UncertaintyReport, build_normal_modes, coupled_variances,
                      general3_system, sum_rule_deviation, symmetric_system, uncertainty_table)
from .ermakov import ModeState, ScaleTrajectory, mode_state, quench_scale_factor, solve_ermakov
from .errors import (CapabilityError, CompositionDomainError, DegenerateCouplingError,
                     FrequencyDomainError, IntegrationError, QuadratureOrderError,
                     ScheduleDomainError, ScheduleRangeError, StabilityError, StepSizeError,
                     TdhoError, TrajectoryRangeError)
from .jet import Jet
from .oracle import ProductWigner, QuadratureRule, quad_moment, quad_purity, quad_reduced
from .reduced import (TwoModeContext, mixedness_z, purity, ratio_delta, ratio_gamma,
                      reduced_wigner)
from .schedule import ModeFrequencySpec, ParamSchedule, eval_param, mode_frequency, parse_schedule
from .single_osc import uncertainty_single, wigner_single

__version__ = "0.1.0"
