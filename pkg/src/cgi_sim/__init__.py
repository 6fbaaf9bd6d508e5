"""Light-pulse atom-interferometer phases and co-located gradiometry in 1D fields."""
from .analytic import (AnalyticTerm, closed_form_breakdown, closed_form_differential,
                       ideal_cgi_phase, scale_factor, table1_catalog)
from .constants import (AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants,
                        launch_from_height, recoil_quantities)
from .dynamics import (ArmSpec, KickEvent, Trajectory, ideal_trajectory, moment_integral,
                       propagate_arm, propagate_arms)
from .errors import (ClosureWarning, ConfigError, ExtrapolationError, FitError, PropagationError,
                     ROIError, SingularityError)
from .estimator import (ProfileEstimate, cubic_mean, default_z_range, estimate_gamma,
                        plan_sampling, solve_launch, sweep_estimate)
from .fsl import FslConfig, detuning_phase, detuning_pole, fsl_phase, optimal_detuning
from .interferometer import (CGIResult, GeometrySpec, Kind, PhaseBreakdown, build_geometry,
                             curvature_phase_series, kick_phase, propagation_phase, run_cgi,
                             run_cgi_batch, run_cgi_with_trajectories, run_geometry,
                             separation_phase)
from .potential import (IdealPotential, PolynomialPotential, ProfileSpec, SampledProfile,
                        default_profile_spec, evaluate, fit_polynomial, load_profile_csv,
                        synthesize_profile)

__version__ = "0.1.0"
