"""IRS-aided uplink simulator: training patterns, LS estimation, passive beamforming."""

from .beamforming import (
    CONTINUOUS,
    BeamformingProblem,
    RefinementResult,
    ReflectionVector,
    SdrBeamResult,
    achievable_rate,
    best_rotation_quantize,
    channel_gain_beam,
    charnes_cooper,
    exhaustive_beam_search,
    gaussian_randomization,
    rotate_and_quantize,
    sdr_refined_beam,
    sinr,
    sinr_upper_bound,
    successive_refinement,
)
from .channel import ChannelRealization, Geometry, group_channels, path_gain, sample_channels
from .errors import (
    ConfigError,
    IndivisibleGrouping,
    Intractable,
    InvalidFrame,
    IrsbeamError,
    NoConvergence,
    SingularMatrix,
    UnknownOrder,
)
from .estimation import EstimationResult, TrainingObservation, empirical_mse, ls_estimate, simulate_training
from .hadamard import hadamard, smallest_hadamard_order
from .harness import ExperimentConfig, SchemeResult, mse_sweep, rate_vs_elements, rate_vs_groups, run_trial
from .patterns import (
    PhaseShiftSet,
    ReflectionPattern,
    design_pattern,
    dft_matrix,
    exhaustive_pattern_search,
    naive_pattern,
    pattern_mse,
    quantized_dft_pattern,
    truncated_hadamard_pattern,
)
from .sdp import SdpProblemData, SdpSolution, solve_sdp

__version__ = "0.1.0"
