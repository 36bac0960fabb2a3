"""DoF regions and a finite-SNR phase-Markov simulator for the two-user MIMO
broadcast and interference channels with imperfect current and delayed CSIT."""

from .channel import ChannelSlot, generate_block, load_block, measured_exponent, save_block
from .config import AntennaConfig, Kind, QualityExponents
from .errors import (
    DeltaBarOutOfRange,
    Infeasible,
    InsufficientLadder,
    InsufficientSamples,
    PlanError,
    RankDeficient,
    TargetInactive,
    ValidationError,
)
from .plan import (
    PhasePlan,
    build_phase_plan,
    calibrate,
    delta_bar_bound,
    general_dof_point,
    solve_delta_sequence,
    solve_delta_sequences,
)
from .regions import (
    Baseline,
    Corner,
    CornerPoint,
    DofRegion,
    HalfPlane,
    baseline_region,
    corner_coordinates,
    corner_points,
    delayed_csit_sufficient,
    inner_region,
    outer_region,
    region_case,
    region_contains,
    region_equal,
    sufficient_delayed_threshold,
)
from .sim import (
    InterferenceRecord,
    SimReport,
    SlotSignal,
    mac_feasibility,
    make_precoders,
    reconstruct_and_quantize,
    simulate_dof,
)

__version__ = "0.1.0"
