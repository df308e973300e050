"""ctrlbench: evaluation workbench for musical input controllers.

Generates HCI and musical task batteries, ingests timestamped performance
data from human or simulated performers, computes movement-time, timing,
feature-control, learnability, and explorability metrics, fits the
pointing / sub-movement / tunnel-traversal laws to produce indexes of
performance, and emits device-comparison and taxonomy reports.
"""

from .battery import (
    AcquisitionTask,
    MusicalTask,
    PitchTarget,
    SteeringTask,
    TrialPlan,
    generate_acquisition_battery,
    generate_musical_battery,
    generate_steering_battery,
    pitch_target,
    plan_from_spec,
)
from .errors import (
    CapacityError,
    DomainError,
    ParseError,
    ProtocolError,
    SingularDesignError,
    StateError,
    ValidationError,
    VersionError,
    WorkbenchError,
)
from .gateway import Gateway, GatewayChannel
from .laws import (
    FitResult,
    LawParams,
    Observation,
    fit_linear_law,
    fit_meyer,
    fitts_id,
    linear_law_time,
    meyer_time,
)
from .metrics import (
    Event,
    ExplorabilityScore,
    FeatureReport,
    LearnabilityReport,
    MovementOutcome,
    Sample,
    SteeringOutcome,
    TimingReport,
    TrialRecord,
    error_rate,
    explorability_score,
    feature_report,
    learnability_fit,
    movement_time,
    steering_compliance,
    timing_deviation,
)
from .paths import Arc, PathSpec, Straight, steering_difficulty
from .session import (
    ClassSummary,
    ComparisonReport,
    Session,
    SessionRecord,
    comparison_report,
    compute_trial_metrics,
    export_log,
    import_log,
    session_from_records,
    task_class,
)
from .simulate import (
    SimConfig,
    SubmovementTrace,
    simulate_acquisition,
    simulate_plan,
    simulate_rhythm,
    simulate_steering,
    simulate_submovements,
)
from .taxonomy import (
    Chart,
    ControlStructure,
    DeviceDescriptor,
    MatchReport,
    SenseDimension,
    TaskStructure,
    build_chart,
    classify_control_structure,
    degrees_of_freedom,
    load_device,
    match_device_to_task,
    parse_device,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
