import logging

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .calibration import calibrate, check_constraints  # noqa: E402 F401
from .config import ExperimentConfig  # noqa: E402 F401
from .control import (  # noqa: E402 F401
    YawSchedule,
    builtin_plan,
    decompose_turn,
    deviation_metrics,
)
from .exceptions import (  # noqa: E402 F401
    AnalysisError,
    CalibrationError,
    ConfigError,
    InputError,
    NotCalibratedError,
    RaySwimError,
    SingularityError,
    StabilityWarning,
)
from .harness import (  # noqa: E402 F401
    run_experiment,
    run_sweep,
    sensitivity_compare,
)
