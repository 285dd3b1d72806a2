"""SEIR epidemic model with exponential-spline time-varying rates."""

from ._backend import BACKEND
from .errors import (
    DataError,
    DomainError,
    FitError,
    FormatError,
    LengthError,
    SeirSplineError,
    ThetaValidationError,
)
from .rates import (
    DEFAULT_LAMBDA,
    RateSeries,
    ThetaSet,
    build_rate_curves,
    eval_segment,
    reproduction_number,
    validate_theta,
)
from .seir import (
    DEFAULT_SIGMA,
    CompartmentState,
    EpidemicConstants,
    Trajectory,
    initial_state,
    simulate,
    step,
)
from .fitting import (
    FitConfig,
    FitReport,
    FittedModel,
    ObservationSet,
    fit,
    fitted_trajectory,
    model_trajectory,
    objective,
    residuals,
)
from .scenarios import (
    Projection,
    ScenarioSpec,
    extend_rates,
    find_peak,
    project,
)
from .ingest import RawTimeSeriesTable, derive_observations, parse_timeseries_csv
from .documents import (
    DataDirectory,
    ModelDocument,
    ModelStore,
    load_data_directory,
)

__version__ = "0.1.0"
