"""One-step interaction schemes for peer-to-peer protocol models.

From a single symbolic scheme the package derives three consistent views of
the dynamics: the deterministic drift ODE, the Langevin SDE whose noise
factor is built per reaction so that ``b @ b.T`` equals the diffusion matrix
exactly, and the exact Gillespie jump process.  On top sit fixed-point
location, linear stability classification and phase portraits, plus built-in
FastTrack and BitTorrent swarm models, a plain-text model file format and a
CLI (``p2pkinetics --help``).
"""

from ._backend import BACKEND, USING_NUMBA
from .analysis import (
    FixedPoint,
    StabilityReport,
    classify,
    default_starts,
    eigenvalues,
    fasttrack_classification,
    find_fixed_points,
    phase_portrait,
    stability_report,
)
from .eigen import EigenvalueError, eigvals
from .kinetics import (
    KineticCoefficients,
    diffusion,
    drift,
    jacobian,
    kinetic_coefficients,
    noise_factor,
)
from .modelfile import ModelFileError, load_model_file, parse_model, render_model, save_model_file
from .models import (
    BUILTIN_MODELS,
    ChunkModelParams,
    FastTrackParams,
    bittorrent_aggregated,
    bittorrent_chunks,
    bittorrent_closed,
    bittorrent_open,
    build_builtin,
    fasttrack,
    fasttrack_char_roots,
    fasttrack_fixed_point,
)
from .scheme import (
    Aggregate,
    InteractionScheme,
    RateLaw,
    Reaction,
    SchemeError,
    Species,
    change_vector,
    make_scheme,
    propensities,
    propensity,
    reaction_from_counts,
    validate,
    validated,
)
from .simulate import (
    EnsembleStats,
    RunConfig,
    SimulationError,
    Trajectory,
    derive_run_seed,
    ensemble,
    integrate_ode,
    integrate_sde,
    ssa_run,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "BACKEND",
    "BUILTIN_MODELS",
    "ChunkModelParams",
    "EigenvalueError",
    "EnsembleStats",
    "FastTrackParams",
    "FixedPoint",
    "InteractionScheme",
    "KineticCoefficients",
    "ModelFileError",
    "RateLaw",
    "Reaction",
    "RunConfig",
    "SchemeError",
    "SimulationError",
    "Species",
    "StabilityReport",
    "Trajectory",
    "USING_NUMBA",
    "bittorrent_aggregated",
    "bittorrent_chunks",
    "bittorrent_closed",
    "bittorrent_open",
    "build_builtin",
    "change_vector",
    "classify",
    "default_starts",
    "derive_run_seed",
    "diffusion",
    "drift",
    "eigenvalues",
    "eigvals",
    "ensemble",
    "fasttrack",
    "fasttrack_char_roots",
    "fasttrack_classification",
    "fasttrack_fixed_point",
    "find_fixed_points",
    "integrate_ode",
    "integrate_sde",
    "jacobian",
    "kinetic_coefficients",
    "load_model_file",
    "make_scheme",
    "noise_factor",
    "parse_model",
    "phase_portrait",
    "propensities",
    "propensity",
    "reaction_from_counts",
    "render_model",
    "save_model_file",
    "ssa_run",
    "stability_report",
    "validate",
    "validated",
]
