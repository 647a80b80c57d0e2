"""Support-relation inference and semantic scene graphs for RGBD indoor scenes."""

from .config import AlignmentConfig, EnergyWeights, EngineConfig
from .energy import SupportProblem, total_energy
from .model import (
    Detection,
    ObjectRegion,
    PriorTables,
    SceneBundle,
    SceneGraph,
    SimilarityReport,
    SupportSolution,
    default_priors,
)
from .pipeline import run_inference, result_to_graph
from .solver import build_ip, exhaustive_minimize, solve_lp, solve_support

__version__ = "0.1.0"

__all__ = [
    "AlignmentConfig",
    "Detection",
    "EnergyWeights",
    "EngineConfig",
    "ObjectRegion",
    "PriorTables",
    "SceneBundle",
    "SceneGraph",
    "SimilarityReport",
    "SupportProblem",
    "SupportSolution",
    "build_ip",
    "default_priors",
    "exhaustive_minimize",
    "result_to_graph",
    "run_inference",
    "solve_lp",
    "solve_support",
    "total_energy",
    "__version__",
]
