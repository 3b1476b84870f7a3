"""Simulate narrative social networks and measure how extraction techniques distort them."""

__version__ = "0.1.0"

from .graph import WeightedGraph  # noqa: E402
from .model import SeasonModel, fit, simulate_season  # noqa: E402
from .sim import SimConfig, run_replicates  # noqa: E402

__all__ = ["WeightedGraph", "SeasonModel", "SimConfig", "fit", "run_replicates", "simulate_season", "__version__"]
