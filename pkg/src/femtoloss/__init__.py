"""Non-cooperative path loss estimation between a macrocell user and a femtocell user."""

from .configfile import ConfigError, default_config, load_config
from .map_estimator import PathLossEstimate, estimate_L_bp
from .model import AmcTable, PropagationModel, ScenarioConfig, calibrate_p0, path_loss
from .sim import (EstimationResult, ObservationTrace, Observables, abs_db_error, make_rng,
                  run_estimation, simulate_scenario)

__all__ = [
    "AmcTable", "ConfigError", "EstimationResult", "ObservationTrace", "Observables",
    "PathLossEstimate", "PropagationModel", "ScenarioConfig", "abs_db_error", "calibrate_p0",
    "default_config", "estimate_L_bp", "load_config", "make_rng", "path_loss",
    "run_estimation", "simulate_scenario",
]
