"""Physical-layer primitives: propagation, fading/noise samplers, AMC table, scenario config."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

TARGET_FRINGE_SINR_DB = 12.0


def db(x):
    return 10.0 * np.log10(x)


def from_db(x_db):
    return np.power(10.0, np.divide(x_db, 10.0))


def dbm_to_w(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def w_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


@dataclass(frozen=True)
class PropagationModel:
    """Power-law path loss ``L0 * d**alpha`` (linear, distance in metres)."""

    L0: float
    alpha: float

    def __post_init__(self):
        if not (self.L0 > 0 and self.alpha > 0):
            raise ValueError(f"need L0 > 0 and alpha > 0, got L0={self.L0}, alpha={self.alpha}")

    @classmethod
    def from_db(cls, l0_db: float, alpha: float) -> "PropagationModel":
        return cls(L0=10.0 ** (l0_db / 10.0), alpha=alpha)

    def loss(self, d):
        return path_loss(self, d)

    def loss_db(self, d):
        return db(path_loss(self, d))

    def distance_of(self, loss):
        return np.power(np.divide(loss, self.L0), 1.0 / self.alpha)


def path_loss(model: PropagationModel, d):
    """Linear loss at distance ``d`` (scalar or array). Raises on d <= 0."""
    if not np.all(np.greater(d, 0)):
        raise ValueError(f"distance must be positive, got {d}")
    return model.L0 * np.power(d, model.alpha)


@dataclass(frozen=True)
class AmcMode:
    index: int
    threshold: float  # linear SINR
    label: str = ""

    @property
    def threshold_db(self) -> float:
        return 10.0 * math.log10(self.threshold) if self.threshold > 0 else -math.inf


@dataclass(frozen=True)
class AmcTable:
    """Ordered AMC modes 1..M with strictly increasing minimum SINR."""

    modes: tuple[AmcMode, ...]

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        if len(modes) < 2:
            raise ValueError("AMC table needs at least 2 modes")
        for k, mode in enumerate(modes, start=1):
            if mode.index != k:
                raise ValueError(f"AMC mode indices must run 1..M in order; got {mode.index} at position {k}")
        th = [m.threshold for m in modes]
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("AMC thresholds must be strictly increasing")
        if th[0] < 0:
            raise ValueError("AMC thresholds must be non-negative")

    @classmethod
    def from_db(cls, thresholds_db: Sequence[float], labels: Sequence[str] | None = None) -> "AmcTable":
        labels = labels or [""] * len(thresholds_db)
        return cls(tuple(AmcMode(k + 1, 10.0 ** (t / 10.0), lab)
                         for k, (t, lab) in enumerate(zip(thresholds_db, labels))))

    @classmethod
    def from_linear(cls, thresholds: Sequence[float]) -> "AmcTable":
        return cls(tuple(AmcMode(k + 1, float(t)) for k, t in enumerate(thresholds)))

    @property
    def M(self) -> int:
        return len(self.modes)

    @property
    def thresholds(self) -> np.ndarray:
        """Omega(1..M) as a linear array."""
        return np.array([m.threshold for m in self.modes])

    @property
    def edges(self) -> np.ndarray:
        """Omega(1..M+1) with Omega(M+1) = inf."""
        return np.append(self.thresholds, np.inf)

    def omega(self, m: int) -> float:
        if m == self.M + 1:
            return math.inf
        if not 1 <= m <= self.M:
            raise ValueError(f"mode {m} outside 1..{self.M}")
        return self.modes[m - 1].threshold

    def __len__(self):
        return self.M


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical and protocol parameters, in SI/linear units.

    ``P0=None`` means calibrate from the 12 dB cell-fringe rule; use
    :meth:`resolved_p0` to read the effective value.
    """

    R0: float
    Rmin: float
    propagation: PropagationModel
    sigma2: float
    amc: AmcTable
    Pmin: float
    Pmax: float
    I: int = 200
    P0: float | None = None
    uplink_policy: str = "fixed-target"
    target_sinr: float | None = 10.0 ** 1.5
    duplex: str = "tdd"
    fdd_offset_db: float = 0.0
    seed: int = 0
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 < self.Rmin < self.R0:
            raise ValueError(f"need 0 < Rmin < R0, got Rmin={self.Rmin}, R0={self.R0}")
        if not 0 < self.Pmin < self.Pmax:
            raise ValueError(f"need 0 < Pmin < Pmax, got Pmin={self.Pmin}, Pmax={self.Pmax}")
        if self.I < 1:
            raise ValueError(f"need I >= 1, got {self.I}")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if self.P0 is not None and not self.P0 > 0:
            raise ValueError("P0 must be positive")
        if self.uplink_policy not in ("fixed-target", "amc"):
            raise ValueError(f"unknown uplink_policy {self.uplink_policy!r}")
        if self.uplink_policy == "fixed-target" and not (self.target_sinr and self.target_sinr > 0):
            raise ValueError("fixed-target uplink needs a positive target_sinr")
        if self.duplex not in ("tdd", "fdd"):
            raise ValueError(f"unknown duplex {self.duplex!r}")

    @property
    def L0(self) -> float:
        return self.propagation.L0

    @property
    def alpha(self) -> float:
        return self.propagation.alpha

    @property
    def loss_min(self) -> float:
        return path_loss(self.propagation, self.Rmin)

    @property
    def loss_max(self) -> float:
        return path_loss(self.propagation, self.R0)

    def resolved_p0(self) -> float:
        return self.P0 if self.P0 is not None else calibrate_p0(self)

    def duplex_offset_db(self) -> float:
        return self.fdd_offset_db if self.duplex == "fdd" else 0.0

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    @classmethod
    def default(cls) -> "ScenarioConfig":
        from .configfile import default_config
        return default_config()


def calibrate_p0(config: ScenarioConfig, target_db: float = TARGET_FRINGE_SINR_DB) -> float:
    """BS power giving mean downlink SINR ``target_db`` at the cell edge (E|h|^2 = 1)."""
    return 10.0 ** (target_db / 10.0) * config.sigma2 * path_loss(config.propagation, config.R0)


def sample_fading_gain(rng: np.random.Generator, n: int) -> np.ndarray:
    """|h|^2 draws with CDF 1 - exp(-y)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.standard_exponential(n)


def sample_noise_power(rng: np.random.Generator, sigma2: float, n: int) -> np.ndarray:
    """Noise power draws ``sigma2 * chi2_1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    z = rng.standard_normal(n)
    return sigma2 * z * z
