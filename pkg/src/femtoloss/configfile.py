"""Flat ``key = value`` scenario files and ``index threshold_db label`` AMC tables."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import AmcMode, AmcTable, PropagationModel, ScenarioConfig, dbm_to_w

REQUIRED_KEYS = (
    "r0_m", "rmin_m", "l0_db", "alpha", "sigma2_dbm", "p0_dbm", "pmin_dbm",
    "pmax_dbm", "i", "uplink_policy", "duplex", "seed", "amc_table",
)
OPTIONAL_KEYS = ("target_sinr_db", "fdd_offset_db")


class ConfigError(ValueError):
    """Malformed or incomplete scenario / AMC file."""


def parse_kv(text: str, source: str = "<string>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        else:
            key, _, value = line.partition(" ")
        key, value = key.strip().lower(), value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_amc_table(text: str, source: str = "<string>") -> AmcTable:
    modes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) < 2:
            raise ConfigError(f"{source}:{lineno}: expected 'index threshold_db label'")
        try:
            index, thr_db = int(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad number in {raw.strip()!r}") from None
        modes.append(AmcMode(index, 10.0 ** (thr_db / 10.0), parts[2] if len(parts) > 2 else ""))
    try:
        return AmcTable(tuple(modes))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_amc_table(path) -> AmcTable:
    path = Path(path)
    return parse_amc_table(path.read_text(), str(path))


def _num(kv, key, source, cast=float):
    try:
        return cast(kv[key])
    except KeyError:
        raise ConfigError(f"{source}: missing key {key!r}") from None
    except ValueError:
        raise ConfigError(f"{source}: key {key!r} has invalid value {kv[key]!r}") from None


def config_from_mapping(kv: dict[str, str], base_dir: Path | None = None,
                        source: str = "<string>", amc: AmcTable | None = None) -> ScenarioConfig:
    for key in REQUIRED_KEYS:
        if key not in kv:
            raise ConfigError(f"{source}: missing key {key!r}")

    policy = kv["uplink_policy"].lower()
    if policy in ("fixed", "fixed-target"):
        policy = "fixed-target"
    elif policy not in ("amc", "amc-driven"):
        raise ConfigError(f"{source}: key 'uplink_policy' must be fixed-target or amc, got {kv['uplink_policy']!r}")
    else:
        policy = "amc"
    target = None
    if policy == "fixed-target":
        target = 10.0 ** (_num(kv, "target_sinr_db", source) / 10.0)

    duplex = kv["duplex"].lower()
    if duplex not in ("tdd", "fdd"):
        raise ConfigError(f"{source}: key 'duplex' must be tdd or fdd, got {kv['duplex']!r}")
    offset = _num(kv, "fdd_offset_db", source) if duplex == "fdd" else float(kv.get("fdd_offset_db", 0) or 0)

    p0 = None if kv["p0_dbm"].lower() == "auto" else dbm_to_w(_num(kv, "p0_dbm", source))

    if amc is None:
        amc_path = Path(kv["amc_table"])
        if not amc_path.is_absolute() and base_dir is not None:
            amc_path = base_dir / amc_path
        try:
            amc = load_amc_table(amc_path)
        except OSError as exc:
            raise ConfigError(f"{source}: cannot read amc_table {str(amc_path)!r}: {exc.strerror}") from None

    try:
        return ScenarioConfig(
            R0=_num(kv, "r0_m", source),
            Rmin=_num(kv, "rmin_m", source),
            propagation=PropagationModel.from_db(_num(kv, "l0_db", source), _num(kv, "alpha", source)),
            sigma2=dbm_to_w(_num(kv, "sigma2_dbm", source)),
            amc=amc,
            Pmin=dbm_to_w(_num(kv, "pmin_dbm", source)),
            Pmax=dbm_to_w(_num(kv, "pmax_dbm", source)),
            I=_num(kv, "i", source, int),
            P0=p0,
            uplink_policy=policy,
            target_sinr=target,
            duplex=duplex,
            fdd_offset_db=offset,
            seed=_num(kv, "seed", source, int),
            source=source,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text()
    return config_from_mapping(parse_kv(text, str(path)), path.parent, str(path))


def default_config_path() -> Path:
    return Path(str(resources.files("femtoloss") / "data" / "default.cfg"))


def default_config() -> ScenarioConfig:
    return load_config(default_config_path())
