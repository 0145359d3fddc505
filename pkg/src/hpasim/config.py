"""Scenario configuration: schema, validation, defaults, matrix expansion.

The config file is YAML.  Key names are part of the artifact's contract and
are frozen by golden tests; see docs/config.md for the reference.  Demand
coefficients are synthetic calibration values, not measurements: they are
chosen so that the two front-facing services saturate first under the
default load ramp while the rest stay comfortable, which is the regime the
scenario matrix is designed to explore.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core import MicroserviceSpec, SlaMetrics
from .simulate import DemandModel, LoadProfile, Scenario, ServiceDemand, SimFlags


class ConfigError(Exception):
    """Raised for any schema or validation problem in a scenario config."""


@dataclass(frozen=True)
class ServiceConfig:
    name: str
    cpu_request: int
    cpu_limit: int
    base_demand: int
    per_user_demand: float
    min_replicas: int = 1
    initial_replicas: int | None = None


@dataclass(frozen=True)
class MatrixConfig:
    services: tuple[ServiceConfig, ...]
    load: LoadProfile
    max_replicas: tuple[int, ...]
    cpu_thresholds: tuple[float, ...]
    reconcile_period: int = 15
    sample_period: int = 1
    startup_delay: int = 0
    smoothing_window: int = 1
    flags: SimFlags = field(default_factory=SimFlags)
    baseline_tolerance: float = 0.0
    baseline_stabilization: int = 0
    seed: int = 0


# Per-replica CPU requests/limits of the default 11-service application:
# 100m/200m for most services, 200m/300m for adservice and cartservice,
# 70m/125m for redis.  Demand coefficients are calibration values (see
# module docstring): frontend and currency are the heavy user-driven pair
# (frontend peaks at 650m, 130% of a pinned 5x100m deployment), and every
# other service stays under 20% of one replica's request at peak so slack
# exists to exchange even in the tightest threshold scenarios.
DEFAULT_SERVICES: tuple[ServiceConfig, ...] = (
    ServiceConfig("frontend", 100, 200, 50, 1.0),
    ServiceConfig("cartservice", 200, 300, 15, 0.03),
    ServiceConfig("productcatalog", 100, 200, 10, 0.015),
    ServiceConfig("currency", 100, 200, 30, 0.6),
    ServiceConfig("payment", 100, 200, 8, 0.015),
    ServiceConfig("shipping", 100, 200, 8, 0.015),
    ServiceConfig("email", 100, 200, 8, 0.015),
    ServiceConfig("checkout", 100, 200, 10, 0.015),
    ServiceConfig("recommendation", 100, 200, 10, 0.015),
    ServiceConfig("adservice", 200, 300, 15, 0.03),
    ServiceConfig("redis", 70, 125, 6, 0.01),
)

DEFAULT_MAX_REPLICAS = (2, 5, 10)
DEFAULT_THRESHOLDS = (20.0, 50.0, 80.0)


def default_matrix() -> MatrixConfig:
    return MatrixConfig(
        services=DEFAULT_SERVICES,
        load=LoadProfile(),
        max_replicas=DEFAULT_MAX_REPLICAS,
        cpu_thresholds=DEFAULT_THRESHOLDS,
    )


def scenario_id(max_r: int, tmv: float) -> str:
    return f"{max_r}R-{tmv:g}%"


def expand_scenarios(cfg: MatrixConfig) -> list[Scenario]:
    """One scenario per (max_replicas, threshold) grid point."""
    scenarios = []
    for max_r in cfg.max_replicas:
        for tmv in cfg.cpu_thresholds:
            specs = tuple(
                MicroserviceSpec(s.name, s.cpu_request, s.cpu_limit) for s in cfg.services
            )
            slas = {
                s.name: SlaMetrics(tmv=tmv, min_r=s.min_replicas, max_r=max_r)
                for s in cfg.services
            }
            demand = DemandModel(
                per_service={
                    s.name: ServiceDemand(base=s.base_demand, per_user=s.per_user_demand)
                    for s in cfg.services
                }
            )
            initial = {
                s.name: s.initial_replicas if s.initial_replicas is not None else s.min_replicas
                for s in cfg.services
            }
            scenarios.append(
                Scenario(
                    scenario_id=scenario_id(max_r, tmv),
                    services=specs,
                    slas=slas,
                    demand=demand,
                    load=cfg.load,
                    initial_replicas=initial,
                    reconcile_period=cfg.reconcile_period,
                    sample_period=cfg.sample_period,
                    startup_delay=cfg.startup_delay,
                    smoothing_window=cfg.smoothing_window,
                    flags=cfg.flags,
                    baseline_tolerance=cfg.baseline_tolerance,
                    baseline_stabilization=cfg.baseline_stabilization,
                )
            )
    return scenarios


_TOP_KEYS = {"version", "seed", "load", "services", "scenarios", "control", "flags", "baseline"}
_LOAD_KEYS = {"total_duration", "ramp_duration", "peak_users", "spawn_rate"}
_SERVICE_KEYS = {
    "name",
    "cpu_request",
    "cpu_limit",
    "base_demand",
    "per_user_demand",
    "min_replicas",
    "initial_replicas",
}
_SCENARIO_KEYS = {"max_replicas", "cpu_thresholds"}
_CONTROL_KEYS = {"reconcile_period", "sample_period", "startup_delay", "smoothing_window"}
_FLAG_KEYS = {"strict_conservation", "apply_res_dr_on_noscale", "reset_max_r_each_tick"}
_BASELINE_KEYS = {"tolerance", "scale_down_stabilization"}


def load_config(path: str | Path) -> MatrixConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")
    return parse_config(raw)


def parse_config(raw: dict) -> MatrixConfig:
    _check_keys("top level", raw, _TOP_KEYS)
    version = raw.get("version", 1)
    if version != 1:
        raise ConfigError(f"unsupported config version {version!r}")

    load_raw = raw.get("load", {})
    _check_keys("load", load_raw, _LOAD_KEYS)
    try:
        load = LoadProfile(
            total_duration=_as_int("load.total_duration", load_raw.get("total_duration", 900)),
            ramp_duration=_as_int("load.ramp_duration", load_raw.get("ramp_duration", 300)),
            peak_users=_as_int("load.peak_users", load_raw.get("peak_users", 600)),
            spawn_rate=_as_number("load.spawn_rate", load_raw.get("spawn_rate", 2.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    services_raw = raw.get("services")
    if services_raw is None:
        services = DEFAULT_SERVICES
    else:
        if not isinstance(services_raw, list) or not services_raw:
            raise ConfigError("services must be a non-empty list")
        services = tuple(_parse_service(s) for s in services_raw)
    names = [s.name for s in services]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate service names")

    scen_raw = raw.get("scenarios", {})
    _check_keys("scenarios", scen_raw, _SCENARIO_KEYS)
    max_replicas = tuple(
        _as_int("scenarios.max_replicas", v)
        for v in scen_raw.get("max_replicas", list(DEFAULT_MAX_REPLICAS))
    )
    thresholds = tuple(
        _as_number("scenarios.cpu_thresholds", v)
        for v in scen_raw.get("cpu_thresholds", list(DEFAULT_THRESHOLDS))
    )
    if not max_replicas or not thresholds:
        raise ConfigError("scenarios.max_replicas and scenarios.cpu_thresholds must be non-empty")
    for m in max_replicas:
        if m < 1:
            raise ConfigError(f"max_replicas entries must be >= 1, got {m}")
    for t in thresholds:
        if not 0 < t <= 100:
            raise ConfigError(f"cpu_thresholds entries must be in (0, 100], got {t}")

    control = raw.get("control", {})
    _check_keys("control", control, _CONTROL_KEYS)
    flags_raw = raw.get("flags", {})
    _check_keys("flags", flags_raw, _FLAG_KEYS)
    baseline_raw = raw.get("baseline", {})
    _check_keys("baseline", baseline_raw, _BASELINE_KEYS)

    cfg = MatrixConfig(
        services=services,
        load=load,
        max_replicas=max_replicas,
        cpu_thresholds=thresholds,
        reconcile_period=_as_int(
            "control.reconcile_period", control.get("reconcile_period", 15)
        ),
        sample_period=_as_int("control.sample_period", control.get("sample_period", 1)),
        startup_delay=_as_int("control.startup_delay", control.get("startup_delay", 0)),
        smoothing_window=_as_int(
            "control.smoothing_window", control.get("smoothing_window", 1)
        ),
        flags=SimFlags(
            strict_conservation=_as_bool(
                "flags.strict_conservation", flags_raw.get("strict_conservation", False)
            ),
            apply_res_dr_on_noscale=_as_bool(
                "flags.apply_res_dr_on_noscale",
                flags_raw.get("apply_res_dr_on_noscale", False),
            ),
            reset_max_r_each_tick=_as_bool(
                "flags.reset_max_r_each_tick", flags_raw.get("reset_max_r_each_tick", False)
            ),
        ),
        baseline_tolerance=_as_number(
            "baseline.tolerance", baseline_raw.get("tolerance", 0.0)
        ),
        baseline_stabilization=_as_int(
            "baseline.scale_down_stabilization",
            baseline_raw.get("scale_down_stabilization", 0),
        ),
        seed=_as_int("seed", raw.get("seed", 0)),
    )
    _validate(cfg)
    return cfg


def _parse_service(raw: dict) -> ServiceConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"service entries must be mappings, got {raw!r}")
    _check_keys("service", raw, _SERVICE_KEYS)
    for key in ("name", "cpu_request", "cpu_limit", "base_demand", "per_user_demand"):
        if key not in raw:
            raise ConfigError(f"service entry missing required key {key!r}")
    initial = raw.get("initial_replicas")
    return ServiceConfig(
        name=str(raw["name"]),
        cpu_request=_as_int("cpu_request", raw["cpu_request"]),
        cpu_limit=_as_int("cpu_limit", raw["cpu_limit"]),
        base_demand=_as_int("base_demand", raw["base_demand"]),
        per_user_demand=_as_number("per_user_demand", raw["per_user_demand"]),
        min_replicas=_as_int("min_replicas", raw.get("min_replicas", 1)),
        initial_replicas=None if initial is None else _as_int("initial_replicas", initial),
    )


def _validate(cfg: MatrixConfig) -> None:
    for s in cfg.services:
        if s.cpu_request <= 0:
            raise ConfigError(f"{s.name}: cpu_request must be > 0")
        if s.cpu_limit < s.cpu_request:
            raise ConfigError(f"{s.name}: cpu_limit must be >= cpu_request")
        if s.base_demand < 0 or s.per_user_demand < 0:
            raise ConfigError(f"{s.name}: demand coefficients must be non-negative")
        if s.min_replicas < 1:
            raise ConfigError(f"{s.name}: min_replicas must be >= 1")
        if s.initial_replicas is not None and s.initial_replicas < s.min_replicas:
            raise ConfigError(f"{s.name}: initial_replicas must be >= min_replicas")
        if s.min_replicas > min(cfg.max_replicas):
            raise ConfigError(
                f"{s.name}: min_replicas {s.min_replicas} exceeds the smallest "
                f"scenario capacity {min(cfg.max_replicas)}"
            )
    if cfg.reconcile_period < 1 or cfg.sample_period < 1:
        raise ConfigError("reconcile_period and sample_period must be >= 1")
    if cfg.startup_delay < 0:
        raise ConfigError("startup_delay must be >= 0")
    if cfg.smoothing_window < 1:
        raise ConfigError("smoothing_window must be >= 1")
    if cfg.baseline_tolerance < 0:
        raise ConfigError("baseline.tolerance must be >= 0")
    if cfg.baseline_stabilization < 0:
        raise ConfigError("baseline.scale_down_stabilization must be >= 0")


def _check_keys(section: str, raw: dict, allowed: set[str]) -> None:
    if not isinstance(raw, dict):
        raise ConfigError(f"{section} must be a mapping")
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown {section} keys: {sorted(unknown)}")


def _as_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _as_number(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_bool(name: str, value) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{name} must be a boolean, got {value!r}")
    return value
