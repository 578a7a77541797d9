"""Mission configuration: flat key-value files with sections.

The on-disk format is INI. Every value that affects simulation output lives
here; the resolved configuration embeds into the run manifest so that a run
can be reproduced bit-exactly from its manifest alone.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass

from .channel import Environment, LinkBudget
from .errors import AccuracyProfile
from .estimators import ALGORITHMS, SelectionConstraints
from .geometry import GroundPoint
from .mission import (
    Deployment,
    MissionConfig,
    centered_triangular_deployment,
    deploy_triangular,
    field_profile,
)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class RunSpec:
    """Everything a simulation run needs: mission, deployment, algorithms."""

    mission: MissionConfig
    deployment: Deployment
    algorithms: tuple[str, ...]


REFERENCE_CONFIG = """\
[mission]
area_width = 100
area_height = 100
altitude = 10
inter_waypoint = 1
scan_spacing = 10
home_x = 50
home_y = 0
trials = 100
seed = 42

[channel]
environment = sub-urban
los_range = 60
nlos_range = 35

[noise]
preset = field-fit
distribution = uniform

[selection]
target_d = 30
tolerance = 1
min_beta_deg = 30
d_min = 20
region_grid = 0.01

[deployment]
layout = triangular
side = 10
count = 10
placement = centered

[algorithms]
names = omni, scan, drbc, drf, ioc, ioa
"""


def _parser() -> configparser.ConfigParser:
    return configparser.ConfigParser(inline_comment_prefixes=("#", ";"))


def _get(cp: configparser.ConfigParser, section: str, key: str, default: str | None = None) -> str:
    try:
        return cp.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is not None:
            return default
        raise ConfigError(f"missing required key [{section}] {key}") from None


def _get_float(cp, section, key, default: str | None = None) -> float:
    raw = _get(cp, section, key, default)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key} must be finite, got {raw!r}")
    return value


def _get_int(cp, section, key, default: str | None = None) -> int:
    raw = _get(cp, section, key, default)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be an integer, got {raw!r}") from None


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunSpec:
    """Parse configuration text, then apply ``section.key -> value`` overrides."""
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if not section or not key:
            raise ConfigError(f"override key must look like section.key, got {dotted!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    return _build_spec(cp)


def load_config(path: str, overrides: dict[str, str] | None = None) -> RunSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, overrides)


def _build_spec(cp: configparser.ConfigParser) -> RunSpec:
    altitude = _get_float(cp, "mission", "altitude")

    env_name = _get(cp, "channel", "environment", "sub-urban")
    try:
        environment = Environment(env_name)
    except ValueError:
        names = ", ".join(e.value for e in Environment)
        raise ConfigError(f"unknown environment {env_name!r}; expected one of: {names}") from None
    budget = LinkBudget(
        los_range=_get_float(cp, "channel", "los_range", "60"),
        nlos_range=_get_float(cp, "channel", "nlos_range", "35"),
    )

    preset = _get(cp, "noise", "preset", "none")
    if preset == "field-fit":
        try:
            profile = field_profile(altitude)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif preset == "none":
        profile = AccuracyProfile(
            eps_s=_get_float(cp, "noise", "eps_s"),
            gamma_d=_get_float(cp, "noise", "gamma_d"),
            gamma_h=_get_float(cp, "noise", "gamma_h"),
        )
    else:
        raise ConfigError(f"unknown noise preset {preset!r}; expected field-fit or none")
    distribution = _get(cp, "noise", "distribution", "uniform")

    constraints = SelectionConstraints(
        target_d=_get_float(cp, "selection", "target_d"),
        tolerance=_get_float(cp, "selection", "tolerance", "1"),
        min_beta=math.radians(_get_float(cp, "selection", "min_beta_deg", "0")),
        d_min=_get_float(cp, "selection", "d_min", "0"),
        region_grid=_get_float(cp, "selection", "region_grid", "0.01"),
    )

    mission = MissionConfig(
        area=(_get_float(cp, "mission", "area_width"), _get_float(cp, "mission", "area_height")),
        altitude=altitude,
        inter_waypoint=_get_float(cp, "mission", "inter_waypoint"),
        scan_spacing=_get_float(cp, "mission", "scan_spacing"),
        home=GroundPoint(_get_float(cp, "mission", "home_x"), _get_float(cp, "mission", "home_y")),
        environment=environment,
        budget=budget,
        profile=profile,
        constraints=constraints,
        trials=_get_int(cp, "mission", "trials", "1"),
        seed=_get_int(cp, "mission", "seed", "0"),
        noise_model=distribution,
    )

    layout = _get(cp, "deployment", "layout", "triangular")
    if layout != "triangular":
        raise ConfigError(f"unknown deployment layout {layout!r}; expected triangular")
    side = _get_float(cp, "deployment", "side")
    count = _get_int(cp, "deployment", "count")
    placement = _get(cp, "deployment", "placement", "centered")
    if placement == "centered":
        deployment = centered_triangular_deployment(side, count, mission.area)
    elif placement == "origin":
        origin = GroundPoint(
            _get_float(cp, "deployment", "origin_x", "0"),
            _get_float(cp, "deployment", "origin_y", "0"),
        )
        deployment = deploy_triangular(side, count, origin)
    else:
        raise ConfigError(f"unknown placement {placement!r}; expected centered or origin")

    names = tuple(
        n.strip() for n in _get(cp, "algorithms", "names", "omni, scan, drbc, drf, ioc, ioa").split(",") if n.strip()
    )
    unknown = [n for n in names if n not in ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithms {unknown}; available: {sorted(ALGORITHMS)}")
    if not names:
        raise ConfigError("at least one algorithm is required")
    return RunSpec(mission, deployment, names)


def spec_to_flat(spec: RunSpec) -> dict[str, str]:
    """Resolved configuration as flat ``section.key -> value`` strings.

    Parsing the result back (see :func:`flat_to_text`) reproduces the run
    bit-exactly; floats are serialized with full precision.
    """
    m = spec.mission
    c = m.constraints
    flat: dict[str, str] = {
        "mission.area_width": repr(m.area[0]),
        "mission.area_height": repr(m.area[1]),
        "mission.altitude": repr(m.altitude),
        "mission.inter_waypoint": repr(m.inter_waypoint),
        "mission.scan_spacing": repr(m.scan_spacing),
        "mission.home_x": repr(m.home.x),
        "mission.home_y": repr(m.home.y),
        "mission.trials": str(m.trials),
        "mission.seed": str(m.seed),
        "channel.environment": m.environment.value,
        "channel.los_range": repr(m.budget.los_range),
        "channel.nlos_range": repr(m.budget.nlos_range),
        "noise.preset": "none",
        "noise.eps_s": repr(m.profile.eps_s),
        "noise.gamma_d": repr(m.profile.gamma_d),
        "noise.gamma_h": repr(m.profile.gamma_h),
        "noise.distribution": m.noise_model,
        "selection.target_d": repr(c.target_d),
        "selection.tolerance": repr(c.tolerance),
        "selection.min_beta_deg": repr(math.degrees(c.min_beta)),
        "selection.d_min": repr(c.d_min),
        "selection.region_grid": repr(c.region_grid),
        "algorithms.names": ", ".join(spec.algorithms),
    }
    # The deployment serializes as explicit positions so that any layout or
    # placement survives the round trip unchanged.
    flat["deployment.layout"] = "explicit"
    flat["deployment.positions"] = "; ".join(
        f"{d.id}:{d.position.x!r}:{d.position.y!r}" for d in spec.deployment.devices
    )
    return flat


def flat_to_text(flat: dict[str, str]) -> str:
    """Render a flat mapping back into config-file text."""
    cp = _parser()
    for dotted, value in flat.items():
        section, _, key = dotted.partition(".")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


def _parse_explicit_deployment(raw: str) -> Deployment:
    from .mission import GroundDevice

    devices = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            gd_id, x, y = chunk.split(":")
            devices.append(GroundDevice(int(gd_id), GroundPoint(float(x), float(y))))
        except ValueError:
            raise ConfigError(f"bad explicit deployment entry {chunk!r}") from None
    if not devices:
        raise ConfigError("explicit deployment has no devices")
    return Deployment(tuple(devices))


def parse_flat(flat: dict[str, str]) -> RunSpec:
    """Rebuild a run spec from a manifest's embedded configuration."""
    cp = _parser()
    explicit = None
    for dotted, value in flat.items():
        if dotted == "deployment.positions":
            explicit = value
            continue
        if dotted == "deployment.layout" and value == "explicit":
            continue
        section, _, key = dotted.partition(".")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    if explicit is None:
        return _build_spec(cp)
    # Satisfy the layout keys, then swap in the explicit positions.
    if not cp.has_section("deployment"):
        cp.add_section("deployment")
    cp.set("deployment", "layout", "triangular")
    cp.set("deployment", "side", "1")
    cp.set("deployment", "count", "1")
    spec = _build_spec(cp)
    return RunSpec(spec.mission, _parse_explicit_deployment(explicit), spec.algorithms)
