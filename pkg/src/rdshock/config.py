"""Run configuration: INI-style text with [model], [params] and [command].

Example::

    [model]
    kind = quadratic
    a = 0.2
    b = 0.4

    [params]
    kappa = -1
    c1 = phi0
    c2 = 0

    [command]
    family = travelling
    times = 0, 10, 20

``c1`` and ``c2`` accept a number or the tokens ``phi0`` / ``-phi0``, which
resolve to +/- Phi(0) of the configured model. Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from rdshock.errors import ConfigError
from rdshock.model import DiffusivityModel, SolutionParams, eval_flux_potential, make_params

MODEL_KEYS = {"kind", "a", "b", "c", "d", "cofactor"}
PARAMS_KEYS = {"kappa", "c1", "c2", "time_gauge"}
COMMON_KEYS = {"out", "format"}
COMMAND_KEYS = {
    "solve": {"family", "times", "x_min", "x_max", "n_x", "rule"},
    "boundary": {"family", "times", "t_min", "t_max", "n_t"},
    "shock-compare": {"family", "t", "n_scan"},
    "stability": {"n_alpha", "alpha_max", "n_samples", "scan", "scan_n_a", "scan_n_b", "a_min", "a_max", "b_min", "b_max"},
    "phase-plane": {"n_u", "n_q", "u_min", "u_max", "q_min", "q_max", "n_traj"},
}

# default (c1, c2) in units of Phi(0) for each family
FAMILY_DEFAULTS = {"travelling": (1.0, 0.0), "receding": (1.0, -1.0), "colliding": (1.0, 1.0)}


@dataclass
class RunConfig:
    model: DiffusivityModel
    params: SolutionParams
    command: dict = field(default_factory=dict)
    source: str = ""

    def get(self, key, default=None, cast=str):
        if key not in self.command:
            return default
        raw = self.command[key]
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"[command] {key} = {raw!r} is not a valid {cast.__name__}") from exc

    def get_float(self, key, default=None):
        return self.get(key, default, float)

    def get_int(self, key, default=None):
        return self.get(key, default, int)

    def get_bool(self, key, default=False):
        if key not in self.command:
            return default
        raw = self.command[key].strip().lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[command] {key} = {raw!r} is not a boolean")

    def get_floats(self, key, default=None):
        if key not in self.command:
            return default
        try:
            return [float(x) for x in self.command[key].replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[command] {key} must be a list of numbers") from exc


def _number(section, key, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _require(section_name, section, key):
    if key not in section:
        raise ConfigError(f"missing required key [{section_name}] {key}")
    return section[key]


def _check_keys(section_name, section, allowed):
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section_name}]: {', '.join(unknown)}")


def build_model(section) -> DiffusivityModel:
    _check_keys("model", section, MODEL_KEYS)
    kind = _require("model", section, "kind").strip()
    a = _number("model", "a", _require("model", section, "a"))
    b = _number("model", "b", _require("model", section, "b"))
    try:
        if kind == "quadratic":
            return DiffusivityModel.quadratic(a, b)
        if kind == "quartic":
            c = _number("model", "c", _require("model", section, "c"))
            d = _number("model", "d", _require("model", section, "d"))
            return DiffusivityModel.quartic(a, b, c, d)
        if kind == "generic":
            raw = _require("model", section, "cofactor")
            coeffs = [_number("model", "cofactor", x) for x in raw.replace(",", " ").split()]
            return DiffusivityModel.generic(a, b, coeffs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid model: {exc}") from exc
    raise ConfigError(f"[model] kind = {kind!r}; expected quadratic, quartic or generic")


def _resolve_constant(model, key, raw):
    token = raw.strip().lower()
    phi0 = eval_flux_potential(model, 0.0)
    if token == "phi0":
        return phi0
    if token == "-phi0":
        return -phi0
    return _number("params", key, raw)


def build_params(model, section, family=None) -> SolutionParams:
    _check_keys("params", section, PARAMS_KEYS)
    kappa = _number("params", "kappa", section.get("kappa", "-1"))
    phi0 = eval_flux_potential(model, 0.0)
    scale1, scale2 = FAMILY_DEFAULTS.get(family or "travelling", FAMILY_DEFAULTS["travelling"])
    c1 = _resolve_constant(model, "c1", section["c1"]) if "c1" in section else scale1 * phi0
    c2 = _resolve_constant(model, "c2", section["c2"]) if "c2" in section else scale2 * phi0
    gauge = _number("params", "time_gauge", section.get("time_gauge", "0"))
    try:
        return make_params(model, kappa=kappa, c1=c1, c2=c2, time_gauge=gauge)
    except ValueError as exc:
        raise ConfigError(f"invalid params: {exc}") from exc


def parse_config(text, subcommand, source="<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {source}: {exc}") from exc
    extra = sorted(set(parser.sections()) - {"model", "params", "command"})
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(extra)}")
    if not parser.has_section("model"):
        raise ConfigError("missing required section [model]")
    if subcommand not in COMMAND_KEYS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    command = dict(parser["command"]) if parser.has_section("command") else {}
    # one preset may serve several subcommands, so any known key is accepted
    _check_keys("command", command, set().union(*COMMAND_KEYS.values()) | COMMON_KEYS)
    model = build_model(dict(parser["model"]))
    params_section = dict(parser["params"]) if parser.has_section("params") else {}
    params = build_params(model, params_section, command.get("family"))
    return RunConfig(model=model, params=params, command=command, source=source)


def load_config(path, subcommand) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, subcommand, source=str(p))
