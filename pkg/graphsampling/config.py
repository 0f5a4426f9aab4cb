"""
Configuration of `graphsampling`.

Numerical options are stored in a :class:`SolverConfiguration` dictionary
(see :func:`default_solver_config`). Command line experiments are described
by an :class:`ExperimentConfig`, which is read from a flat `key = value` text
file and then updated by `key=value` overrides::

    # mse-vs-samples on a random graph
    graph = erdos_renyi(40, 0.2)
    frequencies = lowest(8)
    samples = 8..20

Blank lines and everything after `#` are ignored. Unknown keys and invalid
values raise a :class:`ConfigError` naming the key.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Iterable, cast

from graphsampling.errors import ConfigError

if TYPE_CHECKING:
    from graphsampling.types import ExperimentConfig, SolverConfiguration

COMMANDS = (
    "decompose",
    "select",
    "recover",
    "mse-curve",
    "l1-sweep",
    "lms-run",
    "design-p",
    "diffuse-run",
    "gen-graph",
)

_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*\((.*)\)\s*$")


def default_solver_config() -> SolverConfiguration:
    """
    Return a :class:`SolverConfiguration` with the default values.
    """
    return {
        "debug": False,
        "eigensolver": "jacobi",
        "jacobi_tolerance": 1e-12,
        "jacobi_max_sweeps": 100,
        "rank_threshold": 1e-10,
        "exhaustive_limit": 2_000_000,
        "relaxation_max_iterations": 5000,
        "relaxation_tolerance": 1e-8,
        "armijo_beta": 0.5,
        "armijo_c": 1e-4,
        "subgradient_step": 0.5,
        "admm_rho": 1.0,
        "admm_relaxation": 1.6,
        "admm_tolerance": 1e-7,
        "admm_max_iterations": 20_000,
        "design_max_iterations": 10_000,
        "design_step": 0.05,
    }


def default_experiment_config(command: str) -> ExperimentConfig:
    """
    Return an :class:`ExperimentConfig` of the given command with the default values.
    """
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command `{command}`")
    return {
        "command": command,
        "graph": "erdos_renyi(40, 0.2)",
        "comm_graph": "",
        "shift": "laplacian",
        "frequencies": "lowest(8)",
        "criterion": "E",
        "method": "greedy",
        "samples": [8],
        "bandwidths": [2, 4, 6, 8, 10],
        "corruption": list(range(21)),
        "magnitude": 5.0,
        "sweep": "samples",
        "reconstruction": "blue",
        "signal": "",
        "noise": 0.01,
        "noise_file": "",
        "mismatch": 0.05,
        "seed": 0,
        "trials": 200,
        "mu": 0.01,
        "probability": 0.5,
        "alpha_bar": 0.99,
        "gamma": 1e-3,
        "p_max": 1.0,
        "iterations": 2000,
        "replicas": 10,
        "workers": 4,
        "weights": "metropolis",
        "eigensolver": "jacobi",
        "output": "",
        "svg": "",
        "debug": False,
    }


def solver_config_for(config: ExperimentConfig) -> SolverConfiguration:
    """
    The solver options implied by an experiment configuration.
    """
    solver = default_solver_config()
    solver["debug"] = config["debug"]
    solver["eigensolver"] = config["eigensolver"]
    return solver


def parse_call(text: str) -> tuple[str, list[str]]:
    """
    Split a call expression such as `erdos_renyi(40, 0.2)` into its name and
    (stripped) argument strings.

    Example
    -------
    >>> parse_call("two_block(15, 15, 0.5, 0.05)")
    ('two_block', ['15', '15', '0.5', '0.05'])
    """
    match = _CALL.match(text)
    if match is None:
        raise ValueError(f"`{text}` is not of the form `name(arguments)`.")
    arguments = [a.strip() for a in match.group(2).split(",") if a.strip() != ""]
    return match.group(1), arguments


def parse_int_list(text: str) -> list[int]:
    """
    Parse `8..20`, `8,10,12` or a mix such as `1..3,7` into a list of integers.

    Example
    -------
    >>> parse_int_list("1..3,7")
    [1, 2, 3, 7]
    """
    values: list[int] = []
    for item in text.split(","):
        item = item.strip()
        if item == "":
            continue
        if ".." in item:
            first, last = item.split("..", 1)
            start, stop = int(first), int(last)
            if stop < start:
                raise ValueError(f"Empty range `{item}`.")
            values.extend(range(start, stop + 1))
        else:
            values.append(int(item))
    if len(values) == 0:
        raise ValueError("Expected at least one integer.")
    return values


def frequency_set(n: int, spec: str) -> list[int]:
    """
    Resolve a frequency set specification to sorted 0-based frequency indices.

    `lowest(k)` selects the `k` smallest eigenvalues; an explicit list uses the
    1-based indices of the file formats.

    Example
    -------
    >>> frequency_set(10, "lowest(3)")
    [0, 1, 2]
    >>> frequency_set(10, "1,2,5")
    [0, 1, 4]
    """
    if "(" in spec:
        name, arguments = parse_call(spec)
        if name != "lowest" or len(arguments) != 1:
            raise ValueError(f"Unknown frequency set `{spec}`.")
        k = int(arguments[0])
        if k < 1 or k > n:
            raise ValueError(f"Cannot select {k} frequencies out of {n}.")
        return list(range(k))

    indices = sorted(set(parse_int_list(spec)))
    for i in indices:
        if i < 1 or i > n:
            raise ValueError(f"Frequency {i} is out of range 1..{n}.")
    return [i - 1 for i in indices]


def _text(key: str, raw: str) -> str:
    return raw


def _choice(*options: str) -> Callable[[str, str], str]:
    def parse(key: str, raw: str) -> str:
        if raw not in options:
            raise ConfigError(key, f"expected one of {', '.join(options)}, got `{raw}`")
        return raw

    return parse


def _number(
    kind: type[int] | type[float],
    low: float | None = None,
    high: float | None = None,
    open_low: bool = False,
    open_high: bool = False,
) -> Callable[[str, str], int | float]:
    def parse(key: str, raw: str) -> int | float:
        try:
            value = kind(raw)
        except ValueError:
            raise ConfigError(key, f"`{raw}` is not a valid {kind.__name__}") from None
        if low is not None and (value < low or (open_low and value == low)):
            raise ConfigError(key, f"{value} is below the allowed range")
        if high is not None and (value > high or (open_high and value == high)):
            raise ConfigError(key, f"{value} is above the allowed range")
        return value

    return parse


def _int_list(minimum: int) -> Callable[[str, str], list[int]]:
    def parse(key: str, raw: str) -> list[int]:
        try:
            values = parse_int_list(raw)
        except ValueError as e:
            raise ConfigError(key, str(e)) from None
        if min(values) < minimum:
            raise ConfigError(key, f"values must be at least {minimum}")
        return values

    return parse


def _boolean(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"`{raw}` is not a boolean")


def _graph_source(key: str, raw: str) -> str:
    if raw == "" and key == "comm_graph":
        return raw
    if raw.startswith("file:"):
        return raw
    try:
        parse_call(raw)
    except ValueError as e:
        raise ConfigError(key, str(e)) from None
    return raw


def _frequencies(key: str, raw: str) -> str:
    if "(" in raw:
        try:
            name, arguments = parse_call(raw)
        except ValueError as e:
            raise ConfigError(key, str(e)) from None
        if name != "lowest" or len(arguments) != 1 or not arguments[0].isdigit():
            raise ConfigError(key, f"expected `lowest(k)` or a list, got `{raw}`")
        if int(arguments[0]) < 1:
            raise ConfigError(key, "the frequency set cannot be empty")
        return raw
    _int_list(1)(key, raw)
    return raw


_PARSERS: dict[str, Callable[[str, str], Any]] = {
    "graph": _graph_source,
    "comm_graph": _graph_source,
    "shift": _choice("adjacency", "laplacian"),
    "frequencies": _frequencies,
    "criterion": _choice("A", "E", "D"),
    "method": _choice("exhaustive", "greedy", "relaxed", "random"),
    "samples": _int_list(1),
    "bandwidths": _int_list(1),
    "corruption": _int_list(0),
    "magnitude": _number(float, 0.0, open_low=True),
    "sweep": _choice("samples", "bandwidth"),
    "reconstruction": _choice("consistent", "blue", "l1"),
    "signal": _text,
    "noise": _number(float, 0.0),
    "noise_file": _text,
    "mismatch": _number(float, 0.0),
    "seed": _number(int, 0),
    "trials": _number(int, 1),
    "mu": _number(float, 0.0, open_low=True),
    "probability": _number(float, 0.0, 1.0),
    "alpha_bar": _number(float, 0.0, 1.0, open_low=True, open_high=True),
    "gamma": _number(float, 0.0, open_low=True),
    "p_max": _number(float, 0.0, 1.0, open_low=True),
    "iterations": _number(int, 1),
    "replicas": _number(int, 1),
    "workers": _number(int, 1),
    "weights": _choice("metropolis", "laplacian", "uniform", "identity"),
    "eigensolver": _choice("jacobi", "lapack"),
    "output": _text,
    "svg": _text,
    "debug": _boolean,
}


def parse_config_text(text: str) -> dict[str, str]:
    """
    Read the raw `key = value` pairs of a configuration file.
    """
    entries: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line == "":
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {number}", f"expected `key = value`, got `{line}`"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise ConfigError(key, f"duplicate entry on line {number}")
        entries[key] = value
    return entries


def apply_entries(config: ExperimentConfig, entries: dict[str, str]) -> None:
    """
    Parse and store raw entries into `config`.
    """
    target = cast(dict[str, Any], config)
    for key, raw in entries.items():
        if key not in _PARSERS:
            raise ConfigError(key, "unknown option")
        target[key] = _PARSERS[key](key, raw)


def _check_files(config: ExperimentConfig) -> None:
    for key in ("graph", "comm_graph"):
        source = cast(str, config[key])  # type: ignore[literal-required]
        if source.startswith("file:") and not Path(source[5:]).is_file():
            raise ConfigError(key, f"file `{source[5:]}` does not exist")
    for key in ("signal", "noise_file"):
        path = cast(str, config[key])  # type: ignore[literal-required]
        if path != "" and not Path(path).is_file():
            raise ConfigError(key, f"file `{path}` does not exist")


def load_config(
    command: str, path: str | None = None, overrides: Iterable[str] = ()
) -> ExperimentConfig:
    """
    Build the configuration of an experiment.

    Defaults are updated first by the optional configuration file and then
    by the `key=value` overrides, so overrides always win.

    Parameters
    ----------
    command : str
        The experiment to run.
    path : str | None
        An optional configuration file.
    overrides : Iterable[str]
        Additional `key=value` entries.

    Returns
    -------
    ExperimentConfig
        The validated configuration.

    Raises
    ------
    ConfigError
        If any entry is invalid or a referenced file does not exist.
    """
    config = default_experiment_config(command)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError("config", f"cannot read `{path}`: {e}") from None
        apply_entries(config, parse_config_text(text))

    extra: dict[str, str] = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "overrides must have the form `key=value`")
        key, value = (part.strip() for part in item.split("=", 1))
        extra[key] = value
    apply_entries(config, extra)

    _check_files(config)
    return config


def describe_config(config: ExperimentConfig) -> str:
    """
    A one-line `key=value` description of a configuration, used for provenance.
    """
    parts: list[str] = []
    for key in sorted(config.keys()):
        if key in ("command", "output", "svg", "debug", "workers"):
            continue
        value = config[key]  # type: ignore[literal-required]
        if isinstance(value, list):
            value = ",".join(str(v) for v in cast(list[int], value))
        text = str(value).replace(" ", "")
        parts.append(f"{key}={text}")
    return " ".join(parts)
