"""
Command line interface: `graphsampling <command> [options]`.

Exit codes are 0 on success, 2 on invalid input (configuration, files,
infeasible requirements) and 3 when a numerical method does not converge or
its result fails a consistency check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

from graphsampling.config import COMMANDS, describe_config, load_config
from graphsampling.experiments import run_experiment
from graphsampling.io_utils import format_table
from graphsampling.plotting import write_svg

if TYPE_CHECKING:
    from graphsampling.types import ExperimentConfig, ResultTable

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

LOG_SCALE_COMMANDS = ("mse-curve", "l1-sweep", "lms-run", "diffuse-run")

_HELP = {
    "decompose": "eigenvalues of the shift operator",
    "select": "choose a sampling set",
    "recover": "reconstruct a signal from its samples",
    "mse-curve": "reconstruction error versus samples or bandwidth",
    "l1-sweep": "l1 reconstruction error versus number of corrupted samples",
    "lms-run": "learning curve of adaptive LMS reconstruction",
    "design-p": "optimal sampling probabilities",
    "diffuse-run": "learning curves of diffusion LMS",
    "gen-graph": "write a synthetic graph as an edge list",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphsampling",
        description="Sampling and reconstruction of signals on graphs.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command in COMMANDS:
        sub = commands.add_parser(command, help=_HELP[command])
        sub.add_argument("--config", help="a `key = value` configuration file")
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a configuration entry (repeatable)",
        )
        sub.add_argument("--seed", type=int, help="the master random seed")
        sub.add_argument("-o", "--out", help="output file (standard output by default)")
        sub.add_argument("--svg", help="also plot the results into an SVG file")
        sub.add_argument("--debug", action="store_true", help="print progress to stderr")
    return parser


def provenance(config: ExperimentConfig) -> str:
    return f"graphsampling {config['command']} {describe_config(config)}"


def render(config: ExperimentConfig, tables: dict[str, ResultTable]) -> dict[str, str]:
    """
    The text of every result table, keyed by table name.
    """
    header = provenance(config)
    commented = config["command"] == "gen-graph"
    return {
        name: format_table(table, header, commented_header=commented)
        for name, table in tables.items()
    }


def output_paths(out: str, names: Sequence[str]) -> list[Path]:
    """
    A single table goes to `out`; several tables go to `<stem>_<name><suffix>`.
    """
    path = Path(out)
    if len(names) == 1:
        return [path]
    suffix = path.suffix or ".csv"
    return [path.with_name(f"{path.stem}_{name}{suffix}") for name in names]


def _emit(config: ExperimentConfig, tables: dict[str, ResultTable]) -> None:
    texts = render(config, tables)
    if config["output"] == "":
        sys.stdout.write("\n".join(texts.values()))
    else:
        for path, text in zip(output_paths(config["output"], list(texts)), texts.values()):
            path.write_text(text)
    if config["svg"] != "":
        write_svg(
            tables.values(),
            config["svg"],
            log_y=config["command"] in LOG_SCALE_COMMANDS,
            title=config["command"],
        )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_INVALID

    overrides: list[str] = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out is not None:
        overrides.append(f"output={args.out}")
    if args.svg is not None:
        overrides.append(f"svg={args.svg}")
    if args.debug:
        overrides.append("debug=true")

    try:
        config = load_config(args.command, args.config, overrides)
        if config["debug"]:
            print(f"[cli] {provenance(config)}", file=sys.stderr)
        tables = run_experiment(config)
        _emit(config, tables)
    except RuntimeError as e:
        print(f"graphsampling: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ValueError, OSError) as e:
        print(f"graphsampling: {e}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK
