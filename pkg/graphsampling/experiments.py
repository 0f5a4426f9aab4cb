"""
The experiments behind the command line interface.

:func:`run_experiment` turns an :class:`ExperimentConfig` into named result
tables. Every random quantity of a sweep point is drawn from a seed derived
from the master seed and the indices of the point, so the tables only depend
on the configuration.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Callable, Sequence, TypeVar

import numpy as np

from graphsampling.adaptive import (
    ProbabilisticSampler,
    design_probabilities,
    lms_mse_theory,
    lms_run,
    probability_design_report,
    steady_state_mse,
)
from graphsampling.config import frequency_set, solver_config_for
from graphsampling.design import (
    DesignCriterion,
    exhaustive_select,
    greedy_select,
    objective,
    random_select,
    relaxed_select,
)
from graphsampling.diffusion import (
    CommGraph,
    combination_weights,
    diffusion_run,
    matched_step_size,
)
from graphsampling.errors import ConfigError, RecoveryConditionError
from graphsampling.graph_utils import generate_graph, shift_operator, weighted_edges
from graphsampling.io_utils import read_edge_list, read_noise, read_signal
from graphsampling.noise import NoiseModel
from graphsampling.recovery import (
    blue_reconstruct,
    consistent_reconstruct,
    corrupt_signal,
    l1_reconstruct,
    l1_recovery_bound,
    nmse,
    observe_batch,
    recovery_condition,
    theoretical_mse,
)
from graphsampling.seeding import derived_seed
from graphsampling.spectral import (
    SpectralBasis,
    perturb_bandlimited,
    spectral_decompose,
    synthesize_bandlimited,
)

if TYPE_CHECKING:
    import networkx as nx  # type: ignore

    from graphsampling.types import (
        AdaptiveDesignSpec,
        CriterionKind,
        ExperimentConfig,
        ResultTable,
        SolverConfiguration,
        Vector,
        VertexSet,
    )

CRITERIA: tuple[CriterionKind, ...] = ("A", "E", "D")
COMM_GRAPH_STREAM = 1_000

Point = TypeVar("Point")
Value = TypeVar("Value")


def sub_seed(seed: int, *path: int) -> int:
    """
    An integer seed derived from `seed` and the indices in `path`.
    """
    return int(derived_seed(seed, *path).generate_state(1)[0])


def sweep_map(
    config: ExperimentConfig, evaluate: Callable[[Point], Value], points: Sequence[Point]
) -> list[Value]:
    """
    Evaluate the points of a sweep on `config["workers"]` threads.

    The results are returned in the order of `points`. Every point must draw
    its randomness from its own derived seed.
    """
    if config["workers"] == 1 or len(points) < 2:
        return [evaluate(point) for point in points]
    with ThreadPoolExecutor(max_workers=config["workers"]) as executor:
        return list(executor.map(evaluate, points))


def _table(
    name: str,
    header: list[str],
    rows: list[list[int | float | str]],
    comments: list[str] | None = None,
) -> ResultTable:
    return {"name": name, "header": header, "rows": rows, "comments": comments or []}


def load_graph(source: str, seed: int, key: str = "graph") -> nx.Graph:
    """
    Read a `file:<path>` edge list or run a graph generator.
    """
    if source.startswith("file:"):
        try:
            return read_edge_list(source[5:])
        except ValueError as e:
            raise ConfigError(key, str(e)) from None
    return generate_graph(source, seed)


def build_basis(
    config: ExperimentConfig,
    graph: nx.Graph,
    frequencies: str | None = None,
    solver: SolverConfiguration | None = None,
) -> SpectralBasis:
    """
    The eigenbasis of the configured shift operator of `graph`, restricted to
    a frequency set (the configured one by default).
    """
    if solver is None:
        solver = solver_config_for(config)
    n = graph.number_of_nodes()
    spec = config["frequencies"] if frequencies is None else frequencies
    try:
        indices = frequency_set(n, spec)
    except ValueError as e:
        raise ConfigError("frequencies", str(e)) from None
    operator = shift_operator(graph, config["shift"])
    return spectral_decompose(operator, frequencies=indices, config=solver)


def noise_model(config: ExperimentConfig, n: int) -> NoiseModel:
    if config["noise_file"] != "":
        try:
            return read_noise(config["noise_file"], n)
        except ValueError as e:
            raise ConfigError("noise_file", str(e)) from None
    return NoiseModel.homoscedastic(n, config["noise"])


def design_noise(config: ExperimentConfig, n: int) -> NoiseModel:
    """
    The noise model of the design criteria; unit variances when the
    configured noise vanishes somewhere.
    """
    noise = noise_model(config, n)
    return noise if noise.is_positive() else NoiseModel.homoscedastic(n, 1.0)


def select_vertices(
    config: ExperimentConfig,
    basis: SpectralBasis,
    criterion: DesignCriterion,
    samples: int,
    seed: int,
    solver: SolverConfiguration,
) -> tuple[VertexSet, Vector | None]:
    """
    The configured sampling strategy; the relaxed method also returns its
    continuous weights.
    """
    if samples > basis.n:
        raise ConfigError("samples", f"cannot select {samples} of {basis.n} vertices")
    method = config["method"]
    if method == "exhaustive":
        try:
            return exhaustive_select(criterion, basis, samples, solver), None
        except ValueError as e:
            raise ConfigError("method", str(e)) from None
    if method == "greedy":
        return greedy_select(criterion, basis, samples, solver), None
    if method == "relaxed":
        design, rounded = relaxed_select(criterion, basis, samples, solver)
        return rounded, design["weights"]
    return random_select(basis.n, samples, derived_seed(seed, 0)), None


def _signal(config: ExperimentConfig, basis: SpectralBasis, *path: int) -> Vector:
    if config["signal"] != "":
        try:
            return read_signal(config["signal"], basis.n)
        except ValueError as e:
            raise ConfigError("signal", str(e)) from None
    return synthesize_bandlimited(basis, seed=derived_seed(config["seed"], *path))


def _decompose(config: ExperimentConfig) -> dict[str, ResultTable]:
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, frequencies=f"lowest({graph.number_of_nodes()})")
    rows: list[list[int | float | str]] = [
        [i + 1, float(v)] for i, v in enumerate(basis.eigenvalues)
    ]
    comments = [
        f"vertices: {graph.number_of_nodes()} edges: {graph.number_of_edges()} "
        f"shift: {config['shift']}"
    ]
    return {"eigenvalues": _table("eigenvalues", ["index", "eigenvalue"], rows, comments)}


def _select(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    criterion = DesignCriterion(config["criterion"], design_noise(config, basis.n))
    samples = config["samples"][0]
    vertices, weights = select_vertices(
        config, basis, criterion, samples, config["seed"], solver
    )

    if weights is not None:
        order = sorted(vertices, key=lambda v: (-float(weights[v]), v))
    else:
        order = list(vertices)
    condition = recovery_condition(basis, vertices)
    comments = [
        f"method: {config['method']} criterion: {config['criterion']} "
        f"objective: {objective(criterion, basis, vertices)!r}",
        f"recovery condition: ok={condition['ok']} norm={condition['norm']!r}",
    ]
    tables = {
        "selection": _table(
            "selection",
            ["rank", "vertex"],
            [[rank + 1, v + 1] for rank, v in enumerate(order)],
            comments,
        )
    }
    if weights is not None:
        tables["weights"] = _table(
            "weights", ["vertex", "weight"], [[v + 1, float(w)] for v, w in enumerate(weights)]
        )
    return tables


def _recover(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    x = _signal(config, basis, 0)
    noise = noise_model(config, basis.n)
    comments: list[str] = [f"reconstruction: {config['reconstruction']}"]

    if config["reconstruction"] == "l1":
        count = config["corruption"][0]
        y, corrupted = corrupt_signal(
            x, count, config["magnitude"], seed=derived_seed(config["seed"], 1)
        )
        report = l1_reconstruct(basis, y, solver)
        comments.append(f"corrupted: {' '.join(str(v + 1) for v in corrupted)}")
        comments.append(f"recovery bound: {l1_recovery_bound(basis)!r}")
    else:
        criterion = DesignCriterion(config["criterion"], design_noise(config, basis.n))
        vertices, _ = select_vertices(
            config, basis, criterion, config["samples"][0], config["seed"], solver
        )
        batch = observe_batch(x, vertices, noise, seed=derived_seed(config["seed"], 1))
        if config["reconstruction"] == "blue":
            report = blue_reconstruct(basis, batch)
            comments.append(f"theoretical mse: {report['theoretical_mse']!r}")
        else:
            report = consistent_reconstruct(basis, batch)
        comments.append(f"samples: {' '.join(str(v + 1) for v in vertices)}")

    comments.append(f"converged: {report['converged']}")
    comments.append(f"nmse: {nmse(report['signal'], x)!r}")
    rows: list[list[int | float | str]] = [
        [i + 1, float(v)] for i, v in enumerate(report["signal"])
    ]
    return {"signal": _table("signal", ["vertex", "value"], rows, comments)}


def _safe_mse(basis: SpectralBasis, vertices: VertexSet, noise: NoiseModel) -> float:
    try:
        return theoretical_mse(basis, vertices, noise)
    except (RecoveryConditionError, ValueError):
        return float("inf")


def _mse_versus_samples(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    unit = NoiseModel.homoscedastic(basis.n, 1.0)
    sizes = [m for m in config["samples"] if m <= basis.n]

    def designed(point: tuple[CriterionKind, int]) -> float:
        kind, m = point
        vertices = greedy_select(DesignCriterion(kind, unit), basis, m, solver)
        return _safe_mse(basis, vertices, unit)

    def random_median(point: tuple[int, int]) -> float:
        index, m = point
        draws = [
            _safe_mse(
                basis,
                random_select(basis.n, m, derived_seed(config["seed"], index, trial)),
                unit,
            )
            for trial in range(config["trials"])
        ]
        return float(np.median(draws))

    designed_mses = iter(sweep_map(config, designed, [(k, m) for k in CRITERIA for m in sizes]))
    tables: dict[str, ResultTable] = {}
    for kind in CRITERIA:
        rows: list[list[int | float | str]] = [[m, next(designed_mses)] for m in sizes]
        tables[f"mse_{kind}"] = _table(
            f"mse_{kind}", ["samples", "mse"], rows, [f"greedy {kind}-design"]
        )

    medians = sweep_map(config, random_median, list(enumerate(sizes)))
    rows = [[m, e] for m, e in zip(sizes, medians)]
    tables["mse_random"] = _table(
        "mse_random", ["samples", "mse"], rows, [f"median over {config['trials']} random sets"]
    )
    return tables


def _nmse_versus_bandwidth(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    n = graph.number_of_nodes()
    bandwidths = [k for k in config["bandwidths"] if k <= n]
    if len(bandwidths) == 0:
        raise ConfigError("bandwidths", f"every bandwidth exceeds {n} vertices")
    widest = build_basis(config, graph, frequencies=f"lowest({max(bandwidths)})", solver=solver)
    noise = design_noise(config, n)
    signals = [
        perturb_bandlimited(
            widest,
            synthesize_bandlimited(widest, seed=derived_seed(config["seed"], 0, trial)),
            config["mismatch"],
            seed=derived_seed(config["seed"], 1, trial),
        )
        for trial in range(config["trials"])
    ]

    def median_nmse(point: tuple[CriterionKind, int]) -> float:
        kind, k = point
        basis = widest.with_frequencies(range(k))
        _, vertices = relaxed_select(DesignCriterion(kind, noise), basis, k, solver)
        errors: list[float] = []
        for x in signals:
            try:
                estimate = consistent_reconstruct(basis, observe_batch(x, vertices))
                errors.append(nmse(estimate["signal"], x))
            except RecoveryConditionError:
                errors.append(float("inf"))
        return float(np.median(errors))

    points = [(kind, k) for kind in CRITERIA for k in bandwidths]
    medians = iter(sweep_map(config, median_nmse, points))
    tables: dict[str, ResultTable] = {}
    for kind in CRITERIA:
        rows: list[list[int | float | str]] = [[k, next(medians)] for k in bandwidths]
        tables[f"nmse_{kind}"] = _table(
            f"nmse_{kind}", ["bandwidth", "nmse"], rows, [f"relaxed {kind}-design, |S| = |F|"]
        )
    return tables


def _mse_curve(config: ExperimentConfig) -> dict[str, ResultTable]:
    if config["sweep"] == "bandwidth":
        return _nmse_versus_bandwidth(config)
    return _mse_versus_samples(config)


def _l1_sweep(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    n = graph.number_of_nodes()
    for k in config["bandwidths"]:
        if k > n:
            raise ConfigError("bandwidths", f"bandwidth {k} exceeds {n} vertices")
    for count in config["corruption"]:
        if count > n:
            raise ConfigError("corruption", f"cannot corrupt {count} of {n} vertices")
    full = build_basis(config, graph, frequencies=f"lowest({n})", solver=solver)

    def median_nmse(point: tuple[int, int]) -> float:
        b, c = point
        basis = full.with_frequencies(range(config["bandwidths"][b]))
        count = config["corruption"][c]
        errors: list[float] = []
        for trial in range(config["trials"]):
            x = synthesize_bandlimited(basis, seed=derived_seed(config["seed"], b, c, trial, 0))
            y, _ = corrupt_signal(
                x,
                count,
                config["magnitude"],
                seed=derived_seed(config["seed"], b, c, trial, 1),
            )
            errors.append(nmse(l1_reconstruct(basis, y, solver)["signal"], x))
        if config["debug"]:
            print(
                f"[l1-sweep] Bandwidth {config['bandwidths'][b]}, {count} corrupted: "
                f"median NMSE {np.median(errors):.3e}.",
                file=sys.stderr,
            )
        return float(np.median(errors))

    counts = range(len(config["corruption"]))
    points = [(b, c) for b in range(len(config["bandwidths"])) for c in counts]
    medians = iter(sweep_map(config, median_nmse, points))
    tables: dict[str, ResultTable] = {}
    for k in config["bandwidths"]:
        basis = full.with_frequencies(range(k))
        rows: list[list[int | float | str]] = [
            [count, next(medians)] for count in config["corruption"]
        ]
        tables[f"l1_F{k}"] = _table(
            f"l1_F{k}",
            ["noisy_count", "nmse"],
            rows,
            [f"bandwidth: {k} recovery bound: {l1_recovery_bound(basis)!r}"],
        )
    return tables


def _lms(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    x = _signal(config, basis, 0)
    noise = noise_model(config, basis.n)
    sampler = ProbabilisticSampler.uniform(
        basis.n, config["probability"], seed=sub_seed(config["seed"], 1)
    )
    curve = lms_run(
        basis,
        x,
        sampler,
        noise,
        config["mu"],
        config["iterations"],
        replicas=config["replicas"],
        config=solver,
    )
    comments = [f"simulated steady-state mse: {steady_state_mse(curve['squared_errors'])!r}"]
    try:
        theory = lms_mse_theory(basis, sampler.p, noise, config["mu"])
        comments.append(f"theoretical mse: {theory['mse']!r} alpha: {theory['alpha']!r}")
    except (ValueError, RecoveryConditionError) as e:
        comments.append(f"no theoretical prediction: {e}")
    rows: list[list[int | float | str]] = [
        [t, float(v)] for t, v in enumerate(curve["squared_errors"])
    ]
    return {"learning_curve": _table("learning_curve", ["iter", "mse"], rows, comments)}


def _design(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    spec: AdaptiveDesignSpec = {
        "alpha_bar": config["alpha_bar"],
        "gamma": config["gamma"],
        "mu": config["mu"],
        "noise": noise_model(config, basis.n),
        "p_max": np.full(basis.n, config["p_max"]),
    }
    sampler = design_probabilities(spec, basis, seed=sub_seed(config["seed"], 1), config=solver)
    report = probability_design_report(spec, basis, sampler.p)
    comments = [
        f"total rate: {report['total_rate']!r}",
        f"rate slack: {report['rate_slack']!r} mse slack: {report['mse_slack']!r}",
        f"mse bound: {report['mse_bound']!r} mse: {report['mse']!r}",
    ]
    rows: list[list[int | float | str]] = [
        [i + 1, float(p)] for i, p in enumerate(sampler.p)
    ]
    return {"probabilities": _table("probabilities", ["vertex", "probability"], rows, comments)}


def _diffuse(config: ExperimentConfig) -> dict[str, ResultTable]:
    solver = solver_config_for(config)
    graph = load_graph(config["graph"], config["seed"])
    basis = build_basis(config, graph, solver=solver)
    if config["comm_graph"] == "":
        comm_source = graph
    else:
        comm_source = load_graph(
            config["comm_graph"], sub_seed(config["seed"], COMM_GRAPH_STREAM), "comm_graph"
        )
    try:
        comm = CommGraph(comm_source)
    except ValueError as e:
        raise ConfigError("comm_graph", str(e)) from None
    if comm.n != basis.n:
        raise ConfigError("comm_graph", f"has {comm.n} vertices, the graph has {basis.n}")

    x = _signal(config, basis, 0)
    sampler = ProbabilisticSampler.uniform(
        basis.n, config["probability"], seed=sub_seed(config["seed"], 1)
    )
    node_mu = matched_step_size(config["mu"], basis.n)
    curves = diffusion_run(
        basis,
        comm,
        x,
        sampler,
        noise_model(config, basis.n),
        config["iterations"],
        node_mu,
        weights=combination_weights(comm, config["weights"]),
        replicas=config["replicas"],
        config=solver,
    )
    rows: list[list[int | float | str]] = []
    for t, errors in enumerate(curves["node_nmse"]):
        rows += [[t, i + 1, float(e)] for i, e in enumerate(errors)]
    rows.append(["steady", "network", curves["steady_state"]])
    comments = [
        f"weights: {config['weights']} node step size: {node_mu!r}",
        f"messages per round: {max(curves['messages_per_round'], default=0)} "
        f"total: {curves['total_messages']}",
    ]
    return {"diffusion": _table("diffusion", ["iter", "node", "nmse"], rows, comments)}


def _gen_graph(config: ExperimentConfig) -> dict[str, ResultTable]:
    graph = load_graph(config["graph"], config["seed"])
    rows: list[list[int | float | str]] = [
        [i + 1, j + 1, w] for i, j, w in weighted_edges(graph)
    ]
    return {
        "graph": _table(
            "graph", ["i", "j", "weight"], rows, [f"vertices: {graph.number_of_nodes()}"]
        )
    }


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], dict[str, ResultTable]]] = {
    "decompose": _decompose,
    "select": _select,
    "recover": _recover,
    "mse-curve": _mse_curve,
    "l1-sweep": _l1_sweep,
    "lms-run": _lms,
    "design-p": _design,
    "diffuse-run": _diffuse,
    "gen-graph": _gen_graph,
}


def run_experiment(config: ExperimentConfig) -> dict[str, ResultTable]:
    """
    Run the experiment named by `config["command"]`.

    Returns
    -------
    dict[str, ResultTable]
        The result tables in output order.

    Raises
    ------
    ConfigError
        If the configuration is inconsistent with the graph.
    ConvergenceError
        If an eigensolver does not converge.
    """
    if config["command"] not in EXPERIMENTS:
        raise ConfigError("command", f"unknown command `{config['command']}`")
    if config["debug"]:
        print(f"[{config['command']}] Seed {config['seed']}.", file=sys.stderr)
    return EXPERIMENTS[config["command"]](config)
