"""
arclust - attraction-repulsion fair clustering
Command-line entry point
"""

import argparse
import os
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from arclust.analytics.core import DataError, Dataset, DissimParams
from arclust.analytics.dissim import DissimMatrix, euclidean_matrix, prepare_for_mds
from arclust.analytics.geodesic import geodesic_matrix
from arclust.analytics.kernelize import KERNELS, KernelSpec
from arclust.analytics.metrics import evaluate_partition
from arclust.analytics.synthetic import make_gaussians, make_rings
from arclust.analytics.tune import build_grid, tune
from arclust.datasets import ColumnRoles, load_csv
from arclust.method_registry import METHODS, MethodContext, get_method_list
from arclust.pipeline import fit_pipeline
from arclust import storage
from src.utils.config import CONFIG_SCHEMA, format_config, load_config
from src.utils.env_loader import ensure_env_loaded
from src.utils.helpers import (
    parse_float_list,
    parse_int_list,
    parse_matrix_list,
    parse_str_list,
)
from src.utils.logger import setup_logger

GRID_KEYS = ("u", "v", "w", "v0", "u_matrix", "v_matrix", "v_tilde")
RANDOMIZED_METHODS = ("kmeans_mds",)


EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    """Invalid or missing command-line options"""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_data_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("--input", help="Input CSV file")
    group.add_argument("--id-column", dest="id_column")
    group.add_argument("--x-columns", dest="x_columns", type=parse_str_list)
    group.add_argument("--protected-columns", dest="protected_columns", type=parse_str_list)
    group.add_argument("--class-column", dest="class_column")
    group.add_argument(
        "--codification", choices=["signed", "one_hot", "counts", "fractions", "raw"]
    )
    group.add_argument("--lat-column", dest="lat_column")
    group.add_argument("--lon-column", dest="lon_column")
    group.add_argument("--distance", choices=["euclidean", "geodesic"])


def _add_params_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("dissimilarity")
    group.add_argument("--family", choices=["delta1", "delta2", "delta3", "delta4"])
    group.add_argument("--U", dest="u_matrix", type=parse_matrix_list, help='e.g. "0" or "1,0;0,1"')
    group.add_argument("--V", dest="v_matrix", type=parse_matrix_list, help="matrix or preset name")
    group.add_argument("--u", type=parse_float_list)
    group.add_argument("--v", type=parse_float_list)
    group.add_argument("--w", type=parse_float_list)
    group.add_argument("--v0", type=parse_float_list, help="interaction scale(s)")
    group.add_argument("--v-tilde", dest="v_tilde", type=parse_matrix_list, help="guideline matrix or preset")
    group.add_argument("--kernel", choices=KERNELS)
    group.add_argument("--kernel-degree", dest="kernel_degree", type=int)
    group.add_argument("--kernel-coef", dest="kernel_coef", type=float)
    group.add_argument("--kernel-gamma", dest="kernel_gamma", type=float)
    group.add_argument("--epsilon", type=float, help="shift margin (default: automatic)")
    group.add_argument("--d-prime", dest="d_prime", type=int, help="embedding dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="arclust", description="Attraction-repulsion fair clustering"
    )
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--log-level", dest="log_level")
    parser.add_argument(
        "--print-config", action="store_true", help="print the resolved configuration and exit"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    synth = subparsers.add_parser("synth", help="generate a synthetic dataset")
    synth.add_argument("kind", choices=["gaussians", "rings"])
    synth.add_argument("--seed", type=int)
    synth.add_argument("--out", help="output CSV (default: <output_dir>/<kind>.csv)")

    dissim = subparsers.add_parser("dissim", help="compute a dissimilarity matrix")
    _add_data_arguments(dissim)
    _add_params_arguments(dissim)
    dissim.add_argument("--prepare", action="store_true", help="shift and take square roots for MDS")
    dissim.add_argument("--out", required=True, help="output file (.csv or .ardm)")

    embed = subparsers.add_parser("embed", help="classical MDS embedding")
    _add_data_arguments(embed)
    _add_params_arguments(embed)
    embed.add_argument("--out", required=True, help="output CSV")

    cluster = subparsers.add_parser("cluster", help="cluster with one parameter setting")
    _add_data_arguments(cluster)
    _add_params_arguments(cluster)
    cluster.add_argument(
        "--method", required=True, choices=sorted(METHODS), help="see 'arclust methods'"
    )
    cluster.add_argument("--k", type=parse_int_list, required=True)
    cluster.add_argument("--seed", type=int)
    cluster.add_argument("--restarts", type=int)
    cluster.add_argument("--out-dir", dest="output_dir")
    cluster.add_argument("--plot", action="store_true", help="also write an SVG scatter plot")

    tuner = subparsers.add_parser("tune", help="tune dissimilarity parameters over a grid")
    _add_data_arguments(tuner)
    _add_params_arguments(tuner)
    tuner.add_argument("--grid", help="grid file (same format as --config)")
    tuner.add_argument("--methods", type=parse_str_list)
    tuner.add_argument("--k", type=parse_int_list, help='e.g. "2-15"')
    tuner.add_argument("--tau", type=float)
    tuner.add_argument("--seed", type=int)
    tuner.add_argument("--restarts", type=int)
    tuner.add_argument("--n-jobs", dest="n_jobs", type=int)
    tuner.add_argument("--out-dir", dest="output_dir")

    metrics = subparsers.add_parser("metrics", help="evaluate a saved partition")
    _add_data_arguments(metrics)
    metrics.add_argument("--partition", required=True, help="partition JSON")
    metrics.add_argument("--out", help="output JSON (default: print)")

    plot = subparsers.add_parser("plot", help="SVG scatter plot of a saved partition")
    _add_data_arguments(plot)
    plot.add_argument("--partition", required=True, help="partition JSON")
    plot.add_argument("--coords", help="embedding CSV (default: the two x columns)")
    plot.add_argument("--out", required=True, help="output SVG")
    plot.add_argument("--title")

    subparsers.add_parser("methods", help="list the registered clustering methods")

    return parser


def _load_run_config(args: argparse.Namespace) -> Dict[str, Any]:
    path = args.config
    grid_path = getattr(args, "grid", None)
    if grid_path:
        if path:
            raise UsageError("Use either --config or --grid, not both")
        path = grid_path

    overrides = {key: value for key, value in vars(args).items() if key in CONFIG_SCHEMA}
    if getattr(args, "method", None):
        overrides["methods"] = [args.method]
    return load_config(path, overrides)


def _require_seed(config: Dict[str, Any], command: str) -> int:
    if config["seed"] is None:
        raise UsageError(f"{command} is randomized: --seed is required")
    return config["seed"]


def _load_dataset(config: Dict[str, Any]) -> Dataset:
    if not config["input"]:
        raise UsageError("--input is required")
    return load_csv(config["input"], ColumnRoles.from_config(config))


def _base_distances(config: Dict[str, Any], data: Dataset) -> Optional[DissimMatrix]:
    if config["distance"] != "geodesic":
        return None
    if data.latlon is None:
        raise UsageError("geodesic distances need --lat-column and --lon-column")
    return geodesic_matrix(data.latlon[:, 0], data.latlon[:, 1], ids=data.ids)


def _kernel(config: Dict[str, Any]) -> Optional[KernelSpec]:
    if not config["kernel"]:
        return None
    return KernelSpec(
        config["kernel"],
        degree=config["kernel_degree"],
        coef=config["kernel_coef"],
        gamma=config["kernel_gamma"],
    )


def _grid(config: Dict[str, Any], data: Dataset) -> List[DissimParams]:
    if not config["family"]:
        raise UsageError("--family is required")
    return build_grid(config["family"], {key: config[key] for key in GRID_KEYS}, data.p)


def _single_params(config: Dict[str, Any], data: Dataset) -> DissimParams:
    grid = _grid(config, data)
    if len(grid) != 1:
        raise UsageError(f"Expected one parameter setting, got {len(grid)}; use 'tune' for grids")
    return grid[0]


def _context(config: Dict[str, Any], data: Dataset) -> MethodContext:
    return MethodContext(
        data=data,
        params=_single_params(config, data),
        kernel=_kernel(config),
        base=_base_distances(config, data),
        d_prime=config["d_prime"],
        epsilon=config["epsilon"],
        seed=config["seed"] or 0,
    )


def cmd_synth(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    seed = _require_seed(config, "synth")
    if args.kind == "gaussians":
        frame = make_gaussians(seed)
    else:
        frame = make_rings(seed, radii=config["ring_radii"], width=config["ring_width"])
    out = args.out or os.path.join(config["output_dir"], f"{args.kind}.csv")
    storage.save_table_csv(out, frame)
    return 0


def cmd_dissim(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    data = _load_dataset(config)
    matrix = _context(config, data).matrix()
    if args.prepare:
        matrix = prepare_for_mds(matrix, epsilon=config["epsilon"])
    if args.out.endswith(".ardm"):
        storage.save_dissim_binary(args.out, matrix)
    else:
        storage.save_dissim_csv(args.out, matrix)
        storage.save_result_json(args.out + ".json", "dissim", matrix.metadata())
    return 0


def cmd_embed(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    data = _load_dataset(config)
    context = _context(config, data)
    storage.save_embedding(args.out, context.embedding())
    return 0


def cmd_cluster(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    method = config["methods"][0]
    if len(config["k"]) != 1:
        raise UsageError("cluster takes a single --k; use 'tune' for a range")
    seed = _require_seed(config, method) if method in RANDOMIZED_METHODS else config["seed"] or 0

    data = _load_dataset(config)
    base = _base_distances(config, data)
    run = fit_pipeline(
        data,
        _single_params(config, data),
        method,
        config["k"][0],
        d_prime=config["d_prime"],
        kernel=_kernel(config),
        base=base,
        seed=seed,
        restarts=config["restarts"],
        epsilon=config["epsilon"],
    )

    out_dir = config["output_dir"]
    extra = {
        "method": run.method,
        "params": run.params.to_dict(),
        "seed": run.seed,
        "objective": run.objective,
        "details": run.details,
    }
    storage.save_partition(os.path.join(out_dir, "partition.json"), run.partition, data.ids, extra)
    storage.save_result_json(os.path.join(out_dir, "metrics.json"), "metrics", run.metrics.to_dict())
    storage.save_table_csv(
        os.path.join(out_dir, "metrics.csv"),
        [
            {
                "method": run.method,
                "k": run.partition.k,
                "params": run.params.label(),
                "avg_silhouette": run.metrics.avg_silhouette,
                "unfairness": run.metrics.unfairness,
                "balance": run.metrics.balance,
                "embedded_silhouette": run.metrics.embedded_silhouette,
                "seed": run.seed,
            }
        ],
    )
    if run.embedding is not None:
        storage.save_embedding(os.path.join(out_dir, "embedding.csv"), run.embedding)
    if run.dendrogram is not None:
        storage.save_dendrogram(os.path.join(out_dir, "dendrogram.json"), run.dendrogram)
    if args.plot:
        from arclust.plotting import plot_scatter

        coords = _plot_coords(data, run.embedding.coords if run.embedding is not None else None)
        plot_scatter(
            coords,
            run.partition,
            data.record_classes(),
            os.path.join(out_dir, "clusters.svg"),
            title=f"{run.method} k={run.k} {run.params.label()}",
        )
    return 0


def cmd_tune(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    methods = config["methods"]
    seed = config["seed"]
    if any(m in RANDOMIZED_METHODS for m in methods):
        seed = _require_seed(config, "tune")

    data = _load_dataset(config)
    result = tune(
        data,
        methods,
        _grid(config, data),
        config["k"],
        tau=config["tau"],
        seed=seed or 0,
        kernel=_kernel(config),
        base=_base_distances(config, data),
        d_prime=config["d_prime"],
        epsilon=config["epsilon"],
        restarts=config["restarts"],
        n_jobs=config["n_jobs"],
        baseline=config["baseline"],
    )

    out_dir = config["output_dir"]
    rows = [cell.to_row() for cell in result.cells]
    rows += [cell.to_row() for cell in result.baselines.values()]
    storage.save_table_csv(os.path.join(out_dir, "cells.csv"), rows)
    storage.save_table_csv(os.path.join(out_dir, "summary.csv"), result.summary_rows())
    storage.save_result_json(os.path.join(out_dir, "tune.json"), "tune", result.to_dict())
    return 0


def _aligned_partition(args: argparse.Namespace, data: Dataset):
    partition, ids, _ = storage.load_partition(args.partition)
    if tuple(ids) != data.ids:
        raise DataError("Partition ids do not match the dataset ids")
    return partition


def cmd_metrics(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    data = _load_dataset(config)
    partition = _aligned_partition(args, data)
    distances = _base_distances(config, data) or euclidean_matrix(data)
    report = evaluate_partition(partition, data, distances, coords=np.asarray(data.x))
    if args.out:
        storage.save_result_json(args.out, "metrics", report.to_dict())
    else:
        print(format_report(report.to_dict()))
    return 0


def format_report(report: Dict[str, Any]) -> str:
    lines = [
        f"k: {report['k']}",
        f"average silhouette: {report['avg_silhouette']:.6f}",
        f"unfairness: {report['unfairness']:.6f}",
    ]
    if report["balance"] is not None:
        lines.append(f"balance: {report['balance']:.6f}")
    for name, value in report["per_class_silhouette"].items():
        lines.append(f"silhouette [{name}]: {value:.6f}")
    return "\n".join(lines)


def _plot_coords(data: Dataset, coords: Optional[np.ndarray]) -> np.ndarray:
    if coords is not None and coords.shape[1] >= 2:
        return coords[:, :2]
    if data.latlon is not None:
        return data.latlon[:, ::-1]
    if data.d == 2:
        return np.asarray(data.x)
    raise UsageError("Need two-dimensional coordinates to plot; pass --coords")


def format_methods(entries: List[Dict[str, Any]]) -> str:
    lines = []
    for entry in entries:
        line = f"{entry['id']:<14} {entry['category']:<13} {entry['label']}"
        if entry["parameters"]:
            settings = ", ".join(f"{name}={value}" for name, value in entry["parameters"].items())
            line += f" [{settings}]"
        lines.append(line)
    return "\n".join(lines)


def cmd_methods(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    print(format_methods(get_method_list()))
    return 0


def cmd_plot(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    from arclust.plotting import plot_scatter

    data = _load_dataset(config)
    partition = _aligned_partition(args, data)
    coords = None
    if args.coords:
        ids, coords = storage.load_embedding_coords(args.coords)
        if ids != data.ids:
            raise DataError("Embedding ids do not match the dataset ids")
    plot_scatter(_plot_coords(data, coords), partition, data.record_classes(), args.out, title=args.title)
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, Dict[str, Any]], int]] = {
    "synth": cmd_synth,
    "dissim": cmd_dissim,
    "embed": cmd_embed,
    "cluster": cmd_cluster,
    "tune": cmd_tune,
    "metrics": cmd_metrics,
    "plot": cmd_plot,
    "methods": cmd_methods,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application"""
    ensure_env_loaded()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_run_config(args)
    except (UsageError, ValueError, FileNotFoundError) as e:
        parser.print_usage(sys.stderr)
        print(f"arclust: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.print_config:
        print(format_config(config), end="")
        return 0

    logger = setup_logger(level=config["log_level"], log_dir=config["log_dir"])
    logger.info(f"Running {args.command}")

    try:
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
