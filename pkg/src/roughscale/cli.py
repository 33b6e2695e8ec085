"""Command-line interface.

Commands
--------
simulate      write rough Bergomi path files
estimate      scaling report for a series file
experiment    grid | empirical-h | real-data harnesses
rerun         repeat a previous run from its manifest

Configuration precedence: command-line flags override config-file entries,
which override the built-in preset ("desk" by default, "paper" for the
full-size study). Config files are plain ``key = value`` lines with ``#``
comments; list values are comma-separated.

Exit codes: 0 success, 1 usage/parameter error, 2 data or schema error,
3 numerical failure (including any failed experiment cell).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, reference
from .acsr import select_tau_max
from .dataio import load_library_csv
from .errors import DataError, NumericalError, ParameterError
from .experiments import (
    GridConfig,
    RBergomiBase,
    bucket_correlations,
    buckets_csv,
    dependence_json,
    empirical_csv,
    empirical_h_experiment,
    grid_mean_matrix,
    grid_records_csv,
    grid_records_json,
    matrix_csv,
    real_data_pipeline,
    synthetic_grid,
    table_csv,
)
from .ghe import default_q_grid, estimate_scaling, log_returns
from .manifest import build_manifest, read_manifest, write_manifest
from .pathgen import RBergomiParams, simulate_rbergomi
from .plots import save_curves_svg, save_heatmap_svg, save_scatter_svg
from .rng import substream


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_grid(lo: float, hi: float, step: float) -> tuple:
    count = int(round((hi - lo) / step)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def _parse_scalar(text: str):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        return text


def read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if "," in value:
                out[key.replace("-", "_")] = [_parse_scalar(v.strip()) for v in value.split(",")]
            else:
                out[key.replace("-", "_")] = _parse_scalar(value)
    return out


def _resolve(flags: dict, config: dict, preset: dict) -> dict:
    merged = dict(preset)
    merged.update({k: v for k, v in config.items() if k in preset})
    unknown = [k for k in config if k not in preset]
    if unknown:
        raise UsageError(f"unknown config keys: {unknown}")
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _parse_pair(text: str) -> tuple:
    parts = text.replace(":", ",").split(",")
    if len(parts) != 2:
        raise UsageError(f"--pair expects two estimates, got {text!r}")
    return tuple(p.strip() for p in parts)


def _parse_lambdas(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(v) for v in str(value).split(","))


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args, config_file: dict) -> int:
    preset = {
        "hurst": None, "eta": 1.9, "xi0": 0.1, "lam": 0.0, "steps": 5000,
        "dt": 1.0 / 252.0, "spot": 100.0, "paths": 1, "seed": 0,
        "fmt": "csv",
    }
    flags = {
        "hurst": args.hurst, "eta": args.eta, "xi0": args.xi0, "lam": args.lam,
        "steps": args.steps, "dt": args.dt, "spot": args.spot,
        "paths": args.paths, "seed": args.seed, "fmt": args.format,
    }
    cfg = _resolve(flags, config_file, preset)
    if cfg["hurst"] is None:
        raise UsageError("--hurst is required")
    params = RBergomiParams(
        hurst=float(cfg["hurst"]), vol_of_vol=float(cfg["eta"]),
        forward_variance=float(cfg["xi0"]), correlation=float(cfg["lam"]),
        n_steps=int(cfg["steps"]), dt=float(cfg["dt"]),
        spot=float(cfg["spot"]), seed=int(cfg["seed"]),
    )
    out = _out_dir(args.out)
    for i in range(int(cfg["paths"])):
        pair = simulate_rbergomi(params, substream(params.seed, i))
        if cfg["fmt"] in ("csv", "both"):
            pair.write_csv(out / f"path_{i:04d}.csv")
        if cfg["fmt"] in ("npz", "both"):
            pair.write_npz(out / f"path_{i:04d}.npz")
    manifest = build_manifest("simulate", cfg, {"base_seed": int(cfg["seed"])})
    write_manifest(manifest, out)
    print(f"wrote {int(cfg['paths'])} path(s) to {out}")
    return 0


# ---------------------------------------------------------------------------
# estimate

def _load_series(path: Path, column: str) -> np.ndarray:
    import pandas as pd

    frame = pd.read_csv(path)
    if column in frame.columns:
        values = frame[column]
    else:
        numeric = [c for c in frame.columns if pd.api.types.is_numeric_dtype(frame[c])]
        if column != "price" or not numeric:
            raise DataError(f"{path} has no column {column!r} (columns: {list(frame.columns)})")
        values = frame[numeric[-1]]
    arr = pd.to_numeric(values, errors="coerce").to_numpy(dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DataError(f"column {column!r} of {path} contains non-numeric cells")
    return arr


def cmd_estimate(args, config_file: dict) -> int:
    preset = {
        "column": "price", "tau_max": "acsr", "increments": "log",
        "q_min": 0.05, "q_max": 1.0, "q_count": 20, "proxy_test": "subsample",
    }
    flags = {
        "column": args.column, "tau_max": args.tau_max,
        "increments": args.increments, "q_min": args.q_min,
        "q_max": args.q_max, "q_count": args.q_count,
        "proxy_test": args.proxy_test,
    }
    cfg = _resolve(flags, config_file, preset)
    path = Path(args.input)
    if not path.exists():
        raise DataError(f"input file {path} does not exist")
    series = _load_series(path, str(cfg["column"]))

    if str(cfg["tau_max"]) == "acsr":
        fit = select_tau_max(log_returns(series, 1))
        tau_max = fit.tau_star
    else:
        tau_max = int(cfg["tau_max"])
    q = default_q_grid(float(cfg["q_min"]), float(cfg["q_max"]), int(cfg["q_count"]))
    report = estimate_scaling(
        series, tau_max, q_grid=q,
        increments=str(cfg["increments"]), proxy_test=str(cfg["proxy_test"]),
    )
    out = _out_dir(args.out)
    with open(out / "report.json", "w") as fh:
        fh.write(report.to_json(indent=2, sort_keys=True))
        fh.write("\n")
    with open(out / "report.csv", "w") as fh:
        fh.write("tau_max,hurst,linear_index,multiscaling_proxy,proxy_stderr,proxy_pvalue\n")
        fh.write(
            f"{report.tau_max_used},{report.hurst:.6g},{report.linear_index:.6g},"
            f"{report.multiscaling_proxy:.6g},{report.proxy_stderr:.6g},"
            f"{report.proxy_pvalue:.6g}\n"
        )
    cfg["tau_max"] = tau_max
    manifest = build_manifest("estimate", cfg | {"input": str(path)}, {},
                              inputs={"input": path})
    write_manifest(manifest, out)
    print(f"tau_max {tau_max}")
    print(f"hurst {report.hurst:.6g}  B {report.multiscaling_proxy:.6g}  "
          f"pvalue {report.proxy_pvalue:.6g}")
    return 0


# ---------------------------------------------------------------------------
# experiment

GRID_PRESETS = {
    "desk": {
        "h_min": 0.05, "h_max": 0.95, "h_step": 0.1,
        "lambda_min": -1.0, "lambda_max": 1.0, "lambda_step": 0.25,
        "replications": 20, "steps": 5000, "tau_max": 500,
        "eta": 1.9, "xi0": 0.1, "dt": 1.0 / 252.0, "spot": 100.0,
        "seed": 0, "pair": "h_vol,b_price", "bucket_width": 0.1,
        "pool_replications": False,
    },
    "paper": {
        "h_min": 0.01, "h_max": 0.99, "h_step": 0.01,
        "lambda_min": -1.0, "lambda_max": 1.0, "lambda_step": 0.05,
        "replications": 100, "steps": 5000, "tau_max": 500,
        "eta": 1.9, "xi0": 0.1, "dt": 1.0 / 252.0, "spot": 100.0,
        "seed": 0, "pair": "h_vol,b_price", "bucket_width": 0.1,
        "pool_replications": False,
    },
}

EMPIRICAL_PRESETS = {
    "desk": {
        "lambdas": "-0.8,-0.4,0,0.4,0.8", "replications": 20, "steps": 5000,
        "eta": 1.9, "xi0": 0.1, "dt": 1.0 / 252.0, "spot": 100.0,
        "seed": 0, "pair": "h_vol,b_price", "calibration": None,
    },
    "paper": {
        "lambdas": ",".join(f"{v:g}" for v in np.arange(-1.0, 1.01, 0.1)),
        "replications": 100, "steps": 5000,
        "eta": 1.9, "xi0": 0.1, "dt": 1.0 / 252.0, "spot": 100.0,
        "seed": 0, "pair": "h_vol,b_price", "calibration": None,
    },
}

REAL_PRESET = {
    "measure": "rv10", "return_kind": "open_to_close",
    "pair": "h_vol,b_price", "metric": "mahalanobis", "increments": "log",
    "proxy_test": "subsample", "seed": 0,
    "intersection_measures": "rv10,rv5,rsv,bv",
}


def run_grid(cfg: dict, out: Path, workers: int) -> int:
    config = GridConfig(
        h_values=_float_grid(float(cfg["h_min"]), float(cfg["h_max"]), float(cfg["h_step"])),
        lambda_values=_float_grid(float(cfg["lambda_min"]), float(cfg["lambda_max"]),
                                  float(cfg["lambda_step"])),
        replications=int(cfg["replications"]),
        n_steps=int(cfg["steps"]),
        base=RBergomiBase(vol_of_vol=float(cfg["eta"]), forward_variance=float(cfg["xi0"]),
                          dt=float(cfg["dt"]), spot=float(cfg["spot"])),
        base_seed=int(cfg["seed"]),
        tau_max_mode="acsr" if str(cfg["tau_max"]) == "acsr" else "fixed",
        tau_max_value=500 if str(cfg["tau_max"]) == "acsr" else int(cfg["tau_max"]),
    )
    result = synthetic_grid(config, workers=workers)
    grid_records_csv(result, out / "grid.csv")
    grid_records_json(result, out / "grid.json")
    for name in ("b_price", "b_vol"):
        matrix = grid_mean_matrix(result, name)
        matrix_csv(matrix, config.h_values, config.lambda_values,
                   out / f"heatmap_{name}.csv")
        save_heatmap_svg(matrix, config.lambda_values, config.h_values,
                         out / f"heatmap_{name}.svg",
                         title=f"mean {name} over the (H, lambda) grid")
    pair = _parse_pair(str(cfg["pair"]))
    buckets = bucket_correlations(
        result, pair[0], pair[1],
        bucket_width=float(cfg["bucket_width"]),
        pool_replications=bool(cfg["pool_replications"]),
    )
    buckets_csv(buckets, out / "buckets.csv")
    mids = [0.5 * (b.low + b.high) for b in buckets]
    save_curves_svg(
        mids,
        {"pearson": (np.array([b.pearson_mean for b in buckets]),
                     np.array([b.pearson_se for b in buckets])),
         "spearman": (np.array([b.spearman_mean for b in buckets]),
                      np.array([b.spearman_se for b in buckets]))},
        out / "buckets.svg", xlabel="H bucket midpoint",
        ylabel=f"corr({pair[0]}, {pair[1]})",
        title="bucketed correlation between scaling estimates",
    )
    if result.failures:
        print(f"{len(result.failures)} of {len(result.failures) + len(result.records)} "
              "cells failed:", file=sys.stderr)
        for f in result.failures[:20]:
            print(f"  cell (h={f.h_index}, lambda={f.lambda_index}, rep={f.replication}): "
                  f"{f.message}", file=sys.stderr)
        return 3
    print(f"grid complete: {len(result.records)} cells -> {out}")
    return 0


def run_empirical(cfg: dict, out: Path, workers: int) -> int:
    if cfg["calibration"]:
        import pandas as pd

        table = pd.read_csv(cfg["calibration"])
        for col in ("symbol", "tau_star", "h_vol"):
            if col not in table.columns:
                raise DataError(f"calibration file lacks column {col!r}")
        symbols = tuple(table["symbol"].astype(str))
        h_list = tuple(float(v) for v in table["h_vol"])
        tau_list = tuple(int(v) for v in table["tau_star"])
    else:
        symbols = reference.SYMBOLS
        h_list = tuple(reference.column("h_vol"))
        tau_list = tuple(int(v) for v in reference.column("tau_star"))
    result = empirical_h_experiment(
        h_list, tau_list, _parse_lambdas(cfg["lambdas"]),
        replications=int(cfg["replications"]),
        base=RBergomiBase(vol_of_vol=float(cfg["eta"]), forward_variance=float(cfg["xi0"]),
                          dt=float(cfg["dt"]), spot=float(cfg["spot"])),
        n_steps=int(cfg["steps"]),
        base_seed=int(cfg["seed"]),
        pair=_parse_pair(str(cfg["pair"])),
        symbols=symbols,
        workers=workers,
    )
    empirical_csv(result, out / "empirical.csv")
    save_curves_svg(
        result.lambda_values,
        {"pearson": (result.pearson_mean, result.pearson_se),
         "spearman": (result.spearman_mean, result.spearman_se)},
        out / "curves.svg",
        title=f"cross-sectional corr({result.pair[0]}, {result.pair[1]})",
    )
    print(f"empirical-h complete: {len(result.records)} simulations -> {out}")
    return 0


def run_real_data(cfg: dict, out: Path, workers: int) -> int:
    data_path = Path(cfg["data"])
    if not data_path.exists():
        raise DataError(f"data file {data_path} does not exist")
    library = load_library_csv(data_path)
    pair = _parse_pair(str(cfg["pair"]))
    inter = cfg["intersection_measures"]
    inter = tuple(inter) if isinstance(inter, (list, tuple)) else tuple(
        m.strip() for m in str(inter).split(",")
    )
    result = real_data_pipeline(
        library,
        measure=str(cfg["measure"]),
        return_kind=str(cfg["return_kind"]),
        pair=pair,
        increments=str(cfg["increments"]),
        proxy_test=str(cfg["proxy_test"]),
        metric=str(cfg["metric"]),
        outlier_seed=int(cfg["seed"]),
        intersection_measures=inter,
        workers=workers,
    )
    table_csv(result, out / "table.csv")
    dependence_json(result, out / "dependence.json")
    with open(out / "repairs.json", "w") as fh:
        fh.write(library.repairs_to_json(indent=2))
        fh.write("\n")
    x = result.table_column(pair[0])
    y = result.table_column(pair[1])
    flagged = [i for i, r in enumerate(result.rows)
               if r.symbol in result.outlier_sets[result.measure]]
    save_scatter_svg(
        x, y, out / "scatter.svg",
        labels=[r.symbol for r in result.rows], outliers=flagged,
        xlabel=pair[0], ylabel=pair[1],
        title=f"{result.measure}: raw rho={result.dependence.raw_pearson.coefficient:.2f}, "
              f"robust rho={result.dependence.robust_pearson.coefficient:.2f}",
    )
    dep = result.dependence
    print(f"indices: {len(result.rows)}  failures: {len(result.failures)}")
    print(f"pearson {dep.raw_pearson.coefficient:.4f}  "
          f"spearman {dep.raw_spearman.coefficient:.4f}  "
          f"robust {dep.robust_pearson.coefficient:.4f}/{dep.robust_spearman.coefficient:.4f}")
    print(f"outliers per measure: { {m: list(v) for m, v in result.outlier_sets.items()} }")
    print(f"intersection: {list(result.intersection)}")
    return 0


def cmd_experiment(args, config_file: dict) -> int:
    out = _out_dir(args.out)
    workers = int(args.workers or 1)
    if args.kind == "grid":
        preset = GRID_PRESETS[args.preset]
        flags = {k: getattr(args, k, None) for k in preset}
        cfg = _resolve(flags, config_file, preset)
        code = run_grid(cfg, out, workers)
        manifest_cfg = dict(cfg)
    elif args.kind == "empirical-h":
        preset = EMPIRICAL_PRESETS[args.preset]
        flags = {k: getattr(args, k, None) for k in preset}
        cfg = _resolve(flags, config_file, preset)
        code = run_empirical(cfg, out, workers)
        manifest_cfg = dict(cfg)
    elif args.kind == "real-data":
        preset = dict(REAL_PRESET, data=None)
        flags = {k: getattr(args, k, None) for k in preset}
        cfg = _resolve(flags, config_file, preset)
        if not cfg.get("data"):
            raise UsageError("--data is required for real-data experiments")
        code = run_real_data(cfg, out, workers)
        manifest_cfg = dict(cfg)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown experiment {args.kind!r}")
    manifest = build_manifest(
        f"experiment.{args.kind}", manifest_cfg,
        {"base_seed": int(manifest_cfg.get("seed", 0))},
        inputs={"data": manifest_cfg["data"]} if manifest_cfg.get("data") else None,
    )
    write_manifest(manifest, out)
    return code


def cmd_rerun(args) -> int:
    manifest = read_manifest(args.manifest)
    command = manifest["command"]
    cfg = dict(manifest["config"])
    out = _out_dir(args.out)
    workers = int(args.workers or 1)
    if command.startswith("experiment."):
        kind = command.split(".", 1)[1]
        if kind == "grid":
            code = run_grid(cfg, out, workers)
        elif kind == "empirical-h":
            code = run_empirical(cfg, out, workers)
        elif kind == "real-data":
            code = run_real_data(cfg, out, workers)
        else:
            raise DataError(f"manifest has unknown experiment kind {kind!r}")
        write_manifest(build_manifest(command, cfg, manifest.get("seeds", {}),
                                      inputs={"data": cfg["data"]} if cfg.get("data") else None),
                       out)
        return code
    if command == "simulate":
        ns = argparse.Namespace(
            hurst=cfg.get("hurst"), eta=cfg.get("eta"), xi0=cfg.get("xi0"),
            lam=cfg.get("lam"), steps=cfg.get("steps"), dt=cfg.get("dt"),
            spot=cfg.get("spot"), paths=cfg.get("paths"), seed=cfg.get("seed"),
            format=cfg.get("fmt"), out=str(out),
        )
        return cmd_simulate(ns, {})
    if command == "estimate":
        ns = argparse.Namespace(
            input=cfg["input"], column=cfg.get("column"),
            tau_max=str(cfg.get("tau_max")), increments=cfg.get("increments"),
            q_min=cfg.get("q_min"), q_max=cfg.get("q_max"),
            q_count=cfg.get("q_count"), proxy_test=cfg.get("proxy_test"),
            out=str(out),
        )
        return cmd_estimate(ns, {})
    raise DataError(f"manifest has unknown command {command!r}")


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="roughscale", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate rough Bergomi paths")
    p_sim.add_argument("--hurst", type=float)
    p_sim.add_argument("--eta", type=float)
    p_sim.add_argument("--xi0", type=float)
    p_sim.add_argument("--lambda", dest="lam", type=float)
    p_sim.add_argument("--steps", type=int)
    p_sim.add_argument("--dt", type=float)
    p_sim.add_argument("--spot", type=float)
    p_sim.add_argument("--paths", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--format", choices=("csv", "npz", "both"))
    p_sim.add_argument("--config")
    p_sim.add_argument("--out", required=True)

    p_est = sub.add_parser("estimate", help="estimate a scaling report")
    p_est.add_argument("--input", required=True)
    p_est.add_argument("--column")
    p_est.add_argument("--tau-max", dest="tau_max")
    p_est.add_argument("--increments", choices=("log", "level"))
    p_est.add_argument("--q-min", dest="q_min", type=float)
    p_est.add_argument("--q-max", dest="q_max", type=float)
    p_est.add_argument("--q-count", dest="q_count", type=int)
    p_est.add_argument("--proxy-test", dest="proxy_test",
                       choices=("subsample", "line-fit"))
    p_est.add_argument("--config")
    p_est.add_argument("--out", required=True)

    p_exp = sub.add_parser("experiment", help="run an experiment harness")
    p_exp.add_argument("kind", choices=("grid", "empirical-h", "real-data"))
    p_exp.add_argument("--preset", choices=("desk", "paper"), default="desk")
    p_exp.add_argument("--config")
    p_exp.add_argument("--out", required=True)
    p_exp.add_argument("--workers", type=int)
    p_exp.add_argument("--seed", type=int)
    p_exp.add_argument("--replications", type=int)
    p_exp.add_argument("--steps", type=int)
    p_exp.add_argument("--eta", type=float)
    p_exp.add_argument("--xi0", type=float)
    p_exp.add_argument("--dt", type=float)
    p_exp.add_argument("--spot", type=float)
    p_exp.add_argument("--pair")
    # grid specific
    p_exp.add_argument("--h-min", dest="h_min", type=float)
    p_exp.add_argument("--h-max", dest="h_max", type=float)
    p_exp.add_argument("--h-step", dest="h_step", type=float)
    p_exp.add_argument("--lambda-min", dest="lambda_min", type=float)
    p_exp.add_argument("--lambda-max", dest="lambda_max", type=float)
    p_exp.add_argument("--lambda-step", dest="lambda_step", type=float)
    p_exp.add_argument("--tau-max", dest="tau_max")
    p_exp.add_argument("--bucket-width", dest="bucket_width", type=float)
    p_exp.add_argument("--pool-replications", dest="pool_replications",
                       action="store_const", const=True)
    # empirical-h specific
    p_exp.add_argument("--lambdas")
    p_exp.add_argument("--calibration")
    # real-data specific
    p_exp.add_argument("--data")
    p_exp.add_argument("--measure", choices=("rv10", "rv5", "rsv", "bv",
                                             "close_price", "open_to_close"))
    p_exp.add_argument("--return-kind", dest="return_kind",
                       choices=("open_to_close", "close_to_close"))
    p_exp.add_argument("--metric", choices=("mahalanobis", "euclidean"))
    p_exp.add_argument("--increments", choices=("log", "level"))
    p_exp.add_argument("--proxy-test", dest="proxy_test",
                       choices=("subsample", "line-fit"))
    p_exp.add_argument("--intersection-measures", dest="intersection_measures")

    p_rerun = sub.add_parser("rerun", help="repeat a run from its manifest")
    p_rerun.add_argument("--manifest", required=True)
    p_rerun.add_argument("--out", required=True)
    p_rerun.add_argument("--workers", type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config_file = read_config_file(args.config) if getattr(args, "config", None) else {}
        if args.command == "simulate":
            return cmd_simulate(args, config_file)
        if args.command == "estimate":
            return cmd_estimate(args, config_file)
        if args.command == "experiment":
            return cmd_experiment(args, config_file)
        if args.command == "rerun":
            return cmd_rerun(args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
