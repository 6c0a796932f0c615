"""Command-line entry point: ``zzgril {build,gril,featurize,oracle-check,bench}``.

Every command accepts ``--config FILE`` (a JSON object whose keys mirror the
long flag names with dashes turned into underscores); flags given on the
command line win over the file.  Exit codes: 0 success, 1 data or
verification failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from importlib import metadata as importlib_metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from zzgril.bifiltration import QuasiZigzagBifiltration
from zzgril.errors import ParameterError, StructuralError, ZzGrilError
from zzgril.landscape import config_hash, landscape, sample_centers
from zzgril.pipeline import (
    GRAPHS,
    POINTCLOUDS,
    WindowConfig,
    featurize,
    load_dataset,
    sample_bifiltration,
    synthetic_dataset,
)

ORACLE_LIMITS = {"vertices": 6, "T": 5, "L": 5}


class UsageError(ParameterError):
    pass


def _versions() -> dict[str, str]:
    out = {"python": platform.python_version(), "numpy": np.__version__}
    for dist in ("artifact", "numba"):
        try:
            out[dist] = importlib_metadata.version(dist)
        except importlib_metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _lattice(text: Any) -> tuple[int, int]:
    if isinstance(text, (list, tuple)):
        rows, cols = text
        return int(rows), int(cols)
    try:
        rows, cols = str(text).lower().split("x")
        return int(rows), int(cols)
    except ValueError:
        raise UsageError(f"centers must look like RxC, got {text!r}") from None


def _default_jobs() -> int:
    env = os.environ.get("ZZGRIL_JOBS")
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise UsageError(f"ZZGRIL_JOBS must be an integer, got {env!r}") from None
    else:
        jobs = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1
    return jobs


def _merged(args: argparse.Namespace, keys: Sequence[str], defaults: dict[str, Any]) -> dict[str, Any]:
    """Config file values overridden by explicitly given flags, then defaults."""
    out = dict(defaults)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - set(keys)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        out.update(data)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _meta(command: str, config: dict[str, Any]) -> dict[str, Any]:
    return {"command": command, "config": config, "seed": config.get("seed"), "versions": _versions()}


def _window_config(cfg: dict[str, Any]) -> WindowConfig:
    return WindowConfig(
        mode=cfg["mode"],
        width=cfg["width"],
        overlap=cfg["overlap"],
        percentile=tuple(float(v) for v in cfg["percentile"]),
        levels=int(cfg["levels"]),
        max_dim=int(cfg["max_dim"]),
        ks=tuple(cfg["ks"]),
        degrees=tuple(cfg["degrees"]),
        centers=_lattice(cfg["centers"]),
        seed=int(cfg["seed"]),
        normalize=bool(cfg["normalize"]),
    )


WINDOW_KEYS = ("mode", "width", "overlap", "percentile", "levels", "max_dim", "ks", "degrees", "centers", "seed",
               "normalize")


def _window_defaults() -> dict[str, Any]:
    d = WindowConfig().to_dict()
    d["centers"] = "x".join(map(str, d["centers"]))
    return d


def _normalize_window_args(args: argparse.Namespace) -> None:
    if args.ks is not None:
        args.ks = _int_list(args.ks)
    if args.degrees is not None:
        args.degrees = _int_list(args.degrees)
    if args.percentile is not None:
        try:
            lo, hi = (float(v) for v in args.percentile.split(","))
        except ValueError:
            raise UsageError("percentile must look like LO,HI") from None
        args.percentile = [lo, hi]
    if args.normalize is False:
        args.normalize = None


def cmd_build(args: argparse.Namespace) -> int:
    _normalize_window_args(args)
    cfg = _merged(args, WINDOW_KEYS + ("sample",), {**_window_defaults(), "sample": None})
    src = Path(args.input)
    if src.suffix == ".json":
        try:
            data = json.loads(src.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise StructuralError(f"cannot read {src}: {exc}") from None
        B = QuasiZigzagBifiltration.from_json(data)
        meta = data.get("metadata") or _meta("build", {"input": str(src)})
    else:
        config = _window_config(cfg)
        if src.is_dir():
            ds = load_dataset(src)
            ids = [s.id for s in ds.samples]
            sid = cfg["sample"] or ids[0]
            if sid not in ids:
                raise UsageError(f"sample {sid!r} not in dataset")
            index = ids.index(sid)
            data_matrix = ds.samples[index].data
        else:
            try:
                data_matrix = np.loadtxt(src, delimiter=",", ndmin=2)
            except (OSError, ValueError) as exc:
                raise StructuralError(f"cannot read {src}: {exc}") from None
            index = 0
        B = sample_bifiltration(data_matrix, config, index)
        meta = _meta("build", {**config.to_dict(), "input": str(src), "sample_index": index})
    _emit(B.dumps(meta) + "\n", args.output)
    counts = np.bincount([len(s) - 1 for s in B.simplices], minlength=1).tolist()
    print(f"grid {B.width}x{B.L} (T={B.T}); simplices by dimension {counts}", file=sys.stderr)
    return 0


def _load_bifiltration(path: str) -> QuasiZigzagBifiltration:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StructuralError(f"cannot read {path}: {exc}") from None
    return QuasiZigzagBifiltration.from_json(data)


def cmd_gril(args: argparse.Namespace) -> int:
    if args.ks is not None:
        args.ks = _int_list(args.ks)
    if args.degrees is not None:
        args.degrees = _int_list(args.degrees)
    cfg = _merged(args, ("centers", "ks", "degrees", "format"), {"centers": "6x6", "ks": [1, 2], "degrees": [0, 1],
                                                                   "format": "json"})
    if cfg["format"] not in ("json", "csv"):
        raise UsageError("format must be json or csv")
    B = _load_bifiltration(args.input)
    rows, cols = _lattice(cfg["centers"])
    centers = sample_centers(B.width, B.L, rows, cols)
    result = landscape(B, centers, cfg["ks"], cfg["degrees"], jobs=args.jobs)
    result.metadata.update(_meta("gril", {**cfg, "input": str(args.input)}))
    if cfg["format"] == "json":
        _emit(json.dumps(result.to_json(), sort_keys=True, indent=1) + "\n", args.output)
    else:
        _emit(result.to_csv(), args.output)
        if args.output not in (None, "-"):
            Path(str(args.output) + ".meta.json").write_text(json.dumps(result.metadata, sort_keys=True, indent=1))
    if args.emit_heatmap:
        out = Path(args.emit_heatmap)
        out.mkdir(parents=True, exist_ok=True)
        for p in result.degrees:
            for k in result.ks:
                xs, ys, grid = result.heatmap(k, p)
                lines = ["y\\x," + ",".join(map(str, xs))]
                lines += [f"{y}," + ",".join(map(str, row)) for y, row in zip(ys, grid.tolist())]
                (out / f"heatmap_H{p}_k{k}.csv").write_text("\n".join(lines) + "\n")
    return 0


def cmd_featurize(args: argparse.Namespace) -> int:
    _normalize_window_args(args)
    cfg = _merged(args, WINDOW_KEYS, _window_defaults())
    config = _window_config(cfg)
    ds = load_dataset(args.input)
    fm = featurize(ds, config, jobs=args.jobs)
    out = args.output or "features.csv"
    fm.to_csv(out)
    meta = _meta("featurize", {**config.to_dict(), "input": str(args.input)})
    meta["config_hash"] = config_hash(config.to_dict())
    meta["samples"] = len(fm.ids)
    Path(out + ".meta.json").write_text(json.dumps(meta, sort_keys=True, indent=1))
    print(f"{len(fm.ids)} samples x {len(fm.names)} features -> {out}", file=sys.stderr)
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    from zzgril.oracle import cross_check, random_instance

    cfg = _merged(args, ("trials", "T", "L", "vertices", "max_dim", "seed"),
                  {"trials": 200, "T": 4, "L": 4, "vertices": 6, "max_dim": 2, "seed": 0})
    for key, limit in ORACLE_LIMITS.items():
        if not 1 <= int(cfg[key]) <= limit:
            raise UsageError(f"{key} must lie in 1..{limit} for the oracle")
    if int(cfg["trials"]) < 1 or int(cfg["max_dim"]) not in (1, 2):
        raise UsageError("trials must be positive and max_dim 1 or 2")
    rng = np.random.default_rng(int(cfg["seed"]))
    checks = 0
    start = time.perf_counter()
    for trial in range(int(cfg["trials"])):
        B = random_instance(rng, int(cfg["T"]), int(cfg["L"]), int(cfg["vertices"]), int(cfg["max_dim"]))
        n, bad = cross_check(B)
        checks += n
        if bad:
            dump = Path(args.dump or "oracle_failure.json")
            dump.write_text(json.dumps({"trial": trial, "mismatches": bad, "bifiltration": B.to_json(
                _meta("oracle-check", cfg))}, indent=1))
            print(f"FAIL trial {trial}: {len(bad)} mismatches; instance written to {dump}")
            return 1
    print(f"PASS {cfg['trials']} instances, {checks} rank comparisons, 0 mismatches "
          f"({time.perf_counter() - start:.1f}s)")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _merged(args, ("m", "n", "levels", "centers", "width", "overlap", "seed", "mode"),
                  {"m": 28, "n": 50, "levels": 8, "centers": "6x6", "width": None, "overlap": None, "seed": 0,
                   "mode": POINTCLOUDS})
    rows, cols = _lattice(cfg["centers"])
    config = WindowConfig(mode=cfg["mode"], width=cfg["width"], overlap=cfg["overlap"], levels=int(cfg["levels"]),
                          centers=(rows, cols), seed=int(cfg["seed"]))
    ds = synthetic_dataset(1, int(cfg["m"]), int(cfg["n"]), seed=int(cfg["seed"]))
    t0 = time.perf_counter()
    B = sample_bifiltration(ds.samples[0].data, config, 0)
    t1 = time.perf_counter()
    centers = sample_centers(B.width, B.L, rows, cols)
    result = landscape(B, centers, config.ks, config.degrees, jobs=args.jobs)
    t2 = time.perf_counter()
    report = {
        "T": B.T, "L": B.L, "grid": [B.width, B.L], "simplices": len(B.simplices), "centers": len(centers),
        "build_seconds": round(t1 - t0, 4), "landscape_seconds": round(t2 - t1, 4),
        "seconds_per_center": round((t2 - t1) / len(centers), 4), "total_seconds": round(t2 - t0, 4),
        "jobs": args.jobs, "metadata": {**_meta("bench", cfg), "config_hash": result.metadata["config_hash"]},
    }
    _emit(json.dumps(report, indent=1) + "\n", args.output)
    return 0


def _window_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=[GRAPHS, POINTCLOUDS])
    p.add_argument("--width", type=int, help="window width (default depends on mode)")
    p.add_argument("--overlap", type=int)
    p.add_argument("--percentile", help="edge retention range LO,HI for graphs")
    p.add_argument("--levels", type=int)
    p.add_argument("--max-dim", dest="max_dim", type=int)
    p.add_argument("--ks")
    p.add_argument("--degrees")
    p.add_argument("--centers", help="center lattice RxC")
    p.add_argument("--normalize", action="store_true", default=None, help="z-normalize channels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zzgril", description="Zz-Gril landscapes of time-varying data")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: ZZGRIL_JOBS or all cores)")
    common.add_argument("--seed", type=int)
    common.add_argument("-o", "--output", help="output path (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="build a bi-filtration from a sample CSV, dataset or JSON")
    p.add_argument("input")
    p.add_argument("--sample", help="sample id when the input is a dataset directory")
    _window_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("gril", parents=[common], help="landscape values of a bi-filtration JSON")
    p.add_argument("input")
    p.add_argument("--centers", help="center lattice RxC (default 6x6)")
    p.add_argument("--ks", help="comma-separated ranks (default 1,2)")
    p.add_argument("--degrees", help="comma-separated degrees (default 0,1)")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--emit-heatmap", dest="emit_heatmap", metavar="DIR")
    p.set_defaults(func=cmd_gril)

    p = sub.add_parser("featurize", parents=[common], help="feature CSV for a dataset directory")
    p.add_argument("input")
    _window_flags(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("oracle-check", parents=[common], help="fast ranks against the brute-force oracle")
    p.add_argument("--trials", type=int)
    p.add_argument("--T", dest="T", type=int)
    p.add_argument("--L", dest="L", type=int)
    p.add_argument("--vertices", type=int)
    p.add_argument("--max-dim", dest="max_dim", type=int)
    p.add_argument("--dump", help="where to write a failing instance")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("bench", parents=[common], help="time one synthetic sample")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--centers")
    p.add_argument("--width", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--mode", choices=[GRAPHS, POINTCLOUDS])
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs is None:
            args.jobs = _default_jobs()
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        return args.func(args)
    except ParameterError as exc:
        print(f"zzgril: error: {exc}", file=sys.stderr)
        return 2
    except (ZzGrilError, OSError) as exc:
        print(f"zzgril: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        # malformed config values
        print(f"zzgril: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
