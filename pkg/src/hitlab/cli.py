"""Command-line driver: ``hitlab <kind> [--config F] [--seed S] [--out D] [--jobs N]``.

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 resource error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import platform
import sys
import time
from importlib import metadata, resources
from pathlib import Path

import jsonschema

from . import __version__, experiments
from .errors import (
    ConfigError, DegenerateBallError, DepthError, HitlabError, HorizonError,
    InconsistentInputsError, ResourceError, UnsupportedSystemError,
)

log = logging.getLogger("hitlab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
KINDS = list(experiments.RUNNERS)


# ---------------------------------------------------------------------------
# deterministic serialization

def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with sorted keys and floats at 17 significant digits.

    Non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``.
    """
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt_float(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if hasattr(obj, "item"):            # numpy scalars
        return dumps(obj.item(), indent)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if hasattr(obj, "value"):           # enums
        return dumps(obj.value, indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def table_csv(table: experiments.Table, kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# hitlab {__version__} {kind}/{table.name}: {table.note or 'see columns'}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# configuration

def load_schema() -> dict:
    return json.loads(resources.files("hitlab").joinpath("schemas/config.schema.json").read_text())


def validate(config: dict) -> None:
    v = jsonschema.Draft7Validator(load_schema())
    errs = sorted(v.iter_errors(config), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errs:
        # the deepest error names the offending field most precisely
        e = max(errs, key=lambda e: len(e.absolute_path))
        path = tuple(e.absolute_path)
        where = "/".join(map(str, path)) or "<root>"
        raise ConfigError(f"{where}: {e.message}", path)


def _parse_set(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}", ("params",))
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def build_config(kind: str, args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if cfg.get("kind", kind) != kind:
        raise ConfigError(f"config kind {cfg['kind']!r} does not match subcommand {kind!r}", ("kind",))
    cfg["kind"] = kind
    cfg.setdefault("params", {})
    cfg["params"].update(_parse_set(args.set))
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if args.jobs is not None:
        cfg["jobs"] = args.jobs
    cfg.setdefault("seed", 0)
    cfg.setdefault("jobs", 1)
    cfg.setdefault("out", f"out/{kind}")
    validate(cfg)
    return cfg


# ---------------------------------------------------------------------------
# running

def write_outcome(out: Path, cfg: dict, outcome: experiments.Outcome, prefix: str = "") -> dict:
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    stem = prefix + outcome.kind.replace("-", "_")
    summary = {"kind": outcome.kind, "passed": outcome.passed, "seed": cfg["seed"], "summary": outcome.summary}
    text = dumps(summary) + "\n"
    (out / f"{stem}.json").write_text(text)
    files[f"{stem}.json"] = hashlib.sha256(text.encode()).hexdigest()
    for t in sorted(outcome.tables, key=lambda t: t.name):
        body = table_csv(t, outcome.kind)
        name = f"{prefix}{t.name}.csv"
        (out / name).write_text(body)
        files[name] = hashlib.sha256(body.encode()).hexdigest()
    return files


def config_hash(cfg: dict) -> str:
    canon = {k: v for k, v in cfg.items() if k not in ("out", "jobs")}
    return hashlib.sha256(dumps(canon).encode()).hexdigest()


def versions() -> dict:
    import gmpy2
    import mpmath
    import numpy
    import scipy
    from . import kernels
    return {"hitlab": __version__, "python": platform.python_version(), "numpy": numpy.__version__,
            "scipy": scipy.__version__, "mpmath": mpmath.__version__, "gmpy2": gmpy2.version(),
            "jsonschema": metadata.version("jsonschema"), "kernel_backend": kernels.DEFAULT}


def run_config(cfg: dict, prefix: str = "") -> tuple[experiments.Outcome, dict, float]:
    runner = experiments.RUNNERS[cfg["kind"]]
    t0 = time.perf_counter()
    outcome = runner(cfg["params"], int(cfg["seed"]), int(cfg["jobs"]))
    runtime = time.perf_counter() - t0
    files = write_outcome(Path(cfg["out"]), cfg, outcome, prefix)
    return outcome, files, runtime


def _exit_for(outcome) -> int:
    return EXIT_FAIL if outcome.passed is False else EXIT_OK


def _batch(kind: str, args) -> int:
    """Run one configuration per JSONL line of ``--batch``; outputs get a line prefix."""
    lines = [ln for ln in Path(args.batch).read_text().splitlines() if ln.strip()]
    base = build_config(kind, argparse.Namespace(**{**vars(args), "batch": None}))
    manifest_files, runtimes, worst = {}, {}, EXIT_OK
    for i, line in enumerate(lines):
        try:
            params = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"batch line {i + 1}: {exc}", ("batch", i)) from None
        cfg = {**base, "params": {**base["params"], **params}}
        validate(cfg)
        outcome, files, rt = run_config(cfg, prefix=f"{i:04d}_")
        manifest_files.update(files)
        runtimes[f"{i:04d}"] = rt
        worst = max(worst, _exit_for(outcome))
    _manifest(Path(base["out"]), base, manifest_files, runtimes)
    return worst


def _manifest(out: Path, cfg: dict, files: dict, runtimes: dict) -> None:
    manifest = {"versions": versions(), "config": {k: v for k, v in cfg.items() if k not in ("jobs", "out")},
                "config_sha256": config_hash(cfg), "files": files}
    (out / "manifest.json").write_text(dumps(manifest) + "\n")
    # wall-clock data stays out of the manifest so repeated runs compare byte for byte
    (out / "runtimes.json").write_text(dumps({k: v for k, v in runtimes.items()}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hitlab", description="Hitting-time experiments for rotations, "
                                "torus translations and reparametrized flows.")
    p.add_argument("--version", action="version", version=f"hitlab {__version__}")
    sub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind, help=f"run the {kind} experiment")
        s.add_argument("--config", help="JSON configuration file")
        s.add_argument("--seed", type=int, help="seed for sampled points (overrides config)")
        s.add_argument("--out", help="output directory (overrides config)")
        s.add_argument("--jobs", type=int, help="worker processes (overrides config)")
        s.add_argument("--set", action="append", metavar="KEY=JSON", help="override one parameter")
        s.add_argument("--batch", help="JSONL file, one parameter object per line")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.batch:
            return _batch(args.kind, args)
        cfg = build_config(args.kind, args)
        outcome, files, rt = run_config(cfg)
        _manifest(Path(cfg["out"]), cfg, files, {"total": rt})
        status = "PASS" if outcome.passed else ("FAIL" if outcome.passed is False else "DONE")
        print(f"{args.kind}: {status} -> {cfg['out']}")
        return _exit_for(outcome)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateBallError, InconsistentInputsError, UnsupportedSystemError, DepthError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceError, HorizonError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except HitlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
