"""Command-line front end: ``fmdkit decompose | spiral | probe``.

Exit codes: 0 success, 1 I/O or file-format error, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .epcheck import FMDSystem, probe_additivity, probe_homogeneity, probe_time_invariance, verify_sequence
from .filters import FilterSpec
from .fixtures import multitone, random_signal, two_tone
from .fmd import ALGORITHMS, decompose
from .io import SignalFormatError, format_float, read_signal, write_signal, write_spiral_csv, write_spiral_svg
from .signal import energy
from .spiral import STEERING_RULES, theodorus_2d, theodorus_3d, theodorus_nd

SCHEMA_VERSION = 1
ALGORITHM_IDS = {"1": "plain", "2": "linoep_residue_side", "3": "linoep_filter_side"}
SYSTEM_IDS = {"alg1": "1", "alg2": "2", "alg3": "3"}
ENERGY_TABLE_HEADER = "i,E_i,ΣE_i,% error"


class UsageError(ValueError):
    """Invalid flag combination; maps to exit code 2."""


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _add_filter_flags(p: argparse.ArgumentParser, stages_required: bool) -> None:
    p.add_argument("--filter", required=True, choices=["gaussian", "ideal", "movavg"])
    p.add_argument("--stages", type=_positive_int, required=stages_required, default=None if stages_required else 6)
    p.add_argument("--sigma0", type=float, help="first-stage Gaussian sigma in bins (halves each stage)")
    p.add_argument("--cutoffs", type=_float_list, help="strictly increasing normalized cutoffs, one per stage")
    p.add_argument("--windows", type=_int_list, help="odd moving-average windows, one per stage")


def build_filter(args, shape) -> FilterSpec:
    n = args.stages
    try:
        if args.filter == "gaussian":
            if args.sigma0 is not None and not args.sigma0 > 0:
                raise UsageError("--sigma0 must be positive")
            return FilterSpec.gaussian(shape, n, args.sigma0)
        if args.filter == "ideal":
            if args.cutoffs is None:
                return FilterSpec.ideal_octaves(n)
            if len(args.cutoffs) != n:
                raise UsageError(f"--cutoffs has {len(args.cutoffs)} values but --stages is {n}")
            return FilterSpec.ideal(args.cutoffs)
        windows = args.windows if args.windows is not None else FilterSpec.moving_octaves(n).schedule
        if len(windows) != n:
            raise UsageError(f"--windows has {len(windows)} values but --stages is {n}")
        if max(windows) > min(shape):
            raise UsageError(f"window {int(max(windows))} exceeds signal size {min(shape)}")
        return FilterSpec.moving(windows)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _gram_for_report(gram: np.ndarray):
    if np.all(gram.imag == 0):
        return [[float(v) for v in row] for row in gram.real]
    return [[[float(v.real), float(v.imag)] for v in row] for row in gram]


def energy_table(ledger) -> str:
    """Rows of component index, its energy, running sum and running % error."""
    lines = [ENERGY_TABLE_HEADER]
    total = ledger.total_energy
    parts: list[float] = []
    for i, e in enumerate(ledger.component_energies, start=1):
        parts.append(e)
        cum = math.fsum(parts)
        pct = (total - cum) / total * 100 if total > 0 else 0.0
        lines.append(f"{i},{format_float(e)},{format_float(cum)},{format_float(pct)}")
    lines.append(f"x,{format_float(total)},,")
    return "\n".join(lines) + "\n"


def cmd_decompose(args) -> int:
    t0 = time.perf_counter()
    x = read_signal(args.input, args.format)
    spec = build_filter(args, x.shape)
    algorithm = ALGORITHM_IDS[args.algorithm]
    t1 = time.perf_counter()
    result = decompose(x, spec, args.stages, algorithm)
    t2 = time.perf_counter()

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    csv_fmt = "csv1d" if x.ndim == 1 else "csv2d"
    width = max(2, len(str(len(result.components))))
    comp_entries = []
    for i, comp in enumerate(result.components, start=1):
        stem = f"component_{i:0{width}d}"
        entry = {"index": i, "csv": f"{stem}.csv", "energy": result.ledger.component_energies[i - 1]}
        write_signal(comp, out / entry["csv"], csv_fmt)
        if x.ndim == 2:
            entry["pgm"] = f"{stem}.pgm"
            offset, scale = write_signal(comp, out / entry["pgm"], "pgm")
            entry["display_offset"] = offset
            entry["display_scale"] = scale
        comp_entries.append(entry)
    (out / "energy_table.csv").write_text(energy_table(result.ledger), encoding="utf-8", newline="\n")

    verdict = verify_sequence(result.components)
    residuals = result.telescoping_residuals()
    report = {
        "schema": SCHEMA_VERSION,
        "command": "decompose",
        "input": {"path": str(args.input), "format": args.format, "shape": list(x.shape), "energy": energy(x)},
        "algorithm": {"id": int(args.algorithm), "name": algorithm},
        "filter": spec.to_dict(),
        "stages": {"requested": args.stages, "completed": result.stages},
        "alphas": list(result.alphas),
        "components": comp_entries,
        "energy_table": "energy_table.csv",
        "ledger": result.ledger.to_dict(),
        "orthogonality": {
            "max_telescoping_residual": max(residuals, default=0.0),
            "max_pairwise_offdiagonal": result.max_pairwise_offdiagonal(),
            "gram": _gram_for_report(result.gram),
        },
        "verdicts": {"sequence": verdict.to_dict()},
        "warnings": list(result.warnings),
    }
    if args.timing:
        report["timing"] = {"read_s": t1 - t0, "decompose_s": t2 - t1, "total_s": time.perf_counter() - t0}
    report_path = Path(args.report) if args.report else out / "report.json"
    report_path.write_text(dumps(report), encoding="utf-8", newline="\n")
    print(f"pee = {format_float(result.ledger.pee_percent)} %  ({len(result.components)} components -> {out})")
    return 0


def cmd_spiral(args) -> int:
    if args.dims < 2:
        raise UsageError(f"--dims must be >= 2, got {args.dims}")
    if args.steps < 1:
        raise UsageError(f"--steps must be >= 1, got {args.steps}")
    try:
        if args.dims == 2:
            path = theodorus_2d(args.steps)
        elif args.dims == 3:
            path = theodorus_3d(args.steps, math.radians(args.tilt), args.tilt_step)
        else:
            path = theodorus_nd(args.steps, args.dims, args.steering, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_spiral_csv(args.csv, path)
    projection = write_spiral_svg(args.svg, path)
    for w in path.warnings:
        print(f"fmdkit: warning: {w}", file=sys.stderr)
    summary = {
        "schema": SCHEMA_VERSION,
        "command": "spiral",
        "dims": path.dim,
        "steps": path.n_steps,
        "final_norm": float(path.norms()[-1]),
        "projection": projection,
        "warnings": list(path.warnings),
    }
    sys.stdout.write(dumps(summary))
    return 0


def _probe_fixture(args) -> list[np.ndarray]:
    n = args.length
    if args.fixture == "twotone":
        return list(two_tone(n, 5, 50))
    if args.fixture == "multitone":
        return multitone(n)
    rng_seed = 0 if args.seed is None else args.seed
    return [random_signal(n, rng_seed), random_signal(n, rng_seed + 1)]


def cmd_probe(args) -> int:
    if args.length < 4:
        raise UsageError("--length must be at least 4")
    xs = _probe_fixture(args)
    spec = build_filter(args, xs[0].shape)
    system = FMDSystem(ALGORITHM_IDS[SYSTEM_IDS[args.system]], spec, name=args.system)
    tol = args.tolerance
    if args.property == "additivity":
        rep = probe_additivity(system, *xs, tolerance=tol)
    elif args.property == "homogeneity":
        rep = probe_homogeneity(system, np.sum(xs, axis=0), args.scale, tolerance=tol)
    else:
        rep = probe_time_invariance(system, np.sum(xs, axis=0), args.shift, tolerance=tol)
    out = {
        "schema": SCHEMA_VERSION,
        "command": "probe",
        "fixture": {"name": args.fixture, "length": args.length, "signals": len(xs),
                    "seed": args.seed if args.fixture == "random" else None},
        "filter": spec.to_dict(),
        "report": rep.to_dict(),
    }
    sys.stdout.write(dumps(out))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fmdkit", description="Filter mode decomposition toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split a signal into components and report their energies")
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=["csv1d", "pgm"])
    p.add_argument("--algorithm", required=True, choices=sorted(ALGORITHM_IDS))
    _add_filter_flags(p, stages_required=True)
    p.add_argument("--out", required=True, help="output directory for components and tables")
    p.add_argument("--report", help="report path (default OUT/report.json)")
    p.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("spiral", help="generate a discrete spiral of Theodorus")
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tilt", type=float, default=-0.25, help="3D only: polar-angle change in degrees")
    p.add_argument("--tilt-step", type=int, default=18, help="3D only: tilt the step after T_K")
    p.add_argument("--steering", choices=STEERING_RULES, default="canonical", help="4D and up")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_spiral)

    p = sub.add_parser("probe", help="test additivity, homogeneity or shift invariance of a decomposition")
    p.add_argument("--system", required=True, choices=sorted(SYSTEM_IDS))
    _add_filter_flags(p, stages_required=False)
    p.add_argument("--property", required=True, choices=["additivity", "homogeneity", "shift"])
    p.add_argument("--fixture", required=True, choices=["twotone", "multitone", "random"])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--length", type=int, default=1024)
    p.add_argument("--scale", type=float, default=2.0, help="homogeneity scale factor")
    p.add_argument("--shift", type=int, default=17, help="circular delay in samples")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SignalFormatError, OSError) as exc:
        print(f"fmdkit: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"fmdkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
