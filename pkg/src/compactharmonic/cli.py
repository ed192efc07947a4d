"""Command-line front end.

Exit codes: 0 on success or a definite verdict, 2 when a classification is
Indeterminate (or an acceptance criterion fails), 1 on any error.  Outputs
go to ``--output`` (``.csv`` selects CSV, anything else JSON) or to stdout;
every output carries the scene hash, seed, schedule and package version,
and contains nothing run-dependent, so identical invocations produce
identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__
from .geometry import BallScene, as_point, domain_schedule, load_scene, scene_hash

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2


class CliError(Exception):
    pass


def _parse_schedule(text: str) -> tuple[float, float, int]:
    try:
        e0, ratio, count = text.split(":")
        out = (float(e0), float(ratio), int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"schedule must be e0:ratio:count, got {text!r}") from exc
    if not (out[0] > 0 and 0 < out[1] < 1 and out[2] >= 1):
        raise argparse.ArgumentTypeError(f"schedule needs e0 > 0, 0 < ratio < 1, count >= 1, got {text!r}")
    return out


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compactharmonic",
                                     description="Harmonic measure and fine-boundary tools for ball-CSG compact sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mc=True):
        p.add_argument("--scene", required=True, help="scene JSON file")
        p.add_argument("--point", action="append", default=[], help="comma-separated coordinates; repeatable")
        p.add_argument("--points-file", help="text file with one comma-separated point per line")
        p.add_argument("--output", help="output path; .csv for CSV, otherwise JSON (default: stdout JSON)")
        p.add_argument("--tolerance", type=_positive_float, help="override the 3-sigma tolerance")
        if mc:
            p.add_argument("--schedule", type=_parse_schedule, default=(0.1, 0.5, 3), help="e0:ratio:count")
            p.add_argument("--samples", type=_positive_int, default=10_000)
            p.add_argument("--absorb-delta", type=_positive_float, default=1e-3)
            p.add_argument("--seed", type=int, help="required: Monte Carlo runs never draw fresh entropy")

    common(sub.add_parser("classify", help="fine-boundary classification of points"), mc=False)
    common(sub.add_parser("hmeasure", help="harmonic measure of K at a point"))
    p = sub.add_parser("solve", help="Dirichlet solution at evaluation points")
    common(p)
    p.add_argument("--data", default="outer1", help="boundary data: coordinate, outer1 or radial")
    p = sub.add_parser("envelope", help="discrete envelope of a target by primal and dual LP")
    common(p)
    p.add_argument("--data", default="one_minus_r2", help="target: one_minus_r2, rho or coordinate")
    p.add_argument("--grid-size", type=_positive_int, default=2048)
    p = sub.add_parser("report", help="run the acceptance suite")
    p.add_argument("--suite", default="acceptance", choices=["acceptance"])
    p.add_argument("--output", help="output path for the JSON report")
    return parser


def _points(args, scene: BallScene) -> np.ndarray:
    pts = [as_point([float(v) for v in s.split(",")], scene.dimension) for s in args.point]
    if args.points_file:
        with open(args.points_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    pts.append(as_point([float(v) for v in line.replace(",", " ").split()], scene.dimension))
    if not pts:
        raise CliError("no evaluation points: give --point or --points-file")
    return np.array(pts)


def _header(args, scene: BallScene) -> dict:
    meta = {"version": __version__, "command": args.command, "scene_hash": scene_hash(scene)}
    if getattr(args, "schedule", None) is not None:
        meta["seed"] = args.seed
        meta["schedule"] = list(args.schedule)
        meta["samples"] = args.samples
        meta["absorb_delta"] = args.absorb_delta
    return meta


def _config(args):
    from .wos import WalkConfig
    if args.seed is None:
        raise CliError("--seed is required for Monte Carlo commands")
    return WalkConfig(absorb_delta=args.absorb_delta, samples=args.samples, seed=args.seed)


def _dump_json(obj) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(f"cannot serialise {type(o).__name__}")
    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def _csv_header(meta: dict) -> str:
    return "# " + ",".join(f"{k}={':'.join(map(repr, v)) if isinstance(v, list) else v}" for k, v in meta.items()) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _wants_csv(args) -> bool:
    return bool(args.output) and args.output.lower().endswith(".csv")


# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    from .fineboundary import FineVerdict, classify_fine
    scene = load_scene(args.scene)
    results = [classify_fine(scene, z) for z in _points(args, scene)]
    meta = _header(args, scene)
    if _wants_csv(args):
        rows = ["point,verdict,method"]
        rows += [f"{' '.join(repr(float(v)) for v in z)},{r.verdict.value},{r.method}"
                 for z, r in zip(_points(args, scene), results)]
        _write(args.output, _csv_header(meta) + "\n".join(rows) + "\n")
    else:
        body = {"meta": meta, "results": [dict(point=z.tolist(), **r.to_dict())
                                          for z, r in zip(_points(args, scene), results)]}
        _write(args.output, _dump_json(body))
    for z, r in zip(_points(args, scene), results):
        print(f"{','.join(f'{v:g}' for v in z)}: {r.verdict.value}", file=sys.stderr)
    return EXIT_INDETERMINATE if any(r.verdict is FineVerdict.INDETERMINATE for r in results) else EXIT_OK


def cmd_hmeasure(args) -> int:
    from .dirichlet import harmonic_measure
    from .measure import measure_to_csv
    scene = load_scene(args.scene)
    cfg = _config(args)
    pts = _points(args, scene)
    if len(pts) != 1:
        raise CliError("hmeasure takes exactly one point")
    mu, rep = harmonic_measure(scene, pts[0], domain_schedule(scene, *args.schedule), cfg)
    meta = _header(args, scene)
    if _wants_csv(args):
        extra = {k: v for k, v in meta.items() if k not in ("seed", "absorb_delta")}
        _write(args.output, measure_to_csv(mu, {k: (tuple(v) if isinstance(v, list) else v) for k, v in extra.items()}))
    else:
        _write(args.output, _dump_json({"meta": meta, "point": pts[0].tolist(),
                                        "provenance": mu.provenance, "report": rep.to_dict()}))
    return EXIT_OK


def cmd_solve(args) -> int:
    from .dirichlet import named_data, solve
    scene = load_scene(args.scene)
    cfg = _config(args)
    phi = named_data(args.data, scene)
    sol = solve(scene, phi, _points(args, scene), domain_schedule(scene, *args.schedule), cfg)
    meta = dict(_header(args, scene), data=args.data)
    if _wants_csv(args):
        _write(args.output, _csv_header(meta) + sol.to_table().replace("\t", ";"))
    else:
        _write(args.output, _dump_json({"meta": meta, "solution": sol.to_dict()}))
    for p in sol.points:
        print(f"{','.join(f'{v:g}' for v in p.point)}: {p.value:.6f} ± {p.stderr:.2g}", file=sys.stderr)
    return EXIT_OK


def _envelope_target(name: str, scene: BallScene):
    from .dirichlet import coordinate_data
    c0 = scene.outer_center
    R = scene.outer.radius
    if name == "one_minus_r2":
        return lambda x: 1 - np.sum((np.asarray(x) - c0) ** 2, axis=-1) / R**2
    if name == "rho":
        return lambda x: np.sum((np.asarray(x) - c0) ** 2, axis=-1)
    if name in ("coordinate", "x1"):
        return coordinate_data(0)
    raise CliError(f"unknown envelope target {name!r}; choose one_minus_r2, rho or coordinate")


def cmd_envelope(args) -> int:
    from .dirichlet import harmonic_measure
    from .edwards import bracket, envelope_dual, envelope_primal, export_measure_csv, make_instance
    from .jensen import default_family
    scene = load_scene(args.scene)
    cfg = _config(args)
    pts = _points(args, scene)
    if len(pts) != 1:
        raise CliError("envelope takes exactly one point")
    target = _envelope_target(args.data, scene)
    inst = make_instance(scene, pts[0], target, grid_size=args.grid_size, seed=args.seed, target_id=args.data)
    primal, dual = envelope_primal(inst), envelope_dual(inst)
    omega, _ = harmonic_measure(scene, pts[0], domain_schedule(scene, *args.schedule), cfg,
                                family=default_family(scene, 1)[:2])
    br = bracket(inst, target, omega, primal, dual)
    meta = dict(_header(args, scene), data=args.data, grid_points=int(inst.grid.shape[0]))
    if _wants_csv(args):
        _write(args.output, export_measure_csv(inst, primal))
    else:
        _write(args.output, _dump_json({"meta": meta, "primal": primal.to_dict(), "dual": dual.to_dict(),
                                        "bracket": br.to_dict()}))
    print(f"primal {primal.value:.9g} dual {dual.value:.9g} bracket [{br.primal:.6g}, {br.harmonic_upper:.6g}]",
          file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    from . import acceptance
    results = []
    for key in acceptance.CRITERIA:
        res = acceptance.run([key])[0]
        print(res.line(), flush=True)
        results.append(res)
    if args.output:
        _write(args.output, _dump_json({"version": __version__, "suite": args.suite,
                                        "results": [r.to_dict() for r in results]}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INDETERMINATE


COMMANDS = {"classify": cmd_classify, "hmeasure": cmd_hmeasure, "solve": cmd_solve,
            "envelope": cmd_envelope, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError, TypeError, CliError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
