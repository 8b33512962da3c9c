"""Command-line interface.

    facecover solve --instance fam.json
    facecover homotopy --instance covers.json --out curve.csv

Results go to stdout as JSON (reals with 17 significant digits).  Exit
status is 0 on success, 1 for invalid input and 2 when a solver fails to
converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from facecover import covering, equispace, grid, homotopy
from facecover.errors import FaceCoverError, InvalidFamily, SolverError, ValidationError
from facecover.instance import Instance, load_instance

log = logging.getLogger("facecover")

COMMANDS = ("solve", "cover", "boundary", "homotopy", "t0", "helly", "oracle")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        text = f"{x:.17g}"
        # keep a JSON real looking like a real
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f'"{k}": {_fmt(v)}' for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(doc: dict) -> str:
    """JSON text with every real printed to 17 significant digits."""
    return _fmt(doc) + "\n"


def ordered_family(inst: Instance) -> list:
    """Bodies reordered so that body i contains face i."""
    n = inst.dim
    bodies = inst.bodies
    if len(bodies) != n + 1:
        raise InvalidFamily(f"this command needs exactly {n + 1} sets, got {len(bodies)}")
    if inst.assignment is not None:
        missing = [i for i in range(1, n + 2) if i not in inst.assignment]
        if missing:
            raise InvalidFamily(f"assignment leaves faces {missing} unassigned")
        order = [inst.assignment[i] - 1 for i in range(1, n + 2)]
        if len(set(order)) != n + 1:
            raise InvalidFamily("assignment must use every set once")
        return [bodies[j] for j in order]
    order = covering.face_assignment(inst.simplex, bodies)
    if order is None:
        raise InvalidFamily("no ordering of the sets puts face i inside set i for every i")
    return [bodies[j] for j in order]


def _solve(inst, args, out):
    fam = equispace.HFamily(inst.simplex, ordered_family(inst))
    res = equispace.solve(fam, args.tol)
    out.write(dumps({
        "eps0": res.eps0,
        "v": res.v,
        "distances": res.distances,
        "covering": res.covering,
        "iterations": res.iterations,
    }))


def _coverage(report, out):
    doc = {"covered": report.covered, "mesh": report.mesh, "value": report.value}
    if report.witness_uncovered is not None:
        doc["witness_uncovered"] = report.witness_uncovered
    out.write(dumps(doc))


def _cover(inst, args, out):
    _coverage(covering.simplex_coverage(inst.simplex, inst.bodies, args.tol, args.grid_depth), out)


def _boundary(inst, args, out):
    _coverage(covering.boundary_coverage(inst.simplex, inst.bodies, args.tol, args.grid_depth), out)


def _t0(inst, args, out):
    t0 = homotopy.find_t0(inst.simplex, ordered_family(inst), args.tol, args.tol)
    out.write(dumps({"t0": t0}))


def _homotopy(inst, args, out):
    covers = ordered_family(inst)
    t0 = homotopy.find_t0(inst.simplex, covers, args.tol, args.tol)
    samples = homotopy.default_samples(t0, args.t_samples)
    curve = homotopy.epsilon_curve(inst.simplex, covers, samples, t0=t0, tol=args.tol)
    summary = dumps({"t0": curve.t0, "delta0": curve.delta0})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(curve.to_csv())
        out.write(summary)
    else:
        # CSV owns stdout; the summary goes to stderr
        out.write(curve.to_csv())
        sys.stderr.write(summary)


def _helly(inst, args, out):
    fam = covering.FaceCoveringFamily(inst.simplex, inst.bodies, inst.assignment)
    res = covering.helly_criterion(fam, args.tol, args.grid_depth)
    doc = {"intersects": res.intersects}
    if res.witness is not None:
        doc["witness"] = res.witness
    if res.counterexample is not None:
        doc["counterexample"] = list(res.counterexample)
    out.write(dumps(doc))


def _oracle(inst, args, out):
    g = grid.grid(inst.simplex, args.grid_depth)
    dist = grid.distance_matrix(g.points, inst.bodies)
    nearest = dist.min(axis=1)
    farthest = dist.max(axis=1)
    i, j = int(np.argmax(nearest)), int(np.argmin(farthest))
    out.write(dumps({
        "maximin": float(nearest[i]),
        "minimax": float(farthest[j]),
        "argmax": g.points[i],
        "argmin": g.points[j],
        "mesh": g.mesh,
    }))


HANDLERS = {
    "solve": _solve,
    "cover": _cover,
    "boundary": _boundary,
    "homotopy": _homotopy,
    "t0": _t0,
    "helly": _helly,
    "oracle": _oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facecover", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--instance", required=True, help="JSON instance file")
    parser.add_argument("--tol", type=float, default=1e-6, help="solver tolerance (default 1e-6)")
    parser.add_argument("--grid-depth", type=int, default=128, help="lattice depth (default 128)")
    parser.add_argument("--t-samples", type=int, default=32, help="uniform homotopy samples (default 32)")
    parser.add_argument("--out", help="output file (homotopy CSV, otherwise the JSON result)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def run_command(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = out or sys.stdout
    try:
        if args.tol <= 0:
            raise ValidationError("--tol must be positive")
        if args.grid_depth < 1:
            raise ValidationError("--grid-depth must be >= 1")
        if args.t_samples < 1:
            raise ValidationError("--t-samples must be >= 1")
        try:
            inst = load_instance(args.instance)
        except OSError as exc:
            raise ValidationError(f"cannot read {args.instance}: {exc.strerror}") from exc
        if args.out and args.command != "homotopy":
            with open(args.out, "w", encoding="utf-8") as fh:
                HANDLERS[args.command](inst, args, fh)
        else:
            HANDLERS[args.command](inst, args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except FaceCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
