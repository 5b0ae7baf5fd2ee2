"""Command-line front end.

Grids travel as LCGRID v1 text files, matrices/maps/specs as JSON, sweep and
demo reports as CSV, renders as 8-bit PGM.  Exit codes: 0 success, 1 contract
violation inside an operation (error name on stderr), 2 bad usage or
unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import families, suites
from .errors import DimensionMismatch, LogconeError
from .grid import (
    check_log_concave,
    is_isotropic,
    isotropic_constant,
    moments,
    read_lcgrid,
    write_lcgrid,
)
from .lipschitz import directional_lipschitz, lipschitz_scaling_product
from .measure_ops import LinearMap, convolve, isotropize, project, symmetrize
from .spectra import split_covariance, split_request_from_json, split_result_to_json

SWEEP_SPLITS = [round(0.1 * k, 10) for k in range(1, 10)]


@dataclass
class CommandResult:
    exit_code: int
    outputs: list[str] = field(default_factory=list)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logcone",
                                description="log-concave density toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a family density")
    g.add_argument("family", choices=families.FAMILY_NAMES)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--h", type=float, required=True)
    g.add_argument("--width", type=float, nargs="+")
    g.add_argument("--sigma", type=float, nargs="+")
    g.add_argument("--rate", type=float, nargs="+")
    g.add_argument("--radius", type=float)
    g.add_argument("--halfwidth", type=float, nargs="+")
    g.add_argument("--centered", action="store_true")
    g.add_argument("-o", dest="out", required=True)

    s = sub.add_parser("symmetrize", help="per-line symmetric rearrangement")
    s.add_argument("-i", dest="inp", required=True)
    s.add_argument("--axis", type=int, required=True)
    s.add_argument("-o", dest="out", required=True)

    c = sub.add_parser("convolve", help="convolve two or more densities")
    c.add_argument("-i", dest="inputs", action="append", required=True)
    c.add_argument("-o", dest="out", required=True)

    i = sub.add_parser("isotropize", help="whiten to isotropic position")
    i.add_argument("-i", dest="inp", required=True)
    i.add_argument("-o", dest="out", required=True)
    i.add_argument("--map", dest="map_out")

    pr = sub.add_parser("project", help="orthogonal projection of the measure")
    pr.add_argument("-i", dest="inp", required=True)
    pr.add_argument("--dirs", required=True, help="JSON file of directions")
    pr.add_argument("-o", dest="out", required=True)

    st = sub.add_parser("stats", help="moments + isotropic constant as JSON")
    st.add_argument("-i", dest="inp", required=True)

    ch = sub.add_parser("check", help="log-concavity report")
    ch.add_argument("-i", dest="inp", required=True)
    ch.add_argument("--directions", default="axes", choices=["axes", "all"])
    ch.add_argument("--tol", type=float, default=1e-7)

    li = sub.add_parser("lipschitz", help="directional Lipschitz report")
    li.add_argument("-i", dest="inp", required=True)
    li.add_argument("--axis", type=int, required=True)
    li.add_argument("--refined", help="same density on a refined grid")

    sc = sub.add_parser("split-cov", help="split an identity decomposition")
    sc.add_argument("-i", dest="inp", required=True)

    sw = sub.add_parser("sweep-lipschitz", help="variance sweep CSV")
    sw.add_argument("--family", dest="family", action="append", required=True)
    sw.add_argument("--dim", type=int, required=True)
    sw.add_argument("--axis", type=int, default=0)
    sw.add_argument("--h", type=float, default=None)
    sw.add_argument("-o", dest="out", required=True)

    de = sub.add_parser("demo", help="demonstration pipelines")
    desub = de.add_subparsers(dest="demo", required=True)
    clt = desub.add_parser("clt", help="convolution powers of uniform vs Gaussian")
    clt.add_argument("--n", type=int, required=True)
    clt.add_argument("--h", type=float, default=0.005)
    clt.add_argument("-o", dest="out", required=True)
    par = desub.add_parser("parallelotope", help="closure-sequence box detection")
    par.add_argument("--config", required=True)
    par.add_argument("-o", dest="out", required=True)

    re = sub.add_parser("render", help="2-D grayscale PGM dump")
    re.add_argument("-i", dest="inp", required=True)
    re.add_argument("-o", dest="out", required=True)

    su = sub.add_parser("suite", help="randomized spectral verification suites")
    su.add_argument("--seed", type=int, default=0)
    su.add_argument("--trials", type=int, default=1000)

    return p


def _gen_params(args) -> dict:
    params = {}
    for key in ("width", "sigma", "rate", "halfwidth"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value[0] if len(value) == 1 else list(value)
    if args.radius is not None:
        params["radius"] = args.radius
    if args.centered:
        params["centered"] = True
    return params


def _load_directions(path) -> np.ndarray:
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        obj = obj["directions"]
    return np.asarray(obj, dtype=np.float64)


def _stats_json(g) -> dict:
    ms = moments(g)
    iso = isotropic_constant(g) if is_isotropic(g) else None
    return {
        "mean": ms.mean.tolist(),
        "cov": ms.cov.entries.tolist(),
        "sup_density": ms.sup_density,
        "mass": ms.mass,
        "isotropic_constant": iso,
    }


def _write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _write_pgm(g, path) -> None:
    if g.dim != 2:
        raise DimensionMismatch("render needs a 2-D grid")
    sup = g.values.max()
    pix = np.round(g.values / sup * 255.0).astype(int)
    with open(path, "w") as fh:
        fh.write(f"P2\n{g.shape[1]} {g.shape[0]}\n255\n")
        for row in pix:
            fh.write(" ".join(str(v) for v in row))
            fh.write("\n")


def _sweep_rows(family_x, family_y, dim, axis, h) -> list[dict]:
    if h is None:
        h = 0.005 if dim == 1 else 0.05
    rows = []
    for var_x in SWEEP_SPLITS:
        x = families.member_with_variance(family_x, dim, h, var_x)
        y = families.member_with_variance(family_y, dim, h, 1.0 - var_x)
        r = lipschitz_scaling_product(x, y, axis)
        rows.append({
            "family": f"{family_x}+{family_y}",
            "dim": dim,
            "axis": axis,
            "varX": var_x,
            "lipschitz": r["lipschitz"],
            "product": r["product"],
        })
    return rows


def _dispatch(args) -> CommandResult:
    if args.command == "gen":
        spec = families.FamilySpec(args.family, args.dim, args.h, _gen_params(args))
        write_lcgrid(families.generate(spec), args.out)
        return CommandResult(0, [args.out])

    if args.command == "symmetrize":
        write_lcgrid(symmetrize(read_lcgrid(args.inp), args.axis), args.out)
        return CommandResult(0, [args.out])

    if args.command == "convolve":
        if len(args.inputs) < 2:
            print("convolve needs at least two -i inputs", file=sys.stderr)
            return CommandResult(2)
        grids = [read_lcgrid(p) for p in args.inputs]
        out = grids[0]
        for g in grids[1:]:
            out = convolve(out, g)
        write_lcgrid(out, args.out)
        return CommandResult(0, [args.out])

    if args.command == "isotropize":
        iso, amap = isotropize(read_lcgrid(args.inp))
        write_lcgrid(iso, args.out)
        outputs = [args.out]
        if args.map_out:
            with open(args.map_out, "w") as fh:
                json.dump(amap.to_json(), fh, indent=1)
            outputs.append(args.map_out)
        return CommandResult(0, outputs)

    if args.command == "project":
        dirs = _load_directions(args.dirs)
        write_lcgrid(project(read_lcgrid(args.inp), dirs), args.out)
        return CommandResult(0, [args.out])

    if args.command == "stats":
        print(json.dumps(_stats_json(read_lcgrid(args.inp)), indent=1))
        return CommandResult(0)

    if args.command == "check":
        directions = "axes" if args.directions == "axes" else "axes+diagonals"
        ok, worst = check_log_concave(read_lcgrid(args.inp),
                                      directions=directions, tol=args.tol)
        print(json.dumps({"log_concave": ok,
                          "worst_violation": worst if math.isfinite(worst) else "inf",
                          "directions": directions, "tol": args.tol}))
        return CommandResult(0)

    if args.command == "lipschitz":
        refined = read_lcgrid(args.refined) if args.refined else None
        rep = directional_lipschitz(read_lcgrid(args.inp), args.axis, refined)
        print(json.dumps({"axis": args.axis,
                          "direction": rep.direction.tolist(),
                          "constant": rep.constant,
                          "discontinuity_flag": rep.discontinuity_flag}))
        return CommandResult(0)

    if args.command == "split-cov":
        with open(args.inp) as fh:
            mats, eps = split_request_from_json(json.load(fh))
        print(json.dumps(split_result_to_json(split_covariance(mats, eps)), indent=1))
        return CommandResult(0)

    if args.command == "sweep-lipschitz":
        if len(args.family) != 2:
            print("sweep-lipschitz needs exactly two --family names", file=sys.stderr)
            return CommandResult(2)
        rows = _sweep_rows(args.family[0], args.family[1], args.dim, args.axis, args.h)
        _write_csv(args.out, ["family", "dim", "axis", "varX", "lipschitz", "product"],
                   rows)
        return CommandResult(0, [args.out])

    if args.command == "demo" and args.demo == "clt":
        rows = families.clt_diagonal_table(args.n, args.h)
        _write_csv(args.out, ["n", "sup_distance", "oracle_dev"], rows)
        return CommandResult(0, [args.out])

    if args.command == "demo" and args.demo == "parallelotope":
        with open(args.config) as fh:
            cfg = json.load(fh)
        seeds = [families.FamilySpec.from_json(s) for s in cfg["seeds"]]
        maps = [LinearMap.from_json(m) for m in cfg.get("maps", [])]
        rows = families.closure_sequence_demo(seeds, maps, int(cfg.get("steps", 1)))
        _write_csv(args.out, ["step", "is_uniform_box", "sup_distance"], rows)
        return CommandResult(0, [args.out])

    if args.command == "render":
        _write_pgm(read_lcgrid(args.inp), args.out)
        return CommandResult(0, [args.out])

    if args.command == "suite":
        reports = [
            suites.run_mixed_sum_suite(seed=args.seed, trials=args.trials),
            suites.run_split_suite(seed=args.seed, trials=args.trials),
        ]
        print(json.dumps(reports, indent=1))
        ok = all(r["pass"] for r in reports)
        return CommandResult(0 if ok else 1)

    raise AssertionError(f"unhandled command {args.command!r}")


def run(argv) -> CommandResult:
    """Parse and execute; never raises for expected failure modes."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandResult(int(exc.code or 0))
    try:
        return _dispatch(args)
    except LogconeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return CommandResult(1)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return CommandResult(2)


def main() -> None:
    sys.exit(run(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
