"""Command-line front end.

Subcommands cover divisor I/O, the critical-divisor map and its
inverse, the boundary extension, classification, the lamination table,
the numerical experiments, and figure rendering.  Every command is pure
given its arguments and seed: identical invocations produce
byte-identical JSON/CSV, and SVG differs only in a timestamp comment
that ``--deterministic`` suppresses.

Exit codes: 0 success, 2 precondition violation, 3 numerical failure,
4 I/O or schema error.  Failures print a machine-readable JSON
diagnostic to stderr.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from .blaschke import (critical_divisor, from_zero_divisor,
                       zeros_from_critical)
from .boundary import (DEFAULT_DEPTH, DEFAULT_TOL, boundary_from_json,
                       classify, extend_phi)
from .divisor import (Divisor, divisor_from_json, divisor_to_json)
from .errors import (NumericalError, PreconditionError, SchemaError)
from .experiments import (SweepConfig, multiplier_limit_check,
                          prescribe_distance, verify_cont_orbit,
                          verify_extension_convergence)
from .lamination import lamination_table, ray_pairs, table_csv_rows
from .svgfig import disk_figure, profile_figure

__all__ = [
    "main",
    "cmd_critpts",
    "cmd_invert",
    "cmd_classify",
    "cmd_extend",
    "cmd_lamination",
    "cmd_experiment",
    "cmd_render",
]

LAMINATION_CSV_HEADER = [
    "point_re", "point_im", "level",
    "theta_minus_num", "theta_minus_den",
    "theta_plus_num", "theta_plus_den", "nu",
]


def _load_payload(value: str):
    """Parse an argument that is either inline JSON or a path to a JSON
    file (inline when it starts with ``{`` or ``[``)."""
    text = value.strip()
    if not text.startswith(("{", "[")):
        try:
            with open(value, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read {value!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {value!r}: {exc}") from exc


def _parse_point(obj: object) -> complex:
    """A single point from JSON: a real number, an ``[re, im]`` pair, a
    ``{"re", "im"}`` object, a ``{"angle_turns": t}`` object, or a
    ``"num/den"`` string of turns."""
    if isinstance(obj, (int, float)):
        return complex(float(obj), 0.0)
    if isinstance(obj, str):
        try:
            theta = Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"invalid angle fraction {obj!r}") from exc
        return cmath.exp(2j * cmath.pi * float(theta))
    if isinstance(obj, list) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, dict):
        keys = set(obj)
        if keys == {"re", "im"}:
            return complex(float(obj["re"]), float(obj["im"]))
        if keys == {"angle_turns"}:
            return cmath.exp(2j * cmath.pi * float(obj["angle_turns"]))
        raise SchemaError(f"unknown point keys {sorted(keys)!r}")
    raise SchemaError(f"cannot parse point from {obj!r}")


def _check_keys(config: dict, required: set, optional: set,
                where: str) -> None:
    keys = set(config)
    missing = required - keys
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")


def _json_text(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_svg(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_critpts(args: argparse.Namespace) -> int:
    Z = divisor_from_json(_load_payload(args.zeros))
    B = from_zero_divisor(Z, args.m)
    ram = critical_divisor(B)
    _emit(_json_text(divisor_to_json(ram.free_ram)), args.out)
    if args.svg:
        zero_pts = [0j] + Z.points()
        crit_pts = ram.free_ram.points()
        if args.m >= 2:
            crit_pts = [0j] + crit_pts
        _write_svg(disk_figure(zeros=zero_pts, critical=crit_pts,
                               hull_generators=zero_pts,
                               deterministic=args.deterministic),
                   args.svg)
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    R = divisor_from_json(_load_payload(args.ram))
    tol = args.tol if args.tol is not None else 1e-12
    B = zeros_from_critical(R, args.m, newton_tol=tol)
    _emit(_json_text(divisor_to_json(B.free_zeros)), args.out)
    if args.svg:
        _write_svg(disk_figure(zeros=[0j] + B.free_zeros.points(),
                               critical=R.points(),
                               deterministic=args.deterministic),
                   args.svg)
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    D = boundary_from_json(_load_payload(args.divisor))
    depth = args.depth if args.depth is not None else DEFAULT_DEPTH
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    report = classify(D, depth=depth, tol=tol)
    _emit(_json_text(report.to_json()), args.out)
    return 0


def cmd_extend(args: argparse.Namespace) -> int:
    D = boundary_from_json(_load_payload(args.divisor))
    m = args.m if args.m is not None else D.interior_part.m
    result = extend_phi(D, m)
    _emit(_json_text(divisor_to_json(result)), args.out)
    if args.svg:
        inputs = D.interior_part.free_zeros.points() + D.circle_part.points()
        interior = [z for z, _ in result.atoms if abs(z) < 1.0]
        circle = [z for z, mult in result.atoms if abs(z) >= 1.0
                  for _ in range(mult)]
        _write_svg(disk_figure(zeros=inputs + circle, critical=interior,
                               deterministic=args.deterministic),
                   args.svg)
    return 0


def cmd_lamination(args: argparse.Namespace) -> int:
    D = boundary_from_json(_load_payload(args.divisor))
    depth = args.depth if args.depth is not None else 3
    table = lamination_table(D, depth)
    _emit(_csv_text(LAMINATION_CSV_HEADER, table_csv_rows(table)), args.out)
    if args.svg:
        leaves = [(cmath.exp(2j * cmath.pi * float(tm)),
                   cmath.exp(2j * cmath.pi * float(tp)))
                  for tm, tp in ray_pairs(table)]
        _write_svg(disk_figure(leaves=leaves,
                               deterministic=args.deterministic),
                   args.svg)
    return 0


def _experiment_converge(config: dict, args: argparse.Namespace) -> dict:
    _check_keys(config, {"divisor", "m", "epsilons", "samples_per_epsilon",
                         "rng_seed"}, {"tolerances"}, "converge config")
    D = boundary_from_json(config["divisor"])
    seed = args.seed if args.seed is not None else config["rng_seed"]
    cfg = SweepConfig(config["epsilons"], config["samples_per_epsilon"],
                      seed, config.get("tolerances"))
    return verify_extension_convergence(D, int(config["m"]), cfg)


def _experiment_cont_orbit(config: dict, args: argparse.Namespace) -> dict:
    _check_keys(config, {"divisor", "q", "l", "n_schedule"}, set(),
                "cont-orbit config")
    D = boundary_from_json(config["divisor"])
    return verify_cont_orbit(D, _parse_point(config["q"]),
                             int(config["l"]), config["n_schedule"])


def _experiment_prescribe(config: dict, args: argparse.Namespace) -> dict:
    _check_keys(config, {"divisor", "q", "l", "L", "eps"},
                {"tau", "max_attempts"}, "prescribe config")
    D = boundary_from_json(config["divisor"])
    cert = prescribe_distance(
        D, _parse_point(config["q"]), int(config["l"]),
        float(config["L"]), float(config["eps"]),
        tau=float(config.get("tau", 1e-3)),
        max_attempts=int(config.get("max_attempts", 8)))
    return cert.to_json()


def _experiment_multiplier(config: dict, args: argparse.Namespace) -> dict:
    _check_keys(config, {"divisor", "n_schedule"}, set(),
                "multiplier config")
    D = boundary_from_json(config["divisor"])
    return multiplier_limit_check(D, config["n_schedule"])


_EXPERIMENTS = {
    "converge": _experiment_converge,
    "cont-orbit": _experiment_cont_orbit,
    "prescribe": _experiment_prescribe,
    "multiplier": _experiment_multiplier,
}

_EXPERIMENT_CSV = {
    "converge": (["epsilon", "max_distance", "mean_distance",
                  "projected_max", "failures"],
                 lambda rep: [[r["epsilon"], r["max_distance"],
                               r["mean_distance"], r["projected_max"],
                               r["failures"]] for r in rep["profile"]]),
    "cont-orbit": (["n", "distance", "circle_distance"],
                   lambda rep: [[r["n"], r["distance"], r["circle_distance"]]
                                for r in rep["profile"]]),
    "multiplier": (["n", "deviation"],
                   lambda rep: [[r["n"], r["deviation"]]
                                for r in rep["profile"]]),
    "prescribe": (["target_L", "achieved", "residual", "iterations"],
                  lambda rep: [[rep["target_L"], rep["achieved"],
                                rep["residual"], rep["iterations"]]]),
}


def _experiment_figure(name: str, report: dict,
                       deterministic: bool) -> str:
    if name == "converge":
        xs = [r["epsilon"] for r in report["profile"]]
        ys = [r["max_distance"] for r in report["profile"]]
        return profile_figure(xs, ys, "epsilon", "max matching distance",
                              deterministic=deterministic)
    if name == "cont-orbit":
        xs = [float(r["n"]) for r in report["profile"]]
        ys = [r["distance"] for r in report["profile"]]
        return profile_figure(xs, ys, "n", "orbit distance",
                              deterministic=deterministic)
    if name == "multiplier":
        xs = [float(r["n"]) for r in report["profile"]]
        ys = [r["deviation"] for r in report["profile"]]
        return profile_figure(xs, ys, "n", "multiplier deviation",
                              deterministic=deterministic)
    raise SchemaError(f"no figure defined for {name!r} reports")


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _load_payload(args.config)
    if not isinstance(config, dict):
        raise SchemaError("experiment config must be a JSON object")
    report = _EXPERIMENTS[args.name](config, args)
    _emit(_json_text(report), args.out)
    if args.csv:
        header, extract = _EXPERIMENT_CSV[args.name]
        _emit(_csv_text(header, extract(report)), args.csv)
    if args.svg:
        _write_svg(_experiment_figure(args.name, report,
                                      args.deterministic), args.svg)
    return 0


def _render_csv_table(path: str, deterministic: bool) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != LAMINATION_CSV_HEADER:
        raise SchemaError("CSV input is not a lamination table")
    points = []
    leaves = []
    for row in rows[1:]:
        points.append(complex(float(row[0]), float(row[1])))
        tminus = Fraction(int(row[3]), int(row[4]))
        tplus = Fraction(int(row[5]), int(row[6]))
        if tplus != tminus:
            leaves.append((cmath.exp(2j * cmath.pi * float(tminus)),
                           cmath.exp(2j * cmath.pi * float(tplus))))
    return disk_figure(zeros=points, leaves=leaves,
                       deterministic=deterministic)


def cmd_render(args: argparse.Namespace) -> int:
    if not args.input.strip().startswith(("{", "[")) and \
            args.input.endswith(".csv"):
        text = _render_csv_table(args.input, args.deterministic)
        _emit(text, args.out)
        return 0
    payload = _load_payload(args.input)
    if isinstance(payload, dict) and "atoms" in payload:
        D = divisor_from_json(payload)
        interior = [z for z, mult in D.atoms if abs(z) < 1.0
                    for _ in range(mult)]
        circle = [z for z, mult in D.atoms if abs(z) >= 1.0
                  for _ in range(mult)]
        text = disk_figure(zeros=interior + circle,
                           deterministic=args.deterministic)
    elif isinstance(payload, dict) and "result_divisor" in payload:
        D = divisor_from_json(payload["result_divisor"])
        w = complex(*payload["orbit_value"])
        text = disk_figure(zeros=D.points(), critical=[w],
                           deterministic=args.deterministic)
    elif isinstance(payload, dict) and "profile" in payload:
        rows = payload["profile"]
        if rows and "epsilon" in rows[0]:
            xs = [r["epsilon"] for r in rows]
            ys = [r["max_distance"] for r in rows]
            labels = ("epsilon", "max matching distance")
        elif rows and "deviation" in rows[0]:
            xs = [float(r["n"]) for r in rows]
            ys = [r["deviation"] for r in rows]
            labels = ("n", "multiplier deviation")
        elif rows and "distance" in rows[0]:
            xs = [float(r["n"]) for r in rows]
            ys = [r["distance"] for r in rows]
            labels = ("n", "orbit distance")
        else:
            raise SchemaError("profile rows have no renderable columns")
        text = profile_figure(xs, ys, labels[0], labels[1],
                              deterministic=args.deterministic)
    else:
        raise SchemaError("input is not a renderable report")
    _emit(text, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance override")
    common.add_argument("--depth", type=int, default=None,
                        help="orbit / tree depth override")
    common.add_argument("--seed", type=int, default=None,
                        help="seed override for experiment configs")
    common.add_argument("--deterministic", action="store_true",
                        help="suppress timestamps in SVG output")
    common.add_argument("--out", default=None,
                        help="output path (default: stdout)")
    common.add_argument("--svg", default=None,
                        help="also write an SVG figure to this path")

    parser = argparse.ArgumentParser(
        prog="blaschkediv",
        description="Divisor calculus of finite Blaschke products.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critpts", parents=[common],
                       help="critical divisor of a product given by zeros")
    p.add_argument("--zeros", required=True,
                   help="zero divisor (inline JSON or path)")
    p.add_argument("--m", type=int, required=True,
                   help="multiplicity of the zero at the origin")
    p.set_defaults(func=cmd_critpts)

    p = sub.add_parser("invert", parents=[common],
                       help="zeros from a prescribed ramification divisor")
    p.add_argument("--ram", required=True,
                   help="ramification divisor (inline JSON or path)")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("extend", parents=[common],
                       help="boundary extension of the critical-divisor map")
    p.add_argument("--divisor", required=True,
                   help="boundary divisor (inline JSON or path)")
    p.add_argument("--m", type=int, default=None,
                   help="multiplicity at the origin (default: from input)")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("classify", parents=[common],
                       help="type classification of a boundary divisor")
    p.add_argument("--divisor", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lamination", parents=[common],
                       help="exact angle table of the preimage tree")
    p.add_argument("--divisor", required=True)
    p.set_defaults(func=cmd_lamination)

    p = sub.add_parser("experiment", parents=[common],
                       help="deterministic numerical experiments")
    p.add_argument("name", choices=sorted(_EXPERIMENTS))
    p.add_argument("--config", required=True,
                   help="experiment config (inline JSON or path)")
    p.add_argument("--csv", default=None,
                   help="also write the profile as CSV to this path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("render", parents=[common],
                       help="figure from a saved report (JSON or CSV)")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        _diagnostic(exc)
        return 4
    except PreconditionError as exc:
        _diagnostic(exc)
        return 2
    except NumericalError as exc:
        _diagnostic(exc)
        return 3
    except OSError as exc:
        _diagnostic(exc)
        return 4


def _diagnostic(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    extra = getattr(exc, "last_good_t", None)
    if extra is not None:
        payload["last_good_t"] = extra
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
