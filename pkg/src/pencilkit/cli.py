"""Command-line interface.

Exit status: 0 on success, 1 for a domain failure (pencil not regular, a
consistency check failing), 2 for unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .canonical import (
    NotRegularError,
    kronecker_decompose,
    scramble,
    synthesize,
    weak_canonical,
    weierstrass,
)
from .checks import run_checks
from .pencil import full_profile, is_regular, reduce_step, strangeness

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


def _prefix(args, src: str) -> str:
    if args.out is not None:
        return args.out
    p = Path(src)
    return str(p.with_suffix("")) + "."


def _emit(args, report: dict, human: list[str]) -> None:
    if args.json:
        sys.stdout.write(fileio.dumps(report))
    else:
        print("\n".join(human))


def analyze_report(P) -> dict:
    prof = full_profile(P)
    d, a, s = strangeness(P)
    _, Mp, _ = reduce_step(P)
    return {
        "rows": P.rows,
        "cols": P.cols,
        "index": prof.index,
        "alpha": list(prof.alpha),
        "beta_plus": list(prof.beta_plus),
        "beta_minus": list(prof.beta_minus),
        "delta": prof.delta,
        "strangeness": {"d": d, "a": a, "s": s},
        "regular": is_regular(P),
        "initial_conditions": fileio.matrix_to_json(Mp.basis),
    }


def cmd_analyze(args) -> int:
    P = fileio.read_pencil(args.path)
    r = analyze_report(P)
    st = r["strangeness"]
    _emit(
        args,
        r,
        [
            f"shape:      {r['rows']}x{r['cols']} (codomain x domain)",
            f"index:      {r['index']}",
            f"alpha:      {r['alpha']}",
            f"beta+:      {r['beta_plus']}",
            f"beta-:      {r['beta_minus']}",
            f"delta:      {r['delta']}",
            f"(d, a, s):  ({st['d']}, {st['a']}, {st['s']})",
            f"regular:    {'yes' if r['regular'] else 'no'}",
            f"consistent initial conditions: subspace of dimension "
            f"{r['initial_conditions']['cols']}",
        ],
    )
    return EXIT_OK


def cmd_canonical(args) -> int:
    P = fileio.read_pencil(args.path)
    prefix = _prefix(args, args.path)
    if args.weierstrass:
        try:
            T, sizes, C = weierstrass(P)
        except NotRegularError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_DOMAIN
        _, s = kronecker_decompose(P)
    else:
        T, s = kronecker_decompose(P)
        sizes = None
    can = T.apply(P)
    files = {
        "canonical": prefix + "canonical.json",
        "transform": prefix + "transform.json",
        "structure": prefix + "structure.json",
    }
    fileio.write_json(files["canonical"], fileio.pencil_to_json(can))
    fileio.write_json(files["transform"], fileio.transform_to_json(T))
    fileio.write_json(files["structure"], fileio.structure_to_json(s))
    report = {"structure": fileio.structure_to_json(s), "files": files}
    if sizes is not None:
        report["nilpotent_sizes"] = sizes
    human = [f"wrote {f}" for f in files.values()]
    human.insert(0, f"blocks: N={s.nilpotent} L={s.l_blocks} LT={s.lt_blocks} core={s.core_dim}")
    _emit(args, report, human)
    return EXIT_OK


def cmd_weak(args) -> int:
    P = fileio.read_pencil(args.path)
    prefix = _prefix(args, args.path)
    w = weak_canonical(P)
    files = {"canonical": prefix + "weak.json", "transform": prefix + "weak_transform.json"}
    fileio.write_json(files["canonical"], fileio.pencil_to_json(w.transform.apply(P)))
    fileio.write_json(files["transform"], fileio.transform_to_json(w.transform))
    report = {"d": w.d, "a": w.a, "s": w.s, "files": files}
    _emit(args, report, [f"(d, a, s) = ({w.d}, {w.a}, {w.s})"] + [f"wrote {f}" for f in files.values()])
    return EXIT_OK


def cmd_synth(args) -> int:
    s = fileio.read_structure(args.path)
    prefix = _prefix(args, args.path)
    P = synthesize(s)
    files = {"pencil": prefix + "pencil.json"}
    if args.scramble:
        P, T = scramble(P, args.seed)
        files["transform"] = prefix + "scramble.json"
        fileio.write_json(files["transform"], fileio.transform_to_json(T))
    fileio.write_json(files["pencil"], fileio.pencil_to_json(P))
    _emit(args, {"rows": P.rows, "cols": P.cols, "files": files}, [f"wrote {f}" for f in files.values()])
    return EXIT_OK


def cmd_check(args) -> int:
    P = fileio.read_pencil(args.path)
    results = run_checks(P)
    failed = [r for r in results if not r.ok]
    report = {
        "passed": not failed,
        "checks": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results],
    }
    _emit(
        args,
        report,
        [f"{'PASS' if r.ok else 'FAIL'} {r.name}" + (f" ({r.detail})" if not r.ok and r.detail else "") for r in results],
    )
    return EXIT_DOMAIN if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", metavar="PREFIX", help="prefix for written files")
    parser = argparse.ArgumentParser(
        prog="pencilkit", description="Exact analysis and canonical forms of matrix pencils."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="index, defects, strangeness, regularity")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("canonical", parents=[common], help="Kronecker form with transforms")
    p.add_argument("path")
    p.add_argument("--weierstrass", action="store_true", help="require a regular pencil")
    p.set_defaults(func=cmd_canonical)
    p = sub.add_parser("weak", parents=[common], help="weak-equivalence canonical form")
    p.add_argument("path")
    p.set_defaults(func=cmd_weak)
    p = sub.add_parser("synth", parents=[common], help="build a pencil from a structure file")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scramble", action="store_true")
    p.set_defaults(func=cmd_synth)
    p = sub.add_parser("check", parents=[common], help="run every consistency check")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (fileio.FormatError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
