"""Command-line front end: generate, verify, count, sweep and export.

Exit codes: 0 success, 1 claim or bound failure, 2 usage error,
3 undecided at the precision ceiling (or otherwise non-authoritative).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

from .certified import CEILING_ENV, DEFAULT_START_BITS, PrecisionPolicy, default_policy
from .claims import FAILS, HOLDS, UNDECIDED, TraceError, gamma_trace, verify_claim1, verify_claim2
from .complexity import (CERTIFIED_FULL, EXACT_SECTOR, MODES, EulerCheckFailed,
                         count_boundary_features, count_construction, sweep)
from .construction import (ConstructionParams, InvalidParameters, balls_from_json,
                           build_family)
from .export import boundary_mesh, family_json, mesh_obj, trace_obj

OK, FAILURE, USAGE, UNDECIDED_EXIT = 0, 1, 2, 3
SLOPE_RANGE = (1.8, 2.2)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    policy: PrecisionPolicy
    out: str = "-"


def _policy(args) -> PrecisionPolicy:
    if args.precision_ceiling is None:
        try:
            return default_policy()
        except ValueError as exc:
            raise UsageError(f"bad {CEILING_ENV}: {exc}") from None
    c = args.precision_ceiling
    try:
        return PrecisionPolicy(min(DEFAULT_START_BITS, c), c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params(args) -> ConstructionParams:
    if args.k is None or args.m is None:
        raise UsageError("both --k and --m are required")
    return ConstructionParams(args.k, args.m)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    try:
        return balls_from_json(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a family or ball list ({exc})") from None


def parse_range(text: str) -> list[int]:
    """``a:b:s`` with an inclusive upper end."""
    try:
        a, b, s = (int(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like start:stop:step, got {text!r}") from None
    if s <= 0 or a > b:
        raise UsageError(f"empty range {text!r}")
    return list(range(a, b + 1, s))


def parse_n_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--n takes comma-separated integers, got {text!r}") from None


# -- subcommands --

def cmd_generate(args, cfg: RunConfig) -> int:
    _emit(family_json(build_family(_params(args))), args.out)
    return OK


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.range:
        if args.k is not None or args.m is not None:
            raise UsageError("use either --range or --k/--m")
        ns = parse_range(args.range)
        odd = [n for n in ns if n % 2]
        if odd:
            raise UsageError(f"--range values must be even (k = m = n/2); got {odd[0]}")
        configs = [ConstructionParams(n // 2, n // 2) for n in ns]
    else:
        configs = [_params(args)]
    verdicts = []
    lines = []
    for p in configs:
        for rep in (verify_claim1(p), verify_claim2(p, policy=cfg.policy)):
            verdicts.append(rep.verdict)
            lines.append(rep.to_json())
    held = sum(v == HOLDS for v in verdicts)
    _emit("\n".join(lines) + "\n", args.out)
    print(f"{held}/{len(verdicts)} claim checks hold", file=sys.stderr)
    if all(v == HOLDS for v in verdicts):
        return OK
    if FAILS in verdicts or UNDECIDED not in verdicts:
        return FAILURE
    return UNDECIDED_EXIT


def cmd_count(args, cfg: RunConfig) -> int:
    if args.file:
        if args.k is not None or args.m is not None:
            raise UsageError("use either --file or --k/--m")
        fam, balls = _load(args.file)
    else:
        fam = build_family(_params(args))
        balls = fam.balls()
    if not balls:
        raise UsageError("need at least one ball")
    mode = args.mode or (EXACT_SECTOR if fam is not None else CERTIFIED_FULL)
    try:
        if fam is not None:
            rep = count_construction(fam, mode, cfg.policy)
        elif mode == EXACT_SECTOR:
            raise UsageError("exact-sector mode needs a construction family, not a plain ball list")
        else:
            rep = count_boundary_features(balls, cfg.policy)
    except EulerCheckFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(rep.to_json(), args.out)
    print(f"V={rep.V} E={rep.E} F={rep.F} mode={rep.mode}"
          f"{'' if rep.authoritative else ' (non-authoritative)'}", file=sys.stderr)
    return OK if rep.authoritative else UNDECIDED_EXIT


def cmd_sweep(args, cfg: RunConfig) -> int:
    ns = parse_n_list(args.n)
    if len(ns) < 2:
        raise UsageError("sweep needs at least two n values")
    bad = [n for n in ns if n < 2 or n % 2]
    if bad:
        raise UsageError(f"sweep n values must be even and at least 2; got {bad[0]}")
    result = sweep(ns, args.mode, cfg.policy)
    _emit(result.to_csv(), args.out)
    # keep stdout pure CSV when the table itself goes there
    info = sys.stderr if args.out == "-" else sys.stdout
    print("slope=" + ("undefined" if result.slope is None else f"{result.slope:.6f}"), file=info)
    if result.excluded:
        print("excluded (non-authoritative): " + ",".join(map(str, result.excluded)), file=sys.stderr)
        return UNDECIDED_EXIT
    if result.slope is None:
        return UNDECIDED_EXIT
    return OK if SLOPE_RANGE[0] <= result.slope <= SLOPE_RANGE[1] else FAILURE


def cmd_export(args, cfg: RunConfig) -> int:
    what = args.what
    if args.file:
        if what == "trace":
            raise UsageError("export trace needs --k/--m")
        fam, balls = _load(args.file)
    else:
        fam = build_family(_params(args))
        balls = fam.balls()
    if what == "family":
        if fam is None:
            raise UsageError("file is a plain ball list, not a family")
        _emit(family_json(fam), args.out)
    elif what == "trace":
        try:
            trace = gamma_trace(fam.params, args.j, policy=cfg.policy)
        except TraceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return FAILURE
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _emit(trace_obj(trace), args.out)
    else:
        verts, tris = boundary_mesh(balls, args.rings, 2 * args.rings)
        _emit(mesh_obj(verts, tris), args.out)
    return OK


# -- parser --

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-ceiling", type=int, default=None, metavar="BITS",
                        help=f"interval precision ceiling (default ${CEILING_ENV} or 4096)")

    def km(p):
        p.add_argument("--k", type=int, help="number of chain balls")
        p.add_argument("--m", type=int, help="number of ring balls")

    ap = argparse.ArgumentParser(prog="ballunion", description="Ball-union lower-bound construction tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write the exact ball family as JSON")
    km(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common], help="check the two construction claims")
    km(p)
    p.add_argument("--range", help="start:stop:step over even n with k = m = n/2 (stop inclusive)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", parents=[common], help="count union boundary vertices, arcs, faces")
    km(p)
    p.add_argument("--file", help="family JSON or {\"balls\": [...]} list")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sweep", parents=[common], help="count k = m = n/2 over n and fit the growth slope")
    p.add_argument("--n", required=True, help="comma-separated even n values")
    p.add_argument("--mode", choices=MODES, default=EXACT_SECTOR)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", parents=[common], help="write family JSON, curve polyline or boundary mesh")
    p.add_argument("what", choices=("family", "trace", "boundary"))
    km(p)
    p.add_argument("--file", help="family JSON or ball list instead of --k/--m")
    p.add_argument("--j", type=int, default=1, help="ring ball for the curve trace (1-based)")
    p.add_argument("--rings", type=int, default=48, help="latitude bands per sphere in the mesh")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, _policy(args), args.out)
        return args.func(args, cfg)
    except (UsageError, InvalidParameters) as exc:
        print(f"ballunion {args.command}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
