"""Batch command-line surface.

Exit codes follow a CI-friendly contract: 0 for success (verification
passed, terms equal), 1 for a semantic failure (verification failed, terms
differ), 2 for usage or resource errors (bad arguments, parse errors,
search ceilings).  The MONADLAB_CEILING environment variable overrides the
default search ceiling; all output is deterministic given the flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .algebra import (
    DEFAULT_SEARCH_CEILING,
    SearchCeilingExceeded,
    algebra_to_dict,
    enumerate_algebras,
)
from .equational import (
    FreeClasses,
    RewriteLimitExceeded,
    TermError,
    format_term,
    free_classes,
    max_var,
    normalize,
    parse_term,
    terms_equal,
)
from .finset import FinSetError
from .monadicity import empty_state_diagnostic, verify_monadicity
from .statemonad import StateMonadCtx

PASS, FAIL, USAGE = 0, 1, 2


@dataclass
class RunConfig:
    s_size: int
    s0: int | None = None
    method: str = "constrained"
    ceiling: int = DEFAULT_SEARCH_CEILING
    fmt: str = "text"
    seed: int = 0
    jobs: int = 1


def _default_ceiling() -> int:
    env = os.environ.get("MONADLAB_CEILING")
    if env is None:
        return DEFAULT_SEARCH_CEILING
    try:
        value = int(env)
    except ValueError as exc:
        raise FinSetError(f"MONADLAB_CEILING must be an integer, got {env!r}") from exc
    if value <= 0:
        raise FinSetError(f"MONADLAB_CEILING must be positive, got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monadlab",
        description="classify state-monad algebras on finite sets, verify the "
        "comparison with function spaces, and work with lookup/update terms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_method=False):
        p.add_argument("--s", type=int, required=True, help="number of states")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--ceiling", type=int, default=None, help="search ceiling")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--jobs", type=int, default=1,
                       help="upper bound on parallel workers (runs one deterministic worker)")
        if with_method:
            p.add_argument(
                "--method",
                choices=("brute", "constrained", "transport"),
                default="constrained",
            )

    p = sub.add_parser("algebras", help="enumerate algebra structures on a carrier")
    common(p, with_method=True)
    p.add_argument("--x", type=int, required=True, help="carrier size")
    p.add_argument("--out", type=str, default=None,
                   help="also write the structures as newline-delimited JSON")

    p = sub.add_parser("verify", help="run the full verification pipeline")
    common(p)
    p.add_argument("--max-x", type=int, required=True, help="largest carrier")
    p.add_argument("--s0", type=int, default=None, help="chosen state (default 0)")
    p.add_argument("--diagnose-empty", action="store_true",
                   help="with --s 0, demonstrate why the equivalence fails")
    p.add_argument("--out", type=str, default=None, help="also write the JSON report")

    p = sub.add_parser("equal", help="decide equality of two terms")
    common(p)
    p.add_argument("--vars", type=int, default=None,
                   help="number of variables (default: inferred)")
    p.add_argument("terms", nargs=2, metavar="TERM")

    p = sub.add_parser("rewrite", help="normalize a term")
    common(p)
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("term", metavar="TERM")

    p = sub.add_parser("free", help="count denotation classes of terms")
    common(p)
    p.add_argument("--vars", type=int, required=True, help="number of variables")
    p.add_argument("--depth", type=int, default=4, help="construction depth")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    ceiling = args.ceiling if args.ceiling is not None else _default_ceiling()
    if ceiling <= 0:
        raise FinSetError(f"ceiling must be positive, got {ceiling}")
    if args.jobs < 1:
        raise FinSetError(f"jobs must be at least 1, got {args.jobs}")
    if args.s < 0:
        raise FinSetError(f"state count must be non-negative, got {args.s}")
    return RunConfig(
        s_size=args.s,
        s0=getattr(args, "s0", None),
        method=getattr(args, "method", "constrained"),
        ceiling=ceiling,
        fmt=args.format,
        seed=args.seed,
        jobs=args.jobs,
    )


def _cmd_algebras(args) -> int:
    cfg = _config(args)
    ctx = StateMonadCtx(cfg.s_size)
    algebras = enumerate_algebras(ctx, args.x, method=cfg.method, ceiling=cfg.ceiling)
    records = [algebra_to_dict(a) for a in algebras]
    if cfg.fmt == "json":
        for rec in records:
            print(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    else:
        plural = "" if len(algebras) == 1 else "s"
        print(
            f"{len(algebras)} algebra{plural} on a {args.x}-element carrier "
            f"with {cfg.s_size} states ({cfg.method})"
        )
        for rec in records:
            print(f"  h = {rec['h']}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
    return PASS


def _cmd_verify(args) -> int:
    cfg = _config(args)
    if cfg.s_size == 0:
        if args.diagnose_empty:
            diag = empty_state_diagnostic(args.max_x)
            if cfg.fmt == "json":
                print(json.dumps(diag, sort_keys=True, indent=2))
            else:
                print("empty state object: demonstrating the failure")
                for x, c in diag["algebra_counts"].items():
                    print(f"  carrier {x}: {c} algebra(s)")
                print(f"  {diag['message']}")
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(json.dumps(diag, sort_keys=True, indent=2) + "\n")
            return PASS
        print(
            "refusing to verify with 0 states: the comparison with function "
            "spaces requires a nonempty state object (rerun with "
            "--diagnose-empty to see the failure)",
            file=sys.stderr,
        )
        return USAGE
    report = verify_monadicity(
        cfg.s_size,
        args.max_x,
        seed=cfg.seed,
        ceiling=cfg.ceiling,
        method=cfg.method,
    )
    print(report.to_json() if cfg.fmt == "json" else report.to_text())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return PASS if report.passed else FAIL


def _cmd_equal(args) -> int:
    cfg = _config(args)
    t1 = parse_term(args.terms[0], cfg.s_size)
    t2 = parse_term(args.terms[1], cfg.s_size)
    nvars = args.vars
    if nvars is None:
        nvars = max(max_var(t1), max_var(t2)) + 1
    ctx = StateMonadCtx(cfg.s_size)
    equal = terms_equal(t1, t2, ctx, nvars)
    if cfg.fmt == "json":
        print(json.dumps({"equal": equal, "nvars": nvars}, sort_keys=True))
    else:
        print("equal" if equal else "different")
    return PASS if equal else FAIL


def _cmd_rewrite(args) -> int:
    cfg = _config(args)
    term = parse_term(args.term, cfg.s_size)
    normal = normalize(term, cfg.s_size, max_steps=args.max_steps)
    if cfg.fmt == "json":
        print(json.dumps({"input": format_term(term), "normal": format_term(normal)},
                         sort_keys=True))
    else:
        print(format_term(normal))
    return PASS


def _cmd_free(args) -> int:
    cfg = _config(args)
    if args.vars < 0:
        raise FinSetError(f"vars must be non-negative, got {args.vars}")
    ctx = StateMonadCtx(cfg.s_size)
    result: FreeClasses = free_classes(ctx, args.vars, args.depth)
    if cfg.fmt == "json":
        print(
            json.dumps(
                {
                    "classes": result.count,
                    "saturated": result.saturated,
                    "representatives": {
                        str(code): format_term(t)
                        for code, t in result.representatives.items()
                    },
                },
                sort_keys=True,
            )
        )
    else:
        plural = "" if result.count == 1 else "es"
        print(f"{result.count} class{plural}")
        for code, t in result.representatives.items():
            print(f"  {code}: {format_term(t)}")
    return PASS


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "algebras": _cmd_algebras,
        "verify": _cmd_verify,
        "equal": _cmd_equal,
        "rewrite": _cmd_rewrite,
        "free": _cmd_free,
    }
    try:
        return handlers[args.command](args)
    except TermError as exc:
        print(f"term error: {exc}", file=sys.stderr)
        return USAGE
    except SearchCeilingExceeded as exc:
        print(f"search ceiling exceeded: {exc}", file=sys.stderr)
        return USAGE
    except RewriteLimitExceeded as exc:
        print(f"rewrite limit exceeded: {exc}", file=sys.stderr)
        return USAGE
    except FinSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
