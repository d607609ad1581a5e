"""``ctxlab`` command line.

Exit status: 0 on success, 2 when an input fails validation, 3 when a
problem exceeds the size cap, 1 on any other error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io
from .behaviour import (
    behaviour_from_global,
    counterexample_fixture,
    is_nondegenerate,
    pr_box,
    sample_behaviour,
    sample_counterexample,
    sample_global,
)
from .contextuality import classify, unique_extension_nondegenerate
from .errors import CtxlabError, ProblemTooLarge, ValidationError
from .scenario import extend_scenario, ncycle_scenario
from .solver import default_size_cap

FAMILIES = ("ncycle", "prbox", "counterexample", "random")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _classify_one(path, size_cap):
    report = classify(io.load_behaviour(path), size_cap)
    return io.report_to_dict(report), report.summary()


def cmd_validate(args) -> int:
    status = 0
    for path in args.paths:
        try:
            raw = io.read_json(path)
            if isinstance(raw, dict) and "tables" in raw:
                io.behaviour_from_dict(raw, base_dir=Path(path).parent)
                kind = "behaviour"
            else:
                io.load_scenario(raw)
                kind = "scenario"
        except ValidationError as exc:
            print(f"{path}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = 2
            continue
        print(f"{path}: valid {kind}")
    return status


def cmd_classify(args) -> int:
    paths = args.behaviours
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_classify_one, paths, [args.size_cap] * len(paths)))
    else:
        results = [_classify_one(p, args.size_cap) for p in paths]
    reports = [r for r, _ in results]
    _emit(io.dumps(reports[0] if len(reports) == 1 else reports), args.out)
    if args.summary:
        stream = sys.stdout if args.out else sys.stderr
        for path, (_, line) in zip(paths, results):
            print(f"{path}: {line}", file=stream)
    return 0


def cmd_extend(args) -> int:
    b = io.load_behaviour(args.behaviour)
    ext = extend_scenario(b.scenario)
    extension = None
    if is_nondegenerate(b):
        extension = unique_extension_nondegenerate(b, size_cap=args.size_cap)
    _emit(io.dumps(io.extension_to_dict(ext, extension)), args.out)
    return 0


def cmd_polytope(args) -> int:
    raw = io.read_json(args.scenario)
    if isinstance(raw, dict) and "tables" in raw:
        scenario = io.behaviour_from_dict(raw, base_dir=Path(args.scenario).parent).scenario
    else:
        scenario = io.load_scenario(raw)
    _emit(io.dumps(io.polytope_to_dict(scenario, args.size_cap)), args.out)
    return 0


def generate(family: str, n: int = 4, seed: int = 0, weight_bound: int = 10):
    if family == "prbox":
        return pr_box(n)
    if family == "counterexample":
        if seed == 0:
            return counterexample_fixture()
        return sample_counterexample(seed, 2, weight_bound)
    scenario = ncycle_scenario(n)
    if family == "ncycle":
        return behaviour_from_global(scenario, sample_global(scenario, seed, weight_bound))
    if family == "random":
        return sample_behaviour(scenario, seed, weight_bound)
    raise ValidationError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def cmd_generate(args) -> int:
    b = generate(args.family, args.n, args.seed, args.weight_bound)
    _emit(io.dumps(io.behaviour_to_dict(b)), args.out)
    return 0


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctxlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check scenario and behaviour files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="decide ND, NDeg, NC and NC-ext for behaviours")
    p.add_argument("behaviours", nargs="+")
    p.add_argument("--summary", action="store_true", help="also print a one-line verdict")
    p.add_argument("--out")
    p.add_argument("--size-cap", type=_positive, default=None)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("extend", help="extended scenario and, if non-degenerate, the unique extension")
    p.add_argument("behaviour")
    p.add_argument("--out")
    p.add_argument("--size-cap", type=_positive, default=None)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("polytope", help="ND/NDeg equalities and NC vertices of a scenario")
    p.add_argument("scenario")
    p.add_argument("--out")
    p.add_argument("--size-cap", type=_positive, default=None)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("generate", help="write an example behaviour file")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-bound", type=_positive, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "size_cap", None) is None and hasattr(args, "size_cap"):
        args.size_cap = default_size_cap()
    try:
        return args.func(args)
    except ProblemTooLarge as exc:
        print(f"ProblemTooLarge: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except CtxlabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
