"""Command-line entry point.

Exit codes: 0 success, 2 parse error, 3 inconsistent instance, 4 no plan
within the horizon, 5 timeout, 6 invalid plan, 64 usage error, 66 missing
input file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bench import BenchConfig, gen_instances, run_bench
from .consistency import check
from .domain import Scenario
from .instance_io import ParseError, parse_instance, parse_plan, serialize_instance, serialize_plan
from .macros import expand
from .planner import EncodingMismatch, InconsistentInstance, Outcome, simulate, solve
from .render import RenderSpec, render_config
from .sas import InapplicableAction
from .validator import validate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INCONSISTENT = 3
EXIT_UNSAT = 4
EXIT_TIMEOUT = 5
EXIT_INVALID = 6
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class MissingInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise MissingInput(path)
    return p.read_text(encoding="utf-8")


def _int_range(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = tuple(range(int(lo), int(hi) + 1))
        else:
            values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b or a comma list, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def _names(text: str) -> tuple[str, ...]:
    names = tuple(t.strip().lower() for t in text.split(",") if t.strip())
    for n in names:
        if n not in {s.value for s in Scenario}:
            raise argparse.ArgumentTypeError(f"unknown encoding {n!r}")
    return names


def _encoding(args, instance) -> Scenario:
    if args.encoding:
        return Scenario(args.encoding)
    return Scenario.SAS if instance.scenario is Scenario.SAS else Scenario.SAES


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- subcommands -------------------------------------------------------------------


def cmd_check(args) -> int:
    instance = parse_instance(_read(args.instance))
    violations = check(instance)
    for v in violations:
        print(v)
    if violations:
        _err(f"{len(violations)} violation(s)")
        return EXIT_INCONSISTENT
    _err("consistent")
    return EXIT_OK


def cmd_plan(args) -> int:
    instance = parse_instance(_read(args.instance))
    encoding = _encoding(args, instance)
    result = solve(
        instance, encoding, max_horizon=args.max_horizon, time_budget=args.timeout, mixed=args.mixed
    )
    s = result.stats
    _err(
        f"{result.outcome}: horizon {result.horizon}, {s.expanded} states expanded, {s.elapsed:.3f}s"
    )
    if result.outcome is Outcome.PLAN:
        start = 1 if encoding is Scenario.SAS else 0
        sys.stdout.write(serialize_plan(result.plan, start=start))
        return EXIT_OK
    return EXIT_UNSAT if result.outcome is Outcome.UNSAT else EXIT_TIMEOUT


def cmd_validate(args) -> int:
    instance = parse_instance(_read(args.instance))
    plan = parse_plan(_read(args.plan))
    report = validate(instance, plan, _encoding(args, instance))
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_gen(args) -> int:
    instances = gen_instances(
        args.seed, args.links, args.orientations, args.count, args.scenario, args.reject_trivial
    )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, inst in enumerate(instances):
            path = out / f"{args.scenario}_l{args.links}_o{args.orientations}_{i:03d}.lp"
            path.write_text(serialize_instance(inst), encoding="utf-8")
            _err(str(path))
        return EXIT_OK
    for i, inst in enumerate(instances):
        if i:
            print("% ----")
        sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


def cmd_bench(args) -> int:
    config = BenchConfig(
        links=args.links,
        orientations=args.orientations,
        per_cell=args.per_cell,
        time_limit=args.timeout,
        encodings=args.encodings,
        seed=args.seed,
        workers=args.workers,
        reject_trivial=args.reject_trivial,
        max_horizon=args.max_horizon,
    )

    def progress(rec):
        if args.verbose:
            _err(f"l={rec.links} o={rec.orientations} #{rec.index} {rec.encoding}: {rec.outcome}")

    report = run_bench(config, progress=progress)
    print(report.to_table())
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.to_json(), encoding="utf-8")
        _err(f"wrote {out}")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        _err(f"wrote {args.csv}")
    figures = args.figures
    if figures is None and args.out:
        figures = str(Path(args.out).parent)
    if figures and not args.no_figures:
        for path in report.write_figures(figures):
            _err(f"wrote {path}")
    return EXIT_OK


def cmd_render(args) -> int:
    instance = parse_instance(_read(args.instance))
    if instance.initial is None:
        raise InconsistentInstance(check(instance))
    state = instance.initial
    if args.plan:
        plan = parse_plan(_read(args.plan))
        step = len(plan) if args.step is None else args.step
        if not 0 <= step <= len(plan):
            raise UsageError(f"--step must lie in 0..{len(plan)}")
        state = simulate(instance, plan, _encoding(args, instance), step)
    spec = RenderSpec(args.width, args.height, args.stroke)
    svg = render_config(state, instance.topology, spec)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_expand(args) -> int:
    plan = parse_plan(_read(args.plan))
    sys.stdout.write(serialize_plan(expand(plan)))
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="artiplan", description="Planner for articulated-object manipulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="PATH", help="key=value file of option defaults")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    enc = {"choices": [s.value for s in Scenario], "default": None}

    p = sub.add_parser("check", help="report consistency violations")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plan", help="compute a shortest plan")
    p.add_argument("instance")
    p.add_argument("--encoding", **enc)
    p.add_argument("--max-horizon", type=int, default=64)
    p.add_argument("--timeout", type=float, default=None, help="seconds")
    p.add_argument("--mixed", action="store_true", help="allow elementary actions next to macros")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="check a plan against an instance")
    p.add_argument("instance")
    p.add_argument("plan")
    p.add_argument("--encoding", **enc)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate random instances")
    p.add_argument("--links", type=int, default=4)
    p.add_argument("--orientations", type=int, default=4)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", default="0")
    p.add_argument("--scenario", choices=["sas", "saes"], default="sas")
    p.add_argument("--reject-trivial", action="store_true")
    p.add_argument("--out", help="directory for one file per instance")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run the PAR10/coverage benchmark")
    p.add_argument("--links", type=_int_range, default=tuple(range(4, 13)))
    p.add_argument("--orientations", type=_int_range, default=(4, 6, 8, 12))
    p.add_argument("--per-cell", type=int, default=5)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--encodings", type=_names, default=("sas", "saes", "maes"))
    p.add_argument("--seed", default="0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-horizon", type=int, default=64)
    p.add_argument("--reject-trivial", action="store_true")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--csv", help="per-run CSV path")
    p.add_argument("--figures", help="directory for PNG figures (default: next to --out)")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="draw a configuration as SVG")
    p.add_argument("instance")
    p.add_argument("--plan")
    p.add_argument("--step", type=int)
    p.add_argument("--encoding", **enc)
    p.add_argument("--width", type=int, default=400)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--stroke", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("expand", help="replace macros by elementary actions")
    p.add_argument("plan")
    p.set_defaults(func=cmd_expand)
    return parser


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def read_config(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"config line {lineno}: expected key = value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, config: dict[str, str]) -> None:
    """Install config values as subcommand defaults so explicit flags win."""
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    used = set()
    for sp in subparsers.choices.values():
        for action in sp._actions:
            if action.dest not in config or not action.option_strings:
                continue
            raw = config[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                low = raw.lower()
                if low not in _TRUE | _FALSE:
                    raise UsageError(f"config {action.dest}: expected a boolean, got {raw!r}")
                value = low in _TRUE
            else:
                value = raw
            sp.set_defaults(**{action.dest: value})
            used.add(action.dest)
    unknown = sorted(set(config) - used)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = _Parser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(parser, read_config(_read(known.config)))
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _err(f"usage error: {exc}")
        return EXIT_USAGE
    except MissingInput as exc:
        _err(f"no such file: {exc}")
        return EXIT_NOINPUT
    except ParseError as exc:
        _err(f"parse error: {exc}")
        return EXIT_PARSE
    except InconsistentInstance as exc:
        for v in exc.violations:
            _err(str(v))
        return EXIT_INCONSISTENT
    except (EncodingMismatch, InapplicableAction, ValueError) as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
