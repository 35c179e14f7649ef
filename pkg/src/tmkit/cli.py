"""Command-line entry point.

Machine-readable results (JSON lines or documented text formats) go to
stdout; human prose goes to stderr.  Exit codes: 0 ok, 1 Error-severity
diagnostics, 2 usage or I/O error, 3 analysis limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus
from .behavior import OverlapAmbiguityError, check_all_events, check_behavior
from .diagnostics import Diagnostic, Severity, TMError, sort_diagnostics
from .dsl import ParseError, format_model, parse
from .match import (
    AmbiguousSpliceError,
    MatchPolicy,
    find_shared_functionality,
    isomorphic,
    simplify,
)
from .model import AssemblyError, TMModel, assemble_model
from .render import RenderOptions, to_dot
from .sim import (
    ConfigError,
    ExploreConfig,
    NoInitialEventsError,
    SimConfig,
    explore_state_space,
    simulate,
)
from .validate import check_static, has_errors

OK, DIAG_ERRORS, USAGE, LIMIT = 0, 1, 2, 3


def _color_enabled() -> bool:
    mode = os.environ.get("TM_COLOR", "auto")
    if mode == "never":
        return False
    return sys.stderr.isatty()


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _say_diag_summary(diags: list[Diagnostic]) -> None:
    errors = sum(1 for d in diags if d.severity is Severity.ERROR)
    warnings = len(diags) - errors
    text = f"{errors} error(s), {warnings} warning(s)"
    if _color_enabled() and errors:
        text = f"\x1b[31m{text}\x1b[0m"
    _say(text)


def _read_source(spec: str) -> str:
    if spec.startswith("fixture:"):
        return corpus.fixture_source(spec[len("fixture:") :])
    path = Path(spec)
    return path.read_text(encoding="utf-8")


def _load_model(spec: str) -> TMModel:
    return assemble_model(parse(_read_source(spec)))


def _print_diags(diags: list[Diagnostic]) -> None:
    for diag in diags:
        print(diag.to_json())


def _error_diag(code: str, message: str, span=None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span=span)


def cmd_check(args: argparse.Namespace) -> int:
    try:
        source = _read_source(args.file)
    except (OSError, corpus.UnknownFixtureError) as exc:
        _say(str(exc))
        return USAGE
    try:
        decls = parse(source)
    except ParseError as exc:
        _print_diags(exc.diagnostics)
        _say_diag_summary(exc.diagnostics)
        return DIAG_ERRORS
    try:
        model = assemble_model(decls)
    except AssemblyError as exc:
        diags = [_error_diag(exc.code, str(exc), exc.span)]
        _print_diags(diags)
        _say_diag_summary(diags)
        return DIAG_ERRORS
    diags = list(check_static(model))
    diags.extend(check_all_events(model))
    try:
        diags.extend(check_behavior(model))
    except OverlapAmbiguityError as exc:
        diags.append(_error_diag("E_REGION_OVERLAP", str(exc)))
    diags = sort_diagnostics(diags)
    _print_diags(diags)
    _say_diag_summary(diags)
    return DIAG_ERRORS if has_errors(diags) else OK


def cmd_fmt(args: argparse.Namespace) -> int:
    try:
        model = _load_model(args.file)
    except (OSError, corpus.UnknownFixtureError) as exc:
        _say(str(exc))
        return USAGE
    except (ParseError, AssemblyError) as exc:
        _say(str(exc))
        return DIAG_ERRORS
    sys.stdout.write(format_model(model))
    return OK


def _valid_model_or_exit(spec: str) -> tuple[int, TMModel | None]:
    try:
        model = _load_model(spec)
    except (OSError, corpus.UnknownFixtureError) as exc:
        _say(str(exc))
        return USAGE, None
    except (ParseError, AssemblyError) as exc:
        _say(str(exc))
        return DIAG_ERRORS, None
    static = check_static(model)
    if has_errors(static):
        _print_diags(static)
        _say_diag_summary(static)
        return DIAG_ERRORS, None
    return OK, model


def cmd_simplify(args: argparse.Namespace) -> int:
    status, model = _valid_model_or_exit(args.file)
    if model is None:
        return status
    try:
        graph = simplify(model)
    except AmbiguousSpliceError as exc:
        diags = [_error_diag("E_AMBIGUOUS_SPLICE", str(exc))]
        _print_diags(diags)
        return DIAG_ERRORS
    sys.stdout.write(graph.edge_list_text())
    return OK


def cmd_render(args: argparse.Namespace) -> int:
    status, model = _valid_model_or_exit(args.file)
    if model is None:
        return status
    opts = RenderOptions(view=args.view, show_thing_labels=not args.no_thing_labels)
    if args.view == "simplified":
        try:
            dot = to_dot(simplify(model), opts)
        except AmbiguousSpliceError as exc:
            _print_diags([_error_diag("E_AMBIGUOUS_SPLICE", str(exc))])
            return DIAG_ERRORS
    else:
        dot = to_dot(model, opts)
    if args.output:
        Path(args.output).write_text(dot, encoding="utf-8")
        _say(f"wrote {args.output}")
    else:
        sys.stdout.write(dot)
    return OK


def cmd_simulate(args: argparse.Namespace) -> int:
    status, model = _valid_model_or_exit(args.file)
    if model is None:
        return status
    config = SimConfig(
        capacities=args.capacity,
        max_steps=args.max_steps,
        seed=args.seed,
        channels=args.channels,
    )
    try:
        trace = simulate(model, config)
    except (ConfigError, NoInitialEventsError, OverlapAmbiguityError) as exc:
        _say(str(exc))
        return DIAG_ERRORS
    sys.stdout.write(trace.to_jsonl())
    return OK


def cmd_explore(args: argparse.Namespace) -> int:
    status, model = _valid_model_or_exit(args.file)
    if model is None:
        return status
    config = ExploreConfig(
        capacities=args.capacity,
        max_states=args.max_states,
        channels=args.channels,
    )
    try:
        result = explore_state_space(model, config)
    except (ConfigError, OverlapAmbiguityError) as exc:
        _say(str(exc))
        return DIAG_ERRORS
    print(result.to_json())
    if not result.bounded:
        _say(f"state limit {args.max_states} exceeded; results are partial")
        return LIMIT
    return OK


def cmd_dedup(args: argparse.Namespace) -> int:
    graphs = []
    names = []
    for spec in (args.file1, args.file2):
        status, model = _valid_model_or_exit(spec)
        if model is None:
            return status
        try:
            graphs.append(simplify(model))
        except AmbiguousSpliceError as exc:
            _say(str(exc))
            return DIAG_ERRORS
        names.append(model.name or spec)
    policy = MatchPolicy(match_thing_labels=True, match_role_names=args.match_roles)
    mapping = isomorphic(graphs[0], graphs[1], policy)
    print(
        json.dumps(
            {
                "models": names,
                "isomorphic": mapping is not None,
                "mapping": mapping.as_dict() if mapping else None,
            },
            sort_keys=True,
        )
    )
    shared = find_shared_functionality(
        graphs[0], graphs[1], min_size=args.min_size, policy=policy
    )
    for match, size in shared.matches:
        print(json.dumps({"size": size, "mapping": match.as_dict()}, sort_keys=True))
    if shared.approximate:
        _say("shared-functionality search was limited; fragments are approximate")
        return LIMIT
    return OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tm",
        description="Thinging-machine model toolkit: check, render, "
        "simulate, and compare .tm models.",
    )
    parser.add_argument(
        "--fixtures",
        action="store_true",
        help="list the embedded fixture corpus and exit",
    )
    sub = parser.add_subparsers(dest="command")

    p_check = sub.add_parser("check", help="parse and validate a model")
    p_check.add_argument("file", help=".tm file or fixture:NAME")
    p_check.set_defaults(func=cmd_check)

    p_fmt = sub.add_parser("fmt", help="canonically reformat a model")
    p_fmt.add_argument("file")
    p_fmt.set_defaults(func=cmd_fmt)

    p_simplify = sub.add_parser(
        "simplify", help="print the create/process edge list"
    )
    p_simplify.add_argument("file")
    p_simplify.set_defaults(func=cmd_simplify)

    p_render = sub.add_parser("render", help="emit DOT")
    p_render.add_argument("file")
    p_render.add_argument(
        "--view", choices=("static", "behavior", "simplified"), default="static"
    )
    p_render.add_argument("-o", "--output", default=None)
    p_render.add_argument("--no-thing-labels", action="store_true")
    p_render.set_defaults(func=cmd_render)

    p_sim = sub.add_parser("simulate", help="run a seeded token simulation")
    p_sim.add_argument("file")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--max-steps", type=int, default=100)
    p_sim.add_argument("--capacity", type=int, default=1)
    p_sim.add_argument(
        "--channels", choices=("declared", "inferred"), default="declared"
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_explore = sub.add_parser("explore", help="enumerate reachable markings")
    p_explore.add_argument("file")
    p_explore.add_argument("--max-states", type=int, default=10_000)
    p_explore.add_argument("--capacity", type=int, default=1)
    p_explore.add_argument(
        "--channels", choices=("declared", "inferred"), default="declared"
    )
    p_explore.set_defaults(func=cmd_explore)

    p_dedup = sub.add_parser(
        "dedup", help="compare two models for duplicated functionality"
    )
    p_dedup.add_argument("file1")
    p_dedup.add_argument("file2")
    p_dedup.add_argument("--min-size", type=int, default=2)
    p_dedup.add_argument(
        "--match-roles",
        action="store_true",
        help="require thimac role names to match, not just structure",
    )
    p_dedup.set_defaults(func=cmd_dedup)

    return parser


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    if args.fixtures:
        for name in corpus.ALL_NAMES:
            print(name)
        return OK
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        _say("a subcommand is required; see --help")
        return USAGE
    try:
        return args.func(args)
    except TMError as exc:
        _say(str(exc))
        return DIAG_ERRORS


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
