"""Command-line front end.

    mixdialog run        interactive dialog on stdin/stdout
    mixdialog batch      replay caller lines from a file, optionally diff
    mixdialog specialize print the residual script for given bindings
    mixdialog enumerate  staging-sequence counts and listings
    mixdialog drive      replay every staging sequence against a bundle
    mixdialog serve      HTTP session API (and static UI, when built)

Exit codes: 0 success or match, 1 expectation mismatch, 2 input error,
3 incomplete session.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from pathlib import Path

from .engine import (
    EngineConfig,
    Phase,
    load_bundle,
    new_session,
    next_output,
    render_transcript,
    run_batch,
    submit_utterance,
)
from .errors import DialogError
from .grammar import ConflictPolicy, MatchConfig, MatchMode, parse_grammar
from .peval import specialize
from .script import parse_script, render_script
from .service import DEFAULT_PORT, serve
from .staging import drive_all_sequences, enumerate_sequences
from .trace import build_trace, render_notation

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INCOMPLETE = 3


def _engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=["spot", "strict"], default="spot")
    parser.add_argument("--policy", choices=["last", "first", "reject"], default="last")
    parser.add_argument("--ack-template", default="Okay, {value}.")
    parser.add_argument("--no-ack", action="store_true")
    parser.add_argument("--max-reprompts", type=int, default=3)
    parser.add_argument(
        "--no-greeting-pair",
        action="store_true",
        help="do not model the greeting as a response to the caller's opening",
    )


def _config(args: argparse.Namespace) -> EngineConfig:
    return EngineConfig(
        match=MatchConfig(
            mode=MatchMode(args.mode),
            conflict_policy={
                "last": ConflictPolicy.LAST_WINS,
                "first": ConflictPolicy.FIRST_WINS,
                "reject": ConflictPolicy.REJECT,
            }[args.policy],
        ),
        ack_template=None if args.no_ack else args.ack_template,
        max_reprompts=args.max_reprompts,
        greeting_as_response=not args.no_greeting_pair,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixdialog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="interactive dialog session")
    p_run.add_argument("--script", required=True)
    p_run.add_argument("--grammar-dir", default=None)
    _engine_flags(p_run)

    p_batch = sub.add_parser("batch", help="replay caller lines from a file")
    p_batch.add_argument("--script", required=True)
    p_batch.add_argument("--grammar-dir", default=None)
    p_batch.add_argument("--input", required=True, help="one caller utterance per line")
    p_batch.add_argument("--expect", default=None, help="transcript to compare against")
    _engine_flags(p_batch)

    p_spec = sub.add_parser("specialize", help="print the residual script")
    p_spec.add_argument("--script", required=True)
    p_spec.add_argument(
        "--bind",
        action="append",
        default=[],
        metavar="SLOT=VALUE",
        help="binding to specialize against (repeatable)",
    )
    p_spec.add_argument("--policy", choices=["last", "first", "reject"], default="last")

    p_enum = sub.add_parser("enumerate", help="staging sequences for n slots")
    group = p_enum.add_mutually_exclusive_group(required=True)
    group.add_argument("--slots", type=int, default=None)
    group.add_argument("--script", default=None, help="take the slots from this script's form")
    p_enum.add_argument("--permutations", action="store_true")
    p_enum.add_argument("--quiet", action="store_true", help="print only the count")

    p_drive = sub.add_parser("drive", help="replay all staging sequences")
    p_drive.add_argument("--script", required=True)
    p_drive.add_argument("--grammar-dir", default=None)
    p_drive.add_argument("--grammar", default=None, help="grammar file overriding the form's ref")
    p_drive.add_argument("--permutations", action="store_true")
    p_drive.add_argument("--json", default=None, help="also write a machine-readable report")

    p_serve = sub.add_parser("serve", help="HTTP session API")
    p_serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    p_serve.add_argument("--scripts-dir", default="bundles")
    p_serve.add_argument("--ui-dir", default=None)

    return parser


def _load(args: argparse.Namespace):
    return load_bundle(args.script, args.grammar_dir)


def cmd_run(args: argparse.Namespace) -> int:
    script, grammars = _load(args)
    config = _config(args)
    session = new_session(script, grammars, config)
    echo = not sys.stdin.isatty()
    for turn in next_output(session):
        print(f"S: {turn.text}")
    while session.phase is Phase.ACTIVE:
        if echo:
            line = sys.stdin.readline()
            if not line:
                break
            line = line.rstrip("\n")
            print(f"C: {line}")
        else:
            try:
                line = input("C: ")
            except EOFError:
                break
        result = submit_utterance(session, line)
        for turn in list(result.system_turns) + next_output(session):
            print(f"S: {turn.text}")
    print()
    print(render_notation(build_trace(session.turn_log, config.greeting_as_response)))
    return EXIT_OK if session.phase is Phase.COMPLETED else EXIT_INCOMPLETE


def cmd_batch(args: argparse.Namespace) -> int:
    script, grammars = _load(args)
    try:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    utterances = [line for line in lines if line.strip()]
    session = new_session(script, grammars, _config(args))
    turns = run_batch(session, utterances)
    transcript = render_transcript(turns)
    sys.stdout.write(transcript)
    if args.expect is not None:
        try:
            expected = Path(args.expect).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if transcript != expected:
            diff = difflib.unified_diff(
                expected.splitlines(keepends=True),
                transcript.splitlines(keepends=True),
                fromfile=args.expect,
                tofile="transcript",
            )
            sys.stderr.writelines(diff)
            return EXIT_MISMATCH
    if session.phase is not Phase.COMPLETED:
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_specialize(args: argparse.Namespace) -> int:
    try:
        script = parse_script(Path(args.script).read_text(encoding="utf-8"))
    except (OSError, DialogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    bindings = []
    for raw in args.bind:
        if "=" not in raw:
            print(f"error: --bind expects SLOT=VALUE, got {raw!r}", file=sys.stderr)
            return EXIT_INPUT
        slot, _, value = raw.partition("=")
        bindings.append((slot.strip(), value.strip()))
    policy = {
        "last": ConflictPolicy.LAST_WINS,
        "first": ConflictPolicy.FIRST_WINS,
        "reject": ConflictPolicy.REJECT,
    }[args.policy]
    try:
        residual = specialize(script, bindings, policy)
    except DialogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render_script(residual))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    if args.script is not None:
        try:
            script = parse_script(Path(args.script).read_text(encoding="utf-8"))
        except (OSError, DialogError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        slots = list(script.form_slots())
    else:
        if args.slots < 1:
            print("error: --slots must be >= 1", file=sys.stderr)
            return EXIT_INPUT
        slots = [f"s{i + 1}" for i in range(args.slots)]
    sequences = enumerate_sequences(slots, args.permutations)
    print(len(sequences))
    if not args.quiet:
        for sequence in sequences:
            print(str(sequence))
    return EXIT_OK


def cmd_drive(args: argparse.Namespace) -> int:
    try:
        script = parse_script(Path(args.script).read_text(encoding="utf-8"))
        if args.grammar is not None:
            grammar = parse_grammar(Path(args.grammar).read_text(encoding="utf-8"))
        else:
            _, grammars = load_bundle(args.script, args.grammar_dir)
            grammar = grammars[script.forms()[0].grammar_ref]
    except (OSError, DialogError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = drive_all_sequences(script, grammar, with_permutations=args.permutations)
    print(report.render_table())
    if args.json is not None:
        Path(args.json).write_text(report.to_json(), encoding="utf-8")
    return EXIT_OK if report.all_passed() else EXIT_MISMATCH


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        serve(args.scripts_dir, args.port, args.ui_dir)
    except (OSError, DialogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": cmd_run,
        "batch": cmd_batch,
        "specialize": cmd_specialize,
        "enumerate": cmd_enumerate,
        "drive": cmd_drive,
        "serve": cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except (OSError, DialogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
