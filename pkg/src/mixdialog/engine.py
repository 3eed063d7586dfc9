"""Dialog manager: select the next unfilled prompt, collect an utterance,
process its fills by re-specializing the script.

Responsive and out-of-turn utterances go through the same path: match, merge
fills into the store, recompute the residual. Classification happens after the
store update and only feeds the turn log (and from there the trace).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import (
    ConflictError,
    MissingGrammarError,
    NoMatchError,
    NoPromptOutstandingError,
    ScriptSemanticError,
    SessionNotActiveError,
    SlotCoverageError,
)
from .policy import ConflictPolicy
from .grammar import Grammar, MatchConfig, SlotFill, match_utterance, parse_grammar, tokenize
from .peval import SlotEntry, SlotStore, specialize, store_environment
from .script import (
    Block,
    ClearSlots,
    ConfirmStage,
    DialogScript,
    MixedForm,
    Say,
    parse_script,
    validate,
)


class Phase(enum.Enum):
    ACTIVE = "active"
    COMPLETED = "completed"
    ABORTED = "aborted"


class Classification(enum.Enum):
    RESPONSIVE = "responsive"
    OUT_OF_TURN = "out-of-turn"
    MIXED = "mixed"
    UNRECOGNIZED = "unrecognized"


@dataclass(frozen=True)
class SystemPrompt:
    stage: str
    slot: str | None
    text: str


@dataclass(frozen=True)
class SystemAck:
    text: str


@dataclass(frozen=True)
class SystemSay:
    text: str


@dataclass(frozen=True)
class UserUtterance:
    text: str
    fills: tuple[SlotFill, ...]
    classification: Classification


Turn = Union[SystemPrompt, SystemAck, SystemSay, UserUtterance]


def speaker(turn: Turn) -> str:
    return "C" if isinstance(turn, UserUtterance) else "S"


def render_transcript(turns: list[Turn]) -> str:
    """The `S:`/`C:` line format used by golden tests and the batch command."""
    lines = [f"{speaker(t)}: {t.text}" for t in turns]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class EngineConfig:
    match: MatchConfig = MatchConfig()
    ack_template: str | None = "Okay, {value}."
    max_reprompts: int = 3
    greeting_as_response: bool = True

    def __post_init__(self):
        if self.max_reprompts < 1:
            raise ValueError("max_reprompts must be >= 1")


@dataclass(frozen=True)
class _PromptTarget:
    stage: str
    slot: str
    confirm: bool


@dataclass
class Session:
    original: DialogScript
    residual: DialogScript
    store: SlotStore
    grammars: dict[str, Grammar]
    config: EngineConfig
    turn_log: list[Turn] = field(default_factory=list)
    phase: Phase = Phase.ACTIVE
    reprompt_count: dict[str, int] = field(default_factory=dict)
    emitted_blocks: set[str] = field(default_factory=set)
    awaiting: _PromptTarget | None = None


@dataclass(frozen=True)
class TurnResult:
    user_turn: UserUtterance
    system_turns: tuple[Turn, ...]
    phase: Phase


def new_session(
    script: DialogScript,
    grammars: dict[str, Grammar],
    config: EngineConfig = EngineConfig(),
) -> Session:
    """Validate the bundle and start a session at the first stage."""
    issues = validate(script)
    if issues:
        raise ScriptSemanticError(issues[0].message, issues)
    for form in script.forms():
        if form.grammar_ref not in grammars:
            raise MissingGrammarError(form.grammar_ref)
        tagged = grammars[form.grammar_ref].tagged_slots()
        for slot in form.slot_names():
            if slot not in tagged:
                raise SlotCoverageError(slot, form.grammar_ref)
    return Session(
        original=script,
        residual=script,
        store={},
        grammars=dict(grammars),
        config=config,
    )


def _pending_target(session: Session):
    """First unprocessed stage: block messages to play, or the prompt to ask.

    Returns ("block", stage) | ("slot", form, decl) | ("confirm", stage) | None.
    """
    for stage in session.original.stages:
        if isinstance(stage, Block):
            if stage.name not in session.emitted_blocks:
                return ("block", stage)
        elif isinstance(stage, MixedForm):
            remaining = [d for d in stage.slots if d.name not in session.store]
            if remaining:
                return ("slot", stage, remaining[0])
        elif isinstance(stage, ConfirmStage):
            if stage.slot.name not in session.store:
                return ("confirm", stage)
    return None


def _store_values(session: Session) -> dict[str, str]:
    return {name: entry.value for name, entry in session.store.items()}


def next_output(session: Session) -> list[Turn]:
    """Emit queued system turns: due block messages, then the current prompt.

    Empty when the session is over or a prompt is already outstanding.
    """
    if session.phase is not Phase.ACTIVE or session.awaiting is not None:
        return []
    out: list[Turn] = []
    while True:
        target = _pending_target(session)
        if target is None:
            session.phase = Phase.COMPLETED
            break
        if target[0] == "block":
            block = target[1]
            for message in block.messages:
                out.append(SystemSay(message))
            session.emitted_blocks.add(block.name)
            continue
        if target[0] == "slot":
            form, decl = target[1], target[2]
            text = decl.prompt.render(_store_values(session))
            out.append(SystemPrompt(form.name, decl.name, text))
            session.awaiting = _PromptTarget(form.name, decl.name, confirm=False)
        else:
            stage = target[1]
            text = stage.slot.prompt.render(_store_values(session))
            out.append(SystemPrompt(stage.name, stage.slot.name, text))
            session.awaiting = _PromptTarget(stage.name, stage.slot.name, confirm=True)
        break
    session.turn_log.extend(out)
    return out


def _confirm_stage(session: Session, name: str) -> ConfirmStage:
    for stage in session.original.stages:
        if isinstance(stage, ConfirmStage) and stage.name == name:
            return stage
    raise KeyError(name)  # pragma: no cover


def _form(session: Session, name: str) -> MixedForm:
    for stage in session.original.stages:
        if isinstance(stage, MixedForm) and stage.name == name:
            return stage
    raise KeyError(name)  # pragma: no cover


def _match_fills(session: Session, target: _PromptTarget, text: str) -> list[SlotFill]:
    """Fills for the utterance, or [] when unrecognized."""
    if target.confirm:
        stage = _confirm_stage(session, target.stage)
        tokens = tuple(tokenize(text))
        for value in stage.accepted_values():
            if tokens == tuple(value.split()):
                return [SlotFill(stage.slot.name, value, (0, len(tokens)))]
        return []
    grammar = session.grammars[_form(session, target.stage).grammar_ref]
    try:
        fills = match_utterance(grammar, text, session.config.match)
    except NoMatchError:
        return []
    declared = set(session.original.declared_slots())
    return [f for f in fills if f.slot in declared]


def _classify(fills: list[SlotFill], prompted: str) -> Classification:
    slots = {f.slot for f in fills}
    if not slots:
        return Classification.UNRECOGNIZED
    if slots == {prompted}:
        return Classification.RESPONSIVE
    if prompted in slots:
        return Classification.MIXED
    return Classification.OUT_OF_TURN


def submit_utterance(session: Session, text: str) -> TurnResult:
    """Process one user utterance against the outstanding prompt."""
    if session.phase is not Phase.ACTIVE:
        raise SessionNotActiveError(f"session is {session.phase.value}")
    if session.awaiting is None:
        raise NoPromptOutstandingError("no prompt outstanding")
    target = session.awaiting
    fills = _match_fills(session, target, text)

    if not fills:
        user_turn = UserUtterance(text, (), Classification.UNRECOGNIZED)
        session.turn_log.append(user_turn)
        count = session.reprompt_count.get(target.slot, 0) + 1
        session.reprompt_count[target.slot] = count
        if count >= session.config.max_reprompts:
            session.phase = Phase.ABORTED
        session.awaiting = None  # next_output re-queues the same prompt
        return TurnResult(user_turn, (), session.phase)

    # uniform path: merge fills into the store, then respecialize
    turn_index = len(session.turn_log)
    policy = session.config.match.conflict_policy
    store = session.store
    staged: dict[str, SlotFill] = {}
    for fill in fills:  # may raise before any mutation under Reject
        if fill.slot in store and policy is ConflictPolicy.REJECT:
            raise ConflictError(fill.slot, (store[fill.slot].value, fill.value))
        if fill.slot in store and policy is ConflictPolicy.FIRST_WINS:
            continue
        staged[fill.slot] = fill
    for slot, fill in staged.items():
        store[slot] = SlotEntry(fill.value, turn_index, just_filled=True)
    session.residual = specialize(session.original, store_environment(store), policy)

    classification = _classify(fills, target.slot)
    user_turn = UserUtterance(text, tuple(fills), classification)
    session.turn_log.append(user_turn)
    session.awaiting = None

    system_turns: list[Turn] = []
    if classification is Classification.OUT_OF_TURN and session.config.ack_template:
        for fill in fills:
            system_turns.append(SystemAck(session.config.ack_template.format(value=fill.value)))

    if target.confirm and target.slot in store and store[target.slot].just_filled:
        stage = _confirm_stage(session, target.stage)
        for action in stage.branch(store[target.slot].value).actions:
            if isinstance(action, ClearSlots):
                for name in action.names:
                    store.pop(name, None)
                session.residual = specialize(
                    session.original, store_environment(store), policy
                )
            elif isinstance(action, Say):
                system_turns.append(SystemSay(action.text))

    session.turn_log.extend(system_turns)
    for entry in store.values():
        entry.just_filled = False
    if _pending_target(session) is None:
        session.phase = Phase.COMPLETED
    return TurnResult(user_turn, tuple(system_turns), session.phase)


def run_batch(session: Session, utterances: list[str]) -> list[Turn]:
    """Drive a fresh session through scripted caller lines; returns the turn log."""
    if session.turn_log:
        raise SessionNotActiveError("run_batch requires a fresh session")
    next_output(session)
    for text in utterances:
        if session.phase is not Phase.ACTIVE:
            break
        submit_utterance(session, text)
        next_output(session)
    return list(session.turn_log)


# --- bundle loading ----------------------------------------------------------

def load_bundle(
    script_path: str | Path, grammar_dir: str | Path | None = None
) -> tuple[DialogScript, dict[str, Grammar]]:
    """Parse a .dlg file and every grammar it references.

    Grammar refs resolve relative to the script's directory unless grammar_dir
    overrides the base.
    """
    script_path = Path(script_path)
    script = parse_script(script_path.read_text(encoding="utf-8"))
    base = Path(grammar_dir) if grammar_dir is not None else script_path.parent
    grammars: dict[str, Grammar] = {}
    for form in script.forms():
        if form.grammar_ref in grammars:
            continue
        ref_path = base / form.grammar_ref
        if not ref_path.is_file():
            raise MissingGrammarError(form.grammar_ref)
        grammars[form.grammar_ref] = parse_grammar(ref_path.read_text(encoding="utf-8"))
    return script, grammars
