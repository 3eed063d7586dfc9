"""Enumerate the ways an n-slot form can be completed across utterances.

A staging sequence is an ordered partition of the slot set: each utterance
fills a non-empty batch of still-open slots. With permutations, the order of
slots inside one utterance counts as well. drive_all_sequences replays every
sequence against a live session to show the engine admits them all.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

from .engine import EngineConfig, Phase, new_session, next_output, submit_utterance
from .errors import DialogError
from .grammar import Grammar, _expand
from .script import ClearSlots, ConfirmStage, DialogScript


@dataclass(frozen=True)
class StagingSequence:
    """Utterance batches; inner order is meaningful only when permuted=True."""

    utterances: tuple[tuple[str, ...], ...]
    permuted: bool = False

    def __str__(self) -> str:
        return " | ".join(" ".join(batch) for batch in self.utterances)


def enumerate_sequences(
    slots: Sequence[str], with_permutations: bool = False
) -> list[StagingSequence]:
    """All ordered partitions of the slots, one batch per utterance."""
    slots = list(slots)
    if not slots:
        raise DialogError("empty slot set")
    out: list[StagingSequence] = []

    def choose(remaining: tuple[str, ...], acc: tuple[tuple[str, ...], ...]) -> None:
        if not remaining:
            out.append(StagingSequence(acc, with_permutations))
            return
        n = len(remaining)
        # non-empty subsets by bitmask; order within a batch follows document
        # order unless permutations are requested
        for mask in range(1, 1 << n):
            batch = tuple(remaining[i] for i in range(n) if mask >> i & 1)
            rest = tuple(remaining[i] for i in range(n) if not mask >> i & 1)
            if with_permutations:
                for perm in permutations(batch):
                    choose(rest, acc + (perm,))
            else:
                choose(rest, acc + (batch,))

    choose(tuple(slots), ())
    return out


def count_sequences(n: int, with_permutations: bool = False) -> int:
    """Number of staging sequences for an n-slot form, by direct enumeration."""
    if n < 1:
        raise DialogError("slot count must be >= 1")
    return len(enumerate_sequences([f"s{i}" for i in range(n)], with_permutations))


@dataclass(frozen=True)
class DriveResult:
    sequence: StagingSequence
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class DriveReport:
    results: tuple[DriveResult, ...]

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def total(self) -> int:
        return len(self.results)

    def all_passed(self) -> bool:
        return self.passed == self.total

    def render_table(self) -> str:
        width = max(len(str(r.sequence)) for r in self.results)
        lines = [f"{'sequence'.ljust(width)}  result"]
        for r in self.results:
            status = "pass" if r.passed else f"FAIL ({r.detail})"
            lines.append(f"{str(r.sequence).ljust(width)}  {status}")
        lines.append(f"{self.passed}/{self.total} passed")
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = {
            "total": self.total,
            "passed": self.passed,
            "results": [
                {
                    "sequence": [list(batch) for batch in r.sequence.utterances],
                    "passed": r.passed,
                    "detail": r.detail,
                }
                for r in self.results
            ],
        }
        return json.dumps(payload, indent=2)


def _first_terminal(grammar: Grammar, slot: str) -> str:
    """First alternative of the slot's rule, for reproducible synthesis."""
    rule_names = grammar.tagged_slots()[slot]
    phrases = _expand(grammar, grammar.rules[rule_names[0]])
    for tokens in phrases:
        if tokens:
            return " ".join(tokens)
    raise DialogError(f"slot {slot} has no non-empty terminal")


def _confirm_answer(script: DialogScript) -> str | None:
    """The first confirmation branch that does not clear anything."""
    for stage in script.stages:
        if isinstance(stage, ConfirmStage):
            for branch in stage.on_value:
                if not any(isinstance(a, ClearSlots) for a in branch.actions):
                    return branch.value
            return stage.on_value[0].value
    return None


def drive_all_sequences(
    script: DialogScript,
    grammar: Grammar,
    config: EngineConfig = EngineConfig(),
    with_permutations: bool = False,
) -> DriveReport:
    """Replay every staging sequence for the script's single form.

    Each sequence becomes one session: per utterance, the chosen slots are
    voiced as their first grammar terminal, then the confirmation (if any) is
    answered affirmatively. A sequence passes when the session completes with
    exactly the expected values in the store.
    """
    forms = script.forms()
    if len(forms) != 1:
        raise DialogError("drive_all_sequences requires exactly one form")
    form = forms[0]
    values = {slot: _first_terminal(grammar, slot) for slot in form.slot_names()}
    answer = _confirm_answer(script)

    results: list[DriveResult] = []
    for sequence in enumerate_sequences(form.slot_names(), with_permutations):
        session = new_session(script, {form.grammar_ref: grammar}, config)
        try:
            next_output(session)
            for batch in sequence.utterances:
                submit_utterance(session, " ".join(values[slot] for slot in batch))
                next_output(session)
            if answer is not None and session.phase is Phase.ACTIVE:
                submit_utterance(session, answer)
                next_output(session)
        except DialogError as exc:
            results.append(DriveResult(sequence, False, f"error: {exc}"))
            continue
        got = {name: entry.value for name, entry in session.store.items()}
        expected_ok = all(got.get(slot) == value for slot, value in values.items())
        if session.phase is not Phase.COMPLETED:
            results.append(DriveResult(sequence, False, f"phase={session.phase.value}"))
        elif not expected_ok:
            results.append(DriveResult(sequence, False, f"store={got}"))
        else:
            results.append(DriveResult(sequence, True))
    return DriveReport(tuple(results))
