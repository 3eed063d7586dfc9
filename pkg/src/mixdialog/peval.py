"""Specialize a dialog script against known slot bindings.

Filling a slot removes its guarded prompt from the script; a form with no
remaining slots disappears; blocks and confirmation stages pass through
unchanged. The residual depends only on which slots are bound, never on the
values, so specialization composes: any split of the bindings applied in any
order yields the same residual. Values live in the interpreter's slot store,
not in the script.

A slot stays known to a script as long as a confirmation stage still mentions
it (prompt placeholder or clear list), so re-binding a slot whose guard is
already gone is a tolerated no-op; binding a name the script never knew is an
error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import UnknownSlotError
from .policy import ConflictPolicy, resolve_bindings
from .script import ClearSlots, ConfirmStage, DialogScript, MixedForm

# An environment is an ordered sequence of (slot, value) bindings; the conflict
# policy reduces it to at most one binding per slot.
Environment = Sequence[tuple[str, str]]


@dataclass
class SlotEntry:
    value: str
    filled_at_turn: int
    just_filled: bool = False


# Slot store: the interpreter-owned record of filled values.
SlotStore = dict[str, SlotEntry]


def store_environment(store: SlotStore) -> list[tuple[str, str]]:
    """Store contents as an environment, ordered by fill turn."""
    items = sorted(store.items(), key=lambda kv: kv[1].filled_at_turn)
    return [(name, entry.value) for name, entry in items]


def known_slots(script: DialogScript) -> set[str]:
    """Declared slots plus slots a confirmation stage still refers to."""
    known = set(script.declared_slots())
    for stage in script.stages:
        if isinstance(stage, ConfirmStage):
            known.update(stage.slot.prompt.placeholders())
            for branch in stage.on_value:
                for action in branch.actions:
                    if isinstance(action, ClearSlots):
                        known.update(action.names)
    return known


def _as_bindings(env) -> list[tuple[str, str]]:
    if isinstance(env, Mapping):
        return list(env.items())
    return list(env)


def specialize(
    script: DialogScript,
    env: Environment | Mapping[str, str],
    policy: ConflictPolicy = ConflictPolicy.LAST_WINS,
) -> DialogScript:
    """Return the residual script for the given bindings."""
    bindings = resolve_bindings(_as_bindings(env), policy)
    known = known_slots(script)
    for slot in bindings:
        if slot not in known:
            raise UnknownSlotError(slot, f"script {script.name}")

    stages = []
    for stage in script.stages:
        if isinstance(stage, MixedForm):
            remaining = tuple(s for s in stage.slots if s.name not in bindings)
            if remaining:
                stages.append(replace(stage, slots=remaining))
        else:
            stages.append(stage)
    return replace(script, stages=tuple(stages))


def residual_slots(script: DialogScript) -> set[str]:
    """Slots still guarded by a form prompt."""
    return set(script.form_slots())
