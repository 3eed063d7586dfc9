"""Conflict policies for duplicate slot bindings.

The same policy governs duplicates inside a single utterance and rebinding of
an already-filled slot on a later turn.
"""

from __future__ import annotations

import enum

from .errors import ConflictError


class ConflictPolicy(enum.Enum):
    FIRST_WINS = "first"
    LAST_WINS = "last"
    REJECT = "reject"


def resolve_bindings(
    bindings, policy: ConflictPolicy = ConflictPolicy.LAST_WINS
) -> dict[str, str]:
    """Collapse an ordered (slot, value) sequence to one binding per slot.

    Under REJECT, a slot appearing twice raises ConflictError even if the
    values agree: the second binding is an attempt to rebind.
    """
    out: dict[str, str] = {}
    for slot, value in bindings:
        if slot in out:
            if policy is ConflictPolicy.REJECT:
                raise ConflictError(slot, (out[slot], value))
            if policy is ConflictPolicy.FIRST_WINS:
                continue
        out[slot] = value
    return out
