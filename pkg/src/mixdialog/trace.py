"""Adjacency-pair traces of a session's turn log.

Each answered system prompt is one (Is Rc) pair. An out-of-turn utterance and
its acknowledgement nest inside the open pair as (Ic Rs), and the re-prompt
that follows belongs to the same outer pair. When the greeting is modeled as a
response to the caller's opening move, the trace starts with (Ic Rs).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .engine import Classification, SystemAck, SystemPrompt, SystemSay, Turn
from .errors import MalformedLogError


class Party(enum.Enum):
    CALLER = "c"
    SYSTEM = "s"


@dataclass(frozen=True)
class AdjacencyPair:
    initiator: Party
    responder: Party
    children: tuple["AdjacencyPair", ...] = ()
    initiator_refs: tuple[int, ...] = ()
    responder_refs: tuple[int, ...] = ()
    flagged: bool = False  # unrecognized exchange, shown only in extended mode


@dataclass(frozen=True)
class Trace:
    pairs: tuple[AdjacencyPair, ...]

    def covered_turns(self) -> list[int]:
        """Turn indices referenced by the trace, in chronological reading order."""
        out: list[int] = []
        for pair in self.pairs:
            out.extend(_event_refs(pair))
        return out


def _event_refs(pair: AdjacencyPair) -> list[int]:
    # chronological reading: first initiative, then each insertion followed by
    # the re-initiative that resumes the pair, finally the response
    out: list[int] = []
    inits = list(pair.initiator_refs)
    if inits:
        out.append(inits.pop(0))
    for child in pair.children:
        out.extend(_event_refs(child))
        if inits:
            out.append(inits.pop(0))
    out.extend(inits)
    out.extend(pair.responder_refs)
    return out


def build_trace(
    turn_log: list[Turn], greeting_as_response: bool, extended: bool = False
) -> Trace:
    """Fold a turn log into adjacency pairs.

    Only closed pairs appear: a trailing unanswered prompt is not part of the
    trace. In default mode unrecognized exchanges are dropped, matching the
    bookkeeping used for the interaction-sequence counts; extended mode keeps
    them as flagged pairs.
    """
    pairs: list[AdjacencyPair] = []

    leading_says: list[int] = []
    i = 0
    while i < len(turn_log) and isinstance(turn_log[i], SystemSay):
        leading_says.append(i)
        i += 1
    if greeting_as_response and leading_says:
        pairs.append(
            AdjacencyPair(
                initiator=Party.CALLER,
                responder=Party.SYSTEM,
                responder_refs=tuple(leading_says),
            )
        )

    open_inits: list[int] = []
    open_children: list[AdjacencyPair] = []

    while i < len(turn_log):
        turn = turn_log[i]
        if isinstance(turn, SystemPrompt):
            open_inits.append(i)
            i += 1
            continue
        if isinstance(turn, SystemSay):
            i += 1  # action output, not part of a pair
            continue
        if isinstance(turn, SystemAck):
            raise MalformedLogError(f"stray acknowledgement at turn {i}")
        # user utterance
        if not open_inits:
            raise MalformedLogError(f"utterance without preceding prompt at turn {i}")
        if turn.classification is Classification.OUT_OF_TURN:
            ack_refs = []
            j = i + 1
            while j < len(turn_log) and isinstance(turn_log[j], SystemAck):
                ack_refs.append(j)
                j += 1
            open_children.append(
                AdjacencyPair(
                    initiator=Party.CALLER,
                    responder=Party.SYSTEM,
                    initiator_refs=(i,),
                    responder_refs=tuple(ack_refs),
                )
            )
            i = j
            continue
        if turn.classification is Classification.UNRECOGNIZED:
            if extended:
                pairs.append(
                    AdjacencyPair(
                        initiator=Party.SYSTEM,
                        responder=Party.CALLER,
                        initiator_refs=(open_inits.pop(),),
                        responder_refs=(i,),
                        flagged=True,
                    )
                )
                # children gathered so far stay with the still-open pair
            else:
                open_inits.pop()  # drop the unanswered prompt with the turn
            i += 1
            continue
        # responsive or mixed: closes the open pair
        pairs.append(
            AdjacencyPair(
                initiator=Party.SYSTEM,
                responder=Party.CALLER,
                children=tuple(open_children),
                initiator_refs=tuple(open_inits),
                responder_refs=(i,),
            )
        )
        open_inits = []
        open_children = []
        i += 1

    return Trace(tuple(pairs))


def _letters(pair: AdjacencyPair) -> list[str]:
    out = [f"I{pair.initiator.value}"]
    for child in pair.children:
        out.append("(" + " ".join(_letters(child)) + ")")
    out.append(f"R{pair.responder.value}")
    return out


def render_notation(trace: Trace) -> str:
    """One line of parenthesized pairs, e.g. "(Ic Rs) (Is (Ic Rs) Rc)"."""
    rendered = []
    for pair in trace.pairs:
        body = "(" + " ".join(_letters(pair)) + ")"
        if pair.flagged:
            body += "!"
        rendered.append(body)
    return " ".join(rendered)


def render_notation_with_indices(trace: Trace) -> str:
    """Two aligned lines: the notation and the turn indices under each letter."""
    tokens: list[tuple[str, str]] = []

    def emit(pair: AdjacencyPair, first: bool, last: bool) -> None:
        open_paren = "(" if first else ""
        inits = ",".join(str(r) for r in pair.initiator_refs)
        tokens.append((f"{open_paren}I{pair.initiator.value}", inits))
        for child in pair.children:
            emit(child, True, True)
        close = ")" if last else ""
        resps = ",".join(str(r) for r in pair.responder_refs)
        tokens.append((f"R{pair.responder.value}{close}", resps))

    for pair in trace.pairs:
        emit(pair, True, True)

    top = []
    bottom = []
    for text, refs in tokens:
        width = max(len(text), len(refs))
        top.append(text.ljust(width))
        bottom.append(refs.ljust(width))
    return " ".join(top).rstrip() + "\n" + " ".join(bottom).rstrip()
