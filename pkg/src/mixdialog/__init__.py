"""Mixed-initiative slot-filling dialogs, driven by script specialization.

A dialog script declares slot-guarded prompts; a form-level grammar says how
utterances fill slots. Every user turn, responsive or out-of-turn, is handled
the same way: bind what was said, specialize the script, ask what remains.
"""

from .engine import (
    Classification,
    EngineConfig,
    Phase,
    Session,
    SystemAck,
    SystemPrompt,
    SystemSay,
    Turn,
    TurnResult,
    UserUtterance,
    load_bundle,
    new_session,
    next_output,
    render_transcript,
    run_batch,
    submit_utterance,
)
from .errors import DialogError
from .grammar import (
    Grammar,
    MatchConfig,
    MatchMode,
    SlotFill,
    match_utterance,
    parse_grammar,
    slot_vocabulary,
    tokenize,
)
from .peval import Environment, SlotEntry, SlotStore, residual_slots, specialize
from .policy import ConflictPolicy
from .script import DialogScript, Issue, parse_script, render_script, validate
from .staging import (
    DriveReport,
    StagingSequence,
    count_sequences,
    drive_all_sequences,
    enumerate_sequences,
)
from .trace import AdjacencyPair, Trace, build_trace, render_notation

__version__ = "0.1.0"
