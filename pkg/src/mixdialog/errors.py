"""Exception types shared across the dialog engine."""


class DialogError(Exception):
    """Base class for all errors raised by this package."""


class ScriptSyntaxError(DialogError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ScriptSemanticError(DialogError):
    """A script parsed but violates a structural rule (undeclared slot, duplicate name)."""

    def __init__(self, message: str, issues=()):
        super().__init__(message)
        self.issues = tuple(issues)


class GrammarSyntaxError(DialogError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class GrammarSemanticError(DialogError):
    """Undefined nonterminal, recursive rule cycle, or similar."""


class UnknownSlotError(DialogError):
    def __init__(self, slot: str, context: str = ""):
        detail = f" in {context}" if context else ""
        super().__init__(f"unknown slot {slot}{detail}")
        self.slot = slot


class NoMatchError(DialogError):
    """The utterance produced no slot fills."""


class ConflictError(DialogError):
    """Two bindings for one slot under the Reject policy."""

    def __init__(self, slot: str, values=()):
        shown = f" ({', '.join(values)})" if values else ""
        super().__init__(f"conflicting values for slot {slot}{shown}")
        self.slot = slot
        self.values = tuple(values)


class TemplateError(DialogError):
    """A prompt placeholder could not be rendered."""


class MissingGrammarError(DialogError):
    def __init__(self, ref: str):
        super().__init__(f"missing grammar {ref!r}")
        self.ref = ref


class SlotCoverageError(DialogError):
    def __init__(self, slot: str, ref: str):
        super().__init__(f"slot {slot!r} is not tagged in grammar {ref!r}")
        self.slot = slot
        self.ref = ref


class SessionNotActiveError(DialogError):
    """Operation requires an active session."""


class NoPromptOutstandingError(DialogError):
    """submit_utterance was called before next_output issued a prompt."""


class MalformedLogError(DialogError):
    """Turn log cannot be read as adjacency pairs (utterance without a prompt)."""
