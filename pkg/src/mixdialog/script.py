"""Dialog script DSL: AST types, parser, canonical renderer, validator.

A script is an ordered list of stages. `greet` blocks play fixed messages,
`form` stages declare slots to fill (guarded prompts), and `confirm` stages
ask a closed question and run per-answer action lists. Example:

    dialog pizza {
      greet "Thank you for calling."
      form order grammar "order.gram" {
        slot size prompt "What size?"
      }
      confirm verify prompt "A {size}, correct?"
      on yes { say "Done."; }
      on no  { clear size verify; say "Starting over."; }
    }

Comments run from `#` to end of line. All values are immutable after parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import ScriptSemanticError, ScriptSyntaxError, TemplateError

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass(frozen=True)
class PromptTemplate:
    """Prompt text with `{slot}` placeholders."""

    text: str

    def placeholders(self) -> tuple[str, ...]:
        seen: list[str] = []
        for name in _PLACEHOLDER.findall(self.text):
            if name not in seen:
                seen.append(name)
        return tuple(seen)

    def render(self, values: Mapping[str, str]) -> str:
        def sub(m: re.Match) -> str:
            name = m.group(1)
            if name not in values:
                raise TemplateError(f"unfilled placeholder {{{name}}}")
            return values[name]

        return _PLACEHOLDER.sub(sub, self.text)

    def substitute(self, values: Mapping[str, str]) -> "PromptTemplate":
        """Fill known placeholders, leaving the rest in place."""
        def sub(m: re.Match) -> str:
            name = m.group(1)
            return values[name] if name in values else m.group(0)

        return PromptTemplate(_PLACEHOLDER.sub(sub, self.text))


@dataclass(frozen=True)
class ClearSlots:
    names: tuple[str, ...]


@dataclass(frozen=True)
class Say:
    text: str


Action = Union[ClearSlots, Say]


@dataclass(frozen=True)
class SlotDecl:
    name: str
    prompt: PromptTemplate


@dataclass(frozen=True)
class Block:
    name: str
    messages: tuple[str, ...]


@dataclass(frozen=True)
class MixedForm:
    name: str
    grammar_ref: str
    slots: tuple[SlotDecl, ...]

    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)


@dataclass(frozen=True)
class ConfirmBranch:
    value: str
    actions: tuple[Action, ...]


@dataclass(frozen=True)
class ConfirmStage:
    name: str
    slot: SlotDecl
    on_value: tuple[ConfirmBranch, ...]

    def accepted_values(self) -> tuple[str, ...]:
        return tuple(b.value for b in self.on_value)

    def branch(self, value: str) -> ConfirmBranch:
        for b in self.on_value:
            if b.value == value:
                return b
        raise KeyError(value)


Stage = Union[Block, MixedForm, ConfirmStage]


@dataclass(frozen=True)
class DialogScript:
    name: str
    stages: tuple[Stage, ...]

    def forms(self) -> tuple[MixedForm, ...]:
        return tuple(s for s in self.stages if isinstance(s, MixedForm))

    def form_slots(self) -> tuple[str, ...]:
        return tuple(n for f in self.forms() for n in f.slot_names())

    def declared_slots(self) -> tuple[str, ...]:
        """All declared slot names (form slots and confirm slots) in document order."""
        out: list[str] = []
        for stage in self.stages:
            if isinstance(stage, MixedForm):
                out.extend(stage.slot_names())
            elif isinstance(stage, ConfirmStage):
                out.append(stage.slot.name)
        return tuple(out)


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    message: str


# --- validation -------------------------------------------------------------

def validate(script: DialogScript) -> list[Issue]:
    """Check every structural invariant; an empty list means the script is valid."""
    issues: list[Issue] = []
    if not script.stages:
        issues.append(Issue("no-stages", script.name, "script has no stages"))

    stage_names: set[str] = set()
    for stage in script.stages:
        if stage.name in stage_names:
            issues.append(
                Issue("duplicate-stage", stage.name, f"duplicate stage {stage.name}")
            )
        stage_names.add(stage.name)

    declared: set[str] = set()
    for stage in script.stages:
        decls: tuple[SlotDecl, ...]
        if isinstance(stage, MixedForm):
            if not stage.slots:
                issues.append(
                    Issue("empty-form", stage.name, f"form {stage.name} has no slots")
                )
            decls = stage.slots
        elif isinstance(stage, ConfirmStage):
            decls = (stage.slot,)
        else:
            continue
        for decl in decls:
            if decl.name in declared:
                issues.append(
                    Issue("duplicate-slot", decl.name, f"duplicate slot {decl.name}")
                )
            declared.add(decl.name)
            if not decl.prompt.text.strip():
                issues.append(
                    Issue("empty-prompt", decl.name, f"empty prompt for slot {decl.name}")
                )

    for stage in script.stages:
        if isinstance(stage, MixedForm):
            templates = [d.prompt for d in stage.slots]
        elif isinstance(stage, ConfirmStage):
            templates = [stage.slot.prompt]
        else:
            continue
        for template in templates:
            for ref in template.placeholders():
                if ref not in declared:
                    issues.append(
                        Issue("unknown-slot", ref, f"undeclared slot {ref}")
                    )
        if isinstance(stage, ConfirmStage):
            seen_values: set[str] = set()
            for branch in stage.on_value:
                if branch.value in seen_values:
                    issues.append(
                        Issue(
                            "duplicate-branch",
                            branch.value,
                            f"duplicate confirm branch {branch.value}",
                        )
                    )
                seen_values.add(branch.value)
                for action in branch.actions:
                    if isinstance(action, ClearSlots):
                        for name in action.names:
                            if name not in declared:
                                issues.append(
                                    Issue("unknown-slot", name, f"undeclared slot {name}")
                                )
    return issues


# --- lexer ------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT | STRING | LBRACE | RBRACE | SEMI | EOF
    value: str
    line: int
    col: int


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "{":
            tokens.append(_Token("LBRACE", "{", line, col))
            i += 1
            col += 1
            continue
        if ch == "}":
            tokens.append(_Token("RBRACE", "}", line, col))
            i += 1
            col += 1
            continue
        if ch == ";":
            tokens.append(_Token("SEMI", ";", line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise ScriptSyntaxError("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise ScriptSyntaxError("unterminated escape", line, col)
                    esc = text[i + 1]
                    buf.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    i += 2
                    col += 2
                    continue
                buf.append(c)
                i += 1
                col += 1
            tokens.append(_Token("STRING", "".join(buf), start_line, start_col))
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        raise ScriptSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            wanted = value if value is not None else kind
            raise ScriptSyntaxError(
                f"expected {wanted}, got {tok.value or tok.kind!r}", tok.line, tok.col
            )
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value == word

    def parse_script(self) -> DialogScript:
        self.expect("IDENT", "dialog")
        name = self.expect("IDENT").value
        self.expect("LBRACE")
        stages: list[Stage] = []
        while not self.peek().kind == "RBRACE":
            stages.append(self.parse_stage(len(stages)))
        self.expect("RBRACE")
        self.expect("EOF")
        return DialogScript(name=name, stages=tuple(stages))

    def parse_stage(self, index: int) -> Stage:
        tok = self.peek()
        if self.at_keyword("greet"):
            self.advance()
            messages: list[str] = []
            while self.peek().kind == "STRING":
                messages.append(self.advance().value)
            if not messages:
                raise ScriptSyntaxError("greet requires at least one message", tok.line, tok.col)
            return Block(name=f"greet_{index}", messages=tuple(messages))
        if self.at_keyword("form"):
            self.advance()
            name = self.expect("IDENT").value
            self.expect("IDENT", "grammar")
            ref = self.expect("STRING").value
            self.expect("LBRACE")
            slots: list[SlotDecl] = []
            while self.at_keyword("slot"):
                self.advance()
                slot_name = self.expect("IDENT").value
                self.expect("IDENT", "prompt")
                prompt = self.expect("STRING").value
                slots.append(SlotDecl(slot_name, PromptTemplate(prompt)))
            close = self.peek()
            if not slots:
                raise ScriptSyntaxError("form requires at least one slot", close.line, close.col)
            self.expect("RBRACE")
            return MixedForm(name=name, grammar_ref=ref, slots=tuple(slots))
        if self.at_keyword("confirm"):
            self.advance()
            name = self.expect("IDENT").value
            self.expect("IDENT", "prompt")
            prompt = self.expect("STRING").value
            branches: list[ConfirmBranch] = []
            while self.at_keyword("on"):
                self.advance()
                value = self.expect("IDENT").value
                self.expect("LBRACE")
                actions: list[Action] = []
                while not self.peek().kind == "RBRACE":
                    actions.append(self.parse_action())
                self.expect("RBRACE")
                branches.append(ConfirmBranch(value, tuple(actions)))
            if not branches:
                raise ScriptSyntaxError("confirm requires at least one on-branch", tok.line, tok.col)
            return ConfirmStage(name=name, slot=SlotDecl(name, PromptTemplate(prompt)), on_value=tuple(branches))
        raise ScriptSyntaxError(f"expected a stage, got {tok.value!r}", tok.line, tok.col)

    def parse_action(self) -> Action:
        tok = self.peek()
        if self.at_keyword("clear"):
            self.advance()
            names: list[str] = []
            while self.peek().kind == "IDENT":
                names.append(self.advance().value)
            if not names:
                raise ScriptSyntaxError("clear requires at least one slot name", tok.line, tok.col)
            self.expect("SEMI")
            return ClearSlots(tuple(names))
        if self.at_keyword("say"):
            self.advance()
            text = self.expect("STRING").value
            self.expect("SEMI")
            return Say(text)
        raise ScriptSyntaxError(f"expected an action, got {tok.value!r}", tok.line, tok.col)


def _parse_time_issues(script: DialogScript) -> list[Issue]:
    """Issues that make a source unparseable, as opposed to lint findings.

    Confirmation prompts and clear lists may name slots with no surviving
    declaration: they are resolved against the interpreter's store at run
    time, and residual scripts rely on this. Form prompts may not.
    """
    issues = [i for i in validate(script) if i.code != "unknown-slot"]
    declared = set(script.declared_slots())
    for form in script.forms():
        for decl in form.slots:
            for ref in decl.prompt.placeholders():
                if ref not in declared:
                    issues.append(Issue("unknown-slot", ref, f"undeclared slot {ref}"))
    return issues


def parse_script(text: str) -> DialogScript:
    """Parse DSL source into a DialogScript, rejecting malformed scripts."""
    script = _Parser(_lex(text)).parse_script()
    issues = _parse_time_issues(script)
    if issues:
        raise ScriptSemanticError(issues[0].message, issues)
    return script


# --- renderer ---------------------------------------------------------------

def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def render_script(script: DialogScript) -> str:
    """Canonical text form: parse(render(s)) is structurally equal to s."""
    lines: list[str] = [f"dialog {script.name} {{"]
    for stage in script.stages:
        lines.extend(_render_stage(stage))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _render_stage(stage: Stage) -> Iterator[str]:
    if isinstance(stage, Block):
        yield "  greet " + " ".join(_quote(m) for m in stage.messages)
    elif isinstance(stage, MixedForm):
        yield f"  form {stage.name} grammar {_quote(stage.grammar_ref)} {{"
        for slot in stage.slots:
            yield f"    slot {slot.name} prompt {_quote(slot.prompt.text)}"
        yield "  }"
    elif isinstance(stage, ConfirmStage):
        yield f"  confirm {stage.name} prompt {_quote(stage.slot.prompt.text)}"
        for branch in stage.on_value:
            yield f"  on {branch.value} {{"
            for action in branch.actions:
                if isinstance(action, ClearSlots):
                    yield "    clear " + " ".join(action.names) + ";"
                else:
                    yield f"    say {_quote(action.text)};"
            yield "  }"
    else:  # pragma: no cover
        raise TypeError(f"unknown stage type {type(stage)!r}")
