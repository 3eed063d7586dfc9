"""Form-level grammar support: a JSGF subset with slot-binding tags.

Accepted syntax, per grammar file:

    #JSGF V1.0;
    grammar NAME;
    public <rule> = body;
    <rule> = body;
    rule = body;            (unbracketed definitions are accepted too)

Bodies combine alternation `|`, sequences, optionals `[...]`, groups `(...)`,
postfix `*`, rule references `<name>` (or a bare name that is defined as a
rule), and tags `{this.SLOT=$}` which bind the text matched by the reference
immediately before them. Weights, imports, kleene `+`, and recursive rules are
not part of the subset.

Matching has two modes. Strict derives the whole utterance from the public
rule. Spot scans left to right for the longest terminal of any tagged slot
rule, skipping tokens it cannot place; this is what lets carrier phrases like
"I'd like a ..." through.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    ConflictError,
    GrammarSemanticError,
    GrammarSyntaxError,
    NoMatchError,
    UnknownSlotError,
)
from .policy import ConflictPolicy

# Punctuation stripped from token edges; apostrophes inside tokens survive.
_PUNCT = ".,!?;:\"'"


def tokenize(text: str) -> list[str]:
    """Lowercase a raw utterance into plain word tokens.

    Hyphens separate tokens so "deep-dish" matches the terminal "deep dish".
    """
    out: list[str] = []
    for raw in text.lower().replace("-", " ").split():
        word = raw.strip(_PUNCT)
        if word:
            out.append(word)
    return out


# --- rule expressions ---------------------------------------------------------

@dataclass(frozen=True)
class Terminal:
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class NonTerm:
    name: str
    tag: str | None = None


@dataclass(frozen=True)
class Seq:
    items: tuple["RuleExpr", ...]


@dataclass(frozen=True)
class Alt:
    items: tuple["RuleExpr", ...]


@dataclass(frozen=True)
class Opt:
    body: "RuleExpr"


@dataclass(frozen=True)
class Star:
    body: "RuleExpr"


RuleExpr = Union[Terminal, NonTerm, Seq, Alt, Opt, Star]


@dataclass(frozen=True)
class SlotFill:
    slot: str
    value: str
    span: tuple[int, int]


class MatchMode(enum.Enum):
    STRICT = "strict"
    SPOT = "spot"


@dataclass(frozen=True)
class MatchConfig:
    mode: MatchMode = MatchMode.SPOT
    conflict_policy: ConflictPolicy = ConflictPolicy.LAST_WINS


@dataclass(frozen=True)
class Grammar:
    name: str
    rules: dict[str, RuleExpr] = field(hash=False)
    public_rule: str

    def tagged_slots(self) -> dict[str, list[str]]:
        """slot name -> rule names bound to it, in document order."""
        out: dict[str, list[str]] = {}
        for expr in self.rules.values():
            for ref in _walk(expr):
                if isinstance(ref, NonTerm) and ref.tag:
                    out.setdefault(ref.tag, [])
                    if ref.name not in out[ref.tag]:
                        out[ref.tag].append(ref.name)
        return out


def _walk(expr: RuleExpr) -> Iterator[RuleExpr]:
    yield expr
    if isinstance(expr, (Seq, Alt)):
        for item in expr.items:
            yield from _walk(item)
    elif isinstance(expr, (Opt, Star)):
        yield from _walk(expr.body)


# --- parsing ------------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # WORD | SYM | TAG | EOF
    value: str
    line: int
    col: int


_TAG = re.compile(r"\{\s*this\.([A-Za-z_][A-Za-z0-9_]*)\s*=\s*\$\s*\}")
_WORD = re.compile(r"[A-Za-z0-9_'][A-Za-z0-9_'.-]*")
_SYMS = "<>=;|[]()*"


def _lex_grammar(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
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
        if ch == "{":
            m = _TAG.match(text, i)
            if not m:
                raise GrammarSyntaxError("malformed tag (expected {this.NAME=$})", line, col)
            tokens.append(_Tok("TAG", m.group(1), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch in _SYMS:
            tokens.append(_Tok("SYM", ch, line, col))
            i += 1
            col += 1
            continue
        m = _WORD.match(text, i)
        if m:
            tokens.append(_Tok("WORD", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        raise GrammarSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Tok("EOF", "", line, col))
    return tokens


@dataclass
class _RawRule:
    name: str
    public: bool
    body: list[_Tok]
    line: int


def _split_rules(text: str) -> tuple[str, list[_RawRule]]:
    """First pass: header checks plus raw (name, body-token) pairs."""
    if not text.lstrip().startswith("#JSGF"):
        raise GrammarSyntaxError("missing #JSGF header", 1, 1)
    body_text = text.lstrip()
    header_end = body_text.find("\n")
    remainder = body_text[header_end + 1 :] if header_end >= 0 else ""
    tokens = _lex_grammar(remainder)

    pos = 0

    def peek() -> _Tok:
        return tokens[pos]

    def take() -> _Tok:
        nonlocal pos
        tok = tokens[pos]
        if tok.kind != "EOF":
            pos += 1
        return tok

    def expect_sym(sym: str) -> None:
        tok = take()
        if tok.kind != "SYM" or tok.value != sym:
            raise GrammarSyntaxError(f"expected {sym!r}, got {tok.value!r}", tok.line, tok.col)

    # grammar NAME ;
    tok = take()
    if not (tok.kind == "WORD" and tok.value == "grammar"):
        raise GrammarSyntaxError("expected 'grammar' declaration", tok.line, tok.col)
    name_tok = take()
    if name_tok.kind != "WORD":
        raise GrammarSyntaxError("expected grammar name", name_tok.line, name_tok.col)
    expect_sym(";")

    rules: list[_RawRule] = []
    while peek().kind != "EOF":
        tok = take()
        public = False
        if tok.kind == "WORD" and tok.value == "public":
            public = True
            tok = take()
        if tok.kind == "SYM" and tok.value == "<":
            rule_name = take()
            if rule_name.kind != "WORD":
                raise GrammarSyntaxError("expected rule name", rule_name.line, rule_name.col)
            expect_sym(">")
            rname = rule_name.value
        elif tok.kind == "WORD":
            rname = tok.value
        else:
            raise GrammarSyntaxError(f"expected a rule definition, got {tok.value!r}", tok.line, tok.col)
        expect_sym("=")
        body: list[_Tok] = []
        while True:
            tok = peek()
            if tok.kind == "EOF":
                raise GrammarSyntaxError("unterminated rule (missing ';')", tok.line, tok.col)
            if tok.kind == "SYM" and tok.value == ";":
                take()
                break
            body.append(take())
        rules.append(_RawRule(rname, public, body, body[0].line if body else tok.line))
    return name_tok.value, rules


class _BodyParser:
    """Second pass: parse one rule body with all rule names known."""

    def __init__(self, tokens: list[_Tok], rule_names: set[str]):
        self.tokens = tokens + [_Tok("EOF", "", 0, 0)]
        self.pos = 0
        self.rule_names = rule_names

    def peek(self) -> _Tok:
        return self.tokens[self.pos]

    def take(self) -> _Tok:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def parse(self) -> RuleExpr:
        expr = self.parse_alt()
        tok = self.peek()
        if tok.kind != "EOF":
            raise GrammarSyntaxError(f"unexpected {tok.value!r}", tok.line, tok.col)
        return expr

    def parse_alt(self) -> RuleExpr:
        items = [self.parse_seq()]
        while self.peek().kind == "SYM" and self.peek().value == "|":
            self.take()
            items.append(self.parse_seq())
        return items[0] if len(items) == 1 else Alt(tuple(items))

    def _at_atom(self) -> bool:
        tok = self.peek()
        if tok.kind == "WORD":
            return True
        return tok.kind == "SYM" and tok.value in "<[("

    def parse_seq(self) -> RuleExpr:
        items: list[RuleExpr] = []
        while self._at_atom():
            items.append(self.parse_atom())
        if not items:
            tok = self.peek()
            raise GrammarSyntaxError("expected a rule element", tok.line, tok.col)
        return items[0] if len(items) == 1 else Seq(tuple(items))

    def parse_atom(self) -> RuleExpr:
        expr = self.parse_primary()
        while self.peek().kind == "SYM" and self.peek().value == "*":
            self.take()
            expr = Star(expr)
        return expr

    def parse_primary(self) -> RuleExpr:
        tok = self.peek()
        if tok.kind == "SYM" and tok.value == "<":
            self.take()
            name = self.take()
            if name.kind != "WORD":
                raise GrammarSyntaxError("expected rule name", name.line, name.col)
            close = self.take()
            if close.kind != "SYM" or close.value != ">":
                raise GrammarSyntaxError("expected '>'", close.line, close.col)
            return NonTerm(name.value, self._maybe_tag())
        if tok.kind == "SYM" and tok.value == "(":
            self.take()
            inner = self.parse_alt()
            close = self.take()
            if close.kind != "SYM" or close.value != ")":
                raise GrammarSyntaxError("expected ')'", close.line, close.col)
            return inner
        if tok.kind == "SYM" and tok.value == "[":
            self.take()
            inner = self.parse_alt()
            close = self.take()
            if close.kind != "SYM" or close.value != "]":
                raise GrammarSyntaxError("expected ']'", close.line, close.col)
            return Opt(inner)
        if tok.kind == "WORD":
            if tok.value in self.rule_names:
                self.take()
                return NonTerm(tok.value, self._maybe_tag())
            # maximal run of plain words forms one terminal
            words: list[str] = []
            while (
                self.peek().kind == "WORD"
                and self.peek().value not in self.rule_names
            ):
                words.append(self.take().value.lower())
                # a '*' binds to the run collected so far, so stop extending
                if self.peek().kind == "SYM" and self.peek().value == "*":
                    break
            if self.peek().kind == "TAG":
                bad = self.peek()
                raise GrammarSyntaxError("tag must follow a rule reference", bad.line, bad.col)
            return Terminal(tuple(words))
        if tok.kind == "TAG":
            raise GrammarSyntaxError("tag must follow a rule reference", tok.line, tok.col)
        raise GrammarSyntaxError(f"unexpected {tok.value!r}", tok.line, tok.col)

    def _maybe_tag(self) -> str | None:
        if self.peek().kind == "TAG":
            return self.take().value
        return None


def parse_grammar(text: str) -> Grammar:
    """Parse grammar source; rejects undefined references and rule cycles."""
    name, raw_rules = _split_rules(text)
    rule_names = {r.name for r in raw_rules}
    rules: dict[str, RuleExpr] = {}
    public: str | None = None
    for raw in raw_rules:
        if raw.name in rules:
            raise GrammarSemanticError(f"duplicate rule <{raw.name}>")
        rules[raw.name] = _BodyParser(raw.body, rule_names).parse()
        if raw.public:
            if public is not None:
                raise GrammarSemanticError("multiple public rules")
            public = raw.name
    if public is None:
        raise GrammarSemanticError("no public rule")

    for rule_name, expr in rules.items():
        for node in _walk(expr):
            if isinstance(node, NonTerm) and node.name not in rules:
                raise GrammarSemanticError(
                    f"undefined nonterminal <{node.name}> in <{rule_name}>"
                )
    _check_acyclic(rules)
    return Grammar(name=name, rules=rules, public_rule=public)


def _check_acyclic(rules: dict[str, RuleExpr]) -> None:
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str, path: tuple[str, ...]) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            cycle = " -> ".join(path + (name,))
            raise GrammarSemanticError(f"recursive rule cycle: {cycle}")
        state[name] = 1
        for node in _walk(rules[name]):
            if isinstance(node, NonTerm):
                visit(node.name, path + (name,))
        state[name] = 2

    for name in rules:
        visit(name, ())


# --- expansion and vocabulary ---------------------------------------------------

def _expand(grammar: Grammar, expr: RuleExpr) -> list[tuple[str, ...]]:
    """All token sequences derivable from expr. Star is unbounded and rejected."""
    if isinstance(expr, Terminal):
        return [expr.tokens]
    if isinstance(expr, NonTerm):
        return _expand(grammar, grammar.rules[expr.name])
    if isinstance(expr, Alt):
        out: list[tuple[str, ...]] = []
        for item in expr.items:
            for phrase in _expand(grammar, item):
                if phrase not in out:
                    out.append(phrase)
        return out
    if isinstance(expr, Seq):
        combos: list[tuple[str, ...]] = [()]
        for item in expr.items:
            combos = [a + b for a in combos for b in _expand(grammar, item)]
        return combos
    if isinstance(expr, Opt):
        out = [()]
        for phrase in _expand(grammar, expr.body):
            if phrase not in out:
                out.append(phrase)
        return out
    if isinstance(expr, Star):
        raise GrammarSemanticError("cannot enumerate an unbounded rule")
    raise TypeError(f"unknown expr {type(expr)!r}")  # pragma: no cover


def slot_vocabulary(grammar: Grammar, slot: str) -> set[str]:
    """Every terminal phrase the slot's tagged rule(s) can produce."""
    tagged = grammar.tagged_slots()
    if slot not in tagged:
        raise UnknownSlotError(slot, f"grammar {grammar.name}")
    phrases: set[str] = set()
    for rule_name in tagged[slot]:
        for tokens in _expand(grammar, grammar.rules[rule_name]):
            if tokens:
                phrases.add(" ".join(tokens))
    return phrases


# --- matching -------------------------------------------------------------------

def _derivations(
    grammar: Grammar, expr: RuleExpr, tokens: list[str], pos: int
) -> Iterator[tuple[int, tuple[SlotFill, ...]]]:
    if isinstance(expr, Terminal):
        end = pos + len(expr.tokens)
        if tuple(tokens[pos:end]) == expr.tokens:
            yield end, ()
        return
    if isinstance(expr, NonTerm):
        for end, sub in _derivations(grammar, grammar.rules[expr.name], tokens, pos):
            if expr.tag and end > pos:
                fill = SlotFill(expr.tag, " ".join(tokens[pos:end]), (pos, end))
                yield end, sub + (fill,)
            else:
                yield end, sub
        return
    if isinstance(expr, Seq):
        def seq_from(i: int, at: int, acc: tuple[SlotFill, ...]):
            if i == len(expr.items):
                yield at, acc
                return
            for end, sub in _derivations(grammar, expr.items[i], tokens, at):
                yield from seq_from(i + 1, end, acc + sub)

        yield from seq_from(0, pos, ())
        return
    if isinstance(expr, Alt):
        for item in expr.items:
            yield from _derivations(grammar, item, tokens, pos)
        return
    if isinstance(expr, Opt):
        yield from _derivations(grammar, expr.body, tokens, pos)
        yield pos, ()
        return
    if isinstance(expr, Star):
        def reps(at: int, acc: tuple[SlotFill, ...]):
            for end, sub in _derivations(grammar, expr.body, tokens, at):
                if end == at:
                    continue  # no progress, would loop
                yield from reps(end, acc + sub)
            yield at, acc

        yield from reps(pos, ())
        return
    raise TypeError(f"unknown expr {type(expr)!r}")  # pragma: no cover


def _match_strict(grammar: Grammar, tokens: list[str]) -> list[SlotFill]:
    for end, fills in _derivations(grammar, NonTerm(grammar.public_rule), tokens, 0):
        if end == len(tokens):
            return sorted(fills, key=lambda f: f.span)
    return []


def _match_spot(grammar: Grammar, tokens: list[str]) -> list[SlotFill]:
    # slot order follows the first tag occurrence in the grammar
    vocab: list[tuple[str, list[tuple[str, ...]]]] = []
    for slot, rule_names in grammar.tagged_slots().items():
        phrases: list[tuple[str, ...]] = []
        for rule_name in rule_names:
            for phrase in _expand(grammar, grammar.rules[rule_name]):
                if phrase and phrase not in phrases:
                    phrases.append(phrase)
        vocab.append((slot, phrases))

    fills: list[SlotFill] = []
    pos = 0
    while pos < len(tokens):
        best: tuple[int, int, str, tuple[str, ...]] | None = None  # (-len, slot_idx, ...)
        for slot_idx, (slot, phrases) in enumerate(vocab):
            for phrase in phrases:
                end = pos + len(phrase)
                if tuple(tokens[pos:end]) != phrase:
                    continue
                key = (-len(phrase), slot_idx)
                if best is None or key < (best[0], best[1]):
                    best = (-len(phrase), slot_idx, slot, phrase)
        if best is None:
            pos += 1
            continue
        _, _, slot, phrase = best
        fills.append(SlotFill(slot, " ".join(phrase), (pos, pos + len(phrase))))
        pos += len(phrase)
    return fills


def _collapse(fills: list[SlotFill], policy: ConflictPolicy) -> list[SlotFill]:
    chosen: dict[str, SlotFill] = {}
    for fill in fills:
        if fill.slot in chosen:
            if policy is ConflictPolicy.REJECT:
                raise ConflictError(fill.slot, (chosen[fill.slot].value, fill.value))
            if policy is ConflictPolicy.FIRST_WINS:
                continue
        chosen[fill.slot] = fill
    return sorted(chosen.values(), key=lambda f: f.span)


def match_utterance(
    grammar: Grammar, utterance: str, config: MatchConfig = MatchConfig()
) -> list[SlotFill]:
    """Match an utterance and return slot fills in utterance order.

    Raises NoMatchError when nothing fills, ConflictError under the Reject
    policy when one slot would be bound twice.
    """
    tokens = tokenize(utterance)
    if config.mode is MatchMode.STRICT:
        fills = _match_strict(grammar, tokens)
    else:
        fills = _match_spot(grammar, tokens)
    collapsed = _collapse(fills, config.conflict_policy)
    if not collapsed:
        raise NoMatchError(f"no slot fills in {utterance!r}")
    return collapsed
