"""Tokenizer and recursive-descent parser for the ASCII P-log syntax.

Parsing happens in two passes.  The first builds raw statements; the second
resolves every atomic expression against the declared signature, deciding
whether ``f(t) = v`` is an attribute literal or a builtin comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .errors import PlogSyntaxError, ProgramError, RangeError, SortError
from .syntax import (
    AttrDecl, DefRule, DomainDecl, DoStmt, EnumSpec, FAnd, FLit, FOr, IntRange, ObsStmt,
    PrAtom, Program, ProgramSpec, RandomSel, RangeSpec, Rule, Signature, SortDecl,
)
from .terms import BOOLEAN, FALSE, TRUE, ATerm, BinOp, Cmp, ExtLit, Fn, Lit, SortAtom, Val, Var

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+|%[^\n]*"),
    ("DECIMAL", r"\d+\.\d+"),
    ("INT", r"\d+"),
    ("HASH", r"#[a-z]+"),
    ("VAR", r"[A-Z][A-Za-z0-9_]*"),
    ("IDENT", r"[a-z_][A-Za-z0-9_]*"),
    ("OP", r":-|\.\.|!=|<>|<=|>=|->|←|≠|≤|≥|¬|×|[=<>+\-*/()\[\]{},.:|~&]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))
_ALIASES = {"←": ":-", "≠": "!=", "<>": "!=", "≤": "<=", "≥": ">=", "¬": "~", "×": "*"}
_RELOPS = ("=", "!=", "<", "<=", ">", ">=")
_KEYWORDS = {"not", "random", "pr", "obs", "do", "mod"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PlogSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "WS":
            tokens.append(Token(kind, _ALIASES.get(tok, tok), line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# Raw atomic expressions produced by the first pass.


@dataclass(frozen=True)
class RawBare:
    term: Any


@dataclass(frozen=True)
class RawNeg:
    term: Any
    value: Any = None


@dataclass(frozen=True)
class RawRel:
    left: Any
    op: str
    right: Any


@dataclass(frozen=True)
class RawNaf:
    atomic: Any


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("OP", "IDENT", "HASH")

    def error(self, message: str, expected: str = "") -> PlogSyntaxError:
        t = self.tok
        found = t.text or "end of input"
        return PlogSyntaxError(f"{message}, found {found!r}", t.line, t.col, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error("unexpected token", repr(text))
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        t = self.tok
        if t.kind != "IDENT":
            raise self.error("unexpected token", "identifier")
        self.i += 1
        return t.text

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "INT":
            raise self.error("unexpected token", "integer")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    # terms

    def term(self) -> Any:
        left = self.product()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.product())
        return left

    def product(self) -> Any:
        left = self.primary()
        while self.at("*") or self.at("/") or (self.tok.kind == "IDENT" and self.tok.text == "mod"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.primary())
        return left

    def primary(self) -> Any:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return int(t.text)
        if t.text == "-" and self.peek().kind == "INT":
            return self.integer()
        if t.kind == "VAR":
            self.i += 1
            return Var(t.text)
        if t.kind == "IDENT" and t.text not in _KEYWORDS:
            self.i += 1
            if self.accept("("):
                args = [self.term()]
                while self.accept(","):
                    args.append(self.term())
                self.expect(")")
                return Fn(t.text, tuple(args))
            return t.text
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        raise self.error("unexpected token", "term")

    # atomic expressions and bodies

    def atomic(self) -> Any:
        if self.accept("~"):
            term = self.primary()
            if self.accept("="):
                return RawNeg(term, self.term())
            return RawNeg(term)
        left = self.term()
        if self.tok.kind == "OP" and self.tok.text in _RELOPS:
            op = self.tok.text
            self.i += 1
            return RawRel(left, op, self.term())
        return RawBare(left)

    def body_item(self) -> Any:
        if self.tok.kind == "IDENT" and self.tok.text == "not":
            self.i += 1
            return RawNaf(self.atomic())
        return self.atomic()

    def body(self, stop=(".",)) -> list:
        items = [self.body_item()]
        while self.accept(","):
            items.append(self.body_item())
        return items

    # statements

    def program(self) -> list:
        out = []
        while self.tok.kind != "EOF":
            line = self.tok.line
            out.append((self.statement(), line))
        return out

    def statement(self) -> Any:
        t = self.tok
        if t.kind == "HASH":
            if t.text != "#domain":
                raise self.error("unknown directive", "#domain")
            self.i += 1
            pairs = []
            while True:
                sort = self.ident()
                self.expect("(")
                v = self.tok
                if v.kind != "VAR":
                    raise self.error("unexpected token", "variable")
                self.i += 1
                self.expect(")")
                pairs.append((v.text, sort))
                if not self.accept(","):
                    break
            self.expect(".")
            return DomainDecl(tuple(pairs))
        if self.at("["):
            return self.random_stmt()
        if t.kind == "IDENT":
            nxt = self.peek()
            if t.text == "random" and nxt.text == "(":
                return self.random_stmt()
            if t.text == "pr" and nxt.text in ("(", "["):
                return self.pr_stmt()
            if t.text in ("obs", "do") and nxt.text == "(":
                self.i += 2
                atomic = self.atomic()
                self.expect(")")
                self.expect(".")
                return ("obs" if t.text == "obs" else "do", atomic)
            if nxt.text in (",", ":") and nxt.kind == "OP" and self._is_attr_decl():
                return self.attr_decl()
            if nxt.text == "=" and (
                self.peek(2).text == "{" or self.peek(2).kind == "HASH"
                or (self.peek(2).kind == "INT" and self.peek(3).text == "..")
            ):
                return self.sort_decl()
        if self.accept(":-"):
            body = self.body()
            self.expect(".")
            return ("rule", None, body)
        head = self.atomic()
        body = []
        if self.accept(":-"):
            body = self.body()
        self.expect(".")
        return ("rule", head, body)

    def _is_attr_decl(self) -> bool:
        k = self.i
        while self.toks[k].kind == "IDENT":
            nxt = self.toks[k + 1].text
            if nxt == ":":
                return True
            if nxt != ",":
                return False
            k += 2
        return False

    def set_items(self) -> tuple:
        self.expect("{")
        items = []
        if not self.at("}"):
            while True:
                if self.tok.kind == "INT" or (self.at("-") and self.peek().kind == "INT"):
                    lo = self.integer()
                    if self.accept(".."):
                        items.append(IntRange(lo, self.integer()))
                    else:
                        items.append(lo)
                else:
                    term = self.primary()
                    if isinstance(term, (Var, BinOp)):
                        raise self.error("sort elements must be ground")
                    items.append(term)
                if not self.accept(","):
                    break
        self.expect("}")
        return tuple(items)

    def sort_decl(self) -> SortDecl:
        name = self.ident()
        self.expect("=")
        if self.tok.kind == "HASH":
            if self.tok.text != "#program":
                raise self.error("unknown directive", "#program")
            self.i += 1
            self.expect("{")
            rules = []
            while not self.at("}"):
                head = self.primary()
                body = []
                if self.accept(":-"):
                    for item in self.body():
                        naf = isinstance(item, RawNaf)
                        inner = item.atomic if naf else item
                        if isinstance(inner, RawRel):
                            if naf:
                                raise self.error("'not' before a comparison")
                            body.append(Cmp(inner.op, inner.left, inner.right))
                        elif isinstance(inner, RawBare):
                            body.append((inner.term, naf))
                        else:
                            raise self.error("classical negation in a sort-defining program")
                self.expect(".")
                rules.append(DefRule(head, tuple(body)))
            self.expect("}")
            spec = ProgramSpec(tuple(rules))
        elif self.at("{"):
            spec = EnumSpec(self.set_items())
        else:
            lo = self.integer()
            self.expect("..")
            spec = RangeSpec(lo, self.integer())
        self.expect(".")
        return SortDecl(name, spec)

    def attr_decl(self) -> AttrDecl:
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        self.expect(":")
        sorts = [self.sort_ref()]
        while self.accept("*") or self.accept(","):
            sorts.append(self.sort_ref())
        if self.accept("->"):
            rng = self.sort_ref()
            params = sorts
        else:
            if len(sorts) != 1:
                raise self.error("missing range", "'->'")
            rng, params = sorts[0], []
        for p in params:
            if not isinstance(p, str):
                raise self.error("parameter sorts must be named")
        self.expect(".")
        return AttrDecl(tuple(names), tuple(params), rng)

    def sort_ref(self) -> Any:
        if self.at("{"):
            return EnumSpec(self.set_items())
        return self.ident()

    def random_stmt(self) -> tuple:
        name = None
        if self.accept("["):
            name = self.term()
            self.expect("]")
            self.accept(":")
        if not (self.tok.kind == "IDENT" and self.tok.text == "random"):
            raise self.error("unexpected token", "'random'")
        self.i += 1
        self.expect("(")
        target = self.primary()
        set_var = pred = None
        if self.accept(":"):
            if self.accept("{"):
                v = self.tok
                if v.kind != "VAR":
                    raise self.error("unexpected token", "variable")
                self.i += 1
                self.expect(":")
                pred = self.ident()
                self.expect("(")
                v2 = self.tok
                if v2.text != v.text:
                    raise self.error("set-term must use its bound variable", v.text)
                self.i += 1
                self.expect(")")
                self.expect("}")
                set_var = Var(v.text)
            else:
                pred = self.ident()
                set_var = Var("X")
        self.expect(")")
        body = []
        if self.accept(":-"):
            body = self.body()
        self.expect(".")
        return ("random", name, target, set_var, pred, body)

    def pr_value(self) -> Fraction:
        t = self.tok
        if t.kind == "DECIMAL":
            self.i += 1
            value = Fraction(t.text)
        elif t.kind == "INT":
            self.i += 1
            value = Fraction(int(t.text))
            if self.accept("/"):
                d = self.tok
                if d.kind != "INT":
                    raise self.error("unexpected token", "integer denominator")
                self.i += 1
                if int(d.text) == 0:
                    raise RangeError("probability with zero denominator")
                value = value / int(d.text)
        else:
            raise self.error("unexpected token", "probability value")
        if not 0 <= value <= 1:
            raise RangeError(f"probability {value} is outside [0, 1]")
        return value

    def pr_stmt(self) -> tuple:
        self.i += 1
        rule = None
        if self.accept("["):
            rule = self.term()
            self.expect("]")
        self.expect("(")
        head = self.atomic()
        body = []
        if self.accept("|"):
            if not (self.tok.kind == "IDENT" and self.tok.text == "c"):
                raise self.error("unexpected token", "'|c'")
            self.i += 1
            body = self.body()
        self.expect(")")
        self.expect("=")
        value = self.pr_value()
        self.expect(".")
        return ("pr", rule, head, body, value)

    # formulas

    def formula(self) -> Any:
        items = [self.conjunction()]
        while self.accept("|") or self._accept_word("or"):
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else ("or", items)

    def conjunction(self) -> Any:
        items = [self.formula_unit()]
        while self.accept("&") or self.accept(",") or self._accept_word("and"):
            items.append(self.formula_unit())
        return items[0] if len(items) == 1 else ("and", items)

    def formula_unit(self) -> Any:
        if self.at("(") and not self._paren_is_term():
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        return ("lit", self.body_item())

    def _paren_is_term(self) -> bool:
        # "(" opens a sub-formula unless it starts an arithmetic comparison.
        depth, k = 0, self.i
        while self.toks[k].kind != "EOF":
            t = self.toks[k].text
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[k + 1]
                    return nxt.kind == "OP" and nxt.text in _RELOPS + ("+", "-", "*", "/")
            k += 1
        return False

    def _accept_word(self, word: str) -> bool:
        if self.tok.kind == "IDENT" and self.tok.text == word:
            self.i += 1
            return True
        return False


# Resolution


def _aterm_of(term: Any, sig: Signature) -> Optional[ATerm]:
    if isinstance(term, Fn):
        if sig.is_attr(term.name, len(term.args)):
            return ATerm(term.name, term.args)
    elif isinstance(term, str):
        if sig.is_attr(term, 0):
            return ATerm(term)
    return None


def _require_aterm(term: Any, sig: Signature) -> ATerm:
    a = _aterm_of(term, sig)
    if a is None:
        raise SortError(f"undeclared attribute in {term}")
    return a


def _make_lit(aterm: ATerm, value: Any, positive: bool, sig: Signature) -> Lit:
    if sig.is_boolean(aterm):
        if value == TRUE:
            return Lit(Val(aterm), positive)
        if value == FALSE:
            return Lit(Val(aterm), not positive)
        raise SortError(f"boolean attribute {aterm} compared with {value}")
    return Lit(Val(aterm, value), positive)


def _resolve_lit(raw: Any, sig: Signature) -> Lit:
    item = _resolve_atomic(raw, sig)
    if not isinstance(item, Lit):
        raise ProgramError(f"expected a literal, found {item}")
    return item


def _resolve_atomic(raw: Any, sig: Signature) -> Any:
    if isinstance(raw, RawNeg):
        aterm = _require_aterm(raw.term, sig)
        if raw.value is None:
            if not sig.is_boolean(aterm):
                raise SortError(f"~{aterm} needs a value: {aterm} is not boolean")
            return Lit(Val(aterm), False)
        return _make_lit(aterm, raw.value, False, sig)
    if isinstance(raw, RawBare):
        t = raw.term
        aterm = _aterm_of(t, sig)
        if aterm is not None:
            if not sig.is_boolean(aterm):
                raise SortError(f"{aterm} is not boolean and needs a value")
            return Lit(Val(aterm), True)
        if isinstance(t, Fn) and len(t.args) == 1 and (t.name in sig.sorts or t.name == BOOLEAN):
            return SortAtom(t.name, t.args[0])
        raise SortError(f"undeclared attribute or sort in {t}")
    if isinstance(raw, RawRel):
        if raw.op in ("=", "!="):
            aterm = _aterm_of(raw.left, sig)
            if aterm is not None:
                return _make_lit(aterm, raw.right, raw.op == "=", sig)
        return Cmp(raw.op, raw.left, raw.right)
    raise ProgramError(f"cannot resolve {raw}")


def _resolve_body(items, sig: Signature) -> tuple:
    out = []
    for it in items:
        if isinstance(it, RawNaf):
            inner = _resolve_atomic(it.atomic, sig)
            if isinstance(inner, Lit):
                out.append(ExtLit(inner, True))
            elif isinstance(inner, SortAtom):
                out.append(SortAtom(inner.sort, inner.arg, True))
            else:
                raise ProgramError(f"'not' cannot precede the comparison {inner}")
        else:
            inner = _resolve_atomic(it, sig)
            out.append(ExtLit(inner) if isinstance(inner, Lit) else inner)
    return tuple(out)


def _resolve(raw: Any, sig: Signature, line: int) -> Any:
    if isinstance(raw, (SortDecl, AttrDecl, DomainDecl)):
        return type(raw)(*[getattr(raw, f) for f in raw.__dataclass_fields__ if f != "line"], line=line)
    kind = raw[0]
    if kind == "rule":
        _, head, body = raw
        h = _resolve_lit(head, sig) if head is not None else None
        return Rule(h, _resolve_body(body, sig), line=line)
    if kind in ("obs", "do"):
        lit = _resolve_lit(raw[1], sig)
        if kind == "do":
            if not sig.is_boolean(lit.atom.aterm) and not lit.positive:
                raise ProgramError(f"do() takes an atom, not {lit}")
            return DoStmt(lit, line=line)
        return ObsStmt(lit, line=line)
    if kind == "random":
        _, name, target, set_var, pred, body = raw
        aterm = _require_aterm(target, sig)
        if pred is not None and pred not in sig.sorts:
            a = sig.attrs.get(pred)
            if a is None or len(a.params) != 1 or not a.is_boolean:
                raise SortError(f"{pred} in a set-term must be a sort or a unary boolean attribute")
        return RandomSel(name, aterm, set_var, pred, _resolve_body(body, sig), line=line)
    if kind == "pr":
        _, rule, head, body, value = raw
        lit = _resolve_lit(head, sig)
        if not sig.is_boolean(lit.atom.aterm) and not lit.positive:
            raise ProgramError(f"a probability atom needs an atom, not {lit}")
        return PrAtom(rule, lit, _resolve_body(body, sig), value, line=line)
    raise ProgramError(f"unknown statement kind {kind}")


def parse_program(text: str, base: Optional[Program] = None) -> Program:
    """Parse program text; declarations of ``base`` are visible for resolution."""
    raw = _Parser(text).program()
    sig = Signature()
    if base is not None:
        for s in base.statements:
            if isinstance(s, (SortDecl, AttrDecl, DomainDecl)):
                sig.add(s)
    for stmt, _ in raw:
        if isinstance(stmt, (SortDecl, AttrDecl, DomainDecl)):
            sig.add(stmt)
    return Program(tuple(_resolve(stmt, sig, line) for stmt, line in raw))


def parse_literal(text: str, sig: Signature) -> Lit:
    p = _Parser(text)
    raw = p.atomic()
    if p.tok.kind != "EOF":
        raise p.error("trailing input")
    return _resolve_lit(raw, sig)


def parse_formula(text: str, sig: Signature):
    p = _Parser(text)
    raw = p.formula()
    if p.tok.kind != "EOF":
        raise p.error("trailing input")

    def build(node):
        tag = node[0]
        if tag == "lit":
            item = _resolve_body([node[1]], sig)[0]
            if not isinstance(item, ExtLit):
                raise ProgramError(f"queries may only contain literals, found {item}")
            if not all(_ground_lit(item.lit)):
                raise ProgramError(f"query literal {item} is not ground")
            return FLit(item)
        parts = tuple(build(n) for n in node[1])
        return FAnd(parts) if tag == "and" else FOr(parts)

    return build(raw)


def _ground_lit(lit: Lit):
    from .terms import is_ground
    a = lit.atom
    yield all(is_ground(x) for x in a.aterm.args)
    yield a.value is None or is_ground(a.value)


def parse_statements(text: str, base: Program) -> Program:
    """Parse an update: statements resolved against ``base``'s declarations."""
    return parse_program(text, base)
