"""First-order syntax: vocabularies, terms, formulas, parser and printer.

Concrete syntax::

    formula  := "forall" IDENT "." formula | "exists" IDENT "." formula | iff
    iff      := imp [ "<->" imp ]
    imp      := or [ "->" imp ]
    or       := and { "|" and }
    and      := unary { "&" unary }
    unary    := "~" unary | "(" formula ")" | atom
    atom     := term "=" term | IDENT [ "(" term { "," term } ")" ]
    term     := IDENT [ "(" term { "," term } ")" ]

Identifiers bound by an enclosing quantifier are variables; everything else
resolves through the vocabulary.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

KEYWORDS = frozenset({"forall", "exists"})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class VocabularyError(ValueError):
    pass


class ParseError(ValueError):
    """Syntax or well-formedness error with a character offset."""

    def __init__(self, message, pos=None, expected=(), text=None):
        self.pos = pos
        self.expected = tuple(expected)
        self.text = text
        detail = message
        if pos is not None:
            detail = f"{message} at offset {pos}"
            if text is not None:
                line = text.count("\n", 0, pos) + 1
                col = pos - (text.rfind("\n", 0, pos) + 1) + 1
                detail = f"{message} at line {line}, column {col}"
        if self.expected:
            detail += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(detail)


@dataclass(frozen=True)
class Vocabulary:
    """Relation, function and constant symbols.  Order is significant."""

    relations: tuple = ()   # (name, arity)
    functions: tuple = ()   # (name, arity)
    constants: tuple = ()   # name

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(n), int(a)) for n, a in self.relations))
        object.__setattr__(self, "functions", tuple((str(n), int(a)) for n, a in self.functions))
        object.__setattr__(self, "constants", tuple(str(c) for c in self.constants))
        seen = set()
        for name in self.symbol_names():
            if not _IDENT.match(name) or name in KEYWORDS:
                raise VocabularyError(f"bad symbol name {name!r}")
            if name in seen:
                raise VocabularyError(f"symbol {name!r} declared twice")
            seen.add(name)
        for name, arity in self.relations:
            if arity < 0:
                raise VocabularyError(f"relation {name} has negative arity")
        for name, arity in self.functions:
            if arity < 1:
                raise VocabularyError(f"function {name} needs arity >= 1; use a constant")

    def symbol_names(self):
        return [n for n, _ in self.relations] + [n for n, _ in self.functions] + list(self.constants)

    def relation_arity(self, name):
        return dict(self.relations).get(name)

    def function_arity(self, name):
        return dict(self.functions).get(name)

    def has_constant(self, name):
        return name in self.constants

    def kind(self, name):
        if name in dict(self.relations):
            return "relation"
        if name in dict(self.functions):
            return "function"
        if name in self.constants:
            return "constant"
        return None

    def union(self, other: "Vocabulary") -> "Vocabulary":
        """Merge two vocabularies, keeping first-seen order; clashes raise."""
        rels, funs, consts = list(self.relations), list(self.functions), list(self.constants)
        for name, arity in other.relations:
            k = self.kind(name)
            if k is None:
                rels.append((name, arity))
            elif k != "relation" or self.relation_arity(name) != arity:
                raise VocabularyError(f"symbol {name!r} clashes between vocabularies")
        for name, arity in other.functions:
            k = self.kind(name)
            if k is None:
                funs.append((name, arity))
            elif k != "function" or self.function_arity(name) != arity:
                raise VocabularyError(f"symbol {name!r} clashes between vocabularies")
        for name in other.constants:
            k = self.kind(name)
            if k is None:
                consts.append(name)
            elif k != "constant":
                raise VocabularyError(f"symbol {name!r} clashes between vocabularies")
        return Vocabulary(tuple(rels), tuple(funs), tuple(consts))

    def max_arity(self):
        return max([a for _, a in self.relations] + [a for _, a in self.functions] + [0])


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, App]


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, Not, And, Or, Implies, Iff, Forall, Exists]
Sentence = Formula
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction, the shape the parser produces for a & b & c."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def forall(names, body):
    for v in reversed(list(names)):
        body = Forall(v, body)
    return body


def iterate(fn: str, t: Term, times: int) -> Term:
    """fn applied `times` times to t."""
    for _ in range(times):
        t = App(fn, (t,))
    return t


# ---------------------------------------------------------------- analysis

def term_variables(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def is_ground(t: Term) -> bool:
    return not term_variables(t)


def free_variables(f: Formula) -> set:
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= term_variables(a)
        return out
    if isinstance(f, Eq):
        return term_variables(f.left) | term_variables(f.right)
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, BINARY):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def substitute_term(t: Term, var: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == var else t
    if isinstance(t, Const):
        return t
    return App(t.func, tuple(substitute_term(a, var, s) for a in t.args))


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Replace free occurrences of `var` by the ground term `t`."""
    if not is_ground(t):
        raise ValueError("substitute needs a ground term")
    return _subst(f, var, t)


def _subst(f, var, t):
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(substitute_term(a, var, t) for a in f.args))
    if isinstance(f, Eq):
        return Eq(substitute_term(f.left, var, t), substitute_term(f.right, var, t))
    if isinstance(f, Not):
        return Not(_subst(f.body, var, t))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, var, t), _subst(f.right, var, t))
    if isinstance(f, QUANTIFIERS):
        if f.var == var:
            return f
        return type(f)(f.var, _subst(f.body, var, t))
    raise TypeError(f"not a formula: {f!r}")


def symbols_used(f) -> set:
    """Names of relation, function and constant symbols occurring in f."""
    out = set()

    def term(t):
        if isinstance(t, Const):
            out.add(t.name)
        elif isinstance(t, App):
            out.add(t.func)
            for a in t.args:
                term(a)

    def walk(g):
        if isinstance(g, Atom):
            out.add(g.rel)
            for a in g.args:
                term(a)
        elif isinstance(g, Eq):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body)
        elif isinstance(g, (Var, Const, App)):
            term(g)
    walk(f)
    return out


def check_formula(f: Formula, vocab: Vocabulary) -> None:
    """Raise VocabularyError unless every symbol of f is declared with the right arity."""

    def term(t, bound):
        if isinstance(t, Var):
            return
        if isinstance(t, Const):
            if not vocab.has_constant(t.name):
                raise VocabularyError(f"undeclared constant {t.name!r}")
            return
        arity = vocab.function_arity(t.func)
        if arity is None:
            raise VocabularyError(f"undeclared function {t.func!r}")
        if arity != len(t.args):
            raise VocabularyError(f"function {t.func} expects {arity} arguments, got {len(t.args)}")
        for a in t.args:
            term(a, bound)

    def walk(g, bound):
        if isinstance(g, Atom):
            arity = vocab.relation_arity(g.rel)
            if arity is None:
                raise VocabularyError(f"undeclared relation {g.rel!r}")
            if arity != len(g.args):
                raise VocabularyError(f"relation {g.rel} expects {arity} arguments, got {len(g.args)}")
            for a in g.args:
                term(a, bound)
        elif isinstance(g, Eq):
            term(g.left, bound)
            term(g.right, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, BINARY):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body, bound | {g.var})
        else:
            raise TypeError(f"not a formula: {g!r}")
    walk(f, frozenset())


def check_sentence(f: Formula, vocab: Vocabulary) -> None:
    check_formula(f, vocab)
    free = free_variables(f)
    if free:
        raise VocabularyError("free variable " + ", ".join(sorted(free)))


# ---------------------------------------------------------------- printer

def print_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return f"{t.func}(" + ",".join(print_term(a) for a in t.args) + ")"


_OPS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def print_formula(f: Formula) -> str:
    """Fully parenthesized rendering; parse(print(f)) == f."""
    if isinstance(f, Atom):
        if not f.args:
            return f.rel
        return f"{f.rel}(" + ",".join(print_term(a) for a in f.args) + ")"
    if isinstance(f, Eq):
        return f"({print_term(f.left)} = {print_term(f.right)})"
    if isinstance(f, Not):
        return "~" + _operand(f.body)
    if isinstance(f, BINARY):
        return f"({_operand(f.left)} {_OPS[type(f)]} {_operand(f.right)})"
    if isinstance(f, Forall):
        return f"forall {f.var}. {print_formula(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {print_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f):
    # a quantifier would swallow everything to its right, so wrap it
    s = print_formula(f)
    return f"({s})" if isinstance(f, QUANTIFIERS) else s


print_sentence = print_formula


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[().,=~&|])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # ident, op, end
    text: str
    pos: int


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text=text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token("ident" if kind == "ident" else "op", m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text, vocab):
        self.text = text
        self.vocab = vocab
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected, tok=None):
        tok = tok or self.peek()
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {got}", tok.pos, expected, self.text)

    def expect(self, text):
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            self.fail([repr(text)])
        return self.advance()

    def at(self, text):
        tok = self.peek()
        return tok.kind == "op" and tok.text == text

    def formula(self, bound):
        tok = self.peek()
        if tok.kind == "ident" and tok.text in KEYWORDS:
            self.advance()
            var = self.peek()
            if var.kind != "ident" or var.text in KEYWORDS:
                self.fail(["variable name"])
            self.advance()
            self.expect(".")
            body = self.formula(bound | {var.text})
            return (Forall if tok.text == "forall" else Exists)(var.text, body)
        return self.iff(bound)

    def iff(self, bound):
        left = self.imp(bound)
        if self.at("<->"):
            self.advance()
            right = self.imp(bound)
            if self.at("<->"):
                self.fail(["')'"])
            return Iff(left, right)
        return left

    def imp(self, bound):
        left = self.or_(bound)
        if self.at("->"):
            self.advance()
            return Implies(left, self.imp(bound))
        return left

    def or_(self, bound):
        left = self.and_(bound)
        while self.at("|"):
            self.advance()
            left = Or(left, self.and_(bound))
        return left

    def and_(self, bound):
        left = self.unary(bound)
        while self.at("&"):
            self.advance()
            left = And(left, self.unary(bound))
        return left

    def unary(self, bound):
        if self.at("~"):
            self.advance()
            return Not(self.unary(bound))
        if self.at("("):
            self.advance()
            f = self.formula(bound)
            self.expect(")")
            return f
        return self.atom(bound)

    def atom(self, bound):
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail(["'~'", "'('", "identifier"])
        name = tok.text
        self.advance()
        args = None
        if self.at("("):
            args = self.arglist(bound)
        if self.at("="):
            self.advance()
            left = self.resolve_term(name, args, tok, bound)
            return Eq(left, self.term(bound))
        if name in bound and args is None:
            self.fail(["'='"])
        arity = self.vocab.relation_arity(name)
        if arity is None:
            if self.vocab.kind(name) is not None or name in bound:
                self.fail(["'='"])
            raise ParseError(f"undeclared relation {name!r}", tok.pos, text=self.text)
        args = args or ()
        if len(args) != arity:
            raise ParseError(f"relation {name} expects {arity} arguments, got {len(args)}",
                             tok.pos, text=self.text)
        return Atom(name, args)

    def arglist(self, bound):
        self.expect("(")
        args = [self.term(bound)]
        while self.at(","):
            self.advance()
            args.append(self.term(bound))
        self.expect(")")
        return tuple(args)

    def term(self, bound):
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail(["term"])
        self.advance()
        args = self.arglist(bound) if self.at("(") else None
        return self.resolve_term(tok.text, args, tok, bound)

    def resolve_term(self, name, args, tok, bound):
        if args is None:
            if name in bound:
                return Var(name)
            if self.vocab.has_constant(name):
                return Const(name)
            if self.vocab.kind(name) is not None:
                raise ParseError(f"{self.vocab.kind(name)} {name!r} used as a term",
                                 tok.pos, text=self.text)
            # unknown bare identifier: a free variable, rejected later for sentences
            return Var(name)
        arity = self.vocab.function_arity(name)
        if arity is None:
            raise ParseError(f"undeclared function {name!r}", tok.pos, text=self.text)
        if arity != len(args):
            raise ParseError(f"function {name} expects {arity} arguments, got {len(args)}",
                             tok.pos, text=self.text)
        return App(name, args)

    def parse(self):
        f = self.formula(frozenset())
        if self.peek().kind != "end":
            self.fail(["end of input"])
        return f


def parse_formula(text: str, vocab: Vocabulary) -> Formula:
    """Parse a formula; unbound identifiers that are not symbols become free variables."""
    return _Parser(text, vocab).parse()


def parse_sentence(text: str, vocab: Vocabulary) -> Sentence:
    f = parse_formula(text, vocab)
    free = free_variables(f)
    if free:
        raise ParseError("free variable " + ", ".join(sorted(free)), 0, text=None)
    return f


def parse_term(text: str, vocab: Vocabulary, variables=()) -> Term:
    p = _Parser(text, vocab)
    t = p.term(frozenset(variables))
    if p.peek().kind != "end":
        p.fail(["end of input"])
    return t


def token_texts(text: str) -> list:
    return [t.text for t in tokenize(text) if t.kind != "end"]


def infer_vocabulary(sentences, base: Vocabulary = None) -> Vocabulary:
    """Vocabulary of the symbols occurring in `sentences`, in order of first use."""
    rels, funs, consts = {}, {}, {}

    def term(t):
        if isinstance(t, Const):
            consts.setdefault(t.name, None)
        elif isinstance(t, App):
            if funs.setdefault(t.func, len(t.args)) != len(t.args):
                raise VocabularyError(f"function {t.func} used with two arities")
            for a in t.args:
                term(a)

    def walk(g):
        if isinstance(g, Atom):
            if rels.setdefault(g.rel, len(g.args)) != len(g.args):
                raise VocabularyError(f"relation {g.rel} used with two arities")
            for a in g.args:
                term(a)
        elif isinstance(g, Eq):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body)

    for s in sentences:
        walk(s)
    found = Vocabulary(tuple(rels.items()), tuple(funs.items()), tuple(consts))
    return found if base is None else base.union(found)
