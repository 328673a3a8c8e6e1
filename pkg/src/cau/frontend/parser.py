"""Surface syntax with named variables, elaborated to nameless terms.

Grammar (informally)::

    program := ("def" IDENT "=" term ";")* term
    term    := "\\" IDENT+ "." term | "let" IDENT "=" term "in" term
             | "!" ("{" trail "}")? term | trail "|>" term | app
    app     := postfix+
    postfix := atom ("[" subst "]")*
    atom    := IDENT | "#" NAT | "(" term ")" | "erase" "(" term ")"
             | "iota" "{" SLOT ":" term ("," SLOT ":" term){8} "}"
    trail   := "r" | "b" | "bb" | "ti" | "t(" trail "," trail ")" | "lam(" trail ")"
             | "app(" trail "," trail ")" | "letq(" trail "," trail ")"
             | "tb(" trail ("," trail){8} ")" | "ext(" term ")"
    subst   := scons ("o" scons)*
    scons   := "id" | "shift" | "(" subst ")" | term "." subst

``#n`` is a raw de Bruijn index. The body of a closure ``M[s]`` is elaborated
in an empty scope: its free variables are resolved by ``s``, so they must be
written as raw indices. Names bound by ``def`` (and the prelude) are inlined.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..syntax import (
    BETA, BETA_BANG, ID, REFL, SHIFT, SLOTS, TI, Annot, App, AppT, Bang, Closure, Comp,
    Cons, Erase, Extract, Index, Inspect, Lam, LamT, LetBang, LetT, Term, Trail, Trans,
    TrplT, church, max_free_index,
)

__all__ = ["ParseError", "parse_term", "parse_program", "PRELUDE", "RESERVED", "prelude_env"]

RESERVED = frozenset({
    "let", "in", "iota", "erase", "ext", "r", "t", "b", "bb", "ti", "lam", "app",
    "letq", "tb", "id", "shift", "def",
})

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<raw>\#\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>\|>|▷|λ|∘|[\\.()\[\]{},:=;!])
""", re.VERBOSE)


class ParseError(ValueError):
    """Syntax or scoping error, with 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line, self.col = line, col


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            sym = {"λ": "\\", "▷": "|>", "∘": "o"}.get(chunk, chunk)
            toks.append(_Tok(kind if kind != "ident" or chunk not in RESERVED else "kw", sym, line,
                             pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# Named surface AST: tuples tagged by their first element.


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("kw", "sym")

    def error(self, message: str):
        raise ParseError(message, self.tok.line, self.tok.col)

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t.text

    # program
    def program(self):
        defs = []
        while self.at("def"):
            self.i += 1
            name = self.ident()
            self.expect("=")
            body = self.term()
            self.expect(";")
            defs.append((name, body))
        main = self.term()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after the term")
        return defs, main

    # terms
    def term(self):
        t = self.tok
        if self.at("\\"):
            self.i += 1
            names = [self.ident()]
            while self.tok.kind == "ident":
                names.append(self.ident())
            self.expect(".")
            body = self.term()
            for n in reversed(names):
                body = ("lam", n, body, t)
            return body
        if self.at("let"):
            self.i += 1
            name = self.ident()
            self.expect("=")
            defn = self.term()
            self.expect("in")
            return ("let", name, defn, self.term(), t)
        if self.at("!"):
            self.i += 1
            trail = ("refl",)
            if self.at("{"):
                self.i += 1
                trail = self.trail()
                self.expect("}")
            return ("bang", trail, self.term(), t)
        if self.tok.kind == "kw" and self.tok.text in ("r", "t", "b", "bb", "ti", "lam", "app", "letq", "tb", "ext"):
            trail = self.trail()
            self.expect("|>")
            return ("annot", trail, self.term(), t)
        return self.app()

    def starts_atom(self) -> bool:
        tok = self.tok
        if tok.kind in ("ident", "raw"):
            return True
        if tok.kind == "kw":
            return tok.text in ("iota", "erase")
        return tok.kind == "sym" and tok.text in ("(", "\\", "!") or (
            tok.kind == "kw" and tok.text == "let")

    def app(self):
        head = self.postfix()
        while self.starts_atom():
            if self.at("\\") or self.at("!") or self.at("let"):
                head = ("app", head, self.term(), self.tok)
                break
            head = ("app", head, self.postfix(), self.tok)
        return head

    def postfix(self):
        node = self.atom()
        while self.at("["):
            t = self.tok
            self.i += 1
            s = self.subst()
            self.expect("]")
            node = ("closure", node, s, t)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return ("var", t.text, t)
        if t.kind == "raw":
            self.i += 1
            n = int(t.text[1:])
            if n < 1:
                raise ParseError("raw indices start at #1", t.line, t.col)
            return ("raw", n, t)
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if self.at("erase"):
            self.i += 1
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return ("erase", inner, t)
        if self.at("iota"):
            self.i += 1
            self.expect("{")
            branches: Dict[str, object] = {}
            while True:
                slot_tok = self.tok
                if slot_tok.text not in SLOTS:
                    self.error(f"expected an inspection slot ({', '.join(SLOTS)}), found {slot_tok.text!r}")
                if slot_tok.text in branches:
                    self.error(f"slot {slot_tok.text!r} given twice")
                self.i += 1
                self.expect(":")
                branches[slot_tok.text] = self.term()
                if self.at(","):
                    self.i += 1
                    continue
                break
            self.expect("}")
            missing = [s for s in SLOTS if s not in branches]
            if missing:
                raise ParseError(f"inspection must name all nine slots; missing {', '.join(missing)}", t.line, t.col)
            return ("iota", tuple(branches[s] for s in SLOTS), t)
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    # trails
    def trail(self):
        t = self.tok
        leaves = {"r": ("refl",), "b": ("beta",), "bb": ("betabang",), "ti": ("ti",)}
        if t.text in leaves and t.kind == "kw":
            self.i += 1
            return leaves[t.text]
        arity = {"t": 2, "lam": 1, "app": 2, "letq": 2, "tb": 9}
        if t.kind == "kw" and t.text in arity:
            self.i += 1
            self.expect("(")
            kids = [self.trail()]
            for _ in range(arity[t.text] - 1):
                self.expect(",")
                kids.append(self.trail())
            self.expect(")")
            return ("trail", t.text, tuple(kids))
        if t.kind == "kw" and t.text == "ext":
            self.i += 1
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return ("ext", inner)
        self.error(f"expected a trail, found {t.text or 'end of input'!r}")

    # substitutions
    def subst(self):
        s = self.scons()
        # "o" is an ordinary identifier elsewhere; after a substitution it composes
        if self.tok.text == "o" and self.tok.kind in ("ident", "sym"):
            self.i += 1
            return ("comp", s, self.subst())
        return s

    def scons(self):
        if self.at("id"):
            self.i += 1
            return ("id",)
        if self.at("shift"):
            self.i += 1
            return ("shift",)
        if self.at("("):
            save = self.i
            try:
                self.i += 1
                inner = self.subst()
                self.expect(")")
                if not self.at("."):
                    return inner
            except ParseError:
                pass
            self.i = save
        head = self.term()
        self.expect(".")
        return ("cons", head, self.subst())


# ---------------------------------------------------------------------------
# Elaboration


def _elab(node, scope: Tuple[str, ...], defs: Dict[str, Term]) -> Term:
    tag = node[0]
    if tag == "var":
        name, tok = node[1], node[2]
        for i, bound in enumerate(scope):
            if bound == name:
                return Index(i + 1)
        if name in defs:
            return defs[name]
        raise ParseError(f"unbound identifier {name!r}", tok.line, tok.col)
    if tag == "raw":
        return Index(node[1])
    if tag == "lam":
        return Lam(_elab(node[2], (node[1],) + scope, defs))
    if tag == "app":
        return App(_elab(node[1], scope, defs), _elab(node[2], scope, defs))
    if tag == "let":
        return LetBang(_elab(node[2], scope, defs), _elab(node[3], (node[1],) + scope, defs))
    if tag == "bang":
        return Bang(_elab_trail(node[1], scope, defs), _elab(node[2], scope, defs))
    if tag == "annot":
        return Annot(_elab_trail(node[1], scope, defs), _elab(node[2], scope, defs))
    if tag == "erase":
        return Erase(_elab(node[1], scope, defs))
    if tag == "iota":
        return Inspect(tuple(_elab(b, scope, defs) for b in node[1]))
    if tag == "closure":
        return Closure(_elab(node[1], (), defs), _elab_subst(node[2], scope, defs))
    raise AssertionError(tag)


def _elab_trail(node, scope, defs) -> Trail:
    tag = node[0]
    if tag == "refl":
        return REFL
    if tag == "beta":
        return BETA
    if tag == "betabang":
        return BETA_BANG
    if tag == "ti":
        return TI
    if tag == "ext":
        return Extract(_elab(node[1], scope, defs))
    kids = tuple(_elab_trail(k, scope, defs) for k in node[2])
    kind = node[1]
    if kind == "t":
        return Trans(*kids)
    if kind == "lam":
        return LamT(*kids)
    if kind == "app":
        return AppT(*kids)
    if kind == "letq":
        return LetT(*kids)
    return TrplT(kids)


def _elab_subst(node, scope, defs):
    tag = node[0]
    if tag == "id":
        return ID
    if tag == "shift":
        return SHIFT
    if tag == "cons":
        return Cons(_elab(node[1], scope, defs), _elab_subst(node[2], scope, defs))
    return Comp(_elab_subst(node[1], scope, defs), _elab_subst(node[2], scope, defs))


PRELUDE_SOURCE = {
    "succ": r"\n f x. f (n f x)",
    "plus": r"\m n f x. m f (n f x)",
    "times": r"\m n f. m (n f)",
    "sum9": r"\a1 a2 a3 a4 a5 a6 a7 a8 a9 f x. a1 f (a2 f (a3 f (a4 f (a5 f (a6 f (a7 f (a8 f (a9 f x))))))))",
    "ident": r"\x. x",
    "pair": r"\x y p. p x y",
    "fst": r"\p. p (\x y. x)",
    "snd": r"\p. p (\x y. y)",
    "true": r"\x y. x",
    "false": r"\x y. y",
    "omega": r"(\x. x x) (\x. x x)",
}

_NUMERALS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"]


def prelude_env() -> Dict[str, Term]:
    env: Dict[str, Term] = {name: church(i) for i, name in enumerate(_NUMERALS)}
    for name, src in PRELUDE_SOURCE.items():
        env[name] = parse_term(src, env={})
    return env


_PRELUDE: Optional[Dict[str, Term]] = None


def _prelude() -> Dict[str, Term]:
    global _PRELUDE
    if _PRELUDE is None:
        _PRELUDE = prelude_env()
    return _PRELUDE


#: Names available in every program unless shadowed.
PRELUDE = tuple(_NUMERALS) + tuple(PRELUDE_SOURCE)


def parse_program(text: str, env: Optional[Dict[str, Term]] = None) -> Tuple[Term, Dict[str, Term]]:
    """Parse definitions followed by a main term; returns the term and all definitions."""
    defs = dict(_prelude() if env is None else env)
    parser = _Parser(text)
    raw_defs, main = parser.program()
    for name, body in raw_defs:
        term = _elab(body, (), defs)
        if max_free_index(term):
            raise ParseError(f"definition {name!r} is not closed")
        defs[name] = term
    return _elab(main, (), defs), defs


def parse_term(text: str, env: Optional[Dict[str, Term]] = None) -> Term:
    """Parse and elaborate a (possibly ``def``-prefixed) term."""
    return parse_program(text, env)[0]
