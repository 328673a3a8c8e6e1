"""Pretty-printing to the surface syntax accepted by :mod:`cau.frontend.parser`.

Binders get fresh names ``x1, x2, ...`` numbered by binder depth; indices
that escape every printed binder are written as raw ``#n``. Output parses
back to the same term.
"""

from __future__ import annotations

from ..syntax import (
    SLOTS, Annot, App, AppT, Bang, Beta, BetaBang, Closure, Comp, Cons, Erase, Extract,
    Id, Index, Inspect, Lam, LamT, LetBang, LetT, Refl, Shift, Term, Trail, TrailInspect,
    Trans, TrplT,
)

__all__ = ["print_term", "print_trail", "print_subst"]

# precedence levels: 0 = open (binders extend right), 1 = application, 2 = atom
_OPEN, _APP, _ATOM = 0, 1, 2


def print_term(M: Term) -> str:
    return _term(M, 0, _OPEN)


def print_trail(q: Trail, depth: int = 0) -> str:
    if isinstance(q, Refl):
        return "r"
    if isinstance(q, Beta):
        return "b"
    if isinstance(q, BetaBang):
        return "bb"
    if isinstance(q, TrailInspect):
        return "ti"
    if isinstance(q, Extract):
        return f"ext({_term(q.term, depth, _OPEN)})"
    name = {Trans: "t", LamT: "lam", AppT: "app", LetT: "letq", TrplT: "tb"}[type(q)]
    return f"{name}({', '.join(print_trail(k, depth) for k in q.children())})"


def print_subst(s, depth: int = 0) -> str:
    if isinstance(s, Id):
        return "id"
    if isinstance(s, Shift):
        return "shift"
    if isinstance(s, Cons):
        return f"{_term(s.head, depth, _APP)} . {print_subst(s.tail, depth)}"
    if isinstance(s, Comp):
        first = print_subst(s.first, depth)
        if isinstance(s.first, (Cons, Comp)):
            first = f"({first})"
        return f"{first} o {print_subst(s.second, depth)}"
    raise TypeError(f"not a substitution: {s!r}")


def _name(depth: int) -> str:
    return f"x{depth}"


def _paren(text: str, level: int, needed: int) -> str:
    return f"({text})" if level > needed else text


def _term(M: Term, depth: int, level: int) -> str:
    if isinstance(M, Index):
        return _name(depth - M.n + 1) if M.n <= depth else f"#{M.n}"
    if isinstance(M, Lam):
        names = []
        while isinstance(M, Lam):
            depth += 1
            names.append(_name(depth))
            M = M.body
        return _paren(f"\\{' '.join(names)}. {_term(M, depth, _OPEN)}", level, _OPEN)
    if isinstance(M, LetBang):
        text = f"let {_name(depth + 1)} = {_term(M.defn, depth, _OPEN)} in {_term(M.body, depth + 1, _OPEN)}"
        return _paren(text, level, _OPEN)
    if isinstance(M, Bang):
        head = "!" if isinstance(M.trail, Refl) else f"!{{{print_trail(M.trail, depth)}}}"
        return _paren(f"{head} {_term(M.body, depth, _OPEN)}", level, _OPEN)
    if isinstance(M, Annot):
        return _paren(f"{print_trail(M.trail, depth)} |> {_term(M.body, depth, _OPEN)}", level, _OPEN)
    if isinstance(M, App):
        text = f"{_term(M.fun, depth, _APP)} {_term(M.arg, depth, _ATOM)}"
        return _paren(text, level, _APP)
    if isinstance(M, Erase):
        return f"erase({_term(M.body, depth, _OPEN)})"
    if isinstance(M, Inspect):
        inner = ", ".join(f"{slot}: {_term(b, depth, _OPEN)}" for slot, b in zip(SLOTS, M.branches))
        return f"iota{{{inner}}}"
    if isinstance(M, Closure):
        # the body is printed in a fresh scope: its free indices belong to the substitution
        return f"{_term(M.body, 0, _ATOM)}[{print_subst(M.subst, depth)}]"
    raise TypeError(f"not a term: {M!r}")
