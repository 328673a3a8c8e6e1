"""
Nameless syntax for audited lambda terms, trails and explicit substitutions.

Terms, trails and substitutions form one mutually recursive family of
immutable dataclasses. Every node exposes ``children()`` and ``rebuild()``
so that rewriting engines can traverse all three sorts uniformly; a
``TermPath`` is simply a tuple of child positions.

Inspection branches (for terms) and congruence branches (for trails) are
plain 9-tuples in the fixed slot order of :data:`SLOTS`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator, Tuple, Union

__all__ = [
    "SLOTS", "Node", "Term", "Trail", "Subst",
    "Index", "Lam", "App", "LetBang", "Bang", "Annot", "Inspect", "Closure", "Erase",
    "Refl", "Trans", "Beta", "BetaBang", "TrailInspect", "LamT", "AppT", "LetT",
    "TrplT", "Extract",
    "Id", "Shift", "Cons", "Comp",
    "REFL", "BETA", "BETA_BANG", "TI", "ID", "SHIFT",
    "TermPath", "is_pure", "max_free_index", "church", "size", "subterm_at",
    "replace_at", "positions", "lift", "trans_chain", "replacement", "all_refl",
]

#: Slot order of a trail replacement: r, t, beta, beta!, ti, lam, app, let, tb.
SLOTS: Tuple[str, ...] = ("r", "t", "b", "bb", "ti", "lam", "app", "letq", "tb")

TermPath = Tuple[int, ...]


class Node:
    """Common base: uniform child access plus a cached structural hash."""

    _fieldnames: Tuple[str, ...] = ()

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._fieldnames))
            object.__setattr__(self, "_h", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fieldnames)

    def children(self) -> tuple:
        return ()

    def rebuild(self, children: tuple) -> "Node":
        return self


class Term(Node):
    pass


class Trail(Node):
    pass


class Subst(Node):
    pass


def _node(cls):
    cls = dataclass(frozen=True, eq=False)(cls)
    cls._fieldnames = tuple(f.name for f in fields(cls))
    return cls


# ---------------------------------------------------------------------------
# Terms


@_node
class Index(Term):
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"de Bruijn index must be >= 1, got {self.n}")


@_node
class Lam(Term):
    body: Term

    def children(self):
        return (self.body,)

    def rebuild(self, children):
        return Lam(*children)


@_node
class App(Term):
    fun: Term
    arg: Term

    def children(self):
        return (self.fun, self.arg)

    def rebuild(self, children):
        return App(*children)


@_node
class LetBang(Term):
    """``let(defn, body)``; binds the first free index of ``body``."""

    defn: Term
    body: Term

    def children(self):
        return (self.defn, self.body)

    def rebuild(self, children):
        return LetBang(*children)


@_node
class Bang(Term):
    """Audited unit ``!_trail body``."""

    trail: Trail
    body: Term

    def children(self):
        return (self.trail, self.body)

    def rebuild(self, children):
        return Bang(*children)


@_node
class Annot(Term):
    """Local trail annotation ``trail |> body``."""

    trail: Trail
    body: Term

    def children(self):
        return (self.trail, self.body)

    def rebuild(self, children):
        return Annot(*children)


@_node
class Inspect(Term):
    branches: Tuple[Term, ...]

    def __post_init__(self):
        if len(self.branches) != 9:
            raise ValueError("an inspection needs exactly nine branches")

    def children(self):
        return self.branches

    def rebuild(self, children):
        return Inspect(tuple(children))


@_node
class Closure(Term):
    """Explicit substitution ``body[subst]``."""

    body: Term
    subst: Subst

    def children(self):
        return (self.body, self.subst)

    def rebuild(self, children):
        return Closure(*children)


@_node
class Erase(Term):
    """Delayed trail erasure."""

    body: Term

    def children(self):
        return (self.body,)

    def rebuild(self, children):
        return Erase(*children)


# ---------------------------------------------------------------------------
# Trails


@_node
class Refl(Trail):
    pass


@_node
class Trans(Trail):
    left: Trail
    right: Trail

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return Trans(*children)


@_node
class Beta(Trail):
    pass


@_node
class BetaBang(Trail):
    pass


@_node
class TrailInspect(Trail):
    pass


@_node
class LamT(Trail):
    sub: Trail

    def children(self):
        return (self.sub,)

    def rebuild(self, children):
        return LamT(*children)


@_node
class AppT(Trail):
    left: Trail
    right: Trail

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return AppT(*children)


@_node
class LetT(Trail):
    left: Trail
    right: Trail

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return LetT(*children)


@_node
class TrplT(Trail):
    branches: Tuple[Trail, ...]

    def __post_init__(self):
        if len(self.branches) != 9:
            raise ValueError("a tb trail needs exactly nine branches")

    def children(self):
        return self.branches

    def rebuild(self, children):
        return TrplT(tuple(children))


@_node
class Extract(Trail):
    """Delayed trail extraction of a term."""

    term: Term

    def children(self):
        return (self.term,)

    def rebuild(self, children):
        return Extract(*children)


# ---------------------------------------------------------------------------
# Substitutions


@_node
class Id(Subst):
    pass


@_node
class Shift(Subst):
    pass


@_node
class Cons(Subst):
    head: Term
    tail: Subst

    def children(self):
        return (self.head, self.tail)

    def rebuild(self, children):
        return Cons(*children)


@_node
class Comp(Subst):
    first: Subst
    second: Subst

    def children(self):
        return (self.first, self.second)

    def rebuild(self, children):
        return Comp(*children)


REFL = Refl()
BETA = Beta()
BETA_BANG = BetaBang()
TI = TrailInspect()
ID = Id()
SHIFT = Shift()

AnyNode = Union[Term, Trail, Subst]


# ---------------------------------------------------------------------------
# Helpers


def replacement(**slots) -> tuple:
    """Build a 9-tuple from keyword slots named as in :data:`SLOTS`."""
    missing = [s for s in SLOTS if s not in slots]
    extra = [s for s in slots if s not in SLOTS]
    if missing or extra:
        raise ValueError(f"replacement slots: missing {missing}, unknown {extra}")
    return tuple(slots[s] for s in SLOTS)


def all_refl() -> Tuple[Trail, ...]:
    return (REFL,) * 9


def trans_chain(*trails: Trail) -> Trail:
    """Right-nested transitivity ``q1; q2; ...; qn``."""
    if not trails:
        return REFL
    out = trails[-1]
    for q in reversed(trails[:-1]):
        out = Trans(q, out)
    return out


def is_pure(x: AnyNode) -> bool:
    """True iff no Closure, Erase or Extract occurs anywhere in ``x``."""
    stack = [x]
    while stack:
        node = stack.pop()
        if isinstance(node, (Closure, Erase, Extract)):
            return False
        stack.extend(node.children())
    return True


def size(x: AnyNode) -> int:
    """Number of nodes, counting terms, trails and substitutions alike."""
    total = 0
    stack = [x]
    while stack:
        node = stack.pop()
        total += 1
        stack.extend(node.children())
    return total


def max_free_index(M: Term) -> int:
    """Largest dangling index of ``M`` (0 iff closed).

    Trails are ignored: embedded extraction terms never become visible to
    the surrounding scope.
    """
    return _mfi(M)


def _mfi(M: Term) -> int:
    if isinstance(M, Index):
        return M.n
    if isinstance(M, Lam):
        return max(_mfi(M.body) - 1, 0)
    if isinstance(M, App):
        return max(_mfi(M.fun), _mfi(M.arg))
    if isinstance(M, LetBang):
        return max(_mfi(M.defn), _mfi(M.body) - 1, 0)
    if isinstance(M, (Bang, Annot)):
        return _mfi(M.body)
    if isinstance(M, Erase):
        return _mfi(M.body)
    if isinstance(M, Inspect):
        return max(_mfi(b) for b in M.branches)
    if isinstance(M, Closure):
        return _closure_mfi(_mfi(M.body), M.subst)
    raise TypeError(f"not a term: {M!r}")


def _closure_mfi(k: int, s: Subst) -> int:
    """Free index reach of ``N[s]`` where ``N`` uses indices ``1..k``."""
    if k == 0:
        return 0
    if isinstance(s, Id):
        return k
    if isinstance(s, Shift):
        return k + 1
    if isinstance(s, Cons):
        return max(_mfi(s.head), _closure_mfi(k - 1, s.tail))
    if isinstance(s, Comp):
        # indices 1..k are sent through ``first`` into a scope reaching
        # ``_closure_mfi(k, first)``, which ``second`` then interprets
        return _closure_mfi(_closure_mfi(k, s.first), s.second)
    raise TypeError(f"not a substitution: {s!r}")


def church(n: int) -> Term:
    """Church numeral ``λf.λx. f^n x``."""
    if n < 0:
        raise ValueError("church numerals are natural numbers")
    body: Term = Index(1)
    for _ in range(n):
        body = App(Index(2), body)
    return Lam(Lam(body))


def lift(M: Term, by: int = 1, cutoff: int = 0) -> Term:
    """Add ``by`` to every free index of a pure term above ``cutoff``."""
    if by == 0:
        return M
    if isinstance(M, Index):
        return Index(M.n + by) if M.n > cutoff else M
    if isinstance(M, Lam):
        return Lam(lift(M.body, by, cutoff + 1))
    if isinstance(M, App):
        return App(lift(M.fun, by, cutoff), lift(M.arg, by, cutoff))
    if isinstance(M, LetBang):
        return LetBang(lift(M.defn, by, cutoff), lift(M.body, by, cutoff + 1))
    if isinstance(M, Bang):
        return Bang(M.trail, lift(M.body, by, cutoff))
    if isinstance(M, Annot):
        return Annot(M.trail, lift(M.body, by, cutoff))
    if isinstance(M, Inspect):
        return Inspect(tuple(lift(b, by, cutoff) for b in M.branches))
    raise ValueError(f"lift expects a pure term, got {type(M).__name__}")


def subterm_at(x: AnyNode, path: TermPath) -> AnyNode:
    for i in path:
        x = x.children()[i]
    return x


def replace_at(x: AnyNode, path: TermPath, new: AnyNode) -> AnyNode:
    if not path:
        return new
    kids = list(x.children())
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return x.rebuild(tuple(kids))


def positions(x: AnyNode, path: TermPath = ()) -> Iterator[Tuple[TermPath, AnyNode]]:
    """Pre-order (outermost, then left to right) walk over all subnodes."""
    yield path, x
    for i, child in enumerate(x.children()):
        yield from positions(child, path + (i,))
