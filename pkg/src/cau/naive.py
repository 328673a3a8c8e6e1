"""Reference semantics of the untyped calculus of audited units.

Principal contractions (beta, let-bang unpacking, trail inspection) work on
pure de Bruijn terms; permutation reductions (the ``tau`` rules) float the
local trail annotations they create up to the nearest enclosing bang and
normalize trail algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import rewrite
from .rewrite import FuelExhausted
from .syntax import (
    BETA, BETA_BANG, REFL, TI, Annot, App, AppT, Bang, Beta, BetaBang, Extract,
    Index, Inspect, Lam, LamT, LetBang, LetT, Node, Refl, Term, TermPath, Trail,
    TrailInspect, Trans, TrplT, is_pure, lift, replace_at, subterm_at,
)

__all__ = [
    "BetaRedex", "BetaBangRedex", "InspectRedex", "StuckTerm",
    "apply_replacement", "meta_subst", "tau_rules", "tau_step", "tau_normalize",
    "find_principal_redexes", "principal_contract", "cau_step", "cau_eval_cbv",
    "cbv_redex", "is_cbv_value",
]


@dataclass(frozen=True)
class BetaRedex:
    pass


@dataclass(frozen=True)
class BetaBangRedex:
    pass


@dataclass(frozen=True)
class InspectRedex:
    """Inspection redex; ``bang_path`` locates the bang whose trail it reads."""

    bang_path: TermPath


class StuckTerm(Exception):
    """A closed term that is not a value but has no call-by-value redex."""

    def __init__(self, reason: str, term: Term):
        super().__init__(reason)
        self.reason = reason
        self.term = term


# ---------------------------------------------------------------------------
# Trail replacement and meta-level substitution


def apply_replacement(q: Trail, branches: Sequence[Term]) -> Term:
    """Structural recursion ``q theta`` over a pure trail."""
    r, t, b, bb, ti, lam, app, let, tb = branches

    def go(q: Trail) -> Term:
        if isinstance(q, Refl):
            return r
        if isinstance(q, Beta):
            return b
        if isinstance(q, BetaBang):
            return bb
        if isinstance(q, TrailInspect):
            return ti
        if isinstance(q, Trans):
            return App(App(t, go(q.left)), go(q.right))
        if isinstance(q, LamT):
            return App(lam, go(q.sub))
        if isinstance(q, AppT):
            return App(App(app, go(q.left)), go(q.right))
        if isinstance(q, LetT):
            return App(App(let, go(q.left)), go(q.right))
        if isinstance(q, TrplT):
            out = tb
            for sub in q.branches:
                out = App(out, go(sub))
            return out
        if isinstance(q, Extract):
            raise ValueError("trail replacement is undefined on trail extractions")
        raise TypeError(f"not a trail: {q!r}")

    return go(q)


def meta_subst(M: Term, p: int, Ns: Sequence[Term]) -> Term:
    """Simultaneous substitution ``M{p <- N1..Nk}``.

    Index ``m <= k`` becomes ``N_m``; index ``n > k`` becomes ``n - k + p``.
    Going under a binder prepends index 1 and lifts every ``N_i``, which is
    realised here by lifting lazily at the substitution site.
    """
    if not is_pure(M):
        raise ValueError("meta_subst expects a sigma-normal (pure) term")
    Ns = tuple(Ns)
    k = len(Ns)

    def go(M: Term, depth: int) -> Term:
        if isinstance(M, Index):
            m = M.n
            if m <= depth:
                return M
            m -= depth
            if m <= k:
                return lift(Ns[m - 1], depth)
            return Index(m - k + p + depth)
        if isinstance(M, Lam):
            return Lam(go(M.body, depth + 1))
        if isinstance(M, App):
            return App(go(M.fun, depth), go(M.arg, depth))
        if isinstance(M, LetBang):
            return LetBang(go(M.defn, depth), go(M.body, depth + 1))
        if isinstance(M, Bang):
            return Bang(M.trail, go(M.body, depth))
        if isinstance(M, Annot):
            return Annot(M.trail, go(M.body, depth))
        if isinstance(M, Inspect):
            return Inspect(tuple(go(b, depth) for b in M.branches))
        raise TypeError(f"not a pure term: {M!r}")

    return go(M, 0)


# ---------------------------------------------------------------------------
# Permutation reductions


def _is_refl(q) -> bool:
    return isinstance(q, Refl)


def tau_rules(x: Node) -> List[Node]:
    """All root rewrites of ``x`` under the tau rules."""
    out: List[Node] = []
    if isinstance(x, Annot):
        if _is_refl(x.trail):
            out.append(x.body)
        if isinstance(x.body, Annot):
            out.append(Annot(Trans(x.trail, x.body.trail), x.body.body))
    elif isinstance(x, Bang):
        if isinstance(x.body, Annot):
            out.append(Bang(Trans(x.trail, x.body.trail), x.body.body))
    elif isinstance(x, Lam):
        if isinstance(x.body, Annot):
            out.append(Annot(LamT(x.body.trail), Lam(x.body.body)))
    elif isinstance(x, App):
        if isinstance(x.fun, Annot):
            out.append(Annot(AppT(x.fun.trail, REFL), App(x.fun.body, x.arg)))
        if isinstance(x.arg, Annot):
            out.append(Annot(AppT(REFL, x.arg.trail), App(x.fun, x.arg.body)))
    elif isinstance(x, LetBang):
        if isinstance(x.defn, Annot):
            out.append(Annot(LetT(x.defn.trail, REFL), LetBang(x.defn.body, x.body)))
        if isinstance(x.body, Annot):
            out.append(Annot(LetT(REFL, x.body.trail), LetBang(x.defn, x.body.body)))
    elif isinstance(x, Inspect):
        for i, b in enumerate(x.branches):
            if isinstance(b, Annot):
                trails = [REFL] * 9
                trails[i] = b.trail
                inner = x.branches[:i] + (b.body,) + x.branches[i + 1:]
                out.append(Annot(TrplT(tuple(trails)), Inspect(inner)))
    elif isinstance(x, Trans):
        _trans_rules(x, out)
    elif isinstance(x, (AppT, LetT)):
        if _is_refl(x.left) and _is_refl(x.right):
            out.append(REFL)
    elif isinstance(x, LamT):
        if _is_refl(x.sub):
            out.append(REFL)
    elif isinstance(x, TrplT):
        if all(_is_refl(b) for b in x.branches):
            out.append(REFL)
    return out


def _fuse(a: Trail, b: Trail) -> Optional[Trail]:
    """Merge two congruence trails of the same shape under transitivity."""
    if isinstance(a, LamT) and isinstance(b, LamT):
        return LamT(Trans(a.sub, b.sub))
    if isinstance(a, AppT) and isinstance(b, AppT):
        return AppT(Trans(a.left, b.left), Trans(a.right, b.right))
    if isinstance(a, LetT) and isinstance(b, LetT):
        return LetT(Trans(a.left, b.left), Trans(a.right, b.right))
    if isinstance(a, TrplT) and isinstance(b, TrplT):
        return TrplT(tuple(Trans(x, y) for x, y in zip(a.branches, b.branches)))
    return None


def _trans_rules(x: Trans, out: List[Node]) -> None:
    left, right = x.left, x.right
    if _is_refl(right):
        out.append(left)
    if _is_refl(left):
        out.append(right)
    if isinstance(left, Trans):
        out.append(Trans(left.left, Trans(left.right, right)))
    fused = _fuse(left, right)
    if fused is not None:
        out.append(fused)
    if isinstance(right, Trans):
        fused = _fuse(left, right.left)
        if fused is not None:
            out.append(Trans(fused, right.right))


def tau_step(x: Node) -> Optional[Node]:
    """Rewrite the leftmost-outermost tau-redex, or return ``None``."""
    return rewrite.step(x, tau_rules)


def tau_normalize(x: Node, fuel: Optional[int] = None) -> Node:
    """Unique tau-normal form; raises :class:`FuelExhausted` on runaway."""
    return rewrite.Normalizer(tau_rules, fuel, "tau-normalization", _TAU_MEMO)(x)


_TAU_MEMO = rewrite.SharedMemo()


# ---------------------------------------------------------------------------
# Principal contractions


def find_principal_redexes(M: Term) -> List[Tuple[TermPath, object]]:
    """Every principal redex of a pure term, leftmost-outermost first."""
    found: List[Tuple[TermPath, object]] = []

    def walk(M: Term, path: TermPath, bang: Optional[TermPath]) -> None:
        if isinstance(M, App):
            if isinstance(M.fun, Lam):
                found.append((path, BetaRedex()))
        elif isinstance(M, LetBang):
            if isinstance(M.defn, Bang):
                found.append((path, BetaBangRedex()))
        elif isinstance(M, Inspect):
            if bang is not None:
                found.append((path, InspectRedex(bang)))
        elif isinstance(M, Bang):
            walk(M.body, path + (1,), path)
            return
        elif isinstance(M, Annot):
            walk(M.body, path + (1,), bang)
            return
        elif not isinstance(M, (Index, Lam)):
            raise ValueError(f"principal redexes are defined on pure terms, got {type(M).__name__}")
        for i, child in enumerate(M.children()):
            walk(child, path + (i,), bang)

    walk(M, (), None)
    return found


def principal_contract(M: Term, at: TermPath) -> Term:
    """Contract the principal redex at ``at`` (no tau-normalization)."""
    R = subterm_at(M, at)
    if isinstance(R, App) and isinstance(R.fun, Lam):
        return replace_at(M, at, Annot(BETA, meta_subst(R.fun.body, 0, [R.arg])))
    if isinstance(R, LetBang) and isinstance(R.defn, Bang):
        unpacked = Annot(R.defn.trail, R.defn.body)
        return replace_at(M, at, Annot(BETA_BANG, meta_subst(R.body, 0, [unpacked])))
    if isinstance(R, Inspect):
        bang = _nearest_bang(M, at)
        if bang is None:
            raise ValueError("inspection has no enclosing bang (inspection-locked)")
        q = subterm_at(M, bang).trail
        return replace_at(M, at, Annot(TI, apply_replacement(q, R.branches)))
    raise ValueError(f"no principal redex at {at}")


def _nearest_bang(M: Term, at: TermPath) -> Optional[TermPath]:
    bang = None
    node = M
    for depth, i in enumerate(at):
        if isinstance(node, Bang):
            bang = at[:depth]
        node = node.children()[i]
    return bang


def cau_step(M: Term, fuel: Optional[int] = None) -> Optional[Term]:
    """Contract the leftmost-outermost principal redex, then tau-normalize."""
    redexes = find_principal_redexes(M)
    if not redexes:
        return None
    return tau_normalize(principal_contract(M, redexes[0][0]), fuel)


# ---------------------------------------------------------------------------
# Weak call-by-value strategy (same order as the abstract machine)


def is_cbv_value(M: Term) -> bool:
    while isinstance(M, Bang):
        M = M.body
    return isinstance(M, Lam)


def cbv_redex(M: Term) -> Optional[TermPath]:
    """Path of the next call-by-value redex; ``None`` if ``M`` is a value.

    Raises :class:`StuckTerm` when the term is neither.
    """

    def go(M: Term, path: TermPath, bang: bool) -> Optional[TermPath]:
        if isinstance(M, Lam):
            return None
        if isinstance(M, Annot):
            return go(M.body, path + (1,), bang)
        if isinstance(M, Bang):
            return go(M.body, path + (1,), True)
        if isinstance(M, App):
            r = go(M.fun, path + (0,), bang)
            if r is not None:
                return r
            r = go(M.arg, path + (1,), bang)
            if r is not None:
                return r
            if isinstance(M.fun, Lam):
                return path
            raise StuckTerm("application of a non-lambda value", M)
        if isinstance(M, LetBang):
            r = go(M.defn, path + (0,), bang)
            if r is not None:
                return r
            if isinstance(M.defn, Bang):
                return path
            raise StuckTerm("let definiens is not a bang", M)
        if isinstance(M, Inspect):
            for i, b in enumerate(M.branches):
                r = go(b, path + (i,), bang)
                if r is not None:
                    return r
            if not bang:
                raise StuckTerm("inspection-locked", M)
            return path
        if isinstance(M, Index):
            raise StuckTerm("free variable", M)
        raise ValueError(f"call-by-value evaluation expects a pure term, got {type(M).__name__}")

    return go(M, (), False)


def cau_eval_cbv(M: Term, fuel: int = 10_000, trace: Optional[list] = None) -> Term:
    """Evaluate a pure closed term with the machine's call-by-value order.

    Returns the final (tau-normal) value. Raises :class:`FuelExhausted` after
    ``fuel`` contractions and :class:`StuckTerm` on a stuck non-value.
    """
    M = tau_normalize(M)
    for _ in range(fuel):
        at = cbv_redex(M)
        if at is None:
            return M
        M = tau_normalize(principal_contract(M, at))
        if trace is not None:
            trace.append((at, M))
    if cbv_redex(M) is None:
        return M
    raise FuelExhausted("call-by-value evaluation", fuel, M)
