"""Explicit substitutions and explicit trail projections.

The sigma rules evaluate closures ``M[s]`` and the delayed projections
``Erase`` (trail erasure) and ``Extract`` (trail extraction) one constructor
at a time. Together with the tau rules they form a terminating, confluent
system whose normal forms are exactly the pure terms. The lazy ``Beta``
relation contracts redexes without normalizing trails, leaving projection
work for later.

Indices are numerals, so ``1[shift^n]`` is represented directly by
``Index(n + 1)``; one derived rule ``n[shift o t] -> (n+1)[t]`` keeps
closures over shifted indices from getting stuck.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from . import rewrite
from .naive import BetaBangRedex, BetaRedex, InspectRedex, apply_replacement, tau_rules
from .syntax import (
    BETA, BETA_BANG, ID, REFL, SHIFT, TI, Annot, App, AppT, Bang, Closure, Comp,
    Cons, Erase, Extract, Id, Index, Inspect, Lam, LamT, LetBang, LetT, Node,
    Shift, Term, TermPath, Trail, Trans, TrplT, is_pure, replace_at, subterm_at,
)

__all__ = [
    "sigma_rules", "sigmatau_rules", "sigma_step", "sigma_normalize",
    "sigmatau_normalize", "erase_meta", "trailify_meta", "focus",
    "beta_sigma_redexes", "beta_sigma_contract", "sigmatau_equiv",
    "MalformedHistory",
]


class MalformedHistory(ValueError):
    """An inspected history still contains trail extractions after normalization."""


def _lifted(s):
    # 1 . (s o shift), the substitution used when going under a binder
    return Cons(Index(1), Comp(s, SHIFT))


def _closure_rules(body: Term, s, out: List[Node]) -> None:
    if isinstance(body, Index):
        n = body.n
        if isinstance(s, Id):
            out.append(body)
        elif isinstance(s, Shift):
            out.append(Index(n + 1))
        elif isinstance(s, Cons):
            out.append(s.head if n == 1 else Closure(Index(n - 1), s.tail))
        elif isinstance(s, Comp) and isinstance(s.first, Shift):
            out.append(Closure(Index(n + 1), s.second))
    elif isinstance(body, Lam):
        out.append(Lam(Closure(body.body, _lifted(s))))
    elif isinstance(body, App):
        out.append(App(Closure(body.fun, s), Closure(body.arg, s)))
    elif isinstance(body, Bang):
        out.append(Bang(body.trail, Closure(body.body, s)))
    elif isinstance(body, LetBang):
        out.append(LetBang(Closure(body.defn, s), Closure(body.body, _lifted(s))))
    elif isinstance(body, Annot):
        out.append(Annot(body.trail, Closure(body.body, s)))
    elif isinstance(body, Inspect):
        out.append(Inspect(tuple(Closure(b, s) for b in body.branches)))
    elif isinstance(body, Closure):
        out.append(Closure(body.body, Comp(body.subst, s)))


def _comp_rules(first, second, out: List[Node]) -> None:
    if isinstance(first, Id):
        out.append(second)
    elif isinstance(first, Shift):
        if isinstance(second, Id):
            out.append(SHIFT)
        elif isinstance(second, Cons):
            out.append(second.tail)
    elif isinstance(first, Cons):
        out.append(Cons(Closure(first.head, second), Comp(first.tail, second)))
    elif isinstance(first, Comp):
        out.append(Comp(first.first, Comp(first.second, second)))


def _erase_rules(M: Term, out: List[Node]) -> None:
    if isinstance(M, Index):
        out.append(M)
    elif isinstance(M, Lam):
        out.append(Lam(Erase(M.body)))
    elif isinstance(M, App):
        out.append(App(Erase(M.fun), Erase(M.arg)))
    elif isinstance(M, Bang):
        out.append(M)
    elif isinstance(M, LetBang):
        out.append(LetBang(Erase(M.defn), Erase(M.body)))
    elif isinstance(M, Annot):
        out.append(Erase(M.body))
    elif isinstance(M, Inspect):
        out.append(Inspect(tuple(Erase(b) for b in M.branches)))


def _extract_rules(M: Term, out: List[Node]) -> None:
    if isinstance(M, Index):
        out.append(REFL)
    elif isinstance(M, Lam):
        out.append(LamT(Extract(M.body)))
    elif isinstance(M, App):
        out.append(AppT(Extract(M.fun), Extract(M.arg)))
    elif isinstance(M, Bang):
        out.append(REFL)
    elif isinstance(M, LetBang):
        out.append(LetT(Extract(M.defn), Extract(M.body)))
    elif isinstance(M, Annot):
        out.append(Trans(M.trail, Extract(M.body)))
    elif isinstance(M, Inspect):
        out.append(TrplT(tuple(Extract(b) for b in M.branches)))


def sigma_rules(x: Node) -> List[Node]:
    """All root rewrites of ``x`` under the sigma rules."""
    out: List[Node] = []
    if isinstance(x, Closure):
        _closure_rules(x.body, x.subst, out)
    elif isinstance(x, Comp):
        _comp_rules(x.first, x.second, out)
    elif isinstance(x, Erase):
        _erase_rules(x.body, out)
    elif isinstance(x, Extract):
        _extract_rules(x.term, out)
    return out


def sigmatau_rules(x: Node) -> List[Node]:
    return sigma_rules(x) + tau_rules(x)


def sigma_step(x: Node) -> Optional[Node]:
    """Rewrite the leftmost-outermost sigma-redex, or return ``None``."""
    return rewrite.step(x, sigma_rules)


_SIGMA_MEMO = rewrite.SharedMemo()
_SIGMATAU_MEMO = rewrite.SharedMemo()


def sigma_normalize(x: Node, fuel: Optional[int] = None) -> Node:
    return rewrite.Normalizer(sigma_rules, fuel, "sigma-normalization", _SIGMA_MEMO)(x)


def sigmatau_normalize(x: Node, fuel: Optional[int] = None) -> Node:
    """Unique sigma-tau normal form (pure and tau-normal)."""
    return rewrite.Normalizer(sigmatau_rules, fuel, "sigma-tau-normalization", _SIGMATAU_MEMO)(x)


def sigmatau_equiv(M: Node, N: Node) -> bool:
    return sigmatau_normalize(M) == sigmatau_normalize(N)


def erase_meta(M: Term) -> Term:
    """Meta-level erasure: the sigma-tau normal form minus its top annotation."""
    N = sigmatau_normalize(M)
    return N.body if isinstance(N, Annot) else N


def trailify_meta(M: Term) -> Trail:
    """Meta-level extraction: the top annotation of the sigma-tau normal form."""
    N = sigmatau_normalize(M)
    return N.trail if isinstance(N, Annot) else REFL


def focus(M: Term) -> Term:
    N = sigmatau_normalize(M)
    if isinstance(N, Annot):
        return N
    return Annot(REFL, N)


# ---------------------------------------------------------------------------
# Lazy Beta reduction


def beta_sigma_redexes(M: Term) -> List[Tuple[TermPath, object]]:
    """Beta-redexes reachable through evaluation contexts (never under Erase)."""
    found: List[Tuple[TermPath, object]] = []

    def term(M: Term, path: TermPath, bang: Optional[TermPath]) -> None:
        if isinstance(M, Erase):
            return
        if isinstance(M, App) and isinstance(M.fun, Lam):
            found.append((path, BetaRedex()))
        elif isinstance(M, LetBang) and isinstance(M.defn, Bang):
            found.append((path, BetaBangRedex()))
        elif isinstance(M, Inspect) and bang is not None:
            found.append((path, InspectRedex(bang)))
        if isinstance(M, (Bang, Annot)):
            term(M.body, path + (1,), path if isinstance(M, Bang) else bang)
        elif isinstance(M, Closure):
            term(M.body, path + (0,), bang)
            subst(M.subst, path + (1,))
        else:
            for i, child in enumerate(M.children()):
                term(child, path + (i,), bang)

    def subst(s, path: TermPath) -> None:
        if isinstance(s, Cons):
            term(s.head, path + (0,), None)
            subst(s.tail, path + (1,))
        elif isinstance(s, Comp):
            subst(s.first, path + (0,))
            subst(s.second, path + (1,))

    term(M, (), None)
    return found


def beta_sigma_contract(M: Term, at: TermPath) -> Term:
    """Contract the Beta-redex at ``at`` leaving projections unevaluated."""
    R = subterm_at(M, at)
    if isinstance(R, App) and isinstance(R.fun, Lam):
        body, arg = R.fun.body, R.arg
        trail = Trans(AppT(LamT(Extract(body)), Extract(arg)), BETA)
        return replace_at(M, at, Annot(trail, Closure(Erase(body), Cons(Erase(arg), ID))))
    if isinstance(R, LetBang) and isinstance(R.defn, Bang):
        q, inner, body = R.defn.trail, R.defn.body, R.body
        trail = Trans(LetT(REFL, Extract(body)), BETA_BANG)
        return replace_at(M, at, Annot(trail, Closure(Erase(body), Cons(Annot(q, inner), ID))))
    if isinstance(R, Inspect):
        bang_path = _inspect_bang(M, at)
        bang = subterm_at(M, bang_path)
        history = sigmatau_normalize(Trans(bang.trail, Extract(bang.body)))
        if not is_pure(history):
            raise MalformedHistory(f"inspected history is not pure: {history!r}")
        return replace_at(M, at, Annot(TI, apply_replacement(history, R.branches)))
    raise ValueError(f"no Beta-redex at {at}")


def _inspect_bang(M: Term, at: TermPath) -> TermPath:
    for path, kind in beta_sigma_redexes(M):
        if path == at and isinstance(kind, InspectRedex):
            return kind.bang_path
    raise ValueError(f"inspection at {at} is not reachable from a bang through a bang-free context")
