"""Golden reproductions of the worked examples, shared by the CLI and tests."""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from ..naive import apply_replacement, cau_step, find_principal_redexes, tau_normalize
from ..oracle import fig1_reductions, joinable
from ..syntax import (
    BETA, BETA_BANG, REFL, AppT, Bang, LetT, Term, Trail, Trans, TrplT, positions,
)
from .parser import parse_term
from .printer import print_term, print_trail

__all__ = [
    "theta_plus", "count_contractions", "church_value", "normalize_full",
    "example1", "example2", "example3", "example4", "fig1", "final_bang_trail",
]

EXAMPLE1 = r"! let x = !{b} two in let y = !{b} six in plus x y"
EXAMPLE2 = r"! ((\x.\y.\p. p x y) two) six"
EXAMPLE4 = EXAMPLE1


def theta_plus() -> Tuple[Term, ...]:
    """The counting replacement: 0 for r, 1 for each contraction, plus/sum elsewhere."""
    names = ("zero", "plus", "one", "one", "one", "ident", "plus", "plus", "sum9")
    return tuple(parse_term(n) for n in names)


def normalize_full(M: Term, fuel: int = 10_000) -> Term:
    """Leftmost-outermost reduction to normal form (fuel in contractions)."""
    M = tau_normalize(M)
    for _ in range(fuel):
        nxt = cau_step(M)
        if nxt is None:
            return M
        M = nxt
    from ..rewrite import FuelExhausted
    raise FuelExhausted("full reduction", fuel, M)


def church_value(M: Term) -> Optional[int]:
    """Decode a Church numeral (ignoring outer annotations and bangs), or ``None``."""
    from ..syntax import Annot, App, Index, Lam
    while isinstance(M, (Annot, Bang)):
        M = M.body
    if not (isinstance(M, Lam) and isinstance(M.body, Lam)):
        return None
    body, n = M.body.body, 0
    while isinstance(body, App) and body.fun == Index(2):
        body, n = body.arg, n + 1
    return n if body == Index(1) else None


def count_contractions(q: Trail) -> int:
    """Brute-force count of beta, beta-bang and ti leaves in a trail."""
    from ..syntax import Beta, BetaBang, TrailInspect
    return sum(1 for _, x in positions(q) if isinstance(x, (Beta, BetaBang, TrailInspect)))


def final_bang_trail(M: Term) -> Trail:
    """Trail of the outermost bang (or of the root annotation) of ``M``."""
    from ..syntax import Annot
    for _, x in positions(M):
        if isinstance(x, Bang):
            return x.trail
    return M.trail if isinstance(M, Annot) else REFL


def example1() -> Dict[str, object]:
    M = parse_term(EXAMPLE1)
    N = normalize_full(M)
    inner = N.body if isinstance(N, Bang) else N
    return {"term": M, "result": N, "trail": N.trail if isinstance(N, Bang) else REFL,
            "value": church_value(inner)}


def example2() -> Dict[str, object]:
    M = tau_normalize(parse_term(EXAMPLE2))
    first = cau_step(M)
    second = cau_step(first)
    return {"term": M, "step1": first, "step2": second}


def example3() -> Dict[str, object]:
    q = Trans(LetT(BETA, REFL), BETA_BANG)
    replaced = apply_replacement(q, theta_plus())
    return {"trail": q, "term": replaced, "value": church_value(normalize_full(replaced))}


def example4() -> Dict[str, object]:
    M = tau_normalize(parse_term(EXAMPLE4))
    return {"term": M, "step1": cau_step(M)}


def fig1() -> Dict[str, object]:
    r = fig1_reductions()
    r["joinable"] = joinable(r["left"], r["right"], "beta_sigma", 8)
    return r


def render(name: str) -> List[str]:
    """Human-readable lines for a named demo."""
    if name == "example1":
        r = example1()
        return [f"term:   {print_term(r['term'])}", f"result: {print_term(r['result'])}",
                f"trail:  {print_trail(r['trail'])}", f"value:  {r['value']}"]
    if name == "example2":
        r = example2()
        return [f"term:   {print_term(r['term'])}",
                f"step 1: {print_trail(r['step1'].trail)}", f"        {print_term(r['step1'])}",
                f"step 2: {print_trail(r['step2'].trail)}", f"        {print_term(r['step2'])}",
                "trails before tau: t(r, app(b, r)) and t(t(r, app(b, r)), b)"]
    if name == "example3":
        r = example3()
        return [f"trail:  {print_trail(r['trail'])}", f"count term: {print_term(r['term'])}",
                f"value:  {r['value']}"]
    if name == "example4":
        r = example4()
        return [f"term:   {print_term(r['term'])}", f"step 1: {print_trail(r['step1'].trail)}"]
    if name == "fig1":
        r = fig1()
        return [f"start:     {print_term(r['start'])}",
                f"beta first: {print_trail(r['left'].trail)} |> {print_term(r['left'].body)}",
                f"tau first:  {print_trail(r['right'].trail)} |> {print_term(r['right'].body)}",
                f"naive engine agrees with tau first: {r['naive'] == r['right']}",
                f"joinable (Beta, depth 8): {r['joinable']}"]
    raise ValueError(f"unknown demo {name!r}")
