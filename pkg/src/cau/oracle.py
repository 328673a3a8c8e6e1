"""Term generation and property checking for the calculus and the machine.

Generators are deterministic in their :class:`GenSpec`. Properties are run
either on seeded random terms or, for small sizes, on an exhaustively
enumerated corpus over a restricted alphabet. Each trial ends in one of
``pass``, ``fail``, ``inconclusive`` (fuel or search budget exhausted),
``stuck`` (machine and reference evaluator both stuck) or ``skip`` (the
term does not meet the property's precondition). Failures are shrunk
greedily over subterms.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from . import machine as mach
from .naive import (
    StuckTerm, cau_eval_cbv, find_principal_redexes, meta_subst, principal_contract,
    tau_normalize, tau_rules,
)
from .rewrite import FuelExhausted, Normalizer, successors
from .sigma import (
    MalformedHistory, beta_sigma_contract, beta_sigma_redexes, erase_meta, focus,
    sigma_rules, sigmatau_normalize, sigmatau_rules, trailify_meta,
)
from .syntax import (
    BETA, BETA_BANG, ID, REFL, SHIFT, TI, Annot, App, AppT, Bang, Closure, Comp, Cons,
    Erase, Extract, Id, Index, Inspect, Lam, LamT, LetBang, LetT, Node, Shift, Term,
    Trail, Trans, TrplT, is_pure, max_free_index, positions, replace_at, size,
)

__all__ = [
    "GenFlags", "GenSpec", "GenerationError", "gen_term", "enumerate_terms",
    "enumerate_programs", "Alphabet",    "enumerate_one_step", "joinable", "normal_forms", "beta_focused_step",
    "PROPERTIES", "Report", "check_property", "shrink", "fig1_reductions",
    "cau_successors", "naive_sigma_beta",
]

RULE_SETS = ("tau", "sigma", "sigmatau", "beta_sigma", "cau_principal")


# ---------------------------------------------------------------------------
# Random generation


@dataclass(frozen=True)
class GenFlags:
    bang: bool = True
    inspect: bool = True
    annot: bool = True
    closure: bool = False
    erase: bool = False
    extract: bool = False
    #: probability of building a redex shape when a binary node is chosen
    redex_bias: float = 0.0


PURE = GenFlags(redex_bias=0.4)
PROGRAM = GenFlags(annot=False, redex_bias=0.8)
SIGMA = GenFlags(closure=True, erase=True, extract=True, redex_bias=0.5)


@dataclass(frozen=True)
class GenSpec:
    seed: int = 0
    size: int = 12
    flags: GenFlags = PURE
    closed: bool = False


class GenerationError(ValueError):
    """No term satisfies the requested specification."""


def _scope(s, d: int) -> int:
    """Number of indices a closure body may use under ``s`` in scope ``d``."""
    if isinstance(s, Id):
        return d
    if isinstance(s, Shift):
        return max(d - 1, 0)
    if isinstance(s, Cons):
        return 1 + _scope(s.tail, d)
    if isinstance(s, Comp):
        return _scope(s.first, _scope(s.second, d))
    raise TypeError(s)


class _Gen:
    def __init__(self, rng: random.Random, flags: GenFlags, closed: bool):
        self.rng = rng
        self.flags = flags
        self.closed = closed
        self.bangs = 0  # number of enclosing bangs at the current position

    def biased(self) -> bool:
        return self.rng.random() < self.flags.redex_bias

    def min_term(self, d: int) -> int:
        return 2 if self.closed and d == 0 else 1

    def split(self, total: int, mins: Sequence[int]) -> List[int]:
        parts = list(mins)
        for _ in range(total - sum(mins)):
            parts[self.rng.randrange(len(parts))] += 1
        return parts

    def pick(self, options):
        names = [o for o, _ in options]
        weights = [w for _, w in options]
        return self.rng.choices(names, weights)[0]

    def term(self, n: int, d: int) -> Term:
        f, mt, mt1 = self.flags, self.min_term(d), self.min_term(d + 1)
        opts = []
        if not (self.closed and d == 0):
            opts.append(("var", 2.0 if n <= 2 else 0.15))
        if n >= 1 + mt1:
            opts.append(("lam", 3.0))
        if n >= 1 + 2 * mt:
            opts.append(("app", 3.0))
        if n >= 1 + mt + mt1:
            opts.append(("let", 3.0))
        if f.bang and n >= 2 + mt:
            opts.append(("bang", 1.0))
        if f.annot and n >= 2 + mt:
            opts.append(("annot", 1.0))
        if f.inspect and n >= 1 + 9 * mt:
            opts.append(("inspect", 2.0 if self.bangs else 0.3))
        if f.erase and n >= 1 + mt:
            opts.append(("erase", 1.0))
        if f.closure and n >= 2 + 2:
            opts.append(("closure", 1.0))
        if not opts:
            raise GenerationError(f"no term of size <= {n} at binder depth {d}")
        kind = self.pick(opts)
        rng = self.rng
        if kind == "var":
            return Index(rng.randint(1, d if self.closed else d + 1))
        if kind == "lam":
            return Lam(self.term(n - 1, d + 1))
        if kind == "app":
            a, b = self.split(n - 1, (mt, mt))
            if a >= 1 + mt1 and self.biased():
                return App(Lam(self.term(a - 1, d + 1)), self.term(b, d))
            return App(self.term(a, d), self.term(b, d))
        if kind == "let":
            a, b = self.split(n - 1, (mt, mt1))
            if f.bang and a >= 2 + mt and self.biased():
                defn = self.bang(a, d)
            else:
                defn = self.term(a, d)
            return LetBang(defn, self.term(b, d + 1))
        if kind in ("bang", "annot"):
            # keep most of the budget for the term part
            a = rng.randint(1, max(1, (n - 1 - mt) // 3))
            b = n - 1 - a
            if kind == "bang":
                return self.bang(n, d)
            return Annot(self.trail(a, d), self.term(b, d))
        if kind == "inspect":
            parts = self.split(n - 1, (mt,) * 9)
            return Inspect(tuple(self.term(p, d) for p in parts))
        if kind == "erase":
            return Erase(self.term(n - 1, d))
        # closure: generate the substitution first, then a body in its scope
        budget = rng.randint(1, max(1, (n - 1) // 2))
        s = self.subst(budget, d)
        sc = _scope(s, d)
        rest = n - 1 - size(s)
        if rest < self.min_term(sc):
            s, sc, rest = ID, d, n - 2
        return Closure(self.term(rest, sc), s)

    def bang(self, n: int, d: int) -> Term:
        a = self.rng.randint(1, max(1, (n - 1 - self.min_term(d)) // 3))
        q = self.trail(a, d)
        self.bangs += 1
        try:
            return Bang(q, self.term(n - 1 - a, d))
        finally:
            self.bangs -= 1

    def subst(self, n: int, d: int):
        mt = self.min_term(d)
        opts = [("id", 1.0), ("shift", 1.0)]
        if n >= 2 + mt:
            opts.append(("cons", 3.0))
        if n >= 3:
            opts.append(("comp", 1.0))
        kind = self.pick(opts)
        if kind == "id":
            return ID
        if kind == "shift":
            return SHIFT
        if kind == "cons":
            a, b = self.split(n - 1, (mt, 1))
            return Cons(self.term(a, d), self.subst(b, d))
        a, b = self.split(n - 1, (1, 1))
        second = self.subst(b, d)
        return Comp(self.subst(a, _scope(second, d)), second)

    def trail(self, n: int, d: int) -> Trail:
        f = self.flags
        opts = [("leaf", 2.0 if n <= 2 else 0.3)]
        if n >= 2:
            opts.append(("lam", 1.0))
        if n >= 3:
            opts += [("t", 1.5), ("app", 1.5), ("let", 1.0)]
        if n >= 10:
            opts.append(("tb", 0.3))
        if f.extract and n >= 1 + self.min_term(d):
            opts.append(("ext", 1.0))
        kind = self.pick(opts)
        if kind == "leaf":
            return self.rng.choice((REFL, REFL, BETA, BETA_BANG, TI))
        if kind == "lam":
            return LamT(self.trail(n - 1, d))
        if kind == "tb":
            parts = self.split(n - 1, (1,) * 9)
            return TrplT(tuple(self.trail(p, d) for p in parts))
        if kind == "ext":
            return Extract(self.term(n - 1, d))
        a, b = self.split(n - 1, (1, 1))
        cls = {"t": Trans, "app": AppT, "let": LetT}[kind]
        return cls(self.trail(a, d), self.trail(b, d))


def gen_term(spec: GenSpec) -> Term:
    """A deterministic pseudo-random term with at most ``spec.size`` nodes."""
    if spec.size < 1:
        raise GenerationError("size must be at least 1")
    rng = random.Random(spec.seed)
    gen = _Gen(rng, spec.flags, spec.closed)
    if spec.flags.bang and spec.size >= 2 + gen.min_term(0) and gen.biased() and gen.biased():
        return gen.bang(spec.size, 0)
    return gen.term(spec.size, 0)


# ---------------------------------------------------------------------------
# Exhaustive enumeration over a restricted alphabet


@dataclass(frozen=True)
class Alphabet:
    """Constructors allowed in an exhaustively enumerated corpus."""

    indices: Tuple[int, ...] = (1, 2)
    terms: FrozenSet[str] = frozenset({"lam", "app", "bang", "annot"})
    trail_leaves: Tuple[Trail, ...] = (REFL, BETA)
    trails: FrozenSet[str] = frozenset({"t", "app", "lam"})
    substs: FrozenSet[str] = frozenset()


PURE_ALPHABET = Alphabet()
SIGMA_ALPHABET = Alphabet(
    indices=(1,),
    terms=frozenset({"lam", "app", "bang", "annot", "closure", "erase"}),
    trails=frozenset({"t", "app", "ext"}),
    substs=frozenset({"cons", "comp"}),
)


@lru_cache(maxsize=None)
def _enum(sort: str, n: int, a: Alphabet) -> Tuple[Node, ...]:
    out: List[Node] = []
    if sort == "term":
        if n == 1:
            out += [Index(i) for i in a.indices]
        if n >= 2:
            if "lam" in a.terms:
                out += [Lam(b) for b in _enum("term", n - 1, a)]
            if "erase" in a.terms:
                out += [Erase(b) for b in _enum("term", n - 1, a)]
        for k in range(1, n - 1):
            left, right = _enum("term", k, a), _enum("term", n - 1 - k, a)
            if "app" in a.terms:
                out += [App(x, y) for x in left for y in right]
            trails = _enum("trail", k, a)
            if "bang" in a.terms:
                out += [Bang(q, y) for q in trails for y in right]
            if "annot" in a.terms:
                out += [Annot(q, y) for q in trails for y in right]
            if "closure" in a.terms:
                out += [Closure(x, s) for x in left for s in _enum("subst", n - 1 - k, a)]
    elif sort == "trail":
        if n == 1:
            out += list(a.trail_leaves)
        if n >= 2:
            if "lam" in a.trails:
                out += [LamT(q) for q in _enum("trail", n - 1, a)]
            if "ext" in a.trails:
                out += [Extract(M) for M in _enum("term", n - 1, a)]
        for k in range(1, n - 1):
            for x in _enum("trail", k, a):
                for y in _enum("trail", n - 1 - k, a):
                    if "t" in a.trails:
                        out.append(Trans(x, y))
                    if "app" in a.trails:
                        out.append(AppT(x, y))
    else:
        if n == 1:
            out += [ID, SHIFT]
        for k in range(1, n - 1):
            if "cons" in a.substs:
                out += [Cons(x, y) for x in _enum("term", k, a) for y in _enum("subst", n - 1 - k, a)]
            if "comp" in a.substs:
                out += [Comp(x, y) for x in _enum("subst", k, a) for y in _enum("subst", n - 1 - k, a)]
    return tuple(out)


def enumerate_terms(max_size: int, sigma: bool = False, alphabet: Optional[Alphabet] = None) -> Iterator[Term]:
    """Every term over a restricted alphabet with at most ``max_size`` nodes.

    The default pure alphabet has indices 1 and 2, lambda, application, bang
    and annotation, and the trails r, beta, t, app and lam. The sigma
    alphabet trades index 2 and lam-trails for closures, erasures,
    extractions and the four substitution forms.
    """
    a = alphabet or (SIGMA_ALPHABET if sigma else PURE_ALPHABET)
    for n in range(1, max_size + 1):
        yield from _enum("term", n, a)


def enumerate_programs(max_size: int) -> Iterator[Term]:
    """Closed pure terms of the full program alphabet (including let and !)."""
    for n in range(1, max_size + 1):
        yield from _programs(n, 0)


@lru_cache(maxsize=None)
def _programs(n: int, d: int) -> Tuple[Term, ...]:
    out: List[Term] = []
    if n == 1:
        out += [Index(i) for i in range(1, d + 1)]
    if n >= 2:
        out += [Lam(b) for b in _programs(n - 1, d + 1)]
    for a in range(1, n - 1):
        for x in _programs(a, d):
            out += [App(x, y) for y in _programs(n - 1 - a, d)]
            out += [LetBang(x, y) for y in _programs(n - 1 - a, d + 1)]
        if a == 1:
            out += [Bang(REFL, y) for y in _programs(n - 2, d)]
    return tuple(out)


# ---------------------------------------------------------------------------
# One-step successors, normal-form sets and joinability


def cau_successors(M: Term) -> List[Term]:
    """Every tau-normalized principal contraction of a pure term."""
    return [tau_normalize(principal_contract(M, p)) for p, _ in find_principal_redexes(M)]


def _beta_successors(M: Term) -> List[Term]:
    out = []
    for p, _ in beta_sigma_redexes(M):
        try:
            out.append(sigmatau_normalize(beta_sigma_contract(M, p)))
        except MalformedHistory:
            continue
    return out


def enumerate_one_step(x: Node, rules: str) -> List[Tuple[tuple, Node]]:
    """All single-step rewrites of ``x`` under a named rule set, with positions."""
    if rules == "tau":
        return list(successors(x, tau_rules))
    if rules == "sigma":
        return list(successors(x, sigma_rules))
    if rules == "sigmatau":
        return list(successors(x, sigmatau_rules))
    if rules == "beta_sigma":
        out = []
        for p, _ in beta_sigma_redexes(x):
            try:
                out.append((p, beta_sigma_contract(x, p)))
            except MalformedHistory:
                continue
        return out
    if rules == "cau_principal":
        return [(p, principal_contract(x, p)) for p, _ in find_principal_redexes(x)]
    raise ValueError(f"unknown rule set {rules!r}; expected one of {RULE_SETS}")


_NORMALIZERS = {"tau": tau_normalize, "sigmatau": sigmatau_normalize}


def _reachable(x: Node, succ: Callable[[Node], List[Node]], bound: int, cap: int) -> Optional[Set[Node]]:
    seen = {x}
    frontier = [x]
    for _ in range(bound):
        nxt = []
        for y in frontier:
            for z in succ(y):
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
                    if len(seen) > cap:
                        return None
        frontier = nxt
        if not frontier:
            break
    return seen


class SearchBudgetExceeded(RuntimeError):
    pass


def joinable(x: Node, y: Node, rules: str, bound: int = 8, cap: int = 20_000) -> bool:
    """Whether ``x`` and ``y`` have a common reduct.

    Confluent systems compare normal forms; the Beta-style relations search
    breadth-first over normal forms up to ``bound`` steps on each side.
    """
    if x == y:
        return True
    if rules in ("tau", "sigmatau"):
        norm = _NORMALIZERS[rules]
        return norm(x) == norm(y)
    if rules == "sigma":
        from .sigma import sigma_normalize
        return sigma_normalize(x) == sigma_normalize(y)
    if rules == "beta_sigma":
        start, succ = sigmatau_normalize, _beta_successors
    elif rules == "cau_principal":
        start, succ = tau_normalize, cau_successors
    else:
        raise ValueError(f"unknown rule set {rules!r}")
    rx = _reachable(start(x), succ, bound, cap)
    ry = _reachable(start(y), succ, bound, cap)
    if rx is None or ry is None:
        raise SearchBudgetExceeded(f"more than {cap} reducts within {bound} steps")
    return not rx.isdisjoint(ry)


def normal_forms(x: Node, rules, limit: int = 20_000, memo: Optional[dict] = None) -> Optional[FrozenSet[Node]]:
    """Every normal form reachable from ``x`` by any sequence of choices.

    Returns ``None`` when more than ``limit`` distinct reducts are visited.
    """
    memo = {} if memo is None else memo
    visited = [0]

    def go(y: Node) -> FrozenSet[Node]:
        hit = memo.get(y)
        if hit is not None:
            return hit
        visited[0] += 1
        if visited[0] > limit:
            raise SearchBudgetExceeded
        succ = [z for _, z in successors(y, rules)]
        if not succ:
            res = frozenset((y,))
        else:
            acc: Set[Node] = set()
            for z in succ:
                acc |= go(z)
            res = frozenset(acc)
        memo[y] = res
        return res

    try:
        return go(x)
    except SearchBudgetExceeded:
        return None


def random_strategy_normalize(x: Node, rules, rng: random.Random, fuel: int = 10_000) -> Node:
    """Normalize by choosing uniformly among all redexes at every step."""
    for _ in range(fuel):
        succ = list(successors(x, rules))
        if not succ:
            return x
        x = rng.choice(succ)[1]
    raise FuelExhausted("random-strategy normalization", fuel, x)


# ---------------------------------------------------------------------------
# Focused beta reduction


def beta_focused_step(M: Term) -> List[Term]:
    """All eager focused-beta successors of ``M``."""
    N = focus(M)
    return [focus(principal_contract(N, p)) for p, _ in find_principal_redexes(N)]


# ---------------------------------------------------------------------------
# The naive explicit-substitution calculus (only used to exhibit anachronism)


def naive_sigma_beta(M: Term, at: tuple) -> Term:
    """Naive lazy beta: ``(lam M) N -> beta |> M[N . id]`` with no projections."""
    from .syntax import subterm_at
    R = subterm_at(M, at)
    if not (isinstance(R, App) and isinstance(R.fun, Lam)):
        raise ValueError(f"no beta-redex at {at}")
    return replace_at(M, at, Annot(BETA, Closure(R.fun.body, Cons(R.arg, ID))))


def fig1_reductions(q: Trail = BETA, body_head: Term = Index(2), arg: Term = Lam(Index(1))) -> dict:
    """Both reduction orders of ``(lam. M 1 1) (q |> N)`` under naive substitutions."""
    start = App(Lam(App(App(body_head, Index(1)), Index(1))), Annot(q, arg))
    # left: contract first, then normalize substitutions and trails
    left = sigmatau_normalize(naive_sigma_beta(start, ()))
    # right: tau first, then contract
    tau_first = tau_normalize(start)
    redex_at = next(p for p, _ in find_principal_redexes(tau_first))
    right = sigmatau_normalize(naive_sigma_beta(tau_first, redex_at))
    naive = tau_normalize(principal_contract(tau_first, redex_at))
    return {"start": start, "tau_first": tau_first, "left": left, "right": right, "naive": naive}


# ---------------------------------------------------------------------------
# Property harness

PASS, FAIL, INCONCLUSIVE, STUCK, SKIP = "pass", "fail", "inconclusive", "stuck", "skip"


@dataclass(frozen=True)
class Outcome:
    status: str
    detail: str = ""


def _ok(cond: bool, detail: str) -> Outcome:
    return Outcome(PASS) if cond else Outcome(FAIL, detail)


@dataclass(frozen=True)
class Property:
    name: str
    trial: Callable[[Term], Outcome]
    flags: GenFlags
    closed: bool = False
    corpus: str = "pure"  # which exhaustive corpus: pure | sigma | programs | fixed
    prepare: Callable[[Term], Term] = lambda M: M


def _try(trial: Callable[[Term], Outcome]) -> Callable[[Term], Outcome]:
    def wrapped(M: Term) -> Outcome:
        try:
            return trial(M)
        except FuelExhausted as exc:
            return Outcome(INCONCLUSIVE, str(exc))
        except SearchBudgetExceeded as exc:
            return Outcome(INCONCLUSIVE, f"search budget: {exc}")
        except RecursionError:
            return Outcome(INCONCLUSIVE, "recursion depth exceeded")
    wrapped.__name__ = trial.__name__
    return wrapped


def _confluence(rules, normalize, strategies: int = 2) -> Callable[[Term], Outcome]:
    """Every first-step choice, and a few random strategies, reach one normal form."""

    def trial(M: Term) -> Outcome:
        nf = normalize(M)
        if normalize(nf) != nf:
            return Outcome(FAIL, "normalization is not idempotent")
        if list(successors(nf, rules)):
            return Outcome(FAIL, "normalizer result still has a redex")
        for p, y in successors(M, rules):
            if normalize(y) != nf:
                return Outcome(FAIL, f"choosing the step at {p} leads to another normal form")
        if size(M) <= 9:  # small terms: the first-step choices above are exhaustive enough
            return Outcome(PASS)
        rng = random.Random(hash(M))
        for _ in range(strategies):
            other = random_strategy_normalize(M, rules, rng)
            if other != nf:
                return Outcome(FAIL, "a random strategy reached another normal form")
        return Outcome(PASS)

    return trial


def _sigmatau_termination(M: Term) -> Outcome:
    nf = sigmatau_normalize(M)
    if not is_pure(nf):
        return Outcome(FAIL, "sigma-tau normal form is not pure")
    if list(successors(nf, sigmatau_rules)):
        return Outcome(FAIL, "normal form still has a redex")
    return Outcome(PASS)


def _simulation_forward(M: Term) -> Outcome:
    redexes = find_principal_redexes(M)
    if not redexes:
        return Outcome(SKIP)
    sigma_positions = {p for p, _ in beta_sigma_redexes(M)}
    for p, _ in redexes:
        if p not in sigma_positions:
            return Outcome(FAIL, f"principal redex at {p} is not a Beta-redex")
        a = tau_normalize(principal_contract(M, p))
        b = sigmatau_normalize(beta_sigma_contract(M, p))
        if a != b:
            return Outcome(FAIL, f"step at {p} disagrees")
    return Outcome(PASS)


def _cau_distance(a: Term, b: Term, bound: int) -> Optional[int]:
    if a == b:
        return 0
    frontier, seen = [a], {a}
    for k in range(1, bound + 1):
        nxt = []
        for x in frontier:
            for y in cau_successors(x):
                if y == b:
                    return k
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if len(seen) > 5_000:
            raise SearchBudgetExceeded("backward simulation search")
    return None


#: Maximum number of CAU steps allowed to simulate one Beta step.
BACKWARD_STEP_BOUND = 1


def _simulation_backward(M: Term) -> Outcome:
    redexes = beta_sigma_redexes(M)
    if not redexes:
        return Outcome(SKIP)  # no Beta step to simulate
    base = sigmatau_normalize(M)
    for _, y in successors(M, sigmatau_rules):
        if sigmatau_normalize(y) != base:
            return Outcome(FAIL, "a sigma-tau step changed the normal form")
    for p, _ in redexes:
        try:
            N = beta_sigma_contract(M, p)
        except MalformedHistory as exc:
            return Outcome(INCONCLUSIVE, str(exc))
        d = _cau_distance(base, sigmatau_normalize(N), 4)
        if d is None or d > BACKWARD_STEP_BOUND:
            return Outcome(FAIL, f"Beta step at {p} needs {'> 4' if d is None else d} CAU steps")
    return Outcome(PASS)


def _relativized_confluence(M: Term) -> Outcome:
    derivs = []
    for p, _ in beta_sigma_redexes(M):
        try:
            derivs.append(sigmatau_normalize(beta_sigma_contract(M, p)))
        except MalformedHistory:
            continue
    if len(derivs) < 2:
        return Outcome(SKIP)
    for i in range(len(derivs)):
        for j in range(i + 1, len(derivs)):
            a, b = derivs[i], derivs[j]
            if joinable(a, b, "cau_principal", 3, 2_000) and not joinable(a, b, "beta_sigma", 3, 2_000):
                return Outcome(FAIL, f"derivatives {i} and {j} join in CAU but not under Beta")
    return Outcome(PASS)


_CONTRACT_ZERO = {1, 3, 4, 6, 7, 8, 10}

#: Machine fuel used by the machine properties (matching the acceptance runs).
MACHINE_PROPERTY_FUEL = 500


def _machine_run(M: Term, fuel: int):
    return mach.run(mach.inject(M), fuel)


def _machine_soundness(M: Term, fuel: int = MACHINE_PROPERTY_FUEL) -> Outcome:
    result = _machine_run(M, fuel)
    prev = sigmatau_normalize(mach.denote_config(mach.inject(M)))
    if prev != sigmatau_normalize(M):
        return Outcome(FAIL, "initial configuration does not denote the program")
    for k, (rule, c) in enumerate(result.trace):
        cur = sigmatau_normalize(mach.denote_config(c))
        if rule in _CONTRACT_ZERO:
            if cur != prev:
                return Outcome(FAIL, f"transition {k} (rule {rule}) changed the denotation")
        elif cur not in cau_successors(prev):
            return Outcome(FAIL, f"transition {k} (rule {rule}) is not one CAU step")
        prev = cur
    out = result.outcome
    if isinstance(out, mach.OutOfFuel):
        return Outcome(INCONCLUSIVE, "machine fuel exhausted")
    try:
        expected = cau_eval_cbv(M, fuel=fuel)
    except StuckTerm as exc:
        if isinstance(out, mach.Stuck):
            return Outcome(STUCK, f"machine: {out.reason}; evaluator: {exc}")
        return Outcome(FAIL, f"evaluator stuck ({exc}) but machine finished")
    except FuelExhausted:
        return Outcome(INCONCLUSIVE, "evaluator fuel exhausted")
    if isinstance(out, mach.Stuck):
        return Outcome(FAIL, f"machine stuck ({out.reason}) but evaluator finished")
    got = sigmatau_normalize(mach.denote_value(out.value))
    return _ok(got == expected, "final value differs from the call-by-value evaluator")


def _machine_validity(M: Term, fuel: int = MACHINE_PROPERTY_FUEL) -> Outcome:
    c0 = mach.inject(M)
    if isinstance(mach.validate(c0), mach.Invalid):
        return Outcome(FAIL, "initial configuration is invalid")
    result = _machine_run(M, fuel)
    for k, (rule, c) in enumerate(result.trace):
        v = mach.validate(c)
        if isinstance(v, mach.Invalid):
            return Outcome(FAIL, f"configuration after transition {k} (rule {rule}): {v.reason}")
        for frame in c.stack:
            if not isinstance(frame.code, mach.PureCode):
                continue
            M0 = frame.code.term
            if isinstance(M0, Index):
                expected = sigmatau_normalize(Erase(Closure(M0, mach.env_subst(frame.env))))
                got = sigmatau_normalize(mach.denote_closure(mach.env_lookup(frame.env, M0.n)))
                if expected != got:
                    return Outcome(FAIL, "environment lookup disagrees with the closure denotation")
    if isinstance(result.outcome, mach.OutOfFuel):
        return Outcome(INCONCLUSIVE, "machine fuel exhausted")
    return Outcome(PASS)


def _projection_agreement(M: Term) -> Outcome:
    nf = sigmatau_normalize(M)
    if sigmatau_normalize(Erase(M)) != erase_meta(M):
        return Outcome(FAIL, "erasure disagrees with the meta-level erasure")
    if sigmatau_normalize(Extract(M)) != trailify_meta(M):
        return Outcome(FAIL, "extraction disagrees with the meta-level extraction")
    if sigmatau_normalize(focus(M)) != nf:
        return Outcome(FAIL, "focusing changed the normal form")
    return Outcome(PASS)


def _subst_instance(M: Term):
    """Decode ``body[N1 . ... . Nk . shift^p]`` with pure body and arguments."""
    if not isinstance(M, Closure) or not is_pure(M.body):
        return None
    s, Ns = M.subst, []
    while isinstance(s, Cons):
        if not is_pure(s.head):
            return None
        Ns.append(s.head)
        s = s.tail
    p = 0
    while isinstance(s, Comp) and isinstance(s.first, Shift):
        p, s = p + 1, s.second
    if isinstance(s, Shift):
        p += 1
    elif not isinstance(s, Id):
        return None
    return M.body, Ns, p


def shift_power(p: int):
    if p == 0:
        return ID
    s = SHIFT
    for _ in range(p - 1):
        s = Comp(SHIFT, s)
    return s


def substitution_instance(body: Term, Ns: Sequence[Term], p: int) -> Term:
    s = shift_power(p)
    for N in reversed(Ns):
        s = Cons(N, s)
    return Closure(body, s)


def _substitution_lemma(M: Term) -> Outcome:
    inst = _subst_instance(M)
    if inst is None:
        return Outcome(SKIP)
    body, Ns, p = inst
    body = sigmatau_normalize(body)
    Ns = [sigmatau_normalize(N) for N in Ns]
    lhs = sigmatau_normalize(substitution_instance(body, Ns, p))
    rhs = sigmatau_normalize(meta_subst(body, p, Ns))
    return _ok(lhs == rhs, "explicit and meta-level substitution disagree")


def _admissible_rules(M: Term, fuel: int = MACHINE_PROPERTY_FUEL) -> Outcome:
    result = _machine_run(M, fuel)
    c = mach.inject(M)
    checked = 0
    for rule, nxt in result.trace:
        if rule in (2, 5, 9):
            lhs, rhs = _admissible_sides(rule, c, nxt)
            target = sigmatau_normalize(rhs)
            if target not in _beta_successors(sigmatau_normalize(lhs)):
                return Outcome(FAIL, f"rule {rule} output is not one Beta step from its source")
            checked += 1
        c = nxt
    if not checked:
        return Outcome(SKIP)
    return Outcome(PASS)


def _admissible_sides(rule: int, c: mach.Config, nxt: mach.Config) -> Tuple[Term, Term]:
    top, new = c.stack[0], nxt.stack[0]
    rhs_local = Annot(new.trail, Erase(Closure(new.code.term, mach.env_subst(new.env))))
    if rule == 2:
        W, F = c.dump[0], c.dump[1]
        lhs = App(mach.denote_value(F), mach.denote_value(W))
        rhs = Annot(AppT(F.trail, W.trail), Annot(BETA, Erase(Closure(F.closure.body, mach.env_subst((mach.Value(REFL, W.closure),) + F.closure.env)))))
        return lhs, rhs
    if rule == 5:
        D0 = c.dump[0]
        lhs = LetBang(mach.denote_value(D0), mach._let_body(top.code.body, top.env))
        return Annot(top.trail, lhs), rhs_local
    # rule 9 needs the enclosing bang: compare whole denotations
    return mach.denote_config(c), mach.denote_config(nxt)


def _fig1(M: Term) -> Outcome:
    r = fig1_reductions()
    left_expected = Trans(BETA, AppT(AppT(REFL, BETA), BETA))
    right_expected = Trans(AppT(REFL, BETA), BETA)
    if not (isinstance(r["left"], Annot) and r["left"].trail == left_expected):
        return Outcome(FAIL, f"left branch trail {r['left']!r}")
    if not (isinstance(r["right"], Annot) and r["right"].trail == right_expected):
        return Outcome(FAIL, f"right branch trail {r['right']!r}")
    if r["right"] != r["naive"]:
        return Outcome(FAIL, "tau-first branch differs from the naive engine")
    if joinable(r["left"], r["right"], "beta_sigma", 8):
        return Outcome(FAIL, "the two branches are joinable")
    return Outcome(PASS)


def _tau_nf(M: Term) -> Term:
    return tau_normalize(M)


PROPERTIES: Dict[str, Property] = {
    p.name: p
    for p in [
        Property("tau-confluence", _try(_confluence(tau_rules, tau_normalize)), PURE),
        Property("sigmatau-confluence", _try(_confluence(sigmatau_rules, sigmatau_normalize)), SIGMA, corpus="sigma"),
        Property("sigmatau-termination", _try(_sigmatau_termination), SIGMA, corpus="sigma"),
        Property("simulation-forward", _try(_simulation_forward), PURE, prepare=_tau_nf),
        Property("simulation-backward", _try(_simulation_backward), SIGMA, corpus="sigma"),
        Property("relativized-confluence", _try(_relativized_confluence), SIGMA, corpus="sigma"),
        Property("machine-soundness", _try(_machine_soundness), PROGRAM, closed=True, corpus="programs"),
        Property("machine-validity", _try(_machine_validity), PROGRAM, closed=True, corpus="programs"),
        Property("projection-agreement", _try(_projection_agreement), SIGMA, corpus="sigma"),
        Property("substitution-lemma", _try(_substitution_lemma), PURE, corpus="substitution"),
        Property("admissible-rules", _try(_admissible_rules), PROGRAM, closed=True, corpus="programs"),
        Property("fig1-anachronism", _try(_fig1), PURE, corpus="fixed"),
    ]
}


@dataclass
class Report:
    property: str
    mode: str
    trials: int = 0
    counts: Counter = field(default_factory=Counter)
    counterexample: Optional[Term] = None
    detail: str = ""
    seconds: float = 0.0

    @property
    def failures(self) -> int:
        return self.counts[FAIL]

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def summary(self) -> dict:
        from .frontend.printer import print_term
        return {
            "property": self.property,
            "mode": self.mode,
            "trials": self.trials,
            "passed": self.counts[PASS],
            "failures": self.counts[FAIL],
            "inconclusive": self.counts[INCONCLUSIVE],
            "stuck": self.counts[STUCK],
            "skipped": self.counts[SKIP],
            "ok": self.ok,
            "counterexample": None if self.counterexample is None else print_term(self.counterexample),
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }

    def render(self) -> str:
        s = self.summary()
        verdict = "PASS" if self.ok else "FAIL"
        line = (f"{verdict} {self.property} [{self.mode}]: {s['trials']} trials, {s['passed']} passed, "
                f"{s['failures']} failed, {s['inconclusive']} inconclusive, {s['stuck']} stuck, "
                f"{s['skipped']} skipped ({s['seconds']}s)")
        if s["counterexample"] is not None:
            line += f"\n  counterexample: {s['counterexample']}\n  reason: {self.detail}"
        return line


def _subst_from_seed(seed: int, size: int) -> Term:
    rng = random.Random(seed)
    k = rng.randint(0, 3)
    p = rng.randint(0, 2)
    body = gen_term(GenSpec(seed, max(1, size), PURE, False))
    Ns = [gen_term(GenSpec(rng.getrandbits(63), max(1, size // 3), PURE, False)) for _ in range(k)]
    return substitution_instance(body, Ns, p)


def _random_inputs(prop: Property, spec: GenSpec) -> Iterator[Term]:
    rng = random.Random(spec.seed)
    while True:
        seed = rng.getrandbits(63)
        n = rng.randint(1, spec.size)
        if prop.corpus == "substitution":
            yield _subst_from_seed(seed, n)
            continue
        try:
            yield prop.prepare(gen_term(GenSpec(seed, n, prop.flags, prop.closed)))
        except GenerationError:
            continue


def _exhaustive_inputs(prop: Property, size: int) -> Iterator[Term]:
    if prop.corpus == "sigma":
        yield from enumerate_terms(size, sigma=True)
    elif prop.corpus == "programs":
        yield from enumerate_programs(size)
    elif prop.corpus == "substitution":
        for M in enumerate_terms(max(1, size - 2)):
            for N in enumerate_terms(max(1, min(3, size - 1 - size_of(M)))):
                for p in range(3):
                    yield substitution_instance(M, [N], p)
            for p in range(3):
                yield substitution_instance(M, [], p)
    else:
        for M in enumerate_terms(size):
            yield prop.prepare(M)


def size_of(M: Term) -> int:
    return size(M)


def check_property(name: str, spec: GenSpec = GenSpec(), count: int = 100, exhaustive: Optional[bool] = None,
                   time_limit: Optional[float] = None) -> Report:
    """Run ``count`` random trials of a named property (or the exhaustive corpus).

    When ``exhaustive`` is left unset, sizes of at most 10 select the
    exhaustive corpus. Trials whose term misses the precondition are skipped
    and replaced, up to twenty times ``count`` attempts in random mode.
    """
    try:
        prop = PROPERTIES[name]
    except KeyError:
        raise ValueError(f"unknown property {name!r}; known: {', '.join(PROPERTIES)}") from None
    if exhaustive is None:
        exhaustive = spec.size <= 10
    t0 = time.perf_counter()
    if prop.corpus == "fixed":
        report = Report(name, "fixed")
        inputs: Iterator[Term] = iter([Index(1)])
        want = 1
    elif exhaustive:
        report = Report(name, f"exhaustive<= {spec.size}")
        inputs = _exhaustive_inputs(prop, spec.size)
        want = None
    else:
        report = Report(name, f"random seed={spec.seed} size<= {spec.size}")
        inputs = _random_inputs(prop, spec)
        want = count
    attempts = 0
    for M in inputs:
        if want is not None and (report.trials >= want or attempts >= 20 * max(want, 1)):
            break
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            report.detail = report.detail or "time limit reached"
            break
        attempts += 1
        out = prop.trial(M)
        report.counts[out.status] += 1
        if out.status == SKIP:
            continue
        report.trials += 1
        if out.status == FAIL and report.counterexample is None:
            small, why = shrink(prop, M, out.detail)
            report.counterexample, report.detail = small, why
    report.seconds = time.perf_counter() - t0
    return report


def _shrink_candidates(M: Term) -> Iterator[Term]:
    for path, sub in positions(M):
        if path and isinstance(sub, Term):
            yield sub
    for path, sub in positions(M):
        if path and isinstance(sub, Term) and size(sub) > 1:
            yield replace_at(M, path, Index(1))
        if path and isinstance(sub, Term) and size(sub) > 2:
            yield replace_at(M, path, Lam(Index(1)))
        if path and isinstance(sub, Trail) and size(sub) > 1:
            yield replace_at(M, path, REFL)


def shrink(prop: Property, M: Term, detail: str, max_rounds: int = 200) -> Tuple[Term, str]:
    """Greedily replace ``M`` by smaller terms that still fail the property."""
    for _ in range(max_rounds):
        for cand in sorted(set(_shrink_candidates(M)), key=size):
            if size(cand) >= size(M):
                continue
            if prop.closed and max_free_index(cand) != 0:
                continue
            out = prop.trial(prop.prepare(cand))
            if out.status == FAIL:
                M, detail = prop.prepare(cand), out.detail
                break
        else:
            break
    return M, detail
