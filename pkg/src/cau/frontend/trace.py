"""Reduction engines with JSON Lines traces.

Every engine yields :class:`TraceRow` records: row 0 carries the input term,
each later row one reduction step. A trace file is replayable: rerunning its
engine on row 0's term reproduces every row.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import IO, Iterable, Iterator, List, Optional, Union

from .. import machine as mach
from ..naive import (
    BetaBangRedex, BetaRedex, InspectRedex, find_principal_redexes, principal_contract,
    tau_normalize,
)
from ..rewrite import FuelExhausted
from ..sigma import MalformedHistory, beta_sigma_contract, beta_sigma_redexes, sigmatau_normalize
from ..syntax import Bang, Extract, Term, TermPath, Trans, subterm_at
from .parser import parse_term
from .printer import print_term, print_trail

__all__ = ["TraceRow", "EngineStuck", "reduce_term", "write_trace", "read_trace", "replay", "ENGINES"]

ENGINES = ("naive", "sigma", "machine")


@dataclass(frozen=True)
class TraceRow:
    step: int
    engine: str
    rule: str
    position: Optional[List[int]] = None
    term: Optional[str] = None
    bang_trail: Optional[str] = None
    stack_depth: Optional[int] = None
    dump_depth: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "TraceRow":
        return cls(**json.loads(line))


class EngineStuck(RuntimeError):
    """The engine reached a non-value it cannot reduce."""


def _label(kind) -> str:
    if isinstance(kind, BetaRedex):
        return "beta"
    if isinstance(kind, BetaBangRedex):
        return "beta!"
    if isinstance(kind, InspectRedex):
        return "iota"
    return type(kind).__name__


def _nearest_bang(M: Term, at: TermPath) -> Optional[TermPath]:
    found, node = None, M
    for depth, i in enumerate(at):
        if isinstance(node, Bang):
            found = at[:depth]
        kids = node.children()
        if i >= len(kids):
            break
        node = kids[i]
    return found


def _bang_trail(M: Term, at: TermPath, sigma: bool) -> Optional[str]:
    path = _nearest_bang(M, at)
    if path is None:
        return None
    try:
        bang = subterm_at(M, path)
    except (IndexError, AttributeError):
        return None
    if not isinstance(bang, Bang):
        return None
    q = sigmatau_normalize(Trans(bang.trail, Extract(bang.body))) if sigma else bang.trail
    return print_trail(q)


class _Run:
    def __init__(self):
        self.result: Optional[Term] = None


def _naive(M: Term, max_steps: int, run: _Run) -> Iterator[TraceRow]:
    M = tau_normalize(M)
    for step in range(1, max_steps + 1):
        redexes = find_principal_redexes(M)
        if not redexes:
            run.result = M
            return
        at, kind = redexes[0]
        M = tau_normalize(principal_contract(M, at))
        yield TraceRow(step, "naive", _label(kind), list(at), print_term(M), _bang_trail(M, at, False))
    if not find_principal_redexes(M):
        run.result = M
        return
    raise FuelExhausted("naive reduction", max_steps, M)


def _sigma(M: Term, max_steps: int, run: _Run) -> Iterator[TraceRow]:
    for step in range(1, max_steps + 1):
        redexes = beta_sigma_redexes(M)
        if redexes:
            at, kind = redexes[0]
            try:
                M = beta_sigma_contract(M, at)
            except MalformedHistory as exc:
                raise EngineStuck(str(exc)) from None
            yield TraceRow(step, "sigma", _label(kind), list(at), print_term(M), _bang_trail(M, at, True))
            continue
        N = sigmatau_normalize(M)
        if N == M:
            run.result = M
            return
        M = N
        yield TraceRow(step, "sigma", "sigmatau", [], print_term(M))
    N = sigmatau_normalize(M)
    if not beta_sigma_redexes(N):
        run.result = N
        return
    raise FuelExhausted("sigma reduction", max_steps, M)


def _machine(M: Term, max_steps: int, run: _Run, denote: bool = True) -> Iterator[TraceRow]:
    c = mach.inject(M)
    for step in range(1, max_steps + 1):
        out = mach.step(c)
        if isinstance(out, mach.Final):
            run.result = sigmatau_normalize(mach.denote_value(out.value))
            return
        if isinstance(out, mach.Stuck):
            raise EngineStuck(out.reason)
        c = out.config
        term = print_term(sigmatau_normalize(mach.denote_config(c))) if denote else None
        yield TraceRow(step, "machine", str(out.rule), None, term, None, len(c.stack), len(c.dump))
    out = mach.step(c)
    if isinstance(out, mach.Final):
        run.result = sigmatau_normalize(mach.denote_value(out.value))
        return
    if isinstance(out, mach.Stuck):
        raise EngineStuck(out.reason)
    raise FuelExhausted("machine run", max_steps, c)


def reduce_term(M: Term, engine: str = "naive", max_steps: Optional[int] = None,
                rows: Optional[list] = None, denote: bool = True) -> Term:
    """Reduce ``M`` with the named engine; appends trace rows to ``rows`` if given.

    Raises :class:`FuelExhausted` when ``max_steps`` is reached and
    :class:`EngineStuck` on a stuck state.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if max_steps is None:
        from ..rewrite import default_fuel
        max_steps = default_fuel() if engine != "machine" else 10 * default_fuel()
    run = _Run()
    if rows is not None:
        rows.append(TraceRow(0, engine, "init", None, print_term(M)))
    if engine == "naive":
        gen = _naive(M, max_steps, run)
    elif engine == "sigma":
        gen = _sigma(M, max_steps, run)
    else:
        gen = _machine(M, max_steps, run, denote=denote)
    for row in gen:
        if rows is not None:
            rows.append(row)
    return run.result


def write_trace(rows: Iterable[TraceRow], fh: IO[str]) -> None:
    for row in rows:
        fh.write(row.to_json() + "\n")


def read_trace(fh: IO[str]) -> List[TraceRow]:
    return [TraceRow.from_json(line) for line in fh if line.strip()]


def replay(rows: List[TraceRow]) -> List[str]:
    """Rerun a trace and list every row that differs (empty when faithful)."""
    if not rows or rows[0].rule != "init":
        return ["trace does not start with an init row"]
    first = rows[0]
    M = parse_term(first.term, env={})
    fresh: List[TraceRow] = []
    try:
        reduce_term(M, first.engine, max_steps=len(rows) - 1, rows=fresh)
    except (FuelExhausted, EngineStuck):
        pass
    problems = []
    for k, (a, b) in enumerate(zip(rows, fresh)):
        if a != b:
            problems.append(f"row {k} differs: recorded {a.to_json()} replayed {b.to_json()}")
    if len(fresh) != len(rows):
        problems.append(f"replay produced {len(fresh)} rows, trace has {len(rows)}")
    return problems
