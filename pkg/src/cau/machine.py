"""Call-by-value abstract machine for audited computation.

A configuration is a stack of ``(trail | code | env)`` frames plus a dump of
already computed values; codes are pure terms or AST fragments (application,
bang, let and inspection nodes). Trails held by frames and values are kept
pure and sigma-tau normal. Every configuration denotes a term of the
explicit-substitution calculus, which is how the machine is checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

from .naive import tau_normalize
from .sigma import sigmatau_normalize
from .syntax import (
    BETA, BETA_BANG, ID, REFL, SHIFT, TI, Annot, App, AppT, Bang, Beta, BetaBang,
    Closure, Comp, Cons, Erase, Extract, Index, Inspect, Lam, LamT, LetBang, LetT,
    Refl, Subst, Term, Trail, TrailInspect, Trans, TrplT, is_pure, max_free_index,
    trans_chain,
)

__all__ = [
    "LamClosure", "BangClosure", "Value", "PureCode", "AppNode", "BangNode",
    "LetNode", "InspectNode", "Frame", "Config", "Next", "Final", "Stuck",
    "OutOfFuel", "Run", "Invalid", "TermConfig", "ContextConfig",
    "inject", "env_lookup", "materialize_inspection_trail", "step", "run",
    "trail_to_open_term", "denote_config", "denote_context", "denote_value",
    "denote_closure", "env_subst", "validate", "DEFAULT_MACHINE_FUEL",
]

DEFAULT_MACHINE_FUEL = 100_000


# ---------------------------------------------------------------------------
# Machine data


@dataclass(frozen=True)
class LamClosure:
    """Erased lambda under an environment, ``erase((lam body)[env])``."""

    body: Term
    env: Tuple["Value", ...]


@dataclass(frozen=True)
class BangClosure:
    trail: Trail
    inner: Union[LamClosure, "BangClosure"]


MachineClosure = Union[LamClosure, BangClosure]


@dataclass(frozen=True)
class Value:
    trail: Trail
    closure: MachineClosure


Env = Tuple[Value, ...]


@dataclass(frozen=True)
class PureCode:
    term: Term


@dataclass(frozen=True)
class AppNode:
    pass


@dataclass(frozen=True)
class BangNode:
    pass


@dataclass(frozen=True)
class LetNode:
    body: Term


@dataclass(frozen=True)
class InspectNode:
    pass


Code = Union[PureCode, AppNode, BangNode, LetNode, InspectNode]


@dataclass(frozen=True)
class Frame:
    """A stack tuple ``(trail | code | env)``."""

    trail: Trail
    code: Code
    env: Env = ()


@dataclass(frozen=True)
class Config:
    stack: Tuple[Frame, ...]
    dump: Tuple[Value, ...] = ()


@dataclass(frozen=True)
class Next:
    config: Config
    rule: int


@dataclass(frozen=True)
class Final:
    value: Value


@dataclass(frozen=True)
class Stuck:
    reason: str


@dataclass(frozen=True)
class OutOfFuel:
    config: Config


@dataclass
class Run:
    outcome: Union[Final, Stuck, OutOfFuel]
    trace: List[Tuple[int, Config]] = field(default_factory=list)

    @property
    def rules(self) -> List[int]:
        return [r for r, _ in self.trace]


# ---------------------------------------------------------------------------
# Denotations


def env_subst(env: Env) -> Subst:
    s: Subst = ID
    for v in reversed(env):
        s = Cons(denote_value(v), s)
    return s


def denote_closure(C: MachineClosure) -> Term:
    if isinstance(C, LamClosure):
        return Erase(Closure(Lam(C.body), env_subst(C.env)))
    return Bang(C.trail, denote_closure(C.inner))


def denote_value(V: Value) -> Term:
    return Annot(V.trail, denote_closure(V.closure))


def _code_term(M: Term, env: Env) -> Term:
    return Erase(Closure(M, env_subst(env)))


def _let_body(N: Term, env: Env) -> Term:
    return Erase(Closure(N, Cons(Index(1), Comp(env_subst(env), SHIFT))))


# Context frames produced by parsing a context configuration, innermost first.


@dataclass(frozen=True)
class _ArgPending:
    arg: Frame
    app: Frame


@dataclass(frozen=True)
class _FunDone:
    app: Frame
    fun: Value


@dataclass(frozen=True)
class _LetHole:
    let: Frame


@dataclass(frozen=True)
class _BangHole:
    bang: Frame


@dataclass(frozen=True)
class _InspectHole:
    done: Tuple[Value, ...]  # branches 1..k-1 in branch order
    pending: Tuple[Frame, ...]  # branches k+1..9 in branch order
    node: Frame


class _Malformed(Exception):
    pass


def _parse_ctx(stack: Tuple[Frame, ...], dump: Tuple[Value, ...]) -> list:
    frames = []
    i = j = 0
    while i < len(stack):
        top = stack[i]
        code = top.code
        if isinstance(code, PureCode):
            if i + 1 < len(stack) and isinstance(stack[i + 1].code, AppNode):
                _empty_env(stack[i + 1])
                frames.append(_ArgPending(top, stack[i + 1]))
                i += 2
                continue
            p = 0
            while i + p < len(stack) and isinstance(stack[i + p].code, PureCode):
                p += 1
            if p > 8 or i + p >= len(stack) or not isinstance(stack[i + p].code, InspectNode):
                raise _Malformed("pending term frame is neither an argument nor an inspection branch")
            node = stack[i + p]
            _empty_env(node)
            need = 8 - p
            if len(dump) - j < need:
                raise _Malformed("inspection is missing evaluated branches")
            done = tuple(reversed(dump[j:j + need]))
            frames.append(_InspectHole(done, stack[i:i + p], node))
            i += p + 1
            j += need
        elif isinstance(code, AppNode):
            _empty_env(top)
            if j >= len(dump):
                raise _Malformed("application node without an evaluated function")
            frames.append(_FunDone(top, dump[j]))
            i += 1
            j += 1
        elif isinstance(code, LetNode):
            frames.append(_LetHole(top))
            i += 1
        elif isinstance(code, BangNode):
            _empty_env(top)
            frames.append(_BangHole(top))
            i += 1
        elif isinstance(code, InspectNode):
            _empty_env(top)
            if len(dump) - j < 8:
                raise _Malformed("inspection is missing evaluated branches")
            frames.append(_InspectHole(tuple(reversed(dump[j:j + 8])), (), top))
            i += 1
            j += 8
        else:
            raise _Malformed(f"unknown code {code!r}")
    if j != len(dump):
        raise _Malformed("dump holds values not accounted for by the stack")
    return frames


def _empty_env(frame: Frame) -> None:
    if frame.env:
        raise _Malformed("AST-fragment frames carry the empty environment")


def _parse_tm(c: Config):
    """Split a term configuration into (focus term, context frames)."""
    stack, dump = c.stack, c.dump
    if not stack:
        if len(dump) != 1:
            raise _Malformed("final configuration must hold exactly one value")
        return denote_value(dump[0]), []
    top = stack[0]
    code = top.code
    if isinstance(code, PureCode):
        return Annot(top.trail, _code_term(code.term, top.env)), _parse_ctx(stack[1:], dump)
    _empty_env(top) if not isinstance(code, LetNode) else None
    if isinstance(code, AppNode):
        if len(dump) < 2:
            raise _Malformed("application node needs two values")
        W, V = dump[0], dump[1]
        term = Annot(top.trail, App(denote_value(V), denote_value(W)))
        return term, _parse_ctx(stack[1:], dump[2:])
    if isinstance(code, LetNode):
        if not dump:
            raise _Malformed("let node needs an evaluated definiens")
        term = Annot(top.trail, LetBang(denote_value(dump[0]), _let_body(code.body, top.env)))
        return term, _parse_ctx(stack[1:], dump[1:])
    if isinstance(code, BangNode):
        if not dump:
            raise _Malformed("bang node needs an evaluated body")
        term = Annot(top.trail, Bang(REFL, denote_value(dump[0])))
        return term, _parse_ctx(stack[1:], dump[1:])
    if isinstance(code, InspectNode):
        if len(dump) < 9:
            raise _Malformed("inspection node needs nine values")
        vals = tuple(denote_value(v) for v in reversed(dump[:9]))
        term = Annot(top.trail, Inspect(vals))
        return term, _parse_ctx(stack[1:], dump[9:])
    raise _Malformed(f"unknown code {code!r}")


def _plug_frame(frame, hole: Term) -> Term:
    if isinstance(frame, _ArgPending):
        arg = Annot(frame.arg.trail, _code_term(frame.arg.code.term, frame.arg.env))
        return Annot(frame.app.trail, App(hole, arg))
    if isinstance(frame, _FunDone):
        return Annot(frame.app.trail, App(denote_value(frame.fun), hole))
    if isinstance(frame, _LetHole):
        return Annot(frame.let.trail, LetBang(hole, _let_body(frame.let.code.body, frame.let.env)))
    if isinstance(frame, _BangHole):
        return Annot(frame.bang.trail, Bang(REFL, hole))
    if isinstance(frame, _InspectHole):
        done = tuple(denote_value(v) for v in frame.done)
        pending = tuple(Annot(f.trail, _code_term(f.code.term, f.env)) for f in frame.pending)
        return Annot(frame.node.trail, Inspect(done + (hole,) + pending))
    raise TypeError(frame)


class ConfigContext:
    """Denotation of a context configuration: a one-hole context."""

    def __init__(self, frames: list):
        self.frames = frames

    def plug(self, M: Term) -> Term:
        for frame in self.frames:
            M = _plug_frame(frame, M)
        return M

    @property
    def hole_path(self) -> Tuple[int, ...]:
        path: List[int] = []
        for frame in reversed(self.frames):
            path.append(1)  # body of the frame's annotation
            if isinstance(frame, _ArgPending):
                path.append(0)
            elif isinstance(frame, _FunDone):
                path.append(1)
            elif isinstance(frame, _LetHole):
                path.append(0)
            elif isinstance(frame, _BangHole):
                path.append(1)
            else:
                path.append(len(frame.done))
        return tuple(path)


def denote_config(c: Config) -> Term:
    """The term denoted by a term configuration."""
    try:
        focus, frames = _parse_tm(c)
    except _Malformed as exc:
        raise ValueError(f"not a term configuration: {exc}") from None
    return ConfigContext(frames).plug(focus)


def denote_context(c: Config) -> ConfigContext:
    """The one-hole context denoted by a context configuration."""
    try:
        return ConfigContext(_parse_ctx(c.stack, c.dump))
    except _Malformed as exc:
        raise ValueError(f"not a context configuration: {exc}") from None


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class TermConfig:
    pass


@dataclass(frozen=True)
class ContextConfig:
    pass


@dataclass(frozen=True)
class Invalid:
    reason: str


def _closure_closed(C: MachineClosure) -> bool:
    while isinstance(C, BangClosure):
        C = C.inner
    return max_free_index(Lam(C.body)) <= len(C.env) and all(_value_closed(v) for v in C.env)


def _value_closed(V: Value) -> bool:
    return _closure_closed(V.closure)


def _normal_trail(q: Trail) -> bool:
    return is_pure(q) and tau_normalize(q) == q


def _check_frames(c: Config) -> Optional[str]:
    for f in c.stack:
        if not _normal_trail(f.trail):
            return "frame trail is not pure and normal"
        if not all(_value_closed(v) for v in f.env):
            return "environment holds an open value"
        if isinstance(f.code, PureCode):
            if not is_pure(f.code.term):
                return "code is not a pure term"
            if max_free_index(f.code.term) > len(f.env):
                return "code is not closed by its environment"
        elif isinstance(f.code, LetNode):
            if max_free_index(f.code.body) > len(f.env) + 1:
                return "let body is not closed by its environment"
    for v in c.dump:
        if not _value_closed(v):
            return "dump holds an open value"
        if not _normal_trail(v.trail):
            return "value trail is not pure and normal"
    return None


def validate(c: Config):
    """Classify ``c`` as a valid term configuration, context configuration, or not."""
    try:
        _parse_tm(c)
        kind = TermConfig()
    except _Malformed as tm_err:
        try:
            _parse_ctx(c.stack, c.dump)
            kind = ContextConfig()
        except _Malformed:
            return Invalid(str(tm_err))
    problem = _check_frames(c)
    if problem is not None:
        return Invalid(problem)
    return kind


# ---------------------------------------------------------------------------
# Transitions


def inject(M: Term) -> Config:
    """Initial configuration for a pure closed term."""
    if not is_pure(M):
        raise ValueError("the machine runs pure terms only")
    if max_free_index(M) != 0:
        raise ValueError("the machine runs closed terms only")
    return Config((Frame(REFL, PureCode(M), ()),), ())


def env_lookup(env: Env, n: int) -> MachineClosure:
    """The closure of the ``n``-th value; its trail is discarded."""
    if n < 1 or n > len(env):
        raise LookupError(f"index {n} is not bound by an environment of length {len(env)}")
    return env[n - 1].closure


_SLOT_INDEX = {Refl: 1, Trans: 2, Beta: 3, BetaBang: 4, TrailInspect: 5, LamT: 6, AppT: 7, LetT: 8, TrplT: 9}


def trail_to_open_term(q: Trail) -> Term:
    """Encode a pure trail as applications of the dangling indices 1..9."""
    try:
        head: Term = Index(_SLOT_INDEX[type(q)])
    except KeyError:
        raise ValueError(f"cannot encode {q!r} as an open term") from None
    for child in q.children():
        head = App(head, trail_to_open_term(child))
    return head


def materialize_inspection_trail(q: Trail, stack: Tuple[Frame, ...], dump: Tuple[Value, ...]) -> Optional[Trail]:
    """Collect the history up to the nearest bang node; ``None`` if locked."""
    for frame in _parse_ctx(tuple(stack), tuple(dump)):
        if isinstance(frame, _BangHole):
            return sigmatau_normalize(q)
        if isinstance(frame, _ArgPending):
            q = Trans(frame.app.trail, AppT(q, frame.arg.trail))
        elif isinstance(frame, _FunDone):
            q = Trans(frame.app.trail, AppT(frame.fun.trail, q))
        elif isinstance(frame, _LetHole):
            q = Trans(frame.let.trail, LetT(q, REFL))
        elif isinstance(frame, _InspectHole):
            trails = [v.trail for v in frame.done] + [q] + [f.trail for f in frame.pending]
            q = Trans(frame.node.trail, TrplT(tuple(trails)))
    return None


def _norm(q: Trail) -> Trail:
    return sigmatau_normalize(q)


def step(c: Config):
    """One machine transition: :class:`Next`, :class:`Final` or :class:`Stuck`."""
    stack, dump = c.stack, c.dump
    if not stack:
        if len(dump) == 1:
            return Final(dump[0])
        return Stuck("empty stack without a single final value")
    top, rest = stack[0], stack[1:]
    q, code, env = top.trail, top.code, top.env

    if isinstance(code, PureCode):
        M = code.term
        if isinstance(M, App):  # 1
            frames = (Frame(REFL, PureCode(M.fun), env), Frame(REFL, PureCode(M.arg), env), Frame(q, AppNode()))
            return Next(Config(frames + rest, dump), 1)
        if isinstance(M, Lam):  # 3
            return Next(Config(rest, (Value(q, LamClosure(M.body, env)),) + dump), 3)
        if isinstance(M, LetBang):  # 4
            frames = (Frame(REFL, PureCode(M.defn), env), Frame(q, LetNode(M.body), env))
            return Next(Config(frames + rest, dump), 4)
        if isinstance(M, Bang):  # 6
            inner = _norm(Trans(M.trail, Extract(Closure(M.body, env_subst(env)))))
            frames = (Frame(inner, PureCode(M.body), env), Frame(q, BangNode()))
            return Next(Config(frames + rest, dump), 6)
        if isinstance(M, Inspect):  # 8
            frames = tuple(Frame(REFL, PureCode(b), env) for b in M.branches) + (Frame(q, InspectNode()),)
            return Next(Config(frames + rest, dump), 8)
        if isinstance(M, Index):  # 10
            try:
                C = env_lookup(env, M.n)
            except LookupError:
                return Stuck("environment underflow")
            return Next(Config(rest, (Value(q, C),) + dump), 10)
        return Stuck(f"code {type(M).__name__} has no transition")

    if isinstance(code, AppNode):  # 2
        if len(dump) < 2:
            return Stuck("application node without two values")
        W, F = dump[0], dump[1]
        if not isinstance(F.closure, LamClosure):
            return Stuck("application of a non-lambda value")
        trail = _norm(trans_chain(q, AppT(F.trail, W.trail), BETA))
        env2 = (Value(REFL, W.closure),) + F.closure.env
        return Next(Config((Frame(trail, PureCode(F.closure.body), env2),) + rest, dump[2:]), 2)

    if isinstance(code, LetNode):  # 5
        if not dump:
            return Stuck("let node without a value")
        D0 = dump[0]
        if not isinstance(D0.closure, BangClosure):
            return Stuck("let definiens is not a bang")
        V = Value(D0.closure.trail, D0.closure.inner)
        N = code.body
        subst_trail = Extract(Closure(_let_body(N, env), Cons(denote_value(V), ID)))
        trail = _norm(trans_chain(q, LetT(D0.trail, REFL), BETA_BANG, subst_trail))
        return Next(Config((Frame(trail, PureCode(N), (V,) + env),) + rest, dump[1:]), 5)

    if isinstance(code, BangNode):  # 7
        if not dump:
            return Stuck("bang node without a value")
        V = dump[0]
        return Next(Config(rest, (Value(q, BangClosure(V.trail, V.closure)),) + dump[1:]), 7)

    if isinstance(code, InspectNode):  # 9
        if len(dump) < 9:
            return Stuck("inspection node without nine values")
        values = tuple(reversed(dump[:9]))
        q_star = Trans(q, TrplT(tuple(v.trail for v in values)))
        try:
            history = materialize_inspection_trail(q_star, rest, dump[9:])
        except _Malformed as exc:
            return Stuck(f"malformed context: {exc}")
        if history is None:
            return Stuck("inspection-locked")
        trail = _norm(Trans(q_star, TI))
        env2 = tuple(Value(REFL, v.closure) for v in values)
        return Next(Config((Frame(trail, PureCode(trail_to_open_term(history)), env2),) + rest, dump[9:]), 9)

    return Stuck(f"unknown code {code!r}")


def run(c: Config, fuel: int = DEFAULT_MACHINE_FUEL, on_step: Optional[Callable] = None) -> Run:
    """Iterate :func:`step` until a final or stuck state, or until fuel runs out."""
    result = Run(OutOfFuel(c))
    for _ in range(fuel):
        out = step(c)
        if isinstance(out, (Final, Stuck)):
            result.outcome = out
            return result
        if on_step is not None:
            on_step(c, out)
        result.trace.append((out.rule, out.config))
        c = out.config
    out = step(c)
    result.outcome = out if isinstance(out, (Final, Stuck)) else OutOfFuel(c)
    return result
