import pytest
from hypothesis import given, settings, strategies as st

from cau import machine as m
from cau.naive import cau_eval_cbv
from cau.oracle import PROGRAM, GenSpec, GenerationError, cau_successors, gen_term
from cau.sigma import sigmatau_normalize
from cau.syntax import BETA, REFL, TI, Annot, Bang, Erase, Index, Lam, Trans, TrplT, all_refl, church
from cau.frontend.demos import church_value, normalize_full

COUNT = "iota{r: zero, t: plus, b: one, bb: one, ti: one, lam: ident, app: plus, letq: plus, tb: sum9}"


def final(src, term, fuel=1_000):
    r = m.run(m.inject(term(src)), fuel)
    assert isinstance(r.outcome, m.Final), r.outcome
    return r, sigmatau_normalize(m.denote_value(r.outcome.value))


def test_identity_application(term):
    r, v = final(r"(\x. x) (\y. y)", term)
    assert v == Annot(BETA, Lam(Index(1)))
    assert 2 in r.rules and r.rules[-1] == 10


def test_bang_records_its_history(term):
    r, v = final(r"! ((\x. x) (\y. y))", term)
    assert v == Bang(BETA, Lam(Index(1)))
    assert r.rules[0] == 6 and r.rules[-1] == 7


def test_let_bang_unpacks(term):
    r, v = final(r"let x = !(\y. y) in x", term)
    assert 5 in r.rules
    assert sigmatau_normalize(v) == cau_eval_cbv(term(r"let x = !(\y. y) in x"))


def test_inspection_counts_the_history(term):
    r, v = final("!{b} " + COUNT, term)
    assert 9 in r.rules
    assert isinstance(v, Bang) and v.trail == Trans(BETA, TI)
    assert church_value(normalize_full(v.body)) == 1


@pytest.mark.parametrize("src, reason", [
    (r"let x = \y. y in x", "let definiens is not a bang"),
    (COUNT, "inspection-locked"),
    (r"(! \x. x) (\y. y)", "application of a non-lambda value"),
])
def test_stuck_states(src, reason, term):
    r = m.run(m.inject(term(src)), 1_000)
    assert isinstance(r.outcome, m.Stuck) and r.outcome.reason == reason


def test_divergence_runs_out_of_fuel(term):
    r = m.run(m.inject(term("omega")), 200)
    assert isinstance(r.outcome, m.OutOfFuel) and len(r.trace) == 200


def test_inject_is_literal(term):
    with pytest.raises(ValueError):
        m.inject(Index(1))
    with pytest.raises(ValueError):
        m.inject(Erase(church(2)))
    c = m.inject(church(2))
    assert c == m.Config((m.Frame(REFL, m.PureCode(church(2)), ()),), ())


def test_environment_lookup():
    v = m.Value(REFL, m.LamClosure(Index(1), ()))
    assert m.env_lookup((v,), 1) == v.closure
    with pytest.raises(LookupError):
        m.env_lookup((v,), 2)


def test_trail_to_open_term_numbers_slots():
    assert m.trail_to_open_term(REFL) == Index(1)
    assert m.trail_to_open_term(TrplT(all_refl())).__class__.__name__ == "App"


def test_validate_rejects_malformed_configurations():
    assert isinstance(m.validate(m.inject(Lam(Index(1)))), m.TermConfig)
    open_frame = m.Frame(REFL, m.PureCode(Index(1)), ())
    assert isinstance(m.validate(m.Config((open_frame,))), m.Invalid)
    impure = m.Frame(Trans(REFL, BETA), m.PureCode(Lam(Index(1))), ())
    assert isinstance(m.validate(m.Config((impure,))), m.Invalid)


def test_environment_underflow_is_stuck():
    c = m.Config((m.Frame(REFL, m.PureCode(Index(1)), ()),))
    out = m.step(c)
    assert isinstance(out, m.Stuck) and out.reason == "environment underflow"


def _program(seed):
    try:
        return gen_term(GenSpec(seed, 30, PROGRAM, closed=True))
    except GenerationError:
        return None


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_transitions_respect_denotations(seed):
    M = _program(seed)
    if M is None:
        return
    prev = sigmatau_normalize(M)
    c = m.inject(M)
    for _ in range(300):
        out = m.step(c)
        if not isinstance(out, m.Next):
            break
        assert not isinstance(m.validate(out.config), m.Invalid)
        cur = sigmatau_normalize(m.denote_config(out.config))
        if out.rule in (2, 5, 9):
            assert cur in cau_successors(prev)
        else:
            assert cur == prev
        prev, c = cur, out.config
