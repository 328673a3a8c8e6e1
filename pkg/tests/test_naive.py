import pytest
from hypothesis import given, settings, strategies as st

from cau.naive import (
    BetaBangRedex, BetaRedex, InspectRedex, StuckTerm, apply_replacement, cau_eval_cbv, cau_step,
    cbv_redex, find_principal_redexes, is_cbv_value, meta_subst, principal_contract, tau_normalize,
    tau_rules,
)
from cau.oracle import PURE, GenSpec, gen_term
from cau.rewrite import FuelExhausted, Normalizer, iterate, successors
from cau.syntax import (
    BETA, BETA_BANG, REFL, TI, Annot, App, AppT, Bang, Extract, Index, Lam, LamT, LetBang, LetT,
    Trans, church, is_pure,
)
from cau.frontend.demos import church_value, normalize_full

seeds = st.integers(min_value=0, max_value=2**32)


@pytest.mark.parametrize("before, after", [
    (Trans(REFL, BETA), BETA),
    (Trans(BETA, REFL), BETA),
    (AppT(REFL, REFL), REFL),
    (LamT(REFL), REFL),
    (Trans(Trans(BETA, BETA_BANG), TI), Trans(BETA, Trans(BETA_BANG, TI))),
    (Trans(AppT(BETA, REFL), AppT(REFL, BETA)), AppT(BETA, BETA)),
    (Annot(BETA, Annot(TI, Lam(Index(1)))), Annot(Trans(BETA, TI), Lam(Index(1)))),
    (Annot(REFL, Lam(Index(1))), Lam(Index(1))),
    (Lam(Annot(BETA, Index(1))), Annot(LamT(BETA), Lam(Index(1)))),
    (App(Annot(BETA, Index(1)), Index(2)), Annot(AppT(BETA, REFL), App(Index(1), Index(2)))),
    (Bang(REFL, Annot(BETA, Index(1))), Bang(BETA, Index(1))),
    (LetBang(Annot(BETA, Index(1)), Index(1)), Annot(LetT(BETA, REFL), LetBang(Index(1), Index(1)))),
])
def test_tau_rules(before, after):
    assert tau_normalize(before) == after


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_tau_normal_forms_are_idempotent_and_irreducible(seed):
    M = gen_term(GenSpec(seed, 20, PURE))
    nf = tau_normalize(M)
    assert tau_normalize(nf) == nf
    assert not list(successors(nf, tau_rules))
    assert is_pure(nf)


def test_meta_subst_renumbers_escaping_indices():
    assert meta_subst(App(Index(1), Index(3)), 0, [Lam(Index(1))]) == App(Lam(Index(1)), Index(2))
    assert meta_subst(Index(2), 1, []) == Index(3)
    # the substituted term is lifted under binders
    assert meta_subst(Lam(Index(2)), 0, [Index(1)]) == Lam(Index(2))
    with pytest.raises(ValueError):
        meta_subst(Annot(Extract(Index(1)), Index(1)), 0, [])


def test_apply_replacement_is_structural():
    theta = tuple(Index(k) for k in range(1, 10))
    assert apply_replacement(REFL, theta) == Index(1)
    assert apply_replacement(Trans(BETA, TI), theta) == App(App(Index(2), Index(3)), Index(5))
    with pytest.raises(ValueError):
        apply_replacement(Extract(Index(1)), theta)


def test_principal_redex_kinds(term):
    assert find_principal_redexes(term(r"(\x. x) (\y. y)")) == [((), BetaRedex())]
    assert find_principal_redexes(term(r"let x = !(\y. y) in x")) == [((), BetaBangRedex())]
    M = term(r"!{b} iota{r: zero, t: plus, b: one, bb: one, ti: one, lam: ident, app: plus, letq: plus, tb: sum9}")
    (path, kind), = find_principal_redexes(M)
    assert path == (1,) and isinstance(kind, InspectRedex)
    # an inspection outside any bang is locked
    assert not find_principal_redexes(M.body)


def test_beta_step_records_beta(term):
    assert cau_step(term(r"(\x. x) (\y. y)")) == Annot(BETA, Lam(Index(1)))
    assert cau_step(term(r"! ((\x. x) (\y. y))")) == Bang(BETA, Lam(Index(1)))
    assert cau_step(term(r"\y. y")) is None


def test_inspection_reads_the_bang_history(term):
    M = term(r"!{b} iota{r: zero, t: plus, b: one, bb: one, ti: one, lam: ident, app: plus, letq: plus, tb: sum9}")
    N = tau_normalize(principal_contract(M, (1,)))
    assert isinstance(N, Bang) and N.trail == Trans(BETA, TI)
    # the history b counts one contraction
    assert church_value(cau_eval_cbv(N.body)) == 1


def test_cbv_evaluation(term):
    v = cau_eval_cbv(term("plus two three"))
    assert isinstance(v, Annot) and is_cbv_value(v.body)
    # weak evaluation stops at the lambda; full reduction reads off the numeral
    assert church_value(normalize_full(v)) == 5
    assert is_cbv_value(Bang(REFL, Lam(Index(1))))
    assert cbv_redex(Lam(Index(1))) is None
    with pytest.raises(StuckTerm):
        cau_eval_cbv(term(r"let x = \y. y in x"))
    with pytest.raises(FuelExhausted):
        cau_eval_cbv(term("omega"), fuel=50)


def test_cbv_evaluates_function_before_argument(term):
    M = term(r"((\x. x) (\y. y)) ((\z. z) (\w. w))")
    assert cbv_redex(M) == (0,)


def test_rewrite_fuel_is_reported():
    bump = lambda x: [Index(x.n + 1)] if isinstance(x, Index) else []
    with pytest.raises(FuelExhausted) as info:
        iterate(Index(1), bump, fuel=5)
    assert info.value.fuel == 5
    with pytest.raises(FuelExhausted):
        Normalizer(bump, fuel=50)(Lam(Index(1)))
    drop = lambda x: [x.body] if isinstance(x, Annot) else []
    assert Normalizer(drop)(Lam(Annot(BETA, Annot(BETA, Index(1))))) == Lam(Index(1))


def test_fuel_env_override(monkeypatch):
    from cau.rewrite import default_fuel
    monkeypatch.setenv("CAU_FUEL", "123")
    assert default_fuel() == 123
    monkeypatch.delenv("CAU_FUEL")
    assert default_fuel() == 10_000


def test_church_round_trip():
    for n in range(6):
        assert church_value(church(n)) == n


def test_tau_terminates_on_ten_thousand_seeded_terms():
    for seed in range(10_000):
        M = gen_term(GenSpec(seed, 30, PURE))
        nf = tau_normalize(M, fuel=10_000)
        assert tau_normalize(nf) == nf
