import pytest
from hypothesis import given, settings, strategies as st

from cau.naive import BetaRedex, principal_contract, tau_normalize
from cau.oracle import PURE, SIGMA, GenSpec, gen_term
from cau.rewrite import successors
from cau.sigma import (
    beta_sigma_contract, beta_sigma_redexes, erase_meta, focus, sigma_normalize, sigmatau_equiv,
    sigmatau_normalize, sigmatau_rules, trailify_meta,
)
from cau.syntax import (
    BETA, ID, REFL, SHIFT, Annot, App, AppT, Bang, Closure, Comp, Cons, Erase, Extract, Index,
    Lam, LamT, Trans, is_pure,
)

seeds = st.integers(min_value=0, max_value=2**32)
ident = Lam(Index(1))


@pytest.mark.parametrize("before, after", [
    (Closure(Index(1), Cons(ident, ID)), ident),
    (Closure(Index(2), Cons(ident, ID)), Index(1)),
    (Closure(Index(1), SHIFT), Index(2)),
    (Closure(Index(1), Comp(SHIFT, SHIFT)), Index(3)),
    (Closure(Lam(Index(2)), Cons(Index(5), ID)), Lam(Index(6))),
    (Erase(Annot(BETA, ident)), ident),
    (Erase(Lam(Annot(BETA, Index(1)))), ident),
])
def test_sigmatau_normal_forms(before, after):
    assert sigmatau_normalize(before) == after


def test_extraction_collects_the_history():
    assert sigmatau_normalize(Extract(Annot(BETA, ident))) == BETA
    assert sigmatau_normalize(Extract(Lam(Annot(BETA, Index(1))))) == LamT(BETA)
    assert sigmatau_normalize(Extract(ident)) == REFL
    # sigma alone does not run tau, so congruence trails survive
    assert sigma_normalize(Extract(Annot(BETA, ident))) != BETA


def test_erase_of_a_bang_keeps_the_bang():
    M = Erase(Bang(BETA, ident))
    assert sigmatau_normalize(M) == Bang(BETA, ident)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_sigmatau_normal_forms_are_pure_and_irreducible(seed):
    M = gen_term(GenSpec(seed, 20, SIGMA))
    nf = sigmatau_normalize(M)
    assert is_pure(nf)
    assert sigmatau_normalize(nf) == nf
    assert not list(successors(nf, sigmatau_rules))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_projections_agree_with_meta_projections(seed):
    M = gen_term(GenSpec(seed, 15, SIGMA))
    assert sigmatau_normalize(Erase(M)) == erase_meta(M)
    assert sigmatau_normalize(Extract(M)) == trailify_meta(M)
    assert sigmatau_normalize(focus(M)) == sigmatau_normalize(M)
    assert sigmatau_equiv(M, Annot(REFL, M))


def test_lazy_beta_leaves_projections_pending():
    M = App(Lam(Annot(BETA, Index(1))), ident)
    (at, kind), = beta_sigma_redexes(M)
    assert at == () and isinstance(kind, BetaRedex)
    N = beta_sigma_contract(M, at)
    assert isinstance(N, Annot) and isinstance(N.body, Closure)
    assert N.trail == Trans(AppT(LamT(Extract(M.fun.body)), Extract(ident)), BETA)
    # sigma-tau normalizing the lazy result matches the eager step (tau moves the redex under the annotation)
    assert sigmatau_normalize(N) == tau_normalize(principal_contract(tau_normalize(M), (1,)))


def test_redex_search_skips_erasures_and_enters_closures():
    redex = App(ident, ident)
    assert beta_sigma_redexes(Erase(redex)) == []
    assert [p for p, _ in beta_sigma_redexes(Closure(redex, ID))] == [(0,)]
    assert [p for p, _ in beta_sigma_redexes(Closure(Index(1), Cons(redex, ID)))] == [(1, 0)]


def test_no_redex_is_an_error():
    with pytest.raises(ValueError):
        beta_sigma_contract(ident, ())


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_lazy_and_eager_beta_agree_on_pure_terms(seed):
    M = tau_normalize(gen_term(GenSpec(seed, 15, PURE)))
    for at, _ in beta_sigma_redexes(M):
        eager = tau_normalize(principal_contract(M, at))
        assert sigmatau_normalize(beta_sigma_contract(M, at)) == eager
