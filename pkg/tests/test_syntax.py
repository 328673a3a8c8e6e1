import pytest

from cau.syntax import (
    BETA, BETA_BANG, ID, REFL, SHIFT, SLOTS, TI, Annot, App, AppT, Bang, Closure, Cons, Erase,
    Extract, Index, Inspect, Lam, LetBang, LetT, Trans, TrplT, all_refl, church, is_pure, lift,
    max_free_index, positions, replace_at, replacement, size, subterm_at, trans_chain,
)


def test_nodes_are_frozen_and_hash_structurally():
    a, b = Lam(App(Index(1), Index(2))), Lam(App(Index(1), Index(2)))
    assert a == b and hash(a) == hash(b) and a is not b
    with pytest.raises(Exception):
        a.body = Index(1)


def test_index_is_one_based():
    with pytest.raises(ValueError):
        Index(0)


def test_inspect_and_tb_take_nine_branches():
    assert len(SLOTS) == 9
    Inspect(tuple(Index(1) for _ in range(9)))
    TrplT(all_refl())
    with pytest.raises(ValueError):
        Inspect((Index(1),) * 8)
    with pytest.raises(ValueError):
        TrplT((REFL,) * 10)


def test_replacement_takes_every_named_slot():
    r = replacement(**{slot: Index(k + 1) for k, slot in enumerate(SLOTS)})
    assert r == tuple(Index(k + 1) for k in range(9))
    with pytest.raises(ValueError):
        replacement(r=Index(1))


def test_trans_chain_nests_to_the_right():
    assert trans_chain(BETA, BETA_BANG, TI) == Trans(BETA, Trans(BETA_BANG, TI))
    assert trans_chain(BETA) == BETA


def test_purity():
    assert is_pure(Bang(BETA, Lam(Index(1))))
    assert not is_pure(Closure(Index(1), ID))
    assert not is_pure(Erase(Index(1)))
    assert not is_pure(Annot(Extract(Index(1)), Index(1)))


def test_size_counts_every_node():
    assert size(Index(1)) == 1
    assert size(Lam(App(Index(1), Index(1)))) == 4
    assert size(Annot(Trans(BETA, REFL), Index(1))) == 5


def test_free_indices():
    assert max_free_index(Lam(Index(1))) == 0
    assert max_free_index(Lam(Index(3))) == 2
    assert max_free_index(LetBang(Index(1), Index(2))) == 1
    # the substitution binds the closure body's free indices
    assert max_free_index(Closure(Index(2), Cons(Index(1), ID))) == 1
    assert max_free_index(Closure(Index(1), SHIFT)) == 2


def test_church_numerals():
    assert church(0) == Lam(Lam(Index(1)))
    assert church(2) == Lam(Lam(App(Index(2), App(Index(2), Index(1)))))


def test_lift_respects_cutoff():
    assert lift(Lam(App(Index(1), Index(2)))) == Lam(App(Index(1), Index(3)))
    assert lift(Index(1), 2, cutoff=1) == Index(1)


def test_paths_address_all_three_sorts():
    M = Annot(AppT(BETA, REFL), Closure(Index(1), Cons(Lam(Index(1)), ID)))
    for path, sub in positions(M):
        assert subterm_at(M, path) == sub
    assert subterm_at(M, (0, 0)) == BETA
    assert replace_at(M, (1, 1, 0), Index(3)).body.subst.head == Index(3)
    assert replace_at(M, (0, 1), TI).trail == AppT(BETA, TI)


def test_let_trail_has_two_children():
    q = LetT(BETA, REFL)
    assert q.children() == (BETA, REFL)
    assert q.rebuild((REFL, BETA)) == LetT(REFL, BETA)
