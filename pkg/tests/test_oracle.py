import json

import pytest
from hypothesis import given, settings, strategies as st

from cau.oracle import (
    FAIL, PASS, PROGRAM, PROPERTIES, PURE, SIGMA, GenSpec, GenerationError, Outcome, Property,
    SearchBudgetExceeded, check_property, enumerate_programs, enumerate_terms, fig1_reductions,
    gen_term, joinable, normal_forms, shrink,
)
from cau.naive import tau_normalize, tau_rules
from cau.syntax import BETA, Annot, App, Index, Lam, is_pure, max_free_index, size

seeds = st.integers(min_value=0, max_value=2**32)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=40))
def test_generator_is_deterministic_and_sized(seed, n):
    a = gen_term(GenSpec(seed, n, PURE))
    assert a == gen_term(GenSpec(seed, n, PURE))
    assert is_pure(a) and size(a) <= n


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_closed_program_generation(seed):
    try:
        M = gen_term(GenSpec(seed, 25, PROGRAM, closed=True))
    except GenerationError:
        return
    assert max_free_index(M) == 0 and is_pure(M)


def test_enumeration_is_duplicate_free_and_bounded():
    terms = list(enumerate_terms(5))
    assert len(terms) == len(set(terms))
    assert all(size(M) <= 5 for M in terms)
    assert Index(1) in terms and Lam(Index(1)) in terms
    sigma = list(enumerate_terms(5, sigma=True))
    assert len(sigma) == len(set(sigma)) and not all(is_pure(M) for M in sigma)
    programs = list(enumerate_programs(6))
    assert programs and all(max_free_index(M) == 0 for M in programs)


def test_joinability_search():
    a = App(Lam(Index(1)), Lam(Index(1)))
    assert joinable(a, Annot(BETA, Lam(Index(1))), "cau_principal", 2)
    assert not joinable(Lam(Index(1)), Lam(Lam(Index(1))), "cau_principal", 3)
    with pytest.raises(SearchBudgetExceeded):
        omega = App(Lam(App(Index(1), Index(1))), Lam(App(Index(1), Index(1))))
        joinable(omega, Index(1), "cau_principal", 50, cap=10)


def test_normal_forms_of_a_trail_are_unique():
    M = Annot(BETA, Annot(BETA, Lam(Annot(BETA, Index(1)))))
    assert normal_forms(M, tau_rules) == {tau_normalize(M)}


def test_anachronism_endpoints():
    r = fig1_reductions()
    assert r["right"] == r["naive"]
    assert r["left"] != r["right"]
    assert not joinable(r["left"], r["right"], "beta_sigma", 8)


@pytest.mark.parametrize("name", sorted(PROPERTIES))
def test_every_property_passes_a_short_random_run(name):
    flags = PROPERTIES[name].flags
    n = 30 if flags is PROGRAM else 12
    report = check_property(name, GenSpec(seed=7, size=n, flags=flags), count=25, exhaustive=False)
    assert report.ok, report.render()


def test_exhaustive_and_random_modes_agree():
    for name in ("tau-confluence", "simulation-forward", "projection-agreement"):
        ex = check_property(name, GenSpec(size=5))
        rnd = check_property(name, GenSpec(seed=1, size=5, flags=PROPERTIES[name].flags), 50, exhaustive=False)
        assert ex.mode.startswith("exhaustive") and rnd.mode.startswith("random")
        assert ex.ok == rnd.ok == True


def test_unknown_property():
    with pytest.raises(ValueError):
        check_property("no-such-property")


def test_report_summary_is_json():
    report = check_property("sigmatau-termination", GenSpec(seed=3, size=12, flags=SIGMA), 10, exhaustive=False)
    data = json.loads(json.dumps(report.summary()))
    assert data["property"] == "sigmatau-termination" and data["failures"] == 0
    assert report.render().startswith("PASS sigmatau-termination")


def _no_big_apps(M):
    bad = isinstance(M, App) and size(M) >= 3
    return Outcome(FAIL, "root application") if bad else Outcome(PASS)


def test_shrinking_preserves_the_failure():
    prop = Property("toy", _no_big_apps, PURE)
    M = App(Lam(App(Index(1), Index(1))), App(Lam(Index(1)), Lam(Lam(Index(2)))))
    small, why = shrink(prop, M, "root application")
    assert size(small) < size(M)
    assert prop.trial(small).status == FAIL and why


def test_failing_property_reports_a_counterexample(monkeypatch):
    monkeypatch.setitem(PROPERTIES, "toy", Property("toy", _no_big_apps, PURE))
    report = check_property("toy", GenSpec(seed=0, size=12), 30, exhaustive=False)
    assert not report.ok and report.counterexample is not None
    assert PROPERTIES["toy"].trial(report.counterexample).status == FAIL
    assert size(report.counterexample) == 3


def test_smallest_generated_terms():
    for seed in range(20):
        assert gen_term(GenSpec(seed, 1, PURE)) == Index(1)
        assert gen_term(GenSpec(seed, 2, PURE, closed=True)) == Lam(Index(1))
    with pytest.raises(GenerationError):
        gen_term(GenSpec(0, 1, PURE, closed=True))
