"""Acceptance criteria: one PASS/FAIL line per criterion, at the required limits.

Run with ``pytest tests/test_acceptance.py`` (lines are printed live) or as a
script: ``python3 tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from cau.frontend import demos
from cau.frontend.parser import parse_term
from cau.frontend.printer import print_trail
from cau.naive import apply_replacement, tau_normalize
from cau.oracle import (
    INCONCLUSIVE, PASS, PROGRAM, PURE, SIGMA, STUCK, GenSpec, check_property,
)
from cau.syntax import BETA, BETA_BANG, REFL, AppT, Bang, LetT, Trans

SEED = 20240601
RESULTS = {}


def report(n, ok, seconds, limit, detail):
    ok = ok and seconds < limit
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({seconds:.2f}s, limit {limit:g}s)"
    RESULTS[n] = (ok, line)
    return ok, line


def emit(capsys, ok, line):
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------

def criterion_1():
    r, dt = timed(demos.example2)
    got = (r["step1"].trail, r["step2"].trail)
    want = (tau_normalize(Trans(REFL, AppT(BETA, REFL))), tau_normalize(Trans(Trans(REFL, AppT(BETA, REFL)), BETA)))
    ok = isinstance(r["step1"], Bang) and isinstance(r["step2"], Bang) and got == want
    return report(1, ok, dt, 1, f"pair-building bang trails after steps 1 and 2 are "
                                f"{print_trail(got[0])} and {print_trail(got[1])} (tau-normal)")


def criterion_2():
    def go():
        q = Trans(LetT(BETA, REFL), BETA_BANG)
        term = apply_replacement(q, demos.theta_plus())
        expected = parse_term("plus (plus one zero) one")
        value = demos.church_value(demos.normalize_full(term))
        return term == expected, value
    (exact, value), dt = timed(go)
    return report(2, exact and value == 2, dt, 1,
                  f"counting replacement gives plus (plus 1 0) 1 exactly: {exact}; value {value}")


def criterion_3():
    r, dt = timed(demos.example4)
    step = r["step1"]
    want = tau_normalize(Trans(BETA_BANG, LetT(REFL, AppT(AppT(REFL, BETA), REFL))))
    ok = isinstance(step, Bang) and tau_normalize(step.trail) == want
    return report(3, ok, dt, 1, f"let-unpacking step trail {print_trail(step.trail)}")


def criterion_4():
    def go():
        return check_property("fig1-anachronism"), demos.fig1()
    (rep, r), dt = timed(go)
    left, right = r["left"].trail, r["right"].trail
    ok = (rep.ok and rep.counts[PASS] == 1
          and left == Trans(BETA, AppT(AppT(REFL, BETA), BETA))
          and right == Trans(AppT(REFL, BETA), BETA)
          and not r["joinable"] and r["right"] == r["naive"])
    return report(4, ok, dt, 5, f"anachronism trails {print_trail(left)} / {print_trail(right)}, "
                                f"joinable(depth 8)={r['joinable']}, "
                                f"tau-first equals naive: {r['right'] == r['naive']}")


def criterion_5():
    runs = []

    def go():
        for name, flags in (("tau-confluence", PURE), ("sigmatau-confluence", SIGMA)):
            runs.append(check_property(name, GenSpec(size=9)))
            runs.append(check_property(name, GenSpec(SEED, 25, flags), 1000, exhaustive=False))
    _, dt = timed(go)
    ok = all(r.ok and r.counts[INCONCLUSIVE] == 0 and r.counts[PASS] == r.trials for r in runs)
    ok = ok and runs[1].trials == runs[3].trials == 1000
    detail = "; ".join(f"{r.property} [{r.mode}] {r.counts[PASS]}/{r.trials}"
                       f" ({r.counts[INCONCLUSIVE]} fuel)" for r in runs)
    return report(5, ok, dt, 120, f"unique normal forms: {detail}")


def criterion_6():
    rep, dt = timed(lambda: check_property("simulation-forward", GenSpec(SEED, 20, PURE), 1000, exhaustive=False))
    ok = rep.ok and rep.trials == 1000 and rep.counts[PASS] == 1000
    return report(6, ok, dt, 60, f"forward simulation {rep.counts[PASS]}/{rep.trials} "
                                 f"({rep.counts['skip']} terms without redex replaced)")


def criterion_7():
    rep, dt = timed(lambda: check_property("simulation-backward", GenSpec(SEED, 20, SIGMA), 1000, exhaustive=False))
    ok = rep.ok and rep.trials == 1000 and rep.counts[PASS] == 1000
    return report(7, ok, dt, 120, f"backward simulation {rep.counts[PASS]}/{rep.trials} terms with a Beta-redex, "
                                  f"{rep.counts[INCONCLUSIVE]} inconclusive")


MACHINE_SPEC = GenSpec(SEED, 40, PROGRAM, closed=True)


def criterion_8():
    rep, dt = timed(lambda: check_property("machine-soundness", MACHINE_SPEC, 500, exhaustive=False))
    ok = rep.ok and rep.trials == 500
    return report(8, ok, dt, 300, f"machine soundness: {rep.counts[PASS]} agree, {rep.counts[STUCK]} stuck, "
                                  f"{rep.counts[INCONCLUSIVE]} inconclusive, {rep.failures} mismatches "
                                  f"of {rep.trials}")


def criterion_9():
    rep, dt = timed(lambda: check_property("machine-validity", MACHINE_SPEC, 500, exhaustive=False))
    ok = rep.ok and rep.trials == 500
    return report(9, ok, dt, 300, f"every configuration valid in {rep.trials - rep.failures}/{rep.trials} runs "
                                  f"({rep.counts[INCONCLUSIVE]} runs cut by fuel, all visited states valid)")


def criterion_10():
    runs = []

    def go():
        runs.append(check_property("projection-agreement", GenSpec(SEED, 20, SIGMA), 1000, exhaustive=False))
        runs.append(check_property("substitution-lemma", GenSpec(SEED, 20, PURE), 1000, exhaustive=False))
    _, dt = timed(go)
    ok = all(r.ok and r.trials == 1000 and r.counts[PASS] == 1000 for r in runs)
    detail = "; ".join(f"{r.property} {r.counts[PASS]}/{r.trials}" for r in runs)
    return report(10, ok, dt, 120, f"projections, focus and substitution: {detail}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    emit(capsys, *criterion())


if __name__ == "__main__":
    from cau.deepstack import call_deep
    failed = 0
    for c in CRITERIA:
        ok, line = call_deep(c)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
