"""Acceptance criteria, one check per criterion.

Each test prints a ``PASS``/``FAIL`` line to the terminal even under output
capture.  ``python tests/test_acceptance.py`` prints the same table without
pytest.
"""

import sys

import pytest

from ricompact.checks import SUITES, run_suite

CRITERIA = [
    (1, "closed_form", 10.0),
    (2, "associate", None),
    (3, "norm_axioms", None),
    (4, "hardy_littlewood", None),
    (5, "rs_constants", None),
    (6, "p_domination", None),
    (7, "decision_table", None),
    (8, "concordance", None),
    (9, "bruteforce", None),
    (10, "geometry", None),
    (11, "gauss", None),
    (12, "thresholds", None),
]


def test_every_suite_is_a_criterion():
    assert sorted(name for _, name, _ in CRITERIA) == sorted(SUITES)


@pytest.mark.parametrize("number, name, limit", CRITERIA, ids=[f"{n:02d}-{s}" for n, s, _ in CRITERIA])
def test_criterion(number, name, limit, capsys):
    res = run_suite(name)[0]
    within = limit is None or res.seconds < limit
    line = res.line() if within else res.line().replace("PASS", "FAIL", 1) + f" [over {limit:g}s]"
    with capsys.disabled():
        print(f"\n[{number:2d}] {line}")
    assert res.passed, res.detail
    assert within, f"{name} took {res.seconds:.1f}s, limit {limit:g}s"


if __name__ == "__main__":
    ok = True
    for number, name, _ in CRITERIA:
        res = run_suite(name)[0]
        ok &= res.passed
        print(f"[{number:2d}] {res.line()}", flush=True)
    sys.exit(0 if ok else 1)
