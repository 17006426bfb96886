from fractions import Fraction
from itertools import combinations

import pytest

import xfree

AP3 = xfree.Pattern.progression(3)
CORNER = xfree.Pattern.corner(2)


def brute_r(n):
    best = 0
    for mask in range(1 << n):
        s = {i + 1 for i in range(n) if mask >> i & 1}
        if len(s) <= best:
            continue
        if not any(a + 2 * r in s and a + r in s for a in s for r in range(1, n)):
            best = len(s)
    return best


def test_pattern_roundtrip():
    p = xfree.Pattern([[3], [5], [7]])
    assert p.normalized() == AP3
    assert len(p) == 3
    assert xfree.Pattern.parse(AP3.to_text()) == AP3
    assert CORNER.points == [[0, 0], [0, 1], [1, 0]]


def test_solve_matches_brute_force():
    for n in range(1, 11):
        rec = xfree.solve_rx(AP3, n)
        assert rec["exact"]
        assert rec["lower"] == brute_r(n)


def test_counts_and_copies():
    assert xfree.count_free(AP3, 4) == 13
    assert xfree.count_free(CORNER, 2) == 14
    assert xfree.count_copies(AP3, 5) == 4
    assert len(xfree.enumerate_copies(CORNER, 6)) == xfree.count_copies(CORNER, 6)
    members = [[1], [2], [3], [5]]
    brute = sum(1 for a, b, c in combinations(sorted(x[0] for x in members), 3) if b - a == c - b)
    assert xfree.gamma_count(AP3, 5, members) == brute


def test_behrend():
    b = xfree.behrend_1d(0, 1, 2, 100)
    assert (b["N"], b["M"]) == (3, 2)
    assert b["set"] == [22, 25, 37]
    assert b["verified"]
    assert xfree.compute_t(CORNER) == Fraction(1, 2)
    lift = xfree.behrend_lift(CORNER, 40)
    assert lift["verified"]
    assert lift["core_size"] == lift["core_prefix_count"] * 1


def test_supersat_and_primes():
    assert xfree.prime_pi(100) == 25
    assert xfree.verify_pnt_constant(2, 10) == (False, 2)
    assert xfree.verify_pnt_constant(3, 10000) == (True, None)
    e = xfree.exact_expected_gamma(AP3, 30, 3)
    assert e["mean_gamma"] == 1
    assert e["primes"] == [2]


def test_container_equality():
    c = xfree.container_params(AP3, 10000, 1000, 1.0)
    assert c["hyp_delta"]
    assert abs(c["delta_ratio"] - 1) < 1e-9


def test_errors_and_cli(tmp_path):
    with pytest.raises(ValueError):
        xfree.Pattern([[0], [1]])
    with pytest.raises(xfree.BudgetError):
        xfree.prime_pi(10**12)
    pat = tmp_path / "ap3.pattern"
    pat.write_text(AP3.to_text())
    code, out, _ = xfree.run_cli(["solve-rx", "--pattern", str(pat), "--n", "9", "--cache", str(tmp_path / "c")])
    assert (code, out) == (0, "5\n")
    assert xfree.run_cli(["nope"])[0] == 64
