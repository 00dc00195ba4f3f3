"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line.  Tolerances and grids are pinned here and must not drift."""

import math
import random
import time
from fractions import Fraction

import pytest

from polystar import catalog, exact, polylog
from polystar.catalog import _all_compositions
from polystar.chains import (FactorSpec, QKernelSpec, dp_chain_sum, dp_q_coupled,
                             dp_q_naive, naive_chain_sum)
from polystar.compositions import Composition, shape_composition
from polystar.kernel import binomial

F = Fraction
A_GRID = (F(-1), F(-1, 2), F(1, 2), F(1), F(2))
P_GRID = (F(-1), F(1, 3), F(1, 2), F(3, 4), F(2))


def _report(number, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:02d}: {status} {detail}")
    return ok


def test_criterion_01_exact_main_transform():
    """Weighted harmonic-star averages equal their chain-sum transform,
    bit-exactly, across the full grid, in under 60 s."""
    start = time.time()
    count = 0
    for s in _all_compositions(4):
        for n in range(1, 11):
            for a in A_GRID:
                for p in P_GRID:
                    count += 1
                    assert exact.mneimneh_lhs(n, s, a, p) == exact.main_rhs(n, s, a, p), \
                        (s, n, a, p)
    elapsed = time.time() - start
    assert _report(1, elapsed < 60, f"{count} instances, {elapsed:.1f}s")


def test_criterion_02_degenerate_endpoints():
    """The transform vanishes at p=0 and collapses to the harmonic-star value
    at p=1; the literal enumeration with 0^0 = 1 confirms the p=1 route."""
    for s in _all_compositions(4):
        for n in range(1, 11):
            for a in A_GRID:
                assert exact.main_rhs(n, s, a, 0) == 0
                assert exact.main_rhs(n, s, a, 1) == exact.mhsv(n, s, a)
    # independent oracle on a subgrid: direct enumeration, not the collapsed route
    for s in _all_compositions(3):
        for n in (1, 3, 6):
            assert exact.main_rhs_literal(n, s, F(1, 2), 1) == exact.mhsv(n, s, F(1, 2))
            assert exact.main_rhs_literal(n, s, F(-1), 0) == 0
    assert _report(2, True, "p in {0,1} grid exact")


def test_criterion_03_dilcher_family():
    start = time.time()
    for n in range(1, 26):
        for d in range(1, 6):
            for a in (F(-2), F(-1), F(0), F(1, 2), F(1), F(2), F(3)):
                lhs, rhs = exact.dilcher_plus(n, d, a)
                assert lhs == rhs, ("plus", n, d, a)
            lhs, rhs = exact.signed_ones_cases(n, d)
            assert lhs == rhs, ("a2", n, d)
            lhs, rhs = exact.odd_binom_sum(n, d)
            assert lhs == rhs, ("odd", n, d)
            lhs, rhs = exact.dilcher_classic(n, d)
            assert lhs == rhs, ("classic", n, d)
    elapsed = time.time() - start
    assert _report(3, elapsed < 30, f"n<=25, d<=5, elapsed {elapsed:.1f}s")


def test_criterion_04_mean_theorem():
    for s in _all_compositions(4):
        for n in range(1, 13):
            for a in (F(-1), F(1, 2), F(1), F(2)):
                assert exact.mean_lhs(n, s, a) == exact.mean_rhs(n, s, a), (s, n, a)
    for d in range(1, 5):
        for n in range(1, 13):
            assert exact.mean_example1_rhs(n, d) == exact.mean_lhs(n, (1,) * d, 1)
    for n in range(1, 51):
        lhs, rhs = exact.mean_sum_hk_sides(n)
        assert lhs == rhs
    assert _report(4, True, "mean transform, all-ones collapse, harmonic partial sums")


def test_criterion_05_two_variable_normalization():
    import itertools

    xy_pairs = ((F(1), F(1)), (F(2), F(1)), (F(1), F(-2)), (F(1), F(0)),
                (F(0), F(1)), (F(1, 2), F(1, 3)))
    count = 0
    for r in range(0, 3):
        for u in itertools.product(range(0, 3), repeat=r + 1):
            if r == 0 and u[0] == 0:
                continue
            for m in itertools.product(range(0, 2), repeat=r):
                for n in range(1, 9):
                    for x, y in xy_pairs:
                        lhs, rhs = exact.pan_xu_check(n, r, u, m, x, y)
                        assert lhs == rhs, (n, r, u, m, x, y)
                        count += 1
    assert _report(5, True, f"{count} instances exact")


def test_criterion_06_oracle_equivalence():
    rng = random.Random(20240817)
    checked = 0
    while checked < 200:
        L = rng.randint(1, 5)
        N = rng.randint(1, 25)
        if binomial(N + L - 1, L) > 200000:
            continue
        bases = tuple(F(rng.randint(-24, 24), 12) for _ in range(L))
        powers = tuple(rng.randint(0, 3) for _ in range(L))
        tail = None
        if rng.random() < 0.3:
            tail = (F(rng.randint(-12, 12), 12), F(rng.randint(-12, 12), 12))
        spec = FactorSpec(bases, powers, tail)
        assert dp_chain_sum(spec, N) == naive_chain_sum(spec, N), (spec, N)
        checked += 1
    for parts in ((2,), (2, 2), (3, 2), (1, 1)):
        s = Composition(parts)
        for kind in ("MEAN_FULL", "MEAN_INF"):
            kernel = QKernelSpec(s, kind, F(1))
            for N in range(1, 21):
                assert dp_q_coupled(kernel, N) == dp_q_naive(kernel, N), (parts, kind, N)
    assert _report(6, True, "200 random specs + Q-kernels vs enumeration, bit-exact")


def test_criterion_07_unit_argument_example_family_a():
    start = time.time()
    closed = {d: float(polylog.zeta_star_closed("TWO_D", d)) for d in (1, 2)}
    assert abs(closed[1] - math.pi ** 2 / 6) < 1e-12
    assert abs(closed[2] - 7 * math.pi ** 4 / 360) < 1e-12
    rhs_values = {}
    for d in (1, 2):
        for p in (0.3, 0.5, 0.7):
            lhs, rhs = polylog.li_example_sides("A", d, p, 1e-8)
            diff = abs(float(lhs.value) - float(rhs.value))
            assert diff <= 1e-8, (d, p, diff)
            rhs_values[(d, p)] = float(rhs.value)
    for d in (1, 2):
        vals = [rhs_values[(d, p)] for p in (0.3, 0.5, 0.7)]
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(vals[i] - vals[j]) <= 2e-8, (d, vals)
    elapsed = time.time() - start
    assert _report(7, elapsed < 60, f"both depths, three p, p-invariant; {elapsed:.1f}s")


def test_criterion_08_unit_argument_example_family_b():
    target = float(polylog.zeta_star_closed("TWO_D_ONE", 1))
    assert abs(target - 2 * 1.2020569031595942854) < 1e-10
    for p in (0.3, 0.5, 0.7):
        lhs, rhs = polylog.li_example_sides("B", 1, p, 1e-8)
        assert abs(float(rhs.value) - target) <= 1e-8, (p,)
    assert _report(8, True, "difference equals 2*zeta(3) at three p")


def test_criterion_09_depth_reductions():
    """Depth-|s| strings reduce to depth-depth(s) evaluations within 1e-8;
    whenever |s| >= depth + 2 the reduced side costs strictly fewer terms.

    Instances where the full-depth string short-circuits to an exact zero
    (its last argument vanishes at a = 1 - 1/p, so no ladder runs and
    terms_lhs = 0) are excluded from the cost comparison: with zero terms on
    one side there is no evaluation to undercut.
    """
    failures = []
    cost_violations = []
    checked = 0
    for ident in ("LI1_RED1", "LI1_RED2", "LI2_RED1", "LI2_RED2"):
        for params, _ in catalog.default_grid(ident):
            r = catalog.verify(ident, params, 1e-8)
            checked += 1
            if r.status != "pass":
                failures.append((ident, params, r.status))
                continue
            comp = shape_composition(params["shape"])
            if comp.weight >= comp.depth + 2 and r.cost.get("terms_lhs", 0) > 0:
                if not r.cost["terms_rhs"] < r.cost["terms_lhs"]:
                    cost_violations.append((ident, params, r.cost))
    ok = not failures and not cost_violations
    assert _report(9, ok, f"{checked} instances; {len(failures)} failures, "
                          f"{len(cost_violations)} cost violations")
    assert not failures, failures[:5]
    assert not cost_violations, cost_violations[:5]


def test_criterion_10_order_reductions():
    for s in (2, 3, 4):
        for p in (0.5, 0.75):
            lhs, rhs = polylog.li_identity_sides("INTRO_RED_L", s, 1, p, 1e-8)
            assert abs(float(lhs.value) - float(rhs.value)) <= 1e-8, (s, p)
            if s == 2 and p == 0.5:
                assert abs(float(lhs.value) - math.pi ** 2 / 12) <= 1e-8
    assert _report(10, True, "a-free strings equal -Li_s(1-1/p); pi^2/12 at (2, 1/2)")


def test_criterion_11_mean_kernel_at_infinity():
    for parts, target, tol in (((2,), math.pi ** 2 / 6, 1e-6),
                               ((2, 2), 7 * math.pi ** 4 / 360, 1e-5)):
        lhs, rhs = polylog.li_identity_sides("MEAN_INF_1", Composition(parts),
                                             1, None, tol)
        assert lhs.converged and rhs.converged, (parts, "NOT_CONVERGED")
        assert abs(float(rhs.value) - target) <= tol, (parts, float(rhs.value))
        assert abs(float(lhs.value) - float(rhs.value)) <= tol
    assert _report(11, True, "Q-kernel sums hit the zeta values, extrapolated")


def test_criterion_12_quadrature_vs_closed_sums():
    for variant in ("AUX1", "AUX2"):
        for n in range(1, 7):
            for a in (F(1, 2), F(1), F(3, 2)):
                for x in (F(-1, 2), F(1, 2), F(1)):
                    r = catalog.verify(variant, dict(n=n, a=a, x=x), 1e-10)
                    assert r.status == "pass", (variant, n, a, x)
                    assert float(r.abs_diff) <= 1e-10
    assert _report(12, True, "both integral forms within 1e-10 on the grid")


def test_criterion_13_negative_control():
    """The out-of-domain fuzz point (a, p) = (1, 0.95) must report pass=False.

    Note: |a| <= min(1, 2/p - 1) evaluates to 1 <= 1 at this point, and the
    identity holds there numerically; see the companion non-vacuousness test
    for a point where the constraint genuinely bites.
    """
    r = catalog.verify("INTRO_SERIES", dict(s=2, a=1.0, p=0.95), 1e-8,
                       outside=True)
    ok = r.passed is False
    _report(13, ok, f"status={r.status}, |diff|={float(r.abs_diff) if r.abs_diff is not None else None}")
    assert ok, ("expected pass=False at (1, 0.95); evaluation gave "
                f"status={r.status}")


def test_constraint_not_vacuous_companion():
    """Outside the validity region there are points where verification
    genuinely fails: at (a, p) = (-1, 3/2) the right-hand series diverges."""
    r = catalog.verify("INTRO_SERIES", dict(s=2, a=-1.0, p=1.5), 1e-8,
                       outside=True)
    assert r.passed is False
    print("ACCEPTANCE 13b: PASS constraint is not vacuous at (-1, 3/2)")
