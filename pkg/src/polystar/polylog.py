"""Numerical evaluation of polylogarithms, nested star sums, their closed
forms, and the assembled sides of the series identities.

All infinite sums here are truncation ladders driven through the chain-sum
engine; geometric tails stop on raw differences, polynomial tails (any prefix
product of the argument string on the unit circle) go through window
extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .chains import (FactorSpec, PairingUnavailableError, QKernelSpec,
                     Q_STATE_BUDGET, TruncationSchedule, adaptive_sum,
                     dp_chain_partials, dp_q_coupled)
from .compositions import (Composition, ShapeBlocks, as_composition,
                           chain_q_signs, domain_check, shape_args,
                           shape_composition)
from .kernel import (BigReal, DomainError, EvalResult, adaptive_quadrature,
                     _resolve_precision)

_PAIRING_EPS = 1e-9
_MARGINAL_EPS = 1e-12
POLY_MAX_N = 2 ** 17
GEO_MAX_N = 2 ** 20
Q_MAX_N = 4096
MEAN_INTEGRAL_MAX_N = 2 ** 15


@dataclass(frozen=True)
class PolylogQuery:
    """A star-polylogarithm request: composition s, per-index arguments xs
    (length = depth of s), and an absolute tolerance."""

    s: Composition
    xs: tuple
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "s", as_composition(self.s))
        xs = tuple(float(x) for x in self.xs)
        if len(xs) != self.s.depth:
            raise DomainError(f"need {self.s.depth} arguments, got {len(xs)}")
        if self.tol <= 0:
            raise DomainError("tolerance must be positive")
        object.__setattr__(self, "xs", xs)


# ---------------------------------------------------------------------------
# One-dimensional polylogarithm and the zeta oracle
# ---------------------------------------------------------------------------

_EM_K = 12


def zeta(s: int, tol=None, precision=None) -> BigReal:
    """Riemann zeta at an integer s >= 2 by Euler-Maclaurin summation.

    The cutoff grows until the rigorous remainder bound (first omitted
    correction term, doubled for safety) drops below ``tol``.
    """
    if s < 2:
        raise DomainError("zeta oracle needs s >= 2")
    prec = _resolve_precision(precision)
    with mp.workprec(prec + 48):
        if tol is None:
            tol_ = mpmath.mpf(2) ** (-(prec + 8))
        else:
            tol_ = mpmath.mpf(tol)
        M = 16
        while True:
            # remainder bound after the B_{2K} term
            rising = mpmath.mpf(1)
            for j in range(2 * _EM_K + 1):
                rising *= s + j
            bound = (2 * abs(mpmath.bernoulli(2 * _EM_K + 2))
                     / mpmath.factorial(2 * _EM_K + 2)
                     * rising * mpmath.mpf(M) ** (-(s + 2 * _EM_K + 1)))
            if bound <= tol_ or M >= 2 ** 20:
                break
            M *= 2
        total = mpmath.mpf(0)
        for n in range(1, M):
            total += mpmath.mpf(n) ** (-s)
        total += mpmath.mpf(M) ** (1 - s) / (s - 1)
        total += mpmath.mpf(M) ** (-s) / 2
        rising = mpmath.mpf(s)
        mpow = mpmath.mpf(M) ** (-s - 1)
        for k in range(1, _EM_K + 1):
            total += (mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
                      * rising * mpow)
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            mpow /= M * M
        return BigReal(total, prec)


def li(s: int, x, tol=None, precision=None) -> EvalResult:
    """One-dimensional polylogarithm sum_{n>=1} x^n / n^s for |x| <= 1.

    Order 1 uses the closed form -log(1-x); the endpoint values at x = +-1
    go through the zeta oracle.
    """
    if s < 1:
        raise DomainError("order must be >= 1")
    prec = _resolve_precision(precision)
    tol = float(tol) if tol is not None else 1e-12
    x = float(x) if not isinstance(x, (int, Fraction)) else Fraction(x)
    xf = float(x)
    if abs(xf) > 1 + 1e-15:
        raise DomainError(f"|x| <= 1 required, got x={xf}")
    tiny = BigReal(mpmath.mpf(2) ** (-prec + 8), prec)
    if s == 1:
        if xf == 1:
            raise DomainError("order-1 polylogarithm diverges at x = 1")
        with mp.workprec(prec):
            val = -mpmath.log(1 - mpmath.mpf(xf))
        return EvalResult(BigReal(val, prec), tiny, 1, 1, True)
    if xf == 1:
        z = zeta(s, tol, prec)
        return EvalResult(z, tiny, 1, 1, True)
    if xf == -1:
        with mp.workprec(prec):
            z = zeta(s, tol, prec)
            val = -(1 - mpmath.mpf(2) ** (1 - s)) * z.value
        return EvalResult(BigReal(val, prec), tiny, 1, 1, True)
    with mp.workprec(prec):
        xm = mpmath.mpf(xf)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        n = 0
        while True:
            n += 1
            power *= xm
            total += power / mpmath.mpf(n) ** s
            tail = abs(power * xm) / ((n + 1) ** s * (1 - abs(xm)))
            if tail <= tol:
                break
            if n > 10 ** 7:
                raise DomainError("order-1 series did not reach tolerance")
        return EvalResult(BigReal(total, prec), BigReal(tail, prec), n, n, True)


# ---------------------------------------------------------------------------
# Multi-dimensional star sums
# ---------------------------------------------------------------------------

def _prefix_products(xs):
    out = []
    acc = 1.0
    for x in xs:
        acc *= x
        out.append(acc)
    return out


def _decay_converges(bases, powers) -> bool:
    """Conservative convergence test for the chain sum with the given
    per-index bases and denominator powers.

    Walks the inner-to-outer DP symbolically, tracking whether each layer
    decays geometrically or like m^-alpha (log factors ignored; they never
    flip strict comparisons used here).
    """
    L = len(bases)
    B = _prefix_products(bases)
    if any(abs(b) > 1 + _PAIRING_EPS for b in B):
        return False
    # state: ("geo", rho) or ("poly", alpha, alternating)
    bL = B[-1]
    if abs(bL) < 1 - _MARGINAL_EPS:
        state = ("geo", abs(bL), False)
    else:
        state = ("poly", float(powers[-1]), bL < 0)
    for i in range(L - 2, -1, -1):
        b = B[i]
        s_i = float(powers[i])
        kind, val, alt = state
        if abs(b) < 1 - _MARGINAL_EPS:
            if kind == "geo":
                state = ("geo", max(val, abs(b)), False)
            else:
                state = ("poly", val + s_i, alt)
        else:
            neg = b < 0
            if kind == "geo":
                state = ("poly", s_i, neg)
            elif neg:
                state = ("poly", val + s_i, True)
            else:
                if val > 1 + _MARGINAL_EPS or (alt and val > _MARGINAL_EPS):
                    state = ("poly", s_i, False)
                else:
                    state = ("poly", s_i - (1 - val), False)
    kind, val, alt = state
    if kind == "geo":
        return True
    return val > 1 + 1e-9 or (alt and val > 1e-9)


def _star_factor_spec(s: Composition, xs) -> FactorSpec:
    return FactorSpec(tuple(float(x) for x in xs), s.parts)


def _star_ladder(spec: FactorSpec, tol, precision) -> EvalResult:
    """Truncation ladder for a validated chain-sum spec (possibly with a
    last-index tail difference)."""
    prec = _resolve_precision(precision)
    worst = 0.0
    marginal = 0
    for run in spec.expanded():
        B = _prefix_products([float(b) for b in run.bases])
        if any(abs(b) > 1 + _PAIRING_EPS for b in B):
            raise PairingUnavailableError(
                f"prefix products {B} leave the unit disc; chain sum would diverge")
        if not _decay_converges([float(b) for b in run.bases], run.powers):
            raise DomainError(f"chain sum for {run} diverges")
        worst = max(worst, max(abs(b) for b in B))
        # only prefix products near +1 stack logarithms into the tail;
        # alternating (near -1) directions give bounded inner sums
        marginal = max(marginal, sum(1 for b in B if b >= 1 - _PAIRING_EPS))
    polynomial = worst >= 0.95
    schedule = TruncationSchedule(
        start=64, growth=2,
        max_n=POLY_MAX_N if polynomial else GEO_MAX_N,
        tolerance=tol, extrapolate=polynomial)
    L = spec.length

    def evaluate(N):
        return float(dp_chain_partials(spec, N)[N])

    # every marginal prefix direction can raise the log degree of the tail;
    # demand enough ladder samples for the model to cover it
    result = adaptive_sum(evaluate, schedule,
                          tail="polynomial" if polynomial else "geometric",
                          cost_per_level=lambda N: N * L,
                          min_samples=max(7, marginal + 4))
    if result.value.precision != prec:
        result = EvalResult(BigReal(result.value, prec),
                            BigReal(result.error_estimate, prec),
                            result.terms_used, result.truncation_level,
                            result.converged)
    return result


def li_star(query, xs=None, tol=None, precision=None) -> EvalResult:
    """Star polylogarithm sum over n_1 >= ... >= n_d >= 1 of
    prod x_i^{n_i} / n_i^{s_i}.

    Accepts a :class:`PolylogQuery` or ``(s, xs, tol)``.  Queries whose
    argument-string prefix products leave the unit disc are rejected with
    :class:`PairingUnavailableError`; provably divergent ones with
    :class:`DomainError`.
    """
    if isinstance(query, PolylogQuery):
        q = query
    else:
        q = PolylogQuery(as_composition(query), tuple(xs), tol if tol is not None else 1e-9)
    prec = _resolve_precision(precision)
    s = q.s
    if any(x == 0 for x in q.xs):
        # a zero argument annihilates every chain
        zero = BigReal(0, prec)
        return EvalResult(zero, zero, 0, 0, True)
    if s.depth == 1:
        return li(s.parts[0], q.xs[0], q.tol, prec)
    return _star_ladder(_star_factor_spec(s, q.xs), q.tol, prec)


def li_star_diff(s, xs, x_hi, x_lo, tol, precision=None) -> EvalResult:
    """Difference of two star polylogarithms over the same composition whose
    argument strings differ only in the last entry:

        Li*_s(xs, x_hi) - Li*_s(xs, x_lo)

    evaluated as one chain sum with the last-index factor x_hi^n - x_lo^n,
    at half the cost of two separate ladders.
    """
    s = as_composition(s)
    xs = tuple(float(x) for x in xs)
    if len(xs) != s.depth - 1:
        raise DomainError(f"need {s.depth - 1} leading arguments, got {len(xs)}")
    prec = _resolve_precision(precision)
    x_hi, x_lo = float(x_hi), float(x_lo)
    if x_hi == x_lo or any(x == 0 for x in xs):
        zero = BigReal(0, prec)
        return EvalResult(zero, zero, 0, 0, True)
    if s.depth == 1:
        return _combine(lambda u, v: u - v,
                        li(s.parts[0], x_hi, tol / 2, prec),
                        li(s.parts[0], x_lo, tol / 2, prec), precision=prec)
    spec = FactorSpec(xs + (1.0,), s.parts, tail=(x_hi, x_lo))
    return _star_ladder(spec, tol, prec)


def zeta_star(s, tol=None, precision=None) -> EvalResult:
    """Multiple zeta-star value: the star polylogarithm with unit arguments.
    Requires s_1 >= 2 for convergence."""
    s = as_composition(s)
    if s.parts[0] < 2:
        raise DomainError("zeta-star values need a leading part >= 2")
    return li_star(PolylogQuery(s, (1.0,) * s.depth, tol if tol is not None else 1e-9),
                   precision=precision)


def zeta_star_closed(form: str, d: int, precision=None) -> BigReal:
    """Closed forms: TWO_D -> (2 - 4^(1-d)) zeta(2d); TWO_D_ONE -> 2 zeta(2d+1)."""
    if d < 1:
        raise DomainError("need d >= 1")
    prec = _resolve_precision(precision)
    with mp.workprec(prec + 16):
        if form == "TWO_D":
            val = (2 - mpmath.mpf(4) ** (1 - d)) * zeta(2 * d, precision=prec).value
        elif form == "TWO_D_ONE":
            val = 2 * zeta(2 * d + 1, precision=prec).value
        else:
            raise DomainError(f"unknown closed form {form!r}")
    return BigReal(val, prec)


# ---------------------------------------------------------------------------
# Q-coupled infinite sums
# ---------------------------------------------------------------------------

def mean_kernel_infinite(s, tol, precision=None) -> EvalResult:
    """Infinite limit of the 1/((Q+1)(Q+n_L+1)) kernel sum over chains of
    shape s: a truncation ladder over the Q-coupled DP with window
    extrapolation (the tail decays like log N / N)."""
    s = as_composition(s)
    kernel = QKernelSpec(s, "MEAN_INF")
    max_n = min(Q_MAX_N, int(math.isqrt(Q_STATE_BUDGET // max(1, s.weight))))
    schedule = TruncationSchedule(start=64, growth=2, max_n=max_n,
                                  tolerance=tol, extrapolate=True)

    def evaluate(N):
        return dp_q_coupled(kernel, N, float_mode=True)

    return adaptive_sum(evaluate, schedule, tail="polynomial",
                        cost_per_level=lambda N: N * s.weight)


def _transform_spec_float(s: Composition, a: float, p: float) -> FactorSpec:
    """Float factor spec of the chain-sum transform at (a, p), p != 1."""
    q = 1.0 - p
    bases = []
    for part in s.parts:
        if part == 1:
            bases.append(1.0)
        else:
            bases.append(q)
            bases.extend([1.0] * (part - 2))
            bases.append(1.0 / q)
    return FactorSpec(tuple(bases), (1,) * s.weight, tail=(1.0 - p + a * p, q))


def mean_average_infinite(s, a, tol, precision=None) -> EvalResult:
    """Infinite limit of the binomial-ratio mean kernel over chains of shape
    s with weight a^{n_{|s|+1}}.

    Evaluated through the beta-integral representation: the truncated kernel
    sum equals the integral over p in [0,1] of the truncated chain-sum
    transform at (a, p), which the separable DP evaluates in O(N |s|) per
    quadrature node.  The truncation ladder is then extrapolated as usual.
    """
    s = as_composition(s)
    a = float(a)
    cost = [0]
    L = s.weight

    collapsed = FactorSpec((1.0,) * (s.depth - 1) + (a,), s.parts)

    def evaluate(N):
        def integrand(p):
            cost[0] += N * L
            if 1.0 - p < 1e-13:
                # degenerate endpoint: only zero-gap chains survive
                return float(dp_chain_partials(collapsed, N)[N])
            spec = _transform_spec_float(s, a, p)
            return float(dp_chain_partials(spec, N)[N])

        # the truncated integrand has boundary layers of width ~1/N at both
        # endpoints; force the bisection to resolve that scale
        depth = int(math.log2(N)) + 6
        val = adaptive_quadrature(integrand, 0.0, 1.0, tol / 64, float_mode=True,
                                  edge_depth=depth)
        return float(val)

    schedule = TruncationSchedule(start=64, growth=2, max_n=MEAN_INTEGRAL_MAX_N,
                                  tolerance=tol, extrapolate=True)

    def cost_delta(N):
        c, cost[0] = cost[0], 0
        return c

    return adaptive_sum(evaluate, schedule, tail="polynomial", cost_per_level=cost_delta)


def mean_lhs_converges(s, a) -> bool:
    """Whether the depth-d star polylogarithm with arguments (1,...,1,a)
    converges: a leading part >= 2, or the single-part depth-one case with
    |a| <= 1, a != 1."""
    s = as_composition(s)
    a = float(a)
    if abs(a) > 1:
        return False
    if s.parts[0] >= 2:
        return True
    return s.depth == 1 and a != 1


# ---------------------------------------------------------------------------
# Identity assembly
# ---------------------------------------------------------------------------

_SERIES_IDS = ("LI1_MAIN", "LI1_A1", "LI1_RED1", "LI1_RED2",
               "LI2_MAIN", "LI2_A1", "LI2_RED1", "LI2_RED2",
               "INTRO_SERIES", "INTRO_RED_L", "INTRO_RED_R",
               "MEAN_INF_A", "MEAN_INF_1")


def _wrap_value(val, prec, err=None):
    tiny = BigReal(mpmath.mpf(2) ** (-prec + 8), prec)
    return EvalResult(BigReal(val, prec), err if err is not None else tiny, 1, 1, True)


def _combine(op, *results, precision=None):
    prec = _resolve_precision(precision)
    with mp.workprec(prec):
        vals = [r.value.value for r in results]
        errs = [r.error_estimate.value for r in results]
        value = op(*vals)
        err = sum(errs, mpmath.mpf(0))
    return EvalResult(BigReal(value, prec), BigReal(err, prec),
                      sum(r.terms_used for r in results),
                      max(r.truncation_level for r in results),
                      all(r.converged for r in results))


def _series_domain(identity, a, p):
    if identity in ("LI1_MAIN", "LI2_MAIN", "INTRO_SERIES"):
        return domain_check("MAIN_AP", a, p)
    if identity in ("LI1_A1", "LI2_A1"):
        return domain_check("A1_P", 1, p)
    if identity in ("LI1_RED1", "LI2_RED1", "INTRO_RED_L"):
        return domain_check("RED_BOX", 1 - Fraction(1) / Fraction(p), p)
    if identity in ("LI1_RED2", "LI2_RED2", "INTRO_RED_R"):
        return domain_check("RED_BOX", a, p)
    return True


def li_identity_sides(identity: str, shape_or_comp, a, p, tol,
                      precision=None, check_domain=True):
    """Assemble and evaluate both sides of a series identity.

    Returns ``(lhs, rhs)`` as :class:`EvalResult` values, each evaluated to
    tolerance ``tol / 4`` so a two-sided comparison at ``tol`` is sound.
    Raises :class:`DomainError` when the parameters violate the identity's
    validity region (unless ``check_domain=False``).
    """
    if identity not in _SERIES_IDS:
        raise DomainError(f"unknown series identity {identity!r}")
    prec = _resolve_precision(precision)
    # error budget: a quarter of the tolerance to the single-evaluation side,
    # half to the side composed of two evaluations (a quarter each); the
    # combined bound 3*tol/4 stays below the comparison tolerance
    side_tol = tol / 4

    if identity in ("MEAN_INF_1", "MEAN_INF_A"):
        s = as_composition(shape_or_comp)
        if identity == "MEAN_INF_1":
            lhs = zeta_star(s, side_tol, prec)
            rhs = mean_kernel_infinite(s, side_tol, prec)
            return lhs, rhs
        if check_domain and not mean_lhs_converges(s, a):
            raise DomainError(f"left side diverges for s={s}, a={a}")
        lhs = li_star(PolylogQuery(s, (1.0,) * (s.depth - 1) + (float(a),), side_tol),
                      precision=prec)
        rhs = mean_average_infinite(s, a, side_tol, prec)
        return lhs, rhs

    if identity.startswith("INTRO"):
        order = int(shape_or_comp if not isinstance(shape_or_comp, Composition)
                    else shape_or_comp.parts[0])
        if order < 2:
            raise DomainError("series identities need order >= 2")
        shape = ShapeBlocks("A", (order - 2,), ())
    else:
        shape = shape_or_comp
        if not isinstance(shape, ShapeBlocks):
            raise DomainError("block-family identities need a ShapeBlocks")
        want = "A" if identity.startswith("LI1") else "B"
        if shape.family != want:
            raise DomainError(f"{identity} needs a family-{want} shape")

    if identity in ("LI1_A1", "LI2_A1"):
        a = 1
    if check_domain and not _series_domain(identity, a, p):
        raise DomainError(f"({a}, {p}) outside the validity region of {identity}")

    comp = shape_composition(shape)
    ones = Composition((1,) * comp.weight)

    def star(args, tol_):
        return li_star(PolylogQuery(ones, tuple(float(x) for x in args), tol_),
                       precision=prec)

    def depth_side(x_last, tol_):
        xs = (1.0,) * (comp.depth - 1) + (float(x_last),)
        return li_star(PolylogQuery(comp, xs, tol_), precision=prec)

    main_args = shape_args(shape, "main", a, p)
    sub_args = shape_args(shape, "sub", a, p)
    # the two strings differ only in their final entry, so their difference
    # collapses to one chain sum with a last-index tail factor
    assert main_args[:-1] == sub_args[:-1]

    def string_diff(tol_):
        return li_star_diff(ones, main_args[:-1], main_args[-1], sub_args[-1],
                            tol_, prec)

    if identity == "INTRO_SERIES" or identity in ("LI1_MAIN", "LI2_MAIN"):
        if identity == "INTRO_SERIES":
            lhs = li(comp.parts[0], a, side_tol, prec)
        else:
            lhs = depth_side(a, side_tol)
        return lhs, string_diff(2 * side_tol)

    if identity in ("LI1_A1", "LI2_A1"):
        lhs = zeta_star(comp, side_tol, prec)
        return lhs, string_diff(2 * side_tol)

    a_red = 1 - 1 / float(p)
    if identity in ("INTRO_RED_L", "LI1_RED1", "LI2_RED1"):
        lhs = star(sub_args, side_tol)
        if identity == "INTRO_RED_L":
            inner = li(comp.parts[0], a_red, side_tol, prec)
        else:
            inner = depth_side(a_red, 2 * side_tol)
        rhs = _combine(lambda x: -x, inner, precision=prec)
        return lhs, rhs

    # INTRO_RED_R / LI1_RED2 / LI2_RED2
    lhs = star(main_args, side_tol)
    if identity == "INTRO_RED_R":
        at_a = li(comp.parts[0], a, side_tol, prec)
        at_red = li(comp.parts[0], a_red, side_tol, prec)
        rhs = _combine(lambda x, y: x - y, at_a, at_red, precision=prec)
    else:
        rhs = li_star_diff(comp, (1.0,) * (comp.depth - 1), a, a_red,
                           2 * side_tol, prec)
    return lhs, rhs


def li_example_sides(family: str, d: int, p, tol, precision=None):
    """Closed-form instances of the block identities at zero block sizes:

    family A: the main/sub difference equals (2 - 4^(1-d)) zeta(2d);
    family B: it equals 2 zeta(2d+1).
    """
    prec = _resolve_precision(precision)
    if family == "A":
        shape = ShapeBlocks("A", (0,) * d, (0,) * (d - 1))
        closed = zeta_star_closed("TWO_D", d, prec)
        ident = "LI1_A1"
    elif family == "B":
        shape = ShapeBlocks("B", (0,) * d, (0,) * (d - 1) + (1,))
        closed = zeta_star_closed("TWO_D_ONE", d, prec)
        ident = "LI2_A1"
    else:
        raise DomainError(f"family must be 'A' or 'B', got {family!r}")
    lhs = _wrap_value(closed.value, prec)
    _, rhs = li_identity_sides(ident, shape, 1, p, tol, prec)
    return lhs, rhs
