"""Numeric kernel: exact rationals, extended-precision reals, binomials,
adaptive quadrature, and sequence extrapolation.

Two scalar kernels coexist throughout the package:

* exact mode uses :class:`fractions.Fraction` (arbitrary-size canonical
  rationals), so finite-sum identities can be compared with ``==``;
* numeric mode uses :class:`BigReal`, a thin wrapper over an mpmath
  binary float with an explicit precision in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mp

# Canonical exact scalar.  Fraction already maintains gcd-reduced form with a
# positive denominator, which is exactly the invariant we need.
ExactRational = Fraction

DEFAULT_PRECISION = 160  # bits; >= 40 decimal digits of headroom over 1e-8 checks
MIN_PRECISION = 100

QUADRATURE_PANEL_BUDGET = 2 ** 20
_GL_ORDER = 12


class DomainError(ValueError):
    """Arguments outside an operation's stated domain."""


class BudgetExceededError(RuntimeError):
    """An enumeration or DP refused to run past its cost budget."""


class NonConvergenceError(RuntimeError):
    """An adaptive scheme exhausted its budget before reaching tolerance."""


def _resolve_precision(precision):
    if precision is None:
        return DEFAULT_PRECISION
    if precision < MIN_PRECISION:
        raise DomainError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")
    return int(precision)


class BigReal:
    """Extended-precision real with an explicit precision in bits.

    Arithmetic rounds to the smaller precision of the two operands, so a
    result never claims more precision than its inputs carried.
    """

    __slots__ = ("value", "precision")

    def __init__(self, value, precision=None):
        self.precision = _resolve_precision(precision)
        with mp.workprec(self.precision):
            if isinstance(value, BigReal):
                self.value = +value.value
            elif isinstance(value, Fraction):
                self.value = mpmath.mpf(value.numerator) / value.denominator
            else:
                self.value = mpmath.mpf(value)

    @staticmethod
    def _coerce(other, precision):
        if isinstance(other, BigReal):
            return other
        return BigReal(other, precision)

    def _binop(self, other, fn):
        other = self._coerce(other, self.precision)
        prec = min(self.precision, other.precision)
        with mp.workprec(prec):
            return BigReal(fn(self.value, other.value), prec)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._coerce(other, self.precision)._binop(self, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._coerce(other, self.precision)._binop(self, lambda a, b: a / b)

    def __pow__(self, exponent):
        with mp.workprec(self.precision):
            return BigReal(self.value ** exponent, self.precision)

    def __neg__(self):
        return BigReal(-self.value, self.precision)

    def __abs__(self):
        return BigReal(abs(self.value), self.precision)

    def _cmp_value(self, other):
        return other.value if isinstance(other, BigReal) else mpmath.mpf(other)

    def __eq__(self, other):
        return self.value == self._cmp_value(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"BigReal({mpmath.nstr(self.value, 20)}, precision={self.precision})"

    def to_str(self, digits=12):
        return mpmath.nstr(self.value, digits)


@dataclass(frozen=True)
class EvalResult:
    """Outcome of an adaptive numeric evaluation.

    ``converged`` is only set when ``error_estimate`` passed the requested
    tolerance; a result with ``converged=False`` still carries the best value
    obtained within budget.
    """

    value: BigReal
    error_estimate: BigReal
    terms_used: int
    truncation_level: int
    converged: bool

    def __float__(self):
        return float(self.value)


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k); zero when k > n."""
    if n < 0 or k < 0:
        raise DomainError("binomial requires nonnegative arguments")
    if k > n:
        return 0
    return math.comb(n, k)


def binom_ratio_sum(m: int, n: int) -> Fraction:
    """Exact value of sum_{k=1}^{m} C(m,k)/C(n,k) for 1 <= m <= n.

    Closed form m/(n+1-m); this routine computes the sum directly so it can
    serve as the independent side of that identity.
    """
    if m < 1 or m > n:
        raise DomainError(f"need 1 <= m <= n, got m={m}, n={n}")
    total = Fraction(0)
    for k in range(1, m + 1):
        total += Fraction(binomial(m, k), binomial(n, k))
    return total


# ---------------------------------------------------------------------------
# Adaptive quadrature
# ---------------------------------------------------------------------------

_gl_cache: dict = {}


def _gauss_legendre_nodes(order, prec):
    """Nodes/weights for Gauss-Legendre on [-1, 1] at ``prec`` bits."""
    key = (order, prec)
    cached = _gl_cache.get(key)
    if cached is not None:
        return cached
    with mp.workprec(prec + 32):
        nodes = []
        weights = []
        for i in range(order):
            # Newton refinement from the Chebyshev initial guess.
            x = mpmath.cos(mpmath.pi * (i + mpmath.mpf(3) / 4) / (order + mpmath.mpf(1) / 2))
            for _ in range(60):
                p0, p1 = mpmath.mpf(1), x
                for j in range(2, order + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(2) ** (-prec - 16):
                    break
            p0, p1 = mpmath.mpf(1), x
            for j in range(2, order + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = order * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    _gl_cache[key] = (nodes, weights)
    return nodes, weights


_GL_F64 = None


def _gl_f64():
    global _GL_F64
    if _GL_F64 is None:
        import numpy as np

        x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
        _GL_F64 = (list(x), list(w))
    return _GL_F64


def _panel(f, a, b, nodes, weights):
    h = (b - a) / 2
    c = (a + b) / 2
    total = 0
    for x, w in zip(nodes, weights):
        total += w * f(c + h * x)
    return total * h


def adaptive_quadrature(f: Callable, lo, hi, tol, *, precision=None,
                        budget=QUADRATURE_PANEL_BUDGET, float_mode=False,
                        min_depth=2, edge_depth=0):
    """Integrate ``f`` over ``[lo, hi]`` to absolute tolerance ``tol``.

    Adaptive bisection with a fixed-order Gauss-Legendre rule: each panel is
    accepted once the two-half refinement agrees with it to the panel's share
    of the tolerance.  Panels shallower than ``min_depth`` always subdivide,
    and panels touching an endpoint subdivide down to ``edge_depth``, so
    integrands with thin boundary layers cannot slip past the error test
    unsampled.  Raises :class:`NonConvergenceError` when the panel budget is
    exhausted.

    ``float_mode=True`` runs the whole scheme in double precision, for
    integrands that are themselves float-valued truncations.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    prec = _resolve_precision(precision)
    if float_mode:
        nodes, weights = _gl_f64()
        lo_, hi_ = float(lo), float(hi)
        to_scalar = float
    else:
        nodes, weights = _gauss_legendre_nodes(_GL_ORDER, prec)
        with mp.workprec(prec):
            lo_, hi_ = _to_mpf(lo), _to_mpf(hi)
        to_scalar = mpmath.mpf

    if lo_ == hi_:
        return BigReal(0, prec)

    def run():
        panels = 0
        total = to_scalar(0)
        stack = [(lo_, hi_, _panel(f, lo_, hi_, nodes, weights), float(tol), 0)]
        while stack:
            a, b, coarse, budget_here, depth = stack.pop()
            panels += 1
            if panels > budget:
                raise NonConvergenceError(
                    f"quadrature panel budget {budget} exhausted on [{lo}, {hi}]")
            c = (a + b) / 2
            left = _panel(f, a, c, nodes, weights)
            right = _panel(f, c, b, nodes, weights)
            err = abs(coarse - (left + right))
            force = depth < min_depth or (
                depth < edge_depth and (a == lo_ or b == hi_))
            if err <= budget_here and not force:
                total += left + right
            else:
                stack.append((a, c, left, budget_here / 2, depth + 1))
                stack.append((c, b, right, budget_here / 2, depth + 1))
        return total

    if float_mode:
        return BigReal(run(), prec)
    with mp.workprec(prec):
        return BigReal(run(), prec)


# ---------------------------------------------------------------------------
# Sequence extrapolation
# ---------------------------------------------------------------------------

def _basis_term(log_power, inv_power):
    if log_power == 0:
        return lambda N: 1 / N ** inv_power
    return lambda N: mpmath.log(N) ** log_power / N ** inv_power


# Tail-model bases, in the order terms are added as more samples arrive.
# POWER_FIRST suits plain power tails (partial sums of convergent p-series);
# LOG_FIRST suits tails dominated by log-polynomial corrections at first
# order, which arise from runs of unit arguments in chain sums.  Ladder
# drivers may fit both and keep whichever is self-consistent.
BASIS_POWER_FIRST = tuple(_basis_term(l, i) for l, i in
                          ((0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (0, 3), (1, 3)))
BASIS_LOG_FIRST = tuple(_basis_term(l, i) for l, i in
                        ((0, 1), (1, 1), (2, 1), (3, 1), (0, 2), (1, 2), (2, 2), (3, 2)))
_BASIS = BASIS_POWER_FIRST
_SOLVE_PREC = 220


def _to_mpf(v):
    if isinstance(v, BigReal):
        return v.value
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _window_limit(levels, values, n_terms, basis=None):
    """Fit value ~ c0 + sum c_t * basis_t(N) on the trailing window."""
    basis = _BASIS if basis is None else basis
    k = n_terms + 1
    levels = levels[-k:]
    values = values[-k:]
    with mp.workprec(_SOLVE_PREC):
        rows = []
        for N in levels:
            Nm = mpmath.mpf(N)
            rows.append([mpmath.mpf(1)] + [fn(Nm) for fn in basis[:n_terms]])
        A = mpmath.matrix(rows)
        b = mpmath.matrix([_to_mpf(v) for v in values])
        sol = mpmath.lu_solve(A, b)
        return sol[0]


def extrapolant_ladder(levels: Sequence[int], values: Sequence, max_terms=None,
                       basis=None):
    """Window extrapolants e_2..e_J, one per prefix of the sample list.

    Entry j uses the trailing window of the first j samples with
    ``min(j - 1, max_terms)`` tail-model terms.  Raises ZeroDivisionError
    through from a singular fit; callers degrade to raw values.
    """
    basis = _BASIS if basis is None else basis
    if max_terms is None:
        max_terms = len(basis)
    exts = []
    for j in range(2, len(levels) + 1):
        n_terms = min(j - 1, max_terms)
        exts.append(_window_limit(levels[:j], values[:j], n_terms, basis))
    return exts


def best_extrapolant(levels, values, bases=(BASIS_POWER_FIRST, BASIS_LOG_FIRST),
                     noise_floor=0.0):
    """Extrapolate with each candidate basis ordering and keep the smallest
    embedded error estimate (three times the shift caused by dropping the
    model's last term on the final window), guarded below by the
    disagreement between the candidate models and by the caller's noise
    floor.  The cross-model guard prevents a structurally wrong model from
    reporting a coincidentally tiny estimate.

    Returns ``(value, error_estimate)`` as mpf, or None when every fit is
    singular or fewer than three samples are available.
    """
    if len(values) < 4:
        return None
    fits = []
    for basis in bases:
        k = min(len(values) - 1, len(basis))
        k_prev = min(len(values) - 2, len(basis))
        try:
            e_full = _window_limit(levels, values, k, basis)
            e_less = _window_limit(levels, values, k - 1, basis)
            e_prev = _window_limit(levels[:-1], values[:-1], k_prev, basis)
        except ZeroDivisionError:
            continue
        # model sensitivity on the final window, plus sequential stability of
        # the same model across the last two windows
        est = max(3 * abs(e_full - e_less), abs(e_full - e_prev) / 2)
        fits.append((e_full, est))
    if not fits:
        return None
    value, est = min(fits, key=lambda f: f[1])
    return value, max(est, noise_floor)


def richardson(samples: Sequence[tuple]):
    """Extrapolate a sequence of (level N, value) pairs to its limit.

    Assumes a smooth tail in inverse powers of N with logarithmic
    corrections; the model grows with the number of samples.  Returns
    ``(value, error_estimate)`` where the estimate is the difference between
    the last two window extrapolants.  A singular fit degrades to the last
    raw value with the last raw difference as the error.
    """
    if len(samples) < 2:
        raise DomainError("richardson needs at least two samples")
    levels = [s[0] for s in samples]
    values = [s[1] for s in samples]
    if any(levels[i + 1] <= levels[i] for i in range(len(levels) - 1)):
        raise DomainError("sample levels must be strictly increasing")
    try:
        exts = extrapolant_ladder(levels, values)
    except ZeroDivisionError:
        value = BigReal(_to_mpf(values[-1]))
        err = BigReal(abs(_to_mpf(values[-1]) - _to_mpf(values[-2])))
        return value, err
    value = BigReal(exts[-1])
    if len(exts) >= 2:
        err = BigReal(abs(exts[-1] - exts[-2]))
    else:
        err = BigReal(abs(exts[-1] - _to_mpf(values[-1])))
    return value, err
