"""Generic evaluation of weighted sums over nonincreasing index chains.

Three evaluators share the same summand model:

* :func:`naive_chain_sum` — direct enumeration, the oracle;
* :func:`dp_chain_sum` — prefix-sum dynamic programming, O(N * L);
* :func:`dp_q_coupled` — DP over (position, chain value, partial Q) for the
  kernels that couple the chain statistic Q to the summand.

:func:`adaptive_sum` drives any of them over a truncation ladder, with a
geometric-tail stopping test or window extrapolation for polynomial tails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.signal import lfilter

from .compositions import Composition, as_composition, chain_q_signs, q_of
from .kernel import (BigReal, BudgetExceededError, DomainError, EvalResult,
                     best_extrapolant, binomial)

NAIVE_CHAIN_BUDGET = 10 ** 7
Q_STATE_BUDGET = 10 ** 8
PAIRING_SLACK = 1e-9


class RescaleRequiredError(RuntimeError):
    """Floating DP magnitude grew past the overflow guard without rescaling."""


class PairingUnavailableError(RuntimeError):
    """An interior base > 1 cannot be paired into bounded prefix products."""


@dataclass(frozen=True)
class FactorSpec:
    """Per-index summand factors base_i^{n_i} / n_i^{power_i}, with an
    optional last-index tail factor (alpha^{n_L} - gamma^{n_L})."""

    bases: tuple
    powers: tuple
    tail: tuple = None  # (alpha, gamma) or None

    def __post_init__(self):
        bases = tuple(self.bases)
        powers = tuple(int(p) for p in self.powers)
        if len(bases) != len(powers) or not bases:
            raise DomainError("bases and powers must be nonempty and equally long")
        if any(p < 0 for p in powers):
            raise DomainError("powers must be >= 0")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "powers", powers)
        if self.tail is not None:
            object.__setattr__(self, "tail", tuple(self.tail))

    @property
    def length(self):
        return len(self.bases)

    def is_exact(self):
        scalars = list(self.bases) + (list(self.tail) if self.tail else [])
        return all(isinstance(b, (int, Fraction)) for b in scalars)

    def expanded(self):
        """Split the tail difference into two plain specs (hi, lo)."""
        if self.tail is None:
            return (self,)
        alpha, gamma = self.tail
        hi = list(self.bases)
        lo = list(self.bases)
        hi[-1] = hi[-1] * alpha
        lo[-1] = lo[-1] * gamma
        return (FactorSpec(tuple(hi), self.powers),
                FactorSpec(tuple(lo), self.powers))


@dataclass(frozen=True)
class QKernelSpec:
    """Chain sum coupled to the block statistic Q(s).

    ``MEAN_FULL`` sums over chains of length |s|+1 with the binomial-ratio
    kernel and weight a^{n_{|s|+1}}; ``MEAN_INF`` sums over chains of length
    |s| with kernel 1/((Q+1)(Q+n_{|s|}+1)) and no 1/n_{|s|} factor.
    """

    s: Composition
    kind: str
    a: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "s", as_composition(self.s))
        if self.kind not in ("MEAN_FULL", "MEAN_INF"):
            raise DomainError(f"unknown kernel kind {self.kind!r}")

    @property
    def chain_length(self):
        return self.s.weight + (1 if self.kind == "MEAN_FULL" else 0)


@dataclass(frozen=True)
class TruncationSchedule:
    start: int = 64
    growth: int = 2
    max_n: int = 2 ** 20
    tolerance: float = 1e-8
    extrapolate: bool = False

    def __post_init__(self):
        if self.start < 1 or self.growth < 2 or self.tolerance <= 0:
            raise DomainError("invalid truncation schedule")

    def levels(self):
        n = self.start
        while n <= self.max_n:
            yield n
            n *= self.growth


def _factor_tables(spec: FactorSpec, N: int):
    """factors[i][j] = bases[i]^j / j^{powers[i]} for j = 1..N (index j-1),
    with the tail difference folded into the last index."""
    exact = spec.is_exact()
    one = Fraction(1) if exact else 1.0
    tables = []
    for i, (base, power) in enumerate(zip(spec.bases, spec.powers)):
        b = Fraction(base) if exact else float(base)
        col = []
        acc = one
        for j in range(1, N + 1):
            acc = acc * b
            denom = (Fraction(j) ** power if exact else float(j) ** power) if power else one
            col.append(acc / denom)
        tables.append(col)
    if spec.tail is not None:
        alpha, gamma = spec.tail
        if exact:
            alpha, gamma = Fraction(alpha), Fraction(gamma)
        else:
            alpha, gamma = float(alpha), float(gamma)
        pa, pg = one, one
        last = tables[-1]
        for j in range(N):
            pa = pa * alpha
            pg = pg * gamma
            last[j] = last[j] * (pa - pg)
    return tables


def naive_chain_sum(spec: FactorSpec, N: int, budget=NAIVE_CHAIN_BUDGET):
    """Direct enumeration of the chain sum truncated at n_1 <= N.

    Chains are visited in colexicographic order of the reversed
    (nondecreasing) tuple, so partial sums are reproducible.  Refuses to
    enumerate more than ``budget`` chains.
    """
    L = spec.length
    count = binomial(N + L - 1, L)
    if count > budget:
        raise BudgetExceededError(f"{count} chains exceed budget {budget}")
    tables = _factor_tables(spec, N)
    total = Fraction(0) if spec.is_exact() else 0.0
    # combo is nondecreasing; the chain read in reverse pairs combo[k] with
    # the factor of chain position L-1-k.
    rev_tables = tables[::-1]
    for combo in combinations_with_replacement(range(1, N + 1), L):
        term = rev_tables[0][combo[0] - 1]
        for k in range(1, L):
            term = term * rev_tables[k][combo[k] - 1]
        total += term
    return total


def _prefix_products(bases):
    out = []
    acc = 1
    for b in bases:
        acc = acc * b
        out.append(acc)
    return out


def _dp_exact(spec: FactorSpec, N: int):
    L = spec.length
    acc = [Fraction(0)] * L
    powvals = [Fraction(1)] * L
    tail = spec.tail
    bases = [Fraction(b) for b in spec.bases]
    if tail is not None:
        alpha, gamma = Fraction(tail[0]), Fraction(tail[1])
        pa = Fraction(1)
        pg = Fraction(1)
    for j in range(1, N + 1):
        jp = [Fraction(j) ** p if p else Fraction(1) for p in spec.powers]
        powvals[L - 1] *= bases[L - 1]
        last_term = powvals[L - 1] / jp[L - 1]
        if tail is not None:
            pa *= alpha
            pg *= gamma
            last_term *= pa - pg
        acc[L - 1] += last_term
        for i in range(L - 2, -1, -1):
            powvals[i] *= bases[i]
            acc[i] += powvals[i] * acc[i + 1] / jp[i]
    return acc[0]


def _dp_float_partials(spec: FactorSpec, N: int, precision_bits=53):
    """Float DP returning the cumulative value at every n_1 <= N.

    Uses the gap rewriting prod base_i^{n_i} = prod B_i^{n_i - n_{i+1}} *
    B_L^{n_L} with B_i the prefix products, so every carried quantity stays
    bounded whenever all |B_i| <= 1 (bases > 1 paired against earlier bases
    < 1).  Unpaired specs fall back to the plain prefix DP with a shared
    exponent rescale once magnitudes pass 2^(precision/2).
    """
    runs = spec.expanded()
    totals = np.zeros(N + 1)
    for sign, run in zip((1.0, -1.0), runs):
        bases = np.array([float(b) for b in run.bases])
        powers = np.array(run.powers, dtype=np.float64)
        B = np.cumprod(bases)
        j = np.arange(1, N + 1, dtype=np.float64)
        L = len(bases)
        if np.max(np.abs(B)) <= 1.0 + PAIRING_SLACK:
            with np.errstate(under="ignore"):
                D = np.power(B[-1], j) / j ** powers[-1]
                for i in range(L - 2, -1, -1):
                    C = lfilter([1.0], [1.0, -B[i]], D)
                    D = C / j ** powers[i]
                totals[1:] += sign * np.cumsum(D)
        else:
            totals[1:] += sign * _dp_float_scaled(run, N, precision_bits)
    return totals


def _dp_float_scaled(run: FactorSpec, N: int, precision_bits):
    """Plain prefix DP with a shared power-of-two exponent per layer.

    Fallback for specs whose prefix products cannot be bounded (an unpaired
    base above 1): the truncated value is finite but intermediate layers can
    overflow doubles.  Once a layer's running magnitude passes
    2^(precision/2) the whole layer is shifted down and the shift is applied
    back at the end; a final result beyond double range raises
    :class:`RescaleRequiredError`.
    """
    import math

    guard = math.ldexp(1.0, int(precision_bits) // 2)
    bases = [float(b) for b in run.bases]
    powers = run.powers
    L = len(bases)
    shift = 0

    def layer(base, power, inner):
        """Cumulative m -> sum_{j<=m} base^j / j^power * inner[j-1]."""
        nonlocal shift
        out = np.empty(N)
        bp = 1.0
        acc = 0.0
        local = 0
        for idx in range(N):
            bp *= base
            term = bp / float(idx + 1) ** power
            if inner is not None:
                term *= inner[idx]
            acc += term
            if abs(acc) > guard or abs(bp) > guard:
                out[: idx + 1] = np.ldexp(out[: idx + 1], -256)
                acc = math.ldexp(acc, -256)
                bp = math.ldexp(bp, -256)
                local += 256
            out[idx] = acc
        shift += local
        return out

    G = layer(bases[-1], powers[-1], None)
    for i in range(L - 2, -1, -1):
        G = layer(bases[i], powers[i], G)
    out = np.ldexp(G, shift) if shift else G
    if not np.all(np.isfinite(out)):
        raise RescaleRequiredError("scaled prefix DP overflowed double range")
    return out


def dp_chain_sum(spec: FactorSpec, N: int):
    """Prefix-sum DP value of the chain sum truncated at n_1 <= N.

    Exact rational specs run in exact arithmetic; float specs run the paired
    difference DP (see :func:`_dp_float_partials`).
    """
    if spec.is_exact():
        return _dp_exact(spec, N)
    return float(_dp_float_partials(spec, N)[N])


def dp_chain_partials(spec: FactorSpec, N: int):
    """Cumulative float values at every truncation 1..N (index 0 unused)."""
    return _dp_float_partials(spec, N)


# ---------------------------------------------------------------------------
# Q-coupled kernels
# ---------------------------------------------------------------------------

def _mean_full_kernel_exact(m, q_stat, a):
    """sum_{t=1}^{m} C(m,t)/C(q+m,t) * a^t, divided by (q+m+1)."""
    total = Fraction(0)
    apow = Fraction(1)
    for t in range(1, m + 1):
        apow *= a
        total += Fraction(binomial(m, t), binomial(q_stat + m, t)) * apow
    return total / (q_stat + m + 1)


def dp_q_naive(kernel: QKernelSpec, N: int, budget=NAIVE_CHAIN_BUDGET):
    """Direct enumeration of the Q-coupled sum; the oracle for dp_q_coupled."""
    s = kernel.s
    L = kernel.chain_length
    count = binomial(N + L - 1, L)
    if count > budget:
        raise BudgetExceededError(f"{count} chains exceed budget {budget}")
    a = Fraction(kernel.a)
    total = Fraction(0)
    for combo in combinations_with_replacement(range(1, N + 1), L):
        chain = combo[::-1]
        base_chain = chain[: s.weight]
        q_stat = q_of(s, base_chain)
        denom = Fraction(1)
        if kernel.kind == "MEAN_FULL":
            for idx in base_chain:
                denom *= idx
            t = chain[-1]
            m = base_chain[-1]
            if t > m:
                continue
            term = (Fraction(binomial(m, t), binomial(q_stat + m, t)) * a ** t
                    / ((q_stat + m + 1) * denom))
        else:
            for idx in base_chain[:-1]:
                denom *= idx
            m = base_chain[-1]
            term = Fraction(1, (q_stat + 1) * (q_stat + m + 1)) / denom
        total += term
    return total


def _q_dp_exact(kernel: QKernelSpec, N: int):
    """States {(chain value m, partial Q): sum of 1/(n_1...n_i)} after the
    last position of the length-|s| chain."""
    signs = chain_q_signs(kernel.s)
    states = {}
    for m in range(1, N + 1):
        q0 = m if signs[0] > 0 else 0
        states[(m, q0)] = Fraction(1, m)
    for sg in signs[1:]:
        by_q = {}
        for (m, q), w in states.items():
            row = by_q.setdefault(q, {})
            row[m] = row.get(m, Fraction(0)) + w
        new = {}
        for q, row in by_q.items():
            suffix = Fraction(0)
            # next value m' admits any previous value >= m'
            for m in range(N, 0, -1):
                suffix += row.get(m, Fraction(0))
                if suffix == 0:
                    continue
                key = (m, q + sg * m)
                new[key] = new.get(key, Fraction(0)) + suffix / m
        states = new
    return states


def dp_q_coupled(kernel: QKernelSpec, N: int, float_mode=None):
    """Q-coupled chain sum truncated at n_1 <= N.

    DP over (position, chain value, partial Q) with suffix-sum acceleration;
    the partial-Q range never exceeds N, so the state count is O(N^2 * |s|)
    and is refused beyond the state budget.
    """
    s = kernel.s
    n_states = N * N * max(1, s.weight)
    if n_states > Q_STATE_BUDGET:
        raise BudgetExceededError(
            f"Q-coupled DP needs ~{n_states} states, over budget {Q_STATE_BUDGET}")
    if float_mode is None:
        float_mode = not isinstance(kernel.a, (int, Fraction))
    if not float_mode:
        states = _q_dp_exact(kernel, N)
        a = Fraction(kernel.a)
        total = Fraction(0)
        for (m, q), w in states.items():
            if kernel.kind == "MEAN_FULL":
                total += w * _mean_full_kernel_exact(m, q, a)
            else:
                # MEAN_INF carries no 1/n_L factor: multiply it back out
                total += w * m / Fraction((q + 1) * (q + m + 1))
        return total
    return _q_dp_float(kernel, N)


def _q_dp_float(kernel: QKernelSpec, N: int):
    signs = chain_q_signs(kernel.s)
    m = np.arange(1, N + 1, dtype=np.float64)
    A = np.zeros((N, N + 1))
    if signs[0] > 0:
        A[np.arange(N), np.arange(1, N + 1)] = 1.0 / m
    else:
        A[:, 0] = 1.0 / m
    for sg in signs[1:]:
        S = np.cumsum(A[::-1], axis=0)[::-1]
        A = np.zeros_like(S)
        if sg == 0:
            A = S / m[:, None]
        elif sg > 0:
            for mv in range(1, N + 1):
                A[mv - 1, mv:] = S[mv - 1, : N + 1 - mv] / mv
        else:
            for mv in range(1, N + 1):
                A[mv - 1, : N + 1 - mv] = S[mv - 1, mv:] / mv
    q = np.arange(0, N + 1, dtype=np.float64)
    if kernel.kind == "MEAN_INF":
        K = m[:, None] / ((q[None, :] + 1.0) * (q[None, :] + m[:, None] + 1.0))
        return float(np.sum(A * K))
    # MEAN_FULL: fold the last index t with the binomial-ratio kernel.
    a = float(kernel.a)
    total = 0.0
    for mv in range(1, N + 1):
        row = A[mv - 1]
        nz = np.nonzero(row)[0]
        if len(nz) == 0:
            continue
        for qv in nz:
            # K = sum_t C(m,t)/C(q+m,t) a^t, iteratively via term ratios
            term = a * mv / (qv + mv)
            acc = term
            for t in range(2, mv + 1):
                term *= a * (mv - t + 1) / (qv + mv - t + 1)
                acc += term
                if abs(term) < 1e-18 * max(1.0, abs(acc)):
                    break
            total += row[qv] * acc / (qv + mv + 1)
    return total


def adaptive_sum(evaluator, schedule: TruncationSchedule, tail="auto",
                 cost_per_level=None, noise_floor=None, min_samples=7):
    """Evaluate a truncated-sum family over the schedule's ladder.

    ``evaluator(N)`` returns the truncation at n_1 <= N.  With
    ``schedule.extrapolate`` (or ``tail="polynomial"``) window extrapolants
    drive convergence; otherwise the geometric test |v(gN) - v(N)| <= tol/4
    with one extra safety level is used.  Returns an :class:`EvalResult`
    whose ``converged`` flag is False when the ladder hits ``max_n``.
    """
    tol = schedule.tolerance
    polynomial = schedule.extrapolate or tail == "polynomial"
    levels = []
    values = []
    terms = 0
    geo_hits = 0

    def floor():
        if noise_floor is not None:
            return noise_floor
        # double-precision ladder values carry relative rounding noise that
        # the window solve amplifies; never claim estimates below this
        return 1e-12 * (1.0 + abs(float(values[-1])))

    for N in schedule.levels():
        levels.append(N)
        values.append(evaluator(N))
        terms += cost_per_level(N) if cost_per_level else N
        if len(values) < 2:
            continue
        if polynomial:
            # shallow windows can transiently agree while still biased; only
            # trust the extrapolation once the model order is saturated
            if len(values) < min_samples:
                continue
            fit = best_extrapolant(levels, values, noise_floor=floor())
            if fit is None:
                continue
            value, err = fit
            if err <= tol:
                return EvalResult(BigReal(value), BigReal(err), terms, N, True)
        else:
            diff = abs(float(values[-1]) - float(values[-2]))
            if diff <= tol / 4:
                geo_hits += 1
                if geo_hits >= 2:  # one extra level past the first hit
                    return EvalResult(BigReal(values[-1]), BigReal(diff), terms, N, True)
            else:
                geo_hits = 0
    # budget exhausted
    if polynomial and len(values) >= 4:
        fit = best_extrapolant(levels, values, noise_floor=floor())
        if fit is not None:
            value, err = fit
            return EvalResult(BigReal(value), BigReal(err), terms, levels[-1], False)
    err = abs(float(values[-1]) - float(values[-2])) if len(values) > 1 else float("inf")
    return EvalResult(BigReal(values[-1]), BigReal(err), terms, levels[-1], False)
