"""Exact-rational evaluators for the finite-sum identities: generalized
harmonic numbers, nested harmonic-star values, binomially weighted averages
of them, their chain-sum transforms, and the arithmetic-mean identities.

Every function here takes rational parameters and returns exact
:class:`fractions.Fraction` values, so identity checks compare with ``==``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .compositions import Composition, as_composition
from .kernel import BudgetExceededError, DomainError, binomial

_NAIVE_CHAIN_BUDGET = 10 ** 7


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise DomainError(f"exact evaluators need rational inputs, got {type(x)!r}")


def gen_harmonic(k: int, s: int, a) -> Fraction:
    """Generalized harmonic number sum_{j=1}^{k} a^j / j^s (0 for k = 0)."""
    a = _frac(a)
    total = Fraction(0)
    power = Fraction(1)
    for j in range(1, k + 1):
        power *= a
        total += power / Fraction(j) ** s
    return total


def mhsv_all(n: int, s, a) -> list:
    """Harmonic-star values zeta*_k(s; a) for every k = 0..n, in one pass.

    Uses the nested prefix-sum scheme: the innermost cumulative sum carries
    a^j / j^{s_d}, each outer layer divides by j^{s_i} and accumulates.  Cost
    O(n * depth) exact operations.
    """
    s = as_composition(s)
    a = _frac(a)
    if n < 0:
        raise DomainError("n must be >= 0")
    # layer[i][j] built incrementally in j; only cumulative values are kept.
    d = s.depth
    acc = [Fraction(0)] * d
    out = [Fraction(0)]
    power = Fraction(1)
    for j in range(1, n + 1):
        power *= a
        term = power / Fraction(j) ** s.parts[d - 1]
        acc[d - 1] += term
        for i in range(d - 2, -1, -1):
            acc[i] += acc[i + 1] / Fraction(j) ** s.parts[i]
        out.append(acc[0])
    return out


def mhsv(k: int, s, a) -> Fraction:
    """Harmonic-star value zeta*_k(s; a), i.e. the nested sum over
    nonincreasing chains k >= n_1 >= ... >= n_d >= 1 of a^{n_d} / prod n_i^{s_i}."""
    return mhsv_all(k, s, a)[k]


def mhsv_naive(k: int, s, a) -> Fraction:
    """Direct chain enumeration of zeta*_k(s; a); oracle for small k."""
    s = as_composition(s)
    a = _frac(a)
    d = s.depth
    if binomial(k + d - 1, d) > _NAIVE_CHAIN_BUDGET:
        raise BudgetExceededError("chain enumeration too large")
    total = Fraction(0)
    for combo in combinations_with_replacement(range(1, k + 1), d):
        chain = combo[::-1]  # nonincreasing
        term = a ** chain[-1]
        for idx, part in zip(chain, s.parts):
            term /= Fraction(idx) ** part
        total += term
    return total


def mneimneh_lhs(n: int, s, a, p) -> Fraction:
    """Binomially weighted average sum_{k=1}^{n} C(n,k) p^k (1-p)^{n-k} zeta*_k(s; a)."""
    p = _frac(p)
    a = _frac(a)
    stars = mhsv_all(n, s, a)
    q = 1 - p
    total = Fraction(0)
    for k in range(1, n + 1):
        total += binomial(n, k) * p ** k * q ** (n - k) * stars[k]
    return total


def transform_bases(s, p) -> tuple:
    """Per-index bases of the chain-sum transform of the weighted average.

    Index i carries base (1-p) when it opens a block of size >= 2, 1/(1-p)
    when it closes one, and 1 otherwise; the product over a chain equals
    (1-p)^{Q(s)}.  Requires p != 1.
    """
    s = as_composition(s)
    p = _frac(p)
    if p == 1:
        raise DomainError("transform bases undefined at p = 1")
    q = 1 - p
    qinv = Fraction(1) / q
    bases = []
    for part in s.parts:
        if part == 1:
            bases.append(Fraction(1))
        else:
            bases.append(q)
            bases.extend([Fraction(1)] * (part - 2))
            bases.append(qinv)
    return tuple(bases)


def _chain_dp(bases, n: int) -> Fraction:
    """Sum over n >= n_1 >= ... >= n_L >= 1 of prod bases[i]^{n_i} / n_i."""
    L = len(bases)
    acc = [Fraction(0)] * L
    powers = [Fraction(1)] * L
    for j in range(1, n + 1):
        jf = Fraction(j)
        powers[L - 1] *= bases[L - 1]
        acc[L - 1] += powers[L - 1] / jf
        for i in range(L - 2, -1, -1):
            powers[i] *= bases[i]
            acc[i] += powers[i] * acc[i + 1] / jf
    return acc[0]


def main_rhs(n: int, s, a, p) -> Fraction:
    """Chain-sum transform of the weighted harmonic-star average:

        sum over n >= n_1 >= ... >= n_{|s|} >= 1 of
        (1-p)^{Q(s)} / (n_1 ... n_{|s|}) * [(1-p+ap)^{n_|s|} - (1-p)^{n_|s|}].

    At p = 1 the separable rewriting is unavailable and the sum collapses to
    zeta*_n(s; a); that degenerate value is returned directly.
    """
    s = as_composition(s)
    a = _frac(a)
    p = _frac(p)
    if p == 1:
        return mhsv(n, s, a)
    bases = list(transform_bases(s, p))
    alpha = 1 - p + a * p
    gamma = 1 - p
    hi = bases[:]
    hi[-1] = bases[-1] * alpha
    lo = bases[:]
    lo[-1] = bases[-1] * gamma
    return _chain_dp(hi, n) - _chain_dp(lo, n)


def main_rhs_literal(n: int, s, a, p) -> Fraction:
    """Direct enumeration of the transform sum with the 0^0 = 1 convention.

    Valid at every p including the degenerate endpoints; oracle for small n.
    """
    s = as_composition(s)
    a = _frac(a)
    p = _frac(p)
    L = s.weight
    if binomial(n + L - 1, L) > _NAIVE_CHAIN_BUDGET:
        raise BudgetExceededError("chain enumeration too large")

    def power(base: Fraction, e: int) -> Fraction:
        if e == 0:
            return Fraction(1)  # 0^0 = 1 by convention
        return base ** e

    q = 1 - p
    alpha = 1 - p + a * p
    total = Fraction(0)
    bounds = s.block_bounds()
    for combo in combinations_with_replacement(range(1, n + 1), L):
        chain = combo[::-1]
        w = Fraction(1)
        for start, end in bounds:
            w *= power(q, chain[start - 1] - chain[end - 1])
        last = chain[-1]
        w *= power(alpha, last) - power(q, last)
        for idx in chain:
            w /= idx
        total += w
    return total


def classic_binomial_rhs(n: int, p) -> Fraction:
    """Partial sum sum_{k=1}^{n} (1 - (1-p)^k) / k, the depth-1, order-1
    transform of the weighted harmonic average."""
    p = _frac(p)
    q = 1 - p
    total = Fraction(0)
    power = Fraction(1)
    for k in range(1, n + 1):
        power *= q
        total += (1 - power) / Fraction(k)
    return total


def depth1_rhs(n: int, s1: int, a, p) -> Fraction:
    """Depth-1 transform: sum over n >= n_1 >= ... >= n_s >= 1 of
    (1-p)^{n_1} / (n_1...n_s) * ((1 + ap/(1-p))^{n_s} - 1).  Needs p != 1."""
    a = _frac(a)
    p = _frac(p)
    if p == 1:
        raise DomainError("depth-1 transform needs p != 1")
    q = 1 - p
    ratio = 1 + a * p / q
    if s1 >= 2:
        bases_hi = [q] + [Fraction(1)] * (s1 - 2) + [ratio]
        bases_lo = [q] + [Fraction(1)] * (s1 - 1)
    else:
        bases_hi = [q * ratio]
        bases_lo = [q]
    return _chain_dp(bases_hi, n) - _chain_dp(bases_lo, n)


def ones_rhs(n: int, d: int, a, p) -> Fraction:
    """All-ones collapse of the transform:
    sum over chains of [(1-p+ap)^{n_d} - (1-p)^{n_d}] / (n_1...n_d)."""
    a = _frac(a)
    p = _frac(p)
    alpha = 1 - p + a * p
    gamma = 1 - p
    ones = [Fraction(1)] * d
    hi = ones[:]
    hi[-1] = alpha
    lo = ones[:]
    lo[-1] = gamma
    return _chain_dp(hi, n) - _chain_dp(lo, n)


def power_weight_example_sides(n: int) -> tuple:
    """Both sides of the (3,2)-at-(-1,1/2) instance written with explicit
    alternating inner sums:

        lhs = sum_k C(n,k) * sum_{j<=k} [sum_{i<=j} (-1)^{i-1}/i^2] / j^3
        rhs = sum over chains of length 5 of 2^{n - n_1 + n_3 - n_4} / (n_1...n_5)
    """
    # lhs: nested alternating sums, assembled incrementally.
    inner = Fraction(0)   # sum_{i<=j} (-1)^{i-1}/i^2
    middle = Fraction(0)  # sum_{j<=k} inner_j / j^3
    lhs = Fraction(0)
    middles = [Fraction(0)]
    sign = 1
    for j in range(1, n + 1):
        inner += Fraction(sign, j * j)
        sign = -sign
        middle += inner / Fraction(j) ** 3
        middles.append(middle)
    for k in range(1, n + 1):
        lhs += binomial(n, k) * middles[k]
    # rhs: separable chain DP with bases (1/2, 1, 2, 1/2, 1) scaled by 2^n.
    bases = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(1)]
    rhs = Fraction(2) ** n * _chain_dp(bases, n)
    return lhs, rhs


def dilcher_plus(n: int, d: int, a) -> tuple:
    """Signed binomial transform of all-ones harmonic-star values:

        lhs = sum_{k=1}^{n} C(n,k) (-1)^k zeta*_k({1}_d; a)
        rhs = ((1-a)^n - 1) / n^d
    """
    if n < 1 or d < 1:
        raise DomainError("need n, d >= 1")
    a = _frac(a)
    stars = mhsv_all(n, Composition((1,) * d), a)
    lhs = Fraction(0)
    for k in range(1, n + 1):
        lhs += binomial(n, k) * (-1) ** k * stars[k]
    rhs = ((1 - a) ** n - 1) / Fraction(n) ** d
    return lhs, rhs


def signed_ones_cases(n: int, d: int) -> tuple:
    """Alternating transform at a = 2: lhs = sum C(n,k)(-1)^{k-1} zeta*_k({1}_d; 2);
    rhs is 0 for even n and 2/n^d for odd n."""
    lhs, rhs_plus = dilcher_plus(n, d, 2)
    return -lhs, -rhs_plus


def odd_binom_sum(n: int, d: int) -> tuple:
    """Odd-index binomial sum against the a = 2 harmonic-star value:

        lhs = sum_{k=1}^{floor((n+1)/2)} C(n, 2k-1) / (2k-1)^d
        rhs = zeta*_n({1}_d; 2) / 2
    """
    if n < 1 or d < 1:
        raise DomainError("need n, d >= 1")
    lhs = Fraction(0)
    for k in range(1, (n + 1) // 2 + 1):
        lhs += Fraction(binomial(n, 2 * k - 1)) / Fraction(2 * k - 1) ** d
    rhs = mhsv(n, Composition((1,) * d), 2) / 2
    return lhs, rhs


def dilcher_classic(n: int, d: int) -> tuple:
    """Classical alternating binomial sum:

        lhs = sum_{k=1}^{n} C(n,k) (-1)^{k-1} / k^d,   rhs = zeta*_n({1}_d).
    """
    if n < 1 or d < 1:
        raise DomainError("need n, d >= 1")
    lhs = Fraction(0)
    for k in range(1, n + 1):
        lhs += Fraction(binomial(n, k) * (-1) ** (k - 1)) / Fraction(k) ** d
    rhs = mhsv(n, Composition((1,) * d), 1)
    return lhs, rhs


def mean_lhs(n: int, s, a) -> Fraction:
    """Arithmetic mean (1/(n+1)) sum_{k=1}^{n} zeta*_k(s; a)."""
    if n < 1:
        raise DomainError("need n >= 1")
    stars = mhsv_all(n, s, a)
    return sum(stars[1:], Fraction(0)) / (n + 1)


def mean_rhs(n: int, s, a) -> Fraction:
    """Chain-sum form of the arithmetic mean: the (|s|+1)-fold chain sum with
    the binomial-ratio kernel C(n_{|s|}, n_{|s|+1}) / C(Q+n_{|s|}, n_{|s|+1}),
    the weight a^{n_{|s|+1}}, and the factor 1/(Q + n_{|s|} + 1)."""
    from .chains import QKernelSpec, dp_q_coupled

    if n < 1:
        raise DomainError("need n >= 1")
    return dp_q_coupled(QKernelSpec(as_composition(s), "MEAN_FULL", _frac(a)), n)


def mean_example1_rhs(n: int, d: int) -> Fraction:
    """All-ones mean collapse: sum over n >= n_1 >= ... >= n_d >= 1 of
    1 / (n_1 ... n_{d-1} (n_d + 1)), the product being empty for d = 1."""
    if n < 1 or d < 1:
        raise DomainError("need n, d >= 1")
    acc = [Fraction(0)] * d
    for j in range(1, n + 1):
        acc[d - 1] += Fraction(1, j + 1)
        for i in range(d - 2, -1, -1):
            acc[i] += acc[i + 1] / j
    return acc[0]


def mean_sum_hk_sides(n: int) -> tuple:
    """Partial harmonic sums: lhs = sum_{k=1}^{n} H_k, rhs = (n+1)(H_{n+1} - 1)."""
    if n < 1:
        raise DomainError("need n >= 1")
    h = Fraction(0)
    lhs = Fraction(0)
    for k in range(1, n + 1):
        h += Fraction(1, k)
        lhs += h
    h_next = h + Fraction(1, n + 1)
    return lhs, (n + 1) * (h_next - 1)


def pan_xu_composition(r: int, u, m) -> Composition:
    """Composition ({1}_{u_1}, m_1+2, ..., {1}_{u_r}, m_r+2, {1}_{u_{r+1}})."""
    u = tuple(int(v) for v in u)
    m = tuple(int(v) for v in m)
    if len(u) != r + 1 or len(m) != r:
        raise DomainError(f"need len(u) == r+1 and len(m) == r, got {len(u)}, {len(m)}")
    parts = []
    for i in range(r):
        parts.extend([1] * u[i])
        parts.append(m[i] + 2)
    parts.extend([1] * u[r])
    if not parts:
        raise DomainError("composition is empty (r = 0 with u_1 = 0)")
    return Composition(tuple(parts))


def pan_xu_check(n: int, r: int, u, m, x, y) -> tuple:
    """Both sides of the normalized two-variable binomial identity:

        lhs = sum_{k=1}^{n} C(n,k) x^k y^{n-k} zeta*_k(s)
        rhs = (x+y)^n * transform of the same composition at a = 1, p = x/(x+y)

    with s = ({1}_{u_1}, m_1+2, ..., m_r+2, {1}_{u_{r+1}}).
    """
    x = _frac(x)
    y = _frac(y)
    if x + y == 0:
        raise DomainError("need x + y != 0")
    comp = pan_xu_composition(r, u, m)
    stars = mhsv_all(n, comp, 1)
    lhs = Fraction(0)
    for k in range(1, n + 1):
        lhs += binomial(n, k) * x ** k * y ** (n - k) * stars[k]
    p = x / (x + y)
    rhs = (x + y) ** n * main_rhs(n, comp, 1, p)
    return lhs, rhs


def aux_rhs(variant: str, n: int, a, x) -> Fraction:
    """Closed forms of the auxiliary integrals:

        aux1 = sum_{j=1}^{n} ((1+ax)^j - 1) / j
        aux2 = sum_{j=1}^{n} ((1+x)^j - (1+x-ax)^j) / j
    """
    if n < 1:
        raise DomainError("need n >= 1")
    a = _frac(a)
    x = _frac(x)
    total = Fraction(0)
    if variant == "aux1":
        base = 1 + a * x
        power = Fraction(1)
        for j in range(1, n + 1):
            power *= base
            total += (power - 1) / Fraction(j)
        return total
    if variant == "aux2":
        b1 = 1 + x
        b2 = 1 + x - a * x
        p1 = Fraction(1)
        p2 = Fraction(1)
        for j in range(1, n + 1):
            p1 *= b1
            p2 *= b2
            total += (p1 - p2) / Fraction(j)
        return total
    raise DomainError(f"unknown variant {variant!r}")
