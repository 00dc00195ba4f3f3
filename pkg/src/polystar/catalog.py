"""Declarative registry of every verified identity: parameter schemas,
validity domains, evaluator bindings, default verification grids, and
deterministic fuzzing.

Exact identities compare with ``==`` on rationals; numeric ones compare
``|lhs - rhs|`` against a tolerance after evaluating both sides to a quarter
of it; quadrature ones integrate one side numerically against an exact sum.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import exact, polylog
from .chains import PairingUnavailableError
from .compositions import Composition, ShapeBlocks, as_composition, domain_check
from .kernel import (BigReal, DomainError, EvalResult, adaptive_quadrature,
                     binom_ratio_sum)

DEFAULT_NUMERIC_TOL = 1e-8


@dataclass(frozen=True)
class IdentityDescriptor:
    id: str
    anchor: str
    mode: str  # EXACT | NUMERIC | QUADRATURE
    param_types: dict
    constraint_id: str = None
    default_tol: float = None

    def __post_init__(self):
        if self.mode not in ("EXACT", "NUMERIC", "QUADRATURE"):
            raise DomainError(f"bad mode {self.mode!r}")


@dataclass
class IdentityReport:
    id: str
    params: dict
    mode: str
    lhs: object = None
    rhs: object = None
    abs_diff: object = None
    rel_diff: float = None
    tolerance: float = None
    passed: bool = None
    skipped: bool = False
    skip_reason: str = None
    converged: bool = True
    cost: dict = field(default_factory=dict)
    anchor: str = ""

    @property
    def status(self):
        if self.skipped:
            return "skip"
        if not self.converged:
            return "not_converged"
        return "pass" if self.passed else "fail"

    def _fmt(self, v):
        if v is None:
            return None
        if isinstance(v, Fraction):
            return str(v)
        if isinstance(v, BigReal):
            return mpmath.nstr(v.value, 17)
        return repr(v)

    def to_json_dict(self):
        return {
            "id": self.id,
            "params": {k: str(v) for k, v in self.params.items()},
            "mode": self.mode,
            "lhs": self._fmt(self.lhs),
            "rhs": self._fmt(self.rhs),
            "abs_diff": self._fmt(self.abs_diff),
            "rel_diff": self.rel_diff,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "status": self.status,
            "anchor": self.anchor,
            "cost": self.cost,
        }


def _fr(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _all_compositions(max_weight):
    """Every composition of every weight up to max_weight."""
    out = []
    for w in range(1, max_weight + 1):
        for cuts in itertools.product((0, 1), repeat=w - 1):
            parts = []
            run = 1
            for c in cuts:
                if c:
                    parts.append(run)
                    run = 1
                else:
                    run += 1
            parts.append(run)
            out.append(Composition(tuple(parts)))
    return out


def _shapes(family, d_max, m_max, u_max, ud_values=None):
    shapes = []
    for d in range(1, d_max + 1):
        m_grid = itertools.product(range(m_max + 1), repeat=d)
        if family == "A":
            u_len = d - 1
            u_grid_fn = lambda: itertools.product(range(u_max + 1), repeat=u_len)
        else:
            u_len = d
            uds = ud_values or range(1, u_max + 1)
            u_grid_fn = lambda: (
                tuple(head) + (ud,)
                for head in itertools.product(range(u_max + 1), repeat=u_len - 1)
                for ud in uds)
        for m in m_grid:
            for u in u_grid_fn():
                shapes.append(ShapeBlocks(family, m, tuple(u)))
    return shapes


def _rational(rng, lo, hi, max_den=12):
    den = rng.randint(1, max_den)
    lo_n = int(_fr(lo) * den)
    hi_n = int(_fr(hi) * den)
    return Fraction(rng.randint(lo_n, hi_n), den)


def _rational_excluding(rng, lo, hi, exclude):
    while True:
        v = _rational(rng, lo, hi)
        if v not in exclude:
            return v


class NonStopSampling(RuntimeError):
    """An in-domain fuzz sampler kept producing out-of-domain points."""


_A_GRID = (Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1), Fraction(2))
_P_GRID = (Fraction(-1), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(2))
_DILCHER_A = (Fraction(-2), Fraction(-1), Fraction(0), Fraction(1, 2),
              Fraction(1), Fraction(2), Fraction(3))
_LI_AP = ((1, 0.3), (1, 0.5), (1, 0.7), (0.5, 0.5), (-1, 0.5))
_RED_A = (-1, 0, 0.25)
_RED_P = (0.5, 0.75)
_P3 = (0.3, 0.5, 0.7)


class _Entry:
    def __init__(self, descriptor, evaluate, grid, sample=None, domain=None):
        self.descriptor = descriptor
        self.evaluate = evaluate      # (params, tol, precision) -> (lhs, rhs)
        self.grid = grid              # () -> iterable of (params, tol or None)
        self.sample = sample          # (rng) -> params
        self.domain = domain          # (params) -> (ok, reason)


_REGISTRY: dict = {}


def _register(entry):
    if entry.descriptor.id in _REGISTRY:
        raise DomainError(f"duplicate identity id {entry.descriptor.id}")
    _REGISTRY[entry.descriptor.id] = entry


def _exact_pair(fn):
    def evaluate(params, tol, precision):
        return fn(params)
    return evaluate


# --- finite / exact identities ---------------------------------------------

_register(_Entry(
    IdentityDescriptor(
        "MNEIMNEH_ORIG",
        "sum_{k<=n} C(n,k) p^k (1-p)^(n-k) H_k = sum_{k<=n} (1-(1-p)^k)/k",
        "EXACT", {"n": "int", "p": "rational"}),
    _exact_pair(lambda pr: (exact.mneimneh_lhs(pr["n"], (1,), 1, pr["p"]),
                            exact.classic_binomial_rhs(pr["n"], pr["p"]))),
    lambda: ((dict(n=n, p=p), None) for n in range(1, 11)
             for p in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))),
    sample=lambda rng: dict(n=rng.randint(1, 15), p=_rational(rng, 0, 1)),
))

_register(_Entry(
    IdentityDescriptor(
        "GENCEV_D1",
        "weighted average of order-s harmonic numbers equals the depth-1 "
        "chain transform with factor (1-p)^(n_1) ((1+ap/(1-p))^(n_s) - 1)",
        "EXACT", {"n": "int", "s": "int", "a": "rational", "p": "rational"}),
    _exact_pair(lambda pr: (exact.mneimneh_lhs(pr["n"], (pr["s"],), pr["a"], pr["p"]),
                            exact.depth1_rhs(pr["n"], pr["s"], pr["a"], pr["p"]))),
    lambda: ((dict(n=n, s=s, a=a, p=p), None)
             for n in range(1, 9) for s in range(1, 5)
             for a in (Fraction(-1), Fraction(1, 2), Fraction(1), Fraction(2))
             for p in _P_GRID),
    sample=lambda rng: dict(n=rng.randint(1, 10), s=rng.randint(1, 4),
                            a=_rational(rng, -2, 2),
                            p=_rational_excluding(rng, -1, 2, (Fraction(1),))),
    domain=lambda pr: (pr["p"] != 1, "p = 1 excluded"),
))

_register(_Entry(
    IdentityDescriptor(
        "MAIN_TRANSFORM",
        "sum_{k<=n} C(n,k) p^k (1-p)^(n-k) zeta*_k(s;a) equals the chain sum of "
        "(1-p)^Q(s) [(1-p+ap)^(n_|s|) - (1-p)^(n_|s|)] / (n_1...n_|s|)",
        "EXACT", {"n": "int", "s": "composition", "a": "rational", "p": "rational"}),
    _exact_pair(lambda pr: (exact.mneimneh_lhs(pr["n"], pr["s"], pr["a"], pr["p"]),
                            exact.main_rhs(pr["n"], pr["s"], pr["a"], pr["p"]))),
    lambda: ((dict(n=n, s=s, a=a, p=p), None)
             for s in _all_compositions(4) for n in range(1, 11)
             for a in _A_GRID for p in _P_GRID),
    sample=lambda rng: dict(n=rng.randint(1, 10),
                            s=rng.choice(_all_compositions(4)),
                            a=_rational(rng, -2, 2), p=_rational(rng, -1, 2)),
))

_register(_Entry(
    IdentityDescriptor(
        "EX_FIRST",
        "sum_k C(n,k) sum_{j<=k} [sum_{i<=j} (-1)^(i-1)/i^2]/j^3 = "
        "sum over 5-chains of 2^(n-n_1+n_3-n_4)/(n_1...n_5)",
        "EXACT", {"n": "int"}),
    _exact_pair(lambda pr: exact.power_weight_example_sides(pr["n"])),
    lambda: ((dict(n=n), None) for n in range(1, 9)),
    sample=lambda rng: dict(n=rng.randint(1, 8)),
))

_register(_Entry(
    IdentityDescriptor(
        "MN1",
        "for s = {1}_d the chain transform collapses to "
        "sum [(1-p+ap)^(n_d) - (1-p)^(n_d)]/(n_1...n_d)",
        "EXACT", {"n": "int", "d": "int", "a": "rational", "p": "rational"}),
    _exact_pair(lambda pr: (exact.main_rhs(pr["n"], (1,) * pr["d"], pr["a"], pr["p"]),
                            exact.ones_rhs(pr["n"], pr["d"], pr["a"], pr["p"]))),
    lambda: ((dict(n=n, d=d, a=a, p=p), None)
             for d in range(1, 5) for n in range(1, 11)
             for a in (Fraction(-1), Fraction(1, 2), Fraction(1), Fraction(2))
             for p in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4),
                       Fraction(1), Fraction(2), Fraction(-1))),
    sample=lambda rng: dict(n=rng.randint(1, 10), d=rng.randint(1, 4),
                            a=_rational(rng, -2, 2), p=_rational(rng, -1, 2)),
))

_register(_Entry(
    IdentityDescriptor(
        "DILCHER_PLUS",
        "sum_{k<=n} C(n,k) (-1)^k zeta*_k({1}_d;a) = ((1-a)^n - 1)/n^d",
        "EXACT", {"n": "int", "d": "int", "a": "rational"}),
    _exact_pair(lambda pr: exact.dilcher_plus(pr["n"], pr["d"], pr["a"])),
    lambda: ((dict(n=n, d=d, a=a), None)
             for n in range(1, 26) for d in range(1, 6) for a in _DILCHER_A),
    sample=lambda rng: dict(n=rng.randint(1, 20), d=rng.randint(1, 4),
                            a=_rational(rng, -2, 3)),
))

_register(_Entry(
    IdentityDescriptor(
        "DILCHER_A2",
        "sum_{k<=n} C(n,k) (-1)^(k-1) zeta*_k({1}_d;2) = 0 (n even) or 2/n^d (n odd)",
        "EXACT", {"n": "int", "d": "int"}),
    _exact_pair(lambda pr: exact.signed_ones_cases(pr["n"], pr["d"])),
    lambda: ((dict(n=n, d=d), None) for n in range(1, 26) for d in range(1, 6)),
    sample=lambda rng: dict(n=rng.randint(1, 25), d=rng.randint(1, 5)),
))

_register(_Entry(
    IdentityDescriptor(
        "ODD_BINOM",
        "sum_{k<=floor((n+1)/2)} C(n,2k-1)/(2k-1)^d = zeta*_n({1}_d;2)/2",
        "EXACT", {"n": "int", "d": "int"}),
    _exact_pair(lambda pr: exact.odd_binom_sum(pr["n"], pr["d"])),
    lambda: ((dict(n=n, d=d), None) for n in range(1, 26) for d in range(1, 6)),
    sample=lambda rng: dict(n=rng.randint(1, 25), d=rng.randint(1, 5)),
))

_register(_Entry(
    IdentityDescriptor(
        "DILCHER_CLASSIC",
        "sum_{k<=n} C(n,k) (-1)^(k-1)/k^d = zeta*_n({1}_d)",
        "EXACT", {"n": "int", "d": "int"}),
    _exact_pair(lambda pr: exact.dilcher_classic(pr["n"], pr["d"])),
    lambda: ((dict(n=n, d=d), None) for n in range(1, 26) for d in range(1, 6)),
    sample=lambda rng: dict(n=rng.randint(1, 25), d=rng.randint(1, 5)),
))

_register(_Entry(
    IdentityDescriptor(
        "P_DEGENERATE",
        "the chain transform is 0 at p=0 and zeta*_n(s;a) at p=1 "
        "(0^0 = 1 convention)",
        "EXACT", {"n": "int", "s": "composition", "a": "rational", "p": "rational"}),
    _exact_pair(lambda pr: (exact.main_rhs(pr["n"], pr["s"], pr["a"], pr["p"]),
                            Fraction(0) if pr["p"] == 0
                            else exact.mhsv(pr["n"], pr["s"], pr["a"]))),
    lambda: ((dict(n=n, s=s, a=a, p=p), None)
             for s in _all_compositions(4) for n in range(1, 11)
             for a in _A_GRID for p in (Fraction(0), Fraction(1))),
    sample=lambda rng: dict(n=rng.randint(1, 10), s=rng.choice(_all_compositions(4)),
                            a=_rational(rng, -2, 2), p=Fraction(rng.choice((0, 1)))),
    domain=lambda pr: (pr["p"] in (0, 1), "p must be 0 or 1"),
))


def _aux_eval(variant):
    def evaluate(params, tol, precision):
        n, a, x = params["n"], _fr(params["a"]), _fr(params["x"])
        nf, af, xf = n, float(a), float(x)

        def integrand(t):
            if abs(t) < 1e-30:
                return nf * xf
            return ((1 + t * xf) ** nf - 1) / t

        lo, hi = (0, a) if variant == "aux1" else (1 - a, 1)
        q = adaptive_quadrature(integrand, lo, hi, tol / 4, precision=precision)
        rhs = exact.aux_rhs(variant, n, a, x)
        lhs = EvalResult(q, BigReal(tol / 4), 0, 0, True)
        return lhs, polylog._wrap_value(BigReal(rhs).value, 160)
    return evaluate


_AUX_GRID = [(dict(n=n, a=a, x=x), None)
             for n in range(1, 7)
             for a in (Fraction(1, 2), Fraction(1), Fraction(3, 2))
             for x in (Fraction(-1, 2), Fraction(1, 2), Fraction(1))]

_register(_Entry(
    IdentityDescriptor(
        "AUX1",
        "integral_0^a ((1+Ax)^n - 1)/A dA = sum_{j<=n} ((1+ax)^j - 1)/j",
        "QUADRATURE", {"n": "int", "a": "rational", "x": "rational"},
        default_tol=1e-10),
    _aux_eval("aux1"),
    lambda: iter(_AUX_GRID),
    sample=lambda rng: dict(n=rng.randint(1, 6), a=_rational(rng, 0, 2),
                            x=_rational(rng, -1, 1)),
))

_register(_Entry(
    IdentityDescriptor(
        "AUX2",
        "integral_{1-a}^1 ((1+Ax)^n - 1)/A dA = sum_{j<=n} ((1+x)^j - (1+x-ax)^j)/j",
        "QUADRATURE", {"n": "int", "a": "rational", "x": "rational"},
        default_tol=1e-10),
    _aux_eval("aux2"),
    lambda: iter(_AUX_GRID),
    sample=lambda rng: dict(n=rng.randint(1, 6), a=_rational(rng, 0, 2),
                            x=_rational(rng, -1, 1)),
))


def _pan_xu_grids():
    xy_pairs = ((Fraction(1), Fraction(1)), (Fraction(2), Fraction(1)),
                (Fraction(1), Fraction(-2)), (Fraction(1), Fraction(0)),
                (Fraction(0), Fraction(1)))
    for r in range(0, 3):
        for u in itertools.product(range(0, 3), repeat=r + 1):
            if r == 0 and u[0] == 0:
                continue  # empty composition
            for m in itertools.product(range(0, 2), repeat=r):
                for n in range(1, 9):
                    for x, y in xy_pairs:
                        yield dict(n=n, r=r, u=u, m=m, x=x, y=y), None


_register(_Entry(
    IdentityDescriptor(
        "PAN_XU",
        "sum_k C(n,k) x^k y^(n-k) zeta*_k({1}_(u_1),m_1+2,...,{1}_(u_(r+1))) = "
        "(x+y)^n times the chain transform at a=1, p=x/(x+y)",
        "EXACT", {"n": "int", "r": "int", "u": "intlist", "m": "intlist",
                  "x": "rational", "y": "rational"}),
    _exact_pair(lambda pr: exact.pan_xu_check(pr["n"], pr["r"], pr["u"], pr["m"],
                                              pr["x"], pr["y"])),
    _pan_xu_grids,
    sample=lambda rng: _pan_xu_sample(rng),
    domain=lambda pr: (_fr(pr["x"]) + _fr(pr["y"]) != 0, "x + y must be nonzero"),
))


def _pan_xu_sample(rng):
    r = rng.randint(0, 2)
    while True:
        u = tuple(rng.randint(0, 2) for _ in range(r + 1))
        if r > 0 or u[0] > 0:
            break
    m = tuple(rng.randint(0, 1) for _ in range(r))
    while True:
        x, y = _rational(rng, -2, 2), _rational(rng, -2, 2)
        if x + y != 0:
            return dict(n=rng.randint(1, 8), r=r, u=u, m=m, x=x, y=y)


_register(_Entry(
    IdentityDescriptor(
        "MEAN_FINITE",
        "(1/(n+1)) sum_{k<=n} zeta*_k(s;a) equals the (|s|+1)-chain sum with the "
        "binomial-ratio kernel C(n_|s|,n_(|s|+1))/C(Q+n_|s|,n_(|s|+1))",
        "EXACT", {"n": "int", "s": "composition", "a": "rational"}),
    _exact_pair(lambda pr: (exact.mean_lhs(pr["n"], pr["s"], pr["a"]),
                            exact.mean_rhs(pr["n"], pr["s"], pr["a"]))),
    lambda: ((dict(n=n, s=s, a=a), None)
             for s in _all_compositions(4) for n in range(1, 13)
             for a in (Fraction(-1), Fraction(1, 2), Fraction(1), Fraction(2))),
    sample=lambda rng: dict(n=rng.randint(1, 12), s=rng.choice(_all_compositions(4)),
                            a=_rational(rng, -2, 2)),
))

_register(_Entry(
    IdentityDescriptor(
        "MEAN_EX1",
        "(1/(n+1)) sum_{k<=n} zeta*_k({1}_d) = "
        "sum over d-chains of 1/(n_1...n_(d-1)(n_d+1))",
        "EXACT", {"n": "int", "d": "int"}),
    _exact_pair(lambda pr: (exact.mean_lhs(pr["n"], (1,) * pr["d"], 1),
                            exact.mean_example1_rhs(pr["n"], pr["d"]))),
    lambda: ((dict(n=n, d=d), None) for d in range(1, 5) for n in range(1, 13)),
    sample=lambda rng: dict(n=rng.randint(1, 12), d=rng.randint(1, 4)),
))

_register(_Entry(
    IdentityDescriptor(
        "MEAN_SUM_HK",
        "sum_{k<=n} H_k = (n+1)(H_(n+1) - 1)",
        "EXACT", {"n": "int"}),
    _exact_pair(lambda pr: exact.mean_sum_hk_sides(pr["n"])),
    lambda: ((dict(n=n), None) for n in range(1, 51)),
    sample=lambda rng: dict(n=rng.randint(1, 60)),
))

_register(_Entry(
    IdentityDescriptor(
        "BINOM_RATIO",
        "sum_{k<=m} C(m,k)/C(n,k) = m/(n+1-m)",
        "EXACT", {"m": "int", "n": "int"}),
    _exact_pair(lambda pr: (binom_ratio_sum(pr["m"], pr["n"]),
                            Fraction(pr["m"], pr["n"] + 1 - pr["m"]))),
    lambda: ((dict(m=m, n=n), None) for n in range(1, 26) for m in range(1, n + 1)),
    sample=lambda rng: (lambda n: dict(m=rng.randint(1, n), n=n))(rng.randint(1, 60)),
    domain=lambda pr: (1 <= pr["m"] <= pr["n"], "need 1 <= m <= n"),
))


# --- series identities (numeric) -------------------------------------------

def _series_eval(identity, shape_key="shape"):
    def evaluate(params, tol, precision):
        target = params.get(shape_key)
        a = params.get("a", 1)
        p = params["p"] if "p" in params else None
        return polylog.li_identity_sides(
            identity, target, a, p, tol, precision,
            check_domain=not params.get("_outside", False))
    return evaluate


def _series_domain_fn(identity):
    def check(params):
        p = params.get("p")
        if p is None:
            return False, "missing parameter p"
        a = params.get("a", 1)
        ok = polylog._series_domain(identity, _fr(a), _fr(p))
        return ok, "outside validity region"
    return check


_register(_Entry(
    IdentityDescriptor(
        "INTRO_SERIES",
        "Li_s(a) = Li*_{1..1}(1-p,{1}_(s-2),1+ap/(1-p)) - Li*_{1..1}(1-p,{1}_(s-1))",
        "NUMERIC", {"s": "int", "a": "float", "p": "float"},
        constraint_id="MAIN_AP", default_tol=1e-8),
    lambda params, tol, precision: polylog.li_identity_sides(
        "INTRO_SERIES", params["s"], params["a"], params["p"], tol, precision,
        check_domain=not params.get("_outside", False)),
    lambda: ((dict(s=s, a=a, p=p), None)
             for s in (2, 3, 4) for a, p in ((0.5, 0.5), (-1, 0.5), (1, 0.4))),
    sample=lambda rng: dict(s=rng.randint(2, 4),
                            a=float(_rational(rng, -1, 1)),
                            p=float(_rational(rng, 1, 9) + Fraction(1, 10))),
    domain=_series_domain_fn("INTRO_SERIES"),
))

_register(_Entry(
    IdentityDescriptor(
        "INTRO_RED_L",
        "Li*_{1..1}(1-p,{1}_(s-1)) = -Li_s(1-1/p)",
        "NUMERIC", {"s": "int", "p": "float"},
        constraint_id="RED_BOX", default_tol=1e-8),
    lambda params, tol, precision: polylog.li_identity_sides(
        "INTRO_RED_L", params["s"], 1, params["p"], tol, precision,
        check_domain=not params.get("_outside", False)),
    lambda: ((dict(s=s, p=p), None) for s in (2, 3, 4) for p in _RED_P),
    sample=lambda rng: dict(s=rng.randint(2, 4), p=0.5 + rng.random() * 0.45),
    domain=_series_domain_fn("INTRO_RED_L"),
))

_register(_Entry(
    IdentityDescriptor(
        "INTRO_RED_R",
        "Li*_{1..1}(1-p,{1}_(s-2),1+ap/(1-p)) = Li_s(a) - Li_s(1-1/p)",
        "NUMERIC", {"s": "int", "a": "float", "p": "float"},
        constraint_id="RED_BOX", default_tol=1e-8),
    lambda params, tol, precision: polylog.li_identity_sides(
        "INTRO_RED_R", params["s"], params["a"], params["p"], tol, precision,
        check_domain=not params.get("_outside", False)),
    lambda: ((dict(s=s, a=a, p=p), None)
             for s in (2, 3, 4) for a in _RED_A for p in _RED_P),
    sample=lambda rng: dict(s=rng.randint(2, 4), a=rng.uniform(-1, 1 / 3),
                            p=0.5 + rng.random() * 0.45),
    domain=_series_domain_fn("INTRO_RED_R"),
))


def _li_entry(ident, family, grid_points, schema_extra, anchor, constraint):
    shapes = _shapes(family, 2, 2, 2)

    def grid():
        for shape in shapes:
            for point in grid_points:
                params = dict(shape=shape)
                params.update(point)
                yield params, None

    def sample(rng):
        shape = rng.choice(shapes)
        point = grid_points[rng.randrange(len(grid_points))]
        return dict(shape=shape, **point)

    schema = {"shape": "shape"}
    schema.update(schema_extra)
    _register(_Entry(
        IdentityDescriptor(ident, anchor, "NUMERIC", schema,
                           constraint_id=constraint, default_tol=1e-8),
        _series_eval(ident),
        grid,
        sample=sample,
        domain=_series_domain_fn(ident),
    ))


_li_entry("LI1_MAIN", "A",
          [dict(a=a, p=p) for a, p in _LI_AP],
          {"a": "float", "p": "float"},
          "Li*_s({1}_(d-1),a) equals the main/sub argument-string difference "
          "of depth-|s| star polylogarithms (trailing-block family)",
          "MAIN_AP")

_li_entry("LI2_MAIN", "B",
          [dict(a=a, p=p) for a, p in _LI_AP],
          {"a": "float", "p": "float"},
          "Li*_s({1}_(d-1),a) equals the main/sub argument-string difference "
          "of depth-|s| star polylogarithms (trailing-ones family)",
          "MAIN_AP")

_li_entry("LI1_RED1", "A",
          [dict(p=p) for p in _RED_P],
          {"p": "float"},
          "the a-free depth-|s| string reduces to -Li*_s({1}_(d-1),1-1/p)",
          "RED_BOX")

_li_entry("LI2_RED1", "B",
          [dict(p=p) for p in _RED_P],
          {"p": "float"},
          "the a-free depth-|s| string reduces to -Li*_s({1}_(d-1),1-1/p) "
          "(trailing-ones family)",
          "RED_BOX")

_li_entry("LI1_RED2", "A",
          [dict(a=a, p=p) for a in _RED_A for p in _RED_P],
          {"a": "float", "p": "float"},
          "the a-dependent depth-|s| string reduces to "
          "Li*_s({1}_(d-1),a) - Li*_s({1}_(d-1),1-1/p)",
          "RED_BOX")

_li_entry("LI2_RED2", "B",
          [dict(a=a, p=p) for a in _RED_A for p in _RED_P],
          {"a": "float", "p": "float"},
          "the a-dependent depth-|s| string reduces to "
          "Li*_s({1}_(d-1),a) - Li*_s({1}_(d-1),1-1/p) (trailing-ones family)",
          "RED_BOX")


def _a1_entry(ident, family, anchor):
    shapes = _shapes(family, 2, 1, 1)

    def grid():
        for shape in shapes:
            for p in _P3:
                yield dict(shape=shape, p=p), None

    _register(_Entry(
        IdentityDescriptor(ident, anchor, "NUMERIC", {"shape": "shape", "p": "float"},
                           constraint_id="A1_P", default_tol=1e-8),
        _series_eval(ident),
        grid,
        sample=lambda rng: dict(shape=rng.choice(shapes), p=0.2 + rng.random() * 0.6),
        domain=_series_domain_fn(ident),
    ))


_a1_entry("LI1_A1", "A",
          "zeta*(s) equals the unit-argument main/sub string difference, "
          "independently of p in (0,1)")
_a1_entry("LI2_A1", "B",
          "zeta*(s) equals the unit-argument main/sub string difference "
          "(trailing-ones family), independently of p in (0,1)")


def _ex_entry(ident, family, anchor):
    def evaluate(params, tol, precision):
        return polylog.li_example_sides(family, params["d"], params["p"], tol, precision)

    _register(_Entry(
        IdentityDescriptor(ident, anchor, "NUMERIC", {"d": "int", "p": "float"},
                           constraint_id="A1_P", default_tol=1e-8),
        evaluate,
        lambda: ((dict(d=d, p=p), None) for d in (1, 2) for p in _P3),
        sample=lambda rng: dict(d=rng.randint(1, 2), p=0.2 + rng.random() * 0.6),
        domain=lambda pr: (0 < pr["p"] < 1, "p must lie in (0,1)"),
    ))


_ex_entry("LI1_EX", "A",
          "(2-4^(1-d)) zeta(2d) = Li*_{1..1}({1-p,1/(1-p)}_d) - "
          "Li*_{1..1}({1-p,1/(1-p)}_(d-1),1-p,1)")
_ex_entry("LI2_EX", "B",
          "2 zeta(2d+1) = Li*_{1..1}({1-p,1/(1-p)}_d,1) - "
          "Li*_{1..1}({1-p,1/(1-p)}_d,1-p)")

_register(_Entry(
    IdentityDescriptor(
        "MEAN_INF_A",
        "Li*_s({1}_(d-1),a) equals the infinite binomial-ratio mean kernel sum",
        "NUMERIC", {"s": "composition", "a": "float"}, default_tol=1e-6),
    lambda params, tol, precision: polylog.li_identity_sides(
        "MEAN_INF_A", params["s"], params["a"], None, tol, precision,
        check_domain=not params.get("_outside", False)),
    lambda: ((dict(s=s, a=a), None)
             for s, alist in ((Composition((2,)), (1, 0.5, -1)),
                              (Composition((1, 1)), (0.5,)),
                              (Composition((2, 1)), (1, 0.5, -1)))
             for a in alist),
    sample=lambda rng: dict(s=rng.choice((Composition((2,)), Composition((2, 1)))),
                            a=float(_rational(rng, -1, 1))),
    domain=lambda pr: (polylog.mean_lhs_converges(pr["s"], pr["a"]),
                       "left side diverges"),
))

_register(_Entry(
    IdentityDescriptor(
        "MEAN_INF_1",
        "zeta*(s) = sum over |s|-chains of 1/((Q+1)(Q+n_|s|+1) n_1...n_(|s|-1))",
        "NUMERIC", {"s": "composition"}, default_tol=1e-6),
    lambda params, tol, precision: polylog.li_identity_sides(
        "MEAN_INF_1", params["s"], 1, None, tol, precision),
    lambda: iter(((dict(s=Composition((2,))), 1e-6),
                  (dict(s=Composition((3,))), 1e-6),
                  (dict(s=Composition((2, 2))), 1e-5))),
    sample=lambda rng: dict(s=rng.choice((Composition((2,)), Composition((3,)),
                                          Composition((2, 2))))),
    domain=lambda pr: (as_composition(pr["s"]).parts[0] >= 2, "needs s_1 >= 2"),
))


def _mean_ex2_eval(params, tol, precision):
    d = params["d"]
    s = Composition((2,) * d)
    lhs = polylog.mean_kernel_infinite(s, tol / 4, precision)
    closed = polylog.zeta_star_closed("TWO_D", d, precision)
    rhs = polylog._wrap_value(closed.value, closed.precision)
    return lhs, rhs


_register(_Entry(
    IdentityDescriptor(
        "MEAN_EX2",
        "sum over 2d-chains of 1/((1+alt-sum)(1+alt-sum')n_1...n_(2d-1)) = "
        "zeta*({2}_d) = (2-4^(1-d)) zeta(2d)",
        "NUMERIC", {"d": "int"}, default_tol=1e-6),
    _mean_ex2_eval,
    lambda: iter(((dict(d=1), 1e-6), (dict(d=2), 1e-5))),
    sample=lambda rng: dict(d=rng.randint(1, 2)),
))


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def list_identities():
    """All identity descriptors, sorted by id."""
    return [e.descriptor for _, e in sorted(_REGISTRY.items())]


def get_entry(identity_id):
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise DomainError(f"unknown identity {identity_id!r}") from None


def default_grid(identity_id):
    """The identity's built-in verification grid: (params, tol) pairs."""
    return get_entry(identity_id).grid()


def _diffs(lhs, rhs, mode):
    if mode == "EXACT":
        diff = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs), Fraction(1))
        return diff, float(diff / scale)
    lv = lhs.value.value if isinstance(lhs, EvalResult) else mpmath.mpf(lhs)
    rv = rhs.value.value if isinstance(rhs, EvalResult) else mpmath.mpf(rhs)
    diff = abs(lv - rv)
    scale = max(abs(lv), abs(rv), mpmath.mpf(1))
    return BigReal(diff), float(diff / scale)


def verify(identity_id, params=None, tol=None, precision=None,
           outside=False) -> IdentityReport:
    """Evaluate one identity instance and compare its sides.

    Domain violations yield a skipped report (not a failure) unless
    ``outside=True``, in which case the evaluation is attempted anyway and
    rejections or divergences count as failures.  Mathematical failure never
    raises; it returns ``passed=False``.
    """
    entry = get_entry(identity_id)
    desc = entry.descriptor
    params = dict(params or {})
    if tol is None:
        tol = desc.default_tol if desc.default_tol is not None else DEFAULT_NUMERIC_TOL
    report = IdentityReport(id=desc.id, params=dict(params), mode=desc.mode,
                            anchor=desc.anchor,
                            tolerance=None if desc.mode == "EXACT" else tol)
    if entry.domain is not None:
        ok, reason = entry.domain(params)
        if not ok and not outside:
            report.skipped = True
            report.skip_reason = reason
            return report
    if outside:
        params["_outside"] = True
    start = time.perf_counter()
    try:
        lhs, rhs = entry.evaluate(params, tol, precision)
    except (PairingUnavailableError, DomainError) as exc:
        if outside:
            report.passed = False
            report.converged = False
            report.skip_reason = f"evaluation rejected: {exc}"
            report.cost = {"wall_ms": (time.perf_counter() - start) * 1e3}
            return report
        raise
    wall_ms = (time.perf_counter() - start) * 1e3
    report.lhs = lhs.value if isinstance(lhs, EvalResult) else lhs
    report.rhs = rhs.value if isinstance(rhs, EvalResult) else rhs
    report.abs_diff, report.rel_diff = _diffs(lhs, rhs, desc.mode)
    cost = {"wall_ms": round(wall_ms, 3)}
    if isinstance(lhs, EvalResult):
        cost["terms_lhs"] = lhs.terms_used
    if isinstance(rhs, EvalResult):
        cost["terms_rhs"] = rhs.terms_used
    report.cost = cost
    if desc.mode == "EXACT":
        report.passed = (lhs == rhs)
    else:
        converged = all(r.converged for r in (lhs, rhs) if isinstance(r, EvalResult))
        report.converged = converged
        report.passed = bool(converged and float(report.abs_diff) <= tol)
    return report


def fuzz(identity_id, seed, trials, tol=None, outside=False):
    """Deterministically sample ``trials`` parameter points and verify each.

    In-domain sampling rejects points outside the identity's validity region,
    so ordinary fuzz runs never produce domain skips; ``outside=True`` keeps
    every sampled point and lets evaluations fail.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    entry = get_entry(identity_id)
    if entry.sample is None:
        raise DomainError(f"{identity_id} has no fuzz sampler")
    rng = random.Random(f"{identity_id}:{seed}")
    reports = []
    guard = 0
    while len(reports) < trials:
        params = entry.sample(rng)
        if not outside and entry.domain is not None:
            ok, _ = entry.domain(params)
            if not ok:
                guard += 1
                if guard > 10000 * trials:
                    raise NonStopSampling(identity_id)
                continue
        reports.append(verify(identity_id, params, tol, outside=outside))
    return reports
