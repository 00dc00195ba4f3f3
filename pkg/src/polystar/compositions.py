"""Index tuples (compositions), block-structured tuple families, the chain
statistic Q, argument-string builders, and parameter-domain predicates.

A composition s = (s_1, ..., s_d) of positive integers partitions a chain of
summation indices n_1 >= ... >= n_{|s|} into d consecutive blocks, block r
spanning positions |s|_{r-1}+1 .. |s|_r where |s|_r = s_1 + ... + s_r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .kernel import DomainError


def _as_fraction(x):
    """Exact coercion: int/Fraction pass through, floats convert exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise DomainError(f"expected a rational-representable scalar, got {type(x)!r}")


@dataclass(frozen=True)
class Composition:
    """Nonempty tuple of positive integer parts.

    ``weight`` is the sum of the parts, ``depth`` their count, and
    ``prefix_weights[r]`` the sum of the first r parts (index 0 gives 0).
    """

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise DomainError("composition must be nonempty")
        if any(p < 1 for p in parts):
            raise DomainError(f"composition parts must be >= 1, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self):
        return sum(self.parts)

    @property
    def depth(self):
        return len(self.parts)

    @property
    def prefix_weights(self):
        acc = [0]
        for p in self.parts:
            acc.append(acc[-1] + p)
        return tuple(acc)

    def block_bounds(self):
        """(start, end) positions of each block, 1-based inclusive."""
        pw = self.prefix_weights
        return tuple((pw[r] + 1, pw[r + 1]) for r in range(self.depth))

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse the CLI syntax, e.g. ``"3,2"``."""
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise DomainError(f"cannot parse composition {text!r}") from exc
        return cls(parts)

    def __str__(self):
        return ",".join(str(p) for p in self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def as_composition(s) -> Composition:
    if isinstance(s, Composition):
        return s
    if isinstance(s, int):
        return Composition((s,))
    return Composition(tuple(s))


@dataclass(frozen=True)
class ShapeBlocks:
    """Block description (m_i, u_i) generating the structured tuples.

    Family A builds ``(m_1+2, {1}_{u_1}, ..., m_{d-1}+2, {1}_{u_{d-1}}, m_d+2)``
    (u has length d-1); family B appends a trailing group of ones,
    ``(m_1+2, {1}_{u_1}, ..., m_d+2, {1}_{u_d})`` with u_d >= 1.
    """

    family: str
    m: tuple
    u: tuple = field(default=())

    def __post_init__(self):
        family = self.family.upper()
        m = tuple(int(v) for v in self.m)
        u = tuple(int(v) for v in self.u)
        if family not in ("A", "B"):
            raise DomainError(f"family must be 'A' or 'B', got {self.family!r}")
        if not m:
            raise DomainError("m must be nonempty")
        if any(v < 0 for v in m) or any(v < 0 for v in u):
            raise DomainError("m_i and u_i must be nonnegative")
        d = len(m)
        if family == "A" and len(u) != d - 1:
            raise DomainError(f"family A needs len(u) == d-1, got d={d}, len(u)={len(u)}")
        if family == "B":
            if len(u) != d:
                raise DomainError(f"family B needs len(u) == d, got d={d}, len(u)={len(u)}")
            if u[-1] < 1:
                raise DomainError("family B requires u_d >= 1")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "u", u)

    @property
    def d(self):
        return len(self.m)

    @classmethod
    def parse(cls, text: str) -> "ShapeBlocks":
        """Parse the CLI syntax, e.g. ``"A:m=2,1,0;u=2,0"`` (``u=`` may be empty)."""
        try:
            family, rest = text.split(":", 1)
            fields = dict(item.split("=", 1) for item in rest.split(";") if item)
            m = tuple(int(v) for v in fields["m"].split(",") if v != "")
            u_text = fields.get("u", "")
            u = tuple(int(v) for v in u_text.split(",") if v != "")
        except (ValueError, KeyError) as exc:
            raise DomainError(f"cannot parse shape {text!r}") from exc
        return cls(family, m, u)

    def __str__(self):
        return f"{self.family}:m={','.join(map(str, self.m))};u={','.join(map(str, self.u))}"


@dataclass(frozen=True)
class IndexChain:
    """Nonincreasing chain of positive summation indices."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(v) for v in self.indices)
        if not idx:
            raise DomainError("chain must be nonempty")
        if any(v < 1 for v in idx):
            raise DomainError("chain indices must be >= 1")
        if any(idx[i] < idx[i + 1] for i in range(len(idx) - 1)):
            raise DomainError(f"chain must be nonincreasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def shape_composition(shape: ShapeBlocks) -> Composition:
    """Composition generated by a block description."""
    parts = []
    if shape.family == "A":
        for i in range(shape.d - 1):
            parts.append(shape.m[i] + 2)
            parts.extend([1] * shape.u[i])
        parts.append(shape.m[-1] + 2)
    else:
        for i in range(shape.d):
            parts.append(shape.m[i] + 2)
            parts.extend([1] * shape.u[i])
    return Composition(tuple(parts))


def q_of(s, chain) -> int:
    """Chain statistic Q(s) = sum over blocks of (first index - last index)."""
    s = as_composition(s)
    if isinstance(chain, IndexChain):
        idx = chain.indices
    else:
        idx = IndexChain(tuple(chain)).indices
    if len(idx) != s.weight:
        raise DomainError(f"chain length {len(idx)} != composition weight {s.weight}")
    total = 0
    for start, end in s.block_bounds():
        total += idx[start - 1] - idx[end - 1]
    return total


def chain_q_signs(s) -> tuple:
    """Per-position contribution sign of each chain index to Q(s).

    +1 at the start of a block of size >= 2, -1 at its end, 0 elsewhere
    (size-1 blocks contribute nothing).
    """
    s = as_composition(s)
    signs = []
    for part in s.parts:
        if part == 1:
            signs.append(0)
        else:
            signs.append(+1)
            signs.extend([0] * (part - 2))
            signs.append(-1)
    return tuple(signs)


def shape_args(shape: ShapeBlocks, variant: str, a, p) -> tuple:
    """Argument string of length |s| for the depth-|s| side of the block
    identities.

    ``variant="main"`` builds the a-dependent string, ``variant="sub"`` the
    a-free one.  Exact rational inputs yield exact rational arguments.
    """
    if variant not in ("main", "sub"):
        raise DomainError(f"variant must be 'main' or 'sub', got {variant!r}")
    p = _as_fraction(p)
    a = _as_fraction(a)
    if p == 1:
        raise DomainError("p = 1 is excluded (1/(1-p) undefined)")
    one = Fraction(1)
    q = 1 - p           # block-start base
    qinv = one / q      # block-end base
    args = []
    if shape.family == "A":
        for i in range(shape.d - 1):
            args.append(q)
            args.extend([one] * shape.m[i])
            args.append(qinv)
            args.extend([one] * shape.u[i])
        if variant == "main":
            args.append(q)
            args.extend([one] * shape.m[-1])
            args.append(1 + a * p / q)
        else:
            args.append(q)
            args.extend([one] * (shape.m[-1] + 1))
    else:
        for i in range(shape.d):
            args.append(q)
            args.extend([one] * shape.m[i])
            args.append(qinv)
            # the trailing group of ones loses one slot to the final argument
            args.extend([one] * (shape.u[i] - (1 if i == shape.d - 1 else 0)))
        args.append(1 - p + a * p if variant == "main" else q)
    expected = shape_composition(shape).weight
    assert len(args) == expected, (shape, variant, len(args), expected)
    return tuple(args)


# Validity regions for the numeric identities.  Inputs are coerced to exact
# rationals (floats convert exactly), so boundary points compare exactly and
# count as inside.
_CONSTRAINTS = ("MAIN_AP", "A1_P", "RED_BOX")


def domain_check(constraint_id: str, a, p) -> bool:
    """True iff (a, p) lies in the named validity region."""
    a = _as_fraction(a)
    p = _as_fraction(p)
    if constraint_id == "MAIN_AP":
        if p == 1 or p <= 0:
            return False
        bound = min(Fraction(1), Fraction(2) / p - 1)
        return abs(a) <= bound
    if constraint_id == "A1_P":
        return a == 1 and 0 < p < 1
    if constraint_id == "RED_BOX":
        in_box = (-1 <= a <= Fraction(1, 3)) and (Fraction(1, 2) <= p <= Fraction(3, 2))
        return in_box and p != 1 and domain_check("MAIN_AP", a, p)
    raise DomainError(f"unknown constraint id {constraint_id!r}")
