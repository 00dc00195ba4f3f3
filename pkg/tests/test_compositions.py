import itertools
from fractions import Fraction

import pytest

from polystar.compositions import (Composition, IndexChain, ShapeBlocks,
                                   chain_q_signs, domain_check, q_of,
                                   shape_args, shape_composition)
from polystar.kernel import DomainError


def test_composition_basics():
    s = Composition((3, 2))
    assert s.weight == 5
    assert s.depth == 2
    assert s.prefix_weights == (0, 3, 5)
    assert s.block_bounds() == ((1, 3), (4, 5))


def test_composition_parse_roundtrip():
    s = Composition.parse("3,2,1")
    assert s.parts == (3, 2, 1)
    assert Composition.parse(str(s)) == s


def test_composition_invalid():
    with pytest.raises(DomainError):
        Composition(())
    with pytest.raises(DomainError):
        Composition((2, 0))
    with pytest.raises(DomainError):
        Composition.parse("3,x")


def test_shape_parse_roundtrip():
    sh = ShapeBlocks.parse("A:m=2,1,0;u=2,0")
    assert sh.family == "A" and sh.m == (2, 1, 0) and sh.u == (2, 0)
    assert ShapeBlocks.parse(str(sh)) == sh
    d1 = ShapeBlocks.parse("A:m=3;u=")
    assert d1.d == 1 and d1.u == ()


def test_shape_invariants():
    with pytest.raises(DomainError):
        ShapeBlocks("B", (0,), (0,))  # u_d must be >= 1
    with pytest.raises(DomainError):
        ShapeBlocks("A", (0, 0), (1, 1))  # family A needs len(u) == d-1
    with pytest.raises(DomainError):
        ShapeBlocks("C", (0,), ())


def test_shape_composition_examples():
    assert shape_composition(ShapeBlocks("A", (2, 1, 0), (2, 0))).parts == (4, 1, 1, 3, 2)
    assert shape_composition(ShapeBlocks("A", (0,), ())).parts == (2,)
    assert shape_composition(ShapeBlocks("B", (0,), (1,))).parts == (2, 1)


def test_shape_composition_weight_invariant():
    for d in (1, 2, 3):
        for m in itertools.product(range(4), repeat=d):
            for u in itertools.product(range(4), repeat=d - 1):
                sh = ShapeBlocks("A", m, u)
                assert shape_composition(sh).weight == sum(m) + sum(u) + 2 * d
            for u in itertools.product(range(4), repeat=d):
                if u[-1] < 1:
                    continue
                sh = ShapeBlocks("B", m, u)
                assert shape_composition(sh).weight == sum(m) + sum(u) + 2 * d


def test_q_of_examples():
    assert q_of((3, 2), (5, 4, 3, 2, 1)) == (5 - 3) + (2 - 1)
    for d in (1, 2, 3):
        assert q_of((1,) * d, (4,) * d) == 0
        assert q_of((1,) * d, tuple(range(d + 3, 3, -1))) == 0
    n = (7, 5, 4, 2)
    assert q_of((2, 2), n) == n[0] - n[1] + n[2] - n[3]


def test_q_of_constant_chain_zero():
    for parts in ((2,), (3, 2), (1, 2, 1), (2, 2)):
        s = Composition(parts)
        assert q_of(s, (5,) * s.weight) == 0


def test_q_of_length_mismatch():
    with pytest.raises(DomainError):
        q_of((3, 2), (3, 2, 1))


def test_chain_validation():
    with pytest.raises(DomainError):
        IndexChain((1, 2))
    with pytest.raises(DomainError):
        IndexChain((2, 0))


def test_chain_q_signs():
    assert chain_q_signs((3, 2)) == (1, 0, -1, 1, -1)
    assert chain_q_signs((1, 1, 1)) == (0, 0, 0)
    assert chain_q_signs((2,)) == (1, -1)


def test_shape_args_examples():
    half = Fraction(1, 2)
    assert shape_args(ShapeBlocks("A", (0,), ()), "sub", 1, half) == (half, 1)
    assert shape_args(ShapeBlocks("A", (0, 0), (0,)), "main", 1, half) == \
        (half, 2, half, 2)
    assert shape_args(ShapeBlocks("B", (0,), (1,)), "main", 1, half) == (half, 2, 1)
    assert shape_args(ShapeBlocks("B", (0,), (1,)), "sub", 1, half) == (half, 2, half)


def test_shape_args_length_matches_composition():
    for text in ("A:m=2,1,0;u=2,0", "A:m=1;u=", "B:m=0,1;u=2,1", "B:m=2;u=2"):
        sh = ShapeBlocks.parse(text)
        weight = shape_composition(sh).weight
        for variant in ("main", "sub"):
            assert len(shape_args(sh, variant, Fraction(1, 3), Fraction(2, 5))) == weight


def test_shape_args_degenerate_last_argument():
    # at a = 1 - 1/p the a-dependent string ends in an exact zero
    for ptext in ("1/2", "3/4", "2/3"):
        p = Fraction(ptext)
        a = 1 - 1 / p
        args = shape_args(ShapeBlocks("A", (1, 0), (1,)), "main", a, p)
        assert args[-1] == 0


def test_shape_args_p_one_rejected():
    with pytest.raises(DomainError):
        shape_args(ShapeBlocks("A", (0,), ()), "main", 1, 1)


def test_domain_check_main():
    assert domain_check("MAIN_AP", 1, Fraction(1, 2))
    assert domain_check("MAIN_AP", 1, Fraction(3, 4))  # |1| <= min(1, 5/3)
    assert not domain_check("MAIN_AP", 1, 1)  # p = 1 excluded
    assert not domain_check("MAIN_AP", Fraction(1, 2), Fraction(19, 10))
    assert domain_check("MAIN_AP", Fraction(1, 3), Fraction(3, 2))
    assert not domain_check("MAIN_AP", 1, 0)
    assert not domain_check("MAIN_AP", 0, -1)


def test_domain_check_boundary_inside():
    # |a| = min(1, 2/p-1) exactly counts as inside
    assert domain_check("MAIN_AP", 1, 1)  is False
    assert domain_check("MAIN_AP", Fraction(1, 3), Fraction(3, 2))
    assert domain_check("MAIN_AP", -1, Fraction(1, 2))


def test_domain_check_a1():
    assert domain_check("A1_P", 1, Fraction(1, 2))
    assert not domain_check("A1_P", 1, 1)
    assert not domain_check("A1_P", Fraction(1, 2), Fraction(1, 2))


def test_domain_check_red_box():
    assert not domain_check("RED_BOX", 0, 1)
    assert domain_check("RED_BOX", 0, Fraction(1, 2))
    assert domain_check("RED_BOX", Fraction(1, 4), Fraction(3, 4))
    assert not domain_check("RED_BOX", 1, Fraction(1, 2))  # a outside the box


def test_domain_check_unknown_id():
    with pytest.raises(DomainError):
        domain_check("NO_SUCH", 0, 0)
