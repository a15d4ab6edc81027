"""Cylinder/forbidden-word mechanics, checked against a brute-force oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest

from thermoscope.errors import DegenerateGraph
from thermoscope.symbolic import (CylinderWord, TorusPoint, build_sft,
                                  cylinder_interval, forbidden_words,
                                  successors)


def brute_force_forbidden(c: TorusPoint, n: int):
    """Oracle: test every length-n word's interval against the open ball."""
    cf = c.as_fraction()
    r = Fraction(1, 2 ** (n + 1))
    out = []
    for k in range(2 ** n):
        a = Fraction(k, 2 ** n)
        b = a + Fraction(1, 2 ** n)
        if a <= cf < b:
            out.append(k)
            continue
        gaps = []
        for end in (a, b):
            d = abs(cf - end) % 1
            gaps.append(min(d, 1 - d))
        if min(gaps) < r:
            out.append(k)
    return out


def test_cylinder_interval_examples():
    assert cylinder_interval(CylinderWord(1, 0)) == (0.0, 0.5)
    assert cylinder_interval(CylinderWord(3, 7)) == (0.875, 1.0)
    assert cylinder_interval(CylinderWord(2, 1)) == (0.25, 0.5)


def test_cylinder_intervals_tile():
    for n in (1, 3, 7):
        lefts = [cylinder_interval(CylinderWord(n, k))[0] for k in range(2 ** n)]
        rights = [cylinder_interval(CylinderWord(n, k))[1] for k in range(2 ** n)]
        assert lefts[0] == 0.0 and rights[-1] == 1.0
        assert all(r == l for r, l in zip(rights[:-1], lefts[1:]))
        widths = np.array(rights) - np.array(lefts)
        assert np.allclose(widths, 2.0 ** -n, rtol=0, atol=0)


def test_forbidden_words_examples():
    got = forbidden_words(TorusPoint.from_float(0.0), 3)
    assert [w.symbols for w in got] == ["000", "111"]
    got = forbidden_words(TorusPoint.from_float(1 / 3), 2)
    assert [w.symbols for w in got] == ["00", "01"]
    got = forbidden_words(TorusPoint.from_float(7 / 8), 2)
    assert [w.symbols for w in got] == ["11"]


@pytest.mark.parametrize("cval", [0.0, 0.1, 1 / 3, 0.3, 0.5, 0.625, 7 / 8,
                                  0.8751, 0.999, 1 / 7, 0.49999999])
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_forbidden_words_vs_oracle(cval, n):
    c = TorusPoint.from_float(cval)
    got = sorted(w.index for w in forbidden_words(c, n))
    assert got == brute_force_forbidden(c, n)
    assert 1 <= len(got) <= 2


def test_forbidden_words_dyadic_boundary():
    # a dyadic c on a cylinder boundary forbids both flanking cylinders
    c = TorusPoint.from_dyadic(1, 1)  # 1/2 at depth 3: boundary of 011|100
    got = [w.symbols for w in forbidden_words(c, 3)]
    assert got == ["011", "100"]
    # midpoint of a cell: exactly one forbidden word
    c = TorusPoint.from_dyadic(7, 3)  # 7/8 is the midpoint at depth 2
    assert len(forbidden_words(c, 2)) == 1


@pytest.mark.parametrize("cval", [0.0, 0.3, 1 / 3, 0.5, 7 / 8, 0.717])
def test_forbidden_nesting(cval):
    # prefixes of deeper forbidden words are forbidden one level up
    c = TorusPoint.from_float(cval)
    for n in range(1, 12):
        shallow = {w.index for w in forbidden_words(c, n)}
        deeper = forbidden_words(c, n + 1)
        for w in deeper:
            assert (w.index >> 1) in shallow


def test_build_sft_golden_mean():
    g = build_sft(TorusPoint.from_float(7 / 8), 2)
    assert sorted(g.core.tolist()) == [0, 1, 2]
    assert g.strongly_connected
    assert g.n_allowed == 3


def test_build_sft_single_state():
    g = build_sft(TorusPoint.from_float(0.75), 1)
    assert g.core.tolist() == [0]


def test_build_sft_degenerate():
    with pytest.raises(DegenerateGraph):
        build_sft(TorusPoint.from_float(0.0), 1)


@pytest.mark.parametrize("cval,n", [(0.0, 6), (0.3, 8), (7 / 8, 5), (0.5, 10)])
def test_allowed_count(cval, n):
    c = TorusPoint.from_float(cval)
    g = build_sft(c, n)
    assert g.n_allowed == 2 ** n - len(g.forbidden)


def test_successor_arithmetic():
    s0, s1 = successors(np.array([0b101]), 3)
    assert s0[0] == 0b010 and s1[0] == 0b011


def test_torus_point_exactness():
    p = TorusPoint.from_float(0.5)
    assert p.exact == (1, 1)
    assert p.is_exactly(1, 1)
    q = TorusPoint.from_float(0.3)  # denominator 2**54 exceeds promotion cap
    assert q.exact is None
    r = TorusPoint.from_dyadic(6, 3)  # normalises to 3/4
    assert r.exact == (3, 2)
