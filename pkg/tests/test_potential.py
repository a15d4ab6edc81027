"""Potential evaluation, identities, and cylinder weight brackets."""

import math

import numpy as np
import pytest

from thermoscope.errors import SingularCylinder
from thermoscope.potential import (birkhoff_sum, cylinder_weight_bracket, g,
                                   psi, psi_bracket_arrays, psi_truncated,
                                   weight_bracket_arrays)
from thermoscope.symbolic import CylinderWord, TorusPoint, forbidden_words

LOG2 = math.log(2.0)


def test_psi_examples():
    assert psi(0.0, 0.5) == 0.0
    assert abs(psi(0.0, 0.25) + LOG2) < 1e-14
    assert psi(0.3, 0.3) == -math.inf
    assert psi(TorusPoint.from_float(0.5), TorusPoint.from_float(0.5)) == -math.inf


def test_psi_nonpositive():
    rng = np.random.default_rng(1)
    for c in rng.random(20):
        for x in rng.random(20):
            assert psi(c, x) <= 0.0


def test_psi_truncated():
    assert abs(psi_truncated(0.0, 1.0, 0.25) + LOG2) < 1e-14
    assert psi_truncated(0.0, 0.5, 0.25) == -0.5
    assert psi_truncated(0.3, 10.0, 0.3) == -10.0
    with pytest.raises(ValueError):
        psi_truncated(0.0, -1.0, 0.25)


def test_g_examples():
    assert g(0.0, 0.5) == 1.0
    assert g(0.0, 0.0) == 0.0
    assert abs(g(0.0, 0.25) - 0.5) < 1e-15


def test_exp_psi_equals_g():
    rng = np.random.default_rng(2)
    for c in rng.random(10):
        for x in rng.random(10):
            v = psi(c, x)
            if v > -math.inf:
                assert abs(math.exp(v) - g(c, x)) < 1e-12


def test_g_kernel_identity():
    # the two preimage weights of any point sum to one
    rng = np.random.default_rng(3)
    for c in rng.random(10):
        for x in rng.random(30):
            assert abs(g(c, x / 2) + g(c, x / 2 + 0.5) - 1.0) < 1e-12


def test_rotation_identity_bit_for_bit():
    rng = np.random.default_rng(4)
    for c in rng.random(15):
        for x in rng.random(15):
            assert psi(c, x) == psi(0.0, (x - c) % 1.0)


def test_birkhoff_examples():
    expected = 2 * math.log(3 / 4)  # orbit {1/3, 2/3}, sin^2 = 3/4 at both
    assert abs(birkhoff_sum(0.0, 1 / 3, 2) - expected) < 1e-12
    assert birkhoff_sum(TorusPoint.from_float(0.0), TorusPoint.from_float(0.0), 5) == -math.inf
    assert birkhoff_sum(TorusPoint.from_float(0.5), TorusPoint.from_float(0.0), 3) == 0.0


def test_birkhoff_additivity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c, x = rng.random(), rng.random()
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        whole = birkhoff_sum(c, x, m + n)
        tx = (x * 2.0 ** m) % 1.0
        parts = birkhoff_sum(c, x, m) + birkhoff_sum(c, tx, n)
        if math.isfinite(whole):
            assert abs(whole - parts) < 1e-9


def test_weight_bracket_examples():
    wb = cylinder_weight_bracket(0.0, CylinderWord(2, 1), 1.0)
    assert abs(wb.lo + LOG2) < 1e-14
    assert wb.hi == 0.0
    wb = cylinder_weight_bracket(0.0, CylinderWord(2, 1), 0.0)
    assert wb.lo == 0.0 and wb.hi == 0.0
    with pytest.raises(SingularCylinder):
        cylinder_weight_bracket(0.0, CylinderWord(2, 0), 1.0)


@pytest.mark.parametrize("cval", [0.0, 0.3, 0.51, 7 / 8])
@pytest.mark.parametrize("t", [1.0, -0.7, 2.5])
def test_weight_bracket_vs_dense_sampling(cval, t):
    # oracle: dense sampling of t*psi over the closed interval
    n = 5
    c = TorusPoint.from_float(cval)
    forbidden = {w.index for w in forbidden_words(c, n)}
    for k in range(2 ** n):
        if k in forbidden:
            continue
        w = CylinderWord(n, k)
        wb = cylinder_weight_bracket(c, w, t)
        xs = np.linspace(k / 2 ** n, (k + 1) / 2 ** n, 2001)
        vals = t * np.array([psi(cval, x) for x in xs])
        assert wb.lo <= vals.min() + 1e-9
        assert wb.hi >= vals.max() - 1e-9
        # tightness: the bracket ends are attained up to sampling resolution
        assert vals.min() - wb.lo < 1e-3
        assert wb.hi - vals.max() < 1e-3


def test_bracket_arrays_match_scalar():
    for cval in (0.0, 0.3, 0.875):
        c = TorusPoint.from_float(cval)
        n = 6
        lo, hi = psi_bracket_arrays(c, n)
        forbidden = {w.index for w in forbidden_words(c, n)}
        for k in range(2 ** n):
            if k in forbidden:
                assert lo[k] == -math.inf
                continue
            wb = cylinder_weight_bracket(c, CylinderWord(n, k), 1.0)
            assert abs(lo[k] - wb.lo) < 1e-9
            assert abs(hi[k] - wb.hi) < 1e-9


def test_truncated_bracket_arrays():
    lo, hi = weight_bracket_arrays(0.0, 6, 1.0, truncation=5.0)
    assert np.isfinite(lo).all() and np.isfinite(hi).all()
    assert (lo >= -5.0 - 1e-12).all()
    assert (lo <= hi).all()
    # negative t swaps the roles
    lo2, hi2 = weight_bracket_arrays(0.0, 6, -1.0, truncation=5.0)
    assert (lo2 <= hi2).all()
    assert (hi2 <= 5.0 + 1e-12).all()


def test_singular_sup_values():
    # the singular cylinder's sup of psi sits at the far endpoint
    c = TorusPoint.from_float(0.99)
    lo, hi = psi_bracket_arrays(c, 3)
    k = 7  # cylinder [0.875, 1) contains c
    assert lo[k] == -math.inf
    far = max(abs(0.875 - 0.99), 0.0)
    expect = 2 * math.log(math.sin(math.pi * (0.99 - 0.875)))
    assert abs(hi[k] - expect) < 1e-9
