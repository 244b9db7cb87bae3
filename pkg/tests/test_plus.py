"""Tests for the even-family pole solver (integer-exponent principal parts)."""

from __future__ import annotations

from fractions import Fraction

import pytest

from goldens import PLUS_TABLE, proportional, series_proportional
from qeigen.forms import gen
from qeigen.plus import (
    BadDimension,
    ConstraintUnavailable,
    apply_origin_constraint,
    plus_params,
    solve_plus,
    to_record,
)


def test_params_anchors():
    p = plus_params(8)
    assert (p.ell, p.k, p.a_k, p.n, p.n_plus) == (1, 4, 3, 0, 1)
    assert not p.extra_dof
    p = plus_params(24)
    assert (p.ell, p.k, p.a_k, p.n, p.n_plus) == (1, 0, 1, 1, 2)
    assert not p.extra_dof
    p = plus_params(12)
    assert (p.ell, p.k, p.n, p.n_plus) == (1, 3, 1, 2)
    assert p.extra_dof
    p = plus_params(48)
    assert (p.ell, p.k, p.n, p.n_plus) == (2, 0, 2, 4)
    assert p.extra_dof


def test_params_depth_formula():
    # pole depth grows by one every 16 dimensions and equals n + ell
    for d in range(4, 200, 4):
        p = plus_params(d)
        assert p.n_plus == (d + 4) // 16 + 1
        assert p.n + p.ell == p.n_plus


@pytest.mark.parametrize("d", [0, 2, 6, 10, -4, 7])
def test_bad_dimension(d):
    with pytest.raises(BadDimension):
        plus_params(d)


@pytest.mark.parametrize("d,p,q,r", PLUS_TABLE, ids=lambda v: str(v))
def test_published_rows(d, p, q, r):
    if not isinstance(d, int):
        pytest.skip("parametrize id helper")
    sol = solve_plus(d)
    mine = list(sol.P) + list(sol.Q) + list(sol.R)
    assert proportional(mine, p + q + r)


def test_same_cell_dimensions_share_polynomials():
    # d and d + 24 land in the same (k, n) cell and solve the same system
    a, b = solve_plus(12), solve_plus(36)
    assert (a.P, a.Q, a.R) == (b.P, b.Q, b.R)


# Display combinations from the worked small-dimension examples, written as
# polynomials in E2, E4, E6.  Each must match phi * Delta^{n_plus} up to the
# frozen rational ratio (solver normalization is primitive-integer).
def _displays(n):
    E2, E4, E6 = gen("E2", n), gen("E4", n), gen("E6", n)
    return {
        (12, False): 205 * E4**4 * E6 - 637 * E4 * E6**3
        + E2 * (70 * E4**5 + 794 * E4**2 * E6**2)
        + E2**2 * (275 * E6**3 - 707 * E4**3 * E6),
        (12, True): 415 * E4**4 * E6 + 161 * E4 * E6**3
        - 2 * E2 * (431 * E4**2 * E6**2 + 145 * E4**5)
        + E2**2 * (451 * E4**3 * E6 + 125 * E6**3),
        (16, False): -469 * E4**2 * E6**2 + 325 * E4**5
        + E2 * (358 * E4**3 * E6 - 70 * E6**3)
        + E2**2 * (395 * E4 * E6**2 - 539 * E4**4),
        (16, True): 203 * E4**2 * E6**2 + 85 * E4**5
        - 2 * E2 * (211 * E4**3 * E6 + 77 * E6**3)
        + E2**2 * (239 * E4 * E6**2 + 49 * E4**4),
        (20, False): 5 * E4**3 * E6 + 7 * E6**3
        + E2 * (-19 * E4 * E6**2 - 5 * E4**4)
        + 12 * E2**2 * E4**2 * E6,
        (24, False): -25 * E4**4 + 49 * E4 * E6**2 - 48 * E2 * E4**2 * E6
        + E2**2 * (49 * E4**3 - 25 * E6**2),
        (48, False): -9565298 * E4**4 * E6**2 + 1101373 * E4 * E6**4
        + 7254325 * E4**7
        + 48 * E2 * (133387 * E4**5 * E6 - 82987 * E4**2 * E6**3)
        + E2**2 * (10650578 * E4**3 * E6**2 - 11603053 * E4**6 - 257125 * E6**4),
        (48, True): -21672478 * E4**4 * E6**2 + 29822429 * E4 * E6**4
        + 16373825 * E4**7
        + 24 * E2 * (53329 * E4**5 * E6 - 2096977 * E4**2 * E6**3)
        + E2**2 * (58616494 * E4**3 * E6**2 - 23223893 * E4**6 - 10868825 * E6**4),
    }


DISPLAY_RATIOS = {
    (12, False): Fraction(-1, 432),
    (12, True): Fraction(1, 576),
    (16, False): Fraction(-1, 144),
    (16, True): Fraction(1, 288),
    (20, False): Fraction(1, 12),
    (24, False): Fraction(1, 24),
    (48, False): Fraction(-1, 6912),
    (48, True): Fraction(1, 6912),
}


def test_display_combinations():
    displays = _displays(28)
    delta = gen("Delta", 28)
    for (d, constrained), disp in sorted(displays.items()):
        sol = solve_plus(d)
        if constrained:
            sol = apply_origin_constraint(sol)
        mine = sol.phi * delta**sol.params.n_plus
        assert series_proportional(disp, mine) == DISPLAY_RATIOS[(d, constrained)]


def test_origin_constrained_12_exact():
    sol = apply_origin_constraint(solve_plus(12))
    assert tuple(sol.P) == (-483, 1)
    assert tuple(sol.Q) == (-1293, 1)
    assert tuple(sol.R) == (-375, 1)


@pytest.mark.parametrize("d", [4, 12, 24, 28, 48])
def test_pole_order_invariants(d):
    sol = solve_plus(d)
    p = sol.params
    n = sol.psi3.trunc2 // 2 + p.n_plus + 1
    e2 = gen("E2", n)
    delta = gen("Delta", n)
    # z-linear part has a pole of depth exactly n_plus - 1
    g = sol.psi2 - e2 * sol.psi3
    assert g.valuation2() == 2 * (1 - p.n_plus)
    assert not g.coef(-p.n_plus)
    # z^2 part vanishes to the certified order
    phi_up = sol.phi * delta**p.ell
    assert phi_up.valuation2() == 2 * (2 * p.n + p.a_k - 1)
    # deepest pole is carried by the z^0 part
    assert sol.psi3.coef(-p.n_plus)
    assert sol.psi3.valuation2() == -2 * p.n_plus


def test_relaxed_space_only_for_extra_dimensions():
    assert solve_plus(8).relaxed_basis is None
    assert solve_plus(24).relaxed_basis is None
    rb = solve_plus(16).relaxed_basis
    assert rb is not None and len(rb) == 2
    with pytest.raises(ConstraintUnavailable):
        apply_origin_constraint(solve_plus(8))


def test_origin_constraint_kills_constant_term():
    sol = apply_origin_constraint(solve_plus(16))
    n = sol.psi3.trunc2 // 2 + sol.params.n_plus + 1
    e2 = gen("E2", n)
    g = sol.psi2 - e2 * sol.psi3
    assert not g.coef(0)
    # the relaxed element is no longer tight: the vanishing order drops
    delta = gen("Delta", n)
    phi_up = sol.phi * delta**sol.params.ell
    assert phi_up.valuation2() is not None
    assert phi_up.valuation2() >= 2 * (sol.params.ell + 1)


def test_record_shape():
    rec = to_record(solve_plus(4))
    assert rec["d"] == 4 and rec["ell"] == 1 and rec["k"] == 5
    assert rec["n"] == 0 and rec["n_plus"] == 1
    assert rec["P"] == ["1/1"]
    assert rec["Q"] == ["-864/1", "1/1"]
    assert rec["R"] == ["1/1"]
    assert rec["normalization"] == "primitive-int, P-leading-positive"
