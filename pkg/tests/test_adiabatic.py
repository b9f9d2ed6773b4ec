import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import expm

from braggbell import adiabatic
from braggbell.adiabatic import coeffs, coupling, level_shift, pulse_times, solve
from braggbell.params import derive, rubidium_preset, with_regime_ratio

CHI_RB = 492.6017280828795  # rubidium preset, frozen in test_params


@pytest.fixture
def d_rb():
    return derive(rubidium_preset())


def test_first_order_coupling_is_chi_n(d_rb):
    assert coupling(1, 2, d_rb) == pytest.approx(CHI_RB, rel=1e-14)
    assert coupling(2, 2, d_rb) == pytest.approx(2 * CHI_RB, rel=1e-14)
    assert coupling(7, 2, d_rb) == pytest.approx(7 * CHI_RB, rel=1e-14)


def test_second_order_coupling_formula(d_rb):
    # l0=4: |B| = (chi n)^2 / (8 w_rec); the 8 comes from (2 w_rec) * (4-2)^2
    w = d_rb.recoil_frequency
    for n in (1, 2, 3):
        expect = (CHI_RB * n) ** 2 / (8.0 * w)
        assert coupling(n, 4, d_rb) == pytest.approx(expect, rel=1e-13)
    assert coupling(1, 4, d_rb) == pytest.approx(1.3242326501505583, rel=1e-12)


def test_higher_order_coupling_general_product(d_rb):
    # (chi n)^(l0/2) / ((2 w_rec)^(l0/2-1) * [(l0-2)(l0-4)...2]^2)
    w = d_rb.recoil_frequency
    for n, l0 in [(1, 6), (2, 6), (1, 8), (3, 8), (1, 10)]:
        denom = (2.0 * w) ** (l0 // 2 - 1) * math.prod(range(2, l0 - 1, 2)) ** 2
        assert coupling(n, l0, d_rb) == pytest.approx(
            (CHI_RB * n) ** (l0 // 2) / denom, rel=1e-12
        )


def test_coupling_shrinks_with_order(d_rb):
    values = [coupling(1, l0, d_rb) for l0 in (2, 4, 6, 8)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_vacuum_coupling_zero(d_rb):
    for l0 in (2, 4, 6):
        assert coupling(0, l0, d_rb) == 0.0
        assert level_shift(0, l0, d_rb, "quadratic") == 0.0
        assert level_shift(0, l0, d_rb, "linear") == 0.0


def test_level_shift_modes(d_rb):
    w = d_rb.recoil_frequency
    # resonant pair is unshifted at first order
    assert level_shift(1, 2, d_rb, "quadratic") == 0.0
    assert level_shift(1, 2, d_rb, "linear") == 0.0
    # l0=4 conventions differ in both magnitude and sign
    quad = level_shift(1, 4, d_rb, "quadratic")
    lin = level_shift(1, 4, d_rb, "linear")
    assert quad == pytest.approx((CHI_RB / 2) ** 2 / (2 * w * 2), rel=1e-13)
    assert quad == pytest.approx(0.6621163250752792, rel=1e-12)
    assert lin == pytest.approx(-(CHI_RB / 2) / (2 * w * 2), rel=1e-13)
    assert lin < 0 < quad
    with pytest.raises(ValueError):
        level_shift(1, 4, d_rb, "cubic")


def test_coeffs_bundle(d_rb):
    c = coeffs(2, 4, d_rb, "quadratic")
    assert c.n == 2 and c.l0 == 4
    assert c.b_n == coupling(2, 4, d_rb)
    assert c.a_n == level_shift(2, 4, d_rb, "quadratic")


def test_solve_unitary_everywhere():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b = rng.uniform(-1e3, 1e3), rng.uniform(0, 1e3)
        c = adiabatic.TwoLevelCoeffs(a_n=a, b_n=b, n=1, l0=2)
        z = rng.normal(size=4)
        init = (complex(z[0], z[1]), complex(z[2], z[3]))
        norm = math.sqrt(abs(init[0]) ** 2 + abs(init[1]) ** 2)
        init = (init[0] / norm, init[1] / norm)
        sol = solve(init, c, rng.uniform(0, 1.0))
        total = abs(sol.c_plus) ** 2 + abs(sol.c_minus) ** 2
        assert abs(total - 1.0) < 1e-12


def test_solve_identity_at_t0(d_rb):
    c = coeffs(1, 2, d_rb)
    sol = solve((0.6 + 0.0j, 0.8j), c, 0.0)
    assert sol.c_plus == pytest.approx(0.6)
    assert sol.c_minus == pytest.approx(0.8j)


def test_solve_matches_matrix_exponential(d_rb):
    # same dynamics as exp(-i (a I - (b/2) sigma_x) t)
    rng = np.random.default_rng(21)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    for _ in range(25):
        a, b = rng.uniform(-500, 500), rng.uniform(0, 500)
        t = rng.uniform(0, 0.05)
        c = adiabatic.TwoLevelCoeffs(a_n=a, b_n=b, n=1, l0=4)
        u = expm(-1j * (a * np.eye(2) - 0.5 * b * sx) * t)
        v = u @ np.array([1.0, 0.0])
        sol = solve((1.0 + 0.0j, 0.0j), c, t)
        assert abs(sol.c_plus - v[0]) < 1e-12
        assert abs(sol.c_minus - v[1]) < 1e-12


def test_pi_pulse_full_flip(d_rb):
    c = coeffs(1, 2, d_rb)
    t1, _ = pulse_times(c, 1)
    assert t1 == pytest.approx(math.pi / CHI_RB, rel=1e-14)
    assert t1 == pytest.approx(0.006377551020408164, rel=1e-14)  # = 1/(2*78.4 Hz)
    sol = solve((1.0 + 0.0j, 0.0j), c, t1)
    assert abs(sol.c_plus) < 1e-15
    assert abs(sol.c_minus) == pytest.approx(1.0, abs=1e-15)
    # exact propagator leaves a factor i on the flipped amplitude
    assert sol.c_minus == pytest.approx(1j, abs=1e-12)


def test_half_pulse_balanced_splitter(d_rb):
    c = coeffs(1, 2, d_rb)
    sol = solve((1.0 + 0.0j, 0.0j), c, 0.5 * math.pi / c.b_n)
    assert abs(sol.c_plus) ** 2 == pytest.approx(0.5, abs=1e-12)
    assert abs(sol.c_minus) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_flip_periodicity(d_rb):
    c = coeffs(1, 4, d_rb, "quadratic")
    period = 2.0 * math.pi / c.b_n
    sol = solve((1.0 + 0.0j, 0.0j), c, period)
    # population returns, global phase does not have to
    assert abs(sol.c_plus) == pytest.approx(1.0, abs=1e-12)
    assert abs(sol.c_minus) < 1e-12


def test_solve_rejects_unnormalized(d_rb):
    c = coeffs(1, 2, d_rb)
    with pytest.raises(ValueError):
        solve((1.0 + 0.0j, 0.5 + 0.0j), c, 1e-3)


def test_pulse_times_contract(d_rb):
    c = coeffs(1, 2, d_rb)
    t1, t2 = pulse_times(c, 3, offset_r=2)
    assert t1 == pytest.approx(3 * math.pi / c.b_n)
    assert t2 == pytest.approx(7 * math.pi / c.b_n)
    for bad_s in (0, -1, 2, 4):
        with pytest.raises(ValueError):
            pulse_times(c, bad_s)
    with pytest.raises(ValueError):
        pulse_times(c, 1, offset_r=-1)
    zero = coeffs(0, 2, d_rb)
    with pytest.raises(ValueError):
        pulse_times(zero, 1)


def test_shift_to_coupling_ratio_is_half_for_l0_4():
    # a/b = [(chi n/2)^2 / (4 w_rec)] / [(chi n)^2 / (8 w_rec)] = 1/2 exactly,
    # independent of chi: the relative phase per flip period is always pi
    p = with_regime_ratio(replace(rubidium_preset(), l0=4), 0.02)
    d = derive(p)
    c = coeffs(1, 4, d, "quadratic")
    assert c.a_n / c.b_n == pytest.approx(0.5, rel=1e-14)


def test_coeffs_csv_format(d_rb):
    rows = [coeffs(1, 2, d_rb), coeffs(0, 2, d_rb)]
    text = adiabatic.format_coeffs_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "n,l0,a_n_rad_s,b_n_rad_s,pi_pulse_s"
    assert lines[1].startswith("1,2,0,492.60172808288")
    assert lines[2].endswith("inf")
