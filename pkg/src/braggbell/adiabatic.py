"""Closed-form two-level reduction of the Bragg ladder.

Eliminating the intermediate orders between l=0 and l=-l0 leaves two coupled
amplitudes with a common level shift a_n and a coupling b_n:

    i dc+/dt = a_n c+ - (b_n/2) c-,
    i dc-/dt = a_n c- - (b_n/2) c+.

For l0=2 there is nothing to eliminate: a_n = 0 and b_n = chi*n. For higher
orders b_n = (chi*n)^(l0/2) / ((2 w_rec)^(l0/2-1) * [(l0-2)(l0-4)...4*2]^2).

The companion closed form for the shift, a_n = -(chi*n/2)/(2 w_rec (l0-2)),
is dimensionless as written, so two conventions are provided: `linear`
evaluates that expression literally (reading the result as rad/s), and
`quadratic` uses the second-order elimination shift (chi*n/2)^2/(2 w_rec
(l0-2)), which has correct units. The shift is a common phase inside one
field branch; it only becomes observable between branches, and `validate`
can measure it from the full ladder to compare the conventions.

solve() is the exact unitary propagator exp(-i(a*I - (b/2)*sigma_x)t): the
cosine/sine population content matches the textbook flip formulas while the
phases carry the factor i on the sine terms and the full e^{-i a t} that
unitarity requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import DerivedParams

SHIFT_MODES = ("quadratic", "linear")


@dataclass(frozen=True)
class TwoLevelCoeffs:
    """Level shift a_n and coupling b_n (rad/s, b_n >= 0) for one branch."""

    a_n: float
    b_n: float
    n: int
    l0: int


@dataclass(frozen=True)
class TwoLevelSolution:
    """Amplitudes on P_{+l0} / P_{-l0} after interaction time t."""

    c_plus: complex
    c_minus: complex
    t: float


def _check_order(l0: int) -> None:
    if l0 < 2 or l0 % 2:
        raise ValueError(f"l0 must be a positive even integer, got {l0}")


def level_shift(n: int, l0: int, d: DerivedParams, mode: str = "quadratic") -> float:
    """Common shift a_n of the resonant pair, per the chosen convention."""
    _check_order(l0)
    if mode not in SHIFT_MODES:
        raise ValueError(f"shift mode must be one of {SHIFT_MODES}, got {mode!r}")
    if l0 == 2 or n == 0:
        return 0.0
    half = d.chi * n / 2.0
    denom = 2.0 * d.recoil_frequency * (l0 - 2)
    if mode == "linear":
        return -half / denom
    return half * half / denom


def coupling(n: int, l0: int, d: DerivedParams) -> float:
    """|b_n|: flip rate of the resonant pair."""
    _check_order(l0)
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    chi_n = abs(d.chi) * n
    if l0 == 2:
        return chi_n
    # product of even integers (l0-2)(l0-4)...4*2, squared in the denominator
    even_product = math.prod(range(2, l0 - 1, 2))
    return chi_n ** (l0 // 2) / (
        (2.0 * d.recoil_frequency) ** (l0 // 2 - 1) * even_product**2
    )


def coeffs(
    n: int, l0: int, d: DerivedParams, shift_mode: str = "quadratic"
) -> TwoLevelCoeffs:
    return TwoLevelCoeffs(
        a_n=level_shift(n, l0, d, shift_mode),
        b_n=coupling(n, l0, d),
        n=n,
        l0=l0,
    )


def solve(
    init: tuple[complex, complex], c: TwoLevelCoeffs, t: float
) -> TwoLevelSolution:
    """Exact unitary evolution of (c_plus, c_minus) for time t seconds."""
    c_plus0, c_minus0 = complex(init[0]), complex(init[1])
    norm = abs(c_plus0) ** 2 + abs(c_minus0) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"initial amplitudes must be normalized, |.|^2 = {norm}")
    half = 0.5 * c.b_n * t
    phase = complex(math.cos(c.a_n * t), -math.sin(c.a_n * t))
    cos_h, sin_h = math.cos(half), math.sin(half)
    return TwoLevelSolution(
        c_plus=phase * (c_plus0 * cos_h + 1j * c_minus0 * sin_h),
        c_minus=phase * (c_minus0 * cos_h + 1j * c_plus0 * sin_h),
        t=t,
    )


def pulse_times(c: TwoLevelCoeffs, s: int, offset_r: int = 0) -> tuple[float, float]:
    """Interaction times (t1, t2) = (s*pi/b_n, t1 + 2*offset_r*pi/b_n).

    s must be odd and positive (full population flip); offset_r shifts the
    second time by whole flip periods, so both atoms still exit flipped.
    """
    if s < 1 or s % 2 == 0:
        raise ValueError(f"s must be a positive odd integer, got {s}")
    if c.b_n <= 0:
        raise ValueError(f"pulse times undefined for b_n = {c.b_n} (n = {c.n})")
    t1 = s * math.pi / c.b_n
    t2 = t1 + 2.0 * offset_r * math.pi / c.b_n
    if t2 < 0:
        raise ValueError(f"offset_r = {offset_r} makes the second time negative")
    return t1, t2


def format_coeffs_csv(rows: list[TwoLevelCoeffs]) -> str:
    """CSV table of coefficients: n, l0, a_n, b_n and the s=1 flip time."""
    lines = ["n,l0,a_n_rad_s,b_n_rad_s,pi_pulse_s"]
    for c in rows:
        pi_pulse = math.pi / c.b_n if c.b_n > 0 else math.inf
        lines.append(
            f"{c.n},{c.l0},{format(c.a_n, '.15g')},"
            f"{format(c.b_n, '.15g')},{format(pi_pulse, '.15g')}"
        )
    return "\n".join(lines) + "\n"
