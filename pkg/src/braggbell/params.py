"""Physical inputs and derived scales for cavity Bragg deflection.

All angular frequencies are rad/s, lengths in m, masses in kg. The one
derived scale hierarchy that matters: the recoil frequency w_rec = hbar k^2/2M
must dominate the effective Rabi frequency chi*n = |g|^2 n / 2*detuning for
the two-mode (Bragg) regime to hold.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, replace

HBAR = 1.054571817e-34  # J*s (CODATA 2018)


class ParameterError(ValueError):
    """Invalid physical parameter or configuration input."""


@dataclass(frozen=True)
class PhysicalParams:
    """Experimental constants for one atom/cavity configuration.

    mass: atomic mass, kg
    wavelength: cavity field wavelength, m
    coupling_g: atom-field coupling constant g, rad/s
    detuning: field-atom detuning (nu - w), rad/s; must be nonzero
    n0: photon number of the non-vacuum Fock branch, >= 1
    l0: Bragg order, positive even integer (incident momentum (l0/2)*hbar*k;
        the +/- incidence direction is an initial condition, not a parameter)
    """

    mass: float
    wavelength: float
    coupling_g: float
    detuning: float
    n0: int = 1
    l0: int = 2

    def __post_init__(self):
        if self.mass <= 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if self.wavelength <= 0:
            raise ParameterError(f"wavelength must be positive, got {self.wavelength}")
        if self.detuning == 0:
            raise ParameterError("detuning must be nonzero")
        if int(self.n0) != self.n0 or self.n0 < 1:
            raise ParameterError(f"n0 must be an integer >= 1, got {self.n0}")
        if int(self.l0) != self.l0 or self.l0 < 2 or self.l0 % 2 != 0:
            raise ParameterError(f"l0 must be a positive even integer, got {self.l0}")


@dataclass(frozen=True)
class DerivedParams:
    """Scales computed from PhysicalParams.

    wavenumber: k = 2*pi/wavelength, rad/m
    recoil_frequency: w_rec = hbar*k^2/2M, rad/s
    chi: |g|^2/(2*detuning), rad/s; carries the sign of the detuning
    regime_ratio: chi*n0/w_rec, dimensionless
    """

    wavenumber: float
    recoil_frequency: float
    chi: float
    regime_ratio: float


def derive(p: PhysicalParams) -> DerivedParams:
    """Compute wavenumber, recoil frequency, chi and the regime ratio."""
    k = 2.0 * math.pi / p.wavelength
    w_rec = HBAR * k * k / (2.0 * p.mass)
    chi = abs(p.coupling_g) ** 2 / (2.0 * p.detuning)
    return DerivedParams(
        wavenumber=k,
        recoil_frequency=w_rec,
        chi=chi,
        regime_ratio=chi * p.n0 / w_rec,
    )


def rubidium_preset() -> PhysicalParams:
    """Rubidium atoms in a 0.8 um cavity field, first-order Bragg incidence."""
    return PhysicalParams(
        mass=1.42e-25,                      # kg
        wavelength=0.8e-6,                  # m
        coupling_g=2.0 * math.pi * 112e3,   # rad/s
        detuning=2.0 * math.pi * 80e6,      # rad/s
        n0=1,
        l0=2,
    )


PRESETS = {"rubidium": rubidium_preset}


def get_preset(name: str) -> PhysicalParams:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ParameterError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


class RegimeVerdict(enum.Enum):
    GOOD = "good"
    MARGINAL = "marginal"
    VIOLATED = "violated"


@dataclass(frozen=True)
class RegimeThresholds:
    """Cut points on |chi*n/w_rec| separating the verdicts."""

    good: float = 0.05
    marginal: float = 0.2


def validate_bragg_regime(
    d: DerivedParams, n: int, thresholds: RegimeThresholds = RegimeThresholds()
) -> RegimeVerdict:
    """Classify how well w_rec >> chi*n holds for a branch with n photons."""
    ratio = abs(d.chi * n / d.recoil_frequency)
    if ratio <= thresholds.good:
        return RegimeVerdict.GOOD
    if ratio <= thresholds.marginal:
        return RegimeVerdict.MARGINAL
    return RegimeVerdict.VIOLATED


def with_regime_ratio(p: PhysicalParams, ratio: float) -> PhysicalParams:
    """Rescale the coupling g so that |chi|*n0/w_rec equals `ratio` exactly.

    The sign of chi still follows the detuning; ratio must be positive.
    """
    if ratio <= 0:
        raise ParameterError(f"regime ratio must be positive, got {ratio}")
    d = derive(p)
    g = math.sqrt(2.0 * abs(p.detuning) * d.recoil_frequency * ratio / p.n0)
    return replace(p, coupling_g=g)


# --- flat key=value configuration -------------------------------------------
#
# Recognized keys; *_2pi_hz variants take a value in Hz and multiply by 2*pi,
# matching how such couplings are usually quoted.

_FLOAT_KEYS = {
    "mass_kg": "mass",
    "wavelength_m": "wavelength",
    "g_rad_s": "coupling_g",
    "detuning_rad_s": "detuning",
}
_TWO_PI_KEYS = {
    "g_2pi_hz": "coupling_g",
    "detuning_2pi_hz": "detuning",
}
_INT_KEYS = {"n0": "n0", "l0": "l0"}

CONFIG_KEYS = tuple(sorted({**_FLOAT_KEYS, **_TWO_PI_KEYS, **_INT_KEYS}))

ENV_CONFIG_VAR = "BRAGG_CONFIG"


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParameterError(
                f"{source}:{lineno}: unknown key {key!r}; known keys: "
                + ", ".join(CONFIG_KEYS)
            )
        if key in values:
            raise ParameterError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path: str | os.PathLike) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    """Parse repeated `key=value` CLI overrides; later entries win."""
    values: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ParameterError(f"override {pair!r} is not of the form key=value")
        key, value = (part.strip() for part in pair.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParameterError(
                f"unknown override key {key!r}; known keys: " + ", ".join(CONFIG_KEYS)
            )
        values[key] = value
    return values


def apply_config(base: PhysicalParams, values: dict[str, str]) -> PhysicalParams:
    """Apply parsed key=value pairs on top of `base`.

    Plain and *_2pi_hz spellings of the same quantity may not be mixed within
    one source.
    """
    fields: dict[str, object] = {}
    targets_seen: dict[str, str] = {}
    for key, raw in values.items():
        if key in _FLOAT_KEYS:
            target, val = _FLOAT_KEYS[key], _parse_float(key, raw)
        elif key in _TWO_PI_KEYS:
            target, val = _TWO_PI_KEYS[key], 2.0 * math.pi * _parse_float(key, raw)
        else:
            target, val = _INT_KEYS[key], _parse_int(key, raw)
        if target in targets_seen:
            raise ParameterError(
                f"keys {targets_seen[target]!r} and {key!r} both set {target}"
            )
        targets_seen[target] = key
        fields[target] = val
    return replace(base, **fields) if fields else base


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParameterError(f"key {key!r}: cannot parse {raw!r} as a number") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"key {key!r}: cannot parse {raw!r} as an integer") from None


def resolve_params(
    preset: str = "rubidium",
    config_path: str | os.PathLike | None = None,
    overrides: list[str] | None = None,
) -> PhysicalParams:
    """Build parameters with precedence: overrides > config file > preset."""
    p = get_preset(preset)
    if config_path is not None:
        p = apply_config(p, load_config(config_path))
    if overrides:
        p = apply_config(p, parse_overrides(overrides))
    return p
