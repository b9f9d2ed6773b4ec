"""Truncated momentum-ladder dynamics for one atom in one field Fock branch.

A Bragg-incident atom couples momentum states P_l = P_{l0} + l*hbar*k with l
even. In the rotating frame the amplitude C_l obeys

    i dC_l/dt = w_rec*l*(l+l0)*C_l - (chi*n/2)*(C_{l+2} + C_{l-2}),

a real symmetric tridiagonal generator once the even orders are packed into a
contiguous index. Orders l=0 and l=-l0 are degenerate at zero energy (the two
Bragg-resonant propagation directions); everything else is detuned by
multiples of w_rec, which is what confines the dynamics to two modes when
w_rec >> chi*n.

Evolution uses the exact propagator from an eigendecomposition of the
(time-independent) tridiagonal generator, so norm is conserved to machine
precision for any duration. Truncation is policed, not assumed: population
reaching the ladder edges above `edge_threshold` aborts with TruncationError.

A mirror-incident atom (initial momentum -P_{l0}) obeys the same equations on
a sign-flipped momentum grid; states carry a `direction` flag and the same
Hamiltonian is reused.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .params import DerivedParams

DEFAULT_GUARD = 8       # extra orders kept beyond the resonant pair
MIN_GUARD = 4           # below this the truncation cannot be trusted
DEFAULT_TOL = 1e-9
DEFAULT_EDGE_THRESHOLD = 1e-10


class TruncationError(RuntimeError):
    """Population reached the ladder boundary; widen the range or fix the regime."""


def default_range(l0: int, guard: int = DEFAULT_GUARD) -> tuple[int, int]:
    """Symmetric-guard ladder range bracketing both resonant orders."""
    if guard < MIN_GUARD:
        raise ValueError(f"guard must be >= {MIN_GUARD}, got {guard}")
    guard += guard % 2
    return (-l0 - guard, guard)


def _check_range(l_min: int, l_max: int, l0: int) -> None:
    if l_min % 2 or l_max % 2:
        raise ValueError(f"ladder range [{l_min}, {l_max}] must have even endpoints")
    if l_min > -l0 - MIN_GUARD or l_max < MIN_GUARD:
        raise ValueError(
            f"ladder range [{l_min}, {l_max}] must bracket the resonant orders "
            f"[-{l0}, 0] with a guard of at least {MIN_GUARD}"
        )


@dataclass(frozen=True)
class LadderState:
    """Complex amplitudes over even ladder orders l_min..l_max (step 2).

    `direction` is +1 for incidence with momentum +P_{l0}, -1 for the mirror
    ladder; index l then labels physical momentum direction*(l0/2 + l) in
    units of hbar*k. `n` is the photon number of the field branch this state
    evolves under, `time` the accumulated interaction time in seconds.
    """

    amplitudes: np.ndarray
    l_min: int
    l_max: int
    l0: int
    n: int
    direction: int = 1
    time: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        _check_range(self.l_min, self.l_max, self.l0)
        if self.direction not in (-1, 1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")
        expected = (self.l_max - self.l_min) // 2 + 1
        if amps.shape != (expected,):
            raise ValueError(
                f"expected {expected} amplitudes for range "
                f"[{self.l_min}, {self.l_max}], got shape {amps.shape}"
            )

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_max + 1, 2)

    def index_of(self, l: int) -> int:
        if l % 2 or not self.l_min <= l <= self.l_max:
            raise ValueError(f"order {l} outside ladder [{self.l_min}, {self.l_max}]")
        return (l - self.l_min) // 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def momentum_orders_hbar_k(self) -> np.ndarray:
        """Physical momentum of each index in units of hbar*k (signed)."""
        return self.direction * (self.l0 // 2 + self.orders)


@dataclass(frozen=True)
class LadderHamiltonian:
    """Tridiagonal generator of the ladder equations, rad/s.

    diagonal[i] = w_rec*l*(l+l0) for order l at index i (minus chi*n when the
    constant light shift is kept); off_diagonal couples l <-> l+-2.
    """

    diagonal: np.ndarray
    off_diagonal: float
    l_min: int
    l_max: int
    l0: int
    n: int
    include_stark: bool = False

    def __post_init__(self):
        diag = np.array(self.diagonal, dtype=np.float64)
        object.__setattr__(self, "diagonal", diag)
        _check_range(self.l_min, self.l_max, self.l0)
        expected = (self.l_max - self.l_min) // 2 + 1
        if diag.shape != (expected,):
            raise ValueError(f"diagonal shape {diag.shape}, expected ({expected},)")

    @property
    def size(self) -> int:
        return self.diagonal.shape[0]

    def matrix(self) -> np.ndarray:
        """Dense matrix form (real symmetric)."""
        m = np.diag(self.diagonal)
        off = np.full(self.size - 1, self.off_diagonal)
        m += np.diag(off, 1) + np.diag(off, -1)
        return m


def build_hamiltonian(
    n: int,
    l0: int,
    d: DerivedParams,
    l_range: tuple[int, int] | None = None,
    include_stark: bool = False,
) -> LadderHamiltonian:
    """Assemble the ladder generator for a branch with n photons.

    With include_stark the constant -chi*n light shift (dropped from the rate
    equations because it is common to every order) is kept on the diagonal;
    it matters only for the phase between different field branches.
    """
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    if l0 < 2 or l0 % 2:
        raise ValueError(f"l0 must be a positive even integer, got {l0}")
    l_min, l_max = l_range if l_range is not None else default_range(l0)
    _check_range(l_min, l_max, l0)
    orders = np.arange(l_min, l_max + 1, 2)
    diagonal = d.recoil_frequency * orders * (orders + l0)
    if include_stark:
        diagonal = diagonal - d.chi * n
    return LadderHamiltonian(
        diagonal=diagonal,
        off_diagonal=-d.chi * n / 2.0,
        l_min=l_min,
        l_max=l_max,
        l0=l0,
        n=n,
        include_stark=include_stark,
    )


def initial_state(
    l0: int,
    direction: int = 1,
    l_range: tuple[int, int] | None = None,
    n: int = 1,
) -> LadderState:
    """Unit amplitude at ladder index l=0: incidence along direction*P_{l0}."""
    l_min, l_max = l_range if l_range is not None else default_range(l0)
    amps = np.zeros((l_max - l_min) // 2 + 1, dtype=np.complex128)
    amps[(0 - l_min) // 2] = 1.0
    return LadderState(
        amplitudes=amps, l_min=l_min, l_max=l_max, l0=l0, n=n, direction=direction
    )


def _check_compatible(s: LadderState, h: LadderHamiltonian) -> None:
    if (s.l_min, s.l_max, s.l0) != (h.l_min, h.l_max, h.l0):
        raise ValueError(
            f"state range [{s.l_min}, {s.l_max}] l0={s.l0} does not match "
            f"Hamiltonian [{h.l_min}, {h.l_max}] l0={h.l0}"
        )
    if s.n != h.n:
        raise ValueError(f"state is branch n={s.n}, Hamiltonian is n={h.n}")


def sample_evolution(
    s: LadderState,
    h: LadderHamiltonian,
    times: np.ndarray,
    edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
) -> np.ndarray:
    """Amplitudes at each requested time offset (seconds from s.time).

    Returns an array of shape (len(times), size). Boundary population above
    edge_threshold at any sample raises TruncationError.
    """
    _check_compatible(s, h)
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise ValueError("sample times must be >= 0")
    if h.size == 1:
        evals = h.diagonal.copy()
        evecs = np.ones((1, 1))
    else:
        evals, evecs = eigh_tridiagonal(
            h.diagonal, np.full(h.size - 1, h.off_diagonal)
        )
    coeffs = evecs.T @ s.amplitudes
    phases = np.exp(-1j * np.outer(times, evals))
    out = phases * coeffs[np.newaxis, :] @ evecs.T
    edge = np.abs(out[:, [0, -1]]) ** 2
    if np.any(edge > edge_threshold):
        worst = float(edge.max())
        raise TruncationError(
            f"boundary population {worst:.3e} exceeds edge threshold "
            f"{edge_threshold:.1e}; ladder range [{h.l_min}, {h.l_max}] is too "
            "narrow for this coupling"
        )
    return out


def evolve(
    s: LadderState,
    h: LadderHamiltonian,
    duration: float,
    tol: float = DEFAULT_TOL,
    edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
    checkpoints: int = 32,
) -> LadderState:
    """Propagate the state by `duration` seconds under h.

    The propagator is exact (eigendecomposition), so the norm-drift contract
    |norm - 1| <= tol holds with large margin. Truncation validity is checked
    at `checkpoints` intermediate times plus the endpoint.
    """
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if duration == 0:
        return s
    times = np.linspace(0.0, duration, max(int(checkpoints), 1) + 1)[1:]
    samples = sample_evolution(s, h, times, edge_threshold=edge_threshold)
    final = samples[-1]
    drift = abs(np.linalg.norm(final) - np.linalg.norm(s.amplitudes))
    if drift > tol:
        raise RuntimeError(f"norm drift {drift:.3e} exceeds tol {tol:.1e}")
    return replace(s, amplitudes=final, time=s.time + duration)


def populations(s: LadderState) -> dict[int, float]:
    """|amplitude|^2 keyed by ladder order."""
    probs = np.abs(s.amplitudes) ** 2
    return {int(l): float(p) for l, p in zip(s.orders, probs)}


def two_mode_population(amplitudes: np.ndarray, l_min: int, l0: int) -> float:
    """Total population on the resonant pair {0, -l0} for packed amplitudes."""
    i0 = (0 - l_min) // 2
    im = (-l0 - l_min) // 2
    return float(np.abs(amplitudes[i0]) ** 2 + np.abs(amplitudes[im]) ** 2)


def extract_flip_frequency(times: np.ndarray, p_plus: np.ndarray, p_flip: np.ndarray) -> float:
    """Angular frequency of the population exchange between the two resonant orders.

    Works on sampled populations only (no model fit): within the two-mode
    subspace p_flip/(p_plus+p_flip) = sin^2(w*t/2), so cos(w*t) is recovered
    directly, its sign-resolved angle unwrapped, and the slope fitted by
    least squares. Needs at least ~half an oscillation inside the window.
    """
    times = np.asarray(times, dtype=np.float64)
    q = np.asarray(p_flip) / (np.asarray(p_plus) + np.asarray(p_flip))
    c = np.clip(1.0 - 2.0 * q, -1.0, 1.0)
    sin_sign = np.sign(np.gradient(q, times, edge_order=1))
    angle = np.unwrap(np.arctan2(sin_sign * np.sqrt(1.0 - c * c), c))
    slope = np.polyfit(times, angle, 1)[0]
    return float(abs(slope))


def format_timeseries_csv(
    times: np.ndarray, recoil_frequency: float, pops: np.ndarray, orders: np.ndarray
) -> str:
    """CSV text: columns t_s, tau (= w_rec*t), then p_<l> per ladder order."""
    header = "t_s,tau," + ",".join(f"p_{int(l)}" for l in orders)
    lines = [header]
    for t, row in zip(times, pops):
        cells = [_fmt(t), _fmt(recoil_frequency * t)]
        cells.extend(_fmt(p) for p in row)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".15g")
