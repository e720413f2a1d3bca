"""Two-state evolution: continuous propagator and the quantized-time step map.

The discrete engine rearranges the forward-difference equation
    i hbar [psi(t + n tau) - psi(t)] / (n tau) = H psi(t)
into the explicit update psi(t + n tau) = (I - i H n tau / hbar) psi(t) and
applies it repeatedly on the chronon grid. The continuous engine is the
exact exp(-i H t / hbar) baseline. Norms are tracked, never renormalized:
the norm defect IS the observable of interest here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GridMismatch, InvalidInput
from .linalg2 import (DEFAULT_TOL, IDENTITY2, as_operator, exp2, is_hermitian,
                      require_finite)

ENGINES = ("continuous", "discrete")

# Relative tolerance for "t_max is an integer number of chronon steps".
_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class UnitSystem:
    """Unit bookkeeping; hbar in action units, labels are cosmetic."""

    hbar: float = 1.0
    time_unit: str = "natural"
    energy_unit: str = "natural"

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidInput("hbar must be positive and finite")


NATURAL_UNITS = UnitSystem()

# Time in seconds, energies expressed as hbar times an angular frequency,
# so hbar is numerically 1 and E/hbar is read directly in 1/s.
SI_SECONDS = UnitSystem(hbar=1.0, time_unit="s", energy_unit="hbar/s")


@dataclass(frozen=True)
class ChrononParams:
    """Energy scale E, step multiplier n and the chronon tau = tau_scale * hbar / E.

    tau_scale = 1 is the quantized-time point tau = hbar / E; smaller values
    interpolate toward the continuum and share the same code path.
    """

    energy: float
    n: int = 1
    tau_scale: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.energy) and self.energy > 0):
            raise InvalidInput("energy must be positive and finite")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput("n must be a positive integer")
        if not (np.isfinite(self.tau_scale) and self.tau_scale > 0):
            raise InvalidInput("tau_scale must be positive and finite")

    def tau(self, units: UnitSystem = NATURAL_UNITS) -> float:
        return self.tau_scale * units.hbar / self.energy

    def step(self, units: UnitSystem = NATURAL_UNITS) -> float:
        """Grid spacing n * tau of the discrete evolution."""
        return self.n * self.tau(units)


@dataclass(frozen=True)
class TwoState:
    """Two complex amplitudes at a given time; norm is tracked, not pinned to 1."""

    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (2,):
            raise InvalidInput(f"expected 2 amplitudes, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInput("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _amplitudes_of(psi0) -> np.ndarray:
    if isinstance(psi0, TwoState):
        return psi0.amplitudes
    return TwoState(psi0).amplitudes


@dataclass(frozen=True)
class Trajectory:
    """States on a strictly increasing, uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    engine: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        s = np.asarray(self.states, dtype=np.complex128)
        if t.ndim != 1 or s.shape != (t.shape[0], 2):
            raise InvalidInput("times and states have mismatched shapes")
        if self.engine not in ENGINES:
            raise InvalidInput(f"unknown engine tag {self.engine!r}")
        d = np.diff(t)
        if t.shape[0] > 1:
            h = d[0]
            # spacing jitter is measured against the grid span: double-
            # precision grids cannot be more uniform than eps * t_max
            span = float(t[-1] - t[0])
            if h <= 0 or np.any(d <= 0) or \
                    np.max(np.abs(d - h)) > 1e-12 * max(abs(h), span):
                raise InvalidInput("time grid must be strictly increasing and uniform")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def state(self, k: int) -> TwoState:
        return TwoState(self.states[k], float(self.times[k]))

    def norm_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)


def symmetric_hamiltonian(energy: float, diag: float = 0.0) -> np.ndarray:
    """The symmetric two-level Hamiltonian [[diag, E], [E, diag]].

    Equal diagonal entries (only relative energies matter, so they default
    to 0) and equal real off-diagonal coupling E.
    """
    if not (np.isfinite(energy) and np.isfinite(diag)):
        raise InvalidInput("energy and diag must be finite")
    return np.array([[diag, energy], [energy, diag]], dtype=np.complex128)


def continuous_propagator(h, t: float, units: UnitSystem = NATURAL_UNITS,
                          allow_nonhermitian: bool = False) -> np.ndarray:
    """exp(-i H t / hbar); unitary whenever H is Hermitian."""
    a = as_operator(h)
    if not allow_nonhermitian and not is_hermitian(a, DEFAULT_TOL):
        raise InvalidInput(
            "H is not Hermitian; pass allow_nonhermitian=True for open systems")
    return exp2(a, -1j * t / units.hbar)


def discrete_step_operator(h, p: ChrononParams,
                           units: UnitSystem = NATURAL_UNITS) -> np.ndarray:
    """One-chronon update map U = I - i H (n tau) / hbar.

    U is a polynomial in H, so it shares H's eigenvectors exactly; only the
    eigenvalues are distorted by the discretization.
    """
    a = as_operator(h)
    require_finite(a)
    return IDENTITY2 - (1j * p.step(units) / units.hbar) * a


def evolve(h, psi0, engine: str, t_max: float, steps: int,
           p: ChrononParams | None = None, units: UnitSystem = NATURAL_UNITS,
           allow_nonhermitian: bool = False) -> Trajectory:
    """Generate a trajectory from psi0 at t = 0 out to t_max.

    engine="discrete" repeats the chronon step map; the grid spacing must
    equal n * tau, so steps must be t_max / (n tau) (rounded within 1e-9
    relative), otherwise GridMismatch is raised. engine="continuous"
    evaluates the exact propagator on an arbitrary uniform grid.
    """
    a = as_operator(h)
    require_finite(a)
    amps = _amplitudes_of(psi0)
    if engine not in ENGINES:
        raise InvalidInput(f"engine must be one of {ENGINES}, got {engine!r}")
    if int(steps) != steps or steps < 1:
        raise InvalidInput("steps must be a positive integer")
    steps = int(steps)

    if engine == "discrete":
        if p is None:
            raise InvalidInput("discrete engine needs ChrononParams")
        dt = p.step(units)
        k_float = t_max / dt
        k = int(round(k_float))
        if k < 1 or abs(k_float - k) > _GRID_RTOL * max(abs(k_float), 1.0):
            raise GridMismatch(
                f"t_max={t_max} is not an integer multiple of n*tau={dt}")
        if k != steps:
            raise GridMismatch(
                f"steps={steps} but t_max/(n*tau)={k}; the discrete grid is n*tau")
        u = discrete_step_operator(a, p, units)
        states = kernels.step_trajectory(u, amps, steps)
        times = np.arange(steps + 1, dtype=np.float64) * dt
        return Trajectory(times, states, "discrete")

    if not (np.isfinite(t_max) and t_max > 0):
        raise InvalidInput("continuous engine needs t_max > 0")
    if not allow_nonhermitian and not is_hermitian(a, DEFAULT_TOL):
        raise InvalidInput(
            "H is not Hermitian; pass allow_nonhermitian=True for open systems")
    times = np.linspace(0.0, t_max, steps + 1)
    gen = (-1j / units.hbar) * a
    props = kernels.propagator_batch(gen, times)
    states = props @ amps
    return Trajectory(times, states, "continuous")


def probability_series(traj: Trajectory, direction,
                       normalized: bool = False) -> list[tuple[float, float]]:
    """(t, |<direction|state>|^2) along a trajectory.

    Raw by default (no division by the total norm, which the discrete map
    does not conserve); normalized=True divides by norm^2 at each time.
    """
    d = np.asarray(direction, dtype=np.complex128)
    if d.shape != (2,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise InvalidInput("direction must be a unit 2-vector")
    vals = np.abs(traj.states @ d.conj()) ** 2
    if normalized:
        vals = vals / traj.norm_sq()
    return list(zip(traj.times.tolist(), vals.tolist()))


def norm_series(traj: Trajectory) -> list[tuple[float, float]]:
    """(t, norm^2) along a trajectory; constant only for unitary evolution."""
    return list(zip(traj.times.tolist(), traj.norm_sq().tolist()))
