"""Two-state neutral-kaon model with phenomenological widths.

CP eigenstates are the fixed convention K1 = (K0 + K0bar)/sqrt(2),
K2 = (K0 - K0bar)/sqrt(2). Widths enter as the usual -i hbar Gamma / 2
diagonal in the CP basis; the CP-violating coupling `delta` is an explicit
knob, default 0. The widths themselves are external physical constants and
are always caller-supplied (see configs/).

The headline falsifiable statement lives in `epsilon_mixing`: with delta = 0
both the continuous generator and the chronon step map are diagonal in the
CP basis, so time discretization alone produces no K1 <-> K2 mixing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModes, InvalidInput, SingularMap, UndefinedRatio
from .evolution import (ChrononParams, NATURAL_UNITS, SI_SECONDS, Trajectory,
                        TwoState, UnitSystem, discrete_step_operator, evolve)
from .linalg2 import DEFAULT_TOL, eig2

BASES = ("cp", "flavor")

# Columns are K1 and K2 written in flavor coordinates; the matrix is real,
# symmetric and involutive, so it is its own inverse.
CP_TO_FLAVOR = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class KaonModel:
    """Mixing energy, short/long widths and the CP-violating coupling."""

    mixing_energy: float
    gamma_short: float
    gamma_long: float
    delta: complex = 0.0
    units: UnitSystem = NATURAL_UNITS

    def __post_init__(self):
        if not (np.isfinite(self.mixing_energy) and self.mixing_energy > 0):
            raise InvalidInput("mixing_energy must be positive and finite")
        if not (self.gamma_short >= self.gamma_long >= 0.0):
            raise InvalidInput("widths must satisfy gamma_short >= gamma_long >= 0")
        if not np.isfinite(complex(self.delta)):
            raise InvalidInput("delta must be finite")


def change_basis(amplitudes, source: str, target: str) -> np.ndarray:
    """Convert a two-component state between the cp and flavor bases."""
    for b in (source, target):
        if b not in BASES:
            raise InvalidInput(f"basis must be one of {BASES}, got {b!r}")
    a = np.asarray(amplitudes, dtype=np.complex128)
    if source == target:
        return a.copy()
    return CP_TO_FLAVOR @ a


def kaon_state(label: str, basis: str = "cp") -> np.ndarray:
    """Unit amplitudes of K0, K0bar, K1 or K2 in the requested basis."""
    cp = {
        "K0": np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0),
        "K0bar": np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0),
        "K1": np.array([1.0, 0.0], dtype=np.complex128),
        "K2": np.array([0.0, 1.0], dtype=np.complex128),
    }
    if label not in cp:
        raise InvalidInput(f"unknown state label {label!r}; use one of {sorted(cp)}")
    return change_basis(cp[label], "cp", basis)


def kaon_hamiltonian(model: KaonModel, basis: str = "cp") -> np.ndarray:
    """Effective (generally non-Hermitian) two-state Hamiltonian.

    In the cp basis:
        [[ E - i hbar Gamma_S / 2,  delta                   ],
         [ conj(delta),            -E - i hbar Gamma_L / 2  ]]
    and the flavor version is the fixed similarity transform of it.
    Hermitian only in the widthless, real-delta limit.
    """
    if basis not in BASES:
        raise InvalidInput(f"basis must be one of {BASES}, got {basis!r}")
    e = model.mixing_energy
    hb = model.units.hbar
    d = complex(model.delta)
    h_cp = np.array([
        [e - 0.5j * hb * model.gamma_short, d],
        [d.conjugate(), -e - 0.5j * hb * model.gamma_long],
    ], dtype=np.complex128)
    if basis == "cp":
        return h_cp
    return CP_TO_FLAVOR @ h_cp @ CP_TO_FLAVOR


def default_kaon_scales(tau_scale: float = 1.0) -> tuple[ChrononParams, KaonModel]:
    """Chronon parameters at the neutral-kaon scale, in SI-seconds units.

    E/hbar = 1e10 1/s gives tau = tau_scale * 1e-10 s. The returned model
    is a skeleton: its widths are zero placeholders, to be replaced with
    measured values (external constants, see configs/).
    """
    params = ChrononParams(energy=1.0e10, n=1, tau_scale=tau_scale)
    model = KaonModel(mixing_energy=1.0e10, gamma_short=0.0, gamma_long=0.0,
                      delta=0.0, units=SI_SECONDS)
    return params, model


def kaon_trajectory(model: KaonModel, engine: str, t_max: float, steps: int,
                    p: ChrononParams | None = None,
                    psi0_label: str = "K0") -> Trajectory:
    """Evolve a kaon state in the cp basis with either engine."""
    h = kaon_hamiltonian(model, "cp")
    psi0 = TwoState(kaon_state(psi0_label, "cp"))
    return evolve(h, psi0, engine, t_max, steps, p, model.units,
                  allow_nonhermitian=True)


def two_pion_intensity(traj: Trajectory, model: KaonModel,
                       basis: str = "cp") -> list[tuple[float, float]]:
    """Instantaneous 2-pion decay rate Gamma_S |<K1|psi(t)>|^2.

    `basis` names the basis the trajectory states are expressed in; flavor
    trajectories are converted.
    """
    return _channel_intensity(traj, model, basis, channel=0)


def three_pion_intensity(traj: Trajectory, model: KaonModel,
                         basis: str = "cp") -> list[tuple[float, float]]:
    """Instantaneous 3-pion decay rate Gamma_L |<K2|psi(t)>|^2."""
    return _channel_intensity(traj, model, basis, channel=1)


def _channel_intensity(traj, model, basis, channel):
    if basis not in BASES:
        raise InvalidInput(f"basis must be one of {BASES}, got {basis!r}")
    states = traj.states
    if basis == "flavor":
        states = states @ CP_TO_FLAVOR.T  # involutive and symmetric
    gamma = model.gamma_short if channel == 0 else model.gamma_long
    vals = gamma * np.abs(states[:, channel]) ** 2
    return list(zip(traj.times.tolist(), vals.tolist()))


def _decay_keys(model: KaonModel, p: ChrononParams, engine: str,
                tol: float):
    """Eigenpairs of the requested engine's map plus their decay-rate keys."""
    h_cp = kaon_hamiltonian(model, "cp")
    if engine == "continuous":
        pairs = eig2(h_cp, tol)
        if pairs[0].degenerate:
            raise DegenerateModes("continuous generator is degenerate")
        keys = [-2.0 * pair.value.imag / model.units.hbar for pair in pairs]
        return pairs, keys
    if engine == "discrete":
        u = discrete_step_operator(h_cp, p, model.units)
        pairs = eig2(u, tol)
        if pairs[0].degenerate:
            raise DegenerateModes("discrete step map is degenerate")
        step = p.step(model.units)
        keys = []
        for pair in pairs:
            mag = abs(pair.value)
            if mag == 0.0:
                raise SingularMap("step map has a zero eigenvalue")
            keys.append(-2.0 / step * math.log(mag))
        return pairs, keys
    raise InvalidInput(f"engine must be 'continuous' or 'discrete', got {engine!r}")


def epsilon_mixing(model: KaonModel, p: ChrononParams, engine: str,
                   tol: float = DEFAULT_TOL) -> complex:
    """Wrong-CP admixture <K1|v_slow> / <K2|v_slow> of the long-lived mode.

    The long-lived mode is the one that dominates at late times: smallest
    decay rate -2 Im(h)/hbar for the continuous generator, smallest
    effective rate -(2/(n tau)) ln|lambda| for the discrete step map (the
    latter stays meaningful when the map amplifies). Exact rate ties, e.g.
    the widthless limit, are broken toward the larger K2 component, the
    state that would be long-lived at infinitesimal widths.
    """
    pairs, keys = _decay_keys(model, p, engine, tol)
    key_scale = max(abs(keys[0]), abs(keys[1]))
    if abs(keys[0] - keys[1]) <= 1e-12 * key_scale or key_scale == 0.0:
        w0 = abs(pairs[0].vector[1])
        w1 = abs(pairs[1].vector[1])
        if abs(w0 - w1) <= 1e-12:
            raise DegenerateModes("modes have equal decay rate and equal CP content")
        slow = pairs[0] if w0 > w1 else pairs[1]
    else:
        slow = pairs[0] if keys[0] < keys[1] else pairs[1]
    denom = complex(slow.vector[1])
    if denom == 0.0:
        raise UndefinedRatio("long-lived mode has no K2 component")
    return complex(slow.vector[0]) / denom


@dataclass(frozen=True)
class ModeWidths:
    """Continuous vs effective (discrete-map) decay rates of one mode.

    Negative gamma_effective means the chronon map amplifies that mode; the
    value is reported as-is.
    """

    h_generator: complex
    lambda_step: complex
    gamma_continuous: float
    gamma_effective: float


def width_shift(model: KaonModel, p: ChrononParams,
                tol: float = DEFAULT_TOL) -> tuple[ModeWidths, ModeWidths]:
    """Per-mode decay rates of the generator vs the chronon step map.

    Modes are ordered fast first (larger continuous width, ties broken by
    larger Re h, i.e. the K1-like mode first in the CP-conserving model).
    """
    h_cp = kaon_hamiltonian(model, "cp")
    pairs = eig2(h_cp, tol)
    hb = model.units.hbar
    step = p.step(model.units)
    recs = []
    for pair in pairs:
        lam = 1.0 - 1j * pair.value * step / hb
        mag = abs(lam)
        if mag == 0.0:
            raise SingularMap("step map has a zero eigenvalue")
        recs.append(ModeWidths(
            h_generator=pair.value,
            lambda_step=complex(lam),
            gamma_continuous=-2.0 * pair.value.imag / hb,
            gamma_effective=-2.0 / step * math.log(mag),
        ))
    recs.sort(key=lambda r: (-r.gamma_continuous, -r.h_generator.real))
    return recs[0], recs[1]
