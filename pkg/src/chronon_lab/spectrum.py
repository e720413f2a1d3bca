"""Complex effective energies of the chronon step map.

Two definitions coexist on purpose:

* the exact log-map energy (i hbar / (n tau)) Log(lambda), the unique
  principal-branch energy whose continuous evolution reproduces the one-step
  multiplier, used for everything quantitative, and
* the first-order expression E + i E^2 tau / hbar, kept as a labeled
  alternative even though its imaginary part is twice the second-order
  series term of the exact energy (at n = 1). Both are reported, neither is
  silently "corrected".

The `convention` flag records which phase ansatz the textual reading of an
imaginary part uses: "paper" reads phases as e^{+iEt/hbar} (positive Im is
spoken of as decay), "standard" as e^{-iEt/hbar} (positive Im is growth).
The magnitude statements (|lambda|, e-folding times) are convention-free.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BranchCut, ChrononLabError, InvalidInput, SingularMap,
                     UndefinedMeasure, UndefinedRatio)
from .evolution import (ChrononParams, NATURAL_UNITS, UnitSystem,
                        discrete_step_operator)
from .linalg2 import DEFAULT_TOL, as_operator, eig2, is_hermitian, log2, non_hermiticity

CONVENTIONS = ("paper", "standard")


@dataclass(frozen=True)
class ModeRecord:
    """Per-mode spectral data of the chronon step map."""

    mode_index: int
    eigvec: np.ndarray
    h_continuous: float
    lambda_step: complex
    h_eff_exact: complex
    h_first_order: complex
    step_magnitude: float
    efold_time: float


@dataclass(frozen=True)
class EffectiveSpectrum:
    """Both modes plus the non-Hermiticity of the effective generator.

    nu_nonhermitian is None when the step map is the identity (zero
    Hamiltonian), where the measure is undefined.
    """

    modes: tuple[ModeRecord, ModeRecord]
    chronon: ChrononParams
    convention: str
    nu_nonhermitian: float | None


def step_eigenvalue(h: complex, p: ChrononParams,
                    units: UnitSystem = NATURAL_UNITS) -> complex:
    """One-step multiplier lambda = 1 - i h (n tau) / hbar of an H-eigenmode."""
    return 1.0 - 1j * complex(h) * p.step(units) / units.hbar


def branch_cut_distance(lam: complex) -> float:
    """Distance from lambda to the principal-log branch cut (-inf, 0]."""
    lam = complex(lam)
    if lam.real <= 0:
        return abs(lam.imag)
    return abs(lam)


def effective_energy_exact(h: complex, p: ChrononParams,
                           units: UnitSystem = NATURAL_UNITS,
                           tol: float = DEFAULT_TOL) -> complex:
    """Exact effective energy (i hbar / (n tau)) Log(1 - i h n tau / hbar).

    This is the unique complex energy with exp(-i h_eff n tau / hbar) equal
    to the one-step multiplier and principal-branch phase. For
    |h| n tau / hbar -> 0 it approaches h + i h^2 n tau / (2 hbar).
    """
    step = p.step(units)
    lam = step_eigenvalue(h, p, units)
    if abs(lam) <= tol:
        raise SingularMap(f"one-step multiplier {lam} is numerically zero")
    if lam.real < 0 and abs(lam.imag) <= tol * abs(lam):
        raise BranchCut(f"one-step multiplier {lam} lies on the branch cut")
    return 1j * units.hbar / step * cmath.log(lam)


def effective_energy_first_order(energy: float, p: ChrononParams,
                                 units: UnitSystem = NATURAL_UNITS) -> complex:
    """First-order effective energy E + i E^2 tau / hbar.

    Uses tau alone (the n multiplier is not applied); at tau_scale = 1 this
    is exactly E (1 + i).
    """
    e = complex(energy)
    return e + 1j * e * e * p.tau(units) / units.hbar


def efold_time(lambda_step: complex, p: ChrononParams,
               units: UnitSystem = NATURAL_UNITS) -> float:
    """Time for the mode magnitude to change by a factor e: n tau / |ln|lambda||.

    +inf when |lambda| = 1 (no magnitude change). Growth vs decay is
    reported separately by `efold_direction`.
    """
    mag = abs(complex(lambda_step))
    if mag == 0.0:
        raise SingularMap("zero one-step multiplier has no e-folding time")
    g = math.log(mag)
    if g == 0.0:
        return math.inf
    return p.step(units) / abs(g)


def efold_direction(lambda_step: complex) -> int:
    """+1 if the mode magnitude grows per step, -1 if it decays, 0 if steady."""
    mag = abs(complex(lambda_step))
    if mag == 0.0:
        raise SingularMap("zero one-step multiplier has no direction")
    return (mag > 1.0) - (mag < 1.0)


def imag_real_ratio(mode: ModeRecord, which: str = "exact") -> float:
    """|Im / Re| of the selected effective energy of a mode."""
    if which == "exact":
        e = mode.h_eff_exact
    elif which == "first_order":
        e = mode.h_first_order
    else:
        raise InvalidInput(f"which must be 'exact' or 'first_order', got {which!r}")
    if e.real == 0.0:
        raise UndefinedRatio("effective energy has zero real part")
    return abs(e.imag / e.real)


def decay_reading(h_eff: complex, convention: str = "paper") -> str:
    """How a convention reads the sign of Im(h_eff): 'growth', 'decay' or 'steady'.

    With phases e^{-iEt/hbar} ("standard") a positive imaginary part means
    the amplitude grows; with e^{+iEt/hbar} ("paper") the same sign is read
    as decay.
    """
    if convention not in CONVENTIONS:
        raise InvalidInput(f"convention must be one of {CONVENTIONS}")
    im = complex(h_eff).imag
    if im == 0.0:
        return "steady"
    growing = im > 0 if convention == "standard" else im < 0
    return "growth" if growing else "decay"


def effective_hamiltonian(step_map, p: ChrononParams,
                          units: UnitSystem = NATURAL_UNITS) -> np.ndarray:
    """Generator (i hbar / (n tau)) log(U) whose one-step exponential is U."""
    return 1j * units.hbar / p.step(units) * log2(as_operator(step_map))


def mode_report(h, p: ChrononParams, units: UnitSystem = NATURAL_UNITS,
                convention: str = "paper",
                tol: float = DEFAULT_TOL) -> EffectiveSpectrum:
    """Full spectral diagnosis of the chronon map for a Hermitian H.

    Diagonalizes H, attaches per-mode one-step multipliers, exact and
    first-order effective energies and e-folding times, and measures the
    non-Hermiticity of the effective generator extracted from the step map.
    Modes are ordered by continuous energy ascending.
    """
    a = as_operator(h)
    if convention not in CONVENTIONS:
        raise InvalidInput(f"convention must be one of {CONVENTIONS}")
    if not is_hermitian(a, tol):
        raise InvalidInput("mode_report requires a Hermitian H")
    pairs = eig2(a, tol)
    records = []
    for idx, pair in enumerate(pairs):
        hk = pair.value.real
        lam = step_eigenvalue(hk, p, units)
        records.append(ModeRecord(
            mode_index=idx,
            eigvec=pair.vector,
            h_continuous=hk,
            lambda_step=lam,
            h_eff_exact=effective_energy_exact(hk, p, units, tol),
            h_first_order=effective_energy_first_order(hk, p, units),
            step_magnitude=abs(lam),
            efold_time=efold_time(lam, p, units),
        ))

    u = discrete_step_operator(a, p, units)
    _check_eigenvectors_survive(u, records, tol)
    try:
        nu = non_hermiticity(effective_hamiltonian(u, p, units))
    except UndefinedMeasure:
        nu = None
    return EffectiveSpectrum(tuple(records), p, convention, nu)


def _check_eigenvectors_survive(u: np.ndarray, records: list[ModeRecord],
                                tol: float) -> None:
    # U is a polynomial in H, so H's eigenvectors must be eigenvectors of U
    # with the analytic multipliers; a violation means broken numerics.
    scale = max(float(np.linalg.norm(u)), 1.0)
    for rec in records:
        resid = u @ rec.eigvec - rec.lambda_step * rec.eigvec
        if float(np.max(np.abs(resid))) > tol * scale:
            raise ChrononLabError(
                "internal consistency failure: step map does not share H's eigenvectors")
