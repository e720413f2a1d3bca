"""Closed-form complex 2x2 linear algebra.

Oracle-grade kernel the rest of the package builds on: eigenpairs, matrix
exponential, principal matrix logarithm, Pauli decomposition and a normalized
non-Hermiticity measure, all in exact 2x2 closed form (no iterative
factorizations). All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import BranchCut, InvalidInput, SingularMap, UndefinedMeasure

# Build-wide default tolerance for double-precision comparisons.
DEFAULT_TOL = 1e-10

# Components of a unit vector below this are treated as zero when picking the
# phase-fixing pivot.
_PIVOT_EPS = 1e-12

IDENTITY2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def as_operator(m) -> np.ndarray:
    """Coerce to a complex 2x2 ndarray, raising InvalidInput on bad shape."""
    a = np.asarray(m, dtype=np.complex128)
    if a.shape != (2, 2):
        raise InvalidInput(f"expected a 2x2 matrix, got shape {a.shape}")
    return a


def require_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")


def frobenius(m) -> float:
    return float(np.linalg.norm(as_operator(m)))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    """Max-entry test of M == M^dagger."""
    a = as_operator(m)
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """Max-entry test of M M^dagger == I."""
    a = as_operator(m)
    return float(np.max(np.abs(a @ a.conj().T - IDENTITY2))) <= tol


@dataclass(frozen=True)
class EigenPair2:
    """One eigenvalue with its phase-fixed unit eigenvector.

    The vector has unit Euclidean norm and its first component above
    the pivot threshold is made real and positive, so eigenvectors are
    directly comparable between calls. `degenerate` is set when the two
    eigenvalues coincide within tol * ||M||; for scalar matrices the
    canonical basis is returned, for defective ones the single true
    eigenvector appears in both pairs.
    """

    value: complex
    vector: np.ndarray
    degenerate: bool


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    pivot = v[0] if abs(v[0]) > _PIVOT_EPS else v[1]
    return v * (pivot.conjugate() / abs(pivot))


def _eigvec_for(a: np.ndarray, lam: complex) -> np.ndarray:
    m01 = complex(a[0, 1])
    m10 = complex(a[1, 0])
    if abs(m01) >= abs(m10) and m01 != 0:
        v = np.array([m01, lam - complex(a[0, 0])], dtype=np.complex128)
    elif m10 != 0:
        v = np.array([lam - complex(a[1, 1]), m10], dtype=np.complex128)
    else:
        # Diagonal matrix: pick the axis whose entry matches lam.
        if abs(complex(a[0, 0]) - lam) <= abs(complex(a[1, 1]) - lam):
            v = np.array([1.0, 0.0], dtype=np.complex128)
        else:
            v = np.array([0.0, 1.0], dtype=np.complex128)
    return _fix_phase(v)


def eig2(m, tol: float = DEFAULT_TOL) -> tuple[EigenPair2, EigenPair2]:
    """Eigendecomposition of a complex 2x2 matrix in closed form.

    Eigenvalues come back ordered by (real, imag) ascending; each vector is
    unit norm with fixed phase. Degeneracy is flagged relative to the
    matrix scale: |l1 - l2| <= tol * ||M||_F.
    """
    a = as_operator(m)
    require_finite(a)
    half_tr = 0.5 * (complex(a[0, 0]) + complex(a[1, 1]))
    det = complex(a[0, 0]) * complex(a[1, 1]) - complex(a[0, 1]) * complex(a[1, 0])
    disc = cmath.sqrt(half_tr * half_tr - det)
    lam_lo, lam_hi = sorted((half_tr - disc, half_tr + disc),
                            key=lambda z: (z.real, z.imag))
    scale = float(np.linalg.norm(a))
    degenerate = abs(lam_hi - lam_lo) <= tol * scale

    if degenerate and float(np.max(np.abs(a - half_tr * IDENTITY2))) <= tol * max(scale, 1.0):
        # Scalar matrix: any basis works, return the canonical one.
        e0 = np.array([1.0, 0.0], dtype=np.complex128)
        e1 = np.array([0.0, 1.0], dtype=np.complex128)
        return (EigenPair2(lam_lo, e0, True), EigenPair2(lam_hi, e1, True))

    return (EigenPair2(lam_lo, _eigvec_for(a, lam_lo), degenerate),
            EigenPair2(lam_hi, _eigvec_for(a, lam_hi), degenerate))


def exp2(m, s: complex = 1.0) -> np.ndarray:
    """exp(s*M) for a 2x2 complex matrix, exactly.

    Uses the trace/determinant closed form
        exp(sM) = e^{s tr/2} [cosh(sD) I + sinh(sD)/D (M - (tr/2) I)],
        D^2 = (tr/2)^2 - det M,
    which agrees with the eigendecomposition for diagonalizable M and takes
    the D -> 0 limit analytically, so degenerate and defective inputs need
    no special casing.
    """
    a = as_operator(m)
    require_finite(a)
    s = complex(s)
    if not cmath.isfinite(s):
        raise InvalidInput("scale factor must be finite")
    half_tr = 0.5 * (complex(a[0, 0]) + complex(a[1, 1]))
    det = complex(a[0, 0]) * complex(a[1, 1]) - complex(a[0, 1]) * complex(a[1, 0])
    delta = cmath.sqrt(half_tr * half_tr - det)
    x = s * delta
    if abs(x) < 1e-6:
        # sinh(s D)/D -> s (1 + x^2/6 + x^4/120 + ...) as D -> 0
        sinch = s * (1.0 + (x * x) / 6.0 * (1.0 + (x * x) / 20.0))
    else:
        sinch = cmath.sinh(x) / delta
    return cmath.exp(s * half_tr) * (
        cmath.cosh(x) * IDENTITY2 + sinch * (a - half_tr * IDENTITY2))


def log2(u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal matrix logarithm of a nonsingular 2x2 complex matrix.

    Eigenvalues of the result have imaginary part in (-pi, pi]. An
    eigenvalue with |l| <= tol raises SingularMap; one on the negative
    real axis raises BranchCut rather than silently picking a sheet.
    """
    a = as_operator(u)
    require_finite(a)
    lo, hi = eig2(a, tol)
    for pair in (lo, hi):
        lam = pair.value
        if abs(lam) <= tol:
            raise SingularMap(f"eigenvalue {lam} too close to zero")
        if lam.real < 0 and abs(lam.imag) <= tol * abs(lam):
            raise BranchCut(f"eigenvalue {lam} lies on the negative real axis")
    if lo.degenerate:
        lam = 0.5 * (lo.value + hi.value)
        # U = lam I + N with N^2 = 0, so log U = log(lam) I + N / lam.
        return cmath.log(lam) * IDENTITY2 + (a - lam * IDENTITY2) / lam
    v = np.column_stack([lo.vector, hi.vector])
    det_v = complex(v[0, 0]) * complex(v[1, 1]) - complex(v[0, 1]) * complex(v[1, 0])
    v_inv = np.array([[v[1, 1], -v[0, 1]], [-v[1, 0], v[0, 0]]],
                     dtype=np.complex128) / det_v
    return (v * np.array([cmath.log(lo.value), cmath.log(hi.value)])) @ v_inv


def pauli_decompose(m) -> tuple[complex, complex, complex, complex]:
    """Coefficients (a0, ax, ay, az) with M = a0 I + ax sx + ay sy + az sz."""
    a = as_operator(m)
    return (complex(0.5 * (a[0, 0] + a[1, 1])),
            complex(0.5 * (a[0, 1] + a[1, 0])),
            complex(0.5j * (a[0, 1] - a[1, 0])),
            complex(0.5 * (a[0, 0] - a[1, 1])))


def pauli_compose(a0: complex, ax: complex, ay: complex, az: complex) -> np.ndarray:
    return a0 * IDENTITY2 + ax * PAULI_X + ay * PAULI_Y + az * PAULI_Z


def non_hermiticity(m) -> float:
    """Normalized Frobenius measure nu = ||M - M^dagger||_F / (2 ||M||_F).

    nu is 0 iff M is Hermitian and 1 iff M is anti-Hermitian; the zero
    matrix has no defined measure and raises UndefinedMeasure.
    """
    a = as_operator(m)
    require_finite(a)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        raise UndefinedMeasure("non-Hermiticity of the zero matrix is undefined")
    return float(np.linalg.norm(a - a.conj().T) / (2.0 * scale))
