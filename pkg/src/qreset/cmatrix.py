"""Dense complex linear algebra for small Hermitian problems.

All routines operate on square complex numpy arrays of modest dimension
(two-qubit scale, nothing beyond ~64): products, adjoints, Kronecker
products, Hermitian eigendecomposition and the positive-semidefinite
matrix square root.  Inputs are validated against the module tolerances;
violations raise ValueError instead of propagating garbage downstream.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Matrices produced by the closed-form pipelines are Hermitian to round-off;
# anything worse than this (relative, Frobenius) indicates an upstream bug.
HERMITICITY_RTOL = 1e-10

# Absolute window in which eigenvalues of nominally-PSD matrices may dip
# below zero before we call the input genuinely non-PSD.
PSD_CLIP_TOL = 1e-10

# Eigenvalues below this fraction of the largest one are round-off images
# of exact zeros (eigh resolves the null space only to ~10 ulp); psd_sqrt
# flattens them so square roots of rank-deficient matrices stay exactly
# rank-deficient instead of acquiring sqrt(eps)-sized ghost directions.
PSD_NULL_RTOL = 1e-14

# Allowed deviation of a density matrix trace from one.
TRACE_ATOL = 1e-10


class HermitianEigensystem(NamedTuple):
    """Eigenvalues in ascending order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_cmatrix(a) -> np.ndarray:
    """Validate and return ``a`` as a square, finite complex matrix (copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of two equal-dimension square matrices."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor's index slowest (block) order."""
    return np.kron(a, b)


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a^dagger) / 2; removes round-off asymmetry."""
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, rtol: float = HERMITICITY_RTOL) -> bool:
    return frobenius(a - a.conj().T) <= rtol * max(frobenius(a), 1e-300)


def require_hermitian(a: np.ndarray, what: str = "matrix") -> None:
    if not is_hermitian(a):
        dev = frobenius(a - a.conj().T)
        raise ValueError(f"{what} is not Hermitian (deviation {dev:.3e})")


def hermitian_eig(a: np.ndarray) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and a unitary whose columns are the
    corresponding orthonormal eigenvectors.  Deterministic for identical
    input; within a degenerate cluster the basis choice is arbitrary and
    callers must not rely on it.
    """
    a = as_cmatrix(a)
    require_hermitian(a)
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return HermitianEigensystem(eigenvalues, eigenvectors)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian positive-semidefinite matrix.

    Eigenvalues within ``PSD_CLIP_TOL`` below zero are clamped to zero
    before taking the root; anything lower raises, since it signals a
    genuinely non-PSD input upstream.
    """
    a = as_cmatrix(a)
    require_hermitian(a, "psd_sqrt input")
    w, v = np.linalg.eigh(a)
    if w[0] < -PSD_CLIP_TOL:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {w[0]:.3e}")
    w[w < PSD_NULL_RTOL * max(w[-1], 0.0)] = 0.0
    return hermitize((v * np.sqrt(w)) @ v.conj().T)


def as_density_matrix(rho) -> np.ndarray:
    """Validate ``rho`` as a density matrix: Hermitian, PSD, unit trace."""
    m = as_cmatrix(rho)
    require_hermitian(m, "density matrix")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    w = np.linalg.eigvalsh(m)
    if w[0] < -PSD_CLIP_TOL:
        raise ValueError(f"density matrix not PSD: eigenvalue {w[0]:.3e}")
    return m
