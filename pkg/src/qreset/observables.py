"""Correlation and distance measures on density matrices.

von Neumann entropy, Uhlmann fidelity (general and pure-reference),
purity, and the two-qubit concurrence in Wootters' closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cmatrix import (
    PSD_CLIP_TOL,
    TRACE_ATOL,
    as_cmatrix,
    as_density_matrix,
    psd_sqrt,
    require_hermitian,
)
from .reset_core import SubsystemSplit, partial_trace

_SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
# sigma_y (x) sigma_y: the two-qubit spin-flip conjugator, a real involution.
_SPIN_FLIP_OP = np.kron(_SIGMA_Y, _SIGMA_Y).real


def _density_eigenvalues(rho) -> np.ndarray:
    """Spectrum of a validated density matrix, clamped into [0, 1]."""
    rho = as_cmatrix(rho)
    require_hermitian(rho, "density matrix")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -PSD_CLIP_TOL:
        raise ValueError(f"density matrix not PSD: eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, 1.0)


def von_neumann_entropy(rho) -> float:
    """-tr(rho ln rho) in nats, with the 0 ln 0 = 0 convention."""
    w = _density_eigenvalues(rho)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)))


def purity(rho) -> float:
    """tr(rho^2); one for pure states, 1/dim for maximally mixed."""
    rho = as_density_matrix(rho)
    return float(np.trace(rho @ rho).real)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Symmetric in its arguments; equals one iff the states coincide.
    Evaluated as the squared nuclear norm of sqrt(rho) sqrt(sigma), which
    is the same quantity (A A^dag = sqrt(rho) sigma sqrt(rho) for
    A = sqrt(rho) sqrt(sigma)) without the square-root-of-round-off noise
    the nested-sqrt form picks up near zero eigenvalues.
    """
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    crossed = psd_sqrt(rho) @ psd_sqrt(sigma)
    f = float(np.linalg.svd(crossed, compute_uv=False).sum()) ** 2
    return min(max(f, 0.0), 1.0)


def fidelity_pure(rho, psi) -> float:
    """Fidelity against a pure reference state: <psi| rho |psi>."""
    rho = as_density_matrix(rho)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != rho.shape[0]:
        raise ValueError("state vector dimension does not match the matrix")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state vector norm is {norm}, expected 1")
    val = complex(psi.conj() @ rho @ psi)
    if abs(val.imag) > 1e-12:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return min(max(val.real, 0.0), 1.0)


def spin_flip(rho) -> np.ndarray:
    """Two-qubit spin-flipped state (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    rho = as_density_matrix(rho)
    if rho.shape[0] != 4:
        raise ValueError(f"spin flip needs a two-qubit (4x4) state, got {rho.shape}")
    return _SPIN_FLIP_OP @ rho.conj() @ _SPIN_FLIP_OP


@dataclass(frozen=True)
class ConcurrenceValue:
    """Concurrence together with the descending spectrum it came from."""

    value: float
    mu: tuple[float, float, float, float]


def concurrence(rho) -> ConcurrenceValue:
    """Wootters concurrence of a two-qubit density matrix.

    max(0, mu1 - mu2 - mu3 - mu4) over the descending eigenvalues mu_i of
    sqrt(sqrt(rho) rho_tilde sqrt(rho)).  The mu_i are evaluated as the
    singular values of sqrt(rho) sqrt(rho_tilde) -- the identical spectrum,
    real and nonnegative by construction, and free of the sqrt-of-round-off
    noise that taking a second PSD root of a near-singular product causes.

    References
    ----------
    .. [1] https://en.wikipedia.org/wiki/Concurrence_(quantum_computing)
    """
    rho = as_density_matrix(rho)
    if rho.shape[0] != 4:
        raise ValueError(f"concurrence needs a two-qubit (4x4) state, got {rho.shape}")
    flipped = _SPIN_FLIP_OP @ rho.conj() @ _SPIN_FLIP_OP
    crossed = psd_sqrt(rho) @ psd_sqrt(flipped)
    mu = np.linalg.svd(crossed, compute_uv=False)
    value = max(0.0, float(mu[0] - mu[1] - mu[2] - mu[3]))
    return ConcurrenceValue(value=value, mu=tuple(float(m) for m in mu))


def concurrence_pure(rho, split: SubsystemSplit) -> float:
    """Concurrence of a pure two-qubit state via its reduced-state purity.

    sqrt(2 (1 - tr rho_A^2)); only valid when rho is pure.
    """
    rho = as_density_matrix(rho)
    p = float(np.trace(rho @ rho).real)
    if p < 1.0 - 1e-10:
        raise ValueError(f"state is not pure (purity {p})")
    rho_a = partial_trace(rho, split, "A")
    tr2 = float(np.trace(rho_a @ rho_a).real)
    return float(np.sqrt(max(2.0 * (1.0 - tr2), 0.0)))
