"""Renewal dynamics of a closed quantum system under Poissonian resetting.

A system evolves unitarily from an initial density matrix rho0 and is
interrupted at Poisson rate ``r``, each interruption restarting it from
rho0.  Averaging over reset histories gives the renewal form

    rho_r(t) = exp(-r t) rho(t) + r * integral_0^t exp(-r tau) rho(tau) dtau

with rho(t) the reset-free evolution.  As t -> infinity this relaxes to a
mixed stationary state.  Everything here is evaluated spectrally in the
energy eigenbasis -- no time stepping -- so results are exact to round-off:
writing omega = E - E' for a pair of eigenvalues, the energy-basis element
of rho_r(t) is

    rho0_{EE'} * [exp(-(r+i omega) t) + r (1 - exp(-(r+i omega) t))/(r+i omega)]

and its t -> infinity limit is rho0_{EE'} * r/(r + i omega) off the
diagonal with diagonal elements frozen at rho0_{EE}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .cmatrix import (
    as_cmatrix,
    as_density_matrix,
    frobenius,
    hermitian_eig,
    hermitize,
    require_hermitian,
)

# Relative spread below which two eigenvalues count as degenerate when
# applying the piecewise stationary-state formula.
DEGENERACY_RTOL = 1e-9

# |r + i*omega| * t below this uses the small-argument series for the
# renewal kernel (removable singularity; avoids catastrophic cancellation).
KERNEL_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True)
class ResetSpec:
    """Poissonian resetting at a fixed nonnegative rate (inverse time)."""

    rate: float

    def __post_init__(self):
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"reset rate must be finite and >= 0, got {self.rate}")


@dataclass(frozen=True)
class SubsystemSplit:
    """Bipartition of a tensor-product space, subsystem A's index slowest."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("subsystem dimensions must be positive")


class QuantumSystem:
    """A Hamiltonian, its cached eigensystem, and an initial density matrix.

    Construction validates the inputs (Hermitian Hamiltonian; Hermitian,
    PSD, trace-one rho0) and performs the eigendecomposition once.  The
    instance is immutable afterwards and safe to share across workers.
    """

    def __init__(self, hamiltonian, rho0):
        h = as_cmatrix(hamiltonian)
        require_hermitian(h, "hamiltonian")
        rho = as_density_matrix(rho0)
        if h.shape != rho.shape:
            raise ValueError(
                f"hamiltonian is {h.shape} but rho0 is {rho.shape}"
            )
        self.hamiltonian = h
        self.rho0 = rho
        self.dim = h.shape[0]
        self.eigensystem = hermitian_eig(h)
        v = self.eigensystem.eigenvectors
        # rho0 expressed in the energy basis; every producer below starts here.
        self._rho0_energy = v.conj().T @ rho @ v
        self.degeneracy_tol = DEGENERACY_RTOL * max(frobenius(h), 1e-300)
        for arr in (self.hamiltonian, self.rho0, self._rho0_energy,
                    self.eigensystem.eigenvalues, self.eigensystem.eigenvectors):
            arr.flags.writeable = False

    def _to_computational(self, rho_energy: np.ndarray) -> np.ndarray:
        v = self.eigensystem.eigenvectors
        return hermitize(v @ rho_energy @ v.conj().T)


def _check_time(t: float) -> float:
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"time must be finite and >= 0, got {t}")
    return t


def unitary_evolve(sys: QuantumSystem, t: float) -> np.ndarray:
    """Reset-free density matrix exp(-iHt) rho0 exp(iHt)."""
    t = _check_time(t)
    if t == 0.0:
        return sys.rho0.copy()
    energies = sys.eigensystem.eigenvalues
    phase = np.exp(-1j * energies * t)
    rho_e = sys._rho0_energy * np.outer(phase, phase.conj())
    return sys._to_computational(rho_e)


def _renewal_kernel(rate: float, omega: np.ndarray, t: float) -> np.ndarray:
    s = rate + 1j * omega
    kernel = np.empty(s.shape, dtype=complex)
    small = np.abs(s) * t < KERNEL_SERIES_CUTOFF
    kernel[small] = 1.0 - s[small] * t + rate * t
    big = ~small
    decay = np.exp(-s[big] * t)
    kernel[big] = decay + rate * (1.0 - decay) / s[big]
    return kernel


def reset_density(sys: QuantumSystem, reset: ResetSpec, t: float) -> np.ndarray:
    """Density matrix at time t under resetting, via the renewal form."""
    t = _check_time(t)
    if t == 0.0:
        return sys.rho0.copy()
    energies = sys.eigensystem.eigenvalues
    omega = energies[:, None] - energies[None, :]
    rho_e = sys._rho0_energy * _renewal_kernel(reset.rate, omega, t)
    return sys._to_computational(rho_e)


def ness_density(sys: QuantumSystem, reset: ResetSpec) -> np.ndarray:
    """Stationary density matrix of the resetting dynamics.

    Requires a strictly positive rate: at rate zero the finite-time matrix
    keeps oscillating and no stationary state exists (the limits
    t -> infinity and rate -> 0 do not commute).  Eigenvalue pairs within
    the system's degeneracy tolerance take the diagonal branch.
    """
    if reset.rate <= 0.0:
        raise ValueError("stationary state requires a strictly positive reset rate")
    energies = sys.eigensystem.eigenvalues
    omega = energies[:, None] - energies[None, :]
    factor = np.ones(omega.shape, dtype=complex)
    off = np.abs(omega) > sys.degeneracy_tol
    factor[off] = reset.rate / (reset.rate + 1j * omega[off])
    return sys._to_computational(sys._rho0_energy * factor)


def partial_trace(
    rho: np.ndarray, split: SubsystemSplit, keep: Literal["A", "B"] = "A"
) -> np.ndarray:
    """Reduced density matrix of one subsystem of a bipartite state.

    ``rho`` lives on a space of dimension dim_a * dim_b with the A index
    slowest (row index i*dim_b + a for A-state i, B-state a).  Tracing out
    the complement contracts the discarded index pair.
    """
    rho = as_cmatrix(rho)
    da, db = split.dim_a, split.dim_b
    if rho.shape[0] != da * db:
        raise ValueError(
            f"matrix dimension {rho.shape[0]} != dim_a*dim_b = {da * db}"
        )
    blocks = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("iaja->ij", blocks)
    if keep == "B":
        return np.einsum("iaib->ab", blocks)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
