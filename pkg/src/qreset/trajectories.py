"""Stochastic-trajectory estimator for the resetting dynamics.

Simulates the wavefunction protocol literally: unitary evolution
interrupted at Poisson times, each interruption restarting from the
initial pure state.  Ensemble-averaging the projectors |psi><psi| gives
an unbiased estimate of the renewal density matrix, which validates the
spectral engine without sharing any of its algebra.

Reproducibility contract: trajectory ``i`` draws from its own generator
seeded by (master_seed, i), and accumulation runs in fixed-size chunks in
trajectory-index order, so results are bit-identical for a given config
no matter how the work would be scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reset_core import QuantumSystem

_CHUNK = 1024


@dataclass(frozen=True)
class TrajectoryConfig:
    n_traj: int
    master_seed: int
    t_final: float
    rate: float

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError(f"n_traj must be >= 1, got {self.n_traj}")
        if not np.isfinite(self.t_final) or self.t_final < 0:
            raise ValueError(f"t_final must be finite and >= 0, got {self.t_final}")
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"rate must be finite and >= 0, got {self.rate}")


@dataclass(frozen=True)
class TrajectoryEstimate:
    """Ensemble mean of |psi><psi| with per-entry standard errors.

    ``stderr_re`` and ``stderr_im`` hold the standard errors of the real
    and imaginary parts separately (sample std / sqrt(n_traj)).
    """

    rho_hat: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    n_traj: int


def sample_reset_times(rate: float, t_final: float, stream: np.random.Generator):
    """Poisson-process event times in (0, t_final), ascending.

    Inter-arrival gaps are exponential with mean 1/rate; a zero rate gives
    no events.
    """
    if rate < 0 or t_final < 0:
        raise ValueError("rate and t_final must be >= 0")
    if rate == 0.0 or t_final == 0.0:
        return np.empty(0, dtype=float)
    mean_count = rate * t_final
    chunk = max(16, int(mean_count + 4.0 * np.sqrt(mean_count) + 1))
    times = np.cumsum(stream.exponential(scale=1.0 / rate, size=chunk))
    while times[-1] < t_final:
        extra = stream.exponential(scale=1.0 / rate, size=chunk)
        times = np.concatenate([times, times[-1] + np.cumsum(extra)])
    return times[times < t_final]


def _pure_state_of(sys: QuantumSystem) -> np.ndarray:
    """Extract |psi0> from a pure rho0; reject mixed initial states."""
    w, v = np.linalg.eigh(sys.rho0)
    if w[-1] < 1.0 - 1e-12:
        raise ValueError(
            f"trajectory protocol needs a pure rho0 (largest eigenvalue {w[-1]})"
        )
    return v[:, -1].copy()


def _evolve_pure(sys: QuantumSystem, psi0: np.ndarray, tau: float) -> np.ndarray:
    energies, v = sys.eigensystem
    coeffs = v.conj().T @ psi0
    psi = v @ (coeffs * np.exp(-1j * energies * tau))
    return psi / np.linalg.norm(psi)


def evolve_trajectory(sys: QuantumSystem, resets, t_final: float) -> np.ndarray:
    """Final state of one trajectory with the given reset times.

    Resets erase history, so only the segment after the last reset matters:
    |psi(t_final)> = exp(-iH (t_final - t_last)) |psi(0)>.
    """
    if not np.isfinite(t_final) or t_final < 0:
        raise ValueError(f"t_final must be finite and >= 0, got {t_final}")
    resets = np.asarray(resets, dtype=float)
    if resets.size and (np.any(np.diff(resets) <= 0) or resets[0] <= 0
                        or resets[-1] >= t_final):
        raise ValueError("reset times must be ascending within (0, t_final)")
    psi0 = _pure_state_of(sys)
    last = float(resets[-1]) if resets.size else 0.0
    return _evolve_pure(sys, psi0, t_final - last)


def estimate_density(sys: QuantumSystem, cfg: TrajectoryConfig) -> TrajectoryEstimate:
    """Monte Carlo estimate of the renewal density matrix at t_final.

    Averages |psi><psi| over cfg.n_traj independent trajectories.  Entries
    that are deterministic (e.g. a zero rate) come back with zero standard
    error.
    """
    psi0 = _pure_state_of(sys)
    energies, v = sys.eigensystem
    coeffs = v.conj().T @ psi0
    d = sys.dim

    def sample(i):
        stream = np.random.default_rng([cfg.master_seed, i])
        times = sample_reset_times(cfg.rate, cfg.t_final, stream)
        tau = cfg.t_final - (float(times[-1]) if times.size else 0.0)
        psi = v @ (coeffs * np.exp(-1j * energies * tau))
        psi /= np.linalg.norm(psi)
        return np.outer(psi, psi.conj())

    # Accumulate deviations from the first sample: sums of (x - shift) and
    # (x - shift)^2 stay free of the catastrophic cancellation the plain
    # sum-of-squares formula hits when the spread is tiny (zero-rate runs
    # must come back with exactly zero variance).
    shift = sample(0)
    total_dev = np.zeros((d, d), dtype=complex)
    total_sq_re = np.zeros((d, d), dtype=float)
    total_sq_im = np.zeros((d, d), dtype=float)

    n = cfg.n_traj
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        part_dev = np.zeros((d, d), dtype=complex)
        part_sq_re = np.zeros((d, d), dtype=float)
        part_sq_im = np.zeros((d, d), dtype=float)
        for i in range(start, stop):
            dev = sample(i) - shift
            part_dev += dev
            part_sq_re += dev.real**2
            part_sq_im += dev.imag**2
        total_dev += part_dev
        total_sq_re += part_sq_re
        total_sq_im += part_sq_im

    mean_dev = total_dev / n
    rho_hat = shift + mean_dev
    if n > 1:
        var_re = np.clip(total_sq_re / n - mean_dev.real**2, 0.0, None) * n / (n - 1)
        var_im = np.clip(total_sq_im / n - mean_dev.imag**2, 0.0, None) * n / (n - 1)
        stderr_re = np.sqrt(var_re / n)
        stderr_im = np.sqrt(var_im / n)
    else:
        stderr_re = np.zeros((d, d), dtype=float)
        stderr_im = np.zeros((d, d), dtype=float)
    return TrajectoryEstimate(
        rho_hat=rho_hat, stderr_re=stderr_re, stderr_im=stderr_im, n_traj=n
    )
