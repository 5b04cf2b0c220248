"""Quantum-information primitives on density matrices: von Neumann entropy,
relative entropy with support checking, Holevo information, and channel
containers. All entropic quantities are in nats unless stated otherwise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hermitian import _eigh, validate_hermitian

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
DIST_SUM_TOL = 1e-12
SUPPORT_TOL = 1e-10
RANK_RTOL = 1e-10
LN2 = math.log(2.0)


def _density_spectrum(rho, name: str = "rho"):
    """Validate density-matrix invariants; return (matrix, eigenvalues desc)."""
    a = validate_hermitian(rho)
    w, _ = _eigh(a)
    if float(w.min()) < -PSD_TOL:
        raise ValueError(
            f"{name} is not positive semidefinite: min eigenvalue {w.min():.3e}")
    tr = float(a.trace().real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} does not have unit trace: Tr = {tr!r}")
    return a, w


def validate_density(rho, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, positive semidefiniteness and unit trace."""
    a, _ = _density_spectrum(rho, name=name)
    return a


def validate_distribution(p, n: int | None = None) -> np.ndarray:
    """Check nonnegativity and normalization of an input distribution."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"distribution must be a vector, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise ValueError(f"length mismatch: expected {n} weights, got {p.shape[0]}")
    if float(p.min()) < 0.0:
        raise ValueError(f"negative weight {p.min()!r}")
    s = float(p.sum())
    if abs(s - 1.0) > DIST_SUM_TOL:
        raise ValueError(f"weights sum to {s!r}, not 1")
    return p


@dataclass(frozen=True, eq=False)
class CqChannel:
    """A classical-quantum channel: one density matrix per input letter.

    `states` is an (n, m, m) complex stack; every slice must satisfy the
    density-matrix invariants. The per-state spectra computed during
    validation are kept (descending) since downstream code reuses them.
    """

    states: np.ndarray

    def __post_init__(self):
        states = np.ascontiguousarray(np.asarray(self.states, dtype=np.complex128))
        if states.ndim != 3 or states.shape[1] != states.shape[2]:
            raise ValueError(f"expected an (n, m, m) stack, got shape {states.shape}")
        n, m = states.shape[0], states.shape[1]
        if n < 2:
            raise ValueError(f"need at least 2 input letters, got {n}")
        if m < 2:
            raise ValueError(f"need output dimension >= 2, got {m}")
        spectra = np.empty((n, m))
        for x in range(n):
            _, w = _density_spectrum(states[x], name=f"states[{x}]")
            spectra[x] = w
        states.flags.writeable = False
        spectra.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "state_spectra", spectra)

    @property
    def input_size(self) -> int:
        return self.states.shape[0]

    @property
    def output_dim(self) -> int:
        return self.states.shape[1]


def _entropy_from_eigs(w, zero_tol: float) -> float:
    pos = w > zero_tol
    if not np.any(pos):
        return 0.0
    wp = w[pos]
    return float(-np.dot(wp, np.log(wp)))


def von_neumann_entropy(rho, zero_tol: float = 1e-12) -> float:
    """-Tr(rho ln rho) in nats, with the 0 ln 0 = 0 convention."""
    a, w = _density_spectrum(rho)
    h = _entropy_from_eigs(w, zero_tol)
    hmax = math.log(a.shape[0])
    if not (-1e-10 <= h <= hmax + 1e-10):
        raise AssertionError(f"entropy {h!r} outside [0, ln m] for m={a.shape[0]}")
    return h


def relative_entropy(rho, sigma, support_tol: float = SUPPORT_TOL) -> float:
    """Tr[rho (ln rho - ln sigma)] in nats, or +inf on support violation.

    A violation means sigma has an eigenvector with eigenvalue <= support_tol
    that carries more than support_tol of rho's mass.
    """
    rho_a, w_rho = _density_spectrum(rho, name="rho")
    sig_a, _ = _density_spectrum(sigma, name="sigma")
    if rho_a.shape != sig_a.shape:
        raise ValueError(f"dimension mismatch: {rho_a.shape} vs {sig_a.shape}")
    w_sig, v_sig = _eigh(sig_a)
    # mass of rho along each eigenvector of sigma
    overlaps = np.einsum("ik,ij,jk->k", v_sig.conj(), rho_a, v_sig).real
    small = w_sig <= support_tol
    if np.any(small & (overlaps > support_tol)):
        return math.inf
    keep = ~small
    cross = float(np.dot(overlaps[keep], np.log(w_sig[keep]))) if np.any(keep) else 0.0
    return -_entropy_from_eigs(w_rho, support_tol) - cross


def average_state(p, ch: CqChannel) -> np.ndarray:
    """Convex combination sum_x p_x rho_x of the channel states."""
    p = validate_distribution(p, n=ch.input_size)
    return np.einsum("x,xij->ij", p, ch.states)


def holevo_information(p, ch: CqChannel, zero_tol: float = 1e-12) -> float:
    """H(sum_x p_x rho_x) - sum_x p_x H(rho_x) in nats."""
    p = validate_distribution(p, n=ch.input_size)
    sigma = np.einsum("x,xij->ij", p, ch.states)
    w, _ = _eigh(sigma)
    mix_entropy = _entropy_from_eigs(w, zero_tol)
    cond = sum(p[x] * _entropy_from_eigs(ch.state_spectra[x], zero_tol)
               for x in range(ch.input_size))
    chi = mix_entropy - cond
    cap = math.log(min(ch.input_size, ch.output_dim))
    if not (-1e-10 <= chi <= cap + 1e-10):
        raise AssertionError(f"Holevo information {chi!r} outside [0, {cap!r}]")
    return chi


def check_linear_independence(ch: CqChannel) -> tuple[bool, int]:
    """Numerical rank of the states viewed as vectors in C^(m*m).

    Returns (rank == n, rank); rank counts singular values above
    RANK_RTOL times the largest one.
    """
    n, m = ch.input_size, ch.output_dim
    flat = ch.states.reshape(n, m * m)
    svals = np.linalg.svd(flat, compute_uv=False)
    rank = int(np.count_nonzero(svals > RANK_RTOL * svals[0]))
    return rank == n, rank
