"""Numerically exact oracle: truncated Fock-basis diagonalization.

The Hamiltonian conserves the parity -sigma_x (-1)^(a^dag a), so each sector
reduces to a tridiagonal matrix in an x-spin-alternating Fock ladder.  The
truncation is doubled until the low spectrum is stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from .model import ModelParams

# Levels closer than this (relative) are treated as degenerate when merging
# the two parity sectors; the even sector is listed first on ties.
DEGENERACY_RTOL = 1e-12


def build_hamiltonian(params: ModelParams, nmax: int) -> np.ndarray:
    """Dense symmetric Rabi Hamiltonian on the (z-spin ⊗ Fock) product basis.

    Basis ordering: the +z spin block (n = 0..nmax) followed by the -z block.
    """
    if nmax < 2:
        raise ValueError(f"nmax must be at least 2, got {nmax}")
    dim = nmax + 1
    number = np.diag(np.arange(dim, dtype=float))
    ladder = np.zeros((dim, dim))
    idx = np.arange(1, dim)
    ladder[idx, idx - 1] = np.sqrt(idx)
    ladder[idx - 1, idx] = np.sqrt(idx)
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    sigma_z = np.array([[1.0, 0.0], [0.0, -1.0]])
    h = params.omega * np.kron(np.eye(2), number)
    h += 0.5 * params.big_omega * np.kron(sigma_x, np.eye(dim))
    h += params.g * np.kron(sigma_z, ladder)
    return h


def _parity_tridiagonal(params: ModelParams, nmax: int, parity: int):
    if nmax < 2:
        raise ValueError(f"nmax must be at least 2, got {nmax}")
    if parity not in (+1, -1):
        raise ValueError(f"parity must be +1 or -1, got {parity}")
    n = np.arange(nmax + 1)
    # x-spin sign alternates so that -s(-1)^n equals the sector parity
    spin = -parity * (-1.0) ** n
    diag = params.omega * n + 0.5 * params.big_omega * spin
    offdiag = params.g * np.sqrt(n[1:].astype(float))
    return diag, offdiag


def build_parity_block(params: ModelParams, nmax: int, parity: int) -> np.ndarray:
    """Hamiltonian restricted to one parity sector (dimension nmax + 1).

    Sector basis: |s_n x, n> for n = 0..nmax with s_n = -parity (-1)^n, which
    makes the block tridiagonal with couplings g sqrt(n+1).
    """
    diag, offdiag = _parity_tridiagonal(params, nmax, parity)
    return np.diag(diag) + np.diag(offdiag, 1) + np.diag(offdiag, -1)


def _sector_to_product(vectors: np.ndarray, parity: int) -> np.ndarray:
    """Map sector-basis eigenvector columns to the (z-spin ⊗ Fock) basis."""
    dim = vectors.shape[0]
    n = np.arange(dim)
    spin = -parity * (-1.0) ** n
    out = np.zeros((2 * dim, vectors.shape[1]))
    out[:dim] = vectors / np.sqrt(2.0)
    out[dim:] = spin[:, None] * vectors / np.sqrt(2.0)
    return out


@dataclass
class ExactSolution:
    """Parity-resolved spectrum of one parameter point.

    Eigenvectors (product basis, one column per state) are stored for the
    lowest states of each sector only; energies cover the full truncation.
    """

    energies_even: np.ndarray
    energies_odd: np.ndarray
    vectors_even: np.ndarray
    vectors_odd: np.ndarray
    nmax_used: int
    converged: bool

    def levels(self):
        """Merged (energy, parity, sector_index) list, energy-ascending.

        Within the degeneracy tolerance the even-parity state comes first,
        which keeps labeling reproducible at level crossings.
        """
        out = []
        ee, eo = self.energies_even, self.energies_odd
        i = j = 0
        while i < len(ee) or j < len(eo):
            if j >= len(eo):
                out.append((float(ee[i]), +1, i))
                i += 1
            elif i >= len(ee):
                out.append((float(eo[j]), -1, j))
                j += 1
            else:
                tol = DEGENERACY_RTOL * max(1.0, abs(ee[i]), abs(eo[j]))
                if ee[i] <= eo[j] + tol:
                    out.append((float(ee[i]), +1, i))
                    i += 1
                else:
                    out.append((float(eo[j]), -1, j))
                    j += 1
        return out

    def energy(self, which: int) -> float:
        return self.levels()[which][0]

    def ground_energy(self) -> float:
        return min(float(self.energies_even[0]), float(self.energies_odd[0]))


def _lowest_merged(params: ModelParams, nmax: int, count: int) -> np.ndarray:
    sel = (0, count - 1)
    lows = []
    for parity in (+1, -1):
        diag, offdiag = _parity_tridiagonal(params, nmax, parity)
        lows.append(eigvalsh_tridiagonal(diag, offdiag, select="i", select_range=sel))
    return np.sort(np.concatenate(lows))[:count]


def solve_exact(
    params: ModelParams,
    tol: float = 1e-10,
    *,
    nmax_start: int = 64,
    nmax_cap: int = 4096,
    n_track: int = 8,
    n_vectors: int = 64,
) -> ExactSolution:
    """Diagonalize both parity sectors, doubling the photon cutoff until the
    lowest ``n_track`` merged energies move by less than ``tol``.

    Gives up at ``nmax_cap`` and returns the best result with
    ``converged = False``.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    nmax = nmax_start
    prev = _lowest_merged(params, nmax, n_track)
    converged = False
    while nmax < nmax_cap:
        nmax *= 2
        lows = _lowest_merged(params, nmax, n_track)
        if np.max(np.abs(lows - prev)) < tol:
            converged = True
            break
        prev = lows

    energies = {}
    vectors = {}
    k = min(nmax + 1, n_vectors)
    for parity in (+1, -1):
        diag, offdiag = _parity_tridiagonal(params, nmax, parity)
        energies[parity] = eigvalsh_tridiagonal(diag, offdiag)
        _, vecs = eigh_tridiagonal(diag, offdiag, select="i", select_range=(0, k - 1))
        vectors[parity] = _sector_to_product(vecs, parity)
    return ExactSolution(
        energies_even=energies[+1],
        energies_odd=energies[-1],
        vectors_even=vectors[+1],
        vectors_odd=vectors[-1],
        nmax_used=nmax,
        converged=converged,
    )


def mean_photon(solution: ExactSolution, which: int) -> float:
    """<a^dag a> in the ``which``-th merged eigenstate."""
    levels = solution.levels()
    if which < 0 or which >= len(levels):
        raise IndexError(f"state index {which} out of range")
    _, parity, sector_idx = levels[which]
    vecs = solution.vectors_even if parity > 0 else solution.vectors_odd
    if sector_idx >= vecs.shape[1]:
        raise IndexError(
            f"eigenvector for state {which} not stored (sector index {sector_idx})"
        )
    v = vecs[:, sector_idx]
    dim = v.shape[0] // 2
    n = np.arange(dim, dtype=float)
    return float(n @ (v[:dim] ** 2 + v[dim:] ** 2))


def _parity_apply(trial: np.ndarray) -> np.ndarray:
    dim = trial.shape[0] // 2
    sign = -((-1.0) ** np.arange(dim))
    out = np.empty_like(trial)
    out[:dim] = sign * trial[dim:]
    out[dim:] = sign * trial[:dim]
    return out


def overlap_match(solution: ExactSolution, trial: np.ndarray):
    """Match a product-basis trial vector to the exact eigenstate of the same
    parity with the largest |overlap|.

    Returns ``(merged_index, |overlap|)``.  Raises if the trial is not
    normalized or has indeterminate parity.
    """
    trial = np.asarray(trial, dtype=float)
    norm = np.linalg.norm(trial)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"trial vector must be normalized, |trial| = {norm}")
    p_exp = float(trial @ _parity_apply(trial))
    if p_exp > 1.0 - 1e-6:
        parity = +1
    elif p_exp < -1.0 + 1e-6:
        parity = -1
    else:
        raise ValueError(f"trial parity indeterminate, <parity> = {p_exp}")
    vecs = solution.vectors_even if parity > 0 else solution.vectors_odd
    overlaps = vecs.T @ trial
    sector_idx = int(np.argmax(np.abs(overlaps)))
    for merged_idx, (_, par, sec) in enumerate(solution.levels()):
        if par == parity and sec == sector_idx:
            return merged_idx, float(abs(overlaps[sector_idx]))
    raise RuntimeError("matched sector state missing from merged levels")
