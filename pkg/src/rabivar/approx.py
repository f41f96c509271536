"""Closed-form baselines and transformed-frame matrices.

Covers the rotating-wave ladder, the adiabatic (displaced-oscillator)
energies generalized to a free displacement, the 2x2 ladder blocks of the
generalized rotating-wave truncation, the energy-minimizing displacement of
the ground trial state, and the Hamiltonian conjugated into the displaced
frame, built both by numeric displacement conjugation and from Laguerre
factors so each route checks the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exact import build_hamiltonian
from .model import ModelParams
from .specfun import (
    CALIBRATED_CONVENTION,
    FFactorConvention,
    displacement_matrix,
    f_factor,
)

# Analytic and displacement-built transformed matrices must agree to this on
# the inner (trusted) Fock block.
CONVENTION_ATOL = 1e-8


class ConventionError(RuntimeError):
    """The two transformed-matrix routes disagree beyond tolerance."""


def rwa_ground_energy(params: ModelParams) -> float:
    """Rotating-wave ground energy (the uncoupled lower level)."""
    return -0.5 * params.big_omega


def rwa_spectrum(params: ModelParams, N: int, sign: int) -> float:
    """Jaynes-Cummings ladder energy for doublet N >= 1 and branch sign."""
    if N < 1:
        raise ValueError(f"ladder index must be >= 1, got {N}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    split = math.sqrt(0.25 * (params.omega - params.big_omega) ** 2 + N * params.g**2)
    return (N - 0.5) * params.omega + sign * split


def displacement_shift(params: ModelParams, lam: float) -> float:
    """Oscillator energy offset omega lam^2 + 2 g lam of the displaced frame.

    Reduces to -g^2/omega at lam = -g/omega.
    """
    return params.omega * lam * lam + 2.0 * params.g * lam


def aa_energy(params: ModelParams, lam: float, sign: int, N: int) -> float:
    """Displaced-frame ladder energy at free displacement ``lam``.

    The adiabatic values arise at lam = -g/omega, where the residual linear
    coupling vanishes.
    """
    if N < 0:
        raise ValueError(f"photon index must be non-negative, got {N}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return (
        N * params.omega
        + displacement_shift(params, lam)
        + sign * 0.5 * params.big_omega * f_factor(lam, N, 0)
    )


@dataclass(frozen=True)
class GrwaBlockResult:
    """Eigen-solution of one 2x2 ladder block over {|+x, N-1>, |-x, N>}."""

    N: int
    e_plus: float
    e_minus: float
    r_plus: float
    s_plus: float
    r_minus: float
    s_minus: float


def grwa_block_offdiag(
    params: ModelParams,
    lam: float,
    N: int,
    convention: FFactorConvention = CALIBRATED_CONVENTION,
) -> float:
    """Coupling <+x, N-1|H'|-x, N> in the displaced frame.

    Carries the spin-flip one-photon factor plus the residual
    displaced-oscillator element (omega lam + g) sqrt(N), which vanishes at
    lam = -g/omega.
    """
    if N < 1:
        raise ValueError(f"block index must be >= 1, got {N}")
    return (params.omega * lam + params.g) * math.sqrt(N) + 0.5 * params.big_omega * f_factor(lam, N - 1, 1, convention)


def grwa_block(
    params: ModelParams,
    lam: float,
    N: int,
    convention: FFactorConvention = CALIBRATED_CONVENTION,
) -> GrwaBlockResult:
    """Diagonalize the 2x2 ladder block pairing (+x, N-1) with (-x, N).

    At lam = -g/omega this is the generalized rotating-wave truncation; at
    free lam it supplies the excited trial states.
    """
    a = aa_energy(params, lam, +1, N - 1)
    b = aa_energy(params, lam, -1, N)
    h = grwa_block_offdiag(params, lam, N, convention)
    half_sum = 0.5 * (a + b)
    radius = math.hypot(0.5 * (a - b), h)
    theta = 0.5 * math.atan2(2.0 * h, a - b)
    c, s = math.cos(theta), math.sin(theta)
    return GrwaBlockResult(
        N=N,
        e_plus=half_sum + radius,
        e_minus=half_sum - radius,
        r_plus=c,
        s_plus=s,
        r_minus=-s,
        s_minus=c,
    )


def trial_ground_energy(params: ModelParams, lam: float) -> float:
    """Energy of the odd two-coherent-state superposition at displacement lam."""
    return displacement_shift(params, lam) - 0.5 * params.big_omega * math.exp(-2.0 * lam * lam)


def gvm_lambda(params: ModelParams) -> float:
    """Closed-form approximate energy-minimizing displacement."""
    ratio = params.big_omega / params.omega
    damp = math.exp(-2.0 * params.g**2 / (params.omega + params.big_omega) ** 2)
    return -(params.g / params.omega) / (1.0 + ratio * damp)


def gvm_lambda_exact(params: ModelParams, xtol: float = 1e-14) -> float:
    """Stationary point of the trial ground energy on [-g/omega, 0].

    Solves omega lam + g + big_omega lam exp(-2 lam^2) = 0, the literal
    derivative of the trial energy, by bracketed root finding.
    """
    if params.g == 0.0:
        return 0.0

    def stat(lam):
        return params.omega * lam + params.g + params.big_omega * lam * math.exp(-2.0 * lam * lam)

    lo = -params.g / params.omega
    flo = stat(lo)
    if flo == 0.0:
        return lo
    if not (flo < 0.0 < stat(0.0)):
        raise ValueError("stationarity condition has no sign change on the bracket")
    return float(brentq(stat, lo, 0.0, xtol=xtol))


def gvm_ground_energy(params: ModelParams, lam: float) -> float:
    """Ground energy of the displaced trial state (same form for any lam)."""
    return trial_ground_energy(params, lam)


def x_state_index(sign: int, n: int, nmax: int) -> int:
    """Position of |sign_x, n> in the transformed-matrix ordering."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if n < 0 or n > nmax:
        raise ValueError(f"photon index {n} outside 0..{nmax}")
    return n if sign > 0 else nmax + 1 + n


def cosh_sinh_tables(lam: float, nmax: int):
    """Even and odd parts of exp(-2 lam (a^dag - a)) on Fock states."""
    d = displacement_matrix(-2.0 * lam, nmax)
    return 0.5 * (d + d.T), 0.5 * (d - d.T)


def _tables_from_f(lam: float, nmax: int, convention: FFactorConvention):
    """Assemble the cosh/sinh tables entrywise from the f factors."""
    dim = nmax + 1
    cosh_t = np.zeros((dim, dim))
    sinh_t = np.zeros((dim, dim))
    for delta in range(dim):
        vals = np.array([f_factor(lam, k, delta, convention) for k in range(dim - delta)])
        rows = np.arange(delta, dim)
        cols = rows - delta
        if delta % 2 == 0:
            cosh_t[rows, cols] = vals
            cosh_t[cols, rows] = vals
        else:
            sinh_t[rows, cols] = vals
            sinh_t[cols, rows] = -vals
    return cosh_t, sinh_t


def _transformed_displaced(params: ModelParams, lam: float, nmax: int) -> np.ndarray:
    # Work in a padded Fock space so the truncated conjugation is accurate on
    # the requested range, then crop; the pad absorbs the displacement spread.
    pad = int(math.ceil(4.0 * lam * lam + 12.0 * abs(lam))) + 24
    work = nmax + pad
    dim = work + 1
    h = build_hamiltonian(params, work)
    u = np.zeros((2 * dim, 2 * dim))
    u[:dim, :dim] = displacement_matrix(-lam, work)
    u[dim:, dim:] = displacement_matrix(lam, work)
    h_t = u @ h @ u.T
    root_half = math.sqrt(0.5)
    w = np.kron(np.array([[root_half, root_half], [root_half, -root_half]]), np.eye(dim))
    full = w.T @ h_t @ w
    keep = np.concatenate([np.arange(nmax + 1), np.arange(nmax + 1) + dim])
    return full[np.ix_(keep, keep)]


def _transformed_from_tables(
    params: ModelParams, lam: float, nmax: int, cosh_t: np.ndarray, sinh_t: np.ndarray
) -> np.ndarray:
    dim = nmax + 1
    n = np.arange(dim, dtype=float)
    field_diag = np.diag(params.omega * n + displacement_shift(params, lam))
    ladder = np.zeros((dim, dim))
    idx = np.arange(1, dim)
    ladder[idx, idx - 1] = np.sqrt(idx)
    ladder[idx - 1, idx] = np.sqrt(idx)
    coupling = (params.omega * lam + params.g) * ladder
    half = 0.5 * params.big_omega
    out = np.zeros((2 * dim, 2 * dim))
    out[:dim, :dim] = field_diag + half * cosh_t
    out[dim:, dim:] = field_diag - half * cosh_t
    out[:dim, dim:] = coupling - half * sinh_t
    out[dim:, :dim] = coupling + half * sinh_t
    return out


def _transformed_laguerre(
    params: ModelParams,
    lam: float,
    nmax: int,
    convention: FFactorConvention = CALIBRATED_CONVENTION,
) -> np.ndarray:
    cosh_t, sinh_t = _tables_from_f(lam, nmax, convention)
    return _transformed_from_tables(params, lam, nmax, cosh_t, sinh_t)


def transformed_hamiltonian_matrix(
    params: ModelParams,
    lam: float,
    nmax: int,
    method: str = "displaced",
    check: bool = False,
) -> np.ndarray:
    """Hamiltonian conjugated by exp(lam sigma_z (a - a^dag)), on the
    x-spin ⊗ Fock basis (the +x block first, see ``x_state_index``).

    method "displaced" conjugates the product-basis Hamiltonian with
    truncated displacement matrices and is authoritative; "laguerre"
    assembles the same matrix from the calibrated f factors.  With
    ``check=True`` both are built and compared on the inner half of the Fock
    range, raising ConventionError on disagreement.

    Displacement mixes high Fock states, so only entries with both photon
    indices below nmax/2 should be trusted.
    """
    if nmax < 2:
        raise ValueError(f"nmax must be at least 2, got {nmax}")
    if method not in ("displaced", "laguerre"):
        raise ValueError(f"unknown method {method!r}")
    if not check:
        if method == "displaced":
            return _transformed_displaced(params, lam, nmax)
        return _transformed_laguerre(params, lam, nmax)
    numeric = _transformed_displaced(params, lam, nmax)
    analytic = _transformed_laguerre(params, lam, nmax)
    inner = _inner_indices(nmax)
    diff = np.max(np.abs(numeric[np.ix_(inner, inner)] - analytic[np.ix_(inner, inner)]))
    if diff > CONVENTION_ATOL:
        raise ConventionError(
            f"transformed-matrix routes disagree by {diff:.3e} on the inner block"
        )
    return numeric if method == "displaced" else analytic


def _inner_indices(nmax: int) -> np.ndarray:
    keep = nmax // 2
    plus = np.arange(keep)
    return np.concatenate([plus, plus + nmax + 1])


def grwa_matrix(
    params: ModelParams, lam: float, nmax: int, method: str = "displaced"
) -> np.ndarray:
    """Transformed matrix truncated to its ladder-block sparsity.

    Keeps the uncoupled (-x, 0) entry and, for each N >= 1, the 2x2 block
    over {(+x, N-1), (-x, N)}; everything else is dropped.  Eigenpairs of the
    retained blocks reproduce ``grwa_block``.
    """
    full = transformed_hamiltonian_matrix(params, lam, nmax, method=method)
    out = np.zeros_like(full)
    np.fill_diagonal(out, np.diag(full))
    for N in range(1, nmax + 1):
        i = x_state_index(+1, N - 1, nmax)
        j = x_state_index(-1, N, nmax)
        out[i, j] = full[i, j]
        out[j, i] = full[j, i]
    return out
