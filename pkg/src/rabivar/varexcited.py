"""Variational excited states from ladder-block trial states with a free
displacement.

Each trial is one eigenvector of the 2x2 ladder block at displacement lam;
its quality is scored by the same summed-squared-coefficient objective as
the ground state, but with the block-truncated Hamiltonian as the zero-th
order and the remote matrix elements as the perturbation.  States are keyed
by their ladder label (sign, N) and never re-sorted by energy, so level
crossings keep their identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx import (
    aa_energy,
    cosh_sinh_tables,
    displacement_shift,
    grwa_block,
    grwa_block_offdiag,
)
from .exact import ExactSolution, overlap_match, solve_exact
from .model import ModelParams
from .specfun import displacement_matrix
from .varground import (
    DEGENERACY_GUARD,
    MAX_SHELLS,
    TAIL_ABS,
    TAIL_RTOL,
    _grid_minima,
    golden_minimize,
    scan_bracket,
)

# Total squared numerator weight (in units of the level splitting) that may
# be dropped by the degeneracy guard before the result is marked invalid.
DROPPED_WEIGHT_LIMIT = 1e-6


@dataclass(frozen=True)
class ExcitedTrial:
    """One ladder-block eigenvector at a free displacement."""

    N: int
    sign: int
    lam: float
    r: float
    s: float


@dataclass(frozen=True)
class ExcitedResult:
    """Optimized excited-state summary for one ladder label."""

    label: tuple
    lambda_opt: float
    k_at_opt: float
    energy: float
    mean_photon: float
    matched_exact_index: int
    valid: bool


@dataclass(frozen=True)
class ExcitedKEvaluation:
    k: float
    shells: int
    tail_converged: bool
    perturbative: bool
    dropped_weight: float

    @property
    def converged(self) -> bool:
        return self.tail_converged and self.perturbative


def excited_trial(params: ModelParams, lam: float, N: int, sign: int) -> ExcitedTrial:
    """Trial state for label (sign, N): the chosen branch of the 2x2 block."""
    if N < 1:
        raise ValueError(f"block index must be >= 1, got {N}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    block = grwa_block(params, lam, N)
    if sign > 0:
        return ExcitedTrial(N, sign, lam, block.r_plus, block.s_plus)
    return ExcitedTrial(N, sign, lam, block.r_minus, block.s_minus)


def excited_energy(params: ModelParams, trial: ExcitedTrial) -> float:
    """Energy expectation of the trial in the transformed frame.

    Being the block eigenvector, the trial's expectation equals the block
    eigenvalue of its branch at the trial's displacement.
    """
    a = aa_energy(params, trial.lam, +1, trial.N - 1)
    b = aa_energy(params, trial.lam, -1, trial.N)
    h = grwa_block_offdiag(params, trial.lam, trial.N)
    return trial.r**2 * a + trial.s**2 * b + 2.0 * trial.r * trial.s * h


def excited_mean_photon(params: ModelParams, trial: ExcitedTrial) -> float:
    """Photon number of the trial in the untransformed frame.

    The displacement adds lam^2 plus a cross term between the two block
    components; validated against the product-basis expectation value.
    """
    r, s, lam, N = trial.r, trial.s, trial.lam, trial.N
    return r * r * (N - 1) + s * s * N + lam * lam + 2.0 * r * s * lam * math.sqrt(N)


def excited_state_vector(params: ModelParams, trial: ExcitedTrial, nmax: int) -> np.ndarray:
    """Trial state in the (z-spin ⊗ Fock) product basis, normalized.

    ``nmax`` must leave room for the displaced components of Fock level N.
    """
    if nmax < trial.N + 2:
        raise ValueError("nmax too small for the trial's photon index")
    dim = nmax + 1
    d_plus = displacement_matrix(trial.lam, nmax)
    d_minus = displacement_matrix(-trial.lam, nmax)
    v = np.zeros(2 * dim)
    v[:dim] = (trial.r * d_plus[:, trial.N - 1] + trial.s * d_plus[:, trial.N]) / math.sqrt(2.0)
    v[dim:] = (trial.r * d_minus[:, trial.N - 1] - trial.s * d_minus[:, trial.N]) / math.sqrt(2.0)
    norm = np.linalg.norm(v)
    if norm < 1.0 - 1e-6:
        raise ValueError(f"truncation too small for trial state, |v| = {norm}")
    return v / norm


def _block_amplitudes(params: ModelParams, lam: float, cosh_t, sinh_t, M: int):
    """Eigen-data of ladder block M from precomputed tables."""
    omega, big_omega, g = params.omega, params.big_omega, params.g
    shift = displacement_shift(params, lam)
    a = (M - 1) * omega + shift + 0.5 * big_omega * cosh_t[M - 1, M - 1]
    b = M * omega + shift - 0.5 * big_omega * cosh_t[M, M]
    h = (omega * lam + g) * math.sqrt(M) - 0.5 * big_omega * sinh_t[M - 1, M]
    half_sum = 0.5 * (a + b)
    radius = math.hypot(0.5 * (a - b), h)
    theta = 0.5 * math.atan2(2.0 * h, a - b)
    c, s = math.cos(theta), math.sin(theta)
    return (half_sum + radius, c, s), (half_sum - radius, -s, c)


def _excited_k_eval(
    params: ModelParams, trial: ExcitedTrial, m_max: int | None = None
) -> ExcitedKEvaluation:
    """K for an excited trial, adaptively extending the block shells."""
    N, lam = trial.N, trial.lam
    size = m_max
    if size is None:
        size = min(MAX_SHELLS, max(12, N + 4, int(math.ceil(4.0 * lam * lam)) + 6))
    while True:
        result = _excited_k_fixed(params, trial, size)
        if m_max is not None or result.tail_converged or size >= MAX_SHELLS:
            return result
        size = min(2 * size, MAX_SHELLS)


def _excited_k_fixed(params: ModelParams, trial: ExcitedTrial, m_max: int) -> ExcitedKEvaluation:
    omega, big_omega, g = params.omega, params.big_omega, params.g
    N, sign, lam = trial.N, trial.sign, trial.lam
    r_n, s_n = trial.r, trial.s
    table_max = max(N, m_max) + 1
    cosh_t, sinh_t = cosh_sinh_tables(lam, table_max)
    lin = omega * lam + g
    half = 0.5 * big_omega

    (e_up, r_up, s_up), (e_dn, r_dn, s_dn) = _block_amplitudes(params, lam, cosh_t, sinh_t, N)
    e_ref = e_up if sign > 0 else e_dn

    guard = DEGENERACY_GUARD * big_omega
    k = 0.0
    dropped_weight = 0.0
    perturbative = True
    last_shell = 0.0

    # the uncoupled (-x, 0) state carries the even-parity ladder's bottom
    if N % 2 == 0:
        e0 = displacement_shift(params, lam) - half * cosh_t[0, 0]
        w = r_n * (lin * (1.0 if N == 2 else 0.0) + half * sinh_t[0, N - 1])
        w += s_n * (-half * cosh_t[0, N])
        den = e0 - e_ref
        if abs(den) < guard:
            dropped_weight += (w / big_omega) ** 2
        else:
            c = w / den
            k += c * c
            perturbative &= abs(c) < 1.0

    start = 1 if N % 2 == 1 else 2
    for M in range(start, m_max + 1, 2):
        if M == N:
            continue
        branches = _block_amplitudes(params, lam, cosh_t, sinh_t, M)
        # remote elements between block M and block N components
        m11 = half * cosh_t[M - 1, N - 1]
        m22 = -half * cosh_t[M, N]
        m12 = -half * sinh_t[M - 1, N]
        if M == N + 2:
            m12 += lin * math.sqrt(N + 1)
        m21 = half * sinh_t[M, N - 1]
        if M == N - 2:
            m21 += lin * math.sqrt(N - 1)
        shell = 0.0
        for e_m, r_m, s_m in branches:
            w = (
                r_m * (m11 * r_n + m12 * s_n)
                + s_m * (m21 * r_n + m22 * s_n)
            )
            den = e_m - e_ref
            if abs(den) < guard:
                dropped_weight += (w / big_omega) ** 2
                continue
            c = w / den
            shell += c * c
            perturbative &= abs(c) < 1.0
        k += shell
        last_shell = shell
    tail_ok = last_shell <= max(TAIL_RTOL * k, TAIL_ABS)
    return ExcitedKEvaluation(
        k=k,
        shells=m_max,
        tail_converged=bool(tail_ok),
        perturbative=bool(perturbative),
        dropped_weight=dropped_weight,
    )


def excited_k(params: ModelParams, trial: ExcitedTrial, m_max: int | None = None) -> float:
    """Summed squared first-order coefficients for an excited trial."""
    return _excited_k_eval(params, trial, m_max).k


def excited_solve(
    params: ModelParams,
    N: int,
    sign: int,
    exact_solution: ExactSolution | None = None,
    points: int = 2001,
) -> ExcitedResult:
    """Optimize the displacement for label (sign, N) by minimizing K.

    Uses the same bracket, grid, and golden-section protocol as the ground
    solver; the refined minimum with the lowest K wins.  The returned result
    also carries the index of the exact eigenstate matched by overlap, for
    comparison output near level crossings.
    """
    if N < 1:
        raise ValueError(f"block index must be >= 1, got {N}")
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if params.g == 0.0:
        lam_opt = 0.0
        keval = ExcitedKEvaluation(0.0, 0, True, True, 0.0)
    else:
        lo, hi = scan_bracket(params)
        grid = np.linspace(lo, hi, points)
        ks = np.array([excited_k(params, excited_trial(params, float(x), N, sign)) for x in grid])
        minima = []
        for idx in _grid_minima(ks):
            blo = float(grid[max(idx - 1, 0)])
            bhi = float(grid[min(idx + 1, points - 1)])
            x, fx = golden_minimize(
                lambda t: excited_k(params, excited_trial(params, t, N, sign)), blo, bhi
            )
            minima.append((fx, -x))
        if minima:
            minima.sort()
            lam_opt = -minima[0][1]
        else:
            lam_opt = float(grid[int(np.argmin(ks))])
        keval = _excited_k_eval(params, excited_trial(params, lam_opt, N, sign))
    trial = excited_trial(params, lam_opt, N, sign)
    if exact_solution is None:
        exact_solution = solve_exact(params)
    vec = excited_state_vector(params, trial, exact_solution.nmax_used)
    matched_index, _ = overlap_match(exact_solution, vec)
    return ExcitedResult(
        label=(sign, N),
        lambda_opt=lam_opt,
        k_at_opt=keval.k,
        energy=excited_energy(params, trial),
        mean_photon=excited_mean_photon(params, trial),
        matched_exact_index=matched_index,
        valid=bool(keval.tail_converged and keval.dropped_weight <= DROPPED_WEIGHT_LIMIT),
    )


def asymptotic_k_prefactor(params: ModelParams, N: int, sign: int, lam: float) -> float:
    """Large-coupling prefactor F in K ~ F (omega lam + g)^2.

    Only the two parity-allowed neighbor blocks (N-2 and N+2, or the bottom
    state when N = 2) survive once the spin-flip factors are exponentially
    suppressed; F collects their amplitudes over squared energy gaps, so the
    projection behaves as [1 + F (omega lam + g)^2]^(-1/2) and is optimal at
    lam = -g/omega.
    """
    if N < 1:
        raise ValueError(f"block index must be >= 1, got {N}")
    block = grwa_block(params, lam, N)
    if sign > 0:
        e_ref, r_n, s_n = block.e_plus, block.r_plus, block.s_plus
    elif sign == -1:
        e_ref, r_n, s_n = block.e_minus, block.r_minus, block.s_minus
    else:
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    total = 0.0
    if N >= 3:
        down = grwa_block(params, lam, N - 2)
        for e_m, amp in ((down.e_plus, down.s_plus), (down.e_minus, down.s_minus)):
            den = e_m - e_ref
            if den == 0.0:
                raise ValueError("degenerate energy denominator")
            total += (r_n * math.sqrt(N - 1) * amp / den) ** 2
    elif N == 2:
        e0 = aa_energy(params, lam, -1, 0)
        den = e0 - e_ref
        if den == 0.0:
            raise ValueError("degenerate energy denominator")
        total += (r_n * 1.0 / den) ** 2
    up = grwa_block(params, lam, N + 2)
    for e_m, amp in ((up.e_plus, up.r_plus), (up.e_minus, up.r_minus)):
        den = e_m - e_ref
        if den == 0.0:
            raise ValueError("degenerate energy denominator")
        total += (s_n * math.sqrt(N + 1) * amp / den) ** 2
    return total
