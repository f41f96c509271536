"""Variational ground state built on a two-coherent-state trial.

The displacement is scored by K(lam), the summed squared first-order
coefficients of the transformed Hamiltonian column through the displaced
ground state.  Small K means the trial is close to the exact ground state;
the landscape of K over lam decides whether a single displacement, a
weighted pair, or no coherent displacement at all describes the ground
state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .approx import trial_ground_energy
from .model import ModelParams
from .specfun import _laguerre_sequence, displacement_matrix

# Refinement stops once the bracket is narrower than this (absolute in lam).
GOLDEN_XTOL = 1e-10
# First-order denominators below this (times the level splitting) mean an
# accidental degeneracy; the term is dropped and counted instead of blowing
# up the sum.
DEGENERACY_GUARD = 1e-10
# Largest photon shell the adaptive objective will include.
MAX_SHELLS = 64
# A shell tail is converged once it contributes less than this relative to K
# (or absolutely, when K is essentially zero).
TAIL_RTOL = 1e-12
TAIL_ABS = 1e-16
# Refined minima closer than this in lam are merged into one.
MINIMA_MERGE_TOL = 1e-6


class Classification(Enum):
    ONE_MINIMUM = "one_minimum"
    TWO_MINIMUM = "two_minimum"
    MULTI_MINIMUM = "multi_minimum"


@dataclass(frozen=True)
class KEvaluation:
    """K at one displacement, with convergence diagnostics.

    ``tail_converged`` reports the shell-sum truncation rule;
    ``perturbative`` is False once any retained coefficient reaches one, at
    which point the first-order expansion behind K stops converging.
    """

    k: float
    shells: int
    tail_converged: bool
    perturbative: bool
    dropped: int
    coefficients: np.ndarray

    @property
    def converged(self) -> bool:
        return self.tail_converged and self.perturbative


def _ground_coefficients(params: ModelParams, lam: float, m_max: int):
    """First-order coefficients c_N for shells N = 1..m_max.

    Shell N couples to the displaced ground state through the +x spin for odd
    N and the -x spin for even N (the only parity-allowed combinations).
    Returns (coefficients, dropped_count).
    """
    omega, big_omega, g = params.omega, params.big_omega, params.g
    nu = -2.0 * lam
    z = nu * nu
    shells = np.arange(1, m_max + 1)
    if nu == 0.0:
        w = np.zeros(m_max)
    else:
        w = np.exp(shells * math.log(abs(nu)) - 0.5 * z - 0.5 * gammaln(shells + 1.0))
        if nu < 0.0:
            w[::2] *= -1.0  # odd powers of nu
    numer = -0.5 * big_omega * w
    numer[0] += omega * lam + g
    f0 = math.exp(-0.5 * z) * _laguerre_sequence(m_max, 0, z)
    spin = np.where(shells % 2 == 1, 1.0, -1.0)
    denom = omega * shells + 0.5 * big_omega * (spin * f0[1:] + f0[0])
    guard = DEGENERACY_GUARD * big_omega
    bad = np.abs(denom) < guard
    coeff = np.zeros(m_max)
    np.divide(numer, denom, out=coeff, where=~bad)
    return coeff, int(np.count_nonzero(bad))


def evaluate_k(params: ModelParams, lam: float, m_max: int | None = None) -> KEvaluation:
    """Evaluate K(lam), growing the shell count until the tail is negligible.

    With an explicit ``m_max`` the shell count is fixed instead.
    """
    if m_max is not None:
        if m_max < 4:
            raise ValueError(f"m_max must be at least 4, got {m_max}")
        coeff, dropped = _ground_coefficients(params, lam, m_max)
        k = float(coeff @ coeff)
        tail_ok = coeff[-1] ** 2 <= max(TAIL_RTOL * k, TAIL_ABS)
        return KEvaluation(
            k=k,
            shells=m_max,
            tail_converged=bool(tail_ok),
            perturbative=bool(np.all(np.abs(coeff) < 1.0)),
            dropped=dropped,
            coefficients=coeff,
        )
    size = min(MAX_SHELLS, max(12, int(math.ceil(4.0 * lam * lam)) + 6))
    while True:
        coeff, dropped = _ground_coefficients(params, lam, size)
        k = float(coeff @ coeff)
        tail_ok = coeff[-1] ** 2 <= max(TAIL_RTOL * k, TAIL_ABS)
        if tail_ok or size >= MAX_SHELLS:
            break
        size = min(2 * size, MAX_SHELLS)
    return KEvaluation(
        k=k,
        shells=size,
        tail_converged=bool(tail_ok),
        perturbative=bool(np.all(np.abs(coeff) < 1.0)),
        dropped=dropped,
        coefficients=coeff,
    )


def perturbation_coefficients(params: ModelParams, lam: float, m_max: int = 24):
    """Parity-allowed first-order coefficients as (spin_sign, N, value).

    Labels follow the x-spin convention: (+1, odd N) and (-1, even N); every
    other combination vanishes by parity and is not listed.
    """
    if m_max < 4:
        raise ValueError(f"m_max must be at least 4, got {m_max}")
    coeff, _ = _ground_coefficients(params, lam, m_max)
    return [
        (+1 if N % 2 == 1 else -1, N, float(coeff[N - 1]))
        for N in range(1, m_max + 1)
    ]


def k_of_lambda(params: ModelParams, lam: float, m_max: int | None = None) -> float:
    """K(lam): the summed squared first-order coefficients."""
    return evaluate_k(params, lam, m_max).k


def projection_p(k: float) -> float:
    """Projection of the trial on the first-order state, (1 + K)^(-1/2)."""
    if k < 0:
        raise ValueError(f"K must be non-negative, got {k}")
    return 1.0 / math.sqrt(1.0 + k)


def lambda_effective(lambda_a: float, k_a: float, lambda_b: float, k_b: float) -> float:
    """K-weighted combination of two minima (the deeper one dominates)."""
    if k_a < 0 or k_b < 0:
        raise ValueError("K weights must be non-negative")
    if k_a == 0.0 and k_b == 0.0:
        raise ValueError("degenerate weights: both K values are zero")
    return (k_b * lambda_a + k_a * lambda_b) / (k_a + k_b)


def golden_minimize(func, lo: float, hi: float, xtol: float = GOLDEN_XTOL):
    """Golden-section minimum of ``func`` on [lo, hi] to absolute ``xtol``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = func(d)
    x = 0.5 * (a + b)
    return x, func(x)


def _grid_minima(values: np.ndarray):
    """Indices of interior local minima; plateau ties resolve to the end
    nearer lam = 0 (the grids here ascend toward zero)."""
    idxs = []
    n = len(values)
    i = 1
    while i < n - 1:
        if values[i] < values[i - 1]:
            j = i
            while j + 1 < n and values[j + 1] == values[i]:
                j += 1
            if j < n - 1 and values[j + 1] > values[i]:
                idxs.append(j)
                i = j + 1
                continue
        i += 1
    return idxs


@dataclass
class LandscapeResult:
    """K over a displacement grid with its refined minima.

    ``components`` holds the squared leading coefficients, columns ordered
    (+,1), (-,2), (+,3), (-,4).  ``converged`` is the per-point flag from
    ``evaluate_k``.
    """

    lambda_grid: np.ndarray
    k_values: np.ndarray
    components: np.ndarray
    converged: np.ndarray
    minima: list
    classification: Classification


def scan_landscape(
    params: ModelParams, lambda_lo: float, lambda_hi: float, points: int
) -> LandscapeResult:
    """Grid K(lam), bracket and refine its interior minima, classify.

    Classification follows the refined minima count (1, 2, or more).  It is
    forced to ``MULTI_MINIMUM`` when the shell sum fails to converge anywhere,
    or when an interior maximum of K falls where the expansion is
    non-perturbative: such a hill separates basins through a region where K
    itself is meaningless, so the minima cannot be weighted against each
    other.  A non-perturbative sliver on a monotone wall (typically at the
    margin end of the bracket, far from any minimum) is harmless and does
    not affect the classification.
    """
    if not lambda_lo < lambda_hi <= 0.0:
        raise ValueError("need lambda_lo < lambda_hi <= 0")
    if points < 101:
        raise ValueError(f"at least 101 grid points required, got {points}")
    grid = np.linspace(lambda_lo, lambda_hi, points)
    evals = [evaluate_k(params, float(x)) for x in grid]
    ks = np.array([e.k for e in evals])
    comp = np.array([e.coefficients[:4] ** 2 for e in evals])
    conv = np.array([e.converged for e in evals])
    tails = np.array([e.tail_converged for e in evals])
    pert = np.array([e.perturbative for e in evals])

    minima = []
    for idx in _grid_minima(ks):
        lo = grid[max(idx - 1, 0)]
        hi = grid[min(idx + 1, points - 1)]
        x, fx = golden_minimize(lambda t: k_of_lambda(params, t), float(lo), float(hi))
        minima.append((x, fx))
    minima.sort()
    merged = []
    for x, fx in minima:
        if merged and abs(x - merged[-1][0]) < MINIMA_MERGE_TOL:
            # keep the lower K; on a tie prefer the smaller |lam| (later x)
            if fx <= merged[-1][1]:
                merged[-1] = (x, fx)
        else:
            merged.append((x, fx))

    interior_max = (ks[1:-1] > ks[:-2]) & (ks[1:-1] > ks[2:])
    hidden_basin = bool(np.any(interior_max & ~pert[1:-1]))
    if not bool(tails.all()) or hidden_basin or len(merged) > 2:
        cls = Classification.MULTI_MINIMUM
    elif len(merged) == 2:
        cls = Classification.TWO_MINIMUM
    else:
        cls = Classification.ONE_MINIMUM
    return LandscapeResult(
        lambda_grid=grid,
        k_values=ks,
        components=comp,
        converged=conv,
        minima=merged,
        classification=cls,
    )


def ground_energy(params: ModelParams, lam: float) -> float:
    """Trial ground energy omega lam^2 + 2 g lam - (Omega/2) exp(-2 lam^2)."""
    return trial_ground_energy(params, lam)


def ground_mean_photon(lam: float) -> float:
    """Mean photon number of the trial ground state: lam^2."""
    return lam * lam


def lambda_limits(params: ModelParams):
    """Weak- and strong-coupling displacement asymptotes.

    Returns (-g/(omega + big_omega), -g/omega); the optimum interpolates
    between them as the coupling grows.
    """
    return (-params.g / (params.omega + params.big_omega), -params.g / params.omega)


def scan_bracket(params: ModelParams):
    """Displacement search range: both asymptotes plus margin, up to zero."""
    base = -params.g / params.omega
    return min(1.25 * base, base - 0.5), 0.0


def c1_squared(params: ModelParams, lam: float) -> float:
    """Squared leading coefficient c_{+,1}^2 in closed form."""
    damp = math.exp(-2.0 * lam * lam)
    numer = params.omega * lam + params.g + params.big_omega * lam * damp
    denom = params.omega + 0.5 * params.big_omega * damp * (2.0 - 4.0 * lam * lam)
    if denom == 0.0:
        return math.inf
    return (numer / denom) ** 2


@dataclass(frozen=True)
class GroundResult:
    """Optimized ground-state summary for one parameter point."""

    lambda_opt: float
    k_at_opt: float
    p_at_opt: float
    energy: float
    mean_photon: float
    regime: Classification
    valid: bool


def ground_solve(params: ModelParams, points: int = 2001) -> GroundResult:
    """Scan, classify, and pick the ground displacement.

    One minimum: minimize the dominant coefficient c_{+,1}^2 (it shares the
    basin with K and is cheap to refine).  Two minima: K-weighted effective
    displacement.  More: the trial form is unreliable; the global K minimum
    is reported with ``valid = False``.
    """
    if params.g == 0.0:
        return GroundResult(
            lambda_opt=0.0,
            k_at_opt=0.0,
            p_at_opt=1.0,
            energy=-0.5 * params.big_omega,
            mean_photon=0.0,
            regime=Classification.ONE_MINIMUM,
            valid=True,
        )
    lo, hi = scan_bracket(params)
    scan = scan_landscape(params, lo, hi, points)
    if scan.classification is Classification.ONE_MINIMUM:
        idx = int(np.argmin([c1_squared(params, float(x)) for x in scan.lambda_grid]))
        blo = float(scan.lambda_grid[max(idx - 1, 0)])
        bhi = float(scan.lambda_grid[min(idx + 1, points - 1)])
        lam_opt, _ = golden_minimize(lambda t: c1_squared(params, t), blo, bhi)
        valid = True
    elif scan.classification is Classification.TWO_MINIMUM:
        (la, ka), (lb, kb) = scan.minima
        lam_opt = lambda_effective(la, ka, lb, kb)
        valid = True
    else:
        if scan.minima:
            lam_opt = min(scan.minima, key=lambda m: (m[1], m[0]))[0]
        else:
            lam_opt = float(scan.lambda_grid[int(np.argmin(scan.k_values))])
        valid = False
    k_opt = k_of_lambda(params, lam_opt)
    return GroundResult(
        lambda_opt=lam_opt,
        k_at_opt=k_opt,
        p_at_opt=projection_p(k_opt),
        energy=ground_energy(params, lam_opt),
        mean_photon=ground_mean_photon(lam_opt),
        regime=scan.classification,
        valid=valid,
    )


def ground_state_vector(params: ModelParams, lam: float, nmax: int) -> np.ndarray:
    """Trial ground state in the (z-spin ⊗ Fock) product basis.

    The odd superposition of two opposite coherent displacements; used by
    tests to take expectation values against the bare Hamiltonian.
    """
    dim = nmax + 1
    v = np.zeros(2 * dim)
    v[:dim] = displacement_matrix(lam, nmax)[:, 0] / math.sqrt(2.0)
    v[dim:] = -displacement_matrix(-lam, nmax)[:, 0] / math.sqrt(2.0)
    return v
