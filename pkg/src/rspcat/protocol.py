"""Alice-side photon subtraction and homodyne projection; Bob's conditional state.

Pure-state route: ``<x^theta|_A a_A^n |TMSS>``.  Mixed route: the effective
two-mode state of :mod:`rspcat.gaussianmodel`, one subtracted photon, and a
projection (exact or windowed) on Alice's rotated quadrature.  Both routes
share one structure: Bob's matrix element is a contraction of the two-mode
coefficients with an Alice kernel ``K[a, a']`` built from Hermite functions
(``psi_a(x) psi_a'(x)`` for an exact outcome, its integral over a window
otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .errors import CutoffTooSmall, ValidationError, VacuumSubtraction
from .fockcore import TAIL_TOL, DensityMatrix, FockVector, hermite_functions
from .gaussianmodel import EffectiveParams

_TWO_PI = 2.0 * math.pi
_NEGLIGIBLE = 1e-18
_MAX_ALICE = 800


@dataclass(frozen=True)
class ProjectionSpec:
    """Homodyne post-selection on Alice's quadrature ``x^theta``.

    ``theta = 0`` measures x, ``theta = pi/2`` measures p.  ``window = 0`` is
    an exact projection onto ``outcome``; otherwise outcomes in
    ``[outcome - window, outcome + window]`` are accepted.
    """

    theta: float = math.pi / 2
    outcome: float = 0.0
    window: float = 0.0

    def __post_init__(self):
        if not (self.window >= 0.0):
            raise ValidationError(f"selection window must be >= 0, got {self.window}")
        object.__setattr__(self, "theta", math.fmod(self.theta, _TWO_PI) % _TWO_PI)


# ---------------------------------------------------------------------------
# pure route


def _pure_log_amplitudes(r, n, outcome, mmax):
    """log|amplitude| and sign/phase-free real factor for m = n..mmax (theta = 0)."""
    m = np.arange(n, mmax + 1)
    k = m - n
    logt = math.log(math.tanh(r))
    if outcome == 0.0:
        # H_{2j}(0) = (-2)^j (2j)!/(2^j j!) * ... written as (-1)^j (2j)!/j!
        j = k // 2
        even = k % 2 == 0
        logh = gammaln(2 * j + 1.0) - gammaln(j + 1.0)
        logmag = 0.5 * gammaln(m + 1.0) + m * logt - 0.5 * k * math.log(2.0) - gammaln(k + 1.0) + logh
        sign = np.where(j % 2 == 0, 1.0, -1.0)
        return np.where(even, logmag, -np.inf), np.where(even, sign, 0.0)
    psi = hermite_functions(int(k.max()), np.array([outcome]))[:, 0]
    logmag = 0.5 * (gammaln(m + 1.0) - gammaln(k + 1.0)) + m * logt
    with np.errstate(divide="ignore"):
        return logmag + np.log(np.abs(psi[k])), np.sign(psi[k])


def _pure_extent(r, n, cutoff):
    t2 = math.tanh(r) ** 2
    extra = math.ceil((60.0 + n * math.log(cutoff + 2.0)) / -math.log(t2)) if t2 > 0 else 0
    return cutoff + max(extra, 16)


def bob_pure_conditional(
    r: float,
    n: int,
    spec: ProjectionSpec = ProjectionSpec(),
    cutoff: int = 40,
    tail_tol: float = TAIL_TOL,
) -> FockVector:
    """Bob's normalized state after ``n`` subtractions and an exact projection.

    Amplitudes ``sqrt(m!/(m-n)!) tanh^m r <x^theta|m-n>`` for ``m >= n``.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if spec.window != 0.0:
        raise ValidationError("bob_pure_conditional needs an exact projection (window = 0)")
    if r <= 0.0:
        raise VacuumSubtraction("no photons to subtract from the vacuum (r = 0)")
    mmax = _pure_extent(r, n, cutoff)
    logmag, sign = _pure_log_amplitudes(r, n, spec.outcome, mmax)
    if not np.isfinite(logmag).any():
        raise VacuumSubtraction("conditional state vanishes at this outcome")
    ref = np.max(logmag)
    w = np.exp(2.0 * (logmag - ref))
    m = np.arange(n, mmax + 1)
    inside = m <= cutoff
    total = w.sum()
    tail = w[~inside].sum() / total
    if tail > tail_tol:
        raise CutoffTooSmall(f"bob_pure_conditional: tail mass {tail:.3e} beyond cutoff {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    mi = m[inside]
    amps[mi] = sign[inside] * np.exp(logmag[inside] - ref) * np.exp(-1j * (mi - n) * spec.theta)
    return FockVector(amps / math.sqrt(w[inside].sum()))


def pure_tail_cutoff(r: float, n: int, tail_tol: float = TAIL_TOL, minimum: int = 20) -> int:
    """Smallest cutoff (>= ``minimum``) passing the tail check of the pure route."""
    mmax = _pure_extent(r, n, max(minimum, 200))
    logmag, _ = _pure_log_amplitudes(r, n, 0.0, mmax)
    w = np.exp(2.0 * (logmag - np.max(logmag)))
    tail = np.cumsum(w[::-1])[::-1] / w.sum()
    m = np.arange(n, mmax + 1)
    # tail[i] is the mass at indices >= m[i]; need mass above the cutoff
    ok = np.nonzero(tail <= tail_tol)[0]
    cut = int(m[ok[0]]) - 1 if ok.size else mmax
    return max(minimum, cut)


# ---------------------------------------------------------------------------
# mixed route


def _alice_extent(p: EffectiveParams) -> int:
    nbar = p.alice_mean_photons()
    if nbar <= 0:
        return 8
    q = nbar / (nbar + 1.0)
    need = math.ceil(math.log(_NEGLIGIBLE) / math.log(q)) + 10
    return int(min(max(need, 12), _MAX_ALICE))


def _bob_extent(p: EffectiveParams, cutoff: int) -> int:
    q = p.zeta**2
    need = math.ceil(math.log(_NEGLIGIBLE) / math.log(q)) + 10 if q > 0 else 4
    return int(max(cutoff, min(need, _MAX_ALICE)))


def _alice_distribution(p: EffectiveParams, na: int) -> np.ndarray:
    """Alice's reduced photon-number distribution ``w[0..na]``."""
    return _kernels.alice_weights(p.zeta, p.r_s, p.eta, na, _bob_extent(p, na))


def _subtraction_norm(w: np.ndarray) -> float:
    return float(np.dot(np.arange(w.size), w))


def _exact_kernel(na: int, x: float) -> np.ndarray:
    psi = hermite_functions(na - 1, np.array([x]))[:, 0]
    return np.outer(psi, psi)


def _window_kernel(na: int, lo: float, hi: float, nodes: int) -> np.ndarray:
    t, wts = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (hi - lo)
    xs = 0.5 * (hi + lo) + half * t
    psi = hermite_functions(na - 1, xs)
    return (psi * (wts * half)) @ psi.T


def _assemble_bob(p: EffectiveParams, kmat: np.ndarray, cutoff: int, theta: float) -> np.ndarray:
    block = _kernels.mixed_block(p.zeta, p.r_s, p.eta, kmat, cutoff)
    m = np.arange(cutoff + 1)
    phase = np.exp(1j * theta * (m[None, :] - m[:, None]))
    return block * phase


def _check_bob_tail(p, kmat, block_trace, cutoff, tail_tol, what):
    # Bob's full-space trace equals sum_m1 m1 w(m1) K[m1-1, m1-1]
    na = kmat.shape[0]
    w = _alice_distribution(p, na)
    full = float(np.dot(np.arange(1, na + 1) * w[1:], np.diag(kmat)))
    if full <= 0.0:
        raise VacuumSubtraction(f"{what}: conditional state has zero probability")
    tail = 1.0 - block_trace / full
    if tail > tail_tol:
        raise CutoffTooSmall(f"{what}: tail mass {tail:.3e} beyond cutoff {cutoff}")
    return full


def bob_mixed_conditional(
    p: EffectiveParams,
    spec: ProjectionSpec = ProjectionSpec(),
    cutoff: int = 40,
    tail_tol: float = TAIL_TOL,
) -> DensityMatrix:
    """Bob's normalized state after one subtraction and an exact projection.

    ``weight`` of the result is the unnormalized trace, i.e. the outcome
    density times the subtraction normalizer.
    """
    if spec.window != 0.0:
        raise ValidationError("use bob_windowed for a finite selection window")
    na = _alice_extent(p)
    kmat = _exact_kernel(na, spec.outcome)
    rho = _assemble_bob(p, kmat, cutoff, spec.theta)
    tr = float(np.trace(rho).real)
    _check_bob_tail(p, kmat, tr, cutoff, tail_tol, "bob_mixed_conditional")
    if tr <= 0.0:
        raise VacuumSubtraction("conditional state has zero probability at this outcome")
    return DensityMatrix(rho / tr, weight=tr)


def outcome_pdf(p: EffectiveParams, theta: float, x):
    """Density of Alice's homodyne outcome given a subtraction click.

    Independent of ``theta``: Alice's reduced state is phase-symmetric.
    """
    del theta
    na = _alice_extent(p)
    w = _alice_distribution(p, na)
    norm = _subtraction_norm(w)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    psi = hermite_functions(na - 1, xs)
    dens = (np.arange(1, na + 1) * w[1:]) @ (psi * psi) / norm
    return float(dens[0]) if np.ndim(x) == 0 else dens


def _window_bounds(spec: ProjectionSpec, na: int):
    reach = math.sqrt(2.0 * na + 1.0) + 12.0
    lo = max(spec.outcome - spec.window, -reach)
    hi = min(spec.outcome + spec.window, reach)
    return lo, hi


def success_probability(p: EffectiveParams, spec: ProjectionSpec, tol: float = 1e-12) -> float:
    """Probability that the heralded outcome falls inside the selection window."""
    if spec.window == 0.0:
        return 0.0
    na = _alice_extent(p)
    w = _alice_distribution(p, na)
    coef = np.arange(1, na + 1) * w[1:] / _subtraction_norm(w)
    lo, hi = _window_bounds(spec, na)
    if hi <= lo:
        return 0.0
    prev = None
    nodes = 32
    while True:
        diag = np.sum(_window_psi(na, lo, hi, nodes) ** 2, axis=1)
        val = float(coef @ diag)
        if prev is not None and abs(val - prev) <= tol:
            return min(1.0, max(0.0, val))
        if nodes >= 4096:
            return min(1.0, max(0.0, val))
        prev = val
        nodes *= 2


def _window_psi(na, lo, hi, nodes):
    t, wts = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (hi - lo)
    xs = 0.5 * (hi + lo) + half * t
    return hermite_functions(na - 1, xs) * np.sqrt(wts * half)


def bob_windowed(
    p: EffectiveParams,
    spec: ProjectionSpec,
    cutoff: int = 40,
    tail_tol: float = TAIL_TOL,
    rtol: float = 1e-8,
) -> DensityMatrix:
    """Bob's normalized state averaged over the accepted outcome window.

    Gauss-Legendre with 32 nodes, doubled until the normalized matrix moves
    by less than ``rtol`` (max-abs).  ``weight`` is the unnormalized trace.
    """
    if spec.window <= 0.0:
        raise ValidationError("bob_windowed needs window > 0")
    na = _alice_extent(p)
    lo, hi = _window_bounds(spec, na)
    nodes = 32
    prev = None
    while True:
        kmat = _window_kernel(na, lo, hi, nodes)
        rho = _assemble_bob(p, kmat, cutoff, spec.theta)
        tr = float(np.trace(rho).real)
        cur = rho / tr
        if prev is not None and np.max(np.abs(cur - prev)) < rtol:
            break
        if nodes >= 4096:
            break
        prev = cur
        nodes *= 2
    _check_bob_tail(p, kmat, tr, cutoff, tail_tol, "bob_windowed")
    return DensityMatrix(cur, weight=tr)
