"""Figures of merit: Wigner function, negativity, cat fidelity and amplitude.

Also hosts the comparative studies: squeezing scans for the two-mode
(remote) scheme and the single-mode (local) scheme, with closed-form
series for the fidelity of each against an ideal cat state.

Wigner convention: quadratures (x, p) with hbar = 1, so the vacuum has
``W(0, 0) = 1/pi`` and ``int W dx dp = 1``.  Coordinates in terms of the
complex amplitude ``alpha = (x + i p)/sqrt(2)`` would double the values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from . import _kernels
from .errors import CutoffTooSmall, ValidationError, VacuumSubtraction
from .fockcore import (
    TAIL_TOL,
    DensityMatrix,
    FockVector,
    cat_amplitudes,
    db_to_r,
    parse_parity,
    smss_pure,
    subtract_photons,
)
from .protocol import ProjectionSpec, bob_pure_conditional, pure_tail_cutoff

WIGNER_CONVENTION = "quadrature; hbar=1; vacuum W(0,0)=1/pi"
SCHEMES = ("TMSS", "SMSS")


def _as_matrix(state) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return state.normalized().elems
    if isinstance(state, FockVector):
        v = state.normalize().amps
        return np.outer(v, v.conj())
    raise ValidationError(f"expected a FockVector or DensityMatrix, got {type(state).__name__}")


# ---------------------------------------------------------------------------
# Wigner function


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function sampled on a uniform grid; ``values[j, i] = W(xs[i], ps[j])``."""

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray
    convention: str = WIGNER_CONVENTION

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.xs, axis=1), self.ps))

    def negativity_volume(self) -> float:
        neg = np.clip(-self.values, 0.0, None)
        return float(trapezoid(trapezoid(neg, self.xs, axis=1), self.ps))

    def marginal_x(self) -> np.ndarray:
        """``int W(x, p) dp`` for each grid x."""
        return trapezoid(self.values, self.ps, axis=0)


def wigner_point(state, x: float, p: float) -> float:
    """Wigner function at a single phase-space point."""
    w = _kernels.wigner_grid(_as_matrix(state), np.array([float(x)]), np.array([float(p)]))
    return float(w[0, 0])


def wigner_grid(state, extent: float = 5.0, resolution: int = 201) -> WignerGrid:
    """Wigner function on ``[-extent, extent]^2`` with ``resolution`` points per axis."""
    if resolution < 2 or extent <= 0:
        raise ValidationError("grid needs extent > 0 and resolution >= 2")
    xs = np.linspace(-extent, extent, resolution)
    vals = _kernels.wigner_grid(_as_matrix(state), xs, xs)
    return WignerGrid(xs, xs.copy(), vals)


def w_origin(state) -> float:
    """``W(0, 0) = (1/pi) sum_m (-1)^m rho_mm``."""
    pops = np.diag(_as_matrix(state)).real
    signs = np.where(np.arange(pops.size) % 2 == 0, 1.0, -1.0)
    return float(np.dot(signs, pops) / math.pi)


def negativity_volume(state, extent: float = 6.0, resolution: int = 301) -> float:
    """``int int max(0, -W) dx dp`` by the trapezoid rule."""
    return wigner_grid(state, extent, resolution).negativity_volume()


# ---------------------------------------------------------------------------
# cat fits


@dataclass(frozen=True)
class CatFit:
    alpha_star: float
    parity: int
    fidelity: float


def _cat_matrix(alphas: np.ndarray, parity: int, dim: int) -> np.ndarray:
    """Rows are real cat amplitudes for each ``alpha`` (all ``alpha > 0``)."""
    a = np.asarray(alphas, dtype=float)[:, None]
    m = np.arange(dim)[None, :]
    a2 = a * a
    norm2 = 2.0 * (1.0 + np.exp(-2.0 * a2)) if parity == 1 else -2.0 * np.expm1(-2.0 * a2)
    logc = -0.5 * a2 + m * np.log(a) - 0.5 * gammaln(m + 1.0) + math.log(2.0) - 0.5 * np.log(norm2)
    allowed = (m % 2 == 0) if parity == 1 else (m % 2 == 1)
    return np.where(allowed, np.exp(logc), 0.0)


def _fidelity_curve(state, alphas, parity):
    if isinstance(state, FockVector):
        v = state.normalize().amps
        c = _cat_matrix(alphas, parity, v.size)
        return np.abs(c @ v) ** 2
    rho = _as_matrix(state)
    c = _cat_matrix(alphas, parity, rho.shape[0])
    return np.einsum("ai,ij,aj->a", c, rho, c).real


def cat_fidelity(state, alpha: float, parity) -> float:
    """Fidelity of ``state`` with the ideal cat of real amplitude ``alpha``."""
    parity = parse_parity(parity)
    rho = _as_matrix(state)
    c = cat_amplitudes(alpha, parity, rho.shape[0] - 1)
    f = float(np.vdot(c, rho @ c).real)
    return min(1.0, max(0.0, f))


def best_amplitude(state, parity, alpha_max: float = 4.0, step: float = 0.01, xatol: float = 1e-6) -> CatFit:
    """Real amplitude maximizing the cat fidelity on ``[1e-3, alpha_max]``.

    A grid with spacing ``step`` locates the best bracket; a bounded Brent
    search refines it.
    """
    parity = parse_parity(parity)
    if alpha_max < 0.1:
        raise ValidationError("alpha_max must be >= 0.1")
    lo = 1e-3
    grid = np.arange(lo, alpha_max + 0.5 * step, step)
    fids = _fidelity_curve(state, grid, parity)
    i = int(np.argmax(fids))
    a_lo, a_hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best_a, best_f = float(grid[i]), float(fids[i])
    if a_hi > a_lo:
        res = minimize_scalar(
            lambda a: -_fidelity_curve(state, np.array([a]), parity)[0],
            bounds=(a_lo, a_hi),
            method="bounded",
            options={"xatol": xatol},
        )
        if -res.fun >= best_f:
            best_a, best_f = float(res.x), float(-res.fun)
    return CatFit(best_a, parity, min(1.0, max(0.0, best_f)))


# ---------------------------------------------------------------------------
# closed-form fidelity series


def _cat_prefactor_log(alpha: float, parity: int) -> float:
    a2 = alpha * alpha
    norm2 = 2.0 * (1.0 + math.exp(-2.0 * a2)) if parity == 1 else -2.0 * math.expm1(-2.0 * a2)
    return -a2 - math.log(norm2)


def _series_length(t: float, base: int) -> int:
    # enough terms for t^(2m) * poly(m) to fall below 1e-40 of the peak
    if t <= 0:
        return base + 1
    return int(min(base + math.ceil(120.0 / -math.log(t * t)) + 60, 200000))


def tmss_fidelity(r: float, n: int, alpha: float, parity=None) -> float:
    """Closed-form fidelity of the n-photon remote state (p-quadrature projection at 0).

    The conditional amplitudes are ``sqrt(m!) i^{-(m-n)} tanh^m r H_{m-n}(0)
    / (sqrt(2^{m-n}) (m-n)!)``; only even ``m - n`` contribute.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    parity = (1 if n % 2 == 0 else -1) if parity is None else parse_parity(parity)
    if r <= 0:
        raise VacuumSubtraction("no photons to subtract at r = 0")
    if alpha <= 0:
        raise ValidationError("alpha must be > 0")
    t = math.tanh(r)
    jmax = _series_length(t, 0) // 2 + 1
    j = np.arange(jmax)
    m = n + 2 * j
    log_h = gammaln(2 * j + 1.0) - gammaln(j + 1.0)  # log |H_{2j}(0)|
    sign = ((-1.0) ** j) * ((-1.0) ** j)  # i^{-2j} times the sign of H_{2j}(0)
    log_norm = logsumexp(gammaln(m + 1.0) + 2 * m * math.log(t) - 2 * j * math.log(2.0) - 2 * gammaln(2 * j + 1.0) + 2 * log_h)
    pf = 1.0 + parity * ((-1.0) ** m)
    with np.errstate(divide="ignore"):
        log_s = m * math.log(t * alpha) - j * math.log(2.0) - gammaln(2 * j + 1.0) + log_h + np.log(pf)
    s, s_sign = logsumexp(log_s, b=sign, return_sign=True)
    if not np.isfinite(s):
        return 0.0
    return float(min(1.0, math.exp(_cat_prefactor_log(alpha, parity) + 2 * s - log_norm)))


def smss_fidelity(r: float, n: int, alpha: float, parity=None) -> float:
    """Closed-form fidelity of an n-photon-subtracted single-mode squeezed vacuum."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    parity = (1 if n % 2 == 0 else -1) if parity is None else parse_parity(parity)
    if r <= 0:
        raise VacuumSubtraction("no photons to subtract from the vacuum (r = 0)")
    if alpha <= 0:
        raise ValidationError("alpha must be > 0")
    t = math.tanh(r)
    m0 = (n + 1) // 2
    m = np.arange(m0, m0 + _series_length(t, 0))
    k = 2 * m - n
    log_norm = logsumexp(
        2 * m * math.log(t) + 2 * gammaln(2 * m + 1.0) - 2 * m * math.log(2.0) - 2 * gammaln(m + 1.0) - gammaln(k + 1.0)
    )
    pf = 1.0 + parity * ((-1.0) ** k)
    with np.errstate(divide="ignore"):
        log_s = (
            gammaln(2 * m + 1.0) + m * math.log(t) - m * math.log(2.0) - gammaln(m + 1.0)
            + k * math.log(alpha) - gammaln(k + 1.0) + np.log(pf)
        )
    s = logsumexp(log_s)
    if not np.isfinite(s):
        return 0.0
    return float(min(1.0, math.exp(_cat_prefactor_log(alpha, parity) + 2 * s - log_norm)))


def scheme_fidelity(scheme: str, r: float, n: int, alpha: float) -> float:
    scheme = _check_scheme(scheme)
    return tmss_fidelity(r, n, alpha) if scheme == "TMSS" else smss_fidelity(r, n, alpha)


def fidelity_at_amplitude(n: int, scheme: str, alpha: float, r_max: float = 2.5):
    """Best fidelity with the cat of amplitude ``alpha`` over squeezing ``r in (0, r_max]``.

    Returns ``(fidelity, r_star)``.
    """
    scheme = _check_scheme(scheme)
    rs = np.linspace(r_max / 250, r_max, 250)
    vals = np.array([scheme_fidelity(scheme, r, n, alpha) for r in rs])
    i = int(np.argmax(vals))
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, rs.size - 1)]
    res = minimize_scalar(lambda r: -scheme_fidelity(scheme, r, n, alpha), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-8})
    if -res.fun >= vals[i]:
        return float(-res.fun), float(res.x)
    return float(vals[i]), float(rs[i])


# ---------------------------------------------------------------------------
# squeezing scans


def _check_scheme(scheme: str) -> str:
    s = str(scheme).upper()
    if s not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    return s


def tmss_state(s_db: float, n: int, theta: float = math.pi / 2, cutoff: int | None = None) -> FockVector:
    """Remote n-photon state at squeezing ``s_db``; cutoff chosen from the tail if not given."""
    r = db_to_r(s_db)
    if cutoff is None:
        cutoff = pure_tail_cutoff(r, n)
    return bob_pure_conditional(r, n, ProjectionSpec(theta=theta), cutoff)


def smss_state(s_db: float, n: int, cutoff: int | None = None) -> FockVector:
    """Normalized n-photon-subtracted single-mode squeezed vacuum."""
    r = db_to_r(s_db)
    if cutoff is not None:
        out, _ = subtract_photons(smss_pure(r, cutoff, TAIL_TOL), n)
        return out.normalize()
    # subtraction amplifies the tail by ~m^n, so grow the cutoff until the
    # geometric tail estimate of the subtracted state is small enough
    t2 = math.tanh(r) ** 2
    cut = 20
    while True:
        try:
            out, _ = subtract_photons(smss_pure(r, cut, TAIL_TOL), n)
        except CutoffTooSmall:
            cut *= 2
            continue
        v = out.normalize().amps
        tail = float(np.max(np.abs(v[-4:]) ** 2)) / max(1.0 - t2, 1e-300)
        if tail <= TAIL_TOL * 1e-4 or cut > 8000:
            return out.normalize()
        cut *= 2


def scheme_state(scheme: str, s_db: float, n: int) -> FockVector:
    return tmss_state(s_db, n) if _check_scheme(scheme) == "TMSS" else smss_state(s_db, n)


@dataclass(frozen=True)
class SqueezingScan:
    n: int
    scheme: str
    s_grid: np.ndarray
    alphas: np.ndarray
    fidelities: np.ndarray
    s_star: float
    alpha_star: float
    f_star: float


def optimal_squeezing(n: int, scheme: str, s_grid, alpha_max: float = 5.0) -> SqueezingScan:
    """Scan squeezing levels (dB), fit the cat amplitude at each, and pick the best."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    scheme = _check_scheme(scheme)
    s_grid = np.asarray(s_grid, dtype=float)
    parity = 1 if n % 2 == 0 else -1
    alphas = np.empty(s_grid.size)
    fids = np.empty(s_grid.size)
    for i, s in enumerate(s_grid):
        fit = best_amplitude(scheme_state(scheme, s, n), parity, alpha_max)
        alphas[i], fids[i] = fit.alpha_star, fit.fidelity
    k = int(np.argmax(fids))
    return SqueezingScan(n, scheme, s_grid, alphas, fids, float(s_grid[k]), float(alphas[k]), float(fids[k]))
