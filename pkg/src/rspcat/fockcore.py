"""Single- and two-mode Fock-space states and the numerics shared by all modules.

Conventions: hbar = 1, quadrature ``x = (a + a^dagger)/sqrt(2)``, vacuum
quadrature variance 1/2, squeezing level ``s = -10 log10(2 V_s)`` dB.

All amplitudes are built in the log domain, so factorials and powers of two
never overflow.  Constructors refuse to truncate silently: if the Fock cutoff
would drop more than :data:`TAIL_TOL` of probability they raise
:class:`~rspcat.errors.CutoffTooSmall`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .errors import CutoffTooSmall, DegenerateCat, ValidationError, VacuumSubtraction

TAIL_TOL = 1e-12

_LN10_OVER_20 = math.log(10.0) / 20.0


# ---------------------------------------------------------------------------
# unit conversions


def db_to_r(s_db: float) -> float:
    """Squeezing level in dB to squeezing parameter r."""
    if not math.isfinite(s_db):
        raise ValidationError(f"squeezing level must be finite, got {s_db!r}")
    return s_db * _LN10_OVER_20


def r_to_db(r: float) -> float:
    return r / _LN10_OVER_20


def db_to_variance(s_db: float) -> float:
    """Squeezed-quadrature variance ``V_s = exp(-2r)/2`` for a level in dB."""
    return 0.5 * 10.0 ** (-s_db / 10.0)


def variance_to_db(v_s: float) -> float:
    return -10.0 * math.log10(2.0 * v_s)


def parse_parity(parity) -> int:
    """Accept +1/-1, '+'/'-', 'even'/'odd'; return +1 or -1."""
    if parity in (1, "+", "even", "plus"):
        return 1
    if parity in (-1, "-", "odd", "minus"):
        return -1
    raise ValidationError(f"parity must be +1/-1, '+'/'-' or 'even'/'odd', got {parity!r}")


# ---------------------------------------------------------------------------
# state containers


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockVector:
    """Pure single-mode state ``sum_m amps[m] |m>`` with cutoff ``len(amps) - 1``."""

    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        a = np.atleast_1d(self.amps)
        if a.ndim != 1 or a.size < 2:
            raise ValidationError("FockVector needs a 1-d amplitude array with cutoff >= 1")
        object.__setattr__(self, "amps", _frozen(a, complex))

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> FockVector:
        nrm = math.sqrt(self.norm_squared())
        if nrm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return FockVector(self.amps / nrm, normalized=True)

    def padded(self, cutoff: int) -> FockVector:
        if cutoff < self.cutoff:
            raise ValidationError("padded() cannot shrink a state")
        out = np.zeros(cutoff + 1, dtype=complex)
        out[: self.amps.size] = self.amps
        return FockVector(out, self.normalized)

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), weight=self.norm_squared())


@dataclass(frozen=True)
class DensityMatrix:
    """Single-mode density matrix over ``|0>..|cutoff>``.

    ``weight`` carries the trace the matrix had before normalization (a
    probability or probability density for conditional states).
    """

    elems: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        e = np.atleast_2d(self.elems)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValidationError("density matrix must be square")
        object.__setattr__(self, "elems", _frozen(e, complex))

    @property
    def cutoff(self) -> int:
        return self.elems.shape[0] - 1

    def trace(self) -> float:
        return float(np.trace(self.elems).real)

    def normalized(self) -> DensityMatrix:
        tr = self.trace()
        if tr <= 0.0:
            raise ValidationError("density matrix has non-positive trace")
        return DensityMatrix(self.elems / tr, weight=tr * self.weight)

    def padded(self, cutoff: int) -> DensityMatrix:
        if cutoff < self.cutoff:
            raise ValidationError("padded() cannot shrink a state")
        out = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        n = self.elems.shape[0]
        out[:n, :n] = self.elems
        return DensityMatrix(out, self.weight)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.elems - self.elems.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.elems + self.elems.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def populations(self) -> np.ndarray:
        return np.diag(self.elems).real.copy()

    def rotated(self, phi: float) -> DensityMatrix:
        """Conjugate by the phase rotation ``diag(exp(-i m phi))``."""
        u = phase_rotation(self.cutoff, phi)
        return DensityMatrix(u[:, None] * self.elems * u.conj()[None, :], self.weight)


@dataclass(frozen=True)
class SchmidtTMSS:
    """Two-mode squeezed vacuum ``sum_m lambdas[m] |m, m>``."""

    lambdas: np.ndarray
    r: float
    cutoff: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lambdas", _frozen(self.lambdas, float))
        object.__setattr__(self, "cutoff", self.lambdas.size - 1)

    def amplitude_matrix(self) -> np.ndarray:
        """Two-mode amplitudes ``psi[a, b]`` (Alice index first)."""
        return np.diag(self.lambdas).astype(complex)


@dataclass(frozen=True)
class TwoModeVector:
    """Pure two-mode state ``sum_ab amps[a, b] |a>_A |b>_B``."""

    amps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps, complex))

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def phase_rotation(cutoff: int, phi: float) -> np.ndarray:
    """Diagonal of the Fock phase rotation ``R(phi) = exp(-i phi n)``."""
    return np.exp(-1j * phi * np.arange(cutoff + 1))


# ---------------------------------------------------------------------------
# constructors


def _check_tail(tail: float, what: str, cutoff: int, tail_tol: float):
    if tail > tail_tol:
        raise CutoffTooSmall(
            f"{what}: cutoff {cutoff} leaves tail mass {tail:.3e} > {tail_tol:.1e}"
        )


def _log_fact(n):
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def tmss_pure(r: float, cutoff: int, tail_tol: float = TAIL_TOL) -> SchmidtTMSS:
    """Schmidt coefficients ``tanh^m r / cosh r`` of a two-mode squeezed vacuum."""
    if r < 0:
        raise ValidationError("squeezing parameter must be >= 0")
    m = np.arange(cutoff + 1)
    if r == 0:
        lam = (m == 0).astype(float)
    else:
        lam = np.exp(m * math.log(math.tanh(r)) - math.log(math.cosh(r)))
        tail = math.tanh(r) ** (2 * (cutoff + 1))
        _check_tail(tail, "tmss_pure", cutoff, tail_tol)
    return SchmidtTMSS(lam, r)


def smss_pure(r: float, cutoff: int, tail_tol: float = TAIL_TOL) -> FockVector:
    """Single-mode squeezed vacuum with non-negative even-Fock amplitudes."""
    if r < 0:
        raise ValidationError("squeezing parameter must be >= 0")
    amps = np.zeros(cutoff + 1)
    if r == 0:
        amps[0] = 1.0
        return FockVector(amps)
    mm = np.arange(cutoff // 2 + 1)
    logc = (
        mm * math.log(math.tanh(r))
        + 0.5 * _log_fact(2 * mm)
        - mm * math.log(2.0)
        - _log_fact(mm)
        - 0.5 * math.log(math.cosh(r))
    )
    amps[2 * mm] = np.exp(logc)
    _check_tail(1.0 - float(np.sum(amps**2)), "smss_pure", cutoff, tail_tol)
    return FockVector(amps)


def coherent(alpha: complex, cutoff: int, tail_tol: float = TAIL_TOL) -> FockVector:
    m = np.arange(cutoff + 1)
    a = abs(alpha)
    if a == 0:
        return FockVector((m == 0).astype(complex))
    logmag = -0.5 * a * a + m * math.log(a) - 0.5 * _log_fact(m)
    amps = np.exp(logmag + 1j * m * np.angle(alpha))
    _check_tail(1.0 - float(np.sum(np.exp(2 * logmag))), "coherent", cutoff, tail_tol)
    return FockVector(amps)


def cat_amplitudes(alpha: complex, parity: int, cutoff: int) -> np.ndarray:
    """Exactly normalized cat-state amplitudes truncated at ``cutoff``.

    No tail check: the truncated entries are the true amplitudes, which is
    what overlaps with a state living below the cutoff need.
    """
    parity = parse_parity(parity)
    a = abs(alpha)
    m = np.arange(cutoff + 1)
    if parity == -1 and a < 1e-8:
        raise DegenerateCat(f"odd cat state is undefined at |alpha| = {a:.3e}")
    if a == 0:
        return (m == 0).astype(complex)
    a2 = a * a
    norm2 = 2.0 * (1.0 + math.exp(-2.0 * a2)) if parity == 1 else -2.0 * math.expm1(-2.0 * a2)
    allowed = (m % 2 == 0) if parity == 1 else (m % 2 == 1)
    logmag = -0.5 * a2 + m * math.log(a) - 0.5 * _log_fact(m) + math.log(2.0) - 0.5 * math.log(norm2)
    amps = np.where(allowed, np.exp(logmag), 0.0) * np.exp(1j * m * np.angle(alpha))
    return amps


def cat(alpha: complex, parity, cutoff: int, tail_tol: float = TAIL_TOL) -> FockVector:
    """Normalized cat state ``(|alpha> + parity |-alpha>) / sqrt(2(1 + parity e^{-2|alpha|^2}))``."""
    amps = cat_amplitudes(alpha, parity, cutoff)
    _check_tail(1.0 - float(np.sum(np.abs(amps) ** 2)), "cat", cutoff, tail_tol)
    return FockVector(amps)


def fock(n: int, cutoff: int) -> FockVector:
    amps = np.zeros(cutoff + 1)
    amps[n] = 1.0
    return FockVector(amps)


# ---------------------------------------------------------------------------
# overlaps and operations


def hermite_functions(nmax: int, x) -> np.ndarray:
    """``psi_k(x) = (2^k k! sqrt(pi))^{-1/2} e^{-x^2/2} H_k(x)`` for k = 0..nmax."""
    return _kernels.hermite_functions(int(nmax), x)


def quad_overlap(m: int, x, theta: float = 0.0):
    """Quadrature-eigenstate overlap ``<x^theta | m>``."""
    if m < 0:
        raise ValidationError("photon number must be >= 0")
    vals = hermite_functions(m, x)[m] * np.exp(-1j * m * theta)
    return complex(vals[0]) if np.ndim(x) == 0 else vals


def _annihilate(amps: np.ndarray, n: int, axis: int) -> np.ndarray:
    amps = np.moveaxis(np.asarray(amps, dtype=complex), axis, 0)
    dim = amps.shape[0]
    out = np.zeros_like(amps)
    if n < dim:
        k = np.arange(dim - n)
        fac = np.exp(0.5 * (_log_fact(k + n) - _log_fact(k)))
        out[: dim - n] = amps[n:] * fac.reshape((-1,) + (1,) * (amps.ndim - 1))
    return np.moveaxis(out, 0, axis)


def subtract_photons(state, n: int, mode: str = "A"):
    """Apply ``a^n`` and return ``(unnormalized state, weight)``.

    ``weight`` is the squared norm of the result.  For a two-mode input
    (:class:`SchmidtTMSS` or :class:`TwoModeVector`) ``mode`` selects the
    subtracted mode, 'A' (first index) or 'B'.
    """
    if n < 1:
        raise ValidationError("number of subtracted photons must be >= 1")
    if isinstance(state, FockVector):
        out = _annihilate(state.amps, n, 0)
        result = FockVector(out, normalized=False)
        weight = result.norm_squared()
    elif isinstance(state, (SchmidtTMSS, TwoModeVector)):
        amps = state.amplitude_matrix() if isinstance(state, SchmidtTMSS) else state.amps
        if mode not in ("A", "B"):
            raise ValidationError("mode must be 'A' or 'B'")
        result = TwoModeVector(_annihilate(amps, n, 0 if mode == "A" else 1))
        weight = result.norm_squared()
    else:
        raise ValidationError(f"cannot subtract photons from {type(state).__name__}")
    if weight < 1e-300:
        raise VacuumSubtraction("photon subtraction annihilates the state")
    return result, weight


def fidelity_pure(psi: FockVector, rho: DensityMatrix) -> float:
    """``<psi|rho|psi>`` clamped to [0, 1]; cutoffs are padded to match."""
    dim = max(psi.cutoff, rho.cutoff)
    v = psi.padded(dim).amps
    r = rho.padded(dim).elems
    f = float(np.vdot(v, r @ v).real)
    return min(1.0, max(0.0, f))


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    # eigenvalues at round-off level would contribute sqrt(1e-17) ~ 3e-9
    w = np.where(w > 1e-14 * max(w[-1], 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``||sqrt(rho) sqrt(sigma)||_1^2`` of normalized states."""
    dim = max(rho.cutoff, sigma.cutoff)
    a = _psd_sqrt(rho.normalized().padded(dim).elems)
    b = _psd_sqrt(sigma.normalized().padded(dim).elems)
    f = float(np.sum(np.linalg.svd(a @ b, compute_uv=False)) ** 2)
    return min(1.0, max(0.0, f))
