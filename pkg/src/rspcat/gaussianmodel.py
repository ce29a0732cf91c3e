"""Two-mode Gaussian layer: covariance matrices, losses, and the effective model.

A symmetric two-mode Gaussian state with covariance matrix

    [[n, 0, c1, 0], [0, n, 0, c2], [c1, 0, m, 0], [0, c2, 0, m]]

(ordering xA, pA, xB, pB; vacuum variance 1/2) is equivalent to an effective
circuit: a two-mode squeezed vacuum with parameter ``zeta`` whose Alice arm
passes a pure-loss channel of transmissivity ``eta`` followed by a
phase-insensitive amplifier of squeezing ``r_s``.  The Fock coefficients of
that circuit are available in closed form (:func:`mixed_coeff`); the Kraus
channels below build the same state independently for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CutoffTooLargeForOracle, CutoffTooSmall, NoSolution, Unphysical, ValidationError
from .fockcore import DensityMatrix

ORACLE_MAX_CUTOFF = 12


@dataclass(frozen=True)
class TwoModeCovariance:
    n: float
    m: float
    c1: float
    c2: float

    def matrix(self) -> np.ndarray:
        n, m, c1, c2 = self.n, self.m, self.c1, self.c2
        return np.array(
            [[n, 0.0, c1, 0.0], [0.0, n, 0.0, c2], [c1, 0.0, m, 0.0], [0.0, c2, 0.0, m]]
        )

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Symplectic spectrum; physical states have both values >= 1/2."""
        omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        ev = np.linalg.eigvals(1j * omega @ self.matrix())
        return np.sort(np.abs(ev.real))[::2]

    def is_physical(self, tol: float = 1e-9) -> bool:
        return (
            self.n >= 0.5 - 1e-12
            and self.m >= 0.5 - 1e-12
            and float(self.symplectic_eigenvalues()[0]) >= 0.5 - tol
        )


@dataclass(frozen=True)
class EffectiveParams:
    """Effective-model parameters: TMSS ``zeta``, amplifier ``r_s``, loss ``eta``."""

    zeta: float
    r_s: float
    eta: float

    @property
    def tau(self) -> float:
        return self.eta * math.cosh(self.r_s) ** 2

    @property
    def xi(self) -> float:
        return (1.0 - self.eta) * math.cosh(self.r_s) ** 2 + math.sinh(self.r_s) ** 2

    @property
    def b(self) -> float:
        z2 = self.zeta * self.zeta
        return (1.0 + z2) / (1.0 - z2)

    def to_cm(self) -> TwoModeCovariance:
        tau, xi, b = self.tau, self.xi, self.b
        c = 0.5 * math.sqrt(tau * (b * b - 1.0))
        return TwoModeCovariance(0.5 * (tau * b + xi), 0.5 * b, c, -c)

    def alice_mean_photons(self) -> float:
        return 0.5 * (self.tau * self.b + self.xi - 1.0)

    def bob_mean_photons(self) -> float:
        return 0.5 * (self.b - 1.0)


def tmss_cm(v_s: float, v_a: float) -> TwoModeCovariance:
    """Lossless CM from squeezed/antisqueezed correlated variances."""
    if not (0.0 < v_s <= 0.5 <= v_a):
        raise Unphysical(f"need 0 < V_s <= 1/2 <= V_a, got V_s={v_s}, V_a={v_a}")
    if v_s * v_a < 0.25 - 1e-12:
        raise Unphysical(f"V_s * V_a = {v_s * v_a:.6g} < 1/4 violates the uncertainty principle")
    c = 0.5 * (v_a - v_s)
    diag = 0.5 * (v_a + v_s)
    return TwoModeCovariance(diag, diag, c, -c)


def lossy_cm(cm: TwoModeCovariance, eta_a: float, eta_b: float) -> TwoModeCovariance:
    """Pure-loss channels of transmission ``eta_a`` (Alice) and ``eta_b`` (Bob)."""
    for name, e in (("eta_A", eta_a), ("eta_B", eta_b)):
        if not 0.0 <= e <= 1.0:
            raise ValidationError(f"{name} must lie in [0, 1], got {e}")
    g = math.sqrt(eta_a * eta_b)
    return TwoModeCovariance(
        eta_a * cm.n + 0.5 * (1.0 - eta_a),
        eta_b * cm.m + 0.5 * (1.0 - eta_b),
        g * cm.c1,
        g * cm.c2,
    )


def model_residuals(cm: TwoModeCovariance, p: EffectiveParams) -> np.ndarray:
    """Residuals of ``2n = tau b + xi``, ``2m = b``, ``2c = sqrt(tau (b^2 - 1))``."""
    tau, xi, b = p.tau, p.xi, p.b
    return np.array(
        [2 * cm.n - (tau * b + xi), 2 * cm.m - b, 2 * cm.c1 - math.sqrt(tau * (b * b - 1.0))]
    )


def effective_params(cm: TwoModeCovariance, tol: float = 1e-9) -> EffectiveParams:
    """Map a symmetric entangled CM onto the effective model.

    ``b = 2m`` fixes ``zeta``; ``tau = 4c^2 / (b^2 - 1)`` and ``xi = 2n - tau b``
    follow, and since ``xi + tau = 2 cosh^2 r_s - 1`` the amplifier gain and the
    loss are explicit.
    """
    if abs(cm.c2 + cm.c1) > 1e-9:
        raise NoSolution(f"model requires c2 = -c1 (got c1={cm.c1}, c2={cm.c2})")
    if cm.c1 <= 0.0:
        raise NoSolution("model requires positive x-x correlation (entangled input)")
    b = 2.0 * cm.m
    if b <= 1.0:
        raise NoSolution("Bob's mode is vacuum; no correlated effective TMSS exists")
    zeta = math.sqrt((b - 1.0) / (b + 1.0))
    tau = 4.0 * cm.c1 * cm.c1 / (b * b - 1.0)
    xi = 2.0 * cm.n - tau * b
    gain = 0.5 * (xi + tau + 1.0)
    if gain < 1.0 - tol:
        raise NoSolution(f"CM needs amplifier gain {gain:.6g} < 1")
    gain = max(gain, 1.0)
    eta = tau / gain
    if eta > 1.0 + tol:
        raise NoSolution(f"CM needs transmissivity {eta:.6g} > 1")
    eta = min(eta, 1.0)
    r_s = math.acosh(math.sqrt(gain))
    p = EffectiveParams(zeta, r_s, eta)
    res = float(np.max(np.abs(model_residuals(cm, p))))
    if res > 1e-6:
        raise NoSolution(f"effective-model residual {res:.3e} too large")
    return p


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def mixed_coeff(m1: int, m2: int, n1: int, n2: int, p: EffectiveParams) -> float:
    """Fock coefficient ``<m1 m2| rho |n1 n2>`` of the effective mixed state.

    Indices are (Alice, Bob).  Zero unless ``m1 + n2 == m2 + n1``.  The
    ``tanh^{2(m1-m2)}`` and ``((1-eta)/eta) sinh^2`` factors are regrouped as
    ``tanh^{2(m1-m2+k)}`` and ``((1-eta) cosh^2)^k eta^{-k}`` so that no
    negative power of a vanishing quantity appears.
    """
    if min(m1, m2, n1, n2) < 0:
        raise ValidationError("photon indices must be >= 0")
    if m1 + n2 != m2 + n1:
        return 0.0
    zeta, rs, eta = p.zeta, p.r_s, p.eta
    ch = math.cosh(rs)
    th = math.tanh(rs)
    d = m1 - m2
    pre = (1.0 - zeta * zeta) / (ch * ch) * (zeta / ch) ** (m2 + n2)
    total = 0.0
    for k in range(max(0, m2 - m1), min(m2, n2) + 1):
        lb = 0.5 * (
            _log_binom(m2, k) + _log_binom(n2, k) + _log_binom(m1, m2 - k) + _log_binom(n1, n2 - k)
        )
        term = (
            math.exp(lb)
            * eta ** (0.5 * (m2 + n2) - k)
            * ((1.0 - eta) * ch * ch) ** k
            * th ** (2 * (d + k))
        )
        total += term
    return pre * total


def materialize_two_mode(p: EffectiveParams, cutoff: int) -> np.ndarray:
    """Dense 4-index array ``rho[m1, m2, n1, n2]`` of the effective state.

    Test-oracle helper; memory grows as ``cutoff^4``.
    """
    if cutoff > ORACLE_MAX_CUTOFF:
        raise CutoffTooLargeForOracle(
            f"cutoff {cutoff} exceeds the 4-index guard {ORACLE_MAX_CUTOFF}"
        )
    dim = cutoff + 1
    rho = np.zeros((dim, dim, dim, dim))
    for m1 in range(dim):
        for m2 in range(dim):
            for n2 in range(dim):
                n1 = m1 + n2 - m2
                if 0 <= n1 < dim:
                    rho[m1, m2, n1, n2] = mixed_coeff(m1, m2, n1, n2, p)
    tr = np.einsum("abab->", rho)
    if abs(tr - 1.0) > 1e-6:
        raise CutoffTooSmall(f"materialized trace {tr:.9f} deviates from 1 at cutoff {cutoff}")
    return rho


# ---------------------------------------------------------------------------
# Kraus channels (independent oracle)


def loss_kraus(eta: float, cutoff: int) -> np.ndarray:
    """Kraus operators ``K_l[j - l, j] = sqrt(C(j, l) eta^(j-l) (1-eta)^l)``."""
    dim = cutoff + 1
    ks = np.zeros((dim, dim, dim))
    for l in range(dim):
        for j in range(l, dim):
            ks[l, j - l, j] = math.sqrt(math.comb(j, l) * eta ** (j - l) * (1.0 - eta) ** l)
    return ks


def amplifier_kraus(r_s: float, cutoff: int, max_added: int | None = None) -> np.ndarray:
    """Quantum-limited amplifier Kraus operators, truncated to ``cutoff``.

    ``A_q |i> = tanh^q r_s cosh^{-(i+1)} r_s sqrt(C(i+q, q)) |i+q>``.
    """
    dim = cutoff + 1
    nq = dim if max_added is None else max_added + 1
    ch, th = math.cosh(r_s), math.tanh(r_s)
    ks = np.zeros((nq, dim, dim))
    for q in range(nq):
        for i in range(dim - q):
            ks[q, i + q, i] = th**q * ch ** (-(i + 1)) * math.sqrt(math.comb(i + q, q))
    return ks


def _apply_kraus(rho, ks, axis_pair):
    a, b = axis_pair
    out = np.zeros_like(rho)
    for k in ks:
        tmp = np.moveaxis(np.tensordot(k, rho, axes=([1], [a])), 0, a)
        out += np.moveaxis(np.tensordot(tmp, k.conj(), axes=([b], [1])), -1, b)
    return out


def loss_channel_oracle(rho, eta: float, mode: str = "A"):
    """Pure-loss channel by explicit Kraus sum.

    Accepts a single-mode :class:`DensityMatrix` (``mode`` ignored) or a
    two-mode array ``rho[m1, m2, n1, n2]`` and returns the same type.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError("eta must lie in [0, 1]")
    if isinstance(rho, DensityMatrix):
        ks = loss_kraus(eta, rho.cutoff)
        return DensityMatrix(_apply_kraus(rho.elems, ks, (0, 1)), rho.weight)
    rho = np.asarray(rho)
    ks = loss_kraus(eta, rho.shape[0] - 1)
    axes = (0, 2) if mode == "A" else (1, 3)
    return _apply_kraus(rho.astype(complex) if np.iscomplexobj(rho) else rho, ks, axes)


def amplifier_channel_oracle(rho: np.ndarray, r_s: float, mode: str = "A") -> np.ndarray:
    """Phase-insensitive amplifier on one mode of ``rho[m1, m2, n1, n2]``.

    Photons pushed above the cutoff are dropped, so only entries well below
    the cutoff are exact.
    """
    ks = amplifier_kraus(r_s, rho.shape[0] - 1)
    axes = (0, 2) if mode == "A" else (1, 3)
    return _apply_kraus(rho, ks, axes)


def tmss_two_mode(zeta: float, cutoff: int) -> np.ndarray:
    """Dense ``rho[m1, m2, n1, n2]`` of the TMSS with ``tanh r = zeta``."""
    dim = cutoff + 1
    lam = math.sqrt(1.0 - zeta * zeta) * zeta ** np.arange(dim)
    psi = np.diag(lam)
    return np.einsum("ab,cd->abcd", psi, psi)
