"""Mermin-type Bell inequality for spin-j pairs and for twirled singlet ensembles.

Spin bases are ordered ``m = +j, j-1, ..., -j``.  Axes are coplanar; ``a``
and ``b`` each make the angle ``pi/2 + theta`` with ``c`` and ``pi - 2 theta``
with each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import gammaln

from .core import BudgetError, ValidationError
from .entanglement import sector_weights

MAX_J = 200
SUM_MAX_J = 15
ORACLE_MAX_J = 10
THETA_TOL = 1e-6


def _two_j(j) -> int:
    tj = round(2 * j)
    if tj < 0 or abs(tj - 2 * j) > 1e-12:
        raise ValidationError(f"j = {j} is not a non-negative half-integer")
    return tj


def m_values(j) -> np.ndarray:
    tj = _two_j(j)
    return (tj - 2 * np.arange(tj + 1)) / 2


@lru_cache(maxsize=None)
def spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(S_x, S_y, S_z)`` for spin ``two_j / 2``."""
    j = two_j / 2
    ms = (two_j - 2 * np.arange(two_j + 1)) / 2
    raise_ = np.zeros((two_j + 1, two_j + 1))
    for k in range(1, two_j + 1):
        m = ms[k]
        raise_[k - 1, k] = math.sqrt(j * (j + 1) - m * (m + 1))
    sx = (raise_ + raise_.T) / 2
    sy = (raise_ - raise_.T) / 2j
    sz = np.diag(ms).astype(float)
    return sx, sy, sz


@lru_cache(maxsize=None)
def _sy_eigen(two_j: int):
    _, sy, _ = spin_matrices(two_j)
    return np.linalg.eigh(sy)


def wigner_small_d(j, beta: float) -> np.ndarray:
    """``d[m', m] = <j m'| exp(-i beta S_y) |j m>`` (rows and columns in descending ``m``).

    Evaluated spectrally from the eigenbasis of ``S_y``; the factorial sum
    (:func:`wigner_small_d_sum`) cancels catastrophically beyond ``j ~ 15``.
    """
    tj = _two_j(j)
    if tj > 2 * MAX_J:
        raise BudgetError(f"j is capped at {MAX_J}")
    w, v = _sy_eigen(tj)
    return ((v * np.exp(-1j * beta * w)) @ v.conj().T).real


def wigner_small_d_sum(j, beta: float) -> np.ndarray:
    """Same matrix from the explicit factorial sum with log-gamma coefficients (small ``j`` only)."""
    tj = _two_j(j)
    if tj > 2 * SUM_MAX_J:
        raise BudgetError(f"the factorial sum is only accurate for j <= {SUM_MAX_J}")
    j = tj / 2
    ms = m_values(j)
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    out = np.zeros((tj + 1, tj + 1))
    for r, mp in enumerate(ms):
        for col, m in enumerate(ms):
            total = 0.0
            for k in range(tj + 1):
                a, b, e = j + m - k, j - k - mp, k - m + mp
                if a < -1e-9 or b < -1e-9 or e < -1e-9:
                    continue
                logc = 0.5 * (gammaln(j + mp + 1) + gammaln(j - mp + 1) + gammaln(j + m + 1) + gammaln(j - m + 1))
                logc -= gammaln(a + 1) + gammaln(k + 1) + gammaln(b + 1) + gammaln(e + 1)
                sign = -1.0 if round(e) % 2 else 1.0
                total += sign * math.exp(logc) * c ** round(2 * j - 2 * k + m - mp) * s ** round(2 * k - m + mp)
            out[r, col] = total
    return out


def f_j(j, theta: float) -> float:
    """Mean ``|m - m'|`` under the squared rotation amplitudes at angle ``2 theta``."""
    d = wigner_small_d(j, 2 * theta)
    ms = m_values(j)
    return float(np.sum(np.abs(ms[:, None] - ms[None, :]) * d**2) / (2 * j + 1))


def m_spin_j(bound_j, j, theta: float) -> float:
    """``M_J(theta)`` for one perfectly anticorrelated spin-``j`` pair with the bound ``J``."""
    if j <= 0:
        raise ValidationError("j must be positive")
    if bound_j + 1e-12 < j:
        raise ValidationError(f"bound J = {bound_j} is below the spin j = {j}")
    return f_j(j, theta) - (1 / bound_j) * (2 * j / 3) * (j + 1) * math.sin(theta)


@lru_cache(maxsize=None)
def ensemble_weights(two_bound: int) -> tuple[tuple[float, float], ...]:
    """Singlet-ensemble sector weights for ``N = 2J`` (shared with the entanglement report)."""
    return tuple(sector_weights(two_bound, 0.5))


def _n_from_bound(bound_j) -> int:
    n = round(2 * bound_j)
    if n < 1 or abs(n - 2 * bound_j) > 1e-12:
        raise ValidationError("2J must be a positive integer")
    return n


def m_ensemble(bound_j, theta: float, mode: str = "exact") -> float:
    """``M_J(theta)`` for ``N = 2J`` singlets after the local twirl.

    ``exact`` mixes the spin-``j`` predictions with the sector weights;
    ``approx`` uses the quadratic form of each term.  The ``j = 0`` sector
    contributes nothing in either mode.
    """
    n = _n_from_bound(bound_j)
    total = 0.0
    s = math.sin(theta)
    for j, w in ensemble_weights(n):
        if j == 0:
            continue
        if mode == "exact":
            total += w * m_spin_j(bound_j, j, theta)
        elif mode == "approx":
            total += w * (2 / 3) * j * (j + 1) * s * (2 * s - 1 / bound_j)
        else:
            raise ValidationError(f"unknown mode {mode!r}")
    return total


def analytic_bound(bound_j) -> float:
    """``arcsin(1/2J)``: upper edge of the approximate violation range."""
    return math.asin(min(1.0, 1 / (2 * bound_j)))


@dataclass(frozen=True, eq=False)
class BellScanResult:
    J: float
    mode: str
    theta: np.ndarray
    m_exact: np.ndarray
    m_approx: np.ndarray
    window: tuple[float, float] | None
    depth: float
    depth_theta: float

    @property
    def analytic_bound(self) -> float:
        return analytic_bound(self.J)

    @property
    def edge_relative_difference(self) -> float | None:
        """``|sin(theta_hi) - 1/2J| / sin(theta_hi)`` between the scanned and analytic edges."""
        if self.window is None:
            return None
        s = math.sin(self.window[1])
        return abs(s - math.sin(self.analytic_bound)) / s

    def to_dict(self) -> dict:
        return {
            "J": self.J,
            "mode": self.mode,
            "grid": int(self.theta.size),
            "window": list(self.window) if self.window else None,
            "depth": self.depth,
            "depth_theta": self.depth_theta,
            "analytic_bound": self.analytic_bound,
            "edge_relative_difference": self.edge_relative_difference,
        }

    def csv_rows(self):
        return zip(self.theta, self.m_exact, self.m_approx)


def _find_window(func, thetas, values):
    """Upper edge of the negative region that starts at ``theta = 0``."""
    if values[0] >= 0:
        # window may be narrower than one grid step
        lo = thetas[0]
        for _ in range(60):
            lo /= 2
            if func(lo) < 0:
                break
        else:
            return None
        return (0.0, brentq(func, lo, thetas[0], xtol=THETA_TOL * 1e-3))
    for k in range(1, len(values)):
        if values[k] >= 0:
            hi = brentq(func, thetas[k - 1], thetas[k], xtol=THETA_TOL * 1e-3)
            return (0.0, hi)
    return (0.0, float(thetas[-1]))


def _minimise(func, thetas, values):
    k = int(np.argmin(values))
    a = thetas[k - 1] if k > 0 else 0.0
    b = thetas[k + 1] if k + 1 < len(thetas) else thetas[k]
    if values[k] >= 0:
        return 0.0, 0.0
    if b == thetas[k]:
        return float(values[k]), float(thetas[k])
    res = minimize_scalar(func, bracket=(a, thetas[k], b), method="golden", tol=1e-10)
    return float(res.fun), float(res.x)


def scan(func, grid: int = 400, upper: float = math.pi / 2):
    """Evaluate ``func`` on ``grid`` points in ``(0, upper]`` and locate its negative window and minimum."""
    if grid < 200:
        raise ValidationError("scan grid needs at least 200 points")
    thetas = upper * np.arange(1, grid + 1) / grid
    values = np.array([func(t) for t in thetas])
    window = _find_window(func, thetas, values)
    depth, at = _minimise(func, thetas, values)
    return thetas, values, window, depth, at


def violation_scan(bound_j, grid: int = 400, mode: str = "exact") -> BellScanResult:
    """Scan ``M_J`` for the singlet ensemble; ``mode`` picks the curve used for window and depth."""
    _n_from_bound(bound_j)
    if mode not in ("exact", "approx"):
        raise ValidationError(f"unknown mode {mode!r}")
    func = lambda t: m_ensemble(bound_j, t, mode)  # noqa: E731
    thetas, values, window, depth, at = scan(func, grid)
    other = "approx" if mode == "exact" else "exact"
    other_values = np.array([m_ensemble(bound_j, t, other) for t in thetas])
    exact, approx = (values, other_values) if mode == "exact" else (other_values, values)
    return BellScanResult(float(bound_j), mode, thetas, exact, approx, window, depth, at)


def spin_pair_depth(j, grid: int = 400) -> tuple[float, float]:
    """``(min M, argmin theta)`` for a single spin-``j`` pair with ``J = j``."""
    _, _, _, depth, at = scan(lambda t: m_spin_j(j, j, t), grid)
    return depth, at


# --------------------------------------------------------------------------
# explicit two-particle oracles


def _spin_singlet(two_j: int) -> np.ndarray:
    """Total-spin-zero state of two spin-j particles as a ``(2j+1, 2j+1)`` amplitude matrix."""
    n = two_j + 1
    amp = np.zeros((n, n))
    for k in range(n):
        # m at index k pairs with -m at index n-1-k; phase (-1)^(j - m) = (-1)^k
        amp[k, n - 1 - k] = (-1) ** k / math.sqrt(n)
    return amp


def _axis_operator(two_j: int, angle: float) -> np.ndarray:
    sx, _, sz = spin_matrices(two_j)
    return math.cos(angle) * sz + math.sin(angle) * sx


def correlation_oracle(j, angle_between_axes: float) -> float:
    """``<m_A(a) m_B(c)>`` on the spin-zero pair, with ``a = z`` and ``c`` in the x-z plane."""
    tj = _two_j(j)
    if tj > 2 * ORACLE_MAX_J:
        raise BudgetError(f"oracle capped at j <= {ORACLE_MAX_J}")
    psi = _spin_singlet(tj)
    _, _, sz = spin_matrices(tj)
    sc = _axis_operator(tj, angle_between_axes)
    # <psi| Sz (x) Sc |psi> with psi as an amplitude matrix
    return float(np.sum(psi * (sz @ psi @ sc.T)))


def abs_difference_oracle(j, theta: float) -> float:
    """``<|m_A(a) - m_B(b)|>`` on the spin-zero pair with ``a``, ``b`` at angle ``pi - 2 theta``."""
    tj = _two_j(j)
    if tj > 2 * ORACLE_MAX_J:
        raise BudgetError(f"oracle capped at j <= {ORACLE_MAX_J}")
    psi = _spin_singlet(tj)
    la, ua = np.linalg.eigh(_axis_operator(tj, 0.0))
    lb, ub = np.linalg.eigh(_axis_operator(tj, math.pi - 2 * theta))
    probs = np.abs(ua.T @ psi @ ub) ** 2
    return float(np.sum(np.abs(la[:, None] - lb[None, :]) * probs))
