"""Contact form, symplectic form, almost complex structure and the cylinder PDE.

Coordinates on R x (S^1 x S^2) are (s, t, theta, phi) and every matrix below
is expressed in that coordinate basis.  Two-forms are antisymmetric matrices
M with M[i, j] = form(e_i, e_j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import IntegerPair, pair

SQRT6 = np.sqrt(6.0)
S, T, TH, PH = range(4)


@dataclass(frozen=True)
class GeoPoint:
    s: float
    t: float
    theta: float
    phi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.t, self.theta, self.phi], dtype=float)


@dataclass(frozen=True)
class FrameEval:
    alpha: np.ndarray
    d_alpha: np.ndarray
    omega: np.ndarray
    J: np.ndarray
    reeb: np.ndarray
    g_metric: np.ndarray
    g: float


def alpha_form(theta: float) -> np.ndarray:
    """alpha = -(1 - 3cos^2) dt - sqrt(6) cos sin^2 dphi."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([0.0, -(1 - 3 * c * c), 0.0, -SQRT6 * c * s * s])


def d_alpha_form(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    m = np.zeros((4, 4))
    m[TH, T] = -6 * c * s
    m[TH, PH] = SQRT6 * s * (1 - 3 * c * c)
    return m - m.T


def reeb_field(theta: float) -> np.ndarray:
    """(1 - 3cos^2) d_t + sqrt(6) cos d_phi."""
    c = np.cos(theta)
    return np.array([0.0, 1 - 3 * c * c, 0.0, SQRT6 * c])


def fh(s: float, theta: float) -> tuple[float, float]:
    """The symplectic coordinates f and h: omega = dt^df + dphi^dh."""
    e = np.exp(-SQRT6 * s)
    c, sn = np.cos(theta), np.sin(theta)
    return e * (1 - 3 * c * c), SQRT6 * e * c * sn * sn


def _fh_jacobian(s: float, theta: float) -> np.ndarray:
    """Rows (f, h), columns (s, theta)."""
    e = np.exp(-SQRT6 * s)
    c, sn = np.cos(theta), np.sin(theta)
    f = e * (1 - 3 * c * c)
    h = SQRT6 * e * c * sn * sn
    return np.array([
        [-SQRT6 * f, 6 * e * c * sn],
        [-SQRT6 * h, SQRT6 * e * sn * (3 * c * c - 1)],
    ])


def conformal_factor(s: float, theta: float) -> float:
    """g = sqrt(6) e^{-sqrt(6) s} (1 + 3cos^4)^{1/2}."""
    c = np.cos(theta)
    return SQRT6 * np.exp(-SQRT6 * s) * np.sqrt(1 + 3 * c ** 4)


def omega_form(s: float, theta: float) -> np.ndarray:
    """omega = dt ^ df + dphi ^ dh written in (s, t, theta, phi)."""
    K = _fh_jacobian(s, theta)
    m = np.zeros((4, 4))
    m[T, S], m[T, TH] = K[0, 0], K[0, 1]
    m[PH, S], m[PH, TH] = K[1, 0], K[1, 1]
    return m - m.T


def complex_structure(s: float, theta: float) -> np.ndarray:
    """J with J d_t = g d_f and J d_phi = sin^2 g d_h, closed under J^2 = -1."""
    if not 0 < theta < np.pi:
        raise ValueError("theta must be interior")
    K = _fh_jacobian(s, theta)
    Kinv = np.linalg.inv(K)  # columns: d_f and d_h in (s, theta) components
    g = conformal_factor(s, theta)
    sn2 = np.sin(theta) ** 2
    d_f = np.zeros(4)
    d_h = np.zeros(4)
    d_f[[S, TH]] = Kinv[:, 0]
    d_h[[S, TH]] = Kinv[:, 1]
    J = np.zeros((4, 4))
    J[:, T] = g * d_f
    J[:, PH] = sn2 * g * d_h
    # J d_f = -d_t / g and J d_h = -d_phi / (sin^2 g); d_s, d_theta expand in d_f, d_h
    for col in (S, TH):
        k = 0 if col == S else 1
        J[T, col] = -K[0, k] / g
        J[PH, col] = -K[1, k] / (sn2 * g)
    return J


def frame_at(p: GeoPoint) -> FrameEval:
    if not 0 < p.theta < np.pi:
        raise ValueError("frame evaluation needs an interior theta")
    om = omega_form(p.s, p.theta)
    J = complex_structure(p.s, p.theta)
    g = conformal_factor(p.s, p.theta)
    return FrameEval(
        alpha=alpha_form(p.theta),
        d_alpha=d_alpha_form(p.theta),
        omega=om,
        J=J,
        reeb=reeb_field(p.theta),
        g_metric=om @ J / g,
        g=g,
    )


def omega_by_differences(s: float, theta: float, h: float = 1e-4) -> np.ndarray:
    """d(e^{-sqrt(6) s} alpha) by 4th-order central differences."""
    def beta(x):
        return np.exp(-SQRT6 * x[S]) * alpha_form(x[TH])

    x0 = np.array([s, 0.0, theta, 0.0])
    D = np.zeros((4, 4))  # D[i, j] = d_i beta_j
    for i in range(4):
        step = np.zeros(4)
        step[i] = h
        D[i] = (-beta(x0 + 2 * step) + 8 * beta(x0 + step)
                - 8 * beta(x0 - step) + beta(x0 - 2 * step)) / (12 * h)
    return D - D.T


# ---------------------------------------------------------------------------
# the cylinder PDE


def alpha_q(Q, sigma):
    Q = pair(Q)
    c = np.cos(sigma)
    return (1 - 3 * c * c) * Q.pp - SQRT6 * c * Q.p


def beta_q(Q, sigma):
    """q(1 - 3cos^2) + q' sqrt(6) cos sin^2."""
    Q = pair(Q)
    c, s = np.cos(sigma), np.sin(sigma)
    return Q.p * (1 - 3 * c * c) + Q.pp * SQRT6 * c * s * s


def pde_residual(Q: IntegerPair, sigma: np.ndarray, v: np.ndarray, a: np.ndarray,
                 w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both components of the cylinder equation on a (sigma, v) grid.

    ``a`` and ``w`` have shape (len(sigma), len(v)); v is a uniform periodic
    grid on [0, 2 pi).  sigma derivatives are 2nd-order (one-sided at the
    boundary rows), v derivatives are periodic central differences.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.min() <= 0 or sigma.max() >= np.pi:
        raise ValueError("the sigma interval must stay away from the poles")
    dv = 2 * np.pi / len(v)
    S_ = sigma[:, None]
    aq = alpha_q(Q, S_)
    sn = np.sin(S_)
    c4 = 1 + 3 * np.cos(S_) ** 4
    grow = np.sqrt(6.0) * sn * (1 + 3 * np.cos(S_) ** 2)

    def d_sigma(F):
        return np.gradient(F, sigma, axis=0, edge_order=2)

    def d_v(F):
        return (np.roll(F, -1, axis=1) - np.roll(F, 1, axis=1)) / (2 * dv)

    a_v, w_v = d_v(a), d_v(w)
    r1 = aq * d_sigma(a) - grow * w * a_v + (c4 / sn) * (w_v - beta_q(Q, S_) / c4)
    r2 = d_sigma(aq * w) - grow * w * w_v - a_v / sn
    return r1, r2
