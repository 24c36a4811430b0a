"""Sampling, verification and export of single cylinder charts.

A chart maps the parametrizing cylinder (sigma, v) to R x (S^1 x S^2) by

    s = a,  t = q v + (1 - 3cos^2 sigma) w,  theta = sigma,  phi = q' v + sqrt(6) cos sigma w

with a mid-cylinder profile a = a0 + eps cos(v + v0), w = w0 - eps sin(v + v0)
and optional end collars.  On a collar of width rho the profile is blended
with an end model through the cutoff beta'(x) = beta(x / rho^4), where x is
the distance of sigma from the end.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .algebra import Angle, IntegerPair, alpha_positive_on, alpha_sign, pair
from .geometry import SQRT6, GeoPoint, alpha_q
from .graphio import angle_from_json, angle_to_json

TWO_PI = 2 * math.pi
END_KINDS_LO = ("none", "theta0_end", "pole_point", "interior_convex")
END_KINDS_HI = ("none", "thetaPi_end", "pole_point", "interior_convex")
LOG_ENDS = ("theta0_end", "thetaPi_end", "interior_convex")


class ChartError(ValueError):
    """A chart spec violates one of its invariants."""


# ---------------------------------------------------------------------------
# cutoff and decay constants


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(x):
    """Smooth step: 1 on [0, 1], 0 on [2, inf), strictly decreasing on (1, 2)."""
    x = np.asarray(x, dtype=float)
    num = _psi(2.0 - x)
    return num / (num + _psi(x - 1.0))


def cutoff(x, rho: float):
    """beta' = beta(x / rho^4) for the distance x from an end."""
    return bump(np.abs(x) / rho ** 4)


def zeta(theta_e: float) -> float:
    """Exponential decay rate of theta toward theta_e along a convex end."""
    c2 = math.cos(theta_e) ** 2
    return SQRT6 * math.sin(theta_e) ** 2 * (1 + 3 * c2) / (1 + 3 * c2 * c2)


def kappa(Q, pole: int = 0) -> float:
    """Log coefficient of a pole end: q'/q + sqrt(3/2) at 0, -q'/q + sqrt(3/2) at pi."""
    Q = pair(Q)
    if Q.p == 0:
        raise ChartError("pole end needs q != 0")
    r = Q.pp / Q.p
    return (r if pole == 0 else -r) + math.sqrt(1.5)


# ---------------------------------------------------------------------------
# profiles and chart specs


@dataclass(frozen=True)
class Profile:
    """Piecewise-cubic interpolant of a (sigma, value) table, constant outside its knots."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) != len(self.values) or not self.knots:
            raise ChartError("profile table needs matching, nonempty knots and values")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ChartError("profile knots must be strictly increasing")

    @classmethod
    def const(cls, c: float) -> "Profile":
        return cls((0.0,), (float(c),))

    @classmethod
    def coerce(cls, x) -> "Profile":
        if isinstance(x, Profile):
            return x
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return cls.const(x)
        rows = [tuple(map(float, r)) for r in x]
        return cls(tuple(r[0] for r in rows), tuple(r[1] for r in rows))

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        if len(self.knots) == 1:
            return np.full(sigma.shape, self.values[0])
        spline = _spline(self.knots, self.values)
        return spline(np.clip(sigma, self.knots[0], self.knots[-1]))

    def to_json(self):
        if len(self.knots) == 1:
            return self.values[0]
        return [[k, v] for k, v in zip(self.knots, self.values)]


_SPLINES: dict = {}


def _spline(knots, values) -> CubicSpline:
    key = (knots, values)
    if key not in _SPLINES:
        _SPLINES[key] = CubicSpline(np.array(knots), np.array(values))
    return _SPLINES[key]


@dataclass(frozen=True)
class ChartSpec:
    q: IntegerPair
    sigma_lo: float
    sigma_hi: float
    a0: Profile = field(default_factory=lambda: Profile.const(0.0))
    w0: Profile = field(default_factory=lambda: Profile.const(0.0))
    v0: Profile = field(default_factory=lambda: Profile.const(0.0))
    eps: Profile = field(default_factory=lambda: Profile.const(0.1))
    rho0: float = 0.3
    rho1: float = 0.3
    end_lo: str = "none"
    end_hi: str = "none"
    lo_angle: Optional[Angle] = None
    hi_angle: Optional[Angle] = None

    def __post_init__(self):
        object.__setattr__(self, "q", pair(self.q))
        for name in ("a0", "w0", "v0", "eps"):
            object.__setattr__(self, name, Profile.coerce(getattr(self, name)))

    def collar(self, side: str) -> float:
        """Width of the beta' support on one side, zero without an end model."""
        kind, rho = (self.end_lo, self.rho0) if side == "lo" else (self.end_hi, self.rho1)
        return 0.0 if kind == "none" else 2 * rho ** 4

    def clamp(self, sigma):
        """Hold profiles constant across end collars."""
        lo = self.sigma_lo + self.collar("lo")
        hi = self.sigma_hi - self.collar("hi")
        return np.clip(sigma, lo, hi)

    def profiles(self, sigma):
        x = self.clamp(sigma)
        return self.a0(x), self.w0(x), self.v0(x), self.eps(x)

    def to_json(self) -> dict:
        doc = {
            "q": [self.q.p, self.q.pp],
            "sigma_lo": self.sigma_lo, "sigma_hi": self.sigma_hi,
            "a0": self.a0.to_json(), "w0": self.w0.to_json(),
            "v0": self.v0.to_json(), "eps": self.eps.to_json(),
            "rho0": self.rho0, "rho1": self.rho1,
            "end_lo": self.end_lo, "end_hi": self.end_hi,
        }
        if self.lo_angle is not None:
            doc["lo_angle"] = angle_to_json(self.lo_angle)
        if self.hi_angle is not None:
            doc["hi_angle"] = angle_to_json(self.hi_angle)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ChartSpec":
        known = {"q", "sigma_lo", "sigma_hi", "a0", "w0", "v0", "eps", "rho0", "rho1",
                 "end_lo", "end_hi", "lo_angle", "hi_angle"}
        extra = set(doc) - known
        if extra:
            raise ChartError(f"unknown chart fields: {sorted(extra)}")
        if "q" not in doc:
            raise ChartError("chart spec needs q")
        kw = dict(doc)
        kw["q"] = IntegerPair(int(doc["q"][0]), int(doc["q"][1]))
        for side in ("lo", "hi"):
            key = f"{side}_angle"
            if key in doc:
                kw[key] = angle_from_json(doc[key])
                kw.setdefault(f"sigma_{side}", kw[key].base_value())
            if f"sigma_{side}" not in kw:
                raise ChartError(f"chart spec needs sigma_{side} or {key}")
            kw[f"sigma_{side}"] = float(kw[f"sigma_{side}"])
        return cls(**kw)

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def load_chart_spec(path) -> ChartSpec:
    with open(path) as fh:
        return ChartSpec.from_json(json.load(fh))


def check_spec(spec: ChartSpec, n_check: int = 4001) -> list[str]:
    """Invariant violations of a chart spec; empty when it may be sampled."""
    out = []
    lo, hi = spec.sigma_lo, spec.sigma_hi
    if not 0 <= lo < hi <= math.pi:
        return [f"bad interval [{lo:g}, {hi:g}]"]
    if spec.end_lo not in END_KINDS_LO:
        out.append(f"end_lo {spec.end_lo!r} not one of {END_KINDS_LO}")
    if spec.end_hi not in END_KINDS_HI:
        out.append(f"end_hi {spec.end_hi!r} not one of {END_KINDS_HI}")
    if out:
        return out
    if spec.end_lo in ("theta0_end", "pole_point") and lo != 0:
        out.append(f"{spec.end_lo} needs sigma_lo = 0")
    if spec.end_hi in ("thetaPi_end", "pole_point") and hi != math.pi:
        out.append(f"{spec.end_hi} needs sigma_hi = pi")
    if spec.end_lo == "interior_convex" and lo == 0:
        out.append("interior_convex end needs an interior angle")
    if spec.end_hi == "interior_convex" and hi == math.pi:
        out.append("interior_convex end needs an interior angle")
    for kind, pole in ((spec.end_lo, 0), (spec.end_hi, 1)):
        if kind in ("theta0_end", "thetaPi_end"):
            try:
                if kappa(spec.q, pole) == 0:
                    out.append("kappa = 0")
            except ChartError as exc:
                out.append(str(exc))
    if spec.rho0 <= 0 or spec.rho1 <= 0:
        out.append("collar widths must be positive")
    if spec.collar("lo") + spec.collar("hi") >= hi - lo:
        out.append("end collars overlap")

    sig = np.linspace(lo, hi, n_check)[1:-1]
    aq = alpha_q(spec.q, sig)
    if np.any(aq <= 0):
        k = int(np.argmin(aq))
        out.append(f"alpha_Q = {aq[k]:.3g} <= 0 at sigma = {sig[k]:.6g}")
    zero_ok = {"lo": spec.end_lo == "interior_convex", "hi": spec.end_hi == "interior_convex"}
    if spec.lo_angle is not None and spec.hi_angle is not None:
        pos = alpha_positive_on(spec.q, spec.lo_angle, spec.hi_angle, zero_ok["lo"], zero_ok["hi"])
        if not pos.ok:
            out.append(f"alpha_Q not positive on the exact interval: {pos.reason}")
    else:
        for side, ang, d in (("lo", spec.lo_angle, +1), ("hi", spec.hi_angle, -1)):
            if ang is None:
                continue
            at = alpha_sign(spec.q, ang)
            inside = alpha_sign(spec.q, ang.nudge(d, len(ang.offsets)))
            if at < 0 or (at == 0 and not zero_ok[side]) or inside <= 0:
                out.append(f"alpha_Q not positive at the exact {side} end")
    eps = spec.eps(sig)
    if np.any(eps < 0):
        out.append("eps must be nonnegative")
    prod = eps * aq
    if np.any(prod >= 0.5):
        k = int(np.argmax(prod))
        out.append(f"eps*alpha_Q = {prod[k]:.3g} >= 1/2 at sigma = {sig[k]:.6g}")
    return out


# ---------------------------------------------------------------------------
# evaluation


def _end_terms(spec: ChartSpec, side: str, sigma):
    """(x, beta', log coefficient or None, kind) for one end."""
    kind = spec.end_lo if side == "lo" else spec.end_hi
    if kind == "none":
        return None
    x = sigma - spec.sigma_lo if side == "lo" else spec.sigma_hi - sigma
    rho = spec.rho0 if side == "lo" else spec.rho1
    coef = None
    if kind == "theta0_end":
        coef = 1 / kappa(spec.q, 0)
    elif kind == "thetaPi_end":
        coef = 1 / kappa(spec.q, 1)
    elif kind == "interior_convex":
        coef = 1 / zeta(spec.sigma_lo if side == "lo" else spec.sigma_hi)
    return x, cutoff(x, rho), coef, kind


def profile_aw(spec: ChartSpec, sigma, v):
    """(a, w) of the chart at broadcastable sigma, v."""
    sigma = np.asarray(sigma, dtype=float)
    v = np.asarray(v, dtype=float)
    a0, w0, v0, eps = spec.profiles(sigma)
    ph = v + v0
    a = a0 + eps * np.cos(ph)
    w = w0 - eps * np.sin(ph)
    for side in ("lo", "hi"):
        terms = _end_terms(spec, side, sigma)
        if terms is None:
            continue
        x, bp, coef, kind = terms
        on = bp > 0
        if not np.any(on):
            continue
        if kind == "pole_point":
            r = eps * (1 - bp)
            a_e = a0 + r * np.cos(ph)
            w_e = w0 - r * np.sin(ph)
        else:
            r = eps * (1 - bp) + x * bp
            with np.errstate(divide="ignore"):
                lg = np.where(on, coef * bp * np.log(np.where(on, x, 1.0)), 0.0)
            a_e = lg + a0 + r * np.cos(ph)
            w_e = (1 - bp) * w0 - r * np.sin(ph)
        a = np.where(on, a_e, a)
        w = np.where(on, w_e, w)
    return np.broadcast_arrays(a, w)


def chart_map(Q, sigma, v, a, w):
    """Unwrapped (s, t, theta, phi) from (sigma, v, a, w)."""
    Q = pair(Q)
    c = np.cos(sigma)
    t = Q.p * v + (1 - 3 * c * c) * w
    phi = Q.pp * v + SQRT6 * c * w
    return np.broadcast_arrays(a, t, np.asarray(sigma, dtype=float), phi)


def chart_point(spec: ChartSpec, sigma: float, v: float) -> GeoPoint:
    a, w = profile_aw(spec, sigma, v)
    s, t, th, ph = chart_map(spec.q, sigma, v, a, w)
    return GeoPoint(float(s), float(np.mod(t, TWO_PI)), float(th), float(np.mod(ph, TWO_PI)))


@dataclass
class SampledChart:
    spec: ChartSpec
    sigma: np.ndarray  # (n_sigma,)
    v: np.ndarray  # (n_v,), uniform on [0, 2 pi)
    a: np.ndarray  # (n_sigma, n_v)
    w: np.ndarray
    s: np.ndarray
    t_lift: np.ndarray
    phi_lift: np.ndarray
    pullback: np.ndarray  # (n_sigma - 1, n_v) cell densities of d(alpha)
    spec_hash: str
    resolution: tuple[int, int]

    @property
    def theta(self) -> np.ndarray:
        return np.broadcast_to(self.sigma[:, None], self.s.shape)

    @property
    def t(self) -> np.ndarray:
        return np.mod(self.t_lift, TWO_PI)

    @property
    def phi(self) -> np.ndarray:
        return np.mod(self.phi_lift, TWO_PI)

    @property
    def sigma_mid(self) -> np.ndarray:
        return 0.5 * (self.sigma[1:] + self.sigma[:-1])

    def points(self) -> np.ndarray:
        """(n_sigma * n_v, 4) array of wrapped image points."""
        return np.stack([self.s, self.t, self.theta, self.phi], axis=-1).reshape(-1, 4)


def sigma_grid(spec: ChartSpec, n_sigma: int) -> np.ndarray:
    """Uniform nodes, shifted half a step off ends where the map is singular."""
    lo, hi = spec.sigma_lo, spec.sigma_hi
    cut_lo = spec.end_lo != "none" or lo == 0
    cut_hi = spec.end_hi != "none" or hi == math.pi
    if not cut_lo and not cut_hi:
        return np.linspace(lo, hi, n_sigma)
    h = (hi - lo) / (n_sigma - 1 + 0.5 * (cut_lo + cut_hi))
    return lo + h * (0.5 * cut_lo + np.arange(n_sigma))


def collar_sigma(spec: ChartSpec, side: str, n_tail: int, x_min: float = 1e-9,
                 n_body: int = 64) -> np.ndarray:
    """Nodes geometrically graded toward one end: n_tail of them inside beta' = 1."""
    rho = spec.rho0 if side == "lo" else spec.rho1
    x_tail = np.geomspace(x_min, rho ** 4, n_tail, endpoint=False)
    far = (spec.sigma_hi - spec.sigma_lo) - spec.collar("hi" if side == "lo" else "lo")
    x_body = np.linspace(rho ** 4, far, n_body)
    x = np.concatenate([x_tail, x_body])
    return spec.sigma_lo + x if side == "lo" else (spec.sigma_hi - x)[::-1]


def _stokes_pullback(sigma, t_lift, phi_lift, Q: IntegerPair) -> np.ndarray:
    """Circulation of alpha around each grid cell divided by the cell area."""
    c = np.cos(sigma)
    A = (-(1 - 3 * c * c))[:, None]
    B = (-SQRT6 * c * (1 - c * c))[:, None]
    # close the v loop with the lifted first column
    T = np.concatenate([t_lift, t_lift[:, :1] + TWO_PI * Q.p], axis=1)
    P = np.concatenate([phi_lift, phi_lift[:, :1] + TWO_PI * Q.pp], axis=1)
    dv = TWO_PI / t_lift.shape[1]
    ds = np.diff(sigma)[:, None]
    # constant sigma edges: theta is fixed so alpha integrates exactly
    along_v = A * np.diff(T, axis=1) + B * np.diff(P, axis=1)
    # constant v edges: trapezoid in sigma
    along_s = (0.5 * (A[1:] + A[:-1]) * np.diff(T, axis=0)
               + 0.5 * (B[1:] + B[:-1]) * np.diff(P, axis=0))
    circ = along_s[:, :-1] + along_v[1:] - along_s[:, 1:] - along_v[:-1]
    return circ / (ds * dv)


def sample_cylinder(spec: ChartSpec, n_sigma: int, n_v: int,
                    sigma: Optional[np.ndarray] = None) -> SampledChart:
    """Evaluate the chart on an (n_sigma, n_v) grid; raises ChartError on a bad spec."""
    problems = check_spec(spec)
    if problems:
        raise ChartError("; ".join(problems))
    if sigma is None:
        if n_sigma < 2 or n_v < 3:
            raise ChartError("grid needs n_sigma >= 2 and n_v >= 3")
        sigma = sigma_grid(spec, n_sigma)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(np.diff(sigma) <= 0) or sigma[0] < spec.sigma_lo or sigma[-1] > spec.sigma_hi:
        raise ChartError("sigma nodes must increase inside the chart interval")
    v = TWO_PI * np.arange(n_v) / n_v
    a, w = profile_aw(spec, sigma[:, None], v[None, :])
    s, t, _, phi = chart_map(spec.q, sigma[:, None], v[None, :], a, w)
    if np.any(alpha_q(spec.q, sigma) <= 0):
        raise ChartError("alpha_Q <= 0 on the sampled grid")
    return SampledChart(
        spec=spec, sigma=sigma, v=v, a=np.array(a), w=np.array(w), s=np.array(s),
        t_lift=np.array(t), phi_lift=np.array(phi),
        pullback=_stokes_pullback(sigma, t, phi, spec.q),
        spec_hash=spec.digest(), resolution=(len(sigma), n_v),
    )


# ---------------------------------------------------------------------------
# verification


def pullback_exact(Q, sigma):
    return SQRT6 * np.sin(sigma) * alpha_q(Q, sigma)


def pullback_error(chart: SampledChart) -> float:
    """Max deviation of the discrete pullback from its closed form, relative to its max."""
    exact = pullback_exact(chart.spec.q, chart.sigma_mid)[:, None]
    return float(np.max(np.abs(chart.pullback - exact)) / np.max(np.abs(exact)))


def winding(chart: SampledChart) -> np.ndarray:
    """Per-row (turns of t, turns of phi) from wrapped increments around each circle."""
    def turns(X):
        d = np.diff(np.concatenate([X, X[:, :1]], axis=1), axis=1)
        d = np.mod(d + math.pi, TWO_PI) - math.pi
        return d.sum(axis=1) / TWO_PI

    return np.stack([turns(chart.t), turns(chart.phi)], axis=1)


def _periodic_tree(X: np.ndarray, periodic: Sequence[bool], pad: float):
    """cKDTree with true periods on the angular columns and wide boxes elsewhere."""
    X = X.copy()
    box = np.empty(X.shape[1])
    for k, per in enumerate(periodic):
        if per:
            X[:, k] = np.mod(X[:, k], TWO_PI)
            box[k] = TWO_PI
        else:
            X[:, k] -= X[:, k].min()
            box[k] = X[:, k].max() + pad + 1.0
    # cKDTree wants coordinates strictly below the box size
    X = np.minimum(X, np.nextafter(box, 0))
    return cKDTree(X, boxsize=box), X


def _wrap_diff(x):
    return np.mod(x + math.pi, TWO_PI) - math.pi


def collisions(chart: SampledChart, exclude: int = 2) -> tuple[int, float]:
    """Image pairs closer than half the smallest grid step that are not grid neighbours."""
    P = np.stack([chart.s, chart.t_lift, chart.theta, chart.phi_lift], axis=-1)

    def dist(d):
        d = d.copy()
        d[..., 1] = _wrap_diff(d[..., 1])
        d[..., 3] = _wrap_diff(d[..., 3])
        return np.sqrt((d ** 2).sum(axis=-1))

    step_v = dist(np.roll(P, -1, axis=1) - P)
    step_s = dist(P[1:] - P[:-1])
    r = 0.5 * min(step_v.min(), step_s.min())
    if not r > 0:
        return P.shape[0] * P.shape[1], 0.0
    tree, _ = _periodic_tree(P.reshape(-1, 4), (False, True, False, True), r)
    n_v = P.shape[1]
    bad = 0
    for i, j in tree.query_pairs(r, output_type="ndarray"):
        di = abs(i // n_v - j // n_v)
        dj = abs(i % n_v - j % n_v)
        dj = min(dj, n_v - dj)
        if di > exclude or dj > exclude:
            bad += 1
    return bad, float(r)


def deck_offset(chart: SampledChart, N) -> float:
    """Distance from the deck-transformed image to the sampled image, in grid cells.

    The transform replaces (a, w)(sigma, v) by (a, w)(sigma, v') with
    v' = v - 2 pi alpha_N / alpha_Q and adds 2 pi (n q' - n' q) / alpha_Q to w.
    Each transformed node is matched to the nearest sampled node of its row
    (theta = sigma exactly); the distance is measured against the largest
    image step between v-neighbours of that row.
    """
    N = pair(N)
    spec = chart.spec
    S_ = chart.sigma[:, None]
    aq = alpha_q(spec.q, S_)
    vp = chart.v[None, :] - TWO_PI * alpha_q(N, S_) / aq
    a, w = profile_aw(spec, S_, vp)
    w = w + TWO_PI * (N.p * spec.q.pp - N.pp * spec.q.p) / aq
    s, t, _, ph = chart_map(spec.q, S_, chart.v[None, :], a, w)
    n_v = chart.v.size
    worst = 0.0
    for i in range(chart.sigma.size):
        ref = np.stack([chart.s[i], chart.t_lift[i], chart.phi_lift[i]], axis=-1)
        img = np.stack([s[i], t[i], ph[i]], axis=-1)
        step = np.roll(ref, -1, axis=0) - ref
        step[:, 1:] = _wrap_diff(step[:, 1:])
        cell = np.sqrt((step ** 2).sum(axis=1)).max()
        tree, Y = _periodic_tree(np.concatenate([ref, img]), (False, True, True), 1.0)
        d, _ = cKDTree(Y[:n_v], boxsize=tree.boxsize).query(Y[n_v:])
        worst = max(worst, float(d.max() / cell))
    return worst


def end_monotone(chart: SampledChart) -> bool:
    """s strictly monotone in sigma along every v on the beta' = 1 part of log collars."""
    spec = chart.spec
    ok = True
    for side in ("lo", "hi"):
        terms = _end_terms(spec, side, chart.sigma)
        if terms is None or terms[3] not in LOG_ENDS:
            continue
        rows = np.nonzero(terms[1] >= 1.0)[0]
        if rows.size < 2:
            continue
        d = np.diff(chart.s[rows], axis=0)
        ok &= bool(np.all(d > 0) or np.all(d < 0))
    return ok


@dataclass
class ChartReport:
    pullback_min: float
    pullback_min_exact: float
    pullback_rel_error: float
    pullback_positive: bool
    collisions: int
    collision_radius: float
    deck_pair: IntegerPair
    deck_max_cells: float
    winding_error: float
    end_monotone: bool

    @property
    def ok(self) -> bool:
        return (self.pullback_positive and self.collisions == 0 and self.deck_max_cells < 2
                and self.winding_error < 1e-10 and self.end_monotone)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "pullback": {"min": self.pullback_min, "min_exact": self.pullback_min_exact,
                         "rel_error": self.pullback_rel_error,
                         "positive": self.pullback_positive},
            "embedding": {"collisions": self.collisions, "radius": self.collision_radius},
            "deck": {"n": [self.deck_pair.p, self.deck_pair.pp],
                     "max_cells": self.deck_max_cells},
            "winding_error": self.winding_error,
            "end_monotone": self.end_monotone,
        }


def _roundoff(chart: SampledChart) -> np.ndarray:
    """Per-cell cancellation error of the circulation quotient; below it the sign is noise."""
    size = 1 + np.abs(chart.t_lift).max() + np.abs(chart.phi_lift).max()
    area = np.diff(chart.sigma)[:, None] * (TWO_PI / chart.v.size)
    return 64 * np.finfo(float).eps * size / area


def verify_chart(chart: SampledChart, deck=(1, 0)) -> ChartReport:
    spec = chart.spec
    exact = pullback_exact(spec.q, chart.sigma_mid)
    wind = winding(chart)
    target = np.array([spec.q.p, spec.q.pp], dtype=float)
    n_col, radius = collisions(chart)
    return ChartReport(
        pullback_min=float(chart.pullback.min()),
        pullback_min_exact=float(exact.min()),
        pullback_rel_error=pullback_error(chart),
        pullback_positive=bool(np.all(chart.pullback[(exact[:, None] > _roundoff(chart))[:, 0]] > 0)),
        collisions=n_col,
        collision_radius=radius,
        deck_pair=pair(deck),
        deck_max_cells=deck_offset(chart, deck),
        winding_error=float(np.max(np.abs(wind - target))),
        end_monotone=end_monotone(chart),
    )


# ---------------------------------------------------------------------------
# end decay


@dataclass(frozen=True)
class EndFit:
    rate: float
    target: float
    rel_error: float
    samples: int


def fit_end_decay(chart: SampledChart, side: Optional[str] = None, min_samples: int = 64) -> EndFit:
    """Least-squares slope of log|theta - theta_E| against |s| on the beta' = 1 tail."""
    spec = chart.spec
    if side is None:
        side = "lo" if spec.end_lo in LOG_ENDS else "hi"
    terms = _end_terms(spec, side, chart.sigma)
    if terms is None or terms[3] not in LOG_ENDS:
        raise ChartError(f"no logarithmic end collar on the {side} side")
    x, bp, coef, kind = terms
    rows = np.nonzero((bp >= 1.0) & (x > 0))[0]
    if rows.size < min_samples:
        raise ChartError(f"tail too short: {rows.size} samples with beta' = 1, "
                         f"need {min_samples}")
    X = np.abs(chart.s[rows]).reshape(-1)
    Y = np.repeat(np.log(x[rows]), chart.v.size)
    slope = np.polyfit(X, Y, 1)[0]
    rate = -slope
    target = abs(1 / coef)
    return EndFit(float(rate), float(target), float(abs(rate - target) / target), int(rows.size))


# ---------------------------------------------------------------------------
# export


def _csv_lines(chart: SampledChart):
    S_, V = np.meshgrid(chart.sigma, chart.v, indexing="ij")
    cols = [S_, V, chart.s, chart.t, chart.theta, chart.phi]
    for row in np.stack([c.reshape(-1) for c in cols], axis=1):
        yield ",".join(repr(float(x)) for x in row)


def _obj_lines(charts: Sequence[SampledChart]):
    base = 0
    for k, ch in enumerate(charts):
        yield f"g chart_{k}"
        n_s, n_v = ch.s.shape
        rad = 2 + np.tanh(ch.s)
        X, Y, Z = rad * np.cos(ch.t), rad * np.sin(ch.t), np.cos(ch.theta)
        for x, y, z in zip(X.reshape(-1), Y.reshape(-1), Z.reshape(-1)):
            yield f"v {x:.12g} {y:.12g} {z:.12g}"
        for ph in ch.phi.reshape(-1):
            yield f"vt {ph:.12g} 0"
        for i in range(n_s - 1):
            for j in range(n_v):
                jj = (j + 1) % n_v
                quad = [base + i * n_v + j, base + (i + 1) * n_v + j,
                        base + (i + 1) * n_v + jj, base + i * n_v + jj]
                yield "f " + " ".join(f"{q + 1}/{q + 1}" for q in quad)
        base += n_s * n_v


def export_chart(charts: Sequence[SampledChart], fmt: str, path) -> Path:
    """Write charts as CSV of intrinsic coordinates or as an OBJ mesh."""
    charts = list(charts)
    if not charts:
        raise ValueError("nothing to export")
    path = Path(path)
    if fmt == "csv":
        lines = ["sigma,v,s,t,theta,phi"]
        for ch in charts:
            lines.extend(_csv_lines(ch))
    elif fmt == "obj":
        lines = list(_obj_lines(charts))
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


def chart_to_json(chart: SampledChart) -> dict:
    """Lossless JSON of a sampled chart: spec plus grid resolution and node sigmas."""
    return {"kind": "chart", "spec": chart.spec.to_json(), "sigma": chart.sigma.tolist(),
            "n_v": int(chart.v.size), "hash": chart.spec_hash}


def chart_from_json(doc: dict) -> SampledChart:
    if doc.get("kind") != "chart":
        raise ChartError("not a sampled chart document")
    spec = ChartSpec.from_json(doc["spec"])
    sigma = np.clip(np.asarray(doc["sigma"], dtype=float), spec.sigma_lo, spec.sigma_hi)
    return sample_cylinder(spec, sigma.size, int(doc["n_v"]), sigma=sigma)
