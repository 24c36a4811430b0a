"""Exact integer predicates for orbit angles, angle order and the sign of alpha_Q.

Every order and sign decision here uses Python integers only.  Floats appear
solely as advisory caches (``Angle.value``, ``angle_cos(...).value``).

An orbit angle theta_P in (0, pi) is attached to an integer pair P = (p, p')
through the root c = cos(theta) of ``3 p' c^2 + sqrt(6) p c - p' = 0`` with
``p' c >= 0``.  Writing u(theta) = (1 - 3 cos^2, sqrt(6) cos), the pair is a
positive multiple of u(theta_P), so alpha_Q(theta_P) = bracket(P, Q) / lambda
with lambda > 0.  That single observation drives most of this module.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

SQRT6 = math.sqrt(6.0)


@dataclass(frozen=True, slots=True)
class IntegerPair:
    """An ordered pair (p, p') of integers."""

    p: int
    pp: int

    def __add__(self, other: "IntegerPair") -> "IntegerPair":
        return IntegerPair(self.p + other.p, self.pp + other.pp)

    def __sub__(self, other: "IntegerPair") -> "IntegerPair":
        return IntegerPair(self.p - other.p, self.pp - other.pp)

    def __neg__(self) -> "IntegerPair":
        return IntegerPair(-self.p, -self.pp)

    def scale(self, k: int) -> "IntegerPair":
        return IntegerPair(k * self.p, k * self.pp)

    def is_zero(self) -> bool:
        return self.p == 0 and self.pp == 0

    def is_primitive(self) -> bool:
        return math.gcd(self.p, self.pp) == 1

    def primitive(self) -> "IntegerPair":
        """Divide by the positive gcd; the zero pair is returned unchanged."""
        g = math.gcd(self.p, self.pp)
        if g == 0:
            return self
        return IntegerPair(self.p // g, self.pp // g)

    def as_tuple(self) -> tuple[int, int]:
        return (self.p, self.pp)

    def __repr__(self) -> str:
        return f"({self.p},{self.pp})"


ZERO = IntegerPair(0, 0)


def pair(x) -> IntegerPair:
    """Coerce a 2-sequence or an IntegerPair to an IntegerPair."""
    if isinstance(x, IntegerPair):
        return x
    p, pp = x
    return IntegerPair(int(p), int(pp))


def bracket(P, Q) -> int:
    """[P, Q] = p q' - p' q."""
    P, Q = pair(P), pair(Q)
    return P.p * Q.pp - P.pp * Q.p


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def sign_surd(a: int, b: int, n: int) -> int:
    """Exact sign of a + b*sqrt(n) for integers a, b and n >= 0."""
    sa, sb = _sgn(a), _sgn(b)
    if sb == 0 or n == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 n
    d = a * a - b * b * n
    return sa * _sgn(d)


def defines_angle(P) -> bool:
    """True iff P labels an orbit angle: P != 0 and, when p < 0, 2p'^2 > 3p^2."""
    P = pair(P)
    if P.is_zero():
        return False
    if P.p >= 0:
        return True
    return 2 * P.pp * P.pp > 3 * P.p * P.p


def _require_angle(P: IntegerPair) -> None:
    if not defines_angle(P):
        raise ValueError(f"pair {P!r} does not define an angle")


@dataclass(frozen=True)
class AngleCos:
    """cos(theta_P) = (sqrt(p^2 + 2p'^2) - p) / (sqrt(6) p'), or 0 when p' = 0."""

    p: int
    pp: int

    @property
    def radicand(self) -> int:
        return self.p * self.p + 2 * self.pp * self.pp

    @property
    def value(self) -> float:
        p, pp = self.p, self.pp
        if pp == 0:
            return 0.0
        r = math.sqrt(self.radicand)
        if p >= 0:
            # rationalized form avoids cancellation when p >> |p'|
            return 2.0 * pp / (SQRT6 * (r + p))
        return (r - p) / (SQRT6 * pp)


def angle_cos(P) -> AngleCos:
    P = pair(P)
    _require_angle(P)
    return AngleCos(P.p, P.pp)


def angle_value(P) -> float:
    """Advisory float theta_P in (0, pi)."""
    c = angle_cos(P).value
    return math.acos(max(-1.0, min(1.0, c)))


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _compare_pairs(P: IntegerPair, Q: IntegerPair) -> int:
    # class of theta relative to pi/2: p' > 0 below, p' = 0 at, p' < 0 above
    cp, cq = -_sgn(P.pp), -_sgn(Q.pp)
    if cp != cq:
        return _sgn(cp - cq)
    if cp == 0:
        return 0
    # same side of pi/2: u(theta) turns monotonically, so the bracket decides
    return _sgn(bracket(P, Q))


def compare_angles(P, Q) -> Order:
    """Exact order of theta_P against theta_Q."""
    P, Q = pair(P), pair(Q)
    _require_angle(P)
    _require_angle(Q)
    return Order(_compare_pairs(P, Q))


def alpha_eval(Q, theta: float) -> float:
    """alpha_Q(theta) = (1 - 3cos^2 theta) q' - sqrt(6) cos(theta) q."""
    Q = pair(Q)
    c = math.cos(theta)
    return (1.0 - 3.0 * c * c) * Q.pp - SQRT6 * c * Q.p


def alpha_sign_at_orbit(Q, P) -> int:
    """Exact sign of alpha_Q(theta_P)."""
    P, Q = pair(P), pair(Q)
    _require_angle(P)
    return _sgn(bracket(P, Q))


def alpha_sign_at_pole(Q, pole: int) -> int:
    """Sign of alpha_Q at theta = 0 (pole=0) or theta = pi (pole=1); never 0 for Q != 0."""
    Q = pair(Q)
    if pole == 0:
        return sign_surd(-2 * Q.pp, -Q.p, 6)
    return sign_surd(-2 * Q.pp, Q.p, 6)


# ---------------------------------------------------------------------------
# Exact angle keys with infinitesimal offsets


POLE0 = "pole0"
PAIR = "pair"
POLEPI = "polePi"
_KIND_RANK = {POLE0: 0, PAIR: 1, POLEPI: 2}


def _strip(offsets: tuple[int, ...]) -> tuple[int, ...]:
    offsets = tuple(int(o) for o in offsets)
    while offsets and offsets[-1] == 0:
        offsets = offsets[:-1]
    return offsets


@functools.total_ordering
@dataclass(frozen=True, init=False)
class Angle:
    """An exact point of [0, pi]: a pole or an orbit angle, plus optional offsets.

    ``offsets`` is an infinitesimal shift o_1 d_1 + o_2 d_2 + ... with
    d_1 >> d_2 >> ... > 0, compared lexicographically.  Split and move
    placements ("just below theta") are expressed this way so every order and
    sign test stays exact.
    """

    kind: str
    pair: Optional[IntegerPair]
    offsets: tuple[int, ...]

    def __init__(self, kind: str, pair_: Optional[IntegerPair] = None,
                 offsets: tuple[int, ...] = ()):
        if kind not in _KIND_RANK:
            raise ValueError(f"unknown angle kind {kind!r}")
        if kind == PAIR:
            P = pair(pair_)
            _require_angle(P)
            pair_ = P.primitive()
        else:
            pair_ = None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pair", pair_)
        object.__setattr__(self, "offsets", _strip(offsets))

    @classmethod
    def of(cls, P) -> "Angle":
        return cls(PAIR, pair(P))

    @property
    def is_pole(self) -> bool:
        return self.kind != PAIR

    @property
    def is_exact(self) -> bool:
        """True when there is no infinitesimal offset."""
        return not self.offsets

    @property
    def base(self) -> "Angle":
        return Angle(self.kind, self.pair)

    def shifted(self, offsets: tuple[int, ...]) -> "Angle":
        return Angle(self.kind, self.pair, offsets)

    def nudge(self, direction: int, depth: int) -> "Angle":
        """Move infinitesimally by ``direction`` at level ``depth`` (0-based)."""
        offs = list(self.offsets) + [0] * max(0, depth + 1 - len(self.offsets))
        offs[depth] += direction
        return Angle(self.kind, self.pair, tuple(offs))

    def _base_cmp(self, other: "Angle") -> int:
        rk = _KIND_RANK[self.kind] - _KIND_RANK[other.kind]
        if rk:
            return _sgn(rk)
        if self.kind != PAIR:
            return 0
        return _compare_pairs(self.pair, other.pair)

    def cmp(self, other: "Angle") -> int:
        c = self._base_cmp(other)
        if c:
            return c
        a, b = self.offsets, other.offsets
        n = max(len(a), len(b))
        a = a + (0,) * (n - len(a))
        b = b + (0,) * (n - len(b))
        return (a > b) - (a < b)

    def __lt__(self, other: "Angle") -> bool:
        return self.cmp(other) < 0

    def base_value(self) -> float:
        if self.kind == POLE0:
            return 0.0
        if self.kind == POLEPI:
            return math.pi
        return angle_value(self.pair)

    def value(self, delta: float = 0.0) -> float:
        """Advisory float; offset level i contributes o_i * delta / 16**i."""
        v = self.base_value()
        for i, o in enumerate(self.offsets):
            v += o * delta / 16.0 ** i
        return v

    def __repr__(self) -> str:
        core = self.kind if self.is_pole else f"th{self.pair!r}"
        if self.offsets:
            return f"{core}{list(self.offsets)}"
        return core


ANGLE0 = Angle(POLE0)
ANGLEPI = Angle(POLEPI)


def alpha_sign(Q, x: Angle) -> int:
    """Exact sign of alpha_Q at an angle key, honoring infinitesimal offsets."""
    Q = pair(Q)
    if Q.is_zero():
        return 0
    if x.kind == POLE0:
        return alpha_sign_at_pole(Q, 0)
    if x.kind == POLEPI:
        return alpha_sign_at_pole(Q, 1)
    s = alpha_sign_at_orbit(Q, x.pair)
    if s != 0:
        return s
    first = next((o for o in x.offsets if o != 0), 0)
    if first == 0:
        return 0
    # alpha_Q increases through theta_Q and decreases through theta_{-Q}
    rising = Q.primitive() == x.pair
    return _sgn(first) if rising else -_sgn(first)


def alpha_zeros(Q) -> list[Angle]:
    """The zeros of alpha_Q on [0, pi]: theta_Q and theta_{-Q} where defined."""
    Q = pair(Q)
    out = [Angle.of(R) for R in (Q, -Q) if defines_angle(R)]
    return sorted(out)


class Positivity(NamedTuple):
    ok: bool
    witness: Optional[Angle] = None
    reason: str = ""


def alpha_positive_on(Q, lo: Angle, hi: Angle, allow_zero_lo: bool = False,
                      allow_zero_hi: bool = False) -> Positivity:
    """Decide alpha_Q > 0 on [lo, hi], permitting zeros at flagged endpoints."""
    Q = pair(Q)
    if not lo < hi:
        raise ValueError(f"malformed interval [{lo!r}, {hi!r}]")
    if Q.is_zero():
        return Positivity(False, lo, "zero label")
    for z in alpha_zeros(Q):
        if lo < z < hi:
            return Positivity(False, z, "interior zero")
    for end, allowed in ((lo, allow_zero_lo), (hi, allow_zero_hi)):
        s = alpha_sign(Q, end)
        if s < 0 or (s == 0 and not allowed):
            return Positivity(False, end, "endpoint sign")
    # no zero strictly inside: the interior sign is the sign just above lo
    depth = max(len(lo.offsets), len(hi.offsets))
    if alpha_sign(Q, lo.nudge(+1, depth)) <= 0:
        return Positivity(False, lo, "negative interior")
    return Positivity(True)
