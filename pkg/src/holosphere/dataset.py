"""Asymptotic data sets: representation, validation and the angle spectrum."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .algebra import (ANGLE0, ANGLEPI, ZERO, Angle, IntegerPair, defines_angle,
                      pair)

_SIGN_IN = {"+": 1, "-": -1, "−": -1}


@dataclass(frozen=True)
class EndTuple:
    """One end (delta, epsilon, (p, p')); ``sign`` is +1 for concave, -1 for convex."""

    delta: int
    sign: int
    pair: IntegerPair

    def __post_init__(self):
        if self.delta not in (-1, 0, 1):
            raise ValueError(f"delta must be -1, 0 or 1, got {self.delta!r}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "pair", pair(self.pair))

    @property
    def sign_char(self) -> str:
        return "+" if self.sign > 0 else "-"

    def __repr__(self) -> str:
        return f"({self.delta},{self.sign_char},{self.pair!r})"


def end(delta: int, sign, p: int, pp: int) -> EndTuple:
    """Convenience constructor accepting '+'/'-' or +-1 for the sign."""
    if isinstance(sign, str):
        sign = _SIGN_IN[sign]
    return EndTuple(delta, sign, IntegerPair(p, pp))


@dataclass(frozen=True)
class AsymptoticDataSet:
    ends: tuple[EndTuple, ...]
    c_plus: int = 0
    c_minus: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        if self.c_plus < 0 or self.c_minus < 0:
            raise ValueError("intersection counts must be non-negative")

    @property
    def c_hat(self) -> int:
        return self.c_plus + self.c_minus

    def to_json(self) -> dict:
        return {
            "ends": [{"delta": e.delta, "sign": e.sign_char, "p": e.pair.p, "pp": e.pair.pp}
                     for e in self.ends],
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
        }

    @classmethod
    def from_json(cls, doc) -> "AsymptoticDataSet":
        if isinstance(doc, str):
            doc = json.loads(doc)
        if not isinstance(doc, dict):
            raise ValueError("data set must be a JSON object")
        extra = set(doc) - {"ends", "c_plus", "c_minus"}
        if extra:
            raise ValueError(f"unknown fields: {sorted(extra)}")
        if "ends" not in doc or not isinstance(doc["ends"], list):
            raise ValueError("missing 'ends' list")
        ends = []
        for item in doc["ends"]:
            if not isinstance(item, dict):
                raise ValueError("each end must be an object")
            if set(item) != {"delta", "sign", "p", "pp"}:
                raise ValueError(f"end fields must be delta, sign, p, pp; got {sorted(item)}")
            if item["sign"] not in _SIGN_IN:
                raise ValueError(f"bad sign {item['sign']!r}")
            for k in ("delta", "p", "pp"):
                if not isinstance(item[k], int) or isinstance(item[k], bool):
                    raise ValueError(f"field {k!r} must be an integer")
            ends.append(end(item["delta"], item["sign"], item["p"], item["pp"]))
        cp, cm = doc.get("c_plus", 0), doc.get("c_minus", 0)
        for v in (cp, cm):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError("c_plus and c_minus must be integers")
        return cls(tuple(ends), cp, cm)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    elements: tuple = ()
    clause: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> list[str]:
        return sorted({v.rule for v in self.violations})

    def add(self, rule: str, message: str, elements: Iterable = (), clause: str = "") -> None:
        self.violations.append(Violation(rule, message, tuple(elements), clause))

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"rule": v.rule, "clause": v.clause, "message": v.message,
                 "elements": list(v.elements)}
                for v in self.violations
            ],
        }


def end_is_admissible(e: EndTuple) -> bool:
    """The per-element inequalities, cleared of radicals by squaring."""
    p, pp = e.pair.p, e.pair.pp
    if e.delta == 0:
        return defines_angle(e.pair)
    if p >= 0:
        return False
    steep = 2 * pp * pp > 3 * p * p  # |p'/p| > sqrt(3/2)
    if e.delta == 1:
        # p'/p < -sqrt(3/2) for concave ends, > -sqrt(3/2) for convex ends
        below = pp > 0 and steep
        return below if e.sign > 0 else not below
    # delta = -1: p'/p > sqrt(3/2) for concave, < sqrt(3/2) for convex
    above = pp < 0 and steep
    return above if e.sign > 0 else not above


def element_angle(e: EndTuple) -> Angle:
    if e.delta == 1:
        return ANGLE0
    if e.delta == -1:
        return ANGLEPI
    return Angle.of(e.pair)


def _angle_set(ds: AsymptoticDataSet) -> list[Angle]:
    angles = set()
    if ds.c_plus > 0:
        angles.add(ANGLE0)
    if ds.c_minus > 0:
        angles.add(ANGLEPI)
    for e in ds.ends:
        if e.delta != 0 or defines_angle(e.pair):
            angles.add(element_angle(e))
    return sorted(angles)


def validate_data_set(ds: AsymptoticDataSet) -> ValidationReport:
    """Check every data-set rule and report all failures."""
    rep = ValidationReport()
    if not ds.ends:
        rep.add("1.14", "the data set has no ends")
        return rep
    for i, e in enumerate(ds.ends):
        if not end_is_admissible(e):
            rep.add("1.14", f"element {i} {e!r} violates its delta={e.delta} inequality", (i,))

    sp = sum(e.sign * e.pair.p for e in ds.ends)
    spp = sum(e.sign * e.pair.pp for e in ds.ends)
    if sp != 0:
        rep.add("1.15", f"sum of eps*p is {sp}, expected 0")
    if spp != -(ds.c_plus - ds.c_minus):
        rep.add("1.15", f"sum of eps*p' is {spp}, expected {-(ds.c_plus - ds.c_minus)}")

    if len(ds.ends) == 2 and ds.c_hat == 0:
        bad = [i for i, e in enumerate(ds.ends) if not e.pair.is_primitive()]
        if bad:
            rep.add("1.16", "two-element data set with a non-primitive pair", bad)

    angles = _angle_set(ds)
    if len(angles) == 1:
        ok = (ds.c_hat == 0 and len(ds.ends) == 2
              and sorted(e.sign for e in ds.ends) == [-1, 1]
              and all(e.delta == 0 for e in ds.ends)
              and ds.ends[0].pair == ds.ends[1].pair
              and ds.ends[0].pair.is_primitive())
        if not ok:
            rep.add("1.17", "a single angle requires exactly {(0,+,P),(0,-,P)} with P primitive",
                    range(len(ds.ends)), clause="one-angle")
    elif len(angles) >= 2:
        for ext in (angles[0], angles[-1]):
            bad = [i for i, e in enumerate(ds.ends)
                   if e.delta == 0 and e.sign > 0 and defines_angle(e.pair)
                   and Angle.of(e.pair) == ext]
            if bad:
                rep.add("1.17", f"extremal angle {ext!r} arises from a (0,+) element", bad,
                        clause="extremal")
    return rep


@dataclass(frozen=True)
class SpectrumEntry:
    angle: Angle
    plus_sum: IntegerPair
    minus_sum: IntegerPair
    elements: tuple[int, ...]
    plus_elements: tuple[int, ...] = ()
    minus_elements: tuple[int, ...] = ()

    @property
    def net(self) -> IntegerPair:
        """Sum of (0,+) pairs minus sum of (0,-) pairs at this angle."""
        return self.plus_sum - self.minus_sum


def angle_spectrum(ds: AsymptoticDataSet) -> list[SpectrumEntry]:
    """The ordered angle set with per-angle sums of (0,+) and (0,-) pairs."""
    bad = [i for i, e in enumerate(ds.ends) if e.delta == 0 and not defines_angle(e.pair)]
    if bad:
        raise ValueError(f"elements {bad} do not define angles")
    out = []
    for a in _angle_set(ds):
        idx = tuple(i for i, e in enumerate(ds.ends) if element_angle(e) == a)
        plus = tuple(i for i in idx if ds.ends[i].delta == 0 and ds.ends[i].sign > 0)
        minus = tuple(i for i in idx if ds.ends[i].delta == 0 and ds.ends[i].sign < 0)
        ps = sum((ds.ends[i].pair for i in plus), ZERO)
        ms = sum((ds.ends[i].pair for i in minus), ZERO)
        out.append(SpectrumEntry(a, ps, ms, idx, plus, minus))
    return out


def pole_flux(ds: AsymptoticDataSet, pole: int) -> IntegerPair:
    """Required label of the edge meeting the pole (0 or 1 for pi).

    At pi: sum(-1,+) - sum(-1,-) - (0, c_-); at 0: sum(1,-) - sum(1,+) - (0, c_+).
    """
    total = ZERO
    if pole == 0:
        for e in ds.ends:
            if e.delta == 1:
                total = total - e.pair if e.sign > 0 else total + e.pair
        return total - IntegerPair(0, ds.c_plus)
    for e in ds.ends:
        if e.delta == -1:
            total = total + e.pair if e.sign > 0 else total - e.pair
    return total - IntegerPair(0, ds.c_minus)


@dataclass(frozen=True)
class IndexCounts:
    n_plus: int
    n_minus: int
    n_hat: int
    c_hat: int


def counts(ds: AsymptoticDataSet) -> IndexCounts:
    n_plus = sum(1 for e in ds.ends if e.delta == 0 and e.sign > 0)
    n_minus = sum(1 for e in ds.ends if e.delta == 0 and e.sign < 0)
    n_hat = sum(1 for e in ds.ends if e.delta != 0)
    return IndexCounts(n_plus, n_minus, n_hat, ds.c_hat)


def load_data_set(path) -> AsymptoticDataSet:
    with open(path, encoding="utf-8") as fh:
        return AsymptoticDataSet.from_json(json.load(fh))


def make(ends: Iterable, c_plus: int = 0, c_minus: int = 0) -> AsymptoticDataSet:
    """Build from (delta, sign, (p, p')) tuples."""
    items = []
    for e in ends:
        if isinstance(e, EndTuple):
            items.append(e)
        else:
            d, s, P = e
            P = pair(P)
            items.append(end(d, s, P.p, P.pp))
    return AsymptoticDataSet(tuple(items), c_plus, c_minus)

