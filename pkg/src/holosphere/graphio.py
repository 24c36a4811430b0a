"""JSON encoding of exact angles shared by the graph modules."""

from __future__ import annotations

from .algebra import ANGLE0, ANGLEPI, POLE0, POLEPI, Angle, IntegerPair


def angle_to_json(a: Angle):
    if a.kind == POLE0:
        core = "pole0"
    elif a.kind == POLEPI:
        core = "polePi"
    else:
        core = {"p": a.pair.p, "pp": a.pair.pp}
    if not a.offsets:
        return core
    return {"base": core, "offset": list(a.offsets)}


def angle_from_json(doc) -> Angle:
    if isinstance(doc, str):
        if doc == "pole0":
            return ANGLE0
        if doc == "polePi":
            return ANGLEPI
        raise ValueError(f"unknown angle {doc!r}")
    if not isinstance(doc, dict):
        raise ValueError(f"bad angle {doc!r}")
    if "base" in doc:
        base = angle_from_json(doc["base"])
        return base.shifted(tuple(int(o) for o in doc.get("offset", ())))
    return Angle.of(IntegerPair(int(doc["p"]), int(doc["pp"])))
