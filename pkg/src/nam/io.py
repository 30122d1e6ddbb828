"""JSON documents for measures, weak distributions, product pairs and matrices.

Every rational is written as a string ("a/b", or "a" for integers) so no
document ever routes an exact value through a float.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from nam.characters import CyclotomicElement
from nam.errors import SchemaError
from nam.kakutani import GeometricTail, ProductPair, TrivialTail
from nam.linalg import PerturbationOperator
from nam.measures import BallMeasure, canon_vec
from nam.padic import REAL, Mode, Sadic
from nam.weak_dist import WeakDistribution

RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
PRIME = {"type": "integer", "minimum": 2}
MODE = {
    "oneOf": [
        {"const": "real"},
        {
            "type": "object",
            "properties": {"sadic": PRIME},
            "required": ["sadic"],
            "additionalProperties": False,
        },
    ]
}

MEASURE_SCHEMA = {
    "type": "object",
    "properties": {
        "p": PRIME,
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer"},
        "mode": MODE,
        "refinable": {"type": "boolean"},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "center": {"type": "array", "items": RATIONAL},
                    "weight": RATIONAL,
                },
                "required": ["center", "weight"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["p", "n", "m", "cells"],
}

WEAK_DIST_SCHEMA = {
    "type": "object",
    "properties": {
        "p": PRIME,
        "mode": MODE,
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "levels": {"type": "array", "items": MEASURE_SCHEMA},
    },
    "required": ["p", "dims", "levels"],
}

PRODUCT_PAIR_SCHEMA = {
    "type": "object",
    "properties": {
        "factors": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"mu": MEASURE_SCHEMA, "nu": MEASURE_SCHEMA},
                "required": ["mu", "nu"],
            },
        },
        "tail": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"trivial": {"type": "object"}},
                    "required": ["trivial"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "geometric": {
                            "type": "object",
                            "properties": {"ratio": RATIONAL},
                            "required": ["ratio"],
                        }
                    },
                    "required": ["geometric"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "required": ["factors"],
}

MATRIX_SCHEMA = {
    "type": "object",
    "properties": {
        "p": PRIME,
        "d": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "items": {"type": "array", "items": RATIONAL}},
    },
    "required": ["p", "d", "rows"],
}

CYCLOTOMIC_SCHEMA = {
    "type": "object",
    "properties": {
        "p": PRIME,
        "level": {"type": "integer", "minimum": 0},
        "coeffs": {"type": "array", "items": RATIONAL},
    },
    "required": ["p", "level", "coeffs"],
}

SCHEMAS = {
    "measure": MEASURE_SCHEMA,
    "weak_distribution": WEAK_DIST_SCHEMA,
    "product_pair": PRODUCT_PAIR_SCHEMA,
    "matrix": MATRIX_SCHEMA,
    "cyclotomic": CYCLOTOMIC_SCHEMA,
}


def validate(doc: Any, kind: str):
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise SchemaError(f"{kind} document invalid at {path}: {exc.message}") from None


def guess_kind(doc: Any) -> str | None:
    if not isinstance(doc, dict):
        return None
    if "factors" in doc:
        return "product_pair"
    if "levels" in doc:
        return "weak_distribution"
    if "rows" in doc:
        return "matrix"
    if "coeffs" in doc:
        return "cyclotomic"
    if "cells" in doc:
        return "measure"
    return None


def rat(x) -> str:
    return str(Fraction(x))


def parse_rat(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise SchemaError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {s!r}: {exc}") from None


def mode_to_json(mode: Mode):
    return "real" if mode.is_real else {"sadic": mode.s}


def mode_from_json(doc) -> Mode:
    if doc in (None, "real"):
        return REAL
    return Sadic(doc["sadic"])


def measure_to_json(mu: BallMeasure) -> dict:
    return {
        "p": mu.p,
        "n": mu.n,
        "m": mu.m,
        "mode": mode_to_json(mu.mode),
        "refinable": mu.refinable,
        "cells": [
            {"center": [rat(x) for x in c], "weight": rat(w)} for c, w in mu.cells.items()
        ],
    }


def measure_from_json(doc: dict) -> BallMeasure:
    validate(doc, "measure")
    p, n, m = doc["p"], doc["n"], doc["m"]
    seen = set()
    cells = []
    for cell in doc["cells"]:
        center = tuple(parse_rat(x) for x in cell["center"])
        if len(center) != n:
            raise SchemaError(f"cell center {cell['center']} has dimension != {n}")
        key = canon_vec(center, p, m)
        if key in seen:
            raise SchemaError(f"duplicate cell {cell['center']} at resolution {m}")
        seen.add(key)
        cells.append((key, parse_rat(cell["weight"])))
    return BallMeasure(
        p, n, m, cells, mode=mode_from_json(doc.get("mode")), refinable=doc.get("refinable", False)
    )


def weak_dist_to_json(wd: WeakDistribution) -> dict:
    return {
        "p": wd.p,
        "mode": mode_to_json(wd.mode),
        "dims": list(wd.dims),
        "levels": [measure_to_json(mu) for mu in wd.levels],
    }


def weak_dist_from_json(doc: dict) -> WeakDistribution:
    validate(doc, "weak_distribution")
    levels = [measure_from_json(l) for l in doc["levels"]]
    return WeakDistribution(doc["p"], mode_from_json(doc.get("mode")), tuple(doc["dims"]), tuple(levels))


def product_pair_to_json(pp: ProductPair) -> dict:
    tail = (
        {"geometric": {"ratio": rat(pp.tail.ratio)}}
        if isinstance(pp.tail, GeometricTail)
        else {"trivial": {}}
    )
    return {
        "factors": [{"mu": measure_to_json(a), "nu": measure_to_json(b)} for a, b in pp.factors],
        "tail": tail,
    }


def product_pair_from_json(doc: dict) -> ProductPair:
    validate(doc, "product_pair")
    factors = [(measure_from_json(f["mu"]), measure_from_json(f["nu"])) for f in doc["factors"]]
    tail_doc = doc.get("tail", {"trivial": {}})
    if "geometric" in tail_doc:
        tail = GeometricTail(parse_rat(tail_doc["geometric"]["ratio"]))
    else:
        tail = TrivialTail()
    return ProductPair(tuple(factors), tail)


def matrix_to_json(p: int, rows) -> dict:
    return {"p": p, "d": len(rows), "rows": [[rat(x) for x in row] for row in rows]}


def operator_from_json(doc: dict) -> PerturbationOperator:
    validate(doc, "matrix")
    rows = [[parse_rat(x) for x in row] for row in doc["rows"]]
    if len(rows) != doc["d"] or any(len(r) != doc["d"] for r in rows):
        raise SchemaError(f"matrix is not {doc['d']} x {doc['d']}")
    return PerturbationOperator(doc["p"], rows)


def cyclotomic_to_json(c: CyclotomicElement) -> dict:
    c = c.minimal()
    return {"p": c.p, "level": c.level, "coeffs": [rat(x) for x in c.coeffs]}


def cyclotomic_from_json(doc: dict) -> CyclotomicElement:
    validate(doc, "cyclotomic")
    return CyclotomicElement(doc["p"], doc["level"], [parse_rat(x) for x in doc["coeffs"]])


def dumps(doc: Any) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
