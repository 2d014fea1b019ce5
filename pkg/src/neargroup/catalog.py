"""JSON persistence for solutions and catalogs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Union

import numpy as np

from . import __version__
from .first_class import FirstClassSolution, verify_identities
from .groups import SymmetricPairing, parse_group
from .second_class import SecondClassInstance, SecondClassSolution, full_residual
from .seeds import angles_of

RECHECK_FACTOR = 10.0
RECHECK_FLOOR = 1e-12

Solution = Union[FirstClassSolution, SecondClassSolution]


def _cx(z) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _uncx(d) -> complex:
    return complex(d["re"], d["im"])


def _el(g) -> list:
    return [int(x) for x in g]


def second_to_json(sol: SecondClassSolution) -> dict:
    inst = sol.instance
    G = inst.group
    q = [[str(x) for x in row] for row in inst.pairing.q]
    return {
        "kind": "second",
        "group": G.name(),
        "pairing": q,
        "pairing_label": inst.pairing.label,
        "a": [[_el(g), str(inst.a_exp[g])] for g in inst.elements],
        "a_signs": inst.a_signs,
        "c": _cx(inst.c),
        "b": [_cx(z) for z in sol.b],
        "j": [float(x) for x in angles_of(sol)] if G.rank <= 2 else [],
        "residual": float(sol.residual),
        "class_id": sol.class_id,
        "conjugate_of": sol.conjugate_of,
        "provenance": sol.provenance,
    }


def second_from_json(d: dict) -> SecondClassSolution:
    G = parse_group(d["group"])
    q = tuple(tuple(Fraction(x) for x in row) for row in d["pairing"])
    p = SymmetricPairing(G, q, d.get("pairing_label", ""))
    a_exp = {tuple(g): Fraction(v) for g, v in d["a"]}
    inst = SecondClassInstance(G, p, a_exp, _uncx(d["c"]))
    b = np.array([_uncx(z) for z in d["b"]])
    return SecondClassSolution(inst, b, d.get("residual", float("nan")), None, d.get("class_id", -1),
                               d.get("conjugate_of"), d.get("provenance", "discovered"))


def solution_to_json(sol: Solution) -> dict:
    if isinstance(sol, FirstClassSolution):
        out = sol.to_json()
        out["kind"] = "first"
        return out
    return second_to_json(sol)


def solution_from_json(d: dict) -> Solution:
    if d.get("kind") == "first":
        return FirstClassSolution.from_json(d)
    return second_from_json(d)


def recheck(sol: Solution) -> tuple:
    """(ok, residual now).  First-class data is checked exactly; second-class
    residuals must stay within 10x the stored value."""
    if isinstance(sol, FirstClassSolution):
        rep = verify_identities(sol)
        return rep.ok, rep.max_residual
    r = full_residual(sol.instance, sol.b)
    stored = sol.residual if not math.isnan(sol.residual) else 0.0
    return r <= max(RECHECK_FACTOR * stored, RECHECK_FLOOR, 1e-9), r


@dataclass
class Catalog:
    solutions: List[Solution] = field(default_factory=list)
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tool_version": __version__, "seed": self.seed, "meta": self.meta,
                "solutions": [solution_to_json(s) for s in self.solutions]}

    @classmethod
    def from_json(cls, data: dict, verify: bool = True) -> "Catalog":
        sols = [solution_from_json(d) for d in data.get("solutions", [])]
        if verify:
            for i, s in enumerate(sols):
                ok, r = recheck(s)
                if not ok:
                    raise ValueError(f"solution {i} fails re-verification (residual {r:.3e})")
        return cls(sols, data.get("seed"), data.get("meta", {}))

    def dump(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path: str, verify: bool = True) -> "Catalog":
        with open(path) as fh:
            return cls.from_json(json.load(fh), verify)
