"""The shipped table of type G+n representatives, and comparison helpers."""

from __future__ import annotations

import cmath
import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence

import numpy as np

from .groups import (
    AbelianGroup,
    Element,
    SymmetricPairing,
    automorphisms,
    frac1,
    pairing_from_parameter,
    parse_group,
)
from .second_class import (
    SecondClassInstance,
    SecondClassSolution,
    a_base_exponents,
    full_residual,
)

ENV_VAR = "NEARGROUP_DATA"


def table_path() -> str:
    override = os.environ.get(ENV_VAR)
    if override:
        return override
    return str(resources.files("neargroup") / "data" / "seed_table.json")


def decimals(s: str) -> int:
    s = s.strip().lstrip("+-")
    return len(s.split(".")[1]) if "." in s else 0


def j_elements(G: AbelianGroup) -> List[Element]:
    """Elements carrying the listed angles, in the table's order.

    Cyclic groups: g = 1..floor(n/2).  Two-factor groups: (g',0) for
    g' = 1..floor(n'/2), then (g',g'') for g'' = 1..floor(n''/2) and
    g' = 0..n'-1.
    """
    if G.rank == 1:
        return [(g,) for g in range(1, G.factors[0] // 2 + 1)]
    if G.rank != 2:
        raise ValueError("angle ordering defined for one or two factors")
    n1, n2 = G.factors
    out = [(g, 0) for g in range(1, n1 // 2 + 1)]
    for g2 in range(1, n2 // 2 + 1):
        out += [(g1, g2) for g1 in range(n1)]
    return out


@dataclass
class SeedRow:
    group_name: str
    root_order: int
    exponent: int
    pairing_m: int
    a_signs: Optional[List[int]]
    qprime: str
    j_text: List[str]
    index: int = -1

    @property
    def group(self) -> AbelianGroup:
        return parse_group(self.group_name)

    @property
    def c(self) -> complex:
        return cmath.exp(2j * math.pi * self.exponent / self.root_order)

    @property
    def j(self) -> np.ndarray:
        return np.array([float(x) for x in self.j_text])

    @property
    def j_tolerance(self) -> np.ndarray:
        """One unit in the last printed decimal of each angle."""
        return np.array([10.0 ** -decimals(x) for x in self.j_text])

    def pairing(self) -> SymmetricPairing:
        return pairing_from_parameter(self.group, self.pairing_m)

    def a_exponents(self) -> Dict[Element, Fraction]:
        """a(g) = prod_i s_i^{g_i} exp(-pi i m_i g_i^2 / n_i) over even factors
        with the printed (signed) m_i; odd factors use <g,g>^((n_i-1)/2)."""
        G = self.group
        ms = [1] * (G.rank - 1) + [self.pairing_m]
        signs = list(self.a_signs or [])
        even = [i for i, f in enumerate(G.factors) if f % 2 == 0]
        signs += [1] * (len(even) - len(signs))
        sign_of = dict(zip(even, signs))
        out = {}
        for g in G.elements():
            t = Fraction(0)
            for i, f in enumerate(G.factors):
                if f % 2:
                    t += Fraction(ms[i] * g[i] * g[i], f) * ((f - 1) // 2)
                else:
                    t -= Fraction(ms[i] * g[i] * g[i], 2 * f)
                    if sign_of[i] == -1:
                        t += Fraction(g[i], 2)
            out[g] = frac1(t)
        return out

    def instance(self) -> SecondClassInstance:
        return SecondClassInstance(self.group, self.pairing(), self.a_exponents(), self.c)

    def b_vector(self, inst: Optional[SecondClassInstance] = None) -> np.ndarray:
        inst = inst or self.instance()
        return b_from_angles(inst, self.j)

    def solution(self) -> SecondClassSolution:
        inst = self.instance()
        b = self.b_vector(inst)
        return SecondClassSolution(inst, b, residual=full_residual(inst, b), provenance=f"table row {self.index}")

    def matches_instance(self, inst: SecondClassInstance) -> bool:
        return (inst.group == self.group and inst.pairing.key() == self.pairing().key()
                and inst.a_exp == self.a_exponents())


def b_from_angles(inst: SecondClassInstance, j: Sequence[float]) -> np.ndarray:
    G = inst.group
    n = inst.n
    b = np.full(n, np.nan, dtype=complex)
    b[0] = -1 / inst.delta
    for g, ang in zip(j_elements(G), j):
        b[inst.idx[g]] = cmath.exp(1j * ang) / math.sqrt(n)
    for g in G.elements():
        i = inst.idx[g]
        k = inst.idx[G.neg(g)]
        if np.isnan(b[k]) and not np.isnan(b[i]):
            b[k] = np.conj(inst.a[i]) * np.conj(b[i])
    return b


def angles_of(sol: SecondClassSolution) -> np.ndarray:
    inst = sol.instance
    return np.array([cmath.phase(sol.b[inst.idx[g]] * math.sqrt(inst.n)) for g in j_elements(inst.group)])


def load_table(path: Optional[str] = None) -> List[SeedRow]:
    with open(path or table_path()) as fh:
        data = json.load(fh)
    rows = []
    for i, r in enumerate(data["rows"]):
        rows.append(SeedRow(r["group"], r["c"]["root_order"], r["c"]["exponent"], r["pairing_m"],
                            r["a_signs"], r["Qprime_printed"], r["j"], index=i))
    return rows


def rows_for(group: AbelianGroup, rows: Optional[Sequence[SeedRow]] = None) -> List[SeedRow]:
    rows = load_table() if rows is None else rows
    return [r for r in rows if r.group == group]


def angle_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = np.mod(x - y + math.pi, 2 * math.pi) - math.pi
    return np.abs(d)


def match_row(sol: SecondClassSolution, row: SeedRow, tol: float = 1e-6, printed_precision: bool = True):
    """Search Aut(G) for a representative of sol's class with the row's c,
    pairing, a-signs and angles.  Returns (phi, max angle error) or None.

    With printed_precision the tolerance for each angle is the larger of tol
    and one unit in its last printed decimal.
    """
    inst = sol.instance
    if inst.group != row.group or abs(inst.c - row.c) > 1e-9:
        return None
    target_p = row.pairing().key()
    target_a = row.a_exponents()
    allowed = np.maximum(tol, row.j_tolerance) if printed_precision else np.full(len(row.j), tol)
    best = None
    for phi in automorphisms(inst.group):
        if inst.pairing.transform(phi).key() != target_p:
            continue
        if {g: inst.a_exp[phi(g)] for g in inst.elements} != target_a:
            continue
        b2 = np.array([sol.b[inst.idx[phi(g)]] for g in inst.elements])
        ang = np.array([cmath.phase(b2[inst.idx[g]] * math.sqrt(inst.n)) for g in j_elements(inst.group)])
        err = angle_distance(ang, row.j)
        if np.all(err <= allowed):
            e = float(err.max()) if len(err) else 0.0
            if best is None or e < best[1]:
                best = (phi, e)
    return best


@dataclass
class RowReading:
    """A way of reading a printed row that makes it an exact solution."""
    row: SeedRow
    pairing_m: int
    a_signs: List[int]
    conjugate: bool
    unit: int
    residual: float

    @property
    def changes(self) -> List[str]:
        out = []
        if self.pairing_m != self.row.pairing_m:
            out.append(f"m {self.row.pairing_m} -> {self.pairing_m}")
        if list(self.a_signs) != list(self.row.a_signs or []):
            out.append(f"signs {self.row.a_signs} -> {list(self.a_signs)}")
        if self.conjugate:
            out.append("complex conjugate (c and angles)")
        if self.unit != 1:
            out.append(f"angles listed at {self.unit}g")
        return out

    @property
    def literal(self) -> bool:
        return not self.changes

    def solution(self) -> SecondClassSolution:
        return _reading_solution(self.row, self.pairing_m, self.a_signs, self.conjugate, self.unit)


def _reading_solution(row: SeedRow, m: int, signs, conj: bool, unit: int) -> SecondClassSolution:
    r = SeedRow(row.group_name, row.root_order, -row.exponent if conj else row.exponent, m,
                list(signs), row.qprime, row.j_text, row.index)
    inst = r.instance()
    G = inst.group
    j = -r.j if conj else r.j
    n = inst.n
    b = np.full(n, np.nan, dtype=complex)
    b[0] = -1 / inst.delta
    for g, ang in zip(j_elements(G), j):
        b[inst.idx[G.scale(unit, g)]] = cmath.exp(1j * ang) / math.sqrt(n)
    for g in G.elements():
        i, k = inst.idx[g], inst.idx[G.neg(g)]
        if np.isnan(b[k]) and not np.isnan(b[i]):
            b[k] = np.conj(inst.a[i]) * np.conj(b[i])
    if np.isnan(b).any():
        b = np.nan_to_num(b, nan=0.0)
    return SecondClassSolution(inst, b, residual=full_residual(inst, b), provenance=f"table row {row.index}")


def read_row(row: SeedRow, tol: float = 1e-4) -> List[RowReading]:
    """Readings of a row that solve the equations, fewest changes first.

    The printed row is tried first.  If it fails, the search changes m to
    another unit (its negative first), flips a-signs, conjugates, and (cyclic groups) lets the angles sit at
    u*g for a unit u.  tol applies to the unrefined residual, so it must
    absorb the printed rounding.
    """
    G = row.group
    nev = sum(1 for f in G.factors if f % 2 == 0)
    signs0 = list(row.a_signs or [])
    signs0 += [1] * (nev - len(signs0))
    units = [1]
    if G.rank == 1:
        n = G.factors[0]
        units += [u for u in range(2, n) if math.gcd(u, n) == 1]
    out = []
    last = G.factors[-1]
    ms = [row.pairing_m, -row.pairing_m]
    ms += [m for m in range(1, last) if math.gcd(m, last) == 1 and m % last not in {x % last for x in ms}]
    for m in ms:
        for signs in itertools.product([1, -1], repeat=nev):
            for conj in (False, True):
                for u in units:
                    try:
                        sol = _reading_solution(row, m, signs, conj, u)
                    except ValueError:
                        continue
                    if sol.residual < tol:
                        out.append(RowReading(row, m, list(signs) if signs0 or nev else [], conj, u, sol.residual))
    out.sort(key=lambda rd: (len(rd.changes), rd.residual))
    if out and out[0].literal:
        return out[:1]
    return out


def qprime_form(row: SeedRow):
    """The form on the group of order n+4 listed for an odd-order row.

    An integer k means k*g^2/(n+4) on the cyclic group; a pair (x,y) means
    (x g1^2 + y g2^2)/3 on Z3xZ3.  Even-order rows list exponent pairs
    instead and return None.
    """
    from .groups import parse_group, quadratic_form_cyclic, quadratic_form_diagonal
    n = row.group.order
    text = row.qprime.strip()
    if n % 2 == 0 or not text:
        return None
    if text.startswith("("):
        ms = [int(x) for x in text.strip("()").split(",")]
        if n + 4 != 9 or len(ms) != 2:
            raise ValueError(f"unexpected form {text!r} for n={n}")
        return quadratic_form_diagonal(parse_group("Z3xZ3"), ms)
    return quadratic_form_cyclic(n + 4, int(text))


def reading_with_printed_pairing(row: SeedRow, tol: float = 1e-4) -> Optional[RowReading]:
    """The fewest-change reading that keeps the row's pairing.

    The listed Q' belongs with the listed pairing, so this is the reading
    to pair with it when the row also admits a reading that changes m.
    """
    for rd in read_row(row, tol):
        if rd.pairing_m == row.pairing_m:
            return rd
    return None
