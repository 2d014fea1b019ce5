"""Type Z_n + (n-1) data over F_q (q = n+1) and its exact verification.

All values are sixth roots of unity stored as exponents mod 6:
e means exp(2 pi i e / 6), so 0 is 1, 3 is -1 and 2 is omega.
The labels x run over F_q minus {0, 1}, with the multiplicative group of F_q
playing the role of the dual of Z_n; x^-1 plays the role of the conjugate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .fields import (
    FiniteField,
    domain,
    field_of_order,
    generators_matching,
    log_labels,
    prime_power,
    sigma_map,
    verify_sigma_identities,
)

EXCEPTIONAL = {1: 1, 2: 2, 3: 1, 7: 1}

# the n=7 sign pattern, rows/columns are generator-log labels 1..6; None where i+j = 7
_N7_A = [0, 0, 1, 0, 1, 1]          # 1 marks s
_N7_BPP = [
    [0, 1, 1, 0, 1, None],
    [0, 0, 1, 1, None, 1],
    [1, 1, 0, None, 0, 0],
    [1, 0, None, 0, 1, 1],
    [1, None, 0, 1, 0, 0],
    [None, 1, 0, 1, 0, 0],
]
N7_CYCLES = "(142)(365)"


def root6(e: int) -> complex:
    return cmath.exp(2j * math.pi * (e % 6) / 6)


@dataclass
class FirstClassSolution:
    q: int
    s: int
    a: Dict[int, int]
    b: Dict[int, int]
    bpp: Dict[Tuple[int, int], int]
    field: FiniteField = field(repr=False)
    generator: int = 0
    name: str = ""

    @property
    def n(self) -> int:
        return self.q - 1

    @property
    def s_exp(self) -> int:
        return 0 if self.s == 1 else 3

    @property
    def omega(self) -> int:
        """Exponent of b at -1 when sigma fixes -1 (q a power of 3), else 0."""
        F = self.field
        m1 = F.neg(1)
        if F.q > 2 and m1 != 1 and m1 in self.b:
            return (self.b[m1] - self.s_exp - self.a[m1]) % 6
        return 0

    def bprime(self) -> Dict[int, int]:
        """b'(x) = s a(x) conj b(x^-1), sitting at position (x, sigma^2 x)."""
        F = self.field
        return {x: (self.s_exp + self.a[x] - self.b[F.inv(x)]) % 6 for x in self.a}

    def labels(self) -> Dict[int, int]:
        return log_labels(self.field, self.generator)

    def product(self, other: "FirstClassSolution") -> "FirstClassSolution":
        if other.q != self.q or other.generator != self.generator:
            raise ValueError("solutions over different fields or labelings")
        return FirstClassSolution(
            self.q, self.s * other.s,
            {x: (v + other.a[x]) % 6 for x, v in self.a.items()},
            {x: (v + other.b[x]) % 6 for x, v in self.b.items()},
            {k: (v + other.bpp[k]) % 6 for k, v in self.bpp.items()},
            self.field, self.generator, f"{self.name}*{other.name}")

    def conjugate(self) -> "FirstClassSolution":
        return FirstClassSolution(
            self.q, self.s,
            {x: (-v) % 6 for x, v in self.a.items()},
            {x: (-v) % 6 for x, v in self.b.items()},
            {k: (-v) % 6 for k, v in self.bpp.items()},
            self.field, self.generator, f"conj({self.name})")

    def to_json(self) -> dict:
        lab = self.labels()
        order = sorted(self.a, key=lambda x: lab[x])
        pairs = [(x, y) for x in order for y in order if (x, y) in self.bpp]
        return {
            "q": self.q,
            "s": self.s,
            "field_modulus": list(self.field.modulus),
            "generator": self.generator,
            "labels": [lab[x] for x in order],
            "a": [1 if self.a[x] == 0 else -1 for x in order],
            "b": [self.b[x] for x in order],
            "bpp": [[lab[x], lab[y], self.bpp[(x, y)]] for x, y in pairs],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FirstClassSolution":
        F = field_of_order(data["q"])
        if tuple(data["field_modulus"]) != F.modulus:
            raise ValueError("stored modulus differs from the canonical one")
        g = data["generator"]
        inv_lab = {v: k for k, v in log_labels(F, g).items()}
        xs = [inv_lab[k] for k in data["labels"]]
        a = {x: (0 if v == 1 else 3) for x, v in zip(xs, data["a"])}
        b = {x: v % 6 for x, v in zip(xs, data["b"])}
        bpp = {(inv_lab[i], inv_lab[j]): v % 6 for i, j, v in data["bpp"]}
        return cls(data["q"], data["s"], a, b, bpp, F, g, data.get("name", ""))


def _pairs(F: FiniteField) -> List[Tuple[int, int]]:
    xs = domain(F)
    return [(x, y) for x in xs for y in xs if F.mul(x, y) != 1]


def canonical_first_class(q: int) -> FirstClassSolution:
    """s = 1 and every a, b, b'' equal to 1."""
    if prime_power(q) is None:
        raise ValueError(f"{q} is not a prime power")
    F = field_of_order(q)
    xs = domain(F)
    return FirstClassSolution(q, 1, {x: 0 for x in xs}, {x: 0 for x in xs},
                              {pr: 0 for pr in _pairs(F)}, F, F.generator, f"canonical q={q}")


def exceptional_first_class(n: int, variant: int = 0) -> FirstClassSolution:
    """The extra solutions for n = 1, 2, 3, 7.

    n=2 has two variants, b(-1) = omega and omega^2; the others have one, with s = -1.
    """
    if n not in EXCEPTIONAL or not 0 <= variant < EXCEPTIONAL[n]:
        raise ValueError(f"no exceptional solution (n={n}, variant={variant})")
    q = n + 1
    F = field_of_order(q)
    xs = domain(F)
    if n == 1:
        return FirstClassSolution(2, -1, {}, {}, {}, F, F.generator, "n=1 s=-1")
    if n == 2:
        m1 = F.neg(1)
        w = 2 if variant == 0 else 4
        return FirstClassSolution(3, 1, {m1: 0}, {m1: w}, {}, F, F.generator,
                                  f"n=2 b(-1)=omega^{1 + variant}")
    if n == 3:
        lab = log_labels(F)
        a = {x: (0 if lab[x] == 1 else 3) for x in xs}
        b = {x: (3 + a[x]) % 6 for x in xs}
        bpp = {(x, y): a[x] for x, y in _pairs(F) if x == y}
        bpp.update({(x, y): 0 for x, y in _pairs(F) if x != y})
        return FirstClassSolution(4, -1, a, b, bpp, F, F.generator, "n=3 s=-1")
    g = generators_matching(F, N7_CYCLES)[0]
    lab = log_labels(F, g)
    a = {x: 3 * _N7_A[lab[x] - 1] for x in xs}
    b = {x: (3 + a[x]) % 6 for x in xs}
    bpp = {}
    for x, y in _pairs(F):
        v = _N7_BPP[lab[x] - 1][lab[y] - 1]
        bpp[(x, y)] = 3 * v
    return FirstClassSolution(8, -1, a, b, bpp, F, g, "n=7 s=-1")


def catalog(n: int) -> List[FirstClassSolution]:
    """Every catalogued solution for Z_n, canonical first."""
    q = n + 1
    if prime_power(q) is None:
        return []
    out = [canonical_first_class(q)]
    out += [exceptional_first_class(n, v) for v in range(EXCEPTIONAL.get(n, 0))]
    return out


@dataclass
class IdentityReport:
    max_residual: float
    checked: int
    failures: List[Tuple[str, tuple]]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_identities(sol: FirstClassSolution) -> IdentityReport:
    """Check sigma, the a/b constraints and all four b'' identities over their
    full domains.  Exact: any mismatch is a failure, and the residual is the
    largest |LHS - RHS| of the mismatching instances (0 when all hold)."""
    F = sol.field
    S = sol.s_exp
    inv = F.inv
    mul = F.mul
    sg = sigma_map(F)
    a, b, bpp = sol.a, sol.b, sol.bpp
    failures: List[Tuple[str, tuple]] = []
    worst = 0.0
    checked = 0

    def check(name, lhs, rhs, where):
        nonlocal worst, checked
        checked += 1
        if (lhs - rhs) % 6:
            failures.append((name, where))
            worst = max(worst, abs(root6(lhs) - root6(rhs)))

    sr = verify_sigma_identities(F)
    checked += sr.checked
    if not sr.ok:
        failures.append(("sigma", sr.counterexample))
        worst = max(worst, 2.0)

    if sol.s not in (1, -1) or (sol.s == -1 and F.p != 2 and F.q > 2):
        failures.append(("s", (sol.s,)))
    for x in a:
        if a[x] not in (0, S):
            failures.append(("a values", (x,)))
        check("a(x)=a(sigma x)", a[x], a[sg[x]], (x,))
        check("a(x)=s a(1/x)", a[x], S + a[inv(x)], (x,))
        check("b(1/sigma x)=s b(x)", b[inv(sg[x])], S + b[x], (x,))
        check("b b b = s a", b[x] + b[sg[x]] + b[sg[sg[x]]], S + a[x], (x,))

    def d(x, y):
        return F.div(x, y)

    for (x, y) in _pairs(F):
        xy = mul(x, y)
        check("left", bpp[(x, y)],
              S + a[y] + a[d(sg[xy], sg[x])] - bpp[(xy, inv(y))], (x, y))
        check("right", bpp[(x, y)],
              S + a[x] + b[d(sg[x], sg[xy])] - bpp[(inv(x), xy)], (x, y))
        u, v = inv(sg[sg[x]]), inv(sg[y])
        uv = mul(u, v)
        if uv == 1 or (u, v) not in bpp:
            failures.append(("third: argument outside domain", (x, y)))
            continue
        check("third", bpp[(x, y)],
              S + b[inv(x)] - b[y] + b[xy] + b[uv] - bpp[(u, v)], (x, y))
    xs = domain(F)
    for w in xs:
        for (x, y) in _pairs(F):
            xy = mul(x, y)
            if w == xy or w == x:
                continue
            lhs = bpp[(d(sg[w], sg[x]), d(sg[x], sg[xy]))] + bpp[(x, y)] + bpp[(w, d(x, w))]
            rhs = bpp[(w, d(xy, w))] + bpp[(d(x, w), y)]
            check("pentagon", lhs, rhs, (w, x, y))
    return IdentityReport(worst, checked, failures)


def verify_bprime(sol: FirstClassSolution) -> bool:
    """b' has modulus one and sits on the permutation x -> sigma^2 x."""
    sg = sigma_map(sol.field)
    bp = sol.bprime()
    targets = {sg[sg[x]] for x in bp}
    return len(targets) == len(bp) and all(0 <= v < 6 for v in bp.values())


def fixed_point_values(sol: FirstClassSolution) -> Dict[int, int]:
    sg = sigma_map(sol.field)
    return {x: sol.b[x] for x in sg if sg[x] == x}


def count_first_class(n: int, certify: bool = True) -> int:
    """Number of inequivalent type Z_n + (n-1) categories.

    Zero when n+1 is not a prime power.  With certify, the catalogued
    solutions are verified and their doubles' modular data are checked to be
    pairwise non-matching; a failure raises.
    """
    sols = catalog(n)
    if not sols:
        return 0
    for s in sols:
        rep = verify_identities(s)
        if not rep.ok:
            raise ArithmeticError(f"{s.name} fails: {rep.failures[:3]}")
    if certify and len(sols) > 1:
        from .modular import match_md, md_first_class
        mds = [md_first_class(s) for s in sols]
        for i in range(len(mds)):
            for j in range(i + 1, len(mds)):
                if match_md(mds[i], mds[j]) is not None:
                    raise ArithmeticError(f"{sols[i].name} and {sols[j].name} have matching modular data")
    return len(sols)
