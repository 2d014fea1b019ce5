"""Finite abelian groups, symmetric pairings, quadratic forms and Gauss sums.

Phases are kept exactly as ``Fraction`` values reduced mod 1; a phase ``t``
stands for the unit complex number exp(2 pi i t).  Complex numbers are only
produced by the ``value``/``evaluate`` helpers.
"""

from __future__ import annotations

import cmath
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from sympy.functions.combinatorial.numbers import jacobi_symbol as _sympy_jacobi

Element = Tuple[int, ...]

AUT_BOUND = 64


def frac1(x) -> Fraction:
    """Reduce a rational number mod 1 into [0, 1)."""
    x = Fraction(x)
    return x - math.floor(x)


def phase(t) -> complex:
    return cmath.exp(2j * math.pi * float(t))


@dataclass(frozen=True)
class AbelianGroup:
    factors: Tuple[int, ...]

    def __post_init__(self):
        fs = tuple(int(f) for f in self.factors)
        if not fs or any(f < 1 for f in fs):
            raise ValueError(f"bad factor list {self.factors!r}")
        object.__setattr__(self, "factors", fs)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def elements(self) -> List[Element]:
        return list(itertools.product(*(range(f) for f in self.factors)))

    def zero(self) -> Element:
        return tuple(0 for _ in self.factors)

    def reduce(self, g: Sequence[int]) -> Element:
        return tuple(int(x) % f for x, f in zip(g, self.factors))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((x + y) % f for x, y, f in zip(g, h, self.factors))

    def sub(self, g: Element, h: Element) -> Element:
        return tuple((x - y) % f for x, y, f in zip(g, h, self.factors))

    def neg(self, g: Element) -> Element:
        return tuple((-x) % f for x, f in zip(g, self.factors))

    def scale(self, k: int, g: Element) -> Element:
        return tuple((k * x) % f for x, f in zip(g, self.factors))

    def index(self, g: Element) -> int:
        i = 0
        for x, f in zip(g, self.factors):
            i = i * f + x
        return i

    def element_order(self, g: Element) -> int:
        o = 1
        for x, f in zip(g, self.factors):
            o = math.lcm(o, f // math.gcd(x, f))
        return o

    def generators(self) -> List[Element]:
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1 % self.factors[i]
            gens.append(tuple(e))
        return gens

    def name(self) -> str:
        return "x".join(f"Z{f}" for f in self.factors)

    def __str__(self):
        return self.name()


def cyclic(n: int) -> AbelianGroup:
    return AbelianGroup((n,))


def parse_group(text: str) -> AbelianGroup:
    """Parse literals such as ``Z3``, ``Z2xZ4`` or ``Z2^3``."""
    factors: List[int] = []
    for part in text.strip().replace("×", "x").split("x"):
        m = re.fullmatch(r"\s*Z_?(\d+)(?:\^(\d+))?\s*", part)
        if not m:
            raise ValueError(f"cannot parse group literal {text!r}")
        factors += [int(m.group(1))] * int(m.group(2) or 1)
    return AbelianGroup(tuple(factors))


# --- characters -------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    group: AbelianGroup
    exponents: Element

    def exponent(self, g: Element) -> Fraction:
        return frac1(sum(Fraction(e * x, f) for e, x, f in zip(self.exponents, g, self.group.factors)))

    def __call__(self, g: Element) -> complex:
        return phase(self.exponent(g))


def characters(G: AbelianGroup) -> List[Character]:
    return [Character(G, e) for e in G.elements()]


# --- pairings ---------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricPairing:
    """<g,h> = exp(2 pi i sum_ij q_ij g_i h_j) with q symmetric."""

    group: AbelianGroup
    q: Tuple[Tuple[Fraction, ...], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        k = self.group.rank
        q = tuple(tuple(frac1(self.q[i][j]) for j in range(k)) for i in range(k))
        object.__setattr__(self, "q", q)
        fs = self.group.factors
        for i in range(k):
            for j in range(k):
                if q[i][j] != q[j][i]:
                    raise ValueError("pairing matrix is not symmetric")
                if frac1(fs[i] * q[i][j]) != 0:
                    raise ValueError("pairing is not well defined on residues")

    def exponent(self, g: Element, h: Element) -> Fraction:
        k = self.group.rank
        return frac1(sum(self.q[i][j] * g[i] * h[j] for i in range(k) for j in range(k)))

    def value(self, g: Element, h: Element) -> complex:
        return phase(self.exponent(g, h))

    def is_nondegenerate(self) -> bool:
        G = self.group
        elems = G.elements()
        z = G.zero()
        for g in elems:
            if g != z and all(self.exponent(g, h) == 0 for h in elems):
                return False
        return True

    def transform(self, phi: "Automorphism") -> "SymmetricPairing":
        """Pull back along phi: <g,h>' = <phi g, phi h>."""
        imgs = phi.images
        k = self.group.rank
        q = [[self.exponent(imgs[i], imgs[j]) for j in range(k)] for i in range(k)]
        return SymmetricPairing(self.group, tuple(map(tuple, q)), self.label)

    def key(self):
        return self.q


def pairing_for_cyclic(n: int, m: int) -> SymmetricPairing:
    if math.gcd(m, n) != 1:
        raise ValueError(f"gcd({m},{n}) != 1: pairing is degenerate")
    return SymmetricPairing(cyclic(n), ((Fraction(m, n),),), label=f"m={m % n if n > 1 else m}")


def pairing_diagonal(G: AbelianGroup, ms: Sequence[int]) -> SymmetricPairing:
    """Diagonal pairing prod_i exp(2 pi i m_i g_i h_i / n_i)."""
    k = G.rank
    q = tuple(tuple(Fraction(ms[i], G.factors[i]) if i == j else Fraction(0) for j in range(k)) for i in range(k))
    p = SymmetricPairing(G, q, label="m=" + ",".join(str(m) for m in ms))
    if not p.is_nondegenerate():
        raise ValueError("degenerate pairing")
    return p


def pairing_from_parameter(G: AbelianGroup, m) -> SymmetricPairing:
    """Cyclic groups take an integer m; two-factor groups follow the convention
    exp(2 pi i g'h'/n') exp(2 pi i m g''h''/n'')."""
    if G.rank == 1:
        return pairing_for_cyclic(G.factors[0], int(m))
    if isinstance(m, (list, tuple)):
        return pairing_diagonal(G, m)
    return pairing_diagonal(G, [1] * (G.rank - 1) + [int(m)])


def all_pairings(G: AbelianGroup) -> List[SymmetricPairing]:
    """Every nondegenerate symmetric pairing on G."""
    k = G.rank
    fs = G.factors
    slots = [(i, j) for i in range(k) for j in range(i, k)]
    ranges = [range(math.gcd(fs[i], fs[j])) for i, j in slots]
    out = []
    for vals in itertools.product(*ranges):
        q = [[Fraction(0)] * k for _ in range(k)]
        for (i, j), v in zip(slots, vals):
            q[i][j] = q[j][i] = Fraction(v, math.gcd(fs[i], fs[j]))
        p = SymmetricPairing(G, tuple(map(tuple, q)))
        if p.is_nondegenerate():
            out.append(p)
    return out


# --- automorphisms ----------------------------------------------------------

@dataclass(frozen=True)
class Automorphism:
    group: AbelianGroup
    images: Tuple[Element, ...]

    def __call__(self, g: Element) -> Element:
        G = self.group
        out = G.zero()
        for x, img in zip(g, self.images):
            out = G.add(out, G.scale(x, img))
        return out


def automorphisms(G: AbelianGroup, bound: int = AUT_BOUND) -> List[Automorphism]:
    """All automorphisms, found by choosing generator images one at a time."""
    if G.order > bound:
        raise ValueError(f"|G|={G.order} exceeds automorphism bound {bound}")
    elems = G.elements()
    fs = G.factors
    out: List[Automorphism] = []

    def span(imgs):
        seen = {G.zero()}
        frontier = [G.zero()]
        while frontier:
            g = frontier.pop()
            for s in imgs:
                h = G.add(g, s)
                if h not in seen:
                    seen.add(h)
                    frontier.append(h)
        return len(seen)

    def rec(imgs):
        i = len(imgs)
        if i == G.rank:
            out.append(Automorphism(G, tuple(imgs)))
            return
        for x in elems:
            if fs[i] % G.element_order(x):
                continue
            new = imgs + [x]
            if span(new) == math.prod(fs[: i + 1]):
                rec(new)

    rec([])
    return out


def product_pairings(G: AbelianGroup) -> List[SymmetricPairing]:
    """Pairings of product form: standard on every factor but the last, which
    carries exp(2 pi i m gh/n_last) with m a unit."""
    last = G.factors[-1] if G.rank else 1
    out = []
    for m in range(1, max(last, 2)):
        if math.gcd(m, last) == 1 or last == 1:
            out.append(pairing_from_parameter(G, m) if G.rank else SymmetricPairing(G, ()))
        if last == 1:
            break
    return out


PAIRING_FAMILIES = ("product", "all")


def pairing_orbit_representatives(G: AbelianGroup, family: str = "all") -> List[SymmetricPairing]:
    """One nondegenerate pairing per Aut(G)-orbit, smallest key first.

    family="product" only keeps orbits that meet a product-form pairing.
    """
    if family not in PAIRING_FAMILIES:
        raise ValueError(f"unknown pairing family {family!r}")
    auts = automorphisms(G)
    reps: List[SymmetricPairing] = []
    seen = set()
    pool = all_pairings(G) if family == "all" else product_pairings(G)
    for p in sorted(pool, key=_pairing_sort_key):
        if p.key() in seen:
            continue
        for phi in auts:
            seen.add(p.transform(phi).key())
        reps.append(p)
    return reps


def _pairing_sort_key(p: SymmetricPairing):
    # diagonal pairings first so cyclic groups start at m=1
    k = p.group.rank
    off = sum(1 for i in range(k) for j in range(k) if i != j and p.q[i][j] != 0)
    flat = [p.q[i][j] * p.group.factors[i] for i in range(k) for j in range(k)]
    return (off, [(x if x else 10**6) for x in flat])


# --- quadratic refinements, epsilon, quadratic forms -----------------------

def quadratic_refinements(p: SymmetricPairing) -> List[Dict[Element, Fraction]]:
    """All A: G -> Q/Z with A(0)=0, A(-g)=A(g), A(g+h) + B(g,h) = A(g) + A(h),
    where <g,h> = exp(2 pi i B(g,h)).  These are the exponents of the
    solutions a(g) = exp(2 pi i A(g))."""
    G = p.group
    fs = G.factors
    k = G.rank
    elems = G.elements()
    choices = []
    for i in range(k):
        base = Fraction(fs[i] * (fs[i] - 1), 2) * p.q[i][i]
        choices.append([frac1((base + t) / fs[i]) for t in range(fs[i])])
    out = []
    for xs in itertools.product(*choices):
        A = {}
        for g in elems:
            v = sum(g[i] * xs[i] - Fraction(g[i] * (g[i] - 1), 2) * p.q[i][i] for i in range(k))
            v -= sum(g[i] * g[j] * p.q[i][j] for i in range(k) for j in range(i + 1, k))
            A[g] = frac1(v)
        if _is_refinement(p, A):
            out.append(A)
    return out


def _is_refinement(p: SymmetricPairing, A: Dict[Element, Fraction]) -> bool:
    G = p.group
    elems = G.elements()
    if A[G.zero()] != 0:
        return False
    for g in elems:
        if A[G.neg(g)] != A[g]:
            return False
        for h in elems:
            if frac1(A[G.add(g, h)] + p.exponent(g, h) - A[g] - A[h]) != 0:
                return False
    return True


def epsilon_function(p: SymmetricPairing) -> Callable[[Element], complex]:
    """The function with eps(g+h) = conj<g,h> eps(g) eps(h) and eps(-g) = eps(g)."""
    table = epsilon_exponents(p)
    return lambda g: phase(table[tuple(g)])


def epsilon_exponents(p: SymmetricPairing) -> Dict[Element, Fraction]:
    G = p.group
    n = G.order
    if n % 2 == 1:
        return {g: frac1(p.exponent(g, g) * ((n - 1) // 2)) for g in G.elements()}
    diag = all(p.q[i][j] == 0 for i in range(G.rank) for j in range(G.rank) if i != j)
    if diag:
        # per factor: exp(-m pi i g^2 / (2k)) on Z_{2k}, <g,g>^((n_i-1)/2) on odd Z_{n_i}
        def val(g):
            t = Fraction(0)
            for i, f in enumerate(G.factors):
                qi = p.q[i][i]
                if f % 2:
                    t += qi * g[i] * g[i] * ((f - 1) // 2)
                else:
                    t -= qi * g[i] * g[i] / 2
            return frac1(t)
        table = {g: val(g) for g in G.elements()}
        if _is_refinement(p, table):
            return table
    return quadratic_refinements(p)[0]


@dataclass(frozen=True)
class QuadraticForm:
    group: AbelianGroup
    values: Tuple[Fraction, ...]  # indexed like group.elements()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(frac1(v) for v in self.values))
        G = self.group
        for g in G.elements():
            if self(g) != self(G.neg(g)):
                raise ValueError("Q(-g) != Q(g)")

    def __call__(self, g: Element) -> Fraction:
        return self.values[self.group.index(g)]

    def pairing_exponent(self, g: Element, h: Element) -> Fraction:
        G = self.group
        return frac1(self(G.add(g, h)) - self(g) - self(h))

    def pairing_value(self, g: Element, h: Element) -> complex:
        return phase(self.pairing_exponent(g, h))

    def is_nondegenerate(self) -> bool:
        G = self.group
        elems = G.elements()
        return all(
            g == G.zero() or any(self.pairing_exponent(g, h) != 0 for h in elems) for g in elems
        )


def quadratic_form_cyclic(n: int, m: int) -> QuadraticForm:
    G = cyclic(n)
    return QuadraticForm(G, tuple(Fraction(m * g * g, n) for (g,) in G.elements()), label=f"{m}g^2/{n}")


def quadratic_form_diagonal(G: AbelianGroup, ms: Sequence[int]) -> QuadraticForm:
    vals = tuple(sum(Fraction(m * x * x, f) for m, x, f in zip(ms, g, G.factors)) for g in G.elements())
    return QuadraticForm(G, vals, label="+".join(f"{m}g{i}^2/{f}" for i, (m, f) in enumerate(zip(ms, G.factors))))


def quadratic_form_of_pairing(p: SymmetricPairing) -> QuadraticForm:
    """For odd |G| the form Q(g) with exp(2 pi i Q(g)) = <g,g>."""
    G = p.group
    if G.order % 2 == 0:
        raise ValueError("only defined here for odd order groups")
    return QuadraticForm(G, tuple(p.exponent(g, g) for g in G.elements()), label=p.label)


def gauss_sum(Q: QuadraticForm, a: int = 1) -> complex:
    G = Q.group
    total = sum(phase(a * Q(g)) for g in G.elements())
    return total / math.sqrt(G.order)


def jacobi_symbol(a: int, b: int) -> int:
    if b < 1 or b % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    if b == 1:
        return 1
    return int(_sympy_jacobi(a % b, b))
