"""Small finite fields with log/antilog tables, and the permutation x -> 1/(1-x)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import Poly, isprime, symbols

MAX_ORDER = 2 ** 16

_X = symbols("x")


def _poly_int(coeffs: Tuple[int, ...], p: int) -> int:
    return sum(c * p ** i for i, c in enumerate(coeffs))


def _int_poly(v: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        v, r = divmod(v, p)
        out.append(r)
    return out


def lowest_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Monic irreducible of degree k over F_p whose low coefficients
    (c_0, ..., c_{k-1}), read as a base-p integer, are smallest."""
    if k == 1:
        return (0, 1)
    for v in range(p ** k):
        low = _int_poly(v, p, k)
        if low[0] == 0:
            continue
        coeffs = low + [1]
        if Poly(list(reversed(coeffs)), _X, modulus=p).is_irreducible:
            return tuple(coeffs)
    raise ArithmeticError(f"no irreducible polynomial of degree {k} over F_{p}")


@dataclass
class FiniteField:
    """F_q with q = p^k.  Elements are ints 0..q-1 encoding the coefficient
    vector of a polynomial in base p (constant term lowest)."""
    p: int
    k: int
    modulus: Tuple[int, ...]
    generator: int = 0
    exp: List[int] = field(default_factory=list, repr=False)
    log: Dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def name(self) -> str:
        return f"GF({self.q})"

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # additive structure is componentwise mod p
    def add(self, x: int, y: int) -> int:
        a, b = _int_poly(x, self.p, self.k), _int_poly(y, self.p, self.k)
        return _poly_int(tuple((u + v) % self.p for u, v in zip(a, b)), self.p)

    def neg(self, x: int) -> int:
        return _poly_int(tuple((-u) % self.p for u in _int_poly(x, self.p, self.k)), self.p)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def _mul_slow(self, x: int, y: int) -> int:
        p, k = self.p, self.k
        a, b = _int_poly(x, p, k), _int_poly(y, p, k)
        prod = [0] * (2 * k - 1)
        for i, u in enumerate(a):
            if u:
                for j, v in enumerate(b):
                    prod[i + j] = (prod[i + j] + u * v) % p
        m = self.modulus
        for d in range(len(prod) - 1, k - 1, -1):
            c = prod[d]
            if c:
                for i in range(k + 1):
                    prod[d - k + i] = (prod[d - k + i] - c * m[i]) % p
        return _poly_int(tuple(prod[:k]), p)

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self.exp[(self.log[x] + self.log[y]) % (self.q - 1)]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(-self.log[x]) % (self.q - 1)]

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def power(self, x: int, e: int) -> int:
        if x == 0:
            return 0 if e > 0 else 1
        return self.exp[(self.log[x] * e) % (self.q - 1)]

    def frobenius(self, x: int) -> int:
        return self.power(x, self.p)

    def trace(self, x: int) -> int:
        """Absolute trace to F_p, returned as an int in [0, p)."""
        t, y = 0, x
        for _ in range(self.k):
            t = self.add(t, y)
            y = self.frobenius(y)
        return t

    def element_order(self, x: int) -> int:
        return (self.q - 1) // math.gcd(self.log[x], self.q - 1)

    def primitive_elements(self) -> List[int]:
        return [self.exp[e] for e in range(1, self.q) if math.gcd(e, self.q - 1) == 1] if self.q > 2 else [1]

    def format(self, x: int) -> str:
        if self.k == 1:
            return str(x)
        terms = []
        for i, c in enumerate(_int_poly(x, self.p, self.k)):
            if c:
                mono = "1" if i == 0 else ("a" if i == 1 else f"a^{i}")
                terms.append(mono if c == 1 or i == 0 and c == 1 else f"{c}{mono if i else ''}")
        return "+".join(reversed(terms)) or "0"


def build_field(p: int, k: int = 1) -> FiniteField:
    """F_{p^k} on the lowest irreducible modulus, with the smallest
    multiplicative generator and its log tables."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1 or p ** k > MAX_ORDER:
        raise ValueError(f"field order {p}^{k} outside 2..{MAX_ORDER}")
    F = FiniteField(p, k, lowest_irreducible(p, k))
    q = F.q
    if q == 2:
        F.generator, F.exp, F.log = 1, [1], {1: 0}
        return F
    for g in range(2 if k == 1 else p, q):
        powers = [1]
        x = g
        while x != 1:
            powers.append(x)
            x = F._mul_slow(x, g)
        if len(powers) == q - 1:
            F.generator = g
            F.exp = powers
            F.log = {v: i for i, v in enumerate(powers)}
            return F
    raise ArithmeticError("multiplicative group not cyclic; modulus is not irreducible")


def field_of_order(q: int) -> FiniteField:
    for p in range(2, q + 1):
        if q % p == 0:
            k = round(math.log(q, p))
            if p ** k != q or not isprime(p):
                raise ValueError(f"{q} is not a prime power")
            return build_field(p, k)
    raise ValueError(f"{q} is not a prime power")


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


# --- sigma -------------------------------------------------------------------

def domain(F: FiniteField) -> List[int]:
    """F minus {0, 1}: the labels of the nontrivial characters."""
    return [x for x in F.elements() if x not in (0, 1)]


def sigma(F: FiniteField, x: int) -> int:
    if x in (0, 1):
        raise ValueError("sigma is defined on F minus {0, 1}")
    return F.inv(F.sub(1, x))


def sigma_map(F: FiniteField) -> Dict[int, int]:
    return {x: sigma(F, x) for x in domain(F)}


def cycles(perm: Dict[int, int]) -> List[Tuple[int, ...]]:
    seen, out = set(), []
    for x in sorted(perm):
        if x in seen:
            continue
        cyc = [x]
        seen.add(x)
        y = perm[x]
        while y != x:
            cyc.append(y)
            seen.add(y)
            y = perm[y]
        out.append(tuple(cyc))
    return out


def cycle_type(perm: Dict[int, int]) -> List[int]:
    return sorted((len(c) for c in cycles(perm)), reverse=True)


def fixed_points(F: FiniteField) -> List[int]:
    return [x for x, y in sigma_map(F).items() if x == y]


@dataclass
class SigmaReport:
    ok: bool
    checked: int
    counterexample: Optional[Tuple[str, Tuple[int, ...]]] = None


def verify_sigma_identities(F: FiniteField) -> SigmaReport:
    """sigma(1/a) = 1/sigma^-1(a), sigma^3 = id, and
    sigma(sigma(a)/sigma(b)) = sigma^2(a) sigma(b/a) for a != b."""
    s = sigma_map(F)
    sinv = {v: k for k, v in s.items()}
    checked = 0
    for a in s:
        checked += 2
        if s[F.inv(a)] != F.inv(sinv[a]):
            return SigmaReport(False, checked, ("inverse", (a,)))
        if s[s[s[a]]] != a:
            return SigmaReport(False, checked, ("order", (a,)))
    for a in s:
        for b in s:
            if a == b:
                continue
            checked += 1
            lhs = s[F.div(s[a], s[b])]
            rhs = F.mul(s[s[a]], s[F.div(b, a)])
            if lhs != rhs:
                return SigmaReport(False, checked, ("composite", (a, b)))
    return SigmaReport(True, checked)


# --- labels by discrete log ---------------------------------------------------

def log_labels(F: FiniteField, g: Optional[int] = None) -> Dict[int, int]:
    """x -> k with x = g^k, identifying F^x with Z_{q-1} (1 <-> 0)."""
    g = F.generator if g is None else g
    out, x = {}, 1
    for e in range(F.q - 1):
        out[x] = e
        x = F.mul(x, g)
    if len(out) != F.q - 1:
        raise ValueError(f"{g} does not generate the multiplicative group")
    return out


def sigma_on_labels(F: FiniteField, g: Optional[int] = None) -> Dict[int, int]:
    lab = log_labels(F, g)
    return {lab[x]: lab[y] for x, y in sigma_map(F).items()}


LABEL_DIGITS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def parse_cycles(text: str) -> Dict[int, int]:
    """'(142)(365)' -> permutation; digits above 9 are A=10, B=11, ..."""
    perm: Dict[int, int] = {}
    for chunk in text.replace(" ", "").split(")"):
        chunk = chunk.lstrip("(")
        if not chunk:
            continue
        vals = [LABEL_DIGITS.index(ch) for ch in chunk]
        for i, v in enumerate(vals):
            perm[v] = vals[(i + 1) % len(vals)]
    return perm


def format_cycles(perm: Dict[int, int], labels: bool = True) -> str:
    parts = []
    for c in cycles(perm):
        if len(c) == 1:
            continue
        if labels:
            parts.append("(" + "".join(LABEL_DIGITS[v] for v in c) + ")")
        else:
            parts.append("(" + " ".join(str(v) for v in c) + ")")
    return "".join(parts) or "(1)"


def generators_matching(F: FiniteField, printed: str) -> List[int]:
    """Generators g for which sigma, written in g-log labels, is the printed
    permutation (points not mentioned are fixed)."""
    target = parse_cycles(printed)
    out = []
    for g in F.primitive_elements():
        perm = sigma_on_labels(F, g)
        if all(perm[k] == target.get(k, k) for k in perm):
            out.append(g)
    return out


# --- characters ---------------------------------------------------------------

@dataclass(frozen=True)
class AdditiveCharacter:
    """psi_a(x) = exp(2 pi i Tr(a x) / p)."""
    field: FiniteField = field(repr=False, hash=False, compare=False)
    a: int

    def __call__(self, x: int) -> complex:
        t = self.field.trace(self.field.mul(self.a, x))
        return cmath.exp(2j * math.pi * t / self.field.p)

    def exponent(self, x: int) -> Tuple[int, int]:
        """psi(x) = exp(2 pi i num/den) as (num, den)."""
        return self.field.trace(self.field.mul(self.a, x)), self.field.p


def additive_characters(F: FiniteField) -> List[AdditiveCharacter]:
    return [AdditiveCharacter(F, a) for a in F.elements()]
