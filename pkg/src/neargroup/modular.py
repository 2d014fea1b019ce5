"""Modular data: containers, the axiom checks, Verlinde fusion, matching, and
the closed-form families (quadratic-form data and the first-class doubles)."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .fields import (
    FiniteField,
    additive_characters,
    domain,
    log_labels,
    sigma_map,
)
from .groups import (
    AbelianGroup,
    QuadraticForm,
    frac1,
    gauss_sum,
    jacobi_symbol,
    phase,
)

Label = Tuple[str, tuple]

UNITARY_TOL = 1e-9
AXIOM_TOL = 1e-8
INTEGRAL_TOL = 1e-6
T_ORDER_CAP = 10 ** 4


def label_str(lab: Label) -> str:
    fam, p = lab
    if not p:
        return fam
    inner = ",".join(_fmt_param(x) for x in p)
    return f"{fam}[{inner}]"


def _fmt_param(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(str(v) for v in x) + ")" if len(x) != 1 else str(x[0])
    return str(x)


@dataclass
class ModularData:
    labels: List[Label]
    S: np.ndarray
    T: np.ndarray
    identity: int = 0
    name: str = ""
    expected_lambda: Optional[float] = None
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=complex)
        self.T = np.asarray(self.T, dtype=complex)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, family: str, params: tuple = ()) -> int:
        return self.labels.index((family, tuple(params)))

    def dims(self) -> np.ndarray:
        return (self.S[:, self.identity] / self.S[self.identity, self.identity]).real

    def global_dimension(self) -> float:
        return float(1 / abs(self.S[self.identity, self.identity]) ** 2)

    def family_indices(self, family: str) -> List[int]:
        return [i for i, (f, _) in enumerate(self.labels) if f == family]

    def to_json(self) -> dict:
        def cx(z):
            return {"re": float(z.real), "im": float(z.imag)}
        return {
            "name": self.name,
            "labels": [{"family": f, "params": _jsonable(p)} for f, p in self.labels],
            "identity": self.identity,
            "T": [cx(t) for t in self.T],
            "S": [[cx(z) for z in row] for row in self.S],
            "lambda": self.expected_lambda,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModularData":
        labels = [(d["family"], _tupled(d["params"])) for d in data["labels"]]
        T = np.array([complex(t["re"], t["im"]) for t in data["T"]])
        S = np.array([[complex(z["re"], z["im"]) for z in row] for row in data["S"]])
        return cls(labels, S, T, data.get("identity", 0), data.get("name", ""), data.get("lambda"))


def _jsonable(p):
    if isinstance(p, tuple):
        return [_jsonable(x) for x in p]
    return p


def _tupled(p):
    if isinstance(p, list):
        return tuple(_tupled(x) for x in p)
    return p


# --- axioms -------------------------------------------------------------------

@dataclass
class FusionTensor:
    N: np.ndarray
    max_error: float
    min_value: int

    @property
    def integral(self) -> bool:
        return self.max_error < INTEGRAL_TOL and self.min_value >= 0


def verlinde(md: ModularData) -> FusionTensor:
    """N[a,b,c] = sum_d S_ad S_bd S_cd / S_0d."""
    S = md.S
    s0 = S[md.identity]
    n = md.size
    raw = np.empty((n, n, n), dtype=complex)
    for a in range(n):
        raw[a] = (S * (S[a] / s0)) @ S.T
    R = np.rint(raw.real)
    err = float(np.max(np.abs(raw - R))) if n else 0.0
    return FusionTensor(R.astype(np.int64), err, int(R.min()) if n else 0)


def t_order(T: np.ndarray, cap: int = T_ORDER_CAP, tol: float = 1e-9) -> Optional[int]:
    """Smallest N <= cap with T^N = 1, or None."""
    order = 1
    for t in T:
        if abs(abs(t) - 1) > tol:
            return None
        x = Fraction(cmath.phase(t) / (2 * math.pi)).limit_denominator(cap)
        if abs(cmath.exp(2j * math.pi * float(x)) - t) > tol:
            return None
        order = order * x.denominator // math.gcd(order, x.denominator)
        if order > cap:
            return None
    return order


def charge_conjugation(md: ModularData, tol: float = AXIOM_TOL) -> Optional[List[int]]:
    C = md.S @ md.S
    perm = []
    for i in range(md.size):
        j = int(np.argmax(np.abs(C[i])))
        if abs(C[i, j] - 1) > tol:
            return None
        rest = np.abs(C[i]).copy()
        rest[j] = 0
        if rest.max() > tol:
            return None
        perm.append(j)
    if sorted(perm) != list(range(md.size)):
        return None
    return perm


@dataclass
class AxiomReport:
    checks: Dict[str, Tuple[bool, float]]
    t_order: Optional[int] = None
    conjugation: Optional[List[int]] = None

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [k for k, v in self.checks.items() if not v[0]]

    def residual(self, key: str) -> float:
        return self.checks[key][1]

    def summary(self) -> str:
        parts = [f"{k}={'ok' if ok else 'FAIL'}({v:.1e})" for k, (ok, v) in self.checks.items()]
        return " ".join(parts)


def verify_axioms(md: ModularData, tol: float = AXIOM_TOL, fusion: bool = True) -> AxiomReport:
    S, T = md.S, md.T
    n = md.size
    I = np.eye(n)
    checks: Dict[str, Tuple[bool, float]] = {}

    u = float(np.max(np.abs(S @ S.conj().T - I)))
    checks["unitary"] = (u < UNITARY_TOL, u)
    sy = float(np.max(np.abs(S - S.T)))
    checks["symmetric"] = (sy < tol, sy)

    C = S @ S
    perm = charge_conjugation(md, tol)
    if perm is None:
        checks["S^2 permutation"] = (False, float(np.max(np.abs(np.abs(C) - np.round(np.abs(C))))))
    else:
        P = np.zeros((n, n))
        P[range(n), perm] = 1
        r = float(np.max(np.abs(P @ P - I)))
        checks["S^2 permutation"] = (r < tol, float(np.max(np.abs(C - P))))
        checks["C^2=1"] = (r < tol, r)

    ST = S * T[None, :]
    st3 = ST @ ST @ ST
    r = float(np.max(np.abs(st3 - C)))
    checks["(ST)^3=S^2"] = (r < tol, r)

    order = t_order(T)
    checks["T finite order"] = (order is not None, float(order or -1))

    col = S[:, md.identity]
    pos = float(np.min(col.real))
    imag = float(np.max(np.abs(col.imag)))
    checks["S_a0>0"] = (pos > 0 and imag < tol, pos)

    if md.expected_lambda is not None:
        # the double of a category of global dimension lambda has S_00 = 1/lambda
        d = abs(1 / abs(S[md.identity, md.identity]) - md.expected_lambda)
        checks["1/S_00 = lambda"] = (d < 1e-6, d)

    if fusion:
        ft = verlinde(md)
        checks["Verlinde integral"] = (ft.max_error < INTEGRAL_TOL, ft.max_error)
        checks["Verlinde nonnegative"] = (ft.min_value >= 0, float(ft.min_value))
    return AxiomReport(checks, order, perm)


# --- matching -----------------------------------------------------------------

def _signature(md: ModularData, i: int, digits: int = 6):
    t = round((cmath.phase(md.T[i]) / (2 * math.pi)) % 1.0, digits) % 1.0
    row = tuple(sorted(np.round(np.abs(md.S[i]), digits)))
    return (t, row)


def match_md(md1: ModularData, md2: ModularData, tol: float = 1e-6) -> Optional[List[int]]:
    """A bijection pi (md1 label i -> md2 label pi[i]) with equal T values and
    S1[i,j] = S2[pi i, pi j] within tol, identity to identity; None if none."""
    n = md1.size
    if md2.size != n:
        return None
    sig2: Dict = {}
    for j in range(n):
        sig2.setdefault(_signature(md2, j), []).append(j)
    cands: List[List[int]] = []
    for i in range(n):
        c = sig2.get(_signature(md1, i), [])
        c = [j for j in c if abs(md1.T[i] - md2.T[j]) < tol]
        if not c:
            return None
        cands.append(c)
    if md2.identity not in cands[md1.identity]:
        return None
    cands[md1.identity] = [md2.identity]
    order = sorted(range(n), key=lambda i: (i != md1.identity, len(cands[i])))
    pi = [-1] * n
    used = [False] * n
    S1, S2 = md1.S, md2.S

    def place(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        done = order[:k]
        imgs = [pi[x] for x in done]
        for j in cands[i]:
            if used[j]:
                continue
            if abs(S1[i, i] - S2[j, j]) > tol:
                continue
            if done and np.max(np.abs(S1[i, done] - S2[j, imgs])) > tol:
                continue
            pi[i], used[j] = j, True
            if place(k + 1):
                return True
            pi[i], used[j] = -1, False
        return False

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        found = place(0)
    finally:
        sys.setrecursionlimit(limit)
    return list(pi) if found else None


# --- point data and the quadratic-form family ----------------------------------

def md_point(Q: QuadraticForm, alpha: int = 1, beta: Optional[complex] = None) -> ModularData:
    """S = alpha/sqrt|G| conj<g,h>_Q, T = beta exp(2 pi i Q(g)).  beta defaults
    to the cube root of conj(alpha * alpha_Q(1)) that makes (ST)^3 = S^2."""
    G = Q.group
    els = G.elements()
    n = G.order
    if beta is None:
        beta = cmath.exp(-1j * cmath.phase(alpha * gauss_sum(Q, 1)) / 3)
    S = np.array([[alpha / math.sqrt(n) * np.conj(Q.pairing_value(g, h)) for h in els] for g in els])
    T = np.array([beta * phase(Q(g)) for g in els])
    return ModularData([("a", g) for g in els], S, T, 0, f"point {Q.label}", math.sqrt(n))


def delta_second(n: int, sign: int = 1) -> float:
    return (n + sign * math.sqrt(n * n + 4 * n)) / 2


def gamma_classes(Gp: AbelianGroup) -> List[tuple]:
    """One representative of each {gamma, -gamma}, gamma != 0 (index order)."""
    out, seen = [], set()
    for g in Gp.elements():
        if g == Gp.zero() or g in seen:
            continue
        seen.add(g)
        seen.add(Gp.neg(g))
        out.append(g)
    return out


def qq_labels(G: AbelianGroup, Gp: AbelianGroup) -> List[Label]:
    els = G.elements()
    labs: List[Label] = [("a", g) for g in els] + [("b", g) for g in els]
    labs += [("c", (k, l)) for i, k in enumerate(els) for l in els[i + 1:]]
    labs += [("d", (m, gam)) for m in els for gam in gamma_classes(Gp)]
    return labs


def md_qq(Q: QuadraticForm, Qp: QuadraticForm, root_sign: int = 1) -> ModularData:
    """The odd-order family built from forms on groups of orders n and n+4.

    root_sign = -1 uses the Galois conjugate of delta (for the Galois check).
    meta['gauss'] holds alpha_Q(1) alpha_Q'(1); the data is modular only when
    it is -1, but it is built either way.
    """
    G, Gp = Q.group, Qp.group
    n = G.order
    if n % 2 == 0 or Gp.order != n + 4:
        raise ValueError("need |G| odd and |G'| = |G| + 4")
    d = delta_second(n, root_sign)
    lam = 2 * n + n * d
    e = Fraction(n + 1, 2)
    ep = Fraction(n + 5, 2)

    def pe(g, h):                       # exponent of <g,h>
        return frac1(Q.pairing_exponent(g, h) * e)

    def pep(b, c):
        return frac1(Qp.pairing_exponent(b, c) * ep)

    def cj(x):                           # conj <.,.> as a value
        return phase(-x)

    labs = qq_labels(G, Gp)
    add = G.add
    N = len(labs)
    S = np.zeros((N, N), dtype=complex)
    T = np.zeros(N, dtype=complex)
    for i, (f, p) in enumerate(labs):
        if f in "ab":
            T[i] = phase(pe(p, p))
        elif f == "c":
            T[i] = phase(pe(*p))
        else:
            m, gam = p
            T[i] = phase(pe(m, m) + pep(gam, gam))
    for i, (f, p) in enumerate(labs):
        for j in range(i, N):
            f2, p2 = labs[j]
            key = f + f2
            if key == "aa" or key == "bb":
                v = cj(2 * pe(p, p2))
            elif key == "ab":
                v = (d + 1) * cj(2 * pe(p, p2))
            elif key in ("ac", "bc"):
                v = (d + 2) * cj(pe(p, add(*p2)))
            elif key == "ad":
                v = d * cj(2 * pe(p, p2[0]))
            elif key == "bd":
                v = -d * cj(2 * pe(p, p2[0]))
            elif key == "cc":
                (k, l), (k2, l2) = p, p2
                v = (d + 2) * (cj(pe(k, k2) + pe(l, l2)) + cj(pe(k, l2) + pe(l, k2)))
            elif key == "cd":
                v = 0
            else:                          # dd; both pairings enter squared, as in the other blocks
                (m, g1), (m2, g2) = p, p2
                x = 2 * pep(g1, g2)
                v = -d * cj(2 * pe(m, m2)) * (phase(x) + cj(x))
            S[i, j] = S[j, i] = v / lam
    gauss = gauss_sum(Q, 1) * gauss_sum(Qp, 1)
    md = ModularData(labs, S, T, 0, f"MD({G.name()},{Q.label};{Gp.name()},{Qp.label})", lam)
    md.meta.update(gauss=gauss, Q=Q, Qp=Qp, delta=d, gauss_ok=abs(gauss + 1) < 1e-10)
    return md


def fusion_closed_form(G: AbelianGroup, Gp: AbelianGroup) -> np.ndarray:
    """The explicit fusion list of the quadratic-form family, as a totally
    symmetric tensor on qq_labels(G, Gp)."""
    labs = qq_labels(G, Gp)
    z = G.zero()
    zp = Gp.zero()
    A, Ap, neg = G.add, Gp.add, Gp.neg

    def dl(*gs):
        t = z
        for g in gs:
            t = A(t, g)
        return 1 if t == z else 0

    def dlp(*gs):
        t = zp
        for g in gs:
            t = Ap(t, g)
        return 1 if t == zp else 0

    def same(b, c):
        return 1 if b == c or b == neg(c) else 0

    rank = {"a": 0, "b": 1, "c": 2, "d": 3}

    def rule(x, y, w) -> int:
        (f1, p1), (f2, p2), (f3, p3) = sorted((x, y, w), key=lambda t: rank[t[0]])
        key = f1 + f2 + f3
        if key in ("aaa", "abb", "bbb"):
            return dl(p1, p2, p3)
        if key == "bbd":
            return dl(p1, p2, p3[0])
        if key == "acc":
            g, (h, k), (h2, k2) = p1, p2, p3
            return dl(g, h, h2) * dl(g, k, k2) + dl(g, h, k2) * dl(g, h2, k)
        if key == "add":
            return dl(p1, p2[0], p3[0]) * same(p2[1], p3[1])
        if key == "bbc":
            g, h, (k, k2) = p1, p2, p3
            return dl(g, g, h, h, k, k2)
        if key == "bcd":
            g, (k, k2), (h, _) = p1, p2, p3
            return dl(g, g, h, h, k, k2)
        if key == "bcc":
            g, (h, k), (h2, k2) = p1, p2, p3
            return dl(g, g, h, k, h2, k2) + dl(g, h, h2) * dl(g, k, k2) + dl(g, h, k2) * dl(g, h2, k)
        if key == "bdd":
            return dl(p1, p2[0], p3[0]) * (1 - same(p2[1], p3[1]))
        if key == "ccd":
            (g, h), (g2, h2), (k, _) = p1, p2, p3
            return dl(g, h, g2, h2, k, k)
        if key == "cdd":
            (g, h), (k, _), (k2, _) = p1, p2, p3
            return dl(g, h, k, k, k2, k2)
        if key == "ccc":
            (g, h), (g2, h2), (g3, h3) = p1, p2, p3
            return dl(g, h, g2, h2, g3, h3) * (1 + dl(g, g2, g3) + dl(g, h2, g3) + dl(g, g2, h3) + dl(g, h2, h3))
        if key == "ddd":
            (g, c1), (g2, c2), (g3, c3) = p1, p2, p3
            return dl(g, g2, g3) * (1 - dlp(c1, c2, c3) - dlp(c1, neg(c2), c3)
                                    - dlp(c1, c2, neg(c3)) - dlp(c1, neg(c2), neg(c3)))
        return 0

    n = len(labs)
    N = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                v = rule(labs[i], labs[j], labs[k])
                if v:
                    for a, b, c in set(itertools.permutations((i, j, k))):
                        N[a, b, c] = v
    return N


# --- simple currents and Galois --------------------------------------------------

@dataclass
class CurrentReport:
    currents: List[int]
    action: Dict[int, List[int]]
    fixed_point_free: bool
    closed: bool
    mismatches: List[str]

    @property
    def ok(self) -> bool:
        return self.fixed_point_free and self.closed and not self.mismatches


def simple_currents(md: ModularData, N: Optional[np.ndarray] = None, tol: float = 1e-9) -> CurrentReport:
    """Primaries with S_a0 = S_00, their permutation action by fusion, and
    (for quadratic-form data) a comparison with the expected rules."""
    s0 = md.S[md.identity, md.identity]
    cur = [i for i in range(md.size) if abs(md.S[i, md.identity] - s0) < tol]
    if N is None:
        N = verlinde(md).N
    perm = charge_conjugation(md) or list(range(md.size))
    action: Dict[int, List[int]] = {}
    mismatches: List[str] = []
    for j in cur:
        img = []
        for x in range(md.size):
            ys = [y for y in range(md.size) if N[j, x, perm[y]] > 0]
            if len(ys) != 1 or N[j, x, perm[ys[0]]] != 1:
                mismatches.append(f"{label_str(md.labels[j])} * {label_str(md.labels[x])} not simple")
                ys = [x]
            img.append(ys[0])
        action[j] = img
    fpf = all(action[j][x] != x for j in cur if j != md.identity for x in range(md.size))
    # closure: products of currents are currents
    cset = set(cur)
    closed = all(action[j][k] in cset for j in cur for k in cur)
    if all(f in "abcd" for f, _ in md.labels) and "Q" in md.meta:
        G = md.meta["Q"].group
        idx = {lab: i for i, lab in enumerate(md.labels)}
        if sorted(cur) != sorted(idx[("a", g)] for g in G.elements()):
            mismatches.append("currents are not exactly the a_g")
        for g in G.elements():
            j = idx.get(("a", g))
            if j not in action:
                continue
            for x, (f, p) in enumerate(md.labels):
                if f in "ab":
                    want = (f, G.add(g, p))
                elif f == "c":
                    k, l = G.add(g, p[0]), G.add(g, p[1])
                    want = ("c", (k, l) if G.index(k) < G.index(l) else (l, k))
                else:
                    want = ("d", (G.add(g, p[0]), p[1]))
                if md.labels[action[j][x]] != want:
                    mismatches.append(f"a{g} * {label_str(md.labels[x])} gave {label_str(md.labels[action[j][x]])}")
    return CurrentReport(cur, action, fpf, closed, mismatches)


@dataclass
class GaloisReport:
    ell: int
    jacobi: int
    permutation: Optional[List[int]]
    parities: Optional[List[int]]
    mismatches: List[str]

    @property
    def ok(self) -> bool:
        return self.permutation is not None and not self.mismatches


def _scaled_form(Q: QuadraticForm, ell: int) -> QuadraticForm:
    return QuadraticForm(Q.group, tuple(frac1(v * ell) for v in Q.values), label=f"{ell}*({Q.label})")


def galois_check(Q: QuadraticForm, Qp: QuadraticForm, ell: int, tol: float = 1e-8) -> GaloisReport:
    """Apply the Galois automorphism zeta -> zeta^ell to S (roots of unity to
    the ell-th power, sqrt(n(n+4)) times the Jacobi symbol), read off the
    permutation and parities, and compare with the expected action."""
    G = Q.group
    n = G.order
    D = n * (n + 4)
    if math.gcd(ell, D) != 1:
        raise ValueError(f"ell={ell} not coprime to {D}")
    J = jacobi_symbol(ell, D)
    md = md_qq(Q, Qp)
    conj = md_qq(_scaled_form(Q, ell), _scaled_form(Qp, ell), root_sign=J)
    S, Sg = md.S, conj.S
    perm, par = [], []
    for a in range(md.size):
        hit = None
        for b in range(md.size):
            for eps in (1, -1):
                if np.max(np.abs(Sg[a] - eps * S[b])) < tol:
                    hit = (b, eps)
                    break
            if hit:
                break
        if hit is None:
            return GaloisReport(ell, J, None, None, [f"row {label_str(md.labels[a])} has no image"])
        perm.append(hit[0])
        par.append(hit[1])
    mism = []
    Gp = Qp.group
    reps = {}
    for c in gamma_classes(Gp):
        reps[c] = c
        reps[Gp.neg(c)] = c
    for a, (f, p) in enumerate(md.labels):
        if f == "a":
            want, eps = ("a" if J == 1 else "b", G.scale(ell, p)), 1
        elif f == "b":
            want, eps = ("b" if J == 1 else "a", G.scale(ell, p)), 1
        elif f == "c":
            k, l = G.scale(ell, p[0]), G.scale(ell, p[1])
            want, eps = ("c", (k, l) if G.index(k) < G.index(l) else (l, k)), 1
        else:
            want, eps = ("d", (G.scale(ell, p[0]), reps[Gp.scale(ell, p[1])])), J
        got = md.labels[perm[a]]
        if got != want or par[a] != eps:
            mism.append(f"{label_str(md.labels[a])}: got {label_str(got)} eps={par[a]}, "
                        f"expected {label_str(want)} eps={eps}")
    return GaloisReport(ell, J, perm, par, mism)


# --- first class: zeta equations --------------------------------------------------

@dataclass
class ZetaSystem:
    """Equations sum_v coef*theta_v = rhs (mod 1) for zeta_v = exp(2 pi i theta_v).
    Variable 0 is zeta_1; the others are the labels x in F minus {0,1}."""
    variables: List[int]
    rows: List[Dict[int, int]]
    rhs: List[Fraction]
    names: List[str]
    skipped: int = 0


def _e6(k: int) -> Fraction:
    return Fraction(k % 6, 6)


def zeta_system(sol) -> ZetaSystem:
    F: FiniteField = sol.field
    xs = domain(F)
    sg = sigma_map(F)
    sg2 = {x: sg[sg[x]] for x in xs}
    inv, mul, div, neg = F.inv, F.mul, F.div, F.neg
    a, b, bpp = sol.a, sol.b, sol.bpp
    S = sol.s_exp
    ONE = -1                              # variable key for zeta_1
    variables = [ONE] + xs
    rows: List[Dict[int, int]] = []
    rhs: List[Fraction] = []
    names: List[str] = []
    skipped = 0

    def eq(terms: Dict[int, int], r: Fraction, name: str):
        t = {k: v for k, v in terms.items() if v}
        rows.append(t)
        rhs.append(frac1(r))
        names.append(name)

    def acc(d, k, v):
        d[k] = d.get(k, 0) + v

    two = F.add(1, 1)
    if two in sg:
        eq({two: 1, ONE: 1}, Fraction(0), "zeta_2 = conj zeta_1")
    for x in xs:
        t: Dict[int, int] = {}
        acc(t, inv(x), 1)
        acc(t, ONE, -1)
        acc(t, x, 1)
        eq(t, _e6(S + a[x] + b[x]), f"inverse x={x}")
    for x in xs:
        if x == two:
            continue
        tgt = sg[neg(inv(sg[x]))]
        msx = neg(sg[x])
        if (x, sg2[x]) not in bpp or msx not in b:
            skipped += 1
            continue
        t = {}
        acc(t, tgt, 1)
        acc(t, ONE, -1)
        acc(t, x, -1)
        eq(t, _e6(-b[x] + b[msx] + bpp[(x, sg2[x])]), f"e' x={x}")
    sginv = {v: k for k, v in sg.items()}
    for w in xs:
        for z in xs:
            if z == inv(w) or z == sg2.get(neg(sg[w])):
                continue
            try:
                X = sginv[neg(div(sg[z], sg[w]))]
                Xp = sginv[mul(X, sg[z])]
                Y = sginv[inv(mul(sg2[z], sg[w]))]
                u = neg(div(sg[mul(w, z)], mul(sg[w], sg[z])))
                tgt = sg[u]
                coef = bpp[(X, Xp)] - bpp[(z, Y)] + bpp[(inv(sg2[z]), Y)]
            except KeyError:
                skipped += 1
                continue
            t = {}
            acc(t, tgt, 1)
            acc(t, w, -1)
            acc(t, z, -1)
            eq(t, _e6(coef), f"e''e'' w={w} z={z}")
    if F.q % 2 == 0:
        eq({ONE: 2}, _e6(S), "zeta_1^2 = s")
    return ZetaSystem(variables, rows, rhs, names, skipped)


@dataclass
class ZetaSolution:
    theta: Dict[int, Fraction]           # key -1 is zeta_1

    def zeta1(self) -> complex:
        return phase(self.theta[-1])

    def __call__(self, x: int) -> complex:
        return phase(self.theta[x])


def solve_zeta_system(sys_: ZetaSystem) -> List[ZetaSolution]:
    """All solutions in unit-modulus zetas, via the Smith form over Z.
    Raises when the system is inconsistent or leaves a continuous family."""
    var = sys_.variables
    col = {v: i for i, v in enumerate(var)}
    m, k = len(sys_.rows), len(var)
    if m == 0:
        raise ArithmeticError("no equations: zeta is not determined")
    A = Matrix.zeros(m, k)
    for r, row in enumerate(sys_.rows):
        for v, c in row.items():
            A[r, col[v]] += c
    D, U, V = smith_normal_decomp(A, domain=ZZ)
    den = math.lcm(*[q.denominator for q in sys_.rhs]) if sys_.rhs else 1
    r_int = Matrix([int(q * den) for q in sys_.rhs])
    Ur = U * r_int
    diag = [int(D[i, i]) for i in range(min(m, k))]
    rank = sum(1 for d in diag if d != 0)
    if rank < k:
        raise ArithmeticError(f"zeta equations have rank {rank} < {k}: continuous family")
    for i in range(rank, m):
        if Fraction(int(Ur[i]), den) % 1 != 0:
            raise ArithmeticError("zeta equations are inconsistent")
    choices = []
    for i in range(k):
        d = diag[i]
        base = Fraction(int(Ur[i]), den)
        choices.append([frac1((base + j) / d) for j in range(abs(d))])
    out = []
    for phis in itertools.product(*choices):
        theta = {}
        for vi, v in enumerate(var):
            theta[v] = frac1(sum(int(V[vi, c]) * phis[c] for c in range(k)))
        out.append(ZetaSolution(theta))
    return out


def check_zeta(sys_: ZetaSystem, z: ZetaSolution) -> float:
    worst = 0.0
    for row, r in zip(sys_.rows, sys_.rhs):
        t = frac1(sum(c * z.theta[v] for v, c in row.items()) - r)
        worst = max(worst, abs(phase(t) - 1))
    return worst


def solve_zeta(sol) -> List[ZetaSolution]:
    """All zeta vectors for a first-class solution in the commutative case
    (s = omega = 1, or n <= 3)."""
    if sol.n > 3 and (sol.s != 1 or sol.omega != 0):
        raise ValueError("zeta equations only describe the commutative case")
    return solve_zeta_system(zeta_system(sol))


def character_zeta(F: FiniteField, psi) -> ZetaSolution:
    """zeta_1 = psi(1), zeta_x = psi(sigma x) as exact exponents."""
    sg = sigma_map(F)

    def ex(x):
        num, den = psi.exponent(x)
        return Fraction(num, den)

    theta = {-1: ex(1)}
    theta.update({x: ex(sg[x]) for x in sg})
    return ZetaSolution(theta)


# --- first class: modular data ---------------------------------------------------

def _canonical_zeta_for(sol, zetas: Sequence[ZetaSolution]) -> Tuple[ZetaSolution, Dict]:
    """Pick one particular solution and attach to each additive character psi
    the vector zeta * psi(sigma .)."""
    F = sol.field
    part = zetas[0]
    fam = {}
    for psi in additive_characters(F):
        ch = character_zeta(F, psi)
        fam[psi.a] = ZetaSolution({k: frac1(part.theta[k] + ch.theta[k]) for k in part.theta})
    return part, fam


RHO_READINGS = ("paired", "printed")


def md_first_class(sol, zeta: Optional[ZetaSolution] = None, reading: str = "paired") -> ModularData:
    """Modular data of the double of a first-class solution.

    The rho-rho block pairs zeta_x with zeta at 1/sigma^2(x) (reading
    'paired'); 'printed' squares zeta_x instead.  The two agree whenever
    zeta_x = zeta_{1/sigma^2 x}, in particular for the all-ones tables.
    """
    F: FiniteField = sol.field
    q, n = F.q, F.q - 1
    lab = log_labels(F, sol.generator)
    Gels = list(range(n))
    labels: List[Label] = [("g", (g,)) for g in Gels] + [("Sigma", ())]
    labels += [("w", (k, h)) for k in range(1, n) for h in Gels]
    special = n == 7 and sol.s == -1
    if special:
        labels += [("rho", (1,)), ("rho", (-1,))]
    else:
        labels += [("rho", (psi,)) for psi in F.elements()]
    N = len(labels)

    def w(k, h):
        return cmath.exp(2j * math.pi * k * h / n)

    S = np.zeros((N, N), dtype=complex)
    T = np.ones(N, dtype=complex)
    idx = {l: i for i, l in enumerate(labels)}
    rho = [i for i, (f, _) in enumerate(labels) if f == "rho"]
    c = 2 if special else 1               # weight of the rho columns
    for i, (f, p) in enumerate(labels):
        for j, (f2, p2) in enumerate(labels):
            if f == "g" and f2 == "g":
                v = 1 / n
            elif {f, f2} == {"g", "Sigma"}:
                v = 1
            elif f == "g" and f2 == "w":
                v = w(p2[0], p[0]) * (n + 1) / n
            elif f == "w" and f2 == "g":
                v = w(p[0], p2[0]) * (n + 1) / n
            elif f == "Sigma" and f2 == "Sigma":
                v = n
            elif f == "w" and f2 == "w":
                v = (n + 1) / n * w(p2[0], p[1]) * w(p[0], p2[1])
            elif {f, f2} == {"g", "rho"}:
                v = c
            elif {f, f2} == {"Sigma", "rho"}:
                v = -c
            else:
                v = 0
            S[i, j] = v / (n + 1)
    for i, (f, p) in enumerate(labels):
        if f == "w":
            T[i] = np.conj(w(p[0], p[1]))
    if special:
        for i in rho:
            s1 = labels[i][1][0]
            T[i] = 1j * s1
            for j in rho:
                S[i, j] = -4 * s1 * labels[j][1][0] / 8
        md = ModularData(labels, S, T, 0, f"double of {sol.name}", float(n * n + n))
        return md
    if zeta is None:
        zetas = solve_zeta(sol)
        zeta = zetas[0]
    psis = {psi.a: psi for psi in additive_characters(F)}
    sg = sigma_map(F)
    partner = {x: F.inv(sg[sg[x]]) for x in sg}
    for i in rho:
        a1 = labels[i][1][0]
        T[i] = np.conj(zeta.zeta1() * psis[a1](1))
    for i in rho:
        psi = psis[labels[i][1][0]]
        for j in rho:
            psi2 = psis[labels[j][1][0]]
            tot = np.conj(zeta.zeta1() ** 2 * psi(1) * psi2(1))
            for x in sg:
                zz = zeta(x) * (zeta(partner[x]) if reading == "paired" else zeta(x))
                tot += np.conj(zz * psi(sg[x]) * psi2(F.inv(sg[x])))
            S[i, j] = tot / (n + 1)
    md = ModularData(labels, S, T, 0, f"double of {sol.name}", float(n * n + n))
    md.meta["zeta"] = zeta
    return md


# --- finite-group double oracle for Aff_1(F_q) ------------------------------------

def group_double(elements: Sequence, mul: Callable, inv: Callable,
                 classes: Sequence, class_chars: Callable) -> ModularData:
    """Modular data of the untwisted double of a finite group.

    classes: conjugacy class representatives.  class_chars(rep, centralizer)
    returns a list of (name, character function) for the irreps of the
    centralizer.  S_{(a,x),(b,y)} = (|C(a)| |C(b)|)^-1 sum over g with
    [a, g b g^-1] = 1 of conj x(g b g^-1) conj y(g^-1 a g).
    """
    els = list(elements)
    order = len(els)
    labels: List[Label] = []
    data = []
    for r in classes:
        cent = [g for g in els if mul(g, r) == mul(r, g)]
        for name, chi in class_chars(r, cent):
            labels.append(("pair", (r, name)))
            data.append((r, {g: chi(g) for g in cent}, len(cent)))
    N = len(labels)
    S = np.zeros((N, N), dtype=complex)
    T = np.zeros(N, dtype=complex)
    one = next(g for g in els if all(mul(g, h) == h for h in els[:3]))
    conjs = {(g, x): mul(mul(g, x), inv(g)) for g in els for x in set(classes)}
    ginv = {g: inv(g) for g in els}
    for i, (a, chi, ca) in enumerate(data):
        T[i] = chi[a] / chi[one]
        for j, (b, chi2, cb) in enumerate(data):
            tot = 0
            for g in els:
                bg = conjs[(g, b)]
                if bg not in chi:
                    continue
                ag = conjs[(ginv[g], a)]
                tot += np.conj(chi[bg]) * np.conj(chi2[ag])
            S[i, j] = tot / (ca * cb)
    return ModularData(labels, S, T, 0, "group double", float(order))


def aff1_double(F: FiniteField) -> ModularData:
    """The double of x -> lam x + t over F_q, built by brute force; the
    characters are linear characters of the centralizers, plus the one
    irrep of the whole group of degree q-1, obtained by induction."""
    q = F.q
    els = [(t, lam) for lam in F.nonzero() for t in F.elements()]

    def mul(g, h):
        return (F.add(F.mul(g[1], h[0]), g[0]), F.mul(g[1], h[1]))

    def inv(g):
        li = F.inv(g[1])
        return (F.neg(F.mul(li, g[0])), li)

    e = (0, 1)
    lab = log_labels(F)
    n = q - 1
    psis = additive_characters(F)
    # classes: identity, a translation, and one scaling per lam != 1
    classes = [e] + ([(1, 1)] if q > 1 else []) + [(0, lam) for lam in F.nonzero() if lam != 1]

    def mult_char(k):
        return lambda g: cmath.exp(2j * math.pi * k * lab[g[1]] / n)

    def chars(r, cent):
        if r == e:
            out = [(f"lin{k}", mult_char(k)) for k in range(n)]
            psi = psis[1]

            def ind(g, psi=psi):
                if g[1] != 1:
                    return 0
                return sum(psi(mul(mul(h, g), inv(h))[0]) for h in els) / q
            out.append(("ind", ind))
            return out
        if r[1] == 1:
            assert all(g[1] == 1 for g in cent)
            return [(f"psi{p.a}", (lambda g, p=p: p(g[0]))) for p in psis]
        assert all(g[0] == 0 for g in cent)
        return [(f"lin{k}", mult_char(k)) for k in range(n)]

    md = group_double(els, mul, inv, classes, chars)
    md.name = f"double of Aff1({F.name})"
    return md
