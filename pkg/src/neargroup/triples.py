"""Triples (omega, tau, xi) attached to a type G+n solution, and the modular
data of its double assembled from them."""

from __future__ import annotations

import math
from fractions import Fraction
import warnings
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import qmc

from .second_class import SecondClassInstance, SecondClassSolution
from .modular import Label, ModularData

TRIPLE_DEDUP = 1e-6
TRIPLE_ACCEPT = 1e-9


@dataclass
class Triple:
    omega: complex
    tau: int                 # index into the instance's element list
    xi: np.ndarray
    residual: float = float("nan")

    def key(self):
        return (self.tau, round(float(np.angle(self.omega)), 6))


class IncompleteTriples(UserWarning):
    pass


def expected_triples(n: int) -> int:
    return n * (n + 3) // 2


def triple_residuals(inst: SecondClassInstance, b: np.ndarray, omega: complex, tau: int,
                     xi: np.ndarray) -> np.ndarray:
    """Complex residuals of the four triple equations over all arguments."""
    n, d, c = inst.n, inst.delta, inst.c
    a, P, add, neg = inst.a, inst.P, inst.add, inst.neg
    sn = math.sqrt(n)
    K = omega ** 2 * c ** 3 * a[tau]
    r1 = np.array([xi.sum() - (sn * K - n / d)])
    Bm = b[add]                                          # Bm[g, k] = b(g + k)
    r2 = np.conj(c) * (Bm @ xi) - (K * np.conj(xi[add[:, tau]]) - sn / d)
    tm = add[tau][neg]                                   # tau - g
    r3 = xi[tm] - omega * c ** 4 * a * a[tm] * np.conj(xi)
    D = b[add[neg]]                                      # D[g, k] = b(k - g)
    lhs = (D * xi[None, :]) @ D.T                        # sum_k xi(k) b(k-g) b(k-h)
    gh = add                                             # g + h
    sub = add[:, neg]                                    # g - h
    rhs = c ** -2 * b[add[gh, neg[tau]]] * np.outer(xi, xi) * np.conj(a[sub]) - c ** 2 / d
    r4 = (lhs - rhs).ravel()
    return np.concatenate([r1, r2, r3, r4])


def _polish(inst, b, tau, p0, iters: int = 60) -> Tuple[complex, np.ndarray, float]:
    """Least squares on (arg omega, arg xi) over the full system."""
    n = inst.n

    def F(p):
        r = triple_residuals(inst, b, np.exp(1j * p[0]), tau, np.exp(1j * p[1:]))
        return np.concatenate([r.real, r.imag])

    sol = least_squares(F, p0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=iters * (n + 1))
    om = np.exp(1j * sol.x[0])
    x = np.exp(1j * sol.x[1:])
    res = float(np.max(np.abs(triple_residuals(inst, b, om, tau, x))))
    return om, x, res


def solve_triples(sol: SecondClassSolution, starts: int = 64, seed: int = 7,
                  tol: float = TRIPLE_ACCEPT, warn: bool = True) -> List[Triple]:
    """All triples for a solution.

    For each tau, `starts` scrambled Sobol points in the torus of
    (arg omega, arg xi) are polished by Levenberg-Marquardt on all four
    equations; roots below tol are kept and deduplicated.
    """
    inst = sol.instance
    b = sol.b
    n = inst.n
    found: List[Triple] = []
    sampler = qmc.Sobol(n + 1, scramble=True, seed=seed)
    pts = 2 * math.pi * sampler.random(max(starts, 1))
    for tau in range(n):
        for p0 in pts:
            om, xi, res = _polish(inst, b, tau, p0)
            if res > tol:
                continue
            if any(u.tau == tau and abs(u.omega - om) < TRIPLE_DEDUP
                   and np.max(np.abs(u.xi - xi)) < TRIPLE_DEDUP for u in found):
                continue
            found.append(Triple(om, tau, xi, res))
    found.sort(key=lambda t: (t.tau, float(np.angle(t.omega)) % (2 * math.pi)))
    want = expected_triples(n)
    if warn and len(found) != want:
        warnings.warn(f"found {len(found)} triples, expected {want}", IncompleteTriples)
    return found


def md_second_class(sol: SecondClassSolution, triples: List[Triple]) -> ModularData:
    """Block S and T of the double from the pairing, a, c and the triples."""
    inst = sol.instance
    n, d, c = inst.n, inst.delta, inst.c
    if len(triples) != expected_triples(n):
        raise ValueError(f"need {expected_triples(n)} triples, got {len(triples)}")
    P, a, add, neg = inst.P, inst.a, inst.add, inst.neg
    els = inst.elements
    lam = 2 * n + n * d
    labels: List[Label] = [("a", g) for g in els] + [("b", g) for g in els]
    labels += [("c", (els[k], els[l])) for k in range(n) for l in range(k + 1, n)]
    labels += [("d", (j,)) for j in range(len(triples))]
    cpairs = [(k, l) for k in range(n) for l in range(k + 1, n)]
    na = n
    nc = len(cpairs)
    N = len(labels)
    S = np.zeros((N, N), dtype=complex)
    T = np.zeros(N, dtype=complex)
    A_ = slice(0, na)
    B_ = slice(na, 2 * na)
    C_ = slice(2 * na, 2 * na + nc)
    D_ = slice(2 * na + nc, N)
    Pc2 = np.conj(P) ** 2
    S[A_, A_] = Pc2
    S[A_, B_] = (d + 1) * Pc2
    S[B_, A_] = (d + 1) * Pc2
    S[B_, B_] = Pc2
    kl = np.array([add[k, l] for k, l in cpairs], dtype=int)
    S[A_, C_] = (d + 2) * np.conj(P[:, kl])
    S[B_, C_] = (d + 2) * np.conj(P[:, kl])
    S[C_, A_] = S[A_, C_].T
    S[C_, B_] = S[B_, C_].T
    for i, (k, l) in enumerate(cpairs):
        for j, (k2, l2) in enumerate(cpairs):
            S[2 * na + i, 2 * na + j] = (d + 2) * (np.conj(P[k, k2] * P[l, l2]) + np.conj(P[k, l2] * P[l, k2]))
    taus = np.array([t.tau for t in triples])
    oms = np.array([t.omega for t in triples])
    S[A_, D_] = d * P[:, taus]
    S[B_, D_] = -d * P[:, taus]
    S[D_, A_] = S[A_, D_].T
    S[D_, B_] = S[B_, D_].T
    for i, ti in enumerate(triples):
        for j, tj in enumerate(triples):
            tt = add[ti.tau, tj.tau]
            first = sum(P[add[tt, g], g] for g in range(n))
            # sum over g,h of conj(xi_i(g) xi_j(h) <tau_i - tau_j + h - g, h - g>)
            u = add[ti.tau, neg[tj.tau]]
            tot = 0
            for g in range(n):
                for hh in range(n):
                    e = add[hh, neg[g]]
                    tot += np.conj(ti.xi[g] * tj.xi[hh] * P[add[u, e], e])
            v = ti.omega * tj.omega * first + d * ti.omega * tj.omega * c ** 6 * a[ti.tau] * a[tj.tau] / n * tot
            S[D_.start + i, D_.start + j] = v
    S /= lam
    T[A_] = np.diag(P)
    T[B_] = np.diag(P)
    T[C_] = np.array([P[k, l] for k, l in cpairs])
    T[D_] = oms
    md = ModularData(labels, S, T, 0, f"double of {inst.group.name()} class", lam)
    md.meta.update(delta=d, triples=triples)
    return md


def triples_to_json(triples: List[Triple]) -> list:
    return [{"omega": {"re": t.omega.real, "im": t.omega.imag}, "tau": int(t.tau),
             "xi": [{"re": z.real, "im": z.imag} for z in t.xi], "residual": t.residual}
            for t in triples]


def triples_from_json(data: list) -> List[Triple]:
    return [Triple(complex(d["omega"]["re"], d["omega"]["im"]), d["tau"],
                   np.array([complex(z["re"], z["im"]) for z in d["xi"]]), d.get("residual", float("nan")))
            for d in data]


# --- even order: listed T values -----------------------------------------------

def predicted_even_t(n: int, m: int, m1: int, m2: int) -> List[float]:
    """T exponents (in turns) of the d-family for cyclic G of even order n,
    from the listed pair (m1, m2).  g runs over G, except over G/2 at the
    last gamma; <g,g> is taken as m g^2 / n."""
    out = []
    top = (n + 4) // 2
    for gam in range(1, top + 1):
        for g in range(n if gam < top else n // 2):
            if (gam + n // 2) % 2:
                e = Fraction(m * g * g, n) + Fraction(m1 * gam * gam, n + 4)
            else:
                e = Fraction(m * g * (g - 1), n) + Fraction(m2 * (1 + n * gam) ** 2, n * (n + 4))
            out.append(float(e % 1))
    return out


@dataclass
class EvenTComparison:
    matched: int
    total: int
    missing: List[float]        # predicted but not found
    extra: List[float]          # found but not predicted

    @property
    def ok(self) -> bool:
        return self.matched == self.total and not self.missing


def compare_even_t(triples: List[Triple], n: int, m: int, m1: int, m2: int,
                   tol: float = 1e-6) -> EvenTComparison:
    """Multiset comparison of the triples' omegas against the listed values."""
    got = sorted(float(np.angle(t.omega) / (2 * math.pi)) % 1 for t in triples)
    pred = sorted(predicted_even_t(n, m, m1, m2))
    left = list(got)
    missing = []
    for p in pred:
        hit = next((k for k, x in enumerate(left) if min(abs(x - p), 1 - abs(x - p)) < tol), None)
        if hit is None:
            missing.append(p)
        else:
            left.pop(hit)
    return EvenTComparison(len(got) - len(left), len(got), missing, left)
