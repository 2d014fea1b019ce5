"""Numerical solution and classification of the type G+n equations.

Unknowns are a sign-type function a, a scalar c with |c| = 1 and a function
b: G -> C.  The a-functions are exact (quadratic refinements of the conjugate
pairing), c is one of three cube roots, and b is found in two stages: the
equations that are real-linear in b cut out an affine space, and the quadratic
norm conditions |b(g)|^2 = 1/n are solved on that space by multi-start Newton.
Candidates are kept only if every equation of the system holds.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .groups import (
    AbelianGroup,
    Automorphism,
    Element,
    SymmetricPairing,
    automorphisms,
    frac1,
    pairing_orbit_representatives,
    phase,
    quadratic_refinements,
)

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-6
ACCEPT_TOL = 1e-9
CLASSIFY_BOUND = 16


def delta_second(n: int) -> float:
    return (n + math.sqrt(n * n + 4 * n)) / 2


# --- instance --------------------------------------------------------------

@dataclass
class SecondClassInstance:
    group: AbelianGroup
    pairing: SymmetricPairing
    a_exp: Dict[Element, Fraction]
    c: complex

    def __post_init__(self):
        G = self.group
        self.elements = G.elements()
        self.n = G.order
        self.delta = delta_second(self.n)
        idx = {g: i for i, g in enumerate(self.elements)}
        self.idx = idx
        n = self.n
        self.add = np.array([[idx[G.add(g, h)] for h in self.elements] for g in self.elements], dtype=int)
        self.neg = np.array([idx[G.neg(g)] for g in self.elements], dtype=int)
        self.P = np.array([[self.pairing.value(g, h) for h in self.elements] for g in self.elements])
        self.a = np.array([phase(self.a_exp[g]) for g in self.elements])
        self.zero = idx[G.zero()]
        assert self.zero == 0 and n == len(self.elements)

    @property
    def a_signs(self) -> List[int]:
        return a_signs(self.pairing, self.a_exp)


@dataclass
class SecondClassSolution:
    instance: SecondClassInstance
    b: np.ndarray
    residual: float = float("nan")
    params: Optional[np.ndarray] = None
    class_id: int = -1
    conjugate_of: Optional[int] = None
    provenance: str = "discovered"

    @property
    def group(self) -> AbelianGroup:
        return self.instance.group

    @property
    def c(self) -> complex:
        return self.instance.c

    def b_of(self, g: Element) -> complex:
        return self.b[self.instance.idx[g]]


# --- a and c ---------------------------------------------------------------

def a_candidates(G: AbelianGroup, pairing: SymmetricPairing) -> List[Dict[Element, Fraction]]:
    """All a with a(0)=1, a(-g)=a(g), a(g+h)<g,h> = a(g)a(h), as exact exponents."""
    if not pairing.is_nondegenerate():
        raise ValueError("pairing must be nondegenerate")
    return quadratic_refinements(pairing)


def a_base_exponents(pairing: SymmetricPairing) -> Dict[Element, Fraction]:
    """The reference a: <g,g>^((n-1)/2) for odd order, and on diagonal pairings
    with even factors exp(-pi i m g^2/n) per factor (the sign-free branch)."""
    G = pairing.group
    out = {}
    for g in G.elements():
        t = Fraction(0)
        for i, f in enumerate(G.factors):
            qi = pairing.q[i][i]
            if f % 2:
                t += qi * g[i] * g[i] * ((f - 1) // 2)
            else:
                t -= qi * g[i] * g[i] / 2
        out[g] = frac1(t)
    return out


def a_signs(pairing: SymmetricPairing, a_exp: Dict[Element, Fraction]) -> List[int]:
    """Signs s_i with a(g) = prod_i s_i^{g_i} * a_base(g), one per even factor.
    Empty for odd order; None entries if a is not of this shape."""
    G = pairing.group
    base = a_base_exponents(pairing)
    signs = []
    for i, f in enumerate(G.factors):
        if f % 2:
            continue
        e = [0] * G.rank
        e[i] = 1
        d = frac1(a_exp[tuple(e)] - base[tuple(e)])
        signs.append(1 if d == 0 else (-1 if d == Fraction(1, 2) else None))
    return signs


def c_candidates(G: AbelianGroup, a_exp: Dict[Element, Fraction]) -> List[complex]:
    n = G.order
    s = sum(phase(a_exp[g]) for g in G.elements())
    if abs(abs(s) - math.sqrt(n)) > 1e-9:
        return []
    c3 = math.sqrt(n) / s
    r = cmath.phase(c3)
    return [cmath.exp(1j * (r + 2 * math.pi * k) / 3) for k in range(3)]


# --- residuals -------------------------------------------------------------

def equation_blocks(inst: SecondClassInstance, b: np.ndarray) -> Dict[str, np.ndarray]:
    """Complex residual vectors for every equation of the system, all arguments."""
    n, d, c = inst.n, inst.delta, inst.c
    a, P = inst.a, inst.P
    sn = math.sqrt(n)
    out = {}
    out["a_sum"] = np.array([a.sum() - sn * c ** -3])
    ident = np.abs(a[inst.add] * P - a[:, None] * a[None, :]).ravel()
    out["a_mult"] = np.concatenate([ident, [a[0] - 1], a[inst.neg] - a])
    out["b0"] = np.array([b[0] + 1 / d])
    out["dft"] = np.conj(P) @ b - sn * c * np.conj(b)
    out["sym"] = a * b[inst.neg] - np.conj(b)
    shift = b[inst.add]  # shift[y, x] = b(x + y)
    e4a = shift @ np.conj(b)
    e4a[0] -= 1
    out["orth"] = e4a + 1 / d
    e4b = (shift * np.conj(b)[None, :]) @ shift.T
    out["cubic"] = (e4b - (np.conj(P) * np.outer(b, b) - c / (d * sn))).ravel()
    return out


def full_residual(inst: SecondClassInstance, b: np.ndarray) -> float:
    return float(max(np.max(np.abs(v)) for v in equation_blocks(inst, b).values()))


def residual_vector(inst: SecondClassInstance, b: np.ndarray) -> np.ndarray:
    blocks = equation_blocks(inst, b)
    v = np.concatenate([blocks[k] for k in ("b0", "dft", "sym", "orth", "cubic")])
    norms = np.abs(b[1:]) ** 2 - 1 / inst.n
    return np.concatenate([v.real, v.imag, norms])


# --- linear stage ----------------------------------------------------------

@dataclass
class AffineSpace:
    """b = base + basis @ t for real t."""

    base: np.ndarray  # complex, length n
    basis: np.ndarray  # complex, n x d

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def point(self, t: np.ndarray) -> np.ndarray:
        return self.base + self.basis @ t


def _realify(L1: np.ndarray, L2: np.ndarray) -> np.ndarray:
    """Real matrix of the map b -> L1 b + L2 conj(b) on (Re b, Im b)."""
    top = np.hstack([L1.real + L2.real, -L1.imag + L2.imag])
    bot = np.hstack([L1.imag + L2.imag, L1.real - L2.real])
    return np.vstack([top, bot])


def linear_stage(inst: SecondClassInstance, tol: float = 1e-9) -> Optional[AffineSpace]:
    n = inst.n
    sn = math.sqrt(n)
    I = np.eye(n)
    rows, rhs = [], []
    e0 = np.zeros((1, n))
    e0[0, 0] = 1
    rows.append(_realify(e0.astype(complex), np.zeros((1, n), complex)))
    rhs.append(np.array([-1 / inst.delta, 0.0]))
    rows.append(_realify(np.conj(inst.P), -sn * inst.c * I))
    rhs.append(np.zeros(2 * n))
    R = I[inst.neg]
    rows.append(_realify(inst.a[:, None] * R, -I.astype(complex)))
    rhs.append(np.zeros(2 * n))
    A = np.vstack(rows)
    r = np.concatenate(rhs)
    u, *_ = np.linalg.lstsq(A, r, rcond=None)
    if np.max(np.abs(A @ u - r)) > tol:
        return None
    _, sv, vt = np.linalg.svd(A)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    null = vt[rank:].T
    # particular solution orthogonal to the null space
    u = u - null @ (null.T @ u)
    base = u[:n] + 1j * u[n:]
    basis = null[:n] + 1j * null[n:]
    return AffineSpace(base, basis)


# --- norm stage ------------------------------------------------------------

def _norm_rows(inst: SecondClassInstance, space: AffineSpace, rng: np.random.Generator) -> List[int]:
    """Pick d norm equations with independent gradients at generic points."""
    d = space.dim
    if d == 0:
        return []
    G = inst.group
    order = []
    seen = set()
    for i, g in enumerate(inst.elements):
        if i == 0 or i in seen:
            continue
        seen.add(i)
        seen.add(int(inst.neg[i]))
        order.append(i)
    order += [i for i in range(1, inst.n) if i not in order]
    pts = [rng.normal(size=d) for _ in range(3)]
    chosen: List[int] = []
    for i in order:
        trial = chosen + [i]
        ranks = []
        for t in pts:
            b = space.point(t)
            J = 2 * (np.conj(b[trial])[:, None] * space.basis[trial]).real
            ranks.append(np.linalg.matrix_rank(J, tol=1e-8))
        if max(ranks) == len(trial):
            chosen = trial
        if len(chosen) == d:
            break
    return chosen


def _batched_newton(space: AffineSpace, rows: Sequence[int], target: float, T0: np.ndarray,
                    iters: int = 60) -> Tuple[np.ndarray, np.ndarray]:
    """Damped Newton for |b_g(t)|^2 = target, g in rows, from many starts at once."""
    Bs = space.basis[list(rows)]  # k x d
    b0 = space.base[list(rows)]
    T = T0.copy()

    def F(T):
        bb = b0[None, :] + T @ Bs.T
        return np.abs(bb) ** 2 - target, bb

    f, bb = F(T)
    fn = np.linalg.norm(f, axis=1)
    for _ in range(iters):
        J = 2 * (np.conj(bb)[:, :, None] * Bs[None, :, :]).real  # m x k x d
        try:
            step = np.linalg.solve(J, f[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.array([np.linalg.lstsq(Ji, fi, rcond=None)[0] for Ji, fi in zip(J, f)])
        lam = np.ones(len(T))
        newT = T - step
        nf, nbb = F(newT)
        nfn = np.linalg.norm(nf, axis=1)
        for _ in range(8):
            bad = nfn > fn * (1 - 1e-4 * lam) + 1e-300
            bad &= fn > 1e-14
            if not bad.any():
                break
            lam[bad] /= 2
            newT[bad] = T[bad] - lam[bad, None] * step[bad]
            nf[bad], nbb[bad] = F(newT[bad])
            nfn[bad] = np.linalg.norm(nf[bad], axis=1)
        T, f, bb, fn = newT, nf, nbb, nfn
        T[~np.isfinite(T)] = 1e6
        if np.all((fn < 1e-13) | (np.abs(T).max(axis=1) > 1e3)):
            break
    return T, fn


def _dedupe(points: Sequence[np.ndarray], tol: float) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


@dataclass
class NormStageResult:
    subsystem_roots: List[np.ndarray]
    solutions: List[SecondClassSolution]
    rows: List[int]


def norm_stage(space: AffineSpace, inst: SecondClassInstance, starts: int = 2000,
               seeds: Sequence[np.ndarray] = (), seed: int = 0,
               tol: float = ACCEPT_TOL) -> NormStageResult:
    rng = np.random.default_rng(seed)
    d = space.dim
    target = 1.0 / inst.n
    if d == 0:
        b = space.base.copy()
        sol = _accept(inst, space, np.zeros(0), tol)
        return NormStageResult([np.zeros(0)], [sol] if sol else [], [])
    rows = _norm_rows(inst, space, rng)
    if len(rows) < d:
        log.warning("only %d independent norm equations for %d parameters", len(rows), d)
        return NormStageResult([], [], rows)
    radius = math.sqrt(1 / inst.delta ** 2 + (inst.n - 1) / inst.n) * 1.05
    sampler = qmc.Sobol(d, scramble=True, seed=rng)
    m = 1 << max(1, math.ceil(math.log2(max(starts, 2))))
    U = sampler.random(m)[:starts]
    T0 = (2 * U - 1) * radius
    starts_all = [T0]
    seed_pts = [_project_seed(space, s) for s in seeds]
    if seed_pts:
        starts_all.insert(0, np.array(seed_pts))
    T0 = np.vstack(starts_all)
    T, fn = _batched_newton(space, rows, target, T0)
    ok = fn < 1e-10
    roots = _dedupe([t for t in T[ok]], DEDUP_TOL)
    if len(roots) % 2:
        log.warning("odd number (%d) of roots of the quadratic subsystem", len(roots))
    sols = []
    for t in roots:
        sol = _accept(inst, space, t, tol)
        if sol is not None:
            sols.append(sol)
    sols = _dedupe_solutions(sols, 1e-9)
    return NormStageResult(roots, sols, rows)


def _project_seed(space: AffineSpace, b: np.ndarray) -> np.ndarray:
    B = np.vstack([space.basis.real, space.basis.imag])
    r = np.concatenate([(b - space.base).real, (b - space.base).imag])
    return np.linalg.lstsq(B, r, rcond=None)[0]


def _accept(inst, space, t, tol) -> Optional[SecondClassSolution]:
    b = space.point(t)
    if full_residual(inst, b) > 1e-4:
        return None
    sol = SecondClassSolution(inst, b, params=t)
    try:
        sol = refine(sol, space=space)
    except ArithmeticError:
        return None
    if sol.residual >= tol:
        return None
    return sol


def _dedupe_solutions(sols, tol):
    out = []
    for s in sols:
        if all(np.max(np.abs(s.b - o.b)) > tol for o in out):
            out.append(s)
    return out


# --- refinement ------------------------------------------------------------

def refine(sol: SecondClassSolution, target: float = 1e-12, max_iter: int = 50,
           space: Optional[AffineSpace] = None) -> SecondClassSolution:
    """Gauss-Newton on the full system over the linear-stage parameters."""
    inst = sol.instance
    if space is None:
        space = linear_stage(inst)
        if space is None:
            raise ArithmeticError("linear stage is inconsistent for this instance")
    t = sol.params if sol.params is not None and len(sol.params) == space.dim else _project_seed(space, sol.b)
    b = space.point(t)
    res0 = full_residual(inst, b)
    if res0 > 1e-3:
        raise ArithmeticError(f"starting residual {res0:.3g} too large to refine")
    res = res0
    for _ in range(max_iter):
        if res < target or space.dim == 0:
            break
        r = residual_vector(inst, b)
        h = 1e-7
        J = np.empty((len(r), space.dim))
        for k in range(space.dim):
            tk = t.copy()
            tk[k] += h
            J[:, k] = (residual_vector(inst, space.point(tk)) - r) / h
        # exact Jacobian would be nicer; finite differences suffice for polish
        step = np.linalg.lstsq(J, r, rcond=None)[0]
        t_new = t - step
        b_new = space.point(t_new)
        res_new = full_residual(inst, b_new)
        if not res_new < 10 * res + 1e-14:
            raise ArithmeticError("refinement diverged")
        t, b, res = t_new, b_new, res_new
        if res < target:
            break
    return replace(sol, b=b, params=t, residual=res)


# --- classification --------------------------------------------------------

@dataclass
class Branch:
    pairing: SymmetricPairing
    a_exp: Dict[Element, Fraction]
    c: complex
    dim: int = -1
    subsystem_roots: int = 0
    solutions: List[SecondClassSolution] = field(default_factory=list)


def _transform_solution(sol: SecondClassSolution, phi: Automorphism) -> Tuple[SymmetricPairing, Dict, np.ndarray]:
    """Image under phi: pairing' = pairing o (phi x phi), a' = a o phi, b' = b o phi."""
    inst = sol.instance
    p2 = inst.pairing.transform(phi)
    a2 = {g: inst.a_exp[phi(g)] for g in inst.elements}
    b2 = np.array([sol.b[inst.idx[phi(g)]] for g in inst.elements])
    return p2, a2, b2


def _a_key(a_exp):
    return tuple(sorted(a_exp.items()))


def equivalent(s1: SecondClassSolution, s2: SecondClassSolution, auts: Sequence[Automorphism],
               tol: float = DEDUP_TOL) -> Optional[Automorphism]:
    if abs(s1.c - s2.c) > tol:
        return None
    for phi in auts:
        p, a, b = _transform_solution(s1, phi)
        if p.key() != s2.instance.pairing.key() or _a_key(a) != _a_key(s2.instance.a_exp):
            continue
        if np.max(np.abs(b - s2.b)) < tol:
            return phi
    return None


@dataclass
class Classification:
    group: AbelianGroup
    classes: List[SecondClassSolution]
    branches: List[Branch]
    all_solutions: List[SecondClassSolution]

    def branch_count(self) -> int:
        """Solutions counted up to automorphisms fixing both the pairing and a.

        Coarser identifications that move a to another sign choice, or the
        pairing to another representative, are not made here.  This is a
        diagnostic next to len(classes), which uses the full Aut(G) action.
        """
        auts = automorphisms(self.group)
        reps: List[SecondClassSolution] = []
        for s in self.all_solutions:
            fixing = [phi for phi in auts
                      if s.instance.pairing.transform(phi).key() == s.instance.pairing.key()
                      and all(s.instance.a_exp[phi(g)] == s.instance.a_exp[g] for g in s.instance.elements)]
            if not any(r.instance.pairing.key() == s.instance.pairing.key()
                       and _a_key(r.instance.a_exp) == _a_key(s.instance.a_exp)
                       and equivalent(s, r, fixing) is not None for r in reps):
                reps.append(s)
        return len(reps)


def classify(G: AbelianGroup, starts: int = 4000, seed: int = 42, tol: float = ACCEPT_TOL,
             bound: int = CLASSIFY_BOUND, seed_table: Optional[Sequence] = None,
             family: str = "product") -> Classification:
    """Solve the second-class equations on every pairing orbit of the chosen
    family and every (a, c) branch, then merge Aut(G)-orbits of solutions.

    family="product" uses the product-form pairings of the shipped table;
    family="all" uses every nondegenerate symmetric pairing.
    """
    if G.order > bound:
        raise ValueError(f"|G|={G.order} above classification bound {bound}")
    auts = automorphisms(G)
    branches: List[Branch] = []
    found: List[SecondClassSolution] = []
    for p in pairing_orbit_representatives(G, family):
        for a_exp in a_candidates(G, p):
            for k, c in enumerate(c_candidates(G, a_exp)):
                inst = SecondClassInstance(G, p, a_exp, c)
                br = Branch(p, a_exp, c)
                branches.append(br)
                space = linear_stage(inst)
                if space is None:
                    continue
                br.dim = space.dim
                seeds = []
                if seed_table is not None:
                    seeds = [s for s in seed_table if abs(s.c - c) < 1e-6 and s.matches_instance(inst)]
                    seeds = [s.b_vector(inst) for s in seeds]
                res = norm_stage(space, inst, starts=starts, seeds=seeds, seed=seed + len(branches), tol=tol)
                br.subsystem_roots = len(res.subsystem_roots)
                br.solutions = res.solutions
                found.extend(res.solutions)
    # merge Aut(G)-orbits, keeping a deterministic representative
    found.sort(key=_solution_sort_key)
    classes: List[SecondClassSolution] = []
    for s in found:
        for cl in classes:
            if equivalent(s, cl, auts) is not None:
                break
        else:
            classes.append(s)
    for i, s in enumerate(classes):
        s.class_id = i
    for s in classes:
        conj = _conjugate(s)
        for cl in classes:
            if equivalent(conj, cl, auts) is not None:
                s.conjugate_of = cl.class_id
                break
    for s in found:
        for cl in classes:
            if equivalent(s, cl, auts) is not None:
                s.class_id = cl.class_id
                break
    return Classification(G, classes, branches, found)


def _solution_sort_key(s: SecondClassSolution):
    ang = cmath.phase(s.c) % (2 * math.pi)
    pk = [float(x) for row in s.instance.pairing.q for x in row]
    return (round(ang, 6), pk, _a_key(s.instance.a_exp), [round(float(x), 6) for x in np.angle(s.b[1:])])


def conjugate_solution(s: SecondClassSolution) -> SecondClassSolution:
    """Complex conjugate system: conjugate pairing, a, c and b."""
    return _conjugate(s)


def _conjugate(s: SecondClassSolution) -> SecondClassSolution:
    inst = s.instance
    G = inst.group
    qc = tuple(tuple(-x for x in row) for row in inst.pairing.q)
    p = SymmetricPairing(G, qc)
    a = {g: frac1(-v) for g, v in inst.a_exp.items()}
    inst2 = SecondClassInstance(G, p, a, np.conj(inst.c))
    b = np.conj(s.b)
    return SecondClassSolution(inst2, b, residual=full_residual(inst2, b))
