"""Modular invariants: nonnegative integer matrices commuting with S and T."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr
from scipy.optimize import linprog

from .modular import ModularData, label_str

RANK_TOL = 1e-8
COMMUTE_TOL = 1e-8
INT_TOL = 1e-6
DIM_CAP = 12
T_MATCH = 1e-9


class DimensionCapExceeded(ValueError):
    pass


@dataclass
class ModularInvariant:
    Z: np.ndarray
    monomial: bool = False
    type_one: bool = False
    residual: float = 0.0
    vector: Optional[np.ndarray] = None      # v with Z = v v^T when monomial
    name: str = ""

    def key(self) -> bytes:
        return self.Z.astype(np.int64).tobytes()

    def generator(self, md: ModularData) -> str:
        """Generating-function text, using |...|^2 for the type I pieces."""
        parts = _type_one_parts(self.Z)
        if parts is not None:
            out = []
            for w in parts:
                terms = [(_coef(int(w[i])) + label_str(md.labels[i])) for i in np.flatnonzero(w)]
                out.append("|" + "+".join(terms) + "|^2")
            return " + ".join(out)
        terms = []
        for a, b in zip(*np.nonzero(self.Z)):
            terms.append(f"{_coef(int(self.Z[a, b]))}{label_str(md.labels[a])}*{label_str(md.labels[b])}~")
        return " + ".join(terms)

    def to_json(self, md: ModularData) -> dict:
        return {"Z": self.Z.astype(int).tolist(), "monomial": self.monomial, "type_one": self.type_one,
                "residual": self.residual, "name": self.name, "generator": self.generator(md)}


def _coef(k: int) -> str:
    return "" if k == 1 else f"{k}"


def commutation_residual(md: ModularData, Z: np.ndarray) -> float:
    Z = np.asarray(Z, dtype=float)
    rs = np.max(np.abs(Z @ md.S - md.S @ Z))
    rt = np.max(np.abs(Z * md.T[None, :] - md.T[:, None] * Z))
    return float(max(rs, rt))


def _t_pairs(md: ModularData) -> List[Tuple[int, int]]:
    T = md.T
    N = md.size
    return [(a, b) for a in range(N) for b in range(N) if abs(T[a] - T[b]) < T_MATCH]


def _null_space(A, tol: float) -> np.ndarray:
    """Orthonormal basis of the null space of A (dense or sparse)."""
    m, k = A.shape
    if m * k <= 4e7:
        D = A.toarray() if sp.issparse(A) else A
        _, s, vt = np.linalg.svd(D, full_matrices=True)
        s = np.concatenate([s, np.zeros(k - len(s))])
        return vt[s < tol].T
    G = (A.T @ A).toarray() if sp.issparse(A) else A.T @ A
    w, v = np.linalg.eigh(G)
    return v[:, w < tol * tol]


def commutant_basis(md: ModularData, tol: float = RANK_TOL) -> Tuple[List[Tuple[int, int]], np.ndarray]:
    """Real matrices X with XS = SX and XT = TX.

    XT = TX forces X_ab = 0 unless T_a = T_b, so the unknowns are those
    entries only.  Returns (entries, B) where column i of B lists the values
    of basis element i on the entries.
    """
    pairs = _t_pairs(md)
    N = md.size
    S = md.S
    rows, cols, vals = [], [], []
    # (XS - SX)[i, j] = sum_k X[i,k] S[k,j] - S[i,k] X[k,j]
    for u, (a, b) in enumerate(pairs):
        for j in range(N):                      # X[a,b] S[b,j] enters (a, j)
            rows.append(a * N + j)
            cols.append(u)
            vals.append(S[b, j])
        for i in range(N):                      # -S[i,a] X[a,b] enters (i, b)
            rows.append(i * N + b)
            cols.append(u)
            vals.append(-S[i, a])
    A = sp.coo_matrix((np.array(vals), (rows, cols)), shape=(N * N, len(pairs))).tocsr()
    A = sp.vstack([A.real, A.imag]).tocsr()
    B = _null_space(A, tol)
    return pairs, B


def _pivot_rows(B: np.ndarray) -> np.ndarray:
    _, _, piv = qr(B.T, pivoting=True, mode="economic")
    return np.sort(piv[:B.shape[1]])


class _LatticeSearch:
    """Integer points z = M y, y integer in a box, 0 <= z <= upper, with some
    coordinates of z fixed.  Depth-first over y with LP pruning."""

    def __init__(self, B: np.ndarray, upper: np.ndarray, fixed: Dict[int, int], limit: int = 100000):
        self.k = B.shape[1]
        piv = _pivot_rows(B)
        self.piv = piv
        self.M = B @ np.linalg.inv(B[piv])         # z = M z[piv]
        self.upper = upper
        self.fixed = fixed
        self.limit = limit
        self.found: List[np.ndarray] = []
        self.nodes = 0
        # equality constraints from fixed coordinates
        self.A_eq = np.array([self.M[i] for i in fixed]) if fixed else None
        self.b_eq = np.array([fixed[i] for i in fixed], dtype=float) if fixed else None

    def _feasible(self, prefix: List[int]) -> bool:
        k, d = self.k, len(prefix)
        if d == k:
            return True
        M = self.M
        fixedpart = M[:, :d] @ np.array(prefix, dtype=float) if d else np.zeros(M.shape[0])
        R = M[:, d:]
        A_ub = np.vstack([R, -R])
        b_ub = np.concatenate([self.upper - fixedpart, fixedpart]) + 1e-7
        A_eq = b_eq = None
        if self.A_eq is not None:
            A_eq = self.A_eq[:, d:]
            b_eq = self.b_eq - self.A_eq[:, :d] @ np.array(prefix, dtype=float) if d else self.b_eq
        bounds = [(0, self.upper[self.piv[i]]) for i in range(d, k)]
        res = linprog(np.zeros(k - d), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=bounds, method="highs")
        return res.status == 0

    def run(self) -> List[np.ndarray]:
        self._dfs([])
        return self.found

    def _dfs(self, prefix: List[int]):
        self.nodes += 1
        if self.nodes > self.limit:
            raise RuntimeError("lattice search node limit reached")
        if not self._feasible(prefix):
            return
        d = len(prefix)
        if d == self.k:
            z = self.M @ np.array(prefix, dtype=float)
            zr = np.round(z)
            if np.max(np.abs(z - zr)) < INT_TOL and zr.min() >= 0 and np.all(zr <= self.upper + 1e-9) \
                    and all(zr[i] == v for i, v in self.fixed.items()):
                self.found.append(zr.astype(np.int64))
            return
        i = self.piv[d]
        if i in self.fixed:
            self._dfs(prefix + [self.fixed[i]])
            return
        for v in range(int(self.upper[i]) + 1):
            self._dfs(prefix + [v])


def _entry_bound(md: ModularData) -> np.ndarray:
    d = np.abs(md.dims())
    return np.ceil(np.outer(d, d) - 1e-9)


def enumerate_invariants(md: ModularData, dim_cap: int = DIM_CAP, bound: str = "dims",
                         limit: int = 200000) -> List[ModularInvariant]:
    """All modular invariants with Z_00 = 1 and entries at most ceil(d_a d_b).

    Branch and bound over integer coordinates of the commutant; each hit is
    re-verified by direct commutation.
    """
    pairs, B = commutant_basis(md)
    k = B.shape[1]
    if k > dim_cap:
        raise DimensionCapExceeded(f"commutant dimension {k} exceeds cap {dim_cap}")
    if bound != "dims":
        raise ValueError(f"unknown entry bound mode {bound!r}")
    ub = _entry_bound(md)
    upper = np.array([ub[a, b] for a, b in pairs])
    o = md.identity
    fixed = {pairs.index((o, o)): 1}
    pts = _LatticeSearch(B, upper, fixed, limit).run()
    out = []
    N = md.size
    for z in pts:
        Z = np.zeros((N, N), dtype=np.int64)
        for (a, b), v in zip(pairs, z):
            Z[a, b] = v
        res = commutation_residual(md, Z)
        if res >= COMMUTE_TOL:
            continue
        mono = _monomial_vector(Z)
        out.append(ModularInvariant(Z, mono is not None, _type_one_parts(Z) is not None, res, mono))
    out.sort(key=lambda inv: (-int(np.trace(inv.Z) == md.size and inv.Z.sum() == md.size), inv.Z.sum(), inv.key()))
    return out


def monomial_invariants(md: ModularData, limit: int = 200000) -> List[ModularInvariant]:
    """All Z = v v^T with v_0 = 1 and 0 <= v_a <= ceil(d_a).

    v must lie on labels with T_a = T_0, and [v v^T, S] = 0 forces S v = v,
    so the search runs over integer points of that kernel.
    """
    o = md.identity
    supp = [a for a in range(md.size) if abs(md.T[a] - md.T[o]) < T_MATCH]
    S = md.S[np.ix_(range(md.size), supp)]
    E = np.zeros((md.size, len(supp)))
    for j, a in enumerate(supp):
        E[a, j] = 1
    A = np.vstack([(S - E).real, (S - E).imag])
    K = _null_space(A, RANK_TOL)
    out = []
    if K.shape[1] == 0:
        return out
    d = np.abs(md.dims())[supp]
    upper = np.ceil(d - 1e-9)
    fixed = {supp.index(o): 1}
    for z in _LatticeSearch(K, upper, fixed, limit).run():
        v = np.zeros(md.size, dtype=np.int64)
        v[supp] = z
        Z = np.outer(v, v)
        res = commutation_residual(md, Z)
        if res < COMMUTE_TOL:
            out.append(ModularInvariant(Z, True, True, res, v))
    out.sort(key=lambda inv: (int(inv.vector.sum()), inv.key()))
    return out


def _monomial_vector(Z: np.ndarray) -> Optional[np.ndarray]:
    v = Z[0]
    if v[0] == 1 and np.array_equal(np.outer(v, v), Z):
        return v.copy()
    return None


def _type_one_parts(Z: np.ndarray) -> Optional[List[np.ndarray]]:
    """Write Z as a sum of w w^T, peeling off rows with a unit diagonal.

    Returns None when this greedy decomposition does not close, which only
    means type I was not shown.  Repeated squares come out as repeated parts.
    """
    R = np.array(Z, dtype=np.int64)
    if not np.array_equal(R, R.T):
        return None
    parts = []
    while R.any():
        cand = [a for a in range(len(R)) if R[a, a] == 1]
        if cand:
            w = R[cand[0]].copy()
        else:
            # a diagonal entry alone in its row is a repeated |x|^2
            lone = [a for a in range(len(R)) if R[a, a] > 0 and np.count_nonzero(R[a]) == 1]
            if not lone:
                return None
            w = np.zeros(len(R), dtype=np.int64)
            w[lone[0]] = 1
        R = R - np.outer(w, w)
        if R.min() < 0:
            return None
        parts.append(w)
    return parts


# --- the named invariants --------------------------------------------------------

def _vec(md: ModularData, coeffs: Dict[tuple, int]) -> np.ndarray:
    v = np.zeros(md.size, dtype=np.int64)
    for lab, c in coeffs.items():
        v[md.labels.index(lab)] += c
    return v


def _c_label(md: ModularData, g, h):
    for lab in (("c", (g, h)), ("c", (h, g))):
        if lab in md.labels:
            return lab
    raise KeyError(f"no c label for {g}, {h}")


def named_invariants(md: ModularData, group) -> Dict[str, np.ndarray]:
    """Z1, Z2, Z3 and, when they apply, Z4 (cyclic of square order) and Z4'
    (a product of two equal cyclic factors), on the double's a/b/c/d labels."""
    G = group
    els = G.elements()
    z = G.zero()
    N = md.size
    out = {"Z1": np.eye(N, dtype=np.int64)}
    Z2 = np.zeros((N, N), dtype=np.int64)
    for g in els:
        w = _vec(md, {("a", g): 1, ("b", g): 1})
        Z2 += np.outer(w, w)
    for i in md.family_indices("c"):
        Z2[i, i] = 2
    out["Z2"] = Z2
    v3 = {("a", z): 1, ("b", z): 1}
    for g in els:
        if g != z:
            v3[_c_label(md, g, z)] = 1
    w = _vec(md, v3)
    out["Z3"] = np.outer(w, w)
    n = G.order
    r = math.isqrt(n)
    if G.rank == 1 and r * r == n and r > 1:
        H = [(r * i,) for i in range(r)]
        v4 = {("a", h): 1 for h in H}
        v4.update({("b", h): 1 for h in H})
        for i in range(r):
            for j in range(i + 1, r):
                v4[_c_label(md, H[i], H[j])] = 2
        w = _vec(md, v4)
        out["Z4"] = np.outer(w, w)
    if G.rank == 2 and G.factors[0] == G.factors[1]:
        f = G.factors[0]
        v4 = {("a", z): 1, ("b", z): 1}
        for h in range(f):
            for hp in range(f):
                if h == 0 and hp == 0:
                    continue
                v4[_c_label(md, (h, 0), (0, hp))] = 1
        w = _vec(md, v4)
        out["Z4'"] = np.outer(w, w)
    return out


def identify(invs: Sequence[ModularInvariant], named: Dict[str, np.ndarray]) -> Dict[str, bool]:
    """Which named invariants occur in the list; also sets their names."""
    found = {}
    for name, Z in named.items():
        hit = False
        for inv in invs:
            if np.array_equal(inv.Z, Z):
                inv.name = inv.name or name
                hit = True
        found[name] = hit
    return found
