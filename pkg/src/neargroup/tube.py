"""Block structure of the tube algebra, as multisets of matrix-block sizes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .fields import prime_power
from .groups import frac1, phase


@dataclass
class TubeDecomposition:
    block_sizes: Counter          # size -> multiplicity
    label: str = ""

    @property
    def total_dim(self) -> int:
        return sum(k * k * m for k, m in self.block_sizes.items())

    @property
    def blocks(self) -> int:
        return sum(self.block_sizes.values())

    def sizes(self) -> List[int]:
        return sorted(self.block_sizes.elements())

    def describe(self) -> str:
        parts = []
        for k in sorted(self.block_sizes):
            m = self.block_sizes[k]
            parts.append(f"C^{m}" if k == 1 else f"(M_{k})^{m}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"label": self.label, "block_sizes": {str(k): v for k, v in sorted(self.block_sizes.items())},
                "blocks": self.blocks, "total_dim": self.total_dim}


def tube_first_class(n: int, s: int = 1) -> TubeDecomposition:
    """Type Z_n + (n-1).  Generic: 2n+1 one-dimensional blocks, one n x n
    block, n^2 - n blocks of size 2.  The n = 7, s = -1 system instead has
    an extra 7x7 block and 44 blocks of size 2."""
    if prime_power(n + 1) is None:
        raise ValueError(f"n+1 = {n + 1} is not a prime power")
    if s not in (1, -1):
        raise ValueError("s must be 1 or -1")
    if n == 7 and s == -1:
        return TubeDecomposition(Counter({1: 7, 7: 1, 2: 44}), "Z7+6, s=-1")
    c = Counter({1: 2 * n + 1})
    c[n] += 1
    c[2] += n * n - n
    return TubeDecomposition(+c, f"Z{n}+{n - 1}, s={s}")


def tube_second_class(n: int) -> TubeDecomposition:
    if n < 1:
        raise ValueError("n must be positive")
    c = Counter({1: n * (n + 5) // 2, 2: n, 3: n * (n - 1) // 2})
    return TubeDecomposition(+c, f"G+{n}, |G|={n}")


@dataclass
class HalfBraidingReport:
    checks: Dict[str, Tuple[bool, float]] = field(default_factory=dict)
    mismatches: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def alpha_halfbraiding_condition(sol, md=None, tol: float = 1e-10) -> HalfBraidingReport:
    """Half-braidings of the invertible objects when n' = n.

    Here the sign ż(g) z̃(g) is independent of z because z̃ determines z, so
    c'_g = ±eps(g) and the remaining condition is eps(g)^2 = conj<g,g>,
    checked exactly.  With md (from md_second_class) the a-blocks of T and S
    are compared against <g,g> and conj<g,h>^2 / lambda.
    """
    from .groups import epsilon_exponents
    inst = sol.instance
    p = inst.pairing
    eps = epsilon_exponents(p)
    rep = HalfBraidingReport()
    bad = [g for g in inst.elements if frac1(2 * eps[g] + p.exponent(g, g)) != 0]
    rep.checks["c'_g^2 = conj<g,g>"] = (not bad, float(len(bad)))
    for g in bad:
        rep.mismatches.append(f"c'^2 at {g}")
    if md is not None:
        ia = md.family_indices("a")
        P = inst.P
        Terr = float(np.max(np.abs(md.T[ia] - np.diag(P))))
        lam = md.expected_lambda or 1 / abs(md.S[md.identity, md.identity])
        Serr = float(np.max(np.abs(md.S[np.ix_(ia, ia)] - np.conj(P) ** 2 / lam)))
        rep.checks["T_a = <g,g>"] = (Terr < tol, Terr)
        rep.checks["S_aa = conj<g,h>^2/lambda"] = (Serr < tol, Serr)
        if Terr >= tol:
            rep.mismatches.append(f"T on a-family off by {Terr:.2e}")
        if Serr >= tol:
            rep.mismatches.append(f"S on a-family off by {Serr:.2e}")
    return rep
