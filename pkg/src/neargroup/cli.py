"""Command-line front end.

Exit codes: 0 success, 2 a verification failed, 3 a search came back with
fewer or more roots than expected.
"""

from __future__ import annotations

import json
import logging
import math
import sys
import warnings
from typing import Optional

import click
import numpy as np

from .catalog import Catalog, recheck
from .first_class import FirstClassSolution, canonical_first_class, exceptional_first_class
from .groups import gauss_sum, parse_group, quadratic_form_cyclic, quadratic_form_diagonal, \
    quadratic_form_of_pairing
from .second_class import SecondClassSolution, classify as run_classify
from .modular import ModularData, label_str, match_md, md_first_class, md_qq, verify_axioms
from .seeds import angles_of
from .triples import IncompleteTriples, expected_triples, md_second_class, solve_triples, triples_to_json
from .tube import tube_first_class, tube_second_class

EXIT_OK, EXIT_VERIFY, EXIT_INCOMPLETE = 0, 2, 3


def parse_form(text: str):
    """'Z7:1' -> g^2/7 on Z7; 'Z3xZ3:1,1' -> (g1^2 + g2^2)/3."""
    gname, _, ms = text.partition(":")
    G = parse_group(gname)
    ms = [int(x) for x in (ms or "1").split(",")]
    if G.rank == 1:
        return quadratic_form_cyclic(G.factors[0], ms[0])
    if len(ms) != G.rank:
        raise click.BadParameter(f"{text}: need one coefficient per factor")
    return quadratic_form_diagonal(G, ms)


def _dump(obj, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1)


def _axiom_lines(rep) -> str:
    return "\n".join(f"  {k:28s} {'ok' if ok else 'FAIL'}  {v:.2e}" for k, (ok, v) in rep.checks.items())


def _pick(cat: Catalog, index: int):
    if not cat.solutions:
        raise click.ClickException("catalog is empty")
    if not 0 <= index < len(cat.solutions):
        raise click.ClickException(f"index {index} out of range (0..{len(cat.solutions) - 1})")
    return cat.solutions[index]


def _fmt_c(c: complex) -> str:
    t = (math.atan2(c.imag, c.real) / (2 * math.pi)) % 1
    return f"exp(2pi i*{t:.6f})"


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Near-group categories and the modular data of their doubles."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@click.option("--group", "group_text", required=True, help="e.g. Z7, Z2xZ4")
@click.option("--starts", default=2000, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--tol", default=1e-9, show_default=True)
@click.option("--family", type=click.Choice(["product", "all"]), default="product", show_default=True)
@click.option("--out", type=click.Path(), default=None)
def classify(group_text, starts, seed, tol, family, out):
    """Solve and classify the type G+n equations."""
    G = parse_group(group_text)
    res = run_classify(G, starts=starts, seed=seed, family=family)
    click.echo(f"{G.name()}: {len(res.classes)} classes")
    bad = False
    for s in res.classes:
        inst = s.instance
        j = ", ".join(f"{x:.8f}" for x in angles_of(s))
        click.echo(f"  [{s.class_id}] c={_fmt_c(inst.c)} pairing {inst.pairing.label or inst.pairing.q} "
                   f"a-signs {inst.a_signs} j=({j}) residual {s.residual:.1e}")
        bad |= not s.residual < tol
    cat = Catalog(list(res.classes), seed, {"group": G.name(), "starts": starts, "family": family})
    if out:
        cat.dump(out)
    sys.exit(EXIT_VERIFY if bad else EXIT_OK)


@main.command()
@click.argument("path", type=click.Path(exists=True))
def verify(path):
    """Re-verify a catalog or a modular-data file."""
    with open(path) as fh:
        data = json.load(fh)
    if "S" in data:
        md = ModularData.from_json(data)
        rep = verify_axioms(md)
        click.echo(f"{md.name or path}: {md.size} primaries")
        click.echo(_axiom_lines(rep))
        sys.exit(EXIT_OK if rep.ok else EXIT_VERIFY)
    cat = Catalog.from_json(data, verify=False)
    bad = 0
    for i, s in enumerate(cat.solutions):
        ok, r = recheck(s)
        click.echo(f"  {i}: {'ok' if ok else 'FAIL'} residual {r:.2e}")
        bad += not ok
    click.echo(f"{len(cat.solutions)} solutions, {bad} failing")
    sys.exit(EXIT_VERIFY if bad else EXIT_OK)


def _build_md(sol, starts: int, reading: str):
    """(md, incomplete) for either class."""
    if isinstance(sol, FirstClassSolution):
        return md_first_class(sol, reading=reading), False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncompleteTriples)
        tr = solve_triples(sol, starts=starts, warn=False)
    if len(tr) != expected_triples(sol.instance.n):
        return None, True
    return md_second_class(sol, tr), False


@main.command()
@click.option("--catalog", "cat_path", type=click.Path(exists=True), help="solution catalog")
@click.option("--index", default=0, show_default=True)
@click.option("--first-class", "q", type=int, default=None, help="field order q = n+1")
@click.option("--exceptional", type=int, default=None, help="exceptional variant instead of the canonical one")
@click.option("--qq", nargs=2, default=None, help="two forms, e.g. Z3:1 Z7:1")
@click.option("--reading", type=click.Choice(["paired", "printed"]), default="paired", show_default=True)
@click.option("--starts", default=64, show_default=True, help="triple multi-starts per tau")
@click.option("--compare-qq", "compare", default=None, help="G':FORM, e.g. Z7:1")
@click.option("--out", type=click.Path(), default=None)
def mdata(cat_path, index, q, exceptional, qq, reading, starts, compare, out):
    """Build and verify the modular data of a double."""
    sol = None
    if qq:
        md = md_qq(parse_form(qq[0]), parse_form(qq[1]))
    else:
        if cat_path:
            sol = _pick(Catalog.load(cat_path), index)
        elif q is not None:
            sol = canonical_first_class(q) if exceptional is None else exceptional_first_class(q - 1, exceptional)
        else:
            raise click.UsageError("give --catalog, --first-class or --qq")
        md, incomplete = _build_md(sol, starts, reading)
        if incomplete:
            click.echo("triple search incomplete")
            sys.exit(EXIT_INCOMPLETE)
    rep = verify_axioms(md)
    click.echo(f"{md.name}: {md.size} primaries")
    click.echo(_axiom_lines(rep))
    code = EXIT_OK if rep.ok else EXIT_VERIFY
    if compare:
        if not isinstance(sol, SecondClassSolution) or sol.instance.n % 2 == 0:
            raise click.UsageError("--compare-qq needs a second-class solution of odd order")
        Q = quadratic_form_of_pairing(sol.instance.pairing)
        other = md_qq(Q, parse_form(compare))
        hit = match_md(md, other)
        click.echo("MATCH" if hit is not None else "NO MATCH")
        if hit is None:
            code = EXIT_VERIFY
    if out:
        d = md.to_json()
        d["residuals"] = {k: v for k, (_, v) in rep.checks.items()}
        _dump(d, out)
    sys.exit(code)


@main.command()
@click.option("--catalog", "cat_path", type=click.Path(exists=True), required=True)
@click.option("--index", default=0, show_default=True)
@click.option("--starts", default=64, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def triples(cat_path, index, starts, out):
    """Solve for the triples (omega, tau, xi) of a second-class solution."""
    sol = _pick(Catalog.load(cat_path), index)
    if not isinstance(sol, SecondClassSolution):
        raise click.UsageError("triples are defined for second-class solutions")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncompleteTriples)
        tr = solve_triples(sol, starts=starts, warn=False)
    want = expected_triples(sol.instance.n)
    els = sol.instance.elements
    for t in tr:
        click.echo(f"  tau={els[t.tau]} omega={_fmt_c(t.omega)} residual {t.residual:.1e}")
    click.echo(f"{len(tr)} triples (expected {want})")
    _dump(triples_to_json(tr), out)
    sys.exit(EXIT_OK if len(tr) == want else EXIT_INCOMPLETE)


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--group", "group_text", default=None, help="group of the class, to name Z1..Z4'")
@click.option("--dim-cap", default=12, show_default=True)
@click.option("--monomial-only", is_flag=True)
def invariants(path, group_text, dim_cap, monomial_only):
    """Modular invariants of a modular-data file."""
    from .invariants import DimensionCapExceeded, enumerate_invariants, identify, monomial_invariants, \
        named_invariants
    with open(path) as fh:
        md = ModularData.from_json(json.load(fh))
    found = monomial_invariants(md)
    if not monomial_only:
        try:
            found = enumerate_invariants(md, dim_cap=dim_cap) + [m for m in found]
        except DimensionCapExceeded as e:
            click.echo(f"full enumeration skipped: {e}")
    uniq = {}
    for inv in found:
        uniq.setdefault(inv.key(), inv)
    found = list(uniq.values())
    if group_text:
        names = identify(found, named_invariants(md, parse_group(group_text)))
        click.echo("named: " + ", ".join(f"{k}={'found' if v else 'absent'}" for k, v in names.items()))
    for inv in found:
        tag = "monomial" if inv.monomial else ("type I" if inv.type_one else "not shown type I")
        click.echo(f"  {inv.name or '-':4s} [{tag}] {inv.generator(md)}")


@main.command()
@click.option("--first-class", "n1", type=int, default=None, help="n for Z_n + (n-1)")
@click.option("--s", "s", type=click.Choice(["1", "-1"]), default="1")
@click.option("--second-class", "n2", type=int, default=None, help="n = |G|")
def tube(n1, s, n2):
    """Tube-algebra block decomposition."""
    if (n1 is None) == (n2 is None):
        raise click.UsageError("give exactly one of --first-class, --second-class")
    td = tube_first_class(n1, int(s)) if n1 is not None else tube_second_class(n2)
    click.echo(f"{td.label}: {td.describe()}; {td.blocks} blocks, dimension {td.total_dim}")


@main.command()
@click.argument("first", type=click.Path(exists=True))
@click.argument("second", type=click.Path(exists=True))
@click.option("--tol", default=1e-6, show_default=True)
def compare(first, second, tol):
    """Look for a label bijection between two modular-data files."""
    with open(first) as fh:
        a = ModularData.from_json(json.load(fh))
    with open(second) as fh:
        b = ModularData.from_json(json.load(fh))
    pi = match_md(a, b, tol)
    if pi is None:
        click.echo("NO MATCH")
        sys.exit(EXIT_VERIFY)
    click.echo("MATCH")
    for i, j in enumerate(pi):
        click.echo(f"  {label_str(a.labels[i])} -> {label_str(b.labels[j])}")


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--json", "json_out", type=click.Path(), default=None)
def report(path, json_out):
    """Summary of a catalog: per class c, pairing, lambda, tube blocks, Gauss sum."""
    cat = Catalog.load(path)
    rows = []
    for i, s in enumerate(cat.solutions):
        if isinstance(s, FirstClassSolution):
            td = tube_first_class(s.n, s.s)
            rows.append({"index": i, "kind": "first", "name": s.name, "n": s.n, "s": s.s,
                         "tube": td.to_json()})
            click.echo(f"{i}: first class {s.name}, n={s.n}: {td.describe()}")
            continue
        inst = s.instance
        n = inst.n
        lam = 2 * n + n * inst.delta
        td = tube_second_class(n)
        row = {"index": i, "kind": "second", "group": inst.group.name(), "class_id": s.class_id,
               "c": {"re": inst.c.real, "im": inst.c.imag}, "pairing": inst.pairing.label,
               "a_signs": inst.a_signs, "residual": s.residual, "lambda": lam, "tube": td.to_json()}
        if n % 2 == 1:
            g = gauss_sum(quadratic_form_of_pairing(inst.pairing), 1)
            row["gauss_Q"] = {"re": g.real, "im": g.imag}
        rows.append(row)
        click.echo(f"{i}: {inst.group.name()} class {s.class_id} c={_fmt_c(inst.c)} "
                   f"lambda={lam:.6f} residual {s.residual:.1e}; {td.describe()}")
    if not rows:
        click.echo("empty catalog")
    _dump({"rows": rows}, json_out)


if __name__ == "__main__":
    main()
