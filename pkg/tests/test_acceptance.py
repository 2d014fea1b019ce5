"""End-to-end acceptance run.  Each test prints one PASS/FAIL line and then
asserts the same condition, so a failing line is also a failing test."""

import warnings
from functools import lru_cache

import numpy as np

from neargroup.fields import field_of_order, prime_power
from neargroup.first_class import canonical_first_class, catalog, count_first_class, verify_identities
from neargroup.groups import automorphisms, gauss_sum, parse_group, quadratic_form_of_pairing
from neargroup.invariants import (
    commutation_residual,
    enumerate_invariants,
    identify,
    monomial_invariants,
    named_invariants,
)
from neargroup.second_class import classify, equivalent, refine
from neargroup.modular import (
    aff1_double,
    fusion_closed_form,
    match_md,
    md_first_class,
    md_qq,
    solve_zeta,
    verify_axioms,
    verlinde,
)
from neargroup.seeds import (
    load_table,
    match_row,
    qprime_form,
    read_row,
    reading_with_printed_pairing,
    rows_for,
)
from neargroup.triples import IncompleteTriples, expected_triples, md_second_class, solve_triples
from neargroup.tube import tube_first_class, tube_second_class

CLASS_COUNTS = {
    "Z1": 1, "Z2": 2, "Z3": 2, "Z4": 2, "Z5": 3, "Z6": 4, "Z7": 2, "Z8": 8, "Z9": 2, "Z10": 4,
    "Z11": 4, "Z12": 4, "Z13": 4, "Z2xZ2": 1, "Z3xZ3": 1, "Z2xZ6": 2, "Z2xZ4": 4, "Z2^3": 0,
}
FIRST_COUNTS = {1: 2, 2: 3, 3: 2, 4: 1, 6: 1, 7: 2, 8: 1, 10: 1, 12: 1, 15: 1, 16: 1}
SMALL = ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z2xZ2"]
ODD_ROWS = [0, 3, 4, 8, 9, 10, 15, 16, 29, 30, 31, 36, 37, 38, 39, 46, 47, 48, 49]
CONJ_ROWS = [0, 3, 4, 8, 9, 10, 15, 16]

_classes = {}
_triples = {}


def emit(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}")


def classes_of(name):
    if name not in _classes:
        _classes[name] = classify(parse_group(name), starts=2000, seed=42).classes
    return _classes[name]


def triples_of(name, k, starts=64):
    key = (name, k, starts)
    if key not in _triples:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IncompleteTriples)
            _triples[key] = solve_triples(classes_of(name)[k], starts=starts)
    return _triples[key]


@lru_cache(maxsize=None)
def table():
    return load_table()


@lru_cache(maxsize=None)
def printed_row_solution(i):
    return refine(reading_with_printed_pairing(table()[i]).solution())


def odd_pair(i):
    sol = printed_row_solution(i)
    return quadratic_form_of_pairing(sol.instance.pairing), qprime_form(table()[i])


def test_criterion_1_classification_counts(capsys):
    wrong, worst = [], 0.0
    for name, want in CLASS_COUNTS.items():
        got = classes_of(name)
        worst = max([worst] + [s.residual for s in got])
        if len(got) != want:
            wrong.append(f"{name}: {len(got)} (expected {want})")
    ok = not wrong and worst < 1e-9
    emit(capsys, 1, ok, f"{len(CLASS_COUNTS) - len(wrong)}/{len(CLASS_COUNTS)} groups exact, "
                        f"max residual {worst:.1e}" + ("; " + ", ".join(wrong) if wrong else ""))
    assert ok, wrong


def test_criterion_2_table_values(capsys):
    strict_bad, printed_bad, reread_bad, total = [], [], [], 0
    for name in CLASS_COUNTS:
        G = parse_group(name)
        auts = automorphisms(G)
        rows = rows_for(G, table())
        readings = [refine(rd.solution()) for r in rows for rd in read_row(r)]
        for k, s in enumerate(classes_of(name)):
            total += 1
            if not any(match_row(s, r, 1e-6, printed_precision=False) for r in rows):
                strict_bad.append(f"{name}#{k}")
            if not any(match_row(s, r, 1e-6, printed_precision=True) for r in rows):
                printed_bad.append(f"{name}#{k}")
            if not any(equivalent(x, s, auts) is not None for x in readings):
                reread_bad.append(f"{name}#{k}")
    ok = not strict_bad
    # the last two figures are diagnostics only
    emit(capsys, 2, ok, f"{total - len(strict_bad)}/{total} classes match a row within 1e-6 "
                        f"({total - len(printed_bad)}/{total} at printed precision, "
                        f"{total - len(reread_bad)}/{total} under a documented reinterpretation)"
                        + ("; unmatched: " + " ".join(strict_bad) if strict_bad else ""))
    assert ok, strict_bad


def test_criterion_3_first_class_catalog(capsys):
    bad = []
    for n in range(1, 17):
        sols = catalog(n)
        for s in sols:
            rep = verify_identities(s)
            if not rep.ok or rep.max_residual != 0:
                bad.append(f"{s.name} fails")
        want = FIRST_COUNTS.get(n, 0)
        if prime_power(n + 1) is None and want:
            bad.append(f"n={n} table mismatch")
        got = count_first_class(n, certify=n <= 8)
        if got != want:
            bad.append(f"n={n}: {got} (expected {want})")
    ok = not bad
    emit(capsys, 3, ok, "all catalogued solutions exact, counts match for n=1..16" if ok else "; ".join(bad))
    assert ok, bad


def test_criterion_4_axioms(capsys):
    bad, count = [], 0
    firsts = [s for n in range(1, 9) for s in catalog(n)]
    for s in firsts:
        count += 1
        rep = verify_axioms(md_first_class(s))
        if not rep.ok:
            bad.append(f"{s.name}: {rep.failures}")
    for name in SMALL:
        for k, s in enumerate(classes_of(name)):
            count += 1
            tr = triples_of(name, k)
            if len(tr) != expected_triples(s.instance.n):
                bad.append(f"{name}#{k}: {len(tr)} triples")
                continue
            rep = verify_axioms(md_second_class(s, tr))
            if not rep.ok:
                bad.append(f"{name}#{k}: {rep.failures}")
    for i in ODD_ROWS:
        count += 1
        rep = verify_axioms(md_qq(*odd_pair(i)))
        if not rep.ok:
            bad.append(f"qq row {i}: {rep.failures}")
    ok = not bad
    emit(capsys, 4, ok, f"{count - len(bad)}/{count} modular data pass the axioms"
                        + ("; " + "; ".join(bad) if bad else ""))
    assert ok, bad


def test_criterion_5_quadratic_form_match(capsys):
    bad = []
    for i in CONJ_ROWS:
        sol = printed_row_solution(i)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IncompleteTriples)
            tr = solve_triples(sol)
        if len(tr) != expected_triples(sol.instance.n):
            bad.append(f"row {i}: {len(tr)} triples")
            continue
        md = md_second_class(sol, tr)
        if match_md(md, md_qq(*odd_pair(i)), tol=1e-6) is None:
            bad.append(f"row {i}: no match")
    for i in ODD_ROWS:
        Q, Qp = odd_pair(i)
        if Q.group.order not in (9, 11, 13):
            continue
        md = md_qq(Q, Qp)
        N = verlinde(md).N
        if not verify_axioms(md).ok or not np.array_equal(np.rint(N).astype(int),
                                                          fusion_closed_form(Q.group, Qp.group)):
            bad.append(f"row {i}: closed-form check")
    ok = not bad
    emit(capsys, 5, ok, f"rows {CONJ_ROWS} match via triples; n=9,11,13 closed form"
                        + ("; " + "; ".join(bad) if bad else ""))
    assert ok, bad


def test_criterion_6_gauss_condition(capsys):
    worst = 0.0
    for i in ODD_ROWS:
        Q, Qp = odd_pair(i)
        worst = max(worst, abs(gauss_sum(Q, 1) * gauss_sum(Qp, 1) + 1))
    ok = worst < 1e-10
    emit(capsys, 6, ok, f"{len(ODD_ROWS)} odd (Q, Q') pairs, max |alpha alpha' + 1| = {worst:.1e}")
    assert ok


def test_criterion_7_triple_counts(capsys):
    bad, count = [], 0
    for name in ["Z1", "Z2", "Z3", "Z5"]:
        for k, s in enumerate(classes_of(name)):
            count += 1
            want = expected_triples(s.instance.n)
            a, b = triples_of(name, k, 64), triples_of(name, k, 128)
            same = len(a) == len(b) and all(
                x.tau == y.tau and abs(x.omega - y.omega) < 1e-6 for x, y in zip(a, b))
            if len(a) != want or len(b) != want or not same:
                bad.append(f"{name}#{k}: {len(a)}/{len(b)} (expected {want})")
    ok = not bad
    emit(capsys, 7, ok, f"{count - len(bad)}/{count} classes give n(n+3)/2 triples at 64 and 128 starts"
                        + ("; " + "; ".join(bad) if bad else ""))
    assert ok, bad


def test_criterion_8_tube_counts(capsys):
    bad = []
    for n in range(1, 9):
        for s in catalog(n):
            blocks = tube_first_class(n, s.s).blocks
            want = 52 if (n, s.s) == (7, -1) else n * n + n + 2
            size = md_first_class(s).size
            if not blocks == size == want:
                bad.append(f"{s.name}: tube {blocks}, labels {size}, expected {want}")
    for name in SMALL:
        for k, s in enumerate(classes_of(name)):
            n = s.instance.n
            blocks = tube_second_class(n).blocks
            size = md_second_class(s, triples_of(name, k)).size
            if not blocks == size == n * (n + 3):
                bad.append(f"{name}#{k}: tube {blocks}, labels {size}")
    ok = not bad
    emit(capsys, 8, ok, "tube blocks equal label counts" if ok else "; ".join(bad))
    assert ok, bad


def test_criterion_9_modular_invariants(capsys):
    bad = []
    worst = 0.0
    sol = classes_of("Z3")[0]
    md = md_second_class(sol, triples_of("Z3", 0))
    named = named_invariants(md, sol.instance.group)
    invs = enumerate_invariants(md)
    mono = monomial_invariants(md)
    worst = max([worst] + [commutation_residual(md, v.Z) for v in invs + mono])
    found = identify(invs, named)
    if not (found["Z1"] and found["Z2"] and found["Z3"]):
        bad.append(f"Z3: {found}")
    if len(mono) != 1 or not identify(mono, named)["Z3"]:
        bad.append(f"Z3: {len(mono)} monomial invariants")
    for i, want in [(29, "Z4"), (31, "Z4'")]:
        s = printed_row_solution(i)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IncompleteTriples)
            m = md_second_class(s, solve_triples(s))
        mono = monomial_invariants(m)
        worst = max([worst] + [commutation_residual(m, v.Z) for v in mono])
        if not identify(mono, named_invariants(m, s.instance.group)).get(want):
            bad.append(f"row {i}: {want} not found")
    ok = not bad and worst < 1e-8
    emit(capsys, 9, ok, f"Z3: {len(invs)} invariants incl. Z1,Z2,Z3, one monomial; Z4 on Z9; Z4' on Z3xZ3; "
                        f"max commutation residual {worst:.1e}" + ("; " + "; ".join(bad) if bad else ""))
    assert ok, bad


def test_criterion_10_zeta_and_affine_oracle(capsys):
    bad = []
    for q in (2, 3, 4, 5, 7, 8, 9):
        sol = canonical_first_class(q)
        nz = len(solve_zeta(sol))
        if nz != q:
            bad.append(f"q={q}: {nz} zeta solutions")
        if match_md(md_first_class(sol), aff1_double(field_of_order(q))) is None:
            bad.append(f"q={q}: no match with the affine-group double")
    for n in (1, 2, 3, 7):
        mds = [md_first_class(s) for s in catalog(n)]
        for a in range(len(mds)):
            for b in range(a + 1, len(mds)):
                if match_md(mds[a], mds[b]) is not None:
                    bad.append(f"n={n}: classes {a},{b} match")
    ok = not bad
    emit(capsys, 10, ok, "zeta counts n+1, affine-group doubles match, distinct classes distinct"
                         if ok else "; ".join(bad))
    assert ok, bad
