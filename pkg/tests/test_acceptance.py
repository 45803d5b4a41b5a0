"""Acceptance criteria, one test each.

Every test records a line "CRITERION k: PASS|FAIL detail" that is printed
immediately and repeated in the terminal summary.
"""

import io
import json
import random
import time

import pytest

import conftest
from hyperdescent.cli import main
from hyperdescent.descent import (
    _local_check,
    compare_cover_limits,
    enumerate_presheaves,
    limit_over_hypercover,
    maps_presheaf,
    random_presheaf,
    roundtrip_theorem_check,
)
from hyperdescent.homology import first_nonzero, reduced_homology
from hyperdescent.homotopy import OBSTRUCTED, verify_sym_coinitiality_instance
from hyperdescent.hypercover import (
    cech_from_cover,
    check_hypercover,
    refine_to_basis,
    super_slice,
    trivial_hypercover,
)
from hyperdescent.maps import FinMap, fin_maps
from hyperdescent.simplicial import boundary_simplex, is_trivial_kan_up_to, standard_simplex
from hyperdescent.symmetrization import build_Cf, minimal_representative, symmetrize
from hyperdescent.topology import Basis, covers_of, minimal_basis, pseudocircle, sierpinski

from oracles import brute_hypercover_limit, closure_classes


def record(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def nonempty(space):
    return [U for U in space.opens if U]


def two_cover_cech(N):
    X = pseudocircle()
    return cech_from_cover(X, [X.mask("abc"), X.mask("abd")], N)


def test_criterion_1_normal_forms_match_closure_classes():
    start = time.perf_counter()
    complexes = {
        "simplex0": standard_simplex(0, 4),
        "simplex1": standard_simplex(1, 4),
        "simplex2": standard_simplex(2, 4),
        "boundary2": boundary_simplex(2, 4),
        "cech2": two_cover_cech(3).spine,
    }
    problems = []
    for name, K in complexes.items():
        S = symmetrize(K, 3)
        for n in range(4):
            classes = closure_classes(K, n, min(n + 1, K.max_dim))
            reps = []
            for cls in classes:
                found = {minimal_representative(K, tau, FinMap(n, tau.dim, f)) for tau, f in cls}
                if len(found) != 1:
                    problems.append(f"{name} level {n}: class with {len(found)} representatives")
                reps.extend(found)
            if len(set(reps)) != len(classes) or set(reps) != set(S.level(n)):
                problems.append(f"{name} level {n}: {len(S.level(n))} normal forms, {len(classes)} classes")
    elapsed = time.perf_counter() - start
    record(1, not problems and elapsed < 10, f"{len(complexes)} complexes, levels 0-3, {elapsed:.2f}s "
           + ("; ".join(problems[:3]) if problems else "bijective"))


def test_criterion_2_edge_symmetrization_sizes():
    K = standard_simplex(1, 3)
    S = symmetrize(K, 1)
    sizes = (len(S.level(0)), len(S.level(1)))
    oracle = (len(closure_classes(K, 0, 1)), len(closure_classes(K, 1, 2)))
    record(2, sizes == oracle == (2, 4), f"sizes {sizes}, closure oracle {oracle}")


def test_criterion_3_cf_homology_vanishes():
    start = time.perf_counter()
    bad = []
    count = 0
    for n in range(4):
        for l in range(4):
            for f in fin_maps(n, l):
                count += 1
                groups = reduced_homology(build_Cf(f, 4), 3)
                assert all(g.exact for g in groups)
                g = first_nonzero(groups)
                if g is not None:
                    bad.append((f.values, str(g)))
    elapsed = time.perf_counter() - start
    record(3, not bad and elapsed < 60, f"{count} maps, degrees <= 3, {elapsed:.2f}s, {len(bad)} nonvanishing")


def test_criterion_4_cech_hypercovers_pass_and_mutation_fails():
    checked = 0
    failures = []
    for space in (sierpinski(), pseudocircle()):
        for U in space.opens:
            for cover in covers_of(space.opens, U):
                H = cech_from_cover(space, list(cover), 3, target=U)
                checked += 1
                if not check_hypercover(H, 3)[0]:
                    failures.append(space.show(U))
    X = pseudocircle()
    H = two_cover_cech(3)
    k = H.spine.labels[1].index((0, 1))
    ok, w = check_hypercover(H.with_assignment({(1, k): X.mask("a")}), 3)
    witness_ok = (not ok and w["n"] == 1 and w["lhs"] == X.mask("a") and w["rhs"] == X.mask("ab")
                  and {f.core for f in w["sphere"].facets} == {0, 1})
    record(4, not failures and witness_ok,
           f"{checked} Cech hypercovers at N=3, {len(failures)} failing; mutated edge witness "
           + (f"lhs {X.show(w['lhs'])} rhs {X.show(w['rhs'])}" if w else "missing"))


def test_criterion_5_refinement_soundness():
    X = pseudocircle()
    B = minimal_basis(X)
    bases = []
    for U in nonempty(X):
        bases.append(trivial_hypercover(X, U, 2))
        for cover in covers_of(nonempty(X), U):
            if len(cover) > 1:
                bases.append(cech_from_cover(X, list(cover), 2, target=U))
    problems = 0
    for H in bases:
        R = refine_to_basis(H, B, 2)
        if not (check_hypercover(R, 2)[0] and R.opens_used() <= set(B.members)
                and R.check_refinement() is None and R.check_projection() is None):
            problems += 1
    record(5, problems == 0, f"{len(bases)} hypercovers refined at levels <= 2, {problems} unsound")


def test_criterion_6_super_slices_trivially_kan():
    results = []
    for space in (sierpinski(), pseudocircle()):
        B = minimal_basis(space)
        R = refine_to_basis(trivial_hypercover(space, space.full, 3), B, 3)
        for B0 in B.members:
            ok, _ = is_trivial_kan_up_to(super_slice(R, B0), 3)
            results.append((space.show(B0), ok))
    record(6, all(ok for _, ok in results),
           ", ".join(f"{name}:{'kan' if ok else 'not kan'}" for name, ok in results))


def capped_suite(space, samples=300, seed=0):
    """Every presheaf at cap 1, every sheaf at cap 2, and seeded samples at cap 2."""
    suite = list(enumerate_presheaves(space, space.opens, 1))
    suite += list(enumerate_presheaves(space, space.opens, 2,
                                       accept=_local_check("sheaf", None, space.opens, True)))
    rng = random.Random(seed)
    drawn = 0
    while drawn < samples:
        F = random_presheaf(space, space.opens, 2, rng)
        if F is not None:
            suite.append(F)
            drawn += 1
    return suite


def test_criterion_7_cover_limit_reduction():
    X = pseudocircle()
    suite = capped_suite(X)
    covers = [list(c) for U in nonempty(X) for c in covers_of(nonempty(X), U)]
    bad = 0
    for F in suite:
        for cover in covers:
            if not compare_cover_limits(F, cover).ok:
                bad += 1
    record(7, bad == 0, f"{len(suite)} presheaves x {len(covers)} covers, {bad} mismatches")


def test_criterion_8_sierpinski_all_opens_roundtrip():
    X = sierpinski()
    start = time.perf_counter()
    reports = [roundtrip_theorem_check(X, Basis.all_opens(X), cap=2, condition=c)
               for c in ("hypersheaf", "sheaf")]
    elapsed = time.perf_counter() - start
    ok = all(r.ok and r.basis_accepted > 0 and r.space_accepted > 0 for r in reports) and elapsed < 60
    record(8, ok, "; ".join(
        f"{r.condition}: {r.basis_accepted} basis, {r.space_accepted} space, {len(r.failures)} failures"
        for r in reports) + f", {elapsed:.2f}s")


def test_criterion_9_pseudocircle_minimal_basis_roundtrip():
    X = pseudocircle()
    start = time.perf_counter()
    r = roundtrip_theorem_check(X, minimal_basis(X), cap=2, samples=200, seed=0)
    elapsed = time.perf_counter() - start
    ok = r.ok and r.basis_accepted >= 200 and r.space_accepted > 0 and elapsed < 300
    record(9, ok, f"{r.basis_accepted} sampled basis hypersheaves, {r.space_accepted} hypersheaves on all "
           f"opens, {len(r.failures)} failures, {elapsed:.2f}s")


def test_criterion_10_counterexample_command():
    out = io.StringIO()
    code = main(["counterexample", "--format", "structured"], out)
    rec = json.loads(out.getvalue().splitlines()[-1])
    second = rec["second_half"] or {}
    ok = (code == 0 and rec["ok"] and rec["first_half"]["aggregate"] == "Coinitial"
          and second.get("aggregate") == "NotCoinitial" and second.get("empty_slices"))
    record(10, bool(ok), f"exit {code}, I->J {rec['first_half']['aggregate']}, slices over "
           f"{rec['final_vertex']} {second.get('aggregate')}, empty comma over {second.get('empty_slices')}")


def test_criterion_11_edge_reduction_matches_brute_limit():
    X = pseudocircle()
    B = minimal_basis(X)
    hypercovers = {
        "cech abc,abd": two_cover_cech(3),
        "cech abc,abd,ab": cech_from_cover(X, [X.mask("abc"), X.mask("abd"), X.mask("ab")], 3),
        "cech a,b of ab": cech_from_cover(X, [X.mask("a"), X.mask("b")], 3, target=X.mask("ab")),
        "trivial": trivial_hypercover(X, X.full, 3),
        "refined trivial abc": refine_to_basis(trivial_hypercover(X, X.mask("abc"), 3), B, 3),
        "refined cech": refine_to_basis(two_cover_cech(3), B, 3),
    }
    rng = random.Random(11)
    presheaves = [maps_presheaf(X, X.opens)]
    while len(presheaves) < 4:
        F = random_presheaf(X, X.opens, 2, rng)
        if F is not None:
            presheaves.append(F)
    mismatches = []
    for name, H in hypercovers.items():
        for F in presheaves:
            if set(limit_over_hypercover(F, H).families) != brute_hypercover_limit(F, H, 3):
                mismatches.append(name)
    record(11, not mismatches, f"{len(hypercovers)} hypercovers x {len(presheaves)} presheaves, "
           f"mismatches: {sorted(set(mismatches)) or 'none'}")


def test_criterion_12_symmetrization_slices_not_obstructed():
    counts = {}
    for name, K in (("simplex0", standard_simplex(0, 3)), ("simplex1", standard_simplex(1, 3)),
                    ("boundary1", boundary_simplex(1, 3))):
        out = verify_sym_coinitiality_instance(K, 2)
        counts[name] = out["counts"]
    obstructed = sum(c[OBSTRUCTED] for c in counts.values())
    record(12, obstructed == 0, "; ".join(f"{k}: {v}" for k, v in counts.items()))
