"""Acceptance criteria, one check per criterion.

Run under pytest (a PASS/FAIL line per criterion is printed in the summary)
or directly with ``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import random
import subprocess
import sys
import time

import pytest

from clusterqp.fdalg import from_relations
from clusterqp.fixture import fixture_names, load_fixture
from clusterqp.genbasis import generic_basis_element, linear_independence_check, module_mod_p, subrep_counts
from clusterqp.homalg import (
    TwoTermComplex,
    canonical_decomposition,
    e_dim,
    e_dim_cokernel,
    generic_sample,
    is_sign_coherent,
    mutate_delta,
)
from clusterqp.laurent import LaurentPoly, parse, substitute
from clusterqp.modrep import hom_dim, injective, is_isomorphic, minimal_projective_presentation, op_algebra, projective, tau_nakayama
from clusterqp.quiver import mutate
from clusterqp.seed import enumerate_clusters, initial_seed, is_laurent_in_cluster, mutate_seed

PAPER_VALUE = "x1*x3^-1 + x1^-1*x2^2*x3^-1 + x1^-1*x3"
PAPER_P1 = ["e1", "c1", "c2", "c1*b1", "c1*b2", "c2*b1", "c2*b2", "c1*b1*a1", "c1*b2*a1",
            "c2*b1*a2", "c1*b2*a1*c2", "c2*b1*a2*c1"]


def _cli_json(*argv):
    cmd = [sys.executable, "-m", "clusterqp.cli", *argv]
    return subprocess.run(cmd, capture_output=True, check=True).stdout


def criterion_01():
    t = time.time()
    out = json.loads(_cli_json("generic-basis", "labardini", "1,0,-1"))
    took = time.time() - t
    ok = parse(out["value"], 3) == parse(PAPER_VALUE, 3) and took < 60
    return ok, f"value {out['value']} ({out['fraction']}) in {took:.1f}s"


def criterion_02():
    alg = load_fixture("labardini").module_algebra()
    f, _ = generic_sample((1, 0, -1), alg)
    M = f.injective_kernel()
    want = {(0, 0, 0): 1, (0, 0, 1): 1, (1, 0, 1): 1}
    got = {p: {e: c for e, c in subrep_counts(module_mod_p(M, p)).items() if c} for p in (2, 3, 5, 7)}
    return M.dims == (1, 0, 1) and all(g == want for g in got.values()), f"kernel dim {M.dims}"


def criterion_03():
    fx = load_fixture("labardini")
    q = fx.quiver
    v = generic_basis_element((1, 0, -1), fx.module_algebra(), q)
    s0 = initial_seed(q)
    seeds = [s0] + [mutate_seed(s0, i) for i in (1, 2, 3)]
    memb = [is_laurent_in_cluster(v, s) for s in seeds]
    return all(memb), f"Laurent in initial + adjacent seeds: {memb}"


def criterion_04():
    q = load_fixture("labardini").quiver
    grid = list(itertools.product(range(-3, 4), repeat=3))
    bad = [(d, i) for d in grid for i in (1, 2, 3) if sum(mutate_delta(d, i, q).g) != sum(d)]
    return len(grid) == 343 and not bad, f"{len(grid)} vectors, {len(bad)} failures"


def criterion_05():
    total, bad = 0, 0
    for name in ("a2", "a3", "labardini"):
        q = load_fixture(name).quiver
        for d in itertools.product(range(-3, 4), repeat=q.n):
            for i in range(1, q.m + 1):
                total += 1
                bad += mutate_delta(mutate_delta(d, i, q), i, mutate(q, i)).g != d
    return not bad, f"{total} checks, {bad} failures"


def criterion_06():
    notes = []
    ok = True
    for name, expected in (("a2", 5), ("a3", 9)):
        fx = load_fixture(name)
        q, alg = fx.quiver, fx.module_algebra()
        vals = {generic_basis_element(d, alg, q) for d in itertools.product(range(-1, 2), repeat=q.n)}
        vals = {v for v in vals if len(list(v.items())) > 1}
        vals |= {LaurentPoly.var(i, q.n) for i in range(1, q.n + 1)}
        cvs = enumerate_clusters(q, 1000).mutable_variables
        ok &= len(cvs) == expected and cvs <= vals
        notes.append(f"{name}: {len(cvs)} cluster variables, contained={cvs <= vals}")
    return ok, "; ".join(notes)


def _deltas(n, count, rng, lo=-2, hi=2):
    out = []
    while len(out) < count:
        d = tuple(rng.randint(lo, hi) for _ in range(n))
        if any(d):
            out.append(d)
    return out


def criterion_07():
    rng = random.Random(7)
    ok, n = True, 0
    for name in fixture_names():
        alg = load_fixture(name).module_algebra()
        for d in _deltas(alg.quiver.n, 50, rng):
            f, _ = generic_sample(d, alg, seed=rng.randrange(2 ** 32))
            g, _ = generic_sample(_deltas(alg.quiver.n, 1, rng)[0], alg, seed=rng.randrange(2 ** 32))
            M = f.cokernel()
            pres = minimal_projective_presentation(M)
            fmin = TwoTermComplex(alg, pres.p1, pres.p0, pres.F)
            h = hom_dim(M, tau_nakayama(M)) if not M.is_zero() else 0
            ok &= e_dim(f, f) == e_dim_cokernel(f, f) and e_dim(f, g) == e_dim_cokernel(f, g)
            ok &= e_dim(fmin, fmin) == h
            n += 1
    return ok, f"{n} deltas over {len(fixture_names())} fixtures"


def criterion_08():
    rng = random.Random(8)
    pairs, bad = 0, 0
    for name in fixture_names():
        alg = load_fixture(name).module_algebra()
        for d in _deltas(alg.quiver.n, 100, rng):
            parts = canonical_decomposition(d, alg, rng.randrange(2 ** 32))
            for a, b in itertools.combinations(parts, 2):
                pairs += 1
                bad += not is_sign_coherent(a, b)
    return not bad, f"{pairs} summand pairs, {bad} failures"


def criterion_09():
    bad = []
    for name in fixture_names():
        fx = load_fixture(name)
        q, alg = fx.quiver, fx.module_algebra()
        for d in itertools.product(range(4), repeat=q.n):
            if generic_basis_element(d, alg, q) != LaurentPoly.monomial(list(d)):
                bad.append((name, d))
    return not bad, f"{len(bad)} failures"


def criterion_10():
    fx = load_fixture("a2")
    q, alg = fx.quiver, fx.module_algebra()
    bad = []
    for i in (1, 2):
        q2 = mutate(q, i)
        alg2 = op_algebra(from_relations(q2, [], fx.bound))
        images = mutate_seed(initial_seed(q), i).vars
        for d in itertools.product(range(-2, 3), repeat=2):
            v2 = generic_basis_element(mutate_delta(d, i, q).g, alg2, q2)
            if substitute(v2, images).to_laurent() != generic_basis_element(d, alg, q):
                bad.append((i, d))
    return not bad, f"50 checks, {len(bad)} mismatches"


def criterion_11():
    fx = load_fixture("a2")
    vals = [generic_basis_element(d, fx.module_algebra(), fx.quiver)
            for d in itertools.product(range(-1, 2), repeat=2)]
    return len(vals) == 9 and linear_independence_check(vals), f"{len(vals)} values"


def criterion_12():
    fx = load_fixture("labardini")
    J = fx.jacobian()
    nf = sorted(map(str, J.normal_forms(target=1)))
    self_inj = all(is_isomorphic(projective(J, v), injective(J, v)) for v in (1, 2, 3))
    ok = J.dim == 36 and nf == sorted(PAPER_P1) and self_inj
    return ok, f"dim {J.dim}, e1A has {len(nf)} normal forms, self-injective={self_inj}"


def criterion_13():
    args = ("generic-basis", "labardini", "1,0,-1", "--seed", "42")
    a, b = _cli_json(*args), _cli_json(*args)
    verify = ("verify", "independence", "--seed", "3")
    c, d = _cli_json(*verify), _cli_json(*verify)
    return a == b and c == d and bool(a), f"{len(a)} + {len(c)} bytes compared"


CRITERIA = {
    1: ("paper example value", criterion_01),
    2: ("submodule census", criterion_02),
    3: ("Laurent in adjacent seeds", criterion_03),
    4: ("index-sum invariance", criterion_04),
    5: ("tropical involution", criterion_05),
    6: ("cluster-variable surjectivity", criterion_06),
    7: ("e-invariant double formula", criterion_07),
    8: ("sign coherence", criterion_08),
    9: ("monomial rule", criterion_09),
    10: ("mutation commutation (A2)", criterion_10),
    11: ("linear independence", criterion_11),
    12: ("Jacobian algebra dimensions", criterion_12),
    13: ("determinism", criterion_13),
}


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, record_property):
    name, check = CRITERIA[num]
    ok, detail = check()
    record_property("detail", detail)
    print(f"criterion {num:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, (name, check) in sorted(CRITERIA.items()):
        ok, detail = check()
        failed += not ok
        print(f"criterion {num:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    sys.exit(1 if failed else 0)
