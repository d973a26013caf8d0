"""Command-line interface: ``clusterqp mutate | seed | generic-basis | verify``.

Exit codes: 0 success, 1 logical failure or bad input file, 2 usage error
(including mutation at a frozen or missing vertex), 3 genericity not stabilized.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import re
import sys
from typing import Sequence

from .fdalg import from_relations
from .fixture import FixtureError, fixture_names, load_fixture
from .genbasis import (
    generic_basis_element,
    linear_independence_check,
    module_mod_p,
    subrep_counts,
)
from .homalg import (
    DEFAULT_HEIGHT,
    DEFAULT_TRIALS,
    DeltaVector,
    NotStabilized,
    TwoTermComplex,
    canonical_decomposition,
    e_dim,
    e_dim_cokernel,
    generic_sample,
    is_sign_coherent,
    mutate_delta,
)
from .laurent import LaurentPoly, format_fraction, parse, substitute
from .modrep import hom_dim, minimal_projective_presentation, op_algebra, tau_nakayama
from .quiver import FrozenVertexError, QuiverError, exchange_matrix, mutate
from .seed import initial_seed, is_laurent_in_cluster, mutate_path, mutate_seed

__all__ = ["main", "build_parser", "run_suite", "SUITES"]

_NEG = re.compile(r"^-\d[\d,\s-]*$")


class UsageError(Exception):
    pass


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _parse_ints(tokens: Sequence[str]) -> list[int]:
    out = []
    for tok in tokens:
        for part in re.split(r"[\s,]+", tok.strip()):
            if part:
                try:
                    out.append(int(part))
                except ValueError as exc:
                    raise UsageError(f"not an integer: {part!r}") from exc
    return out


def _parse_delta(text: str) -> list[int]:
    text = text.strip()
    if text.startswith("{"):
        return list(DeltaVector.from_json(json.loads(text)).g)
    if text.startswith("["):
        return [int(x) for x in json.loads(text)]
    return _parse_ints([text])


def _primes(text: str | None):
    if not text:
        return None
    return [int(p) for p in re.split(r"[\s,]+", text.strip()) if p]


# ---------------------------------------------------------------------------
# commands


def cmd_mutate(args) -> dict:
    q = load_fixture(args.quiver).quiver
    for i in _parse_ints(args.vertices):
        q = mutate(q, i)
    return {"quiver": q.to_json(), "b": exchange_matrix(q)}


def cmd_seed(args) -> dict:
    q = load_fixture(args.quiver).quiver
    s = mutate_path(initial_seed(q), _parse_ints(args.vertices))
    out = s.to_json()
    out["fractions"] = [format_fraction(v) for v in s.vars]
    return out


def cmd_generic_basis(args) -> dict:
    fx = load_fixture(args.fixture)
    delta = _parse_delta(args.delta)
    alg = fx.module_algebra(args.backend, args.bound)
    res = generic_basis_element(delta, alg, fx.quiver, seed=args.seed, trials=args.trials,
                                height=args.height, primes=_primes(args.primes), details=True)
    out = res.to_json()
    out["fixture"] = fx.name
    out["fraction"] = format_fraction(res.value)
    out["seed"] = args.seed
    return out


# ---------------------------------------------------------------------------
# verification suites


def _check(name: str, ok: bool, **detail) -> dict:
    return {"criterion": name, "pass": bool(ok), **detail}


def suite_paper_example(args) -> list[dict]:
    fx = load_fixture("labardini")
    alg = fx.module_algebra(args.backend, args.bound)
    q = fx.quiver
    res = generic_basis_element((1, 0, -1), alg, q, seed=args.seed, trials=args.trials,
                                height=args.height, details=True)
    expected = parse("x1*x3^-1 + x1^-1*x2^2*x3^-1 + x1^-1*x3", 3)
    out = [_check("value", res.value == expected, value=str(res.value), fraction=format_fraction(res.value))]
    f, _ = generic_sample((1, 0, -1), alg, args.trials, args.seed, args.height)
    M = f.injective_kernel()
    want = [(0, 0, 0), (0, 0, 1), (1, 0, 1)]
    census = {}
    for p in (2, 3, 5, 7):
        red = module_mod_p(M, p)
        census[str(p)] = sorted((e, c) for e, c in subrep_counts(red).items() if c) if red else None
    ok = M.dims == (1, 0, 1) and all(c == [(e, 1) for e in want] for c in census.values())
    out.append(_check("submodule-census", ok, kernel_dim=list(M.dims),
                      census={p: [list(e) for e, _ in c] if c else None for p, c in census.items()}))
    s0 = initial_seed(q)
    seeds = [s0] + [mutate_seed(s0, i) for i in q.vertices if i <= q.m]
    memb = [is_laurent_in_cluster(res.value, s) for s in seeds]
    out.append(_check("upper-cluster-evidence", all(memb), seeds=[list(s.history) for s in seeds], laurent=memb))
    return out


def _random_deltas(n: int, count: int, rng: random.Random, lo: int = -2, hi: int = 2) -> list[tuple[int, ...]]:
    out = []
    while len(out) < count:
        d = tuple(rng.randint(lo, hi) for _ in range(n))
        if any(d):
            out.append(d)
    return out


def suite_invariants(args) -> list[dict]:
    names = fixture_names() if args.fixtures is None else [n for n in args.fixtures.split(",") if n]
    rng = random.Random(args.seed)
    out = []
    for name in names:
        fx = load_fixture(name)
        q = fx.quiver
        alg = fx.module_algebra(args.backend, args.bound)
        # tropical involution on a grid
        grid = list(itertools.product(range(-2, 3), repeat=q.n))
        inv_ok = all(mutate_delta(mutate_delta(d, i, q), i, mutate(q, i)).g == d
                     for d in grid for i in range(1, q.m + 1))
        out.append(_check(f"{name}:tropical-involution", inv_ok, vectors=len(grid)))
        # E-invariant formulas
        e_ok, n_e = True, 0
        for d in _random_deltas(q.n, args.samples, rng):
            f, _ = generic_sample(d, alg, args.trials, rng.randrange(2 ** 32), args.height)
            e1, e2 = e_dim(f, f), e_dim_cokernel(f, f)
            M = f.cokernel()
            pres = minimal_projective_presentation(M)
            h = hom_dim(M, tau_nakayama(M)) if not M.is_zero() else 0
            fmin = TwoTermComplex(alg, pres.p1, pres.p0, pres.F)
            e3 = e_dim(fmin, fmin)
            e_ok &= (e1 == e2) and (e3 == h)
            n_e += 1
        out.append(_check(f"{name}:e-invariant-formulas", e_ok, samples=n_e))
        # sign coherence of canonical summands
        sc_ok = True
        for d in _random_deltas(q.n, args.samples, rng, -1, 1):
            parts = canonical_decomposition(d, alg, rng.randrange(2 ** 32), args.trials, args.height)
            sc_ok &= all(is_sign_coherent(a, b) for a, b in itertools.combinations(parts, 2))
        out.append(_check(f"{name}:sign-coherence", sc_ok, samples=args.samples))
        # monomial rule
        mono_ok = True
        for d in itertools.product(range(0, 4), repeat=q.n):
            v = generic_basis_element(d, alg, q, seed=args.seed)
            mono_ok &= v == LaurentPoly.monomial(list(d))
        out.append(_check(f"{name}:monomial-rule", mono_ok))
    return out


def suite_mutation_commutes(args) -> list[dict]:
    fx = load_fixture("a2")
    q = fx.quiver
    alg = fx.module_algebra(args.backend, args.bound)
    out = []
    for i in range(1, q.m + 1):
        q2 = mutate(q, i)
        alg2 = op_algebra(from_relations(q2, [], fx.bound))
        images = mutate_seed(initial_seed(q), i).vars
        bad = []
        for d in itertools.product(range(-2, 3), repeat=q.n):
            v = generic_basis_element(d, alg, q, seed=args.seed)
            d2 = mutate_delta(d, i, q)
            v2 = generic_basis_element(d2.g, alg2, q2, seed=args.seed)
            if substitute(v2, images).to_laurent() != v:
                bad.append(list(d))
        out.append(_check(f"a2:mu{i}", not bad, mismatches=bad))
    return out


def suite_independence(args) -> list[dict]:
    fx = load_fixture("a2")
    alg = fx.module_algebra(args.backend, args.bound)
    grid = list(itertools.product(range(-1, 2), repeat=2))
    vals = [generic_basis_element(d, alg, fx.quiver, seed=args.seed) for d in grid]
    ok = linear_independence_check(vals)
    return [_check("a2:independence", ok, size=len(vals),
                   values={",".join(map(str, d)): str(v) for d, v in zip(grid, vals)})]


SUITES = {
    "paper-example": suite_paper_example,
    "invariants": suite_invariants,
    "mutation-commutes-acyclic": suite_mutation_commutes,
    "independence": suite_independence,
}


def run_suite(name: str, args) -> dict:
    results = SUITES[name](args)
    return {"suite": name, "pass": all(r["pass"] for r in results), "results": results}


def cmd_verify(args) -> dict:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    return run_suite(args.suite, args)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (64-bit)")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="entry bound for random maps")
    common.add_argument("--primes", default=None, help="comma-separated primes for point counts")
    common.add_argument("--bound", type=int, default=None, help="path-length bound for the algebra")
    common.add_argument("--backend", choices=("potential", "relations"), default="potential")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.set_defaults(pretty=False)

    p = argparse.ArgumentParser(prog="clusterqp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    m = sub.add_parser("mutate", parents=[common], help="mutate a quiver along a vertex sequence")
    m.add_argument("quiver")
    m.add_argument("vertices", nargs="*")
    m.set_defaults(func=cmd_mutate)
    s = sub.add_parser("seed", parents=[common], help="mutate the initial seed")
    s.add_argument("quiver")
    s.add_argument("vertices", nargs="*")
    s.set_defaults(func=cmd_seed)
    g = sub.add_parser("generic-basis", parents=[common], help="evaluate I(delta)")
    g.add_argument("fixture")
    g.add_argument("delta", help='e.g. "1,0,-1" or \'{"g":[1,0,-1]}\'')
    g.set_defaults(func=cmd_generic_basis)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", help=", ".join(SUITES))
    v.add_argument("--fixtures", default=None, help="comma-separated fixtures (invariants suite)")
    v.add_argument("--samples", type=int, default=50, help="random vectors per fixture")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # let negative vectors through as positionals: "generic-basis a2 -1,-1"
    argv = [" " + a if _NEG.match(a) else a for a in argv]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except (UsageError, FrozenVertexError) as exc:
        print(_dump({"error": str(exc)}, args.pretty), file=sys.stderr)
        return 2
    except NotStabilized as exc:
        diag = {"error": str(exc), "stats": exc.stats.to_json() if exc.stats else None}
        print(_dump(diag, args.pretty))
        return 3
    except (FixtureError, QuiverError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(_dump({"error": str(exc)}, args.pretty), file=sys.stderr)
        return 1
    print(_dump(out, args.pretty))
    if args.command == "verify" and not out["pass"]:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
