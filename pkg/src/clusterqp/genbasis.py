"""Quiver Grassmannians, cluster characters and the generic basis map.

Euler characteristics of quiver Grassmannians are obtained by counting
``F_p``-points for several primes and interpolating the counting polynomial,
which is then evaluated at ``q = 1``.  Primes are added until either the
degree bound ``sum e_i (d_i - e_i)`` is met with one check prime to spare, or
a lower-degree interpolant predicts the two newest counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .fdalg import FDAlgebra
from .homalg import (
    DEFAULT_HEIGHT,
    DEFAULT_TRIALS,
    DeltaVector,
    GenericStats,
    _as_delta,
    canonical_decomposition,
    generic_sample,
    lift_frozen,
)
from .laurent import LaurentPoly
from .linalg import QQ, mat, rank, to_rows
from .modrep import Module, decompose_with_residues, op_algebra, path_basis
from .quiver import IceQuiver
from .seed import yhat

__all__ = [
    "EnumerationBudgetExceeded",
    "InconsistentCounts",
    "NonSplitSummand",
    "GrassmannProfile",
    "GenericBasisResult",
    "module_mod_p",
    "grassmann_count",
    "subrep_counts",
    "euler_char",
    "f_polynomial",
    "cluster_character",
    "generic_basis_element",
    "module_algebra",
    "linear_independence_check",
    "PRIMES",
]

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
BUDGET = 2_000_000


class EnumerationBudgetExceeded(RuntimeError):
    pass


class InconsistentCounts(ArithmeticError):
    """Point counts are not given by a polynomial of the expected degree."""


class NonSplitSummand(InconsistentCounts):
    """A summand only decomposes over a field extension; its point counts depend on the prime."""


def module_algebra(jacobian: FDAlgebra) -> FDAlgebra:
    """The algebra whose left modules enter cluster characters: right Jacobian modules."""
    return op_algebra(jacobian)


# ---------------------------------------------------------------------------
# linear algebra over F_p on lists of ints


def _rref(rows: list[list[int]], p: int) -> list[list[int]]:
    rows = [[x % p for x in r] for r in rows]
    out: list[list[int]] = []
    if not rows:
        return out
    n = len(rows[0])
    col = 0
    for col in range(n):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[col], p - 2, p)
        piv = [(x * inv) % p for x in piv]
        rows = [[(a - r[col] * b) % p for a, b in zip(r, piv)] if r[col] else r for r in rows]
        out = [[(a - r[col] * b) % p for a, b in zip(r, piv)] if r[col] else r for r in out]
        out.append(piv)
    return out


def _nullspace(rows: list[list[int]], n: int, p: int) -> list[list[int]]:
    """Basis of ``{x : A x = 0}`` for ``A`` given by rows of length ``n``."""
    R = _rref(rows, p)
    pivots = [next(j for j, x in enumerate(r) if x) for r in R]
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for r, pc in zip(R, pivots):
            x[pc] = (-r[f]) % p
        basis.append(x)
    return basis


def _apply(M: list[list[int]], x: list[int], p: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) % p for row in M]


def _rank(rows: list[list[int]], p: int) -> int:
    return len(_rref(rows, p)) if rows else 0


def _subspaces(m: int, k: int, p: int):
    """All ``k``-dimensional subspaces of ``F_p^m``, as RREF row lists."""
    if k < 0 or k > m:
        return
    if k == 0:
        yield []
        return
    for pivots in itertools.combinations(range(m), k):
        slots = [(r, c) for r in range(k) for c in range(pivots[r] + 1, m) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * m for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(slots, vals):
                rows[r][c] = v
            yield rows


def _gauss_binom(m: int, k: int, p: int) -> int:
    if k < 0 or k > m:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (m - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# counting subrepresentations


@dataclass(frozen=True)
class ModP:
    """A representation over ``F_p`` with integer matrices."""

    p: int
    dims: tuple[int, ...]
    arrows: tuple[tuple[int, int, tuple[tuple[int, ...], ...]], ...]  # (source, target, matrix)


def module_mod_p(M: Module, p: int) -> ModP | None:
    """Reduce a rational module mod ``p``; ``None`` if ``p`` is a bad prime.

    Bad: ``p`` divides a denominator, or some basis path acts with smaller rank.
    """
    arrows = []
    for a in M.alg.quiver.arrows:
        rows = []
        for row in to_rows(M.mats[a.id]):
            out = []
            for x in row:
                num, den = int(x.numerator), int(x.denominator)
                if den % p == 0:
                    return None
                out.append(num * pow(den, p - 2, p) % p)
            rows.append(tuple(out))
        arrows.append((a.source, a.target, tuple(rows)))
    red = ModP(p, tuple(M.dims), tuple(arrows))
    for k, path in enumerate(M.alg.basis):
        if not path.arrows:
            continue
        A = M.act_basis(k)
        if A.shape[0] == 0 or A.shape[1] == 0:
            continue
        if rank(A) != _rank([list(r) for r in _act_mod_p(red, path.arrows, M.alg)], p):
            return None
    return red


def _act_mod_p(red: ModP, arrows: Sequence[str], alg: FDAlgebra) -> list[list[int]]:
    by_id = {a.id: m for a, (_, _, m) in zip(alg.quiver.arrows, red.arrows)}
    p = red.p
    first = alg.quiver.arrow(arrows[-1])
    n = red.dims[first.source - 1]
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for aid in reversed(arrows):
        A = by_id[aid]
        out = [[sum(A[i][t] * out[t][j] for t in range(len(out))) % p for j in range(n)] for i in range(len(A))]
    return out


def _vertex_order(red: ModP) -> list[int]:
    n = len(red.dims)
    adj = {v: set() for v in range(1, n + 1)}
    for s, t, _ in red.arrows:
        adj[s].add(t)
        adj[t].add(s)
    order: list[int] = []
    remaining = sorted(range(1, n + 1), key=lambda v: -red.dims[v - 1])
    while remaining:
        # prefer vertices adjacent to chosen ones, larger first
        nxt = next((v for v in remaining if adj[v] & set(order)), remaining[0])
        order.append(nxt)
        remaining.remove(nxt)
    return order


def subrep_counts(red: ModP, target: Sequence[int] | None = None, budget: int = BUDGET) -> dict[tuple[int, ...], int]:
    """Number of subrepresentations over ``F_p`` per dimension vector.

    With ``target`` only that dimension vector is counted.
    """
    p = red.p
    n = len(red.dims)
    order = _vertex_order(red)
    counts: dict[tuple[int, ...], int] = {}
    chosen: dict[int, list[list[int]]] = {}
    work = [0]

    def step(idx: int):
        if idx == n:
            key = tuple(len(chosen[v]) for v in range(1, n + 1))
            counts[key] = counts.get(key, 0) + 1
            return
        v = order[idx]
        d = red.dims[v - 1]
        # lower bound: images of chosen sources; upper bound: preimages of chosen targets
        low: list[list[int]] = []
        cons: list[list[int]] = []
        for s, t, A in red.arrows:
            if t == v and s in chosen:
                low.extend(_apply(A, x, p) for x in chosen[s])
            if s == v and t in chosen:
                ann = _nullspace(chosen[t], red.dims[t - 1], p) if chosen[t] else \
                    [[int(i == j) for j in range(red.dims[t - 1])] for i in range(red.dims[t - 1])]
                for c in ann:
                    cons.append([sum(c[i] * A[i][j] for i in range(len(A))) % p for j in range(d)])
        L = _rref(low, p) if low else []
        R = _nullspace(cons, d, p) if cons else [[int(i == j) for j in range(d)] for i in range(d)]
        # L must lie in R
        if L and cons:
            for x in L:
                if any(sum(c[j] * x[j] for j in range(d)) % p for c in cons):
                    return
        comp = _complement(L, R, p)
        m = len(comp)
        ks = range(len(L), len(L) + m + 1)
        if target is not None:
            ks = [target[v - 1]] if len(L) <= target[v - 1] <= len(L) + m else []
        for k in ks:
            work[0] += _gauss_binom(m, k - len(L), p)
            if work[0] > budget:
                raise EnumerationBudgetExceeded(f"more than {budget} partial subspaces over F_{p}")
            for S in _subspaces(m, k - len(L), p):
                U = list(L) + [[sum(s[i] * comp[i][j] for i in range(m)) % p for j in range(d)] for s in S]
                chosen[v] = U
                step(idx + 1)
                del chosen[v]

    step(0)
    return counts


def _complement(L: list[list[int]], R: list[list[int]], p: int) -> list[list[int]]:
    """Vectors of ``R`` completing a basis of ``L`` to a basis of ``L + R``."""
    cur = _rref(L, p) if L else []
    out = []
    for r in R:
        test = _rref(cur + [r], p)
        if len(test) > len(cur):
            cur = test
            out.append(r)
    return out


def grassmann_count(M: Module | ModP, e: Sequence[int], q: int | None = None) -> int:
    """Number of ``F_q``-points of the quiver Grassmannian ``Gr_e(M)`` (``q`` prime)."""
    if isinstance(M, Module):
        if q is None:
            if M.K == QQ:
                raise ValueError("give the prime q for a rational module")
            q = M.K.mod
        red = _module_to_modp_any(M, q)
    else:
        red = M
    e = tuple(e)
    if any(x < 0 or x > d for x, d in zip(e, red.dims)):
        return 0
    return subrep_counts(red, e).get(e, 0)


def _module_to_modp_any(M: Module, q: int) -> ModP:
    if M.K != QQ:
        if M.K.mod != q:
            raise ValueError(f"module is over F_{M.K.mod}, not F_{q}")
        arrows = tuple((a.source, a.target, tuple(tuple(int(M.K.to_int(x)) % q for x in row)
                                                    for row in to_rows(M.mats[a.id])))
                       for a in M.alg.quiver.arrows)
        return ModP(q, tuple(M.dims), arrows)
    red = module_mod_p(M, q)
    if red is None:
        raise ValueError(f"{q} is a bad prime for this module")
    return red


# ---------------------------------------------------------------------------
# Euler characteristics by interpolation


def _lagrange_at(xs: Sequence[int], ys: Sequence[int], x0: int) -> Fraction:
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = Fraction(yi)
        for j, xj in enumerate(xs):
            if j != i:
                term *= Fraction(x0 - xj, xi - xj)
        total += term
    return total


@dataclass
class GrassmannProfile:
    dims: tuple[int, ...]
    chi: dict[tuple[int, ...], int]
    primes_used: list[int] = field(default_factory=list)
    counts: dict[int, dict[tuple[int, ...], int]] = field(default_factory=dict)

    def nonzero(self) -> list[tuple[int, ...]]:
        return sorted(e for e, c in self.chi.items() if c)


def _profile_single(M: Module, primes: Sequence[int] | None, budget: int) -> GrassmannProfile:
    d = tuple(M.dims)
    boxes = list(itertools.product(*(range(x + 1) for x in d)))
    bound = {e: sum(e_i * (d_i - e_i) for e_i, d_i in zip(e, d)) for e in boxes}
    need = max(bound.values()) + 2
    used, per_prime = [], {}

    def settled(e):
        # either the full degree bound plus a check prime, or a lower-degree fit confirmed twice
        k = len(used)
        if k >= bound[e] + 2:
            return True
        if k < 3:
            return False
        xs, ys = used[:-2], [per_prime[p].get(e, 0) for p in used[:-2]]
        return all(_lagrange_at(xs, ys, p) == per_prime[p].get(e, 0) for p in used[-2:])

    for p in (primes or PRIMES):
        red = module_mod_p(M, p)
        if red is None:
            continue
        per_prime[p] = subrep_counts(red, budget=budget)
        used.append(p)
        if len(used) >= need or all(settled(e) for e in boxes):
            break
    if not all(settled(e) for e in boxes):
        raise InconsistentCounts(f"only {len(used)} usable primes, need up to {need}")
    chi = {}
    for e in boxes:
        De = bound[e] if len(used) >= bound[e] + 2 else len(used) - 3
        xs = used[: De + 1]
        ys = [per_prime[p].get(e, 0) for p in xs]
        for extra in used[De + 1:]:
            pred = _lagrange_at(xs, ys, extra)
            if pred != per_prime[extra].get(e, 0):
                raise InconsistentCounts(f"counts for e={e} are not polynomial of degree <= {De}")
        val = _lagrange_at(xs, ys, 1)
        if val.denominator != 1:
            raise InconsistentCounts(f"non-integral Euler characteristic for e={e}")
        if val:
            chi[e] = int(val)
    return GrassmannProfile(d, chi, used, per_prime)


def f_polynomial(M: Module, primes: Sequence[int] | None = None, budget: int = BUDGET,
                 split: bool = True) -> GrassmannProfile:
    """Euler characteristics of all quiver Grassmannians of ``M``.

    With ``split`` the module is first decomposed; the profile of a direct sum
    is the convolution of the profiles of the summands.
    """
    if M.K != QQ:
        raise ValueError("f_polynomial expects a rational module")
    if M.is_zero():
        return GrassmannProfile(tuple(M.dims), {tuple(M.dims): 1}, [])
    parts = decompose_with_residues(M) if split and M.total_dim > 1 else [(M, 1)]
    acc = {(0,) * len(M.dims): 1}
    used: set[int] = set()
    for part, s in parts:
        if s > 1:
            raise NonSplitSummand(f"summand of dim {list(part.dims)} splits only over a degree-{s} extension")
        prof = _profile_single(path_basis(part), primes, budget)
        used.update(prof.primes_used)
        acc = _convolve(acc, prof.chi)
    return GrassmannProfile(tuple(M.dims), acc, sorted(used))


def _convolve(a: dict, b: dict) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def euler_char(M: Module, e: Sequence[int], primes: Sequence[int] | None = None) -> int:
    """``chi(Gr_e(M))`` for a rational module ``M``."""
    return f_polynomial(M, primes).chi.get(tuple(e), 0)


# ---------------------------------------------------------------------------
# cluster character and the generic basis


def cluster_character(M: Module, ind, q: IceQuiver, primes: Sequence[int] | None = None,
                      profile: GrassmannProfile | None = None) -> LaurentPoly:
    """``x^ind * sum_e chi(Gr_e(M)) * prod_j yhat_j^(e_j)``."""
    ind = _as_delta(ind)
    if len(ind) != q.n or len(M.dims) != q.n:
        raise ValueError("index and module must have one entry per vertex of q")
    prof = profile or f_polynomial(M, primes)
    ys = yhat(q)
    total = LaurentPoly.zero(q.n)
    for e, c in sorted(prof.chi.items()):
        term = LaurentPoly.const(q.n, c)
        for j, ej in enumerate(e):
            if ej:
                term = term * ys[j] ** ej
        total = total + term
    return total * LaurentPoly.monomial(list(ind.g))


@dataclass
class GenericBasisResult:
    delta: DeltaVector
    value: LaurentPoly
    kernel_dims: tuple[int, ...]
    stats: GenericStats
    profile: GrassmannProfile

    def to_json(self) -> dict:
        return {
            "delta": list(self.delta.g),
            "value": str(self.value),
            "kernel_dim": list(self.kernel_dims),
            "submodule_dims": [list(e) for e in self.profile.nonzero()],
            "stats": self.stats.to_json(),
            "primes_used": list(self.profile.primes_used),
        }


def generic_basis_element(delta, alg: FDAlgebra, q: IceQuiver, seed: int = 0,
                          trials: int = DEFAULT_TRIALS, height: int = DEFAULT_HEIGHT,
                          primes: Sequence[int] | None = None, *, details: bool = False):
    """``I(delta)``: cluster character of the kernel of a generic ``I(T1) -> I(T0)``.

    ``alg`` is the algebra of the modules (see :func:`module_algebra`).  A
    vector with one entry per mutable vertex is first lifted over the frozen
    ones.
    """
    d = _as_delta(delta)
    if alg.quiver.n != q.n:
        raise ValueError("algebra and quiver have different vertex counts")
    if len(d) == q.m and q.m < q.n:
        d = lift_frozen(d, q, alg, seed, trials, height)
    elif len(d) != q.n:
        raise ValueError(f"delta needs {q.n} (or {q.m}) entries")
    f, stats = generic_sample(d, alg, trials, seed, height)
    M = f.injective_kernel()
    try:
        prof = f_polynomial(M, primes)
    except NonSplitSummand:
        # the generic kernel is a sum of conjugates: multiply over the canonical decomposition
        summands = canonical_decomposition(d, alg, seed, trials, height)
        if len(summands) < 2:
            raise
        prof = GrassmannProfile(tuple(M.dims), {(0,) * q.n: 1}, [])
        used: set[int] = set()
        for part in summands:
            r = generic_basis_element(part, alg, q, seed, trials, height, primes, details=True)
            prof.chi = _convolve(prof.chi, r.profile.chi)
            used.update(r.profile.primes_used)
        prof.primes_used = sorted(used)
        if prof.chi.get(tuple(M.dims)) != 1:
            raise InconsistentCounts("summand kernels do not add up to the generic kernel")
    value = cluster_character(M, d, q, profile=prof)
    if details:
        return GenericBasisResult(d, value, tuple(M.dims), stats, prof)
    return value


def linear_independence_check(values: Sequence[LaurentPoly]) -> bool:
    """Exact rank of the coefficient matrix equals the number of values."""
    if not values:
        return True
    nv = values[0].nvars
    if any(v.nvars != nv for v in values):
        raise ValueError("values live in different numbers of variables")
    monos = sorted({e for v in values for e, _ in v.items()})
    if len(monos) < len(values):
        return False
    idx = {e: i for i, e in enumerate(monos)}
    rows = []
    for v in values:
        row = [0] * len(monos)
        for e, c in v.items():
            row[idx[e]] = c
        rows.append(row)
    return rank(mat(rows, QQ, (len(rows), len(monos)))) == len(values)
