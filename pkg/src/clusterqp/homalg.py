"""Two-term complexes of projectives, E-invariants and generic presentations.

A vector ``delta`` in ``Z^n`` stands for ``[P_+] - [P_-]``.  Complexes are maps
``(+) P_p1 -> (+) P_p0`` given by A-matrices (see :mod:`clusterqp.modrep`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .fdalg import FDAlgebra, Vector
from .linalg import QQ, DomainMatrix, block_diag, eye, kernel_basis, mat, rank, solve, to_rows
from .modrep import (
    DecompositionError,
    _charpoly_factors,
    _fitting_split,
    _residue_degree,
    Module,
    _vector_to_element,
    amatrix_morphism,
    cokernel,
    hom_dim,
    kernel,
    nakayama_morphism,
    projective,
    projective_cover,
    projective_sum,
    submodule,
    tau_nakayama,
    ModuleMorphism,
    direct_sum,
)
from .quiver import FrozenVertexError, IceQuiver

__all__ = [
    "DeltaVector",
    "TwoTermComplex",
    "GenericStats",
    "NotStabilized",
    "delta_split",
    "random_complex",
    "e_dim",
    "e_dim_cokernel",
    "generic_sample",
    "canonical_decomposition",
    "is_sign_coherent",
    "mutate_delta",
    "project_frozen",
    "lift_frozen",
    "DEFAULT_HEIGHT",
    "DEFAULT_TRIALS",
]

DEFAULT_HEIGHT = 97
DEFAULT_TRIALS = 8


class NotStabilized(RuntimeError):
    """Sampling did not reach a stable minimum within the trial budget."""

    def __init__(self, msg: str, stats: "GenericStats | None" = None):
        super().__init__(msg)
        self.stats = stats


@dataclass(frozen=True)
class DeltaVector:
    g: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(x) for x in self.g))

    def __len__(self) -> int:
        return len(self.g)

    def __iter__(self):
        return iter(self.g)

    def __getitem__(self, i):
        return self.g[i]

    def __add__(self, other: "DeltaVector") -> "DeltaVector":
        return DeltaVector(tuple(a + b for a, b in zip(self.g, other.g)))

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for x in self.g)

    def to_json(self) -> dict:
        return {"g": list(self.g)}

    @classmethod
    def from_json(cls, data: dict) -> "DeltaVector":
        return cls(tuple(data["g"]))


def _as_delta(d) -> DeltaVector:
    return d if isinstance(d, DeltaVector) else DeltaVector(tuple(d))


def delta_split(delta) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(P0 vertices, P1 vertices)`` with multiplicity, from the positive and negative parts."""
    d = _as_delta(delta)
    p0 = tuple(v for v, x in enumerate(d.g, start=1) for _ in range(max(x, 0)))
    p1 = tuple(v for v, x in enumerate(d.g, start=1) for _ in range(max(-x, 0)))
    return p0, p1


@dataclass(frozen=True, eq=False)
class TwoTermComplex:
    alg: FDAlgebra
    p1: tuple[int, ...]
    p0: tuple[int, ...]
    F: tuple[tuple[Vector, ...], ...]

    @property
    def delta(self) -> DeltaVector:
        g = [0] * self.alg.quiver.n
        for v in self.p0:
            g[v - 1] += 1
        for v in self.p1:
            g[v - 1] -= 1
        return DeltaVector(tuple(g))

    def morphism(self) -> ModuleMorphism:
        return amatrix_morphism(self.alg, self.p1, self.p0, self.F)

    def injective_morphism(self) -> ModuleMorphism:
        return nakayama_morphism(self.alg, self.p1, self.p0, self.F)

    def cokernel(self) -> Module:
        return cokernel(self.morphism())[0]

    def injective_kernel(self) -> Module:
        return kernel(self.injective_morphism())[0]

    def injective_kernel_dims(self) -> tuple[int, ...]:
        f = self.injective_morphism()
        return tuple(m.shape[1] - rank(m) for m in f.maps)

    def to_json(self) -> dict:
        return {
            "p1": list(self.p1),
            "p0": list(self.p0),
            "F": [[{str(self.alg.basis[k]): _frac_json(c) for k, c in sorted(e.items())} for e in row]
                  for row in self.F],
        }


def _frac_json(c: Fraction):
    return int(c) if c.denominator == 1 else str(c)


def random_complex(alg: FDAlgebra, p1: Sequence[int], p0: Sequence[int], rng: random.Random,
                   height: int = DEFAULT_HEIGHT) -> TwoTermComplex:
    """Independent uniform coordinates in ``[-H, H]`` on the Hom basis."""
    F = []
    for i in p1:
        row = []
        for j in p0:
            elem = {}
            for k in alg.between(i, j):
                c = rng.randint(-height, height)
                if c:
                    elem[k] = Fraction(c)
            row.append(elem)
        F.append(tuple(row))
    return TwoTermComplex(alg, tuple(p1), tuple(p0), tuple(F))


# ---------------------------------------------------------------------------
# E-invariant


def _hom_coords(alg: FDAlgebra, rows: Sequence[int], cols: Sequence[int]):
    """Coordinate layout of ``Hom((+) P_rows, (+) P_cols)``: (r, c, basis index) -> position."""
    pos = {}
    for r, i in enumerate(rows):
        for c, j in enumerate(cols):
            for k in alg.between(i, j):
                pos[(r, c, k)] = len(pos)
    return pos


def e_dim(f: TwoTermComplex, g: TwoTermComplex) -> int:
    """``dim E(f, g)``: ``Hom(P1^f, P0^g)`` modulo ``{F H0 + H1 G}``."""
    alg = f.alg
    target = _hom_coords(alg, f.p1, g.p0)
    if not target:
        return 0
    cols: list[dict[int, Fraction]] = []
    # h0 in Hom(P0^f, P0^g): contributes F * H0
    for a, i in enumerate(f.p0):
        for c, j in enumerate(g.p0):
            for k in alg.between(i, j):
                col: dict[int, Fraction] = {}
                for r in range(len(f.p1)):
                    if f.F[r][a]:
                        for kk, v in alg.mul(f.F[r][a], {k: Fraction(1)}).items():
                            p = target[(r, c, kk)]
                            col[p] = col.get(p, 0) + v
                cols.append(col)
    # h1 in Hom(P1^f, P1^g): contributes H1 * G
    for r, i in enumerate(f.p1):
        for b, j in enumerate(g.p1):
            for k in alg.between(i, j):
                col = {}
                for c in range(len(g.p0)):
                    if g.F[b][c]:
                        for kk, v in alg.mul({k: Fraction(1)}, g.F[b][c]).items():
                            p = target[(r, c, kk)]
                            col[p] = col.get(p, 0) + v
                cols.append(col)
    return len(target) - _sparse_rank(cols, len(target))


def _sparse_rank(cols: list[dict[int, Fraction]], nrows: int) -> int:
    cols = [{k: v for k, v in c.items() if v} for c in cols]
    cols = [c for c in cols if c]
    if not cols:
        return 0
    M = DomainMatrix({j: {k: QQ(v.numerator, v.denominator) for k, v in c.items()} for j, c in enumerate(cols)},
                     (len(cols), nrows), QQ)
    return M.to_dense().rank()


def e_dim_cokernel(f: TwoTermComplex, g: TwoTermComplex) -> int:
    """Same invariant as ``dim coker(Hom(P0^f, M) -> Hom(P1^f, M))`` with ``M = coker g``."""
    M = g.cokernel()
    tgt = sum(M.dim(i) for i in f.p1)
    if tgt == 0:
        return 0
    blocks = []
    for r, i in enumerate(f.p1):
        row = [M.act(f.F[r][a], j, i) for a, j in enumerate(f.p0)]
        blocks.append(row)
    # assemble the block matrix Hom(P0, M) -> Hom(P1, M)
    src = sum(M.dim(j) for j in f.p0)
    if src == 0:
        return tgt
    rows = []
    for r, i in enumerate(f.p1):
        parts = [to_rows(b) for b in blocks[r]]
        for t in range(M.dim(i)):
            rows.append(sum((p[t] for p in parts), []))
    return tgt - rank(mat(rows, QQ, (tgt, src)))


# ---------------------------------------------------------------------------
# generic sampling


@dataclass
class GenericStats:
    delta: DeltaVector
    samples: int
    min_kernel_dim: tuple[int, ...]
    e_self: int
    hom_tau: int | None = None
    stable: bool = True
    signatures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "delta": list(self.delta.g),
            "samples": self.samples,
            "min_kernel_dim": list(self.min_kernel_dim),
            "e_self": self.e_self,
            "hom_tau": self.hom_tau,
            "stable": self.stable,
        }


def generic_sample(delta, alg: FDAlgebra, trials: int = DEFAULT_TRIALS, seed: int = 0,
                   height: int = DEFAULT_HEIGHT, *, with_hom_tau: bool = False,
                   strict: bool = True) -> tuple[TwoTermComplex, GenericStats]:
    """Sample ``f in Hom(P1, P0)`` and keep the one minimizing (kernel dims of ``nu f``, ``e(f, f)``).

    Stops once two consecutive samples both attain the running minimum.  With
    ``strict`` a :class:`NotStabilized` is raised when that never happens.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = _as_delta(delta)
    if len(d) != alg.quiver.n:
        raise ValueError(f"delta has {len(d)} entries, the quiver has {alg.quiver.n} vertices")
    p0, p1 = delta_split(d)
    rng = random.Random(seed)
    best = None
    best_sig = None
    sigs = []
    hits = []
    for t in range(trials):
        f = random_complex(alg, p1, p0, rng, height)
        sig = (f.injective_kernel_dims(), e_dim(f, f))
        sigs.append(sig)
        if best_sig is None or sig < best_sig:
            best, best_sig = f, sig
        hits = [s == best_sig for s in sigs]
        if len(sigs) >= 2 and hits[-1] and hits[-2]:
            break
        if not p0 or not p1:  # no parameters: every sample is the same
            hits = [True, True]
            break
    stable = len(hits) >= 2 and hits[-1] and hits[-2]
    stats = GenericStats(d, len(sigs), best_sig[0], best_sig[1], None, stable, sigs)
    if with_hom_tau:
        M = best.cokernel()
        stats.hom_tau = hom_dim(M, tau_nakayama(M)) if not M.is_zero() else 0
    if strict and not stable:
        raise NotStabilized(f"no stable minimum for delta={list(d.g)} in {trials} trials", stats)
    return best, stats


# ---------------------------------------------------------------------------
# canonical decomposition


def _chain_endomorphisms(c: TwoTermComplex) -> list[tuple[list[list[Vector]], list[list[Vector]]]]:
    """Basis of pairs ``(H1, H0)`` with ``H1 F = F H0``."""
    alg = c.alg
    unknowns = []  # (which, r, c, k)
    for which, verts in (("h1", c.p1), ("h0", c.p0)):
        for r, i in enumerate(verts):
            for s, j in enumerate(verts):
                for k in alg.between(i, j):
                    unknowns.append((which, r, s, k))
    target = _hom_coords(alg, c.p1, c.p0)
    cols = []
    for which, r, s, k in unknowns:
        col: dict[int, Fraction] = {}
        if which == "h1":  # (H1 F)[r][cc] = k * F[s][cc]
            for cc in range(len(c.p0)):
                if c.F[s][cc]:
                    for kk, v in alg.mul({k: Fraction(1)}, c.F[s][cc]).items():
                        p = target[(r, cc, kk)]
                        col[p] = col.get(p, 0) + v
        else:  # -(F H0)[rr][s] = -F[rr][r] * k
            for rr in range(len(c.p1)):
                if c.F[rr][r]:
                    for kk, v in alg.mul(c.F[rr][r], {k: Fraction(1)}).items():
                        p = target[(rr, s, kk)]
                        col[p] = col.get(p, 0) - v
        cols.append(col)
    n = len(unknowns)
    if target:
        A = DomainMatrix({p: {} for p in range(len(target))}, (len(target), n), QQ)
        rows: dict[int, dict[int, object]] = {}
        for j, col in enumerate(cols):
            for p, v in col.items():
                if v:
                    rows.setdefault(p, {})[j] = QQ(v.numerator, v.denominator)
        A = DomainMatrix(rows, (len(target), n), QQ).to_dense()
        B = kernel_basis(A)
    else:
        B = eye(n, QQ)
    out = []
    Brows = to_rows(B)
    for j in range(B.shape[1]):
        H1 = [[{} for _ in c.p1] for _ in c.p1]
        H0 = [[{} for _ in c.p0] for _ in c.p0]
        for idx, (which, r, s, k) in enumerate(unknowns):
            x = Brows[idx][j]
            if x:
                H = H1 if which == "h1" else H0
                H[r][s][k] = Fraction(int(x.numerator), int(x.denominator))
        out.append((H1, H0))
    return out


def _endo_as_module_map(c: TwoTermComplex, H1, H0) -> ModuleMorphism:
    """The chain endomorphism acting on ``P1 (+) P0`` vertex-wise."""
    m1 = amatrix_morphism(c.alg, c.p1, c.p1, H1)
    m0 = amatrix_morphism(c.alg, c.p0, c.p0, H0)
    total = direct_sum([m1.source, m0.source], c.alg)
    return ModuleMorphism(total, total, tuple(block_diag([a, b]) for a, b in zip(m1.maps, m0.maps)))


def _subcomplex(c: TwoTermComplex, k1: list[DomainMatrix], k0: list[DomainMatrix]) -> TwoTermComplex:
    """Complex on the projective summands ``k1 <= P1``, ``k0 <= P0`` (with ``F(k1) <= k0``)."""
    alg = c.alg
    P1 = projective_sum(alg, c.p1)
    P0 = projective_sum(alg, c.p0)
    Q1, inc1 = submodule(P1, k1)
    Q0, inc0 = submodule(P0, k0)
    cov1 = projective_cover(Q1)
    cov0 = projective_cover(Q0)
    f = c.morphism()
    bases = [projective(alg, v)._cache["basis"] for v in cov0.vertices]
    F = []
    for w, g in zip(cov1.vertices, cov1.generators):
        y = f.maps[w - 1] * (inc1.maps[w - 1] * g)          # in P0_w, inside k0
        y_in_q0 = solve(inc0.maps[w - 1], y)                # coordinates in Q0_w
        x = solve(cov0.map.maps[w - 1], y_in_q0)            # preimage in the cover
        F.append(tuple(_vector_to_element(bases, w, [row[0] for row in to_rows(x)], QQ)))
    return TwoTermComplex(alg, cov1.vertices, cov0.vertices, tuple(F))


def _split_complex(c: TwoTermComplex, rng: random.Random, budget: int) -> list[tuple[TwoTermComplex, int]]:
    """Indecomposable pieces over ``QQ``, each with the number ``k`` of its summands over the closure.

    A piece whose endomorphism ring is local with residue field of degree
    ``k`` splits over the algebraic closure into ``k`` Galois conjugates, each of
    class ``delta / k``.
    """
    if not c.p0 and not c.p1:
        return []
    if not c.p0 or not c.p1:
        # a sum of shifted indecomposable projectives
        return [(TwoTermComplex(c.alg, (v,), (), ((),)) if not c.p0 else
                 TwoTermComplex(c.alg, (), (v,), ()), 1) for v in c.p1 + c.p0]
    endos = _chain_endomorphisms(c)
    maps = [_endo_as_module_map(c, H1, H0) for H1, H0 in endos]
    s = _residue_degree([block_diag(list(m.maps)) for m in maps])
    if s == 1:
        return [(c, 1)]
    cands = list(range(len(maps)))
    cands += [(i, j) for i in range(len(maps)) for j in range(i + 1, len(maps))]
    cands += [None] * budget
    n1 = [projective_sum(c.alg, c.p1).dim(v) for v in c.alg.quiver.vertices]
    field_degree = 0
    for cand in cands:
        if cand is None:
            phi = maps[0].scale(0)
            for m in maps:
                phi = phi + m.scale(rng.randint(-3, 3))
        elif isinstance(cand, tuple):
            phi = maps[cand[0]] + maps[cand[1]]
        else:
            phi = maps[cand]
        factors = _charpoly_factors(block_diag(list(phi.maps)))
        if len(factors) == 1:
            field_degree = max(field_degree, factors[0].degree())
            if field_degree == s:
                # End(c) is local with a degree-s residue field
                break
            continue
        low = min(factors, key=lambda f: f.degree())
        blocks = []
        for v, m in zip(c.alg.quiver.vertices, phi.maps):
            a = n1[v - 1]
            rows = to_rows(m)
            b = m.shape[0] - a
            blocks.append((mat([r[:a] for r in rows[:a]], QQ, (a, a)), mat([r[a:] for r in rows[a:]], QQ, (b, b))))
        k1, i1 = _fitting_split([h1 for h1, _ in blocks], low)
        k0, i0 = _fitting_split([h0 for _, h0 in blocks], low)
        parts = [_subcomplex(c, k1, k0), _subcomplex(c, i1, i0)]
        out = []
        for part in parts:
            out.extend(_split_complex(part, rng, budget))
        return out
    if field_degree == s and all(g % s == 0 for g in c.delta.g):
        return [(c, s)]
    raise DecompositionError(f"could not split the complex for delta={list(c.delta.g)}")


def canonical_decomposition(delta, alg: FDAlgebra, seed: int = 0, trials: int = DEFAULT_TRIALS,
                            height: int = DEFAULT_HEIGHT, budget: int = 100,
                            return_complexes: bool = False):
    """Delta-vectors of the indecomposable summands of a generic complex.

    Summands that only separate over the algebraic closure are reported as
    that many copies of their common class.  With ``return_complexes`` the
    rational pieces come back as ``(complex, multiplicity)`` pairs.

    Raises ``AssertionError`` if two rational pieces have nonzero mutual E-invariant.
    """
    f, _ = generic_sample(delta, alg, trials, seed, height)
    parts = _split_complex(f, random.Random(seed), budget)
    for a in range(len(parts)):
        for b in range(len(parts)):
            if a != b and e_dim(parts[a][0], parts[b][0]):
                raise AssertionError("summands of the generic complex have nonzero E-invariant")
    deltas = []
    for p, k in parts:
        deltas += [DeltaVector(tuple(g // k for g in p.delta.g))] * k
    deltas.sort(key=lambda d: tuple(-x for x in d.g))
    if return_complexes:
        parts.sort(key=lambda pk: tuple(-x for x in pk[0].delta.g))
        return deltas, parts
    return deltas


def is_sign_coherent(d1, d2) -> bool:
    return all(a * b >= 0 for a, b in zip(_as_delta(d1).g, _as_delta(d2).g))


# ---------------------------------------------------------------------------
# tropical mutation and frozen vertices


def mutate_delta(delta, i: int, q: IceQuiver) -> DeltaVector:
    """Index mutation at ``i``, arrows counted in ``q`` (before mutation)."""
    if not 1 <= i <= q.m:
        raise FrozenVertexError(f"cannot mutate at vertex {i}")
    g = list(_as_delta(delta).g)
    gi = g[i - 1]
    out = list(g)
    out[i - 1] = -gi
    for j in q.vertices:
        if j == i:
            continue
        out[j - 1] -= q.count(i, j) * max(-gi, 0)
        out[j - 1] += q.count(j, i) * max(gi, 0)
    return DeltaVector(tuple(out))


def project_frozen(delta, q: IceQuiver) -> DeltaVector:
    return DeltaVector(_as_delta(delta).g[: q.m])


def lift_frozen(delta_bar, q: IceQuiver, alg: FDAlgebra, seed: int = 0, trials: int = DEFAULT_TRIALS,
                height: int = DEFAULT_HEIGHT) -> DeltaVector:
    """Add the frozen projective ``T_F``: a projective cover of ``Coker f*`` over ``End(P_F)``.

    ``f* : Hom(T0, P_F) -> Hom(T1, P_F)`` for a generic ``f : T1 -> T0``.  The
    multiplicity of ``P_k`` (``k`` frozen) is the dimension of the top of
    ``Coker f*`` at ``k``.
    """
    db = _as_delta(delta_bar)
    if len(db) != q.m:
        raise ValueError(f"reduced delta needs {q.m} entries")
    full = DeltaVector(db.g + (0,) * (q.n - q.m))
    if q.n == q.m:
        return full
    frozen = list(q.frozen)
    f, _ = generic_sample(full, alg, trials, seed, height)
    # Hom(P_i, P_F) = e_i A e_F, graded by the frozen source k
    layout = {}  # (r, k_basis) -> position, for r over p1
    for r, i in enumerate(f.p1):
        for kf in frozen:
            for k in alg.between(i, kf):
                layout[(r, k)] = len(layout)
    if not layout:
        return full
    img_cols = []
    for c, j in enumerate(f.p0):
        for kf in frozen:
            for k in alg.between(j, kf):
                col = {}
                for r in range(len(f.p1)):
                    if f.F[r][c]:
                        for kk, v in alg.mul(f.F[r][c], {k: Fraction(1)}).items():
                            p = layout[(r, kk)]
                            col[p] = col.get(p, 0) + v
                img_cols.append(col)
    # radical action: right multiplication by nontrivial paths between frozen vertices
    rad = [k for k, p in enumerate(alg.basis)
           if p.arrows and p.source in frozen and p.target in frozen]
    g = list(full.g)
    for kf in frozen:
        positions = [p for (r, k), p in layout.items() if alg.basis[k].source == kf]
        if not positions:
            continue
        rad_cols = []
        for (r, k), p in layout.items():
            for kr in rad:
                prod = alg.mul({k: Fraction(1)}, {kr: Fraction(1)})
                if prod and all(alg.basis[kk].source == kf for kk in prod):
                    rad_cols.append({layout[(r, kk)]: v for kk, v in prod.items()})
        imgs = [{p: v for p, v in col.items() if p in set(positions)} for col in img_cols]
        dim_n = len(positions) - _sparse_rank(imgs, len(layout))
        dim_rad = _sparse_rank(imgs + rad_cols, len(layout)) - _sparse_rank(imgs, len(layout))
        g[kf - 1] += dim_n - dim_rad
    return DeltaVector(tuple(g))
