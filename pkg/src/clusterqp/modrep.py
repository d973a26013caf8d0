"""Modules over a finite-dimensional algebra, as quiver representations.

A module stores one matrix per arrow (shape ``d_target x d_source``).  Maps
between direct sums of indecomposable projectives are written as
*A-matrices*: ``F[r][c]`` is an algebra element in ``e_{rows[r]} A e_{cols[c]}``
and the map sends ``x`` in the ``r``-th summand to ``x * F[r][c]``.  The same
A-matrix also defines the corresponding map between injectives (the Nakayama
functor), sending a functional ``phi`` to ``phi(F[r][c] * -)``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from sympy import Poly, Symbol

from .fdalg import FDAlgebra, Vector, opposite
from .linalg import (
    GF,
    QQ,
    DomainMatrix,
    block_diag,
    eye,
    field_of,
    hstack,
    image_basis,
    is_zero,
    kernel_basis,
    mat,
    quotient_maps,
    rank,
    solve,
    to_rows,
    vstack,
    zeros,
)

__all__ = [
    "Module",
    "ModuleMorphism",
    "FieldMismatch",
    "Presentation",
    "Copresentation",
    "DecompositionError",
    "op_algebra",
    "hom_basis",
    "hom_dim",
    "kernel",
    "cokernel",
    "submodule",
    "projective",
    "injective",
    "simple",
    "zero_module",
    "direct_sum",
    "projective_sum",
    "injective_sum",
    "amatrix_morphism",
    "nakayama_morphism",
    "projective_cover",
    "minimal_projective_presentation",
    "minimal_injective_copresentation",
    "ar_translate",
    "tau_nakayama",
    "ext1_dim",
    "dual",
    "decompose",
    "decompose_with_residues",
    "is_isomorphic",
    "random_module",
    "top_dims",
    "socle_dims",
    "path_basis",
]


class FieldMismatch(ValueError):
    pass


class DecompositionError(RuntimeError):
    """No splitting endomorphism found within the retry budget."""


def op_algebra(alg: FDAlgebra) -> FDAlgebra:
    """Cached opposite algebra; ``op_algebra(op_algebra(A)) is A``."""
    op = getattr(alg, "_opposite", None)
    if op is None:
        op = opposite(alg)
        alg._opposite = op
        op._opposite = alg
    return op


# ---------------------------------------------------------------------------
# modules and morphisms


@dataclass(frozen=True, eq=False)
class Module:
    alg: FDAlgebra
    dims: tuple[int, ...]
    mats: Mapping[str, DomainMatrix]
    K: object = QQ
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        q = self.alg.quiver
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) != q.n:
            raise ValueError(f"dimension vector needs {q.n} entries")
        mats = dict(self.mats)
        for a in q.arrows:
            shape = (self.dims[a.target - 1], self.dims[a.source - 1])
            M = mats.get(a.id)
            if M is None:
                mats[a.id] = zeros(*shape, self.K)
                continue
            if M.shape != shape:
                raise ValueError(f"arrow {a.id} needs a {shape} matrix, got {M.shape}")
            if M.domain != self.K:
                raise FieldMismatch(f"arrow {a.id} is over {M.domain}, module over {self.K}")
        extra = set(mats) - {a.id for a in q.arrows}
        if extra:
            raise ValueError(f"unknown arrows {sorted(extra)}")
        object.__setattr__(self, "mats", mats)

    def __repr__(self) -> str:
        return f"Module(dims={list(self.dims)}, field={field_of(self.K)})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def dim(self, v: int) -> int:
        return self.dims[v - 1]

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def act_basis(self, k: int) -> DomainMatrix:
        """Matrix of the ``k``-th basis path, ``d_target x d_source``."""
        key = ("act", k)
        if key not in self._cache:
            p = self.alg.basis[k]
            out = eye(self.dim(p.source), self.K)
            for aid in reversed(p.arrows):
                out = self.mats[aid] * out
            self._cache[key] = out
        return self._cache[key]

    def act(self, elem: Mapping[int, Fraction], source: int, target: int) -> DomainMatrix:
        """Action of the part of ``elem`` in ``e_target A e_source``."""
        out = zeros(self.dim(target), self.dim(source), self.K)
        for k, c in elem.items():
            p = self.alg.basis[k]
            if p.source == source and p.target == target and c:
                out = out + self.act_basis(k) * _scalar(c, self.K)
        return out

    def validate(self) -> bool:
        """Whether every relation of the algebra acts as zero.

        It suffices that arrow times normal form acts as the reduced product.
        """
        alg = self.alg
        for a in alg.quiver.arrows:
            ae = alg.arrow_element(a.id)
            for k, p in enumerate(alg.basis):
                if p.target != a.source:
                    continue
                lhs = self.mats[a.id] * self.act_basis(k)
                rhs = self.act(alg.mul(ae, {k: Fraction(1)}), p.source, a.target)
                if lhs != rhs:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "dim": list(self.dims),
            "mats": {aid: [[_num_out(x, self.K) for x in row] for row in to_rows(M)]
                     for aid, M in sorted(self.mats.items())},
            "field": "Q" if self.K == QQ else {"Fq": self.K.mod},
        }

    @classmethod
    def from_json(cls, alg: FDAlgebra, data: dict | str) -> "Module":
        if isinstance(data, str):
            data = json.loads(data)
        fld = data.get("field", "Q")
        K = QQ if fld == "Q" else GF(int(fld["Fq"]))
        dims = tuple(data["dim"])
        mats = {}
        for a in alg.quiver.arrows:
            rows = data.get("mats", {}).get(a.id)
            shape = (dims[a.target - 1], dims[a.source - 1])
            mats[a.id] = zeros(*shape, K) if rows is None else mat(rows, K, shape)
        return cls(alg, dims, mats, K)


def _scalar(c, K):
    if K == QQ:
        c = Fraction(c)
        return QQ(c.numerator, c.denominator)
    c = Fraction(c)
    return K(c.numerator) / K(c.denominator)


def _num_out(x, K):
    if K == QQ:
        return int(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(K.to_int(x)) % K.mod


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    source: Module
    target: Module
    maps: tuple[DomainMatrix, ...]

    def __post_init__(self):
        if self.source.alg is not self.target.alg:
            raise ValueError("morphism between modules over different algebras")
        if self.source.K != self.target.K:
            raise FieldMismatch("source and target are over different fields")
        for v, f in enumerate(self.maps, start=1):
            if f.shape != (self.target.dim(v), self.source.dim(v)):
                raise ValueError(f"map at vertex {v} has shape {f.shape}")

    def validate(self) -> bool:
        for a in self.source.alg.quiver.arrows:
            i, j = a.source, a.target
            if self.maps[j - 1] * self.source.mats[a.id] != self.target.mats[a.id] * self.maps[i - 1]:
                return False
        return True

    def __add__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        return ModuleMorphism(self.source, self.target, tuple(a + b for a, b in zip(self.maps, other.maps)))

    def scale(self, c) -> "ModuleMorphism":
        s = _scalar(c, self.source.K)
        return ModuleMorphism(self.source, self.target, tuple(f * s for f in self.maps))

    def compose(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """``self`` after ``other``."""
        return ModuleMorphism(other.source, self.target, tuple(a * b for a, b in zip(self.maps, other.maps)))

    def is_zero(self) -> bool:
        return all(is_zero(f) for f in self.maps)

    def ranks(self) -> tuple[int, ...]:
        return tuple(rank(f) for f in self.maps)

    def is_iso(self) -> bool:
        return (self.source.dims == self.target.dims
                and all(r == d for r, d in zip(self.ranks(), self.source.dims)))

    @staticmethod
    def identity(M: Module) -> "ModuleMorphism":
        return ModuleMorphism(M, M, tuple(eye(d, M.K) for d in M.dims))

    @staticmethod
    def zero(M: Module, N: Module) -> "ModuleMorphism":
        return ModuleMorphism(M, N, tuple(zeros(N.dim(v), M.dim(v), M.K) for v in M.alg.quiver.vertices))


def combine(morphs: Sequence[ModuleMorphism], coeffs: Sequence, M: Module, N: Module) -> ModuleMorphism:
    out = ModuleMorphism.zero(M, N)
    for f, c in zip(morphs, coeffs):
        if c:
            out = out + f.scale(c)
    return out


# ---------------------------------------------------------------------------
# constructors


def zero_module(alg: FDAlgebra, K=QQ) -> Module:
    return Module(alg, (0,) * alg.quiver.n, {}, K)


def simple(alg: FDAlgebra, i: int, K=QQ) -> Module:
    dims = [0] * alg.quiver.n
    dims[i - 1] = 1
    return Module(alg, tuple(dims), {}, K)


def _convert(M: DomainMatrix, K) -> DomainMatrix:
    if K == QQ:
        return M
    from .linalg import reduce_mod

    return reduce_mod(M, K.mod)


def projective(alg: FDAlgebra, i: int, K=QQ) -> Module:
    """``A e_i``: normal forms starting at ``i``; arrows act by left multiplication."""
    key = ("P", i, field_of(K))
    cache = _alg_cache(alg)
    if key in cache:
        return cache[key]
    at = {v: [k for k, p in enumerate(alg.basis) if p.source == i and p.target == v] for v in alg.quiver.vertices}
    pos = {k: r for v in at for r, k in enumerate(at[v])}
    mats = {}
    for a in alg.quiver.arrows:
        ae = alg.arrow_element(a.id)
        rows = [[Fraction(0)] * len(at[a.source]) for _ in at[a.target]]
        for col, k in enumerate(at[a.source]):
            for kk, c in alg.mul(ae, {k: Fraction(1)}).items():
                rows[pos[kk]][col] += c
        mats[a.id] = _convert(mat(rows, QQ, (len(at[a.target]), len(at[a.source]))), K)
    M = Module(alg, tuple(len(at[v]) for v in alg.quiver.vertices), mats, K)
    M._cache["basis"] = at
    cache[key] = M
    return M


def injective(alg: FDAlgebra, i: int, K=QQ) -> Module:
    """``D(e_i A)``: at ``v`` the dual of paths from ``v`` ending at ``i``."""
    key = ("I", i, field_of(K))
    cache = _alg_cache(alg)
    if key in cache:
        return cache[key]
    at = {v: list(alg.between(i, v)) for v in alg.quiver.vertices}
    pos = {k: r for v in at for r, k in enumerate(at[v])}
    mats = {}
    for a in alg.quiver.arrows:
        ae = alg.arrow_element(a.id)
        v, w = a.source, a.target
        rows = [[Fraction(0)] * len(at[v]) for _ in at[w]]
        for r, y in enumerate(at[w]):
            for z, c in alg.mul({y: Fraction(1)}, ae).items():
                rows[r][pos[z]] += c
        mats[a.id] = _convert(mat(rows, QQ, (len(at[w]), len(at[v]))), K)
    M = Module(alg, tuple(len(at[v]) for v in alg.quiver.vertices), mats, K)
    M._cache["basis"] = at
    cache[key] = M
    return M


def _alg_cache(alg: FDAlgebra) -> dict:
    c = getattr(alg, "_module_cache", None)
    if c is None:
        c = {}
        alg._module_cache = c
    return c


def direct_sum(mods: Sequence[Module], alg: FDAlgebra | None = None, K=None) -> Module:
    if not mods:
        if alg is None:
            raise ValueError("empty direct sum needs the algebra")
        return zero_module(alg, K or QQ)
    alg = mods[0].alg
    K = mods[0].K
    for M in mods:
        if M.K != K:
            raise FieldMismatch("direct sum of modules over different fields")
    dims = tuple(sum(M.dims[v] for M in mods) for v in range(alg.quiver.n))
    mats = {a.id: block_diag([M.mats[a.id] for M in mods], K) for a in alg.quiver.arrows}
    return Module(alg, dims, mats, K)


def projective_sum(alg: FDAlgebra, vertices: Sequence[int], K=QQ) -> Module:
    return direct_sum([projective(alg, v, K) for v in vertices], alg, K)


def injective_sum(alg: FDAlgebra, vertices: Sequence[int], K=QQ) -> Module:
    return direct_sum([injective(alg, v, K) for v in vertices], alg, K)


def _offsets(alg, mods_basis: Sequence[dict], v: int) -> list[int]:
    out, s = [], 0
    for b in mods_basis:
        out.append(s)
        s += len(b[v])
    return out


def amatrix_morphism(alg: FDAlgebra, rows: Sequence[int], cols: Sequence[int],
                     F: Sequence[Sequence[Vector]], K=QQ) -> ModuleMorphism:
    """``(+) P_rows -> (+) P_cols``, ``x`` in summand ``r`` maps to ``x * F[r][c]``."""
    src = projective_sum(alg, rows, K)
    tgt = projective_sum(alg, cols, K)
    rb = [projective(alg, i, K)._cache["basis"] for i in rows]
    cb = [projective(alg, j, K)._cache["basis"] for j in cols]
    maps = []
    for v in alg.quiver.vertices:
        ro, co = _offsets(alg, rb, v), _offsets(alg, cb, v)
        out = [[Fraction(0)] * src.dim(v) for _ in range(tgt.dim(v))]
        for r in range(len(rows)):
            for t, x in enumerate(rb[r][v]):
                for c in range(len(cols)):
                    if not F[r][c]:
                        continue
                    pos = {k: s for s, k in enumerate(cb[c][v])}
                    for k, val in alg.mul({x: Fraction(1)}, F[r][c]).items():
                        out[co[c] + pos[k]][ro[r] + t] += val
        maps.append(_convert(mat(out, QQ, (tgt.dim(v), src.dim(v))), K))
    return ModuleMorphism(src, tgt, tuple(maps))


def nakayama_morphism(alg: FDAlgebra, rows: Sequence[int], cols: Sequence[int],
                      F: Sequence[Sequence[Vector]], K=QQ) -> ModuleMorphism:
    """``(+) I_rows -> (+) I_cols``, ``(phi_r)`` maps to ``sum_r phi_r(F[r][c] * -)``."""
    src = injective_sum(alg, rows, K)
    tgt = injective_sum(alg, cols, K)
    rb = [injective(alg, i, K)._cache["basis"] for i in rows]
    cb = [injective(alg, j, K)._cache["basis"] for j in cols]
    maps = []
    for v in alg.quiver.vertices:
        ro, co = _offsets(alg, rb, v), _offsets(alg, cb, v)
        out = [[Fraction(0)] * src.dim(v) for _ in range(tgt.dim(v))]
        for c in range(len(cols)):
            for s, y in enumerate(cb[c][v]):
                for r in range(len(rows)):
                    if not F[r][c]:
                        continue
                    pos = {k: t for t, k in enumerate(rb[r][v])}
                    for z, val in alg.mul(F[r][c], {y: Fraction(1)}).items():
                        out[co[c] + s][ro[r] + pos[z]] += val
        maps.append(_convert(mat(out, QQ, (tgt.dim(v), src.dim(v))), K))
    return ModuleMorphism(src, tgt, tuple(maps))


# ---------------------------------------------------------------------------
# kernels, cokernels, submodules


def submodule(M: Module, spaces: Sequence[DomainMatrix]) -> tuple[Module, ModuleMorphism]:
    """Submodule with basis columns ``spaces[v-1]`` (must be arrow-stable)."""
    alg = M.alg
    mats = {}
    for a in alg.quiver.arrows:
        S_v, S_w = spaces[a.source - 1], spaces[a.target - 1]
        img = M.mats[a.id] * S_v
        mats[a.id] = solve(S_w, img)
    N = Module(alg, tuple(S.shape[1] for S in spaces), mats, M.K)
    return N, ModuleMorphism(N, M, tuple(spaces))


def kernel(f: ModuleMorphism) -> tuple[Module, ModuleMorphism]:
    return submodule(f.source, [kernel_basis(m) for m in f.maps])


def cokernel(f: ModuleMorphism) -> tuple[Module, ModuleMorphism]:
    N = f.target
    alg = N.alg
    pis, secs = [], []
    for v, m in zip(alg.quiver.vertices, f.maps):
        pi, sec = quotient_maps(m, N.dim(v))
        pis.append(pi)
        secs.append(sec)
    mats = {a.id: pis[a.target - 1] * N.mats[a.id] * secs[a.source - 1] for a in alg.quiver.arrows}
    C = Module(alg, tuple(p.shape[0] for p in pis), mats, N.K)
    return C, ModuleMorphism(N, C, tuple(pis))


def image_spaces(f: ModuleMorphism) -> list[DomainMatrix]:
    return [image_basis(m) for m in f.maps]


def _radical_spaces(M: Module) -> list[DomainMatrix]:
    alg = M.alg
    out = []
    for v in alg.quiver.vertices:
        parts = [M.mats[a.id] for a in alg.quiver.arrows if a.target == v]
        out.append(image_basis(hstack(parts, M.dim(v), M.K)) if parts else zeros(M.dim(v), 0, M.K))
    return out


def top_dims(M: Module) -> tuple[int, ...]:
    return tuple(M.dim(v) - S.shape[1] for v, S in zip(M.alg.quiver.vertices, _radical_spaces(M)))


def socle_dims(M: Module) -> tuple[int, ...]:
    alg = M.alg
    out = []
    for v in alg.quiver.vertices:
        parts = [M.mats[a.id] for a in alg.quiver.arrows if a.source == v]
        out.append(kernel_basis(vstack(parts, M.dim(v), M.K)).shape[1] if parts else M.dim(v))
    return tuple(out)


# ---------------------------------------------------------------------------
# projective covers and presentations


@dataclass(frozen=True, eq=False)
class Cover:
    vertices: tuple[int, ...]
    generators: tuple[DomainMatrix, ...]  # column vectors in M_v
    map: ModuleMorphism                    # (+) P_v -> M


def projective_cover(M: Module) -> Cover:
    """Projective cover from a basis of the top of ``M``."""
    if "cover" in M._cache:
        return M._cache["cover"]
    alg, K = M.alg, M.K
    verts, gens = [], []
    for v, S in zip(alg.quiver.vertices, _radical_spaces(M)):
        _, sec = quotient_maps(S, M.dim(v))
        for j in range(sec.shape[1]):
            verts.append(v)
            gens.append(mat([[x] for x in (row[j] for row in to_rows(sec))], K, (M.dim(v), 1)))
    P = projective_sum(alg, verts, K)
    bases = [projective(alg, v, K)._cache["basis"] for v in verts]
    maps = []
    for t in alg.quiver.vertices:
        cols = []
        for g, b in zip(gens, bases):
            for k in b[t]:
                cols.append(M.act_basis(k) * g)
        maps.append(hstack(cols, M.dim(t), K) if cols else zeros(M.dim(t), 0, K))
    cover = Cover(tuple(verts), tuple(gens), ModuleMorphism(P, M, tuple(maps)))
    M._cache["cover"] = cover
    return cover


@dataclass(frozen=True, eq=False)
class Presentation:
    """``(+) P_p1 --F--> (+) P_p0 --> M --> 0`` with ``F`` an A-matrix."""

    module: Module
    p1: tuple[int, ...]
    p0: tuple[int, ...]
    F: tuple[tuple[Vector, ...], ...]
    cover: Cover

    def morphism(self) -> ModuleMorphism:
        return amatrix_morphism(self.module.alg, self.p1, self.p0, self.F, self.module.K)


def _vector_to_element(P_bases: Sequence[dict], w: int, col: list, K) -> list[Vector]:
    """Split a vector of ``((+) P)_w`` into algebra elements per summand."""
    out, s = [], 0
    for b in P_bases:
        elem: Vector = {}
        for k in b[w]:
            x = col[s]
            if x:
                elem[k] = _to_frac(x, K)
            s += 1
        out.append(elem)
    return out


def _to_frac(x, K) -> Fraction:
    if K == QQ:
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(int(K.to_int(x)) % K.mod)


def minimal_projective_presentation(M: Module) -> Presentation:
    if "presentation" in M._cache:
        return M._cache["presentation"]
    alg, K = M.alg, M.K
    cover = projective_cover(M)
    omega, inc = kernel(cover.map)
    ocover = projective_cover(omega)
    bases = [projective(alg, v, K)._cache["basis"] for v in cover.vertices]
    F = []
    for w, g in zip(ocover.vertices, ocover.generators):
        vec = inc.maps[w - 1] * g
        col = [row[0] for row in to_rows(vec)]
        F.append(tuple(_vector_to_element(bases, w, col, K)))
    pres = Presentation(M, ocover.vertices, cover.vertices, tuple(F), cover)
    M._cache["presentation"] = pres
    return pres


@dataclass(frozen=True, eq=False)
class Copresentation:
    """``0 --> M --> (+) I_i0 --G--> (+) I_i1`` with ``G`` in the Nakayama convention."""

    module: Module
    i0: tuple[int, ...]
    i1: tuple[int, ...]
    G: tuple[tuple[Vector, ...], ...]

    def morphism(self) -> ModuleMorphism:
        return nakayama_morphism(self.module.alg, self.i0, self.i1, self.G, self.module.K)


def minimal_injective_copresentation(M: Module) -> Copresentation:
    pres = minimal_projective_presentation(dual(M))
    G = tuple(tuple(pres.F[r][c] for r in range(len(pres.p1))) for c in range(len(pres.p0)))
    return Copresentation(M, pres.p0, pres.p1, G)


def dual(M: Module) -> Module:
    """``D M`` over the opposite algebra: transposed matrices on reversed arrows."""
    op = op_algebra(M.alg)
    return Module(op, M.dims, {aid: m.transpose() for aid, m in M.mats.items()}, M.K)


def tau_nakayama(M: Module) -> Module:
    """``ker(nu F)`` for the minimal presentation ``F`` of ``M``."""
    pres = minimal_projective_presentation(M)
    return kernel(nakayama_morphism(M.alg, pres.p1, pres.p0, pres.F, M.K))[0]


def ar_translate(M: Module) -> Module:
    """``D Tr M``; zero exactly when ``M`` is projective."""
    pres = minimal_projective_presentation(M)
    op = op_algebra(M.alg)
    Ft = tuple(tuple(pres.F[r][c] for r in range(len(pres.p1))) for c in range(len(pres.p0)))
    tr, _ = cokernel(amatrix_morphism(op, pres.p0, pres.p1, Ft, M.K))
    return dual(tr)


# ---------------------------------------------------------------------------
# Hom spaces


def hom_basis(M: Module, N: Module, method: str = "presentation") -> list[ModuleMorphism]:
    """Basis of ``Hom_A(M, N)``.

    ``presentation`` solves ``Hom(P0, N) -> Hom(P1, N)`` (small systems);
    ``intertwiner`` solves the vertex-wise commutation equations directly.
    """
    if M.alg is not N.alg:
        raise ValueError("modules over different algebras")
    if M.K != N.K:
        raise FieldMismatch("modules over different fields")
    if method == "intertwiner":
        return _hom_intertwiner(M, N)
    if method != "presentation":
        raise ValueError(f"unknown method {method!r}")
    return _hom_presentation(M, N)


def hom_dim(M: Module, N: Module) -> int:
    return len(hom_basis(M, N))


def _hom_intertwiner(M: Module, N: Module) -> list[ModuleMorphism]:
    alg, K = M.alg, M.K
    verts = list(alg.quiver.vertices)
    off, s = {}, 0
    for v in verts:
        off[v] = s
        s += N.dim(v) * M.dim(v)
    nunk = s
    rows: list[dict[int, object]] = []
    for a in alg.quiver.arrows:
        v, w = a.source, a.target
        Na, Ma = to_rows(N.mats[a.id]), to_rows(M.mats[a.id])
        mv, nw, nv, mw = M.dim(v), N.dim(w), N.dim(v), M.dim(w)
        for r in range(nw):
            for sc in range(mv):
                row: dict[int, object] = {}
                for p in range(nv):  # (N_a X_v)[r][sc]
                    c = Na[r][p]
                    if c:
                        idx = off[v] + p * mv + sc
                        row[idx] = row.get(idx, K.zero) + c
                for qq in range(mw):  # (X_w M_a)[r][sc]
                    c = Ma[qq][sc]
                    if c:
                        idx = off[w] + r * mw + qq
                        row[idx] = row.get(idx, K.zero) - c
                row = {k: x for k, x in row.items() if x}
                if row:
                    rows.append(row)
    if nunk == 0:
        return []
    if rows:
        A = DomainMatrix({i: r for i, r in enumerate(rows)}, (len(rows), nunk), K).to_dense()
        B = kernel_basis(A)
    else:
        B = eye(nunk, K)
    out = []
    Brows = to_rows(B)
    for j in range(B.shape[1]):
        maps = []
        for v in verts:
            nv, mv = N.dim(v), M.dim(v)
            maps.append(mat([[Brows[off[v] + p * mv + qq][j] for qq in range(mv)] for p in range(nv)], K, (nv, mv)))
        out.append(ModuleMorphism(M, N, tuple(maps)))
    return out


def _section(M: Module) -> list[DomainMatrix]:
    """Right inverses of the cover map at each vertex."""
    if "section" not in M._cache:
        cover = projective_cover(M)
        secs = []
        for v, m in zip(M.alg.quiver.vertices, cover.map.maps):
            secs.append(solve(m, eye(M.dim(v), M.K)))
        M._cache["section"] = secs
    return M._cache["section"]


def _hom_presentation(M: Module, N: Module) -> list[ModuleMorphism]:
    alg, K = M.alg, M.K
    if M.is_zero() or N.is_zero():
        return []
    pres = minimal_projective_presentation(M)
    p0, p1 = pres.p0, pres.p1
    # unknowns: n_c in N_{p0[c]}
    coff, s = [], 0
    for v in p0:
        coff.append(s)
        s += N.dim(v)
    nunk = s
    if nunk == 0:
        return []
    blocks = []
    for r, w in enumerate(p1):
        cols = [N.act(pres.F[r][c], v, w) for c, v in enumerate(p0)]
        blocks.append(hstack(cols, N.dim(w), K) if cols else zeros(N.dim(w), 0, K))
    A = vstack(blocks, nunk, K) if blocks else zeros(0, nunk, K)
    B = kernel_basis(A) if A.shape[0] else eye(nunk, K)
    secs = _section(M)
    bases = [projective(alg, v, K)._cache["basis"] for v in p0]
    Brows = to_rows(B)
    out = []
    for j in range(B.shape[1]):
        ns = [mat([[Brows[coff[c] + t][j]] for t in range(N.dim(v))], K, (N.dim(v), 1)) for c, v in enumerate(p0)]
        maps = []
        for t in alg.quiver.vertices:
            cols = []
            for c, b in enumerate(bases):
                for k in b[t]:
                    cols.append(N.act_basis(k) * ns[c])
            psi = hstack(cols, N.dim(t), K) if cols else zeros(N.dim(t), 0, K)
            maps.append(psi * secs[t - 1])
        out.append(ModuleMorphism(M, N, tuple(maps)))
    return out


def ext1_dim(M: Module, N: Module) -> int:
    """``dim Ext^1(M, N)`` from ``0 -> Hom(M,N) -> Hom(P0,N) -> Hom(Omega M,N) -> Ext^1 -> 0``."""
    if M.is_zero() or N.is_zero():
        return 0
    cover = projective_cover(M)
    omega, _ = kernel(cover.map)
    hom_p0 = sum(N.dim(v) for v in cover.vertices)
    return hom_dim(omega, N) - hom_p0 + hom_dim(M, N)


# ---------------------------------------------------------------------------
# decomposition


def _total_matrix(f: ModuleMorphism) -> DomainMatrix:
    return block_diag(list(f.maps), f.source.K)


def _poly_eval(coeffs: Sequence, A: DomainMatrix) -> DomainMatrix:
    n = A.shape[0]
    K = A.domain
    out = zeros(n, n, K)
    for c in coeffs:
        out = out * A + eye(n, K) * K.convert(c)
    return out


def _charpoly_factors(A: DomainMatrix) -> list[Poly]:
    """Distinct monic irreducible factors over ``Q`` of the characteristic polynomial."""
    x = Symbol("x")
    cp = Poly([QQ.to_sympy(c) for c in A.charpoly()], x, domain="QQ")
    return [f for f, _ in cp.factor_list()[1]]


def _fitting(B: DomainMatrix) -> tuple[DomainMatrix, DomainMatrix]:
    """Bases of ``ker B^N`` and ``im B^N`` for ``N`` large (Fitting's lemma)."""
    if not B.shape[0]:
        return zeros(0, 0, B.domain), zeros(0, 0, B.domain)
    P = B
    dim = P.shape[0] - rank(P)
    while True:
        Q = P * B
        d = Q.shape[0] - rank(Q)
        if d == dim:
            return kernel_basis(P), image_basis(P)
        P, dim = Q, d


def _fitting_split(maps: Sequence[DomainMatrix], factor: Poly) -> tuple[list[DomainMatrix], list[DomainMatrix]]:
    """Generalized kernels and images of ``factor`` evaluated at each block."""
    coeffs = [QQ.from_sympy(c) for c in factor.all_coeffs()]
    kers, ims = [], []
    for m in maps:
        k, i = _fitting(_poly_eval(coeffs, m))
        kers.append(k)
        ims.append(i)
    return kers, ims


def _residue_degree(mats: Sequence[DomainMatrix]) -> int:
    """``dim E / rad E`` for the matrix algebra spanned by ``mats``.

    In characteristic 0 the radical is the kernel of the trace form ``tr(xy)``.
    """
    k = len(mats)
    dods = [m.to_sparse().rep.to_dod() for m in mats]
    entries = [[(i, j, v) for i, row in d.items() for j, v in row.items()] for d in dods]
    gram = [[QQ.sum(v * dods[b].get(j, {}).get(i, QQ.zero) for i, j, v in entries[a]) for b in range(k)]
            for a in range(k)]
    return rank(mat(gram, QQ, (k, k)))


def decompose(M: Module, seed: int = 0, budget: int = 200) -> list[Module]:
    """Indecomposable summands of ``M`` over ``Q``, up to isomorphism."""
    return [part for part, _ in decompose_with_residues(M, seed, budget)]


def decompose_with_residues(M: Module, seed: int = 0, budget: int = 200) -> list[tuple[Module, int]]:
    """Indecomposable summands over ``Q``, each with the degree of the residue field of its ``End``.

    A summand of degree ``s > 1`` splits over the algebraic closure into ``s``
    Galois-conjugate indecomposables.
    """
    if M.K != QQ:
        raise FieldMismatch("decompose works over Q")
    if M.is_zero():
        return []
    basis = hom_basis(M, M)
    s = _residue_degree([_total_matrix(f) for f in basis])
    if s == 1:
        return [(M, 1)]
    rng = random.Random(seed)
    for phi in _candidates(M, basis, rng, budget):
        factors = _charpoly_factors(_total_matrix(phi))
        if len(factors) == 1:
            if factors[0].degree() == s:
                return [(M, s)]  # End(M) is local with residue field Q(phi)
            continue
        low = min(factors, key=lambda f: f.degree())
        out = []
        for spaces in _fitting_split(phi.maps, low):
            sub, _ = submodule(M, spaces)
            out.extend(decompose_with_residues(sub, seed + 1, budget))
        return out
    raise DecompositionError(f"no splitting endomorphism found for {M!r} within {budget} tries")


def _candidates(M, basis, rng, budget):
    yield from basis
    k = len(basis)
    for i in range(k):
        for j in range(i + 1, k):
            yield basis[i] + basis[j]
            yield basis[i] + basis[j].scale(2)
    for _ in range(budget):
        coeffs = [rng.randint(-3, 3) for _ in range(k)]
        yield combine(basis, coeffs, M, M)


def is_isomorphic(M: Module, N: Module, seed: int = 0, tries: int = 6) -> bool:
    """Randomized: a generic element of ``Hom(M, N)`` is invertible iff ``M`` and ``N`` are isomorphic."""
    if M.dims != N.dims:
        return False
    if M.is_zero():
        return True
    basis = hom_basis(M, N)
    if not basis:
        return False
    rng = random.Random(seed)
    for _ in range(tries):
        f = combine(basis, [rng.randint(-97, 97) for _ in basis], M, N)
        if f.is_iso():
            return True
    return False


def path_basis(M: Module) -> Module:
    """An isomorphic copy of ``M`` in a basis of path images of top generators.

    Generators are standard basis vectors completing the radical, and basis
    vectors are taken greedily by path length.  For a cyclic module the arrow
    matrices become structure constants of the algebra, whatever the original
    coordinates, which keeps denominators and bad primes away.
    """
    alg = M.alg
    K = M.K
    rad = _radical_spaces(M)
    gens = []
    for v, R in zip(alg.quiver.vertices, rad):
        d = M.dim(v)
        span = R
        for j in range(d):
            if span.shape[1] == d:
                break
            col = mat([[K.one if i == j else K.zero] for i in range(d)], K, (d, 1))
            trial = hstack([span, col], d, K)
            if rank(trial) > span.shape[1]:
                span = trial
                gens.append((v, col))
    cols: dict[int, DomainMatrix] = {v: zeros(M.dim(v), 0, K) for v in alg.quiver.vertices}
    order = sorted(range(alg.dim), key=lambda k: len(alg.basis[k].arrows))
    for v, g in gens:
        for k in order:
            path = alg.basis[k]
            w = path.target
            if path.source != v or cols[w].shape[1] == M.dim(w):
                continue
            trial = hstack([cols[w], M.act_basis(k) * g], M.dim(w), K)
            if rank(trial) > cols[w].shape[1]:
                cols[w] = trial
    if any(cols[v].shape[1] != M.dim(v) for v in alg.quiver.vertices):
        raise DecompositionError("top generators do not span the module")
    mats = {a.id: solve(cols[a.target], M.mats[a.id] * cols[a.source]) for a in alg.quiver.arrows}
    return Module(alg, M.dims, mats, K)


def random_module(alg: FDAlgebra, seed: int, max_gens: int = 3, height: int = 3) -> Module:
    """Cokernel of a random radical map between random sums of projectives."""
    rng = random.Random(seed)
    q = alg.quiver
    verts = list(q.vertices)
    gens = [rng.choice(verts) for _ in range(rng.randint(1, max_gens))]
    rels = [rng.choice(verts) for _ in range(rng.randint(0, max_gens))]
    F = []
    for w in rels:
        row = []
        for v in gens:
            elem = {}
            for k in alg.between(w, v):
                if alg.basis[k].arrows and rng.random() < 0.7:
                    c = rng.randint(-height, height)
                    if c:
                        elem[k] = Fraction(c)
            row.append(elem)
        F.append(tuple(row))
    return cokernel(amatrix_morphism(alg, rels, gens, F))[0]
