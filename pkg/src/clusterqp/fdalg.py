"""Finite-dimensional algebras given by a quiver with relations.

Paths are written in composition order, as in ``c1*b1*a1`` (first ``a1``, then
``b1``, then ``c1``); the product ``p * q`` is ``p`` after ``q``.  Left modules
are therefore representations of the quiver, and the left projective ``A e_i``
is spanned by the normal forms starting at ``i``.

An algebra ``kQ / I`` is computed as ``kQ / (I + R^(L+1))`` for a length bound
``L`` (``R`` the arrow ideal) by exact sparse echelon reduction of the
truncated ideal.  When every path of length ``L+1`` already lies in the ideal
modulo longer paths, the truncation is exact and the algebra is flagged
``stabilized``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .quiver import IceQuiver

__all__ = [
    "Path",
    "PathCombination",
    "FDAlgebra",
    "StabilizationError",
    "from_relations",
    "opposite",
    "corner",
    "parse_path",
    "paths_from",
    "graded_dimensions",
]

Vector = dict[int, Fraction]


class StabilizationError(RuntimeError):
    """The truncated quotient did not stabilize at the requested length bound."""


@dataclass(frozen=True, order=True)
class Path:
    source: int
    target: int
    arrows: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.arrows)

    @classmethod
    def trivial(cls, v: int) -> "Path":
        return cls(v, v, ())

    def is_trivial(self) -> bool:
        return not self.arrows

    def __mul__(self, other: "Path") -> "Path | None":
        """``self`` after ``other``; ``None`` when not composable."""
        if self.source != other.target:
            return None
        return Path(other.source, self.target, self.arrows + other.arrows)

    def reversed(self) -> "Path":
        return Path(self.target, self.source, tuple(reversed(self.arrows)))

    def __str__(self) -> str:
        return f"e{self.source}" if not self.arrows else "*".join(self.arrows)


def parse_path(q: IceQuiver, arrows: Sequence[str] | str) -> Path:
    """Build a path from arrow ids in composition order, checking composability."""
    if isinstance(arrows, str):
        if arrows.startswith("e") and arrows[1:].isdigit() and not any(a.id == arrows for a in q.arrows):
            return Path.trivial(int(arrows[1:]))
        arrows = [a for a in arrows.split("*") if a]
    arrows = tuple(arrows)
    if not arrows:
        raise ValueError("empty arrow sequence; use Path.trivial")
    objs = [q.arrow(a) for a in arrows]
    for later, earlier in zip(objs, objs[1:]):
        if later.source != earlier.target:
            raise ValueError(f"arrows {later.id} and {earlier.id} do not compose")
    return Path(objs[-1].source, objs[0].target, arrows)


@dataclass(frozen=True)
class PathCombination:
    """A linear combination of parallel paths (common source and target)."""

    source: int
    target: int
    terms: tuple[tuple[Fraction, Path], ...] = ()

    def __post_init__(self):
        for c, p in self.terms:
            if p.source != self.source or p.target != self.target:
                raise ValueError(f"path {p} is not parallel to {self.source}->{self.target}")

    @classmethod
    def build(cls, source: int, target: int, terms: Iterable[tuple[object, Path]]) -> "PathCombination":
        acc: dict[Path, Fraction] = {}
        for c, p in terms:
            acc[p] = acc.get(p, Fraction(0)) + Fraction(c)
        clean = tuple((c, p) for p, c in sorted(acc.items(), key=lambda t: _path_key(t[0])) if c)
        return cls(source, target, clean)

    @classmethod
    def from_json(cls, q: IceQuiver, data: Sequence) -> "PathCombination":
        terms = [(Fraction(c), parse_path(q, p)) for c, p in data]
        if not terms:
            raise ValueError("empty path combination needs explicit endpoints")
        return cls.build(terms[0][1].source, terms[0][1].target, terms)

    def to_json(self) -> list:
        return [[_num_json(c), list(p.arrows) or [f"e{p.source}"]] for c, p in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def min_length(self) -> int:
        return min((len(p) for _, p in self.terms), default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, p in self.terms:
            parts.append(f"{c}*{p}" if c != 1 else str(p))
        return " + ".join(parts)


def _num_json(c: Fraction):
    return int(c) if c.denominator == 1 else str(c)


def _path_key(p: Path) -> tuple:
    return (len(p.arrows), p.arrows, p.source)


def paths_from(q: IceQuiver, max_len: int) -> dict[int, list[Path]]:
    """All paths of length ``<= max_len`` grouped by length."""
    by_len = {0: [Path.trivial(v) for v in q.vertices]}
    out_arrows: dict[int, list] = {}
    for a in q.arrows:
        out_arrows.setdefault(a.source, []).append(a)
    for k in range(1, max_len + 1):
        nxt = []
        for p in by_len[k - 1]:
            for a in out_arrows.get(p.target, ()):
                nxt.append(Path(p.source, a.target, (a.id,) + p.arrows))
        by_len[k] = nxt
    return by_len


class FDAlgebra:
    """Basis of path normal forms with structure constants.

    ``reduce`` maps any path to its coordinates in the basis.  Instances are
    treated as immutable; products are cached lazily.
    """

    def __init__(
        self,
        quiver: IceQuiver,
        basis: Sequence[Path],
        reducer,
        length_bound: int,
        stabilized: bool = True,
        vertices: Sequence[int] | None = None,
        name: str = "",
    ):
        self.quiver = quiver
        self.basis = tuple(basis)
        self.index = {p: k for k, p in enumerate(self.basis)}
        self._reducer = reducer
        self.length_bound = length_bound
        self.stabilized = stabilized
        self.vertices = tuple(vertices) if vertices is not None else tuple(quiver.vertices)
        self.name = name
        self._mult: dict[tuple[int, int], Vector] = {}
        self._between: dict[tuple[int, int], tuple[int, ...]] = {}
        for k, p in enumerate(self.basis):
            self._between.setdefault((p.target, p.source), ())
            self._between[(p.target, p.source)] += (k,)

    def __repr__(self) -> str:
        return f"FDAlgebra({self.name or 'unnamed'}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return len(self.basis)

    def idempotent(self, v: int) -> int:
        return self.index[Path.trivial(v)]

    def between(self, target: int, source: int) -> tuple[int, ...]:
        """Basis indices of ``e_target A e_source``."""
        return self._between.get((target, source), ())

    def reduce(self, p: Path) -> Vector:
        if p in self.index:
            return {self.index[p]: Fraction(1)}
        if len(p) > self.length_bound:
            return {}
        return dict(self._reducer(p))

    def reduce_combination(self, pc: PathCombination) -> Vector:
        out: Vector = {}
        for c, p in pc.terms:
            for k, v in self.reduce(p).items():
                out[k] = out.get(k, Fraction(0)) + c * v
        return {k: v for k, v in out.items() if v}

    def mult_basis(self, i: int, j: int) -> Vector:
        key = (i, j)
        if key not in self._mult:
            prod = self.basis[i] * self.basis[j]
            self._mult[key] = {} if prod is None else self.reduce(prod)
        return self._mult[key]

    def mul(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult_basis(i, j).items():
                    out[k] = out.get(k, Fraction(0)) + a * b * c
        return {k: x for k, x in out.items() if x}

    def arrow_element(self, arrow_id: str) -> Vector:
        a = self.quiver.arrow(arrow_id)
        return self.reduce(Path(a.source, a.target, (arrow_id,)))

    def unit(self) -> Vector:
        return {self.idempotent(v): Fraction(1) for v in self.vertices}

    def radical_indices(self) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.basis) if not p.is_trivial())

    def projective_basis(self, v: int) -> tuple[int, ...]:
        """Basis of ``A e_v``: normal forms starting at ``v``."""
        return tuple(k for k, p in enumerate(self.basis) if p.source == v)

    def left_dimension(self, v: int) -> int:
        return len(self.projective_basis(v))

    def iter_basis(self) -> Iterator[tuple[int, Path]]:
        return iter(enumerate(self.basis))

    def normal_forms(self, target: int | None = None, source: int | None = None) -> list[Path]:
        return [p for p in self.basis
                if (target is None or p.target == target) and (source is None or p.source == source)]

    def check_associative(self) -> bool:
        n = self.dim
        for i in range(n):
            for j in range(n):
                ij = self.mult_basis(i, j)
                for k in range(n):
                    if self.mul(ij, {k: Fraction(1)}) != self.mul({i: Fraction(1)}, self.mult_basis(j, k)):
                        return False
        return True


# ---------------------------------------------------------------------------
# construction by truncated ideal reduction


class _Echelon:
    """Sparse row echelon form; pivots are the largest column of each row."""

    def __init__(self):
        self.pivots: dict[int, dict[int, Fraction]] = {}

    def insert(self, row: dict[int, Fraction]) -> bool:
        row = {k: v for k, v in row.items() if v}
        while row:
            k = max(row)
            piv = self.pivots.get(k)
            if piv is None:
                c = row[k]
                if c != 1:
                    row = {kk: vv / c for kk, vv in row.items()}
                self.pivots[k] = row
                return True
            c = row[k]
            for kk, vv in piv.items():
                x = row.get(kk, 0) - c * vv
                if x:
                    row[kk] = x
                else:
                    row.pop(kk, None)
        return False

    def fully_reduce(self) -> None:
        for k in sorted(self.pivots):
            row = self.pivots[k]
            changed = True
            while changed:
                changed = False
                for kk in [x for x in row if x != k and x in self.pivots]:
                    c = row.pop(kk)
                    for k2, v2 in self.pivots[kk].items():
                        if k2 == kk:
                            continue
                        x = row.get(k2, 0) - c * v2
                        if x:
                            row[k2] = x
                        else:
                            row.pop(k2, None)
                    changed = True


def from_relations(
    q: IceQuiver,
    relations: Sequence[PathCombination],
    length_bound: int,
    *,
    require_stable: bool = True,
    name: str = "",
) -> FDAlgebra:
    """Algebra ``kQ / (relations)`` computed with paths of length ``<= length_bound``.

    Raises :class:`StabilizationError` when ``require_stable`` and paths of
    length ``length_bound + 1`` are not already zero in the quotient.
    """
    if length_bound < 0:
        raise ValueError("length_bound must be >= 0")
    for r in relations:
        if any(len(p) < 1 for _, p in r.terms):
            raise ValueError("relations must not involve trivial paths")
    top = length_bound + 1
    by_len = paths_from(q, top)
    all_paths = sorted((p for ps in by_len.values() for p in ps), key=_path_key)
    pid = {p: k for k, p in enumerate(all_paths)}
    # paths leaving / entering each vertex, by length
    leaving: dict[int, list[Path]] = {v: [] for v in q.vertices}
    entering: dict[int, list[Path]] = {v: [] for v in q.vertices}
    for p in all_paths:
        leaving[p.source].append(p)
        entering[p.target].append(p)

    ech = _Echelon()
    for r in relations:
        if r.is_zero():
            continue
        lo = r.min_length()
        for left in leaving[r.target]:
            if len(left) + lo > top:
                continue
            for right in entering[r.source]:
                if len(left) + len(right) + lo > top:
                    continue
                row: dict[int, Fraction] = {}
                for c, p in r.terms:
                    if len(left) + len(p) + len(right) > top:
                        continue
                    full = Path(right.source, left.target, left.arrows + p.arrows + right.arrows)
                    k = pid[full]
                    row[k] = row.get(k, 0) + c
                ech.insert(row)
    dim_top = len(all_paths) - len(ech.pivots)
    for p in by_len[top]:
        ech.insert({pid[p]: Fraction(1)})
    dim_bound = len(all_paths) - len(ech.pivots)
    stabilized = dim_top == dim_bound
    if require_stable and not stabilized:
        raise StabilizationError(
            f"dimension {dim_bound} at bound {length_bound} but {dim_top} at {top}; "
            "raise the bound or the algebra may be infinite-dimensional"
        )
    ech.fully_reduce()
    basis = [p for p in all_paths if pid[p] not in ech.pivots]
    bidx = {pid[p]: k for k, p in enumerate(basis)}
    table: dict[Path, Vector] = {}
    for k, row in ech.pivots.items():
        table[all_paths[k]] = {bidx[kk]: -v for kk, v in row.items() if kk != k}

    def reducer(p: Path) -> Vector:
        return table.get(p, {})

    return FDAlgebra(q, basis, reducer, length_bound, stabilized, name=name)


def opposite(alg: FDAlgebra) -> FDAlgebra:
    """Opposite algebra on the opposite quiver, basis paths reversed."""
    inner = alg

    def reducer(p: Path) -> Vector:
        return inner.reduce(p.reversed())

    op = FDAlgebra(
        alg.quiver.opposite(),
        [p.reversed() for p in alg.basis],
        reducer,
        alg.length_bound,
        alg.stabilized,
        vertices=alg.vertices,
        name=(alg.name[:-3] if alg.name.endswith("^op") else f"{alg.name}^op") if alg.name else "",
    )
    return op


def corner(alg: FDAlgebra, vertices: Iterable[int]) -> FDAlgebra:
    """The algebra ``e A e`` for ``e`` the sum of the idempotents at ``vertices``.

    The result keeps the original vertex labels and path basis; its product is
    the restriction of the ambient one.
    """
    vs = tuple(sorted(set(vertices)))
    if not vs:
        raise ValueError("corner needs a nonempty vertex set")
    keep = [k for k, p in enumerate(alg.basis) if p.source in vs and p.target in vs]
    basis = [alg.basis[k] for k in keep]
    ren = {k: i for i, k in enumerate(keep)}

    def reducer(p: Path) -> Vector:
        out = alg.reduce(p)
        return {ren[k]: v for k, v in out.items()}

    return FDAlgebra(alg.quiver, basis, reducer, alg.length_bound, alg.stabilized,
                     vertices=vs, name=f"{alg.name}[{','.join(map(str, vs))}]")


def graded_dimensions(q: IceQuiver, relations: Sequence[PathCombination], bounds: Iterable[int]) -> dict[int, int]:
    """Dimension of the truncated quotient for each bound (no stability required)."""
    return {L: from_relations(q, relations, L, require_stable=False).dim for L in bounds}
