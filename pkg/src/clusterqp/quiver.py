"""Ice quivers with named arrows and their mutation at non-frozen vertices."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .linalg import mat, rank

__all__ = [
    "Arrow",
    "IceQuiver",
    "QuiverError",
    "FrozenVertexError",
    "mutate",
    "exchange_matrix",
    "mutate_matrix",
    "matrix_rank",
]


class QuiverError(ValueError):
    pass


class FrozenVertexError(QuiverError):
    """Mutation was requested at a frozen (or nonexistent) vertex."""


@dataclass(frozen=True)
class Arrow:
    id: str
    source: int
    target: int


@dataclass(frozen=True)
class IceQuiver:
    """Quiver on vertices ``1..n``; ``1..m`` are mutable, ``m+1..n`` frozen."""

    n: int
    m: int
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(
            a if isinstance(a, Arrow) else Arrow(str(a[0]), int(a[1]), int(a[2]))
            for a in self.arrows
        ))
        self.validate()

    def validate(self) -> None:
        if not 0 <= self.m <= self.n:
            raise QuiverError(f"need 0 <= m <= n, got m={self.m}, n={self.n}")
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise QuiverError("arrow ids must be distinct")
        pairs = set()
        for a in self.arrows:
            if not (1 <= a.source <= self.n and 1 <= a.target <= self.n):
                raise QuiverError(f"arrow {a.id} has an endpoint outside 1..{self.n}")
            if a.source == a.target:
                raise QuiverError(f"arrow {a.id} is a loop")
            pairs.add((a.source, a.target))
        for s, t in pairs:
            if (t, s) in pairs:
                raise QuiverError(f"2-cycle between vertices {s} and {t}")

    # -- queries ----------------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def frozen(self) -> range:
        return range(self.m + 1, self.n + 1)

    def is_frozen(self, v: int) -> bool:
        return v > self.m

    def arrow(self, arrow_id: str) -> Arrow:
        for a in self.arrows:
            if a.id == arrow_id:
                return a
        raise KeyError(f"unknown arrow {arrow_id!r}")

    def count(self, i: int, j: int) -> int:
        """Number of arrows ``i -> j``."""
        return sum(1 for a in self.arrows if a.source == i and a.target == j)

    def multiset(self) -> Counter:
        return Counter((a.source, a.target) for a in self.arrows)

    def opposite(self) -> "IceQuiver":
        return IceQuiver(self.n, self.m, tuple(Arrow(a.id, a.target, a.source) for a in self.arrows))

    def full_subquiver(self, vertices: Iterable[int]) -> "IceQuiver":
        """Induced subquiver, vertices renumbered in increasing order."""
        vs = sorted(set(vertices))
        ren = {v: k for k, v in enumerate(vs, start=1)}
        m = sum(1 for v in vs if v <= self.m)
        return IceQuiver(len(vs), m, tuple(
            Arrow(a.id, ren[a.source], ren[a.target])
            for a in self.arrows if a.source in ren and a.target in ren
        ))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "arrows": [[a.id, a.source, a.target] for a in self.arrows]}

    @classmethod
    def from_json(cls, data: dict | str) -> "IceQuiver":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["n"]), int(data.get("m", data["n"])),
                       tuple(Arrow(str(a[0]), int(a[1]), int(a[2])) for a in data.get("arrows", [])))
        except (KeyError, TypeError, IndexError) as exc:
            raise QuiverError(f"malformed quiver JSON: {exc}") from exc


_GEN = re.compile(r"^(.*)@(\d+)$")


def _reversed_id(aid: str) -> str:
    m = _GEN.match(aid)
    if m:
        return f"{m.group(1)}@{int(m.group(2)) + 1}"
    return f"{aid}@1"


def mutate(q: IceQuiver, i: int) -> IceQuiver:
    """Mutation at the non-frozen vertex ``i``.

    Composite arrows ``h -> i -> j`` get fresh ids ``[yx]`` (composition
    order); arrows at ``i`` are reversed and tagged with a generation counter;
    2-cycles are cancelled pairing arrows in id order.
    """
    if not 1 <= i <= q.m:
        raise FrozenVertexError(f"cannot mutate at vertex {i}: mutable vertices are 1..{q.m}")
    incoming = [a for a in q.arrows if a.target == i]
    outgoing = [a for a in q.arrows if a.source == i]
    taken = {a.id for a in q.arrows}
    new: list[Arrow] = []
    for x in incoming:
        for y in outgoing:
            base = f"[{y.id}{x.id}]"
            aid, k = base, 1
            while aid in taken:
                k += 1
                aid = f"{base}{k}"
            taken.add(aid)
            new.append(Arrow(aid, x.source, y.target))
    kept = []
    for a in q.arrows:
        if a.source == i or a.target == i:
            kept.append(Arrow(_reversed_id(a.id), a.target, a.source))
        else:
            kept.append(a)
    arrows = kept + new
    # cancel 2-cycles
    drop: set[str] = set()
    by_pair: dict[tuple[int, int], list[Arrow]] = {}
    for a in arrows:
        by_pair.setdefault((a.source, a.target), []).append(a)
    for (s, t), fwd in by_pair.items():
        if s < t and (t, s) in by_pair:
            bwd = by_pair[(t, s)]
            k = min(len(fwd), len(bwd))
            drop.update(a.id for a in sorted(fwd, key=lambda a: a.id)[:k])
            drop.update(a.id for a in sorted(bwd, key=lambda a: a.id)[:k])
    return IceQuiver(q.n, q.m, tuple(a for a in arrows if a.id not in drop))


def exchange_matrix(q: IceQuiver) -> list[list[int]]:
    """``b[i][j] = #(i -> j) - #(j -> i)`` (0-based indices)."""
    b = [[0] * q.n for _ in range(q.n)]
    for a in q.arrows:
        b[a.source - 1][a.target - 1] += 1
        b[a.target - 1][a.source - 1] -= 1
    return b


def mutate_matrix(b: Sequence[Sequence[int]], i: int) -> list[list[int]]:
    """Matrix mutation at the 1-based index ``i``."""
    k = i - 1
    n = len(b)
    out = [list(row) for row in b]
    for r in range(n):
        for c in range(n):
            if r == k or c == k:
                out[r][c] = -b[r][c]
            else:
                sgn = (b[r][k] > 0) - (b[r][k] < 0)
                out[r][c] = b[r][c] + sgn * max(b[r][k] * b[k][c], 0)
    return out


def matrix_rank(b: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals."""
    if not b:
        return 0
    return rank(mat(b))


def from_matrix(b: Sequence[Sequence[int]], m: int | None = None, prefix: str = "a") -> IceQuiver:
    """Quiver with ``b[i][j] > 0`` arrows ``i -> j`` (ids ``a_i_j_k``)."""
    n = len(b)
    arrows = []
    for r in range(n):
        for c in range(n):
            for k in range(max(b[r][c], 0)):
                arrows.append(Arrow(f"{prefix}{r + 1}_{c + 1}_{k + 1}", r + 1, c + 1))
    return IceQuiver(n, n if m is None else m, tuple(arrows))
