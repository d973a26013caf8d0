"""Potentials, cyclic derivatives and Jacobian algebras."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .fdalg import FDAlgebra, Path, PathCombination, from_relations, parse_path, paths_from
from .quiver import IceQuiver

__all__ = [
    "Potential",
    "PathCombination",
    "canonical_rotation",
    "cyclic_derivative",
    "jacobian_relations",
    "jacobian_algebra",
    "check_relations",
]


def canonical_rotation(cycle: Sequence[str]) -> tuple[str, ...]:
    cycle = tuple(cycle)
    if not cycle:
        raise ValueError("empty cycle")
    return min(cycle[k:] + cycle[:k] for k in range(len(cycle)))


@dataclass(frozen=True)
class Potential:
    """Integer combination of oriented cycles, each in least rotation.

    Cycles are written in composition order, like paths.
    """

    quiver: IceQuiver
    terms: tuple[tuple[int, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        acc: dict[tuple[str, ...], int] = {}
        for c, cyc in self.terms:
            path = parse_path(self.quiver, list(cyc))
            if path.source != path.target:
                raise ValueError(f"{'*'.join(cyc)} is not a closed cycle")
            key = canonical_rotation(cyc)
            acc[key] = acc.get(key, 0) + int(c)
        object.__setattr__(self, "terms", tuple((c, k) for k, c in sorted(acc.items()) if c))

    @classmethod
    def zero(cls, q: IceQuiver) -> "Potential":
        return cls(q, ())

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {"terms": [[c, list(cyc)] for c, cyc in self.terms]}

    @classmethod
    def from_json(cls, q: IceQuiver, data: dict | str) -> "Potential":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(q, tuple((int(c), tuple(cyc)) for c, cyc in data.get("terms", [])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(("" if c == 1 else f"{c}*") + "*".join(cyc) for c, cyc in self.terms)


def cyclic_derivative(w: Potential, arrow_id: str) -> PathCombination:
    """``sum over W = u a v`` of ``v u``."""
    a = w.quiver.arrow(arrow_id)
    terms = []
    for c, cyc in w.terms:
        for k, x in enumerate(cyc):
            if x == arrow_id:
                rest = cyc[k + 1:] + cyc[:k]
                if rest:
                    terms.append((c, parse_path(w.quiver, list(rest))))
                else:  # a loop cycle; cannot occur in a loop-free quiver
                    terms.append((c, Path.trivial(a.target)))
    return PathCombination.build(a.target, a.source, terms)


def jacobian_relations(w: Potential) -> list[PathCombination]:
    return [d for d in (cyclic_derivative(w, a.id) for a in w.quiver.arrows) if not d.is_zero()]


def jacobian_algebra(q: IceQuiver, w: Potential, length_bound: int, *, require_stable: bool = True,
                     name: str = "") -> FDAlgebra:
    if length_bound < 1:
        raise ValueError("length_bound must be >= 1")
    if w.quiver != q:
        raise ValueError("potential lives on a different quiver")
    return from_relations(q, jacobian_relations(w), length_bound, require_stable=require_stable, name=name)


def check_relations(alg: FDAlgebra, w: Potential, extra_identities: Iterable[PathCombination] = (),
                    zero_length: int | None = None) -> bool:
    """Every cyclic derivative and every extra identity reduces to 0 in ``alg``.

    With ``zero_length`` set, all paths of that length must also vanish.
    """
    for rel in list(jacobian_relations(w)) + list(extra_identities):
        if alg.reduce_combination(rel):
            return False
    if zero_length is not None:
        if any(alg.reduce(p) for p in paths_from(alg.quiver, zero_length)[zero_length]):
            return False
    return True
