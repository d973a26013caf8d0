"""Shipped example quivers with potential, and loading of user quiver files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path as FsPath

from .fdalg import FDAlgebra, PathCombination, from_relations
from .modrep import op_algebra
from .potential import Potential, jacobian_algebra
from .quiver import IceQuiver

__all__ = ["Fixture", "FixtureError", "fixture_names", "load_fixture", "load_quiver"]


class FixtureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    quiver: IceQuiver
    potential: Potential | None = None
    relations: tuple[PathCombination, ...] | None = None
    bound: int = 8
    notes: str = ""
    _algs: dict = field(default_factory=dict, repr=False)

    def jacobian(self, backend: str = "potential", bound: int | None = None) -> FDAlgebra:
        """The Jacobian algebra, from the potential or from the explicit relation list."""
        L = self.bound if bound is None else bound
        key = (backend, L)
        if key not in self._algs:
            if backend == "potential":
                w = self.potential if self.potential is not None else Potential.zero(self.quiver)
                alg = jacobian_algebra(self.quiver, w, L, name=self.name)
            elif backend == "relations":
                if self.relations is None:
                    raise FixtureError(f"fixture {self.name} has no relation list")
                alg = from_relations(self.quiver, self.relations, L, name=self.name)
            else:
                raise FixtureError(f"unknown backend {backend!r}")
            self._algs[key] = alg
        return self._algs[key]

    def module_algebra(self, backend: str = "potential", bound: int | None = None) -> FDAlgebra:
        """Algebra of the (right Jacobian) modules used by cluster characters."""
        return op_algebra(self.jacobian(backend, bound))

    @classmethod
    def from_json(cls, data: dict) -> "Fixture":
        q = IceQuiver.from_json(data["quiver"])
        w = Potential.from_json(q, data["potential"]) if data.get("potential") is not None else None
        rels = None
        if data.get("relations") is not None:
            rels = tuple(PathCombination.from_json(q, r) for r in data["relations"])
        return cls(data.get("name", ""), q, w, rels, int(data.get("bound", 8)), data.get("notes", ""))


def fixture_names() -> list[str]:
    root = resources.files("clusterqp") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


@lru_cache(maxsize=None)
def _load_builtin(name: str) -> Fixture:
    root = resources.files("clusterqp") / "fixtures"
    data = json.loads((root / f"{name}.json").read_text())
    return Fixture.from_json(data)


def load_fixture(spec: str) -> Fixture:
    """A shipped fixture by name (``a2`` or ``a2.json``) or a fixture file path."""
    name = spec[:-5] if spec.endswith(".json") else spec
    path = FsPath(spec)
    if path.exists():
        data = json.loads(path.read_text())
        if "quiver" not in data:
            return Fixture(path.stem, IceQuiver.from_json(data))
        return Fixture.from_json(data)
    if name in fixture_names():
        return _load_builtin(name)
    raise FixtureError(f"no fixture or file named {spec!r}; shipped: {', '.join(fixture_names())}")


def load_quiver(spec: str) -> IceQuiver:
    return load_fixture(spec).quiver
