"""Seeds, seed mutation, y-hat monomials and upper cluster algebra membership."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .laurent import FractionExpr, LaurentPoly, NotDivisible, div_exact, parse, substitute
from .quiver import FrozenVertexError, IceQuiver, mutate

__all__ = [
    "Seed",
    "LaurentPhenomenonError",
    "initial_seed",
    "mutate_seed",
    "mutate_path",
    "yhat",
    "enumerate_clusters",
    "ClusterEnumeration",
    "is_laurent_in_cluster",
    "initial_in_cluster",
]


class LaurentPhenomenonError(AssertionError):
    """An exchange relation failed to normalize to a Laurent polynomial."""


@dataclass(frozen=True)
class Seed:
    quiver: IceQuiver
    vars: tuple[LaurentPoly, ...]
    history: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.vars) != self.quiver.n:
            raise ValueError(f"seed needs {self.quiver.n} variables, got {len(self.vars)}")

    @property
    def cluster(self) -> frozenset[LaurentPoly]:
        return frozenset(self.vars)

    def to_json(self) -> dict:
        return {
            "quiver": self.quiver.to_json(),
            "vars": [str(v) for v in self.vars],
            "history": list(self.history),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Seed":
        q = IceQuiver.from_json(data["quiver"])
        return cls(q, tuple(parse(s, q.n) for s in data["vars"]), tuple(data.get("history", ())))


def initial_seed(q: IceQuiver) -> Seed:
    return Seed(q, tuple(LaurentPoly.var(i, q.n) for i in q.vertices))


def _exchange_binomial(q: IceQuiver, us: Sequence[LaurentPoly], i: int) -> LaurentPoly:
    n = len(us)
    out_prod = LaurentPoly.const(us[0].nvars, 1)
    in_prod = LaurentPoly.const(us[0].nvars, 1)
    for j in range(1, n + 1):
        a, b = q.count(i, j), q.count(j, i)
        if a:
            out_prod = out_prod * us[j - 1] ** a
        if b:
            in_prod = in_prod * us[j - 1] ** b
    return out_prod + in_prod


def mutate_seed(s: Seed, i: int) -> Seed:
    if not 1 <= i <= s.quiver.m:
        raise FrozenVertexError(f"cannot mutate at vertex {i}")
    numer = _exchange_binomial(s.quiver, s.vars, i)
    try:
        new = div_exact(numer, s.vars[i - 1])
    except NotDivisible as exc:  # pragma: no cover - would contradict the Laurent phenomenon
        raise LaurentPhenomenonError(f"exchange at {i} is not Laurent: {exc}") from exc
    vars_ = list(s.vars)
    vars_[i - 1] = new
    return Seed(mutate(s.quiver, i), tuple(vars_), s.history + (i,))


def mutate_path(s: Seed, path: Sequence[int]) -> Seed:
    for i in path:
        s = mutate_seed(s, i)
    return s


def yhat(q: IceQuiver) -> tuple[LaurentPoly, ...]:
    """``yhat_j = prod_i x_i^(#(i->j) - #(j->i))``."""
    out = []
    for j in q.vertices:
        exp = [q.count(i, j) - q.count(j, i) for i in q.vertices]
        out.append(LaurentPoly.monomial(exp))
    return tuple(out)


@dataclass
class ClusterEnumeration:
    clusters: set[frozenset[LaurentPoly]] = field(default_factory=set)
    variables: set[LaurentPoly] = field(default_factory=set)
    seeds: list[Seed] = field(default_factory=list)
    truncated: bool = False

    @property
    def mutable_variables(self) -> set[LaurentPoly]:
        out = set()
        for s in self.seeds:
            out.update(s.vars[: s.quiver.m])
        return out


def enumerate_clusters(q: IceQuiver, max_seeds: int) -> ClusterEnumeration:
    """Breadth-first mutation closure, seeds identified by their variable sets."""
    start = initial_seed(q)
    res = ClusterEnumeration()
    res.clusters.add(start.cluster)
    res.seeds.append(start)
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for i in range(1, q.m + 1):
            t = mutate_seed(s, i)
            key = t.cluster
            if key in res.clusters:
                continue
            if len(res.clusters) >= max_seeds:
                res.truncated = True
                queue.clear()
                break
            res.clusters.add(key)
            res.seeds.append(t)
            queue.append(t)
    for s in res.seeds:
        res.variables.update(s.vars)
    return res


def initial_in_cluster(s: Seed) -> tuple[LaurentPoly, ...]:
    """The initial variables written as Laurent polynomials in the cluster of ``s``.

    Obtained by replaying the mutation history; each step inverts one exchange
    relation and normalizes exactly.
    """
    q0 = s.quiver
    # rebuild the quivers along the history
    n = q0.n
    start_quiver = q0
    for i in reversed(s.history):
        start_quiver = mutate(start_quiver, i)
    current = start_quiver
    exprs = [LaurentPoly.var(k, n) for k in range(1, n + 1)]
    for i in s.history:
        ys = [LaurentPoly.var(k, n) for k in range(1, n + 1)]
        # old y_i = (binomial in new variables) / new y_i
        old_i = FractionExpr(_exchange_binomial(current, ys, i), ys[i - 1])
        images = [FractionExpr.of(y) for y in ys]
        images[i - 1] = old_i
        exprs = [substitute(e, images).to_laurent() for e in exprs]
        current = mutate(current, i)
    return tuple(exprs)


def is_laurent_in_cluster(p: LaurentPoly | FractionExpr, s: Seed) -> bool:
    """Whether ``p`` (in the initial variables) is Laurent in the cluster of ``s``."""
    images = initial_in_cluster(s)
    if isinstance(p, LaurentPoly):
        expr = substitute(p, images)
    else:
        num = substitute(p.num, images)
        den = substitute(p.den, images)
        expr = FractionExpr(num.num * den.den, num.den * den.num)
    try:
        expr.to_laurent()
    except NotDivisible:
        return False
    return True
