from fractions import Fraction

import pytest

from clusterqp.fdalg import PathCombination, StabilizationError, parse_path, paths_from
from clusterqp.potential import (
    Potential,
    canonical_rotation,
    check_relations,
    cyclic_derivative,
    jacobian_algebra,
)
from clusterqp.quiver import IceQuiver

PAPER_P1 = ["e1", "c1", "c2", "c1*b1", "c1*b2", "c2*b1", "c2*b2", "c1*b1*a1", "c1*b2*a1",
            "c2*b1*a2", "c1*b2*a1*c2", "c2*b1*a2*c1"]


def terms(pc):
    return sorted((str(p), c) for c, p in pc.terms)


def W(q, data):
    return Potential.from_json(q, {"terms": data})


def test_cyclic_derivative_examples(labardini):
    q = labardini.quiver
    assert terms(cyclic_derivative(W(q, [[1, ["c1", "b1", "a1"]]]), "c1")) == [("b1*a1", 1)]
    two = W(q, [[1, ["c1", "b1", "a1"]], [1, ["c2", "b2", "a2"]]])
    assert terms(cyclic_derivative(two, "a1")) == [("c1*b1", 1)]
    assert terms(cyclic_derivative(labardini.potential, "c1")) == [("b1*a1", 1), ("b2*a1*c2*b1*a2", -1)]


def test_cyclic_derivative_all_rotations():
    # a 3-cycle traversed twice: a occurs twice
    q3 = IceQuiver.from_json({"n": 3, "m": 3, "arrows": [["a", 1, 2], ["b", 2, 3], ["c", 3, 1]]})
    w = W(q3, [[1, ["c", "b", "a", "c", "b", "a"]]])
    d = cyclic_derivative(w, "a")
    # two occurrences, each contributing c*b*a*c*b
    assert terms(d) == [("c*b*a*c*b", 2)]


def test_unknown_arrow(labardini):
    with pytest.raises(KeyError):
        cyclic_derivative(labardini.potential, "z9")


def test_potential_validation(labardini):
    q = labardini.quiver
    with pytest.raises(ValueError):
        W(q, [[1, ["b1", "a1"]]])   # not closed
    with pytest.raises(ValueError):
        W(q, [[1, ["a1", "b1", "c1"]]])   # not composable in composition order


def test_canonical_rotation():
    assert canonical_rotation(["c1", "b1", "a1"]) == ("a1", "c1", "b1")
    q = IceQuiver.from_json({"n": 3, "m": 3, "arrows": [["a", 1, 2], ["b", 2, 3], ["c", 3, 1]]})
    assert W(q, [[1, ["c", "b", "a"]], [2, ["a", "c", "b"]]]).to_json() == {"terms": [[3, ["a", "c", "b"]]]}


def test_a2_jacobian_algebra(a2):
    alg = jacobian_algebra(a2.quiver, Potential.zero(a2.quiver), 5)
    assert alg.dim == 3


def test_labardini_basis(labardini):
    alg = labardini.jacobian()
    assert alg.dim == 36
    assert sorted(map(str, alg.normal_forms(target=1))) == sorted(PAPER_P1)
    for v in (1, 2, 3):
        assert len(alg.normal_forms(target=v)) == 12
        assert len(alg.normal_forms(source=v)) == 12


def test_paper_relations(labardini):
    alg = labardini.jacobian()
    q = labardini.quiver
    assert not alg.reduce(parse_path(q, "c1*b1*a2"))
    same = PathCombination.build(1, 1, [(1, parse_path(q, "c1*b1*a1")), (-1, parse_path(q, "c2*b2*a2"))])
    assert check_relations(alg, labardini.potential, [same], zero_length=7)
    assert not check_relations(alg, labardini.potential, [PathCombination.build(1, 1, [(1, parse_path(q, "c1*b1*a1"))])])
    assert check_relations(jacobian_algebra(q, Potential.zero(q), 2, require_stable=False), Potential.zero(q))


def test_relations_fixture_agrees(labardini):
    a = labardini.jacobian("potential")
    b = labardini.jacobian("relations")
    assert a.basis == b.basis
    for L, paths in paths_from(labardini.quiver, 8).items():
        for p in paths:
            assert a.reduce(p) == b.reduce(p)


def test_reduction_idempotent_and_closed(labardini):
    alg = labardini.jacobian()
    for k, p in enumerate(alg.basis):
        assert alg.reduce(p) == {k: Fraction(1)}
        for a in alg.quiver.arrows:
            prod = parse_path(alg.quiver, [a.id]) * p
            if prod is not None:
                assert all(0 <= j < alg.dim for j in alg.reduce(prod))


def test_graded_dimension_non_decreasing(labardini):
    q, w = labardini.quiver, labardini.potential
    dims = [jacobian_algebra(q, w, L, require_stable=False).dim for L in range(1, 10)]
    assert dims == sorted(dims)
    assert dims[5:] == [36] * 4


def test_unstable_bound_raises(labardini):
    with pytest.raises(StabilizationError):
        jacobian_algebra(labardini.quiver, labardini.potential, 4)
