import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.codes import (
    CodeError,
    CosetClass,
    ancestor,
    build_code,
    check_code,
    code_from_text,
    code_to_text,
    coset_class,
    five_qubit,
    fix_qubits,
    qpc,
    rotated_plaquettes,
    rotated_surface,
    standard_surface,
    steane,
    tree,
)
from artifact.paulis import P, PauliOperator, commutes, gf2_rank, multiply, product


def brute_group(gens, n):
    """Every phase-stripped product of the generators."""
    out = set()
    for r in range(len(gens) + 1):
        for sel in itertools.combinations(gens, r):
            out.add(product(sel, n).vector if sel else 0)
    return out


def test_qpc22_generators():
    assert {str(g)[1:] for g in qpc(2, 2).generators} == {"XXXX", "ZZII", "IIZZ"}


def test_qpc11_bare_qubit():
    code = qpc(1, 1)
    assert code.generators == ()
    assert code.logical_x == P("X") and code.logical_z == P("Z")


def test_qpc55_rank():
    code = qpc(5, 5)
    assert code.n == 25
    assert gf2_rank(code.generators) == 24


def test_small_codes():
    assert [g.letters for g in five_qubit().generators] == ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    s = steane()
    assert s.stabilizer_basis.contains(P("ZZZZIII"))
    assert coset_class(s, P("XXXXXXX")) is CosetClass.LOGICAL_X
    assert coset_class(s, P("ZZZZZZZ")) is CosetClass.LOGICAL_Z


def test_surface_sizes():
    assert standard_surface(4, 4).n == 25
    assert rotated_surface(5, 5).n == 25
    code = standard_surface(2, 2)
    assert code.n == 5 and check_code(code) == []


@pytest.mark.parametrize("r,m", [(r, m) for r in range(2, 7) for m in range(2, 7)])
def test_qubit_count_formulas(r, m):
    assert qpc(r, m).n == r * m
    assert standard_surface(r, m).n == 2 * m * r - m - r + 1
    assert rotated_surface(r, m).n == r * m


@pytest.mark.parametrize("branching", [(1,), (3,), (2, 2), (3, 2), (2, 2, 2), (1, 3, 2)])
def test_tree_size_and_ancestors(branching):
    code = tree(branching)
    levels, size = 1, 1
    for b in branching:
        levels *= b
        size += levels
    assert code.n == size
    depth = code.layout["depth"]
    for v in range(code.n):
        assert ancestor(code, v, 0) == 0
        assert ancestor(code, v, depth[v]) == v


def test_tree_logical_forms():
    code = tree((2, 2))
    assert code.n == 7 and len(code.generators) == 6
    children = code.layout["children"]
    # X_v times Z on the children of v, for a depth-1 vertex v
    v = children[0][0]
    sites = {v: "X"} | {w: "Z" for w in children[v]}
    assert coset_class(code, PauliOperator.from_sites(code.n, sites)) is CosetClass.LOGICAL_X
    star = tree((3,))
    k_root = PauliOperator.from_sites(4, {0: "X", 1: "Z", 2: "Z", 3: "Z"})
    assert star.logical_z == k_root


def test_coset_examples():
    code = qpc(2, 2)
    for lit in ("ZIZI", "ZIIZ", "IZZI", "IZIZ"):
        assert coset_class(code, P(lit)) is CosetClass.LOGICAL_Z
    assert coset_class(code, P("IIII")) is CosetClass.STABILIZER
    assert coset_class(five_qubit(), P("ZYIIY")) is CosetClass.LOGICAL_Z
    assert coset_class(code, P("XIII")) is CosetClass.OUTSIDE


@pytest.mark.parametrize("family,params", [("qpc", (2, 2)), ("five-qubit", ()), ("standard", (2, 2)), ("tree", (2, 2))])
def test_coset_class_against_brute_force(family, params):
    code = build_code(family, params)
    group = brute_group(list(code.generators), code.n)
    lx, lz = code.logical_x.vector, code.logical_z.vector
    expect = {0: CosetClass.STABILIZER, lx: CosetClass.LOGICAL_X, lz: CosetClass.LOGICAL_Z, lx ^ lz: CosetClass.LOGICAL_Y}
    cosets = {}
    for shift, cls in expect.items():
        for g in group:
            cosets[g ^ shift] = cls
    n = code.n
    for x in range(2**n):
        for z in range(0, 2**n, max(1, 2**n // 8)):
            op = PauliOperator(n, x, z)
            assert coset_class(code, op) is cosets.get(op.vector, CosetClass.OUTSIDE)


ALL_CODES = [
    ("qpc", (1, 1)), ("qpc", (2, 2)), ("qpc", (3, 4)), ("five-qubit", ()), ("steane", ()),
    ("standard", (2, 2)), ("standard", (3, 4)), ("rotated", (3, 3)), ("rotated", (4, 5)),
    ("tree", (2, 2)), ("tree", (3, 2)), ("tree", (2, 2, 2)),
]


@pytest.mark.parametrize("family,params", ALL_CODES)
def test_constructors_valid(family, params):
    code = build_code(family, params)
    assert check_code(code) == []
    assert code_from_text(code_to_text(code)).generators == code.generators


def test_check_code_reports_problems():
    code = qpc(2, 2)
    bad = type(code)("custom", (), 4, code.generators, P("ZIII"), code.logical_z)
    problems = check_code(bad)
    assert any("anticommutes" in p for p in problems)
    with pytest.raises(CodeError):
        qpc(0, 2)
    with pytest.raises(CodeError):
        tree(())
    with pytest.raises(CodeError):
        rotated_surface(1, 4)


@pytest.mark.parametrize("r,m", [(2, 2), (3, 3), (3, 4), (5, 5), (4, 6)])
def test_rotated_z_string_meets_x_plaquettes_evenly(r, m):
    code = rotated_surface(r, m)
    idx = code.layout["index"]
    z_sites = {q for q in range(code.n) if (code.logical_z.z >> q) & 1}
    for kind, verts in rotated_plaquettes(r, m):
        if kind == "X":
            assert len(z_sites & {idx[v] for v in verts}) % 2 == 0


def test_fix_qubits_reduces_tree_root():
    code = tree((2, 2))
    red = fix_qubits(code, [(0, "X")])
    assert red.code.n == 6 and check_code(red.code) == []
    assert red.restrict(code.logical_z).n == 6


@settings(max_examples=40)
@given(st.sampled_from(ALL_CODES[1:]), st.data())
def test_coset_class_is_stable_under_stabilizer_multiplication(item, data):
    code = build_code(*item)
    n = code.n
    op = PauliOperator(n, data.draw(st.integers(0, 2**n - 1)), data.draw(st.integers(0, 2**n - 1)))
    picks = data.draw(st.lists(st.sampled_from(code.generators), max_size=4))
    moved = product([op, *picks], n)
    assert coset_class(code, op) is coset_class(code, moved)
    # commuting with the whole group is what separates logicals from Outside
    inside = all(commutes(op, g) for g in code.generators)
    assert inside == (coset_class(code, op) is not CosetClass.OUTSIDE)
