"""Stabilizer codes with one logical qubit, and coset queries on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from .paulis import (
    PauliOperator,
    SymplecticBasis,
    commutes,
    gf2_rank,
    multiply,
)


class CodeError(ValueError):
    """A code failed validation or was requested with bad parameters."""


class CosetClass(enum.Enum):
    STABILIZER = "Stabilizer"
    LOGICAL_X = "LogicalX"
    LOGICAL_Y = "LogicalY"
    LOGICAL_Z = "LogicalZ"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class StabilizerCode:
    family: str
    params: tuple[int, ...]
    n: int
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    layout: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def stabilizer_basis(self) -> SymplecticBasis:
        return SymplecticBasis.from_ops(self.generators, self.n)

    @property
    def label(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}({','.join(map(str, self.params))})"

    def coords(self, q: int) -> Any:
        return self.layout.get("coords", list(range(self.n)))[q]

    def index(self, coord: Any) -> int:
        return self.layout["index"][coord]


def coset_class(code: StabilizerCode, op: PauliOperator) -> CosetClass:
    """Phase-stripped class of ``op`` relative to the code's stabilizer group."""
    if op.n != code.n:
        raise CodeError(f"operator on {op.n} qubits, code has {code.n}")
    basis = code.stabilizer_basis
    if basis.contains(op):
        return CosetClass.STABILIZER
    x_rep, z_rep = code.logical_x, code.logical_z
    if basis.contains(multiply(op, x_rep, effective=True)):
        return CosetClass.LOGICAL_X
    if basis.contains(multiply(op, z_rep, effective=True)):
        return CosetClass.LOGICAL_Z
    y_rep = multiply(x_rep, z_rep, effective=True)
    if basis.contains(multiply(op, y_rep, effective=True)):
        return CosetClass.LOGICAL_Y
    return CosetClass.OUTSIDE


def check_code(code: StabilizerCode) -> list[str]:
    """List every violated code invariant; empty means the code is valid."""
    problems: list[str] = []
    gens = code.generators
    if any(g.n != code.n for g in gens):
        problems.append("generator length differs from n")
        return problems
    if len(gens) != code.n - 1:
        problems.append(f"expected {code.n - 1} generators, got {len(gens)}")
    if gf2_rank(gens) != len(gens):
        problems.append("generators are not independent")
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if not commutes(gens[a], gens[b]):
                problems.append(f"generators {a} and {b} anticommute")
    for name, rep in (("X", code.logical_x), ("Z", code.logical_z)):
        if not rep.is_hermitian:
            problems.append(f"logical {name} is not Hermitian")
        for k, g in enumerate(gens):
            if not commutes(rep, g):
                problems.append(f"logical {name} anticommutes with generator {k}")
        if code.stabilizer_basis.contains(rep):
            problems.append(f"logical {name} lies in the stabilizer group")
    if commutes(code.logical_x, code.logical_z):
        problems.append("logical X and Z commute")
    return problems


def validated(code: StabilizerCode) -> StabilizerCode:
    problems = check_code(code)
    if problems:
        raise CodeError(f"{code.label}: " + "; ".join(problems))
    return code


def _op(n: int, sites: Iterable[int], letter: str) -> PauliOperator:
    return PauliOperator.from_sites(n, {q: letter for q in sites})


# quantum parity codes ----------------------------------------------------


def qpc(r: int, m: int) -> StabilizerCode:
    """Parity code on an r×m grid, qubit (i, j) at index (i-1)*m + (j-1).

    Stabilizers are ZZ on horizontal neighbours and X on two consecutive full
    rows.  Stored logicals: X on row 1, and Z down the first column.
    """
    if r < 1 or m < 1:
        raise CodeError(f"qpc needs r, m >= 1, got ({r}, {m})")
    n = r * m
    idx = {(i, j): (i - 1) * m + (j - 1) for i in range(1, r + 1) for j in range(1, m + 1)}
    gens = [_op(n, (idx[i, j], idx[i, j + 1]), "Z") for i in range(1, r + 1) for j in range(1, m)]
    gens += [
        _op(n, [idx[i, t] for t in range(1, m + 1)] + [idx[i + 1, t] for t in range(1, m + 1)], "X")
        for i in range(1, r)
    ]
    layout = {"coords": sorted(idx, key=idx.get), "index": idx, "shape": (r, m)}
    return validated(
        StabilizerCode(
            "qpc",
            (r, m),
            n,
            tuple(gens),
            _op(n, (idx[1, t] for t in range(1, m + 1)), "X"),
            _op(n, (idx[i, 1] for i in range(1, r + 1)), "Z"),
            layout,
        )
    )


# small codes --------------------------------------------------------------


def five_qubit() -> StabilizerCode:
    gens = tuple(PauliOperator.from_str(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"))
    return validated(
        StabilizerCode(
            "five-qubit",
            (),
            5,
            gens,
            PauliOperator.from_str("XXXXX"),
            PauliOperator.from_str("ZZZZZ"),
            {"coords": [1, 2, 3, 4, 5]},
        )
    )


STEANE_FACES = {"A": (1, 2, 3, 4), "B": (2, 4, 5, 6), "C": (3, 4, 6, 7)}


def steane() -> StabilizerCode:
    """Seven-qubit color code on three faces; qubits numbered 1..7 (index q-1)."""
    n = 7
    faces = {k: [q - 1 for q in v] for k, v in STEANE_FACES.items()}
    gens = [_op(n, f, "X") for f in faces.values()] + [_op(n, f, "Z") for f in faces.values()]
    chain = (0, 2, 6)  # qubits 1, 3, 7
    return validated(
        StabilizerCode(
            "steane",
            (),
            n,
            tuple(gens),
            _op(n, chain, "X"),
            _op(n, chain, "Z"),
            {"coords": list(range(1, 8)), "faces": faces},
        )
    )


# surface codes ------------------------------------------------------------


def standard_surface(r: int, m: int) -> StabilizerCode:
    """Planar surface code in (layer, column) coordinates.

    Qubits sit at (l, c) with l in 1..2r-1, c in 1..2m-1 and l+c even, indexed
    lexicographically.  X vertex operators sit at (odd, even) and Z face
    operators at (even, odd); each acts on the existing nearest neighbours.
    """
    if r < 2 or m < 2:
        raise CodeError(f"standard_surface needs r, m >= 2, got ({r}, {m})")
    L, Cc = 2 * r - 1, 2 * m - 1
    coords = [(l, c) for l in range(1, L + 1) for c in range(1, Cc + 1) if (l + c) % 2 == 0]
    idx = {p: k for k, p in enumerate(coords)}
    n = len(coords)

    def star(l: int, c: int, letter: str) -> PauliOperator:
        near = [(l - 1, c), (l + 1, c), (l, c - 1), (l, c + 1)]
        return _op(n, (idx[p] for p in near if p in idx), letter)

    vertices = [(l, c) for l in range(1, L + 1, 2) for c in range(2, Cc, 2)]
    faces = [(l, c) for l in range(2, L, 2) for c in range(1, Cc + 1, 2)]
    gens = [star(*v, "X") for v in vertices] + [star(*f, "Z") for f in faces]
    layout = {
        "coords": coords,
        "index": idx,
        "shape": (r, m),
        "vertex_ops": {v: star(*v, "X") for v in vertices},
        "face_ops": {f: star(*f, "Z") for f in faces},
    }
    return validated(
        StabilizerCode(
            "standard",
            (r, m),
            n,
            tuple(gens),
            _op(n, (idx[l, Cc] for l in range(1, L + 1, 2)), "X"),
            _op(n, (idx[1, c] for c in range(1, Cc + 1, 2)), "Z"),
            layout,
        )
    )


def rotated_plaquettes(r: int, m: int) -> list[tuple[str, tuple[tuple[int, int], ...]]]:
    """(type, vertices) for every plaquette of the r×m rotated lattice.

    The face with top-left vertex (i, j) is X type when i + j is odd.
    """
    plaqs: list[tuple[str, tuple[tuple[int, int], ...]]] = []
    for i in range(1, r):
        for j in range(1, m):
            kind = "X" if (i + j) % 2 == 1 else "Z"
            plaqs.append((kind, ((i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1))))
    for i in range(1, r):
        if i % 2 == 0:
            plaqs.append(("Z", ((i, 1), (i + 1, 1))))
        if (i + m) % 2 == 0:
            plaqs.append(("Z", ((i, m), (i + 1, m))))
    for j in range(1, m):
        if j % 2 == 1:
            plaqs.append(("X", ((1, j), (1, j + 1))))
        if (r + j) % 2 == 1:
            plaqs.append(("X", ((r, j), (r, j + 1))))
    return plaqs


def rotated_surface(r: int, m: int) -> StabilizerCode:
    """Rotated planar code on an r×m vertex grid, vertex (i, j) at (i-1)*m + j-1.

    The boundary plaquette on (1,1)-(1,2) is X type; X logical runs down
    column 1 and Z logical along row 1.
    """
    if r < 2 or m < 2:
        raise CodeError(f"rotated_surface needs r, m >= 2, got ({r}, {m})")
    n = r * m
    idx = {(i, j): (i - 1) * m + (j - 1) for i in range(1, r + 1) for j in range(1, m + 1)}
    plaqs = rotated_plaquettes(r, m)
    gens = [_op(n, (idx[v] for v in verts), kind) for kind, verts in plaqs]
    layout = {"coords": sorted(idx, key=idx.get), "index": idx, "shape": (r, m), "plaquettes": plaqs}
    return validated(
        StabilizerCode(
            "rotated",
            (r, m),
            n,
            tuple(gens),
            _op(n, (idx[i, 1] for i in range(1, r + 1)), "X"),
            _op(n, (idx[1, j] for j in range(1, m + 1)), "Z"),
            layout,
        )
    )


# trees --------------------------------------------------------------------


def tree(branching: Sequence[int]) -> StabilizerCode:
    """Graph-state code on a rooted tree, vertices numbered breadth first.

    ``branching[d]`` is the number of children of every depth-``d`` vertex.
    The root's graph stabilizer is dropped and becomes the Z logical; the X
    logical is Z_root times the graph stabilizer of the root's first child.
    """
    if not branching or any(b < 1 for b in branching):
        raise CodeError(f"tree needs a non-empty list of positive branchings, got {branching!r}")
    parent: list[int | None] = [None]
    depth = [0]
    frontier = [0]
    for b in branching:
        nxt = []
        for v in frontier:
            for _ in range(b):
                parent.append(v)
                depth.append(depth[v] + 1)
                nxt.append(len(parent) - 1)
        frontier = nxt
    n = len(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p is not None:
            children[p].append(v)

    def graph_stab(v: int) -> PauliOperator:
        nbrs = children[v] + ([parent[v]] if parent[v] is not None else [])
        sites = {w: "Z" for w in nbrs}
        sites[v] = "X"
        return PauliOperator.from_sites(n, sites)

    first = children[0][0]
    root_z = PauliOperator.single(n, 0, "Z")
    layout = {
        "coords": list(range(n)),
        "parent": parent,
        "depth": depth,
        "children": children,
        "graph_stabilizers": [graph_stab(v) for v in range(n)],
        "root": 0,
    }
    return validated(
        StabilizerCode(
            "tree",
            tuple(branching),
            n,
            tuple(graph_stab(v) for v in range(1, n)),
            multiply(root_z, graph_stab(first)),
            graph_stab(0),
            layout,
        )
    )


def ancestor(code: StabilizerCode, v: int, d: int) -> int:
    """Ancestor of tree vertex ``v`` at depth ``d`` (``v`` itself at its own depth)."""
    depth, parent = code.layout["depth"], code.layout["parent"]
    if not 0 <= d <= depth[v]:
        raise CodeError(f"vertex {v} has no ancestor at depth {d}")
    while depth[v] > d:
        v = parent[v]
    return v


# fixing measured qubits ---------------------------------------------------


@dataclass(frozen=True)
class ReducedCode:
    """A code after some qubits were measured in fixed single-qubit bases.

    ``keep`` lists the surviving parent-code qubits in order; ``fixed`` maps
    each measured parent qubit to its letter.
    """

    code: StabilizerCode
    parent: StabilizerCode
    keep: tuple[int, ...]
    fixed: dict[int, str]

    def restrict(self, op: PauliOperator) -> PauliOperator:
        """Parent-code operator to reduced-code operator, phase dropped.

        At each fixed qubit the operator must act as identity or as the fixed
        letter, which the measurement record absorbs.
        """
        for q, letter in self.fixed.items():
            if op.letter(q) not in ("I", letter):
                raise CodeError(f"{op} does not commute with fixed {letter} on qubit {q}")
        sites = {k: op.letter(q) for k, q in enumerate(self.keep) if op.letter(q) != "I"}
        return PauliOperator.from_sites(len(self.keep), sites)

    def lift_index(self, k: int) -> int:
        return self.keep[k]

    def reduce_index(self, q: int) -> int:
        return self.keep.index(q)


def fix_qubits(code: StabilizerCode, measured: Sequence[tuple[int, str]]) -> ReducedCode:
    """Measure single qubits on ``code`` and restrict to the rest.

    Generators anticommuting with a measured operator are merged into the
    lowest-index one, which is then consumed; logical representatives are
    repaired with the same survivor.
    """
    if not measured:
        return ReducedCode(code, code, tuple(range(code.n)), {})
    gens = list(code.generators)
    lx, lz = code.logical_x, code.logical_z
    for q, letter in measured:
        m = PauliOperator.single(code.n, q, letter)
        hits = [k for k, g in enumerate(gens) if not commutes(g, m)]
        if not hits:
            raise CodeError(f"measuring {letter} on qubit {q} does not replace a generator")
        s = gens[hits[0]]
        for k in hits[1:]:
            gens[k] = multiply(gens[k], s, effective=True)
        if not commutes(lx, m):
            lx = multiply(lx, s, effective=True)
        if not commutes(lz, m):
            lz = multiply(lz, s, effective=True)
        del gens[hits[0]]
    fixed = {q: letter.upper() for q, letter in measured}
    keep = tuple(q for q in range(code.n) if q not in fixed)
    shell = ReducedCode(code, code, keep, fixed)
    reduced = StabilizerCode(
        code.family + "-reduced",
        code.params,
        len(keep),
        tuple(shell.restrict(g) for g in gens),
        shell.restrict(lx),
        shell.restrict(lz),
        {"coords": [code.coords(q) for q in keep], "parent_index": keep},
    )
    return ReducedCode(validated(reduced), code, keep, fixed)


# serialization ------------------------------------------------------------


def code_to_text(code: StabilizerCode) -> str:
    lines = [f"code {code.family} {' '.join(map(str, code.params))}".rstrip(), f"n {code.n}"]
    lines += [f"gen {g}" for g in code.generators]
    lines += [f"logical_x {code.logical_x}", f"logical_z {code.logical_z}"]
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> StabilizerCode:
    family, params, n = "custom", (), None
    gens: list[PauliOperator] = []
    lx = lz = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "code":
            parts = rest.split()
            family, params = parts[0], tuple(int(p) for p in parts[1:])
        elif key == "n":
            n = int(rest)
        elif key == "gen":
            gens.append(PauliOperator.from_str(rest))
        elif key == "logical_x":
            lx = PauliOperator.from_str(rest)
        elif key == "logical_z":
            lz = PauliOperator.from_str(rest)
        else:
            raise CodeError(f"unknown code file key {key!r}")
    if lx is None or lz is None:
        raise CodeError("code file needs logical_x and logical_z lines")
    n = n if n is not None else lx.n
    return validated(StabilizerCode(family, params, n, tuple(gens), lx, lz))


def build_code(family: str, params: Sequence[int] = ()) -> StabilizerCode:
    """Construct a built-in code by family name."""
    family = family.lower()
    if family == "qpc":
        return qpc(*params)
    if family in ("five-qubit", "five_qubit", "five"):
        return five_qubit()
    if family == "steane":
        return steane()
    if family in ("standard", "standard-surface"):
        return standard_surface(*params)
    if family in ("rotated", "rotated-surface"):
        return rotated_surface(*params)
    if family == "tree":
        return tree(list(params))
    raise CodeError(f"unknown code family {family!r}")
