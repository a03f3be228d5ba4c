"""Logical Bell-measurement schemes: data model, builders and static baselines.

A feedforward scheme is stored in normal form: a measurement order over the
code's qubits, one fallback basis per position (used when the Bell measurement
at that position fails), and one logical pair per position naming the logical
X and Z operators that finish the job after a first success there.  All
operators and indices refer to the parent code, including for trees whose
root is consumed by a fixed pre-step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .codes import (
    CosetClass,
    ReducedCode,
    StabilizerCode,
    ancestor,
    build_code,
    coset_class,
    fix_qubits,
    rotated_surface,
    standard_surface,
)
from .paulis import PauliOperator, SymplecticBasis, commutes, multiply, product

BASES = "XYZ"


class SchemeError(ValueError):
    """A scheme is malformed or cannot be built for the requested parameters."""


@dataclass(frozen=True)
class Scheme:
    code: StabilizerCode
    order: tuple[int, ...]
    bases: str
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...]
    pre_steps: tuple[tuple[int, str], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        fixed = {q for q, _ in self.pre_steps}
        expected = sorted(q for q in range(self.code.n) if q not in fixed)
        if sorted(self.order) != expected:
            raise SchemeError("order must be a permutation of the non-pre-step qubits")
        if len(self.bases) != len(self.order) or any(b not in BASES for b in self.bases):
            raise SchemeError(f"need one basis in XYZ per position, got {self.bases!r}")
        if len(self.logicals) != len(self.order):
            raise SchemeError(f"need {len(self.order)} logical pairs, got {len(self.logicals)}")

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def reduced(self) -> ReducedCode:
        return fix_qubits(self.code, self.pre_steps)

    def single_code(self) -> "SchemeView":
        red = self.reduced
        order = tuple(red.reduce_index(q) for q in self.order)
        logicals = tuple((red.restrict(x), red.restrict(z)) for x, z in self.logicals)
        return SchemeView(red.code, order, self.bases, logicals)

    def completion_bases(self, position: int) -> str:
        """Bases for positions after a first success at ``position``."""
        return self.single_code().completion_bases(position)


@dataclass(frozen=True)
class SchemeView:
    """Scheme in the single-code picture, on the (possibly reduced) code."""

    code: StabilizerCode
    order: tuple[int, ...]
    bases: str
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...]

    @property
    def n(self) -> int:
        return len(self.order)

    def b(self, p: int) -> PauliOperator:
        return PauliOperator.single(self.code.n, self.order[p], self.bases[p])

    def completion_bases(self, position: int) -> str:
        """Letters the logical pair at ``position`` asks for on every later qubit.

        Qubits outside both supports keep their fallback basis.
        """
        lx, lz = self.logicals[position]
        out = []
        for p in range(position + 1, self.n):
            q = self.order[p]
            a, b = lx.letter(q), lz.letter(q)
            if a != "I" and b != "I" and a != b:
                raise SchemeError(f"logical pair {position} needs two bases on qubit {q}")
            out.append(a if a != "I" else b if b != "I" else self.bases[p])
        return "".join(out)


@dataclass(frozen=True)
class StaticScheme:
    code: StabilizerCode
    order: tuple[int, ...]
    bases: str
    pre_steps: tuple[tuple[int, str], ...] = ()
    name: str = ""
    marked: frozenset[int] = field(default_factory=frozenset)  # string qubits, for baselines

    def __post_init__(self) -> None:
        fixed = {q for q, _ in self.pre_steps}
        if sorted(self.order) != sorted(q for q in range(self.code.n) if q not in fixed):
            raise SchemeError("order must be a permutation of the non-pre-step qubits")
        if len(self.bases) != len(self.order) or any(b not in BASES for b in self.bases):
            raise SchemeError(f"need one basis in XYZ per qubit, got {self.bases!r}")

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def reduced(self) -> ReducedCode:
        return fix_qubits(self.code, self.pre_steps)

    def single_code(self) -> SchemeView:
        red = self.reduced
        order = tuple(red.reduce_index(q) for q in self.order)
        return SchemeView(red.code, order, self.bases, ())


def basis_of(scheme: StaticScheme, qubit: int) -> str:
    return scheme.bases[scheme.order.index(qubit)]


# candidate generator sequences ------------------------------------------


def reduce_sequence(scheme: Scheme, seq: Sequence[PauliOperator]) -> tuple[PauliOperator, ...]:
    """Map a parent-code generator sequence into the single-code picture."""
    red = scheme.reduced
    return tuple(red.restrict(c) for c in seq)


def spans_stabilizer_group(code: StabilizerCode, seq: Sequence[PauliOperator]) -> bool:
    """Phase-stripped ⟨seq⟩ = ⟨G⟩ with ``seq`` independent of size n-1."""
    if len(seq) != len(code.generators):
        return False
    basis = SymplecticBasis.from_ops(seq, code.n)
    if basis.rank != len(seq):
        return False
    return all(basis.contains(g) for g in code.generators)


def derive_generator_sequence(view: SchemeView) -> tuple[PauliOperator, ...]:
    """Generator sequence obtained by replaying the fallback measurements.

    Each fallback basis replaces the lowest-index remaining generator it
    anticommutes with; the others it anticommutes with are multiplied by that
    survivor first.  The survivor becomes the sequence entry for the position.
    """
    pool = [g.stripped() for g in view.code.generators]
    seq = []
    for p in range(view.n - 1):
        b = view.b(p)
        hits = [k for k, g in enumerate(pool) if not commutes(g, b)]
        if not hits:
            raise SchemeError(f"fallback basis at position {p} commutes with every remaining generator")
        s = pool[hits[0]]
        for k in hits[1:]:
            pool[k] = multiply(pool[k], s, effective=True)
        seq.append(s)
        del pool[hits[0]]
    return tuple(seq)


# logical pair search -------------------------------------------------------


def _solve_affine(rows: list[tuple[int, int]], nvars: int) -> int | None:
    """Solve ``<row, s> = rhs`` over GF(2); rows are (coefficient mask, rhs bit)."""
    pivots: dict[int, tuple[int, int]] = {}
    for coeff, rhs in rows:
        while coeff:
            top = coeff.bit_length() - 1
            if top in pivots:
                pc, pr = pivots[top]
                coeff ^= pc
                rhs ^= pr
            else:
                pivots[top] = (coeff, rhs)
                break
        else:
            if rhs:
                return None
    sol = 0
    for top in sorted(pivots):
        coeff, rhs = pivots[top]
        lower = coeff & ~(1 << top)
        val = rhs ^ (bin(lower & sol).count("1") & 1)
        if val:
            sol |= 1 << top
    return sol


def find_css_logical_pair(
    code: StabilizerCode, prior: dict[int, str], qubit: int
) -> tuple[PauliOperator, PauliOperator]:
    """X-type X̄ and Z-type Z̄ meeting only at ``qubit`` and respecting ``prior``.

    ``prior`` maps already measured qubits to their bases; X̄ may only touch
    prior X qubits and Z̄ only prior Z qubits.  Elsewhere the supports must be
    disjoint apart from ``qubit`` itself, where both act.  Enumerates the
    smaller of the two candidate spaces and solves the other side linearly.
    """
    n = code.n
    x_gens = [g for g in code.generators if g.z == 0]
    z_gens = [g for g in code.generators if g.x == 0]
    if len(x_gens) + len(z_gens) != len(code.generators):
        raise SchemeError(f"{code.label} is not in CSS form")
    lx, lz = code.logical_x, code.logical_z
    if lx.z or lz.x:
        raise SchemeError("CSS search needs X-type and Z-type logical representatives")
    bit = 1 << qubit
    forbid_x = sum(1 << q for q, b in prior.items() if b != "X")
    forbid_z = sum(1 << q for q, b in prior.items() if b != "Z")

    def candidates(base: int, gens: list[int], forbid: int) -> list[int]:
        rows = [(sum(((g >> q) & 1) << k for k, g in enumerate(gens)), (base >> q) & 1) for q in range(n) if (forbid >> q) & 1]
        rows.append((sum(((g >> qubit) & 1) << k for k, g in enumerate(gens)), ((base >> qubit) & 1) ^ 1))
        # affine solution space: particular solution plus kernel
        part = _solve_affine(rows, len(gens))
        if part is None:
            return []
        kernel = _kernel([c for c, _ in rows], len(gens))
        out = []
        for coeffs in itertools.product((0, 1), repeat=len(kernel)):
            s = part
            for c, k in zip(coeffs, kernel):
                if c:
                    s ^= k
            v = base
            for k, g in enumerate(gens):
                if (s >> k) & 1:
                    v ^= g
            out.append(v)
        return out

    xg = [g.x for g in x_gens]
    zg = [g.z for g in z_gens]
    x_kernel_dim = len(_kernel_rows(xg, forbid_x | bit, n))
    z_kernel_dim = len(_kernel_rows(zg, forbid_z | bit, n))
    if min(x_kernel_dim, z_kernel_dim) > 20:
        raise SchemeError("logical pair search space too large")
    enumerate_x = x_kernel_dim <= z_kernel_dim
    first_base, first_gens, first_forbid = (lx.x, xg, forbid_x) if enumerate_x else (lz.z, zg, forbid_z)
    other_base, other_gens, other_forbid = (lz.z, zg, forbid_z) if enumerate_x else (lx.x, xg, forbid_x)
    first_all = candidates(first_base, first_gens, first_forbid)
    first_all.sort(key=lambda v: bin(v).count("1"))
    for v in first_all:
        block = (v & ~bit) | other_forbid
        rows = [(sum(((g >> q) & 1) << k for k, g in enumerate(other_gens)), (other_base >> q) & 1) for q in range(n) if (block >> q) & 1]
        rows.append((sum(((g >> qubit) & 1) << k for k, g in enumerate(other_gens)), ((other_base >> qubit) & 1) ^ 1))
        s = _solve_affine(rows, len(other_gens))
        if s is None:
            continue
        w = other_base
        for k, g in enumerate(other_gens):
            if (s >> k) & 1:
                w ^= g
        xv, zv = (v, w) if enumerate_x else (w, v)
        return PauliOperator(n, xv, 0), PauliOperator(n, 0, zv)
    raise SchemeError(f"no CSS logical pair meets only at qubit {qubit}")


def _kernel_rows(gens: list[int], sites: int, n: int) -> list[int]:
    rows = [sum(((g >> q) & 1) << k for k, g in enumerate(gens)) for q in range(n) if (sites >> q) & 1]
    return _kernel(rows, len(gens))


def _kernel(rows: list[int], nvars: int) -> list[int]:
    """Basis of {s : <row, s> = 0 for all rows}."""
    pivots: dict[int, int] = {}
    for r in rows:
        for top, pr in sorted(pivots.items(), reverse=True):
            if (r >> top) & 1:
                r ^= pr
        if r:
            top = r.bit_length() - 1
            for t, pr in list(pivots.items()):
                if (pr >> top) & 1:
                    pivots[t] = pr ^ r
            pivots[top] = r
    free = [v for v in range(nvars) if v not in pivots]
    basis = []
    for f in free:
        s = 1 << f
        for top, pr in pivots.items():
            if (pr >> f) & 1:
                s |= 1 << top
        basis.append(s)
    return basis


# builders --------------------------------------------------------------------


def _single(code: StabilizerCode, q: int, letter: str) -> PauliOperator:
    return PauliOperator.single(code.n, q, letter)


def _sites(code: StabilizerCode, coords, letter: str) -> PauliOperator:
    idx = code.layout["index"]
    return PauliOperator.from_sites(code.n, {idx[c]: letter for c in coords if c in idx})


def _qpc_optimal(r: int, m: int) -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = build_code("qpc", (r, m))
    idx = code.layout["index"]
    order, bases, seq, logicals = [], [], [], []
    for i in range(1, r + 1):
        for j in range(1, m + 1):
            order.append(idx[i, j])
            row = [(i, t) for t in range(1, m + 1)]
            last_col = {(t, m) for t in range(1, r + 1)}
            z_sites = last_col ^ {(i, j)} ^ {(i, m)}
            logicals.append((_sites(code, row, "X"), _sites(code, z_sites, "Z")))
            if j < m:
                bases.append("X")
                seq.append(_sites(code, [(i, j), (i, j + 1)], "Z"))
            elif i < r:
                bases.append("Z")
                seq.append(_sites(code, row + [(i + 1, t) for t in range(1, m + 1)], "X"))
            else:
                bases.append("Z")
    scheme = Scheme(code, tuple(order), "".join(bases), tuple(logicals), name=f"optimal-{code.label}")
    return scheme, tuple(seq)


FIVE_QUBIT_SEQUENCE = ("XXYIY", "YXXYI", "IYXXY", "YIYXX")
FIVE_QUBIT_LOGICALS = (
    ("XIYYI", "ZYIIY"),
    ("IXIYY", "YZYII"),
    ("YIXIY", "IYZYI"),
    ("YYIXI", "IIYZY"),
    ("IYYIX", "YIIYZ"),
)


def _five_qubit_optimal() -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = build_code("five-qubit")
    logicals = tuple((PauliOperator.from_str(x), PauliOperator.from_str(z)) for x, z in FIVE_QUBIT_LOGICALS)
    scheme = Scheme(code, tuple(range(5)), "YYYYY", logicals, name="optimal-five-qubit")
    return scheme, tuple(PauliOperator.from_str(s) for s in FIVE_QUBIT_SEQUENCE)


STEANE_SEQUENCE = ("ZZZZIII", "IXIXXXI", "IIXXIXX", "XIIXXIX", "IZIZZZI", "IIZZIZZ")
STEANE_BASES = "XZZZXXZ"  # final entry advisory
STEANE_LOGICALS = (
    ("XXIIXII", "ZIZIIIZ"),
    ("XXIIXII", "IZIZIIZ"),
    ("XIXIIIX", "IIZZZII"),
    ("XIIXIXI", "IZIZIIZ"),
    ("IIIIXXX", "IIZZZII"),
    ("IIIIXXX", "IZZIIZI"),
    ("IIIIXXX", "IZIZIIZ"),
)


def _steane_optimal() -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = build_code("steane")
    logicals = tuple((PauliOperator.from_str(x), PauliOperator.from_str(z)) for x, z in STEANE_LOGICALS)
    scheme = Scheme(code, tuple(range(7)), STEANE_BASES, logicals, name="optimal-steane")
    return scheme, tuple(PauliOperator.from_str(s) for s in STEANE_SEQUENCE)


def _standard_logicals(code: StabilizerCode, l: int, c: int) -> tuple[PauliOperator, PauliOperator]:
    r, m = code.layout["shape"]
    L, Cc = 2 * r - 1, 2 * m - 1
    if l % 2:
        xs = [(2 * t - 1, Cc) for t in range(1, (l - 1) // 2 + 1)]
        xs += [(l - 1, c + 2 * t - 1) for t in range(1, (Cc - c) // 2 + 1)]
        xs += [(l + 2 * t, c) for t in range(0, (L - l) // 2 + 1)]
        zs = [(l, 2 * t + 1) for t in range(0, m + 1)]
    else:
        # the column part runs down to layer l-1 so the string stays closed
        xs = [(2 * t - 1, Cc) for t in range(1, l // 2 + 1)]
        xs += [(l, c + 2 * t) for t in range(0, (2 * m - c) // 2)]
        xs += [(l + 2 * t + 1, c - 1) for t in range(0, (2 * r - l) // 2)]
        zs = [(l - 1, 2 * t + 1) for t in range(0, c // 2)] + [(l, c)]
        zs += [(l + 1, c + 2 * t + 1) for t in range(0, (2 * m - c) // 2)]
    return _sites(code, xs, "X"), _sites(code, zs, "Z")


def _standard_optimal(r: int, m: int) -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = standard_surface(r, m)
    idx = code.layout["index"]
    faces = code.layout["face_ops"]
    vertices = code.layout["vertex_ops"]
    Cc = 2 * m - 1
    order, bases, seq, logicals = [], [], [], []
    coords = code.layout["coords"]
    for k, (l, c) in enumerate(coords):
        order.append(idx[l, c])
        logicals.append(_standard_logicals(code, l, c))
        if k == len(coords) - 1:
            bases.append("Z")
        elif l % 2 and c < Cc:
            bases.append("Z")
            seq.append(vertices[l, c + 1])
        elif l % 2:
            bases.append("X")
            seq.append(faces[l + 1, Cc])
        else:
            bases.append("X")
            # cumulative face product keeps earlier X fallbacks in this layer commuting
            seq.append(product((faces[l, t] for t in range(1, c, 2)), code.n))
    scheme = Scheme(code, tuple(order), "".join(bases), tuple(logicals), name=f"optimal-{code.label}")
    return scheme, tuple(seq)


def rotated_order(r: int, m: int) -> tuple[list[tuple[int, int]], str]:
    """Two-front diagonal order and fallback bases for the rotated code.

    Diagonals are indexed by k = i + j.  The top-left front takes k = 2, 3, ...
    and the bottom-right front k = r+m, r+m-1, ..., alternating one diagonal at
    a time, and the middle diagonal goes last, top to bottom.  Odd diagonals
    use X and even ones Z.  On X diagonals that reach the far boundary the
    vertex on that boundary is deferred to the end of its diagonal and falls
    back to Z.
    """
    if r > m:
        raise SchemeError("rotated order assumes r <= m; transpose the lattice")
    k_mid = (r + m + 2) // 2 if (r + m) % 2 == 0 else (r + m + 1) // 2

    def diag(k: int) -> list[tuple[int, int]]:
        return [(i, k - i) for i in range(max(1, k - m), min(r, k - 1) + 1)]

    def top_left(k: int, middle: bool = False) -> list[tuple[tuple[int, int], str]]:
        cells = diag(k)
        if k % 2 == 1 or middle:
            letter = "X" if k % 2 == 1 else "Z"
            out = [(v, letter) for v in cells]  # downward
            if k % 2 == 1 and k >= r + 1:
                out[-1] = (out[-1][0], "Z")
            return out
        return [(v, "Z") for v in reversed(cells)]  # upward

    def bottom_right(k: int) -> list[tuple[tuple[int, int], str]]:
        cells = diag(k)
        if k % 2 == 1:
            out = [(v, "X") for v in reversed(cells)]  # upward
            if k <= m + 1:
                out[-1] = (out[-1][0], "Z")
            return out
        return [(v, "Z") for v in cells]  # downward

    tl = list(range(2, k_mid))
    br = list(range(r + m, k_mid, -1))
    steps: list[tuple[tuple[int, int], str]] = []
    for a, b in itertools.zip_longest(tl, br):
        if a is not None:
            steps += top_left(a)
        if b is not None:
            steps += bottom_right(b)
    steps += top_left(k_mid, middle=True)
    return [v for v, _ in steps], "".join(letter for _, letter in steps)


def _rotated_optimal(r: int, m: int) -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = rotated_surface(r, m)
    idx = code.layout["index"]
    cells, bases = rotated_order(r, m)
    order = tuple(idx[v] for v in cells)
    bases = bases[:-1] + "Z"
    logicals = []
    for p, q in enumerate(order):
        prior = {order[t]: bases[t] for t in range(p)}
        logicals.append(find_css_logical_pair(code, prior, q))
    scheme = Scheme(code, order, bases, tuple(logicals), name=f"optimal-{code.label}")
    return scheme, derive_generator_sequence(scheme.single_code())


def _tree_optimal(branching: Sequence[int]) -> tuple[Scheme, tuple[PauliOperator, ...]]:
    code = build_code("tree", branching)
    depth = code.layout["depth"]
    stabs = code.layout["graph_stabilizers"]
    n = code.n
    order = sorted(range(1, n), key=lambda v: (-depth[v], v))
    level1 = [v for v in range(1, n) if depth[v] == 1]
    last = level1[-1]
    root_z = PauliOperator.single(n, 0, "Z")
    seq, logicals = [], []
    for v in order:
        path = [ancestor(code, v, d) for d in range(1, depth[v] + 1)]
        x_bar = product([root_z] + [stabs[a] for a in path if depth[a] % 2 == 1], n).stripped()
        z_bar = product([stabs[0]] + [stabs[a] for a in path if depth[a] % 2 == 0], n).stripped()
        logicals.append((x_bar, z_bar))
        if v == last:
            continue
        seq.append(stabs[v] if depth[v] >= 2 else multiply(stabs[v], stabs[last], effective=True))
    scheme = Scheme(
        code, tuple(order), "Z" * len(order), tuple(logicals), pre_steps=((0, "X"),), name=f"optimal-{code.label}"
    )
    return scheme, tuple(seq)


def build_optimal(family: str, params: Sequence[int] = ()) -> tuple[Scheme, tuple[PauliOperator, ...]]:
    """Optimal feedforward scheme and its generator sequence (parent-code operators)."""
    family = family.lower()
    try:
        if family == "qpc":
            return _qpc_optimal(*params)
        if family in ("five-qubit", "five_qubit", "five"):
            return _five_qubit_optimal()
        if family == "steane":
            return _steane_optimal()
        if family in ("standard", "standard-surface"):
            return _standard_optimal(*params)
        if family in ("rotated", "rotated-surface"):
            return _rotated_optimal(*params)
        if family == "tree":
            return _tree_optimal(params)
    except TypeError as exc:
        raise SchemeError(f"bad parameters {tuple(params)} for {family}") from exc
    raise SchemeError(f"no optimal scheme for family {family!r}")


# static baselines -----------------------------------------------------------


def wz_weight(r: int, m: int) -> int:
    """Qubit count of the optimized static Z̄ wave on an r×m rotated lattice."""
    if r < 2 or m < 2:
        raise ValueError("wz_weight needs r, m >= 2")
    if r % 2:
        return 1 + (m + 2) // 4 + (r - 2) * ((m + 1) // 4) + m // 4 + r * ((m - 1) // 4)
    return 1 + (m + 2) // 4 + (r - 1) * ((m + 1) // 4) + m // 4 + (r - 1) * ((m - 1) // 4)


def wave_string(r: int, m: int) -> list[tuple[int, int]]:
    """Vertices of the Z̄ wave running along the rows, with period four columns.

    Column j carries one vertex, an interior run, one vertex, or a long run
    according to j mod 4.  Runs enter through an X face diagonally or along
    an X boundary edge.  In the last column only the entry vertex is kept, so
    the string meets the right boundary once.
    """
    odd = r % 2 == 1
    path: list[tuple[int, int]] = [(r, 1) if odd else (1, 1)]
    for j in range(2, m + 1):
        phase = j % 4
        if odd:
            rows = {2: range(r - 1, 1, -1), 3: [1], 0: range(1, r + 1), 1: [r]}[phase]
        else:
            rows = {2: range(1, r), 3: [r], 0: range(r, 1, -1), 1: [1]}[phase]
        rows = list(rows)
        path += [(i, j) for i in (rows[:1] if j == m else rows)]
    return path


def standard_string(r: int, m: int) -> tuple[list[tuple[int, int]], str]:
    """Zigzag logical string on the standard lattice across its longer side.

    Odd layers alternate between the last and third-to-last column, even
    layers sit in between, giving an X string of weight 2r-1.  For r < m the
    same zigzag runs along the top three layers as a Z string of weight 2m-1.
    Returns the coordinates and the string type.
    """
    L, Cc = 2 * r - 1, 2 * m - 1
    if r >= m:
        cells = [(l, Cc - 1 if l % 2 == 0 else Cc - 2 * (((l - 1) // 2) % 2)) for l in range(1, L + 1)]
        return cells, "X"
    cells = [(2 if c % 2 == 0 else 1 + 2 * (((c - 1) // 2) % 2), c) for c in range(1, Cc + 1)]
    return cells, "Z"


def build_static(kind: str, code: StabilizerCode | None = None, params: Sequence[int] = ()) -> StaticScheme:
    """Static baselines: ``simple`` (all Z), ``optimized`` (rotated wave),
    ``tree`` (all Z after the root) and ``string`` (standard surface)."""
    kind = kind.lower()
    if kind in ("simple", "static-simple"):
        code = code or rotated_surface(*params)
        return StaticScheme(code, tuple(range(code.n)), "Z" * code.n, name=f"static-simple-{code.label}")
    if kind in ("optimized", "static-optimized"):
        code = code or rotated_surface(*params)
        if code.family != "rotated":
            raise SchemeError("optimized static scheme is defined for the rotated code")
        r, m = code.layout["shape"]
        idx = code.layout["index"]
        on = {idx[v] for v in wave_string(r, m)}
        bases = "".join("Z" if q in on else "X" for q in range(code.n))
        return StaticScheme(code, tuple(range(code.n)), bases, name=f"static-optimized-{code.label}", marked=frozenset(on))
    if kind in ("tree", "static-tree"):
        code = code or build_code("tree", params)
        order = tuple(range(1, code.n))
        return StaticScheme(code, order, "Z" * len(order), ((0, "X"),), name=f"static-{code.label}")
    if kind in ("string", "static-string"):
        code = code or standard_surface(*params)
        if code.family != "standard":
            raise SchemeError("string baseline is defined for the standard surface code")
        r, m = code.layout["shape"]
        cells, letter = standard_string(r, m)
        idx = code.layout["index"]
        on = {idx[v] for v in cells}
        other = "Z" if letter == "X" else "X"
        bases = "".join(letter if q in on else other for q in range(code.n))
        return StaticScheme(code, tuple(range(code.n)), bases, name=f"static-string-{code.label}", marked=frozenset(on))
    raise SchemeError(f"unknown static scheme kind {kind!r}")


# two-code form ------------------------------------------------------------------


@dataclass(frozen=True)
class DoubledScheme:
    """Transversal scheme on two copies of a code; operators act on 2n qubits."""

    code: StabilizerCode
    order: tuple[int, ...]
    bases: tuple[str, ...]  # e.g. "XX"
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...]
    pre_steps: tuple[tuple[int, str], ...] = ()
    name: str = ""


def lift_to_two_code(scheme: Scheme) -> DoubledScheme:
    return DoubledScheme(
        scheme.code,
        scheme.order,
        tuple(b + b for b in scheme.bases),
        tuple((x.tensor(x), z.tensor(z)) for x, z in scheme.logicals),
        scheme.pre_steps,
        scheme.name,
    )


def reduce_to_single_code(doubled: DoubledScheme) -> Scheme:
    n = doubled.code.n
    bases = []
    for pair in doubled.bases:
        if len(pair) != 2 or pair[0] != pair[1]:
            raise SchemeError(f"basis pair {pair!r} is not transversal")
        bases.append(pair[0])
    logicals = []
    for x, z in doubled.logicals:
        halves = []
        for op in (x, z):
            if op.n != 2 * n or op.block(0, n) != op.block(n, 2 * n):
                raise SchemeError(f"{op} is not transversal")
            halves.append(op.block(0, n))
        logicals.append((halves[0], halves[1]))
    return Scheme(doubled.code, doubled.order, "".join(bases), tuple(logicals), doubled.pre_steps, doubled.name)


# serialization ---------------------------------------------------------------------


def scheme_to_text(scheme: Scheme) -> str:
    lines = [f"code {scheme.code.family} {' '.join(map(str, scheme.code.params))}".rstrip()]
    if scheme.name:
        lines.append(f"name {scheme.name}")
    lines.append("order " + " ".join(map(str, scheme.order)))
    lines.append(f"bases {scheme.bases}")
    for q, letter in scheme.pre_steps:
        lines.append(f"pre {q} {letter}")
    for x, z in scheme.logicals:
        lines.append(f"pair {x.letters} {z.letters}")
    return "\n".join(lines) + "\n"


def scheme_from_text(text: str, code: StabilizerCode | None = None) -> Scheme:
    order: list[int] = []
    bases = ""
    pre: list[tuple[int, str]] = []
    pairs: list[tuple[PauliOperator, PauliOperator]] = []
    name = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "code":
            parts = rest.split()
            if code is None:
                code = build_code(parts[0], [int(p) for p in parts[1:]])
        elif key == "name":
            name = rest.strip()
        elif key == "order":
            order = [int(t) for t in rest.split()]
        elif key == "bases":
            bases = rest.strip().upper()
        elif key == "pre":
            q, letter = rest.split()
            pre.append((int(q), letter.upper()))
        elif key == "pair":
            x, z = rest.split()
            pairs.append((PauliOperator.from_str(x), PauliOperator.from_str(z)))
        else:
            raise SchemeError(f"unknown scheme file key {key!r}")
    if code is None:
        raise SchemeError("scheme file needs a code line")
    return Scheme(code, tuple(order), bases, tuple(pairs), tuple(pre), name)


def check_logical_classes(scheme: Scheme) -> list[int]:
    """Positions whose pair is not (LogicalX, LogicalZ) on the single-code view."""
    view = scheme.single_code()
    bad = []
    for p, (x, z) in enumerate(view.logicals):
        if coset_class(view.code, x) is not CosetClass.LOGICAL_X or coset_class(view.code, z) is not CosetClass.LOGICAL_Z:
            bad.append(p)
    return bad
