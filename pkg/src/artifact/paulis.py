"""Pauli operators in symplectic bit form, plus GF(2) span queries.

A Pauli on ``n`` qubits is stored as two Python ints used as bitsets (bit ``j``
is qubit ``j``), and an exponent of ``i`` taken mod 4.  Site letters follow the
usual convention ``X=(1,0)``, ``Z=(0,1)``, ``Y=(1,1)`` where ``Y`` is the actual
Pauli-Y matrix, so the operator is ``i**phase_exp`` times the letter string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

LETTERS = "IXZY"  # indexed by x + 2*z

_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


class DimensionError(ValueError):
    """Operators or vectors of different lengths were combined."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, slots=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError("a Pauli needs at least one qubit")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise DimensionError(f"bits set beyond qubit {self.n - 1}")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # construction -------------------------------------------------------

    @classmethod
    def from_str(cls, text: str) -> "PauliOperator":
        """Parse literals such as ``"XXII IIXX"``, ``"-ZZ"`` or ``"+iXY"``."""
        s = "".join(text.split())
        phase = 0
        if s[:1] in "+-":
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
        if s[:1] == "i":
            phase += 1
            s = s[1:]
        if not s:
            raise ValueError(f"empty Pauli literal {text!r}")
        x = z = 0
        for j, ch in enumerate(s.upper()):
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
        return cls(len(s), x, z, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """Letter ``letter`` on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} outside 0..{n - 1}")
        bit = 1 << qubit
        letter = letter.upper()
        if letter not in "IXYZ":
            raise ValueError(f"bad Pauli letter {letter!r}")
        return cls(n, bit if letter in "XY" else 0, bit if letter in "ZY" else 0)

    @classmethod
    def from_sites(cls, n: int, sites: dict[int, str], phase_exp: int = 0) -> "PauliOperator":
        x = z = 0
        for q, letter in sites.items():
            p = cls.single(n, q, letter)
            x |= p.x
            z |= p.z
        return cls(n, x, z, phase_exp)

    # views --------------------------------------------------------------

    def letter(self, j: int) -> str:
        return LETTERS[((self.x >> j) & 1) + 2 * ((self.z >> j) & 1)]

    @property
    def letters(self) -> str:
        return "".join(self.letter(j) for j in range(self.n))

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    @property
    def vector(self) -> int:
        """Symplectic vector packed as ``x | z << n``."""
        return self.x | (self.z << self.n)

    def stripped(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def with_sign(self, sign: int) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0 if sign > 0 else 2)

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase_exp + 2)

    def tensor(self, other: "PauliOperator") -> "PauliOperator":
        return PauliOperator(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase_exp + other.phase_exp,
        )

    def block(self, start: int, stop: int) -> "PauliOperator":
        """Restriction to qubits ``start..stop-1`` (phase dropped)."""
        mask = (1 << (stop - start)) - 1
        return PauliOperator(stop - start, (self.x >> start) & mask, (self.z >> start) & mask)

    def format(self, split: int | None = None) -> str:
        body = self.letters
        if split is not None and 0 < split < self.n:
            body = body[:split] + " " + body[split:]
        return _PHASE_PREFIX[self.phase_exp] + body

    def __str__(self) -> str:
        return self.format()

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"length mismatch: {a.n} vs {b.n}")


def product_phase(ax: int, az: int, bx: int, bz: int) -> int:
    """Exponent of ``i`` picked up by multiplying the letter strings a·b."""
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    return (_popcount(plus) - _popcount(minus)) % 4


def multiply(a: PauliOperator, b: PauliOperator, effective: bool = False) -> PauliOperator:
    """Group product ``a·b``; with ``effective`` the phase is discarded."""
    _check_dims(a, b)
    if effective:
        return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, 0)
    phase = a.phase_exp + b.phase_exp + product_phase(a.x, a.z, b.x, b.z)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def product(ops: Iterable[PauliOperator], n: int | None = None) -> PauliOperator:
    """Ordered product of ``ops``; ``n`` is required when ``ops`` may be empty."""
    acc: PauliOperator | None = None if n is None else PauliOperator.identity(n)
    for op in ops:
        acc = op if acc is None else multiply(acc, op)
    if acc is None:
        raise ValueError("empty product needs an explicit qubit count")
    return acc


def anticommuting_mask(a: PauliOperator, b: PauliOperator) -> int:
    _check_dims(a, b)
    return (a.x & b.z) ^ (a.z & b.x)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return _popcount(anticommuting_mask(a, b)) % 2 == 0


def anticommute_positions(a: PauliOperator, b: PauliOperator) -> set[int]:
    """Sites whose single-qubit letters anticommute (0-based)."""
    m = anticommuting_mask(a, b)
    return {j for j in range(a.n) if (m >> j) & 1}


def anticommute_count_by_block(a: PauliOperator, b: PauliOperator, split: int) -> tuple[int, int]:
    if not 1 <= split < a.n:
        raise ValueError(f"split {split} outside 1..{a.n - 1}")
    m = anticommuting_mask(a, b)
    left = m & ((1 << split) - 1)
    return _popcount(left), _popcount(m >> split)


def sym_vector(x: int, z: int, n: int) -> int:
    return x | (z << n)


def symplectic_product(u: int, v: int, n: int) -> int:
    """Symplectic form of two packed vectors, 0 or 1."""
    mask = (1 << n) - 1
    return _popcount(((u & mask) & (v >> n)) ^ ((u >> n) & (v & mask))) & 1


@dataclass
class SymplecticBasis:
    """Row-echelon GF(2) basis over packed symplectic vectors.

    Each row remembers which inserted vectors it is a sum of (``combo`` bitmask
    over insertion order), so span queries can return the factors that
    multiply to a given operator.
    """

    n: int
    rows: dict[int, tuple[int, int]] = field(default_factory=dict)  # pivot -> (row, combo)
    count: int = 0

    @classmethod
    def from_ops(cls, ops: Iterable[PauliOperator], n: int) -> "SymplecticBasis":
        basis = cls(n)
        for op in ops:
            basis.add(op)
        return basis

    def copy(self) -> "SymplecticBasis":
        return SymplecticBasis(self.n, dict(self.rows), self.count)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, vec: int) -> tuple[int, int]:
        """Return ``(residue, combo)``; residue 0 means ``vec`` is in the span."""
        combo = 0
        rows = self.rows
        while vec:
            top = vec.bit_length() - 1
            hit = rows.get(top)
            if hit is None:
                return vec, combo
            vec ^= hit[0]
            combo ^= hit[1]
        return 0, combo

    def add_vector(self, vec: int) -> bool:
        """Insert a packed vector; returns False if it was already in the span.

        The insertion index advances either way so combos stay aligned with
        the caller's list of inserted items.
        """
        residue, combo = self.reduce(vec)
        idx = self.count
        self.count += 1
        if residue == 0:
            return False
        self.rows[residue.bit_length() - 1] = (residue, combo ^ (1 << idx))
        return True

    def add(self, op: PauliOperator) -> bool:
        if op.n != self.n:
            raise DimensionError(f"length mismatch: {op.n} vs {self.n}")
        return self.add_vector(op.vector)

    def contains(self, op: PauliOperator) -> bool:
        return self.reduce(op.vector)[0] == 0


def in_span(op: PauliOperator, basis: SymplecticBasis) -> list[int] | None:
    """Indices of inserted vectors whose product equals ``op`` up to phase."""
    if op.n != basis.n:
        raise DimensionError(f"length mismatch: {op.n} vs {basis.n}")
    residue, combo = basis.reduce(op.vector)
    if residue:
        return None
    return [i for i in range(combo.bit_length()) if (combo >> i) & 1]


def extend(basis: SymplecticBasis, op: PauliOperator) -> SymplecticBasis | None:
    """Copy of ``basis`` with ``op`` added, or None if ``op`` is dependent."""
    new = basis.copy()
    return new if new.add(op) else None


def gf2_rank(ops: Sequence[PauliOperator]) -> int:
    if not ops:
        return 0
    return SymplecticBasis.from_ops(ops, ops[0].n).rank


def relative_sign(target: PauliOperator, got: PauliOperator) -> int:
    """The ``c`` in ``target = c·got`` for equal letter strings; must be ±1."""
    if (target.x, target.z) != (got.x, got.z):
        raise ValueError(f"{target} and {got} differ beyond phase")
    d = (target.phase_exp - got.phase_exp) % 4
    if d % 2:
        raise ValueError(f"{target} and {got} differ by an imaginary phase")
    return 1 if d == 0 else -1


P = PauliOperator.from_str
