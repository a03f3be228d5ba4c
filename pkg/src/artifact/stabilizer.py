"""Stabilizer-state tracking for encoded Bell pairs under Pauli measurements.

Generator signs are kept as bitmasks over sign variables so the same engine
serves two purposes.  Bit 0 is the constant -1; ``LX`` and ``LZ`` stand for the
unknown logical Bell values; higher bits are fresh measurement outcomes.  The
sign of a generator is the product of the variables in its mask, read with
``1`` meaning ``-1``.  A concrete simulation never uses anything but bit 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codes import StabilizerCode, check_code
from .paulis import (
    PauliOperator,
    SymplecticBasis,
    commutes,
    in_span,
    multiply,
    product,
)

NEG = 1
LX = 1 << 1
LZ = 1 << 2
FIRST_VAR = 3


class Origin(enum.Enum):
    CODE = "CodeStabilizer"
    MEASURED = "Measured"
    LOGICAL_X = "LogicalX"
    LOGICAL_Z = "LogicalZ"
    LOGICAL_Y = "LogicalY"

    @property
    def is_logical(self) -> bool:
        return self in (Origin.LOGICAL_X, Origin.LOGICAL_Z, Origin.LOGICAL_Y)


class Kind(enum.Enum):
    SINGLE_QUBIT = "SingleQubit"
    TRANSVERSAL = "TransversalProduct"
    BELL_SUCCESS = "BellSuccess"


class ForbiddenMeasurement(RuntimeError):
    """The observable would erase logical Bell information."""


class OutcomeConflict(ValueError):
    """A forced outcome contradicts a determined one."""


def sign_of(mask: int) -> int:
    if mask & ~NEG:
        raise ValueError(f"sign mask {mask:#x} is symbolic")
    return -1 if mask else 1


def mask_of(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return NEG if sign == -1 else 0


def evaluate(mask: int, assignment: int) -> int:
    """Sign of ``mask`` under ``assignment`` (a bitmask of -1 variables, bit 0 set)."""
    return -1 if bin(mask & assignment).count("1") % 2 else 1


@dataclass(frozen=True)
class Generator:
    op: PauliOperator  # letters only, phase 0
    origin: Origin
    mask: int = 0

    def signed(self) -> PauliOperator:
        return self.op.with_sign(sign_of(self.mask))


@dataclass(frozen=True)
class RecordEntry:
    observable: PauliOperator
    outcome: int  # sign mask
    kind: Kind = Kind.SINGLE_QUBIT

    @property
    def sign(self) -> int:
        return sign_of(self.outcome)


@dataclass(frozen=True)
class Anticommuting:
    witness: int


@dataclass(frozen=True)
class Determined:
    mask: int
    gamma: tuple[int, ...]
    mu: tuple[int, ...]
    nu: tuple[int, ...]
    reveals: str | None  # "x", "y", "z" or None

    @property
    def sign(self) -> int:
        return sign_of(self.mask)


@dataclass(frozen=True)
class Forbidden:
    logical: tuple[int, ...]


Classification = Anticommuting | Determined | Forbidden


@dataclass
class StabilizerState:
    n: int
    generators: list[Generator]
    logical_assignment: tuple[int, int] | None = None
    record: list[RecordEntry] = field(default_factory=list)
    next_var: int = FIRST_VAR
    split: int | None = None

    def copy(self) -> "StabilizerState":
        return StabilizerState(
            self.n, list(self.generators), self.logical_assignment, list(self.record), self.next_var, self.split
        )

    @property
    def symbolic(self) -> bool:
        return self.logical_assignment is None

    def logical_count(self) -> int:
        return sum(g.origin.is_logical for g in self.generators)

    def dump(self) -> str:
        lines = []
        for g in self.generators:
            if g.mask & ~NEG:
                sign = "(" + _mask_text(g.mask) + ")"
                text = sign + g.op.format(self.split)[1:]
            else:
                text = g.signed().format(self.split)
            lines.append(f"{text}  {g.origin.value}")
        return "\n".join(lines)


def _mask_text(mask: int) -> str:
    names = []
    if mask & NEG:
        names.append("-1")
    if mask & LX:
        names.append("l_x")
    if mask & LZ:
        names.append("l_z")
    names += [f"m{k - FIRST_VAR}" for k in range(FIRST_VAR, mask.bit_length()) if (mask >> k) & 1]
    return "*".join(names)


def init_encoded_bell(
    code1: StabilizerCode, code2: StabilizerCode, l_x: int | None = None, l_z: int | None = None
) -> StabilizerState:
    """Uniform-mixture Bell state of two codes, with fixed or symbolic logical values.

    Passing ``None`` for both logical values gives a symbolic state whose
    logical generators carry the ``LX``/``LZ`` variables.
    """
    for code in (code1, code2):
        problems = check_code(code)
        if problems:
            raise ValueError(f"{code.label}: " + "; ".join(problems))
    if (l_x is None) != (l_z is None):
        raise ValueError("give both logical values or neither")
    n1, n2 = code1.n, code2.n
    id1, id2 = PauliOperator.identity(n1), PauliOperator.identity(n2)
    gens = [Generator(g.stripped().tensor(id2), Origin.CODE, mask_of(g.sign)) for g in code1.generators]
    gens += [Generator(id1.tensor(g.stripped()), Origin.CODE, mask_of(g.sign)) for g in code2.generators]
    xx = code1.logical_x.tensor(code2.logical_x)
    zz = code1.logical_z.tensor(code2.logical_z)
    if l_x is None:
        mx, mz, assignment = LX, LZ, None
    else:
        mx, mz, assignment = mask_of(l_x), mask_of(l_z), (l_x, l_z)
    gens.append(Generator(xx.stripped(), Origin.LOGICAL_X, mx ^ mask_of(xx.sign)))
    gens.append(Generator(zz.stripped(), Origin.LOGICAL_Z, mz ^ mask_of(zz.sign)))
    return StabilizerState(n1 + n2, gens, assignment, split=n1)


def _decompose(state: StabilizerState, obs: PauliOperator) -> tuple[int, list[int]]:
    """Sign mask and generator indices with ``obs = ±∏ gens``; obs must be in the group."""
    basis = SymplecticBasis.from_ops((g.op for g in state.generators), state.n)
    idx = in_span(obs, basis)
    if idx is None:
        raise ValueError(f"{obs} is not in the stabilizer group")
    prod = product((state.generators[i].op for i in idx), state.n)
    diff = (obs.phase_exp - prod.phase_exp) % 4
    if diff % 2:
        raise ValueError("imaginary phase in a Hermitian decomposition")
    mask = NEG if diff == 2 else 0
    for i in idx:
        mask ^= state.generators[i].mask
    return mask, idx


def classify(state: StabilizerState, obs: PauliOperator) -> Classification:
    if not obs.is_hermitian:
        raise ValueError(f"{obs} is not Hermitian")
    if obs.n != state.n:
        raise ValueError(f"observable on {obs.n} qubits, state has {state.n}")
    hits = [k for k, g in enumerate(state.generators) if not commutes(g.op, obs)]
    plain = [k for k in hits if not state.generators[k].origin.is_logical]
    if plain:
        return Anticommuting(plain[0])
    if hits:
        return Forbidden(tuple(hits))
    mask, idx = _decompose(state, obs)
    gamma = tuple(i for i in idx if state.generators[i].origin is Origin.CODE)
    mu = tuple(i for i in idx if state.generators[i].origin is Origin.MEASURED)
    nu = tuple(i for i in idx if state.generators[i].origin.is_logical)
    reveals = None
    if nu:
        kinds = {state.generators[i].origin for i in nu}
        if kinds == {Origin.LOGICAL_X}:
            reveals = "x"
        elif kinds == {Origin.LOGICAL_Z}:
            reveals = "z"
        else:
            reveals = "y"
    return Determined(mask, gamma, mu, nu, reveals)


def _apply(state: StabilizerState, obs: PauliOperator, survivor: int, outcome: int) -> StabilizerState:
    new = state.copy()
    s = state.generators[survivor]
    for k, g in enumerate(state.generators):
        if k != survivor and not commutes(g.op, obs):
            prod = multiply(g.op, s.op)
            new.generators[k] = Generator(prod.stripped(), g.origin, g.mask ^ s.mask ^ (NEG if prod.phase_exp == 2 else 0))
    new.generators[survivor] = Generator(obs.stripped(), Origin.MEASURED, outcome)
    return new


def measure_mask(
    state: StabilizerState,
    obs: PauliOperator,
    forced: int | None = None,
    rng: np.random.Generator | None = None,
    override: bool = False,
    kind: Kind = Kind.SINGLE_QUBIT,
) -> tuple[int, StabilizerState, Classification]:
    """Measure ``obs``; the outcome is returned as a sign mask.

    Random outcomes come from ``forced`` (a sign mask), else ``rng`` in a
    concrete state, else a fresh variable in a symbolic state.
    """
    obs_mask = NEG if obs.phase_exp == 2 else 0
    obs = obs.stripped()
    cls = classify(state, obs)
    if isinstance(cls, Determined):
        outcome = cls.mask ^ obs_mask
        if forced is not None and forced != outcome:
            raise OutcomeConflict(f"forced outcome on {obs} contradicts the determined value")
        new = state.copy()
        new.record.append(RecordEntry(obs.negate() if obs_mask else obs, outcome, kind))
        return outcome, new, cls
    if isinstance(cls, Forbidden):
        if not override:
            raise ForbiddenMeasurement(f"{obs} commutes with the non-logical generators but not the logical ones")
        survivor = cls.logical[0]
    else:
        survivor = cls.witness
    if forced is not None:
        raw = forced ^ obs_mask
        var_used = False
    elif not state.symbolic:
        gen = rng if rng is not None else np.random.default_rng()
        raw = NEG if gen.integers(2) else 0
        var_used = False
    else:
        raw = 1 << state.next_var
        var_used = True
    # raw is the outcome of the letters-only observable
    new = _apply(state, obs, survivor, raw)
    if var_used:
        new.next_var += 1
    new.record.append(RecordEntry(obs.negate() if obs_mask else obs, raw ^ obs_mask, kind))
    return raw ^ obs_mask, new, cls


def measure(
    state: StabilizerState,
    obs: PauliOperator,
    forced: int | None = None,
    rng: np.random.Generator | None = None,
    override: bool = False,
) -> tuple[int, StabilizerState]:
    """Concrete measurement: returns the ±1 outcome and the updated state."""
    if state.symbolic:
        raise ValueError("use measure_mask on a symbolic state")
    fm = None if forced is None else mask_of(forced)
    outcome, new, _ = measure_mask(state, obs, fm, rng, override)
    return sign_of(outcome), new


@dataclass(frozen=True)
class LogicalInfo:
    """Sign masks of the inferred logical Bell values, None where unknown."""

    x: int | None
    y: int | None
    z: int | None

    def known(self) -> set[str]:
        return {k for k in "xyz" if getattr(self, k) is not None}

    def values(self) -> dict[str, int | None]:
        return {k: (None if getattr(self, k) is None else sign_of(getattr(self, k))) for k in "xyz"}


def logical_targets(code1: StabilizerCode, code2: StabilizerCode) -> dict[str, PauliOperator]:
    """Transversal logical products whose eigenvalues are l_x, l_y, l_z.

    The y target is signed so that its eigenvalue equals ``-l_x*l_z``; with
    that convention ``l_y`` is read directly as its eigenvalue.
    """
    xx = code1.logical_x.tensor(code2.logical_x)
    zz = code1.logical_z.tensor(code2.logical_z)
    y1 = multiply(code1.logical_x, code1.logical_z)
    y1 = PauliOperator(y1.n, y1.x, y1.z, y1.phase_exp + 1)
    y2 = multiply(code2.logical_x, code2.logical_z)
    y2 = PauliOperator(y2.n, y2.x, y2.z, y2.phase_exp + 1)
    return {"x": xx, "y": y1.tensor(y2), "z": zz}


def infer_logicals(
    record: Sequence[RecordEntry], code1: StabilizerCode, code2: StabilizerCode
) -> LogicalInfo:
    """Information-view inference from recorded outcomes and the code stabilizers.

    A class is known iff its transversal representative lies, phase-stripped,
    in the span of recorded observables and both codes' generators.  The sign
    comes from exact multiplication of the selected factors.
    """
    n1, n2 = code1.n, code2.n
    id1, id2 = PauliOperator.identity(n1), PauliOperator.identity(n2)
    items: list[tuple[PauliOperator, int]] = [(e.observable, e.outcome) for e in record]
    items += [(g.tensor(id2), 0) for g in code1.generators]
    items += [(id1.tensor(g), 0) for g in code2.generators]
    basis = SymplecticBasis.from_ops((op for op, _ in items), n1 + n2)
    found: dict[str, int | None] = {}
    for key, target in logical_targets(code1, code2).items():
        idx = in_span(target, basis)
        if idx is None:
            found[key] = None
            continue
        prod = product((items[i][0] for i in idx), n1 + n2)
        diff = (target.phase_exp - prod.phase_exp) % 4
        mask = NEG if diff == 2 else 0
        for i in idx:
            mask ^= items[i][1]
        found[key] = mask
    return LogicalInfo(found["x"], found["y"], found["z"])
