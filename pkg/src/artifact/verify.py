"""Sufficient optimality conditions, the success bound, and two necessary-looking rules.

Everything here works in the single-code picture: a partial Bell measurement
on pair j acts as the fallback single-qubit measurement b_j on one code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .codes import CosetClass, coset_class
from .paulis import (
    PauliOperator,
    SymplecticBasis,
    anticommute_positions,
    commutes,
    multiply,
)
from .schemes import Scheme, SchemeView, reduce_sequence, spans_stabilizer_group
from .stabilizer import Anticommuting, classify, init_encoded_bell, measure_mask

CONDITIONS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class Witness:
    j: int
    k: int | None
    operators: tuple[PauliOperator, ...]
    detail: str

    def as_dict(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "operators": [str(o) for o in self.operators],
            "detail": self.detail,
        }


@dataclass
class ConditionReport:
    passed: dict[int, bool] = field(default_factory=dict)
    witnesses: dict[int, Witness] = field(default_factory=dict)
    generating: bool = True
    logical_classes: bool = True

    @property
    def ok(self) -> bool:
        return self.generating and self.logical_classes and all(self.passed.get(c, False) for c in CONDITIONS)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "generating": self.generating,
            "logical_classes": self.logical_classes,
            "conditions": {
                str(c): {
                    "passed": self.passed[c],
                    "witness": self.witnesses[c].as_dict() if c in self.witnesses else None,
                }
                for c in CONDITIONS
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"generator sequence spans the stabilizer group: {'yes' if self.generating else 'NO'}"]
        lines.append(f"logical pairs in the right classes: {'yes' if self.logical_classes else 'NO'}")
        for c in CONDITIONS:
            status = "pass" if self.passed[c] else "FAIL"
            line = f"condition {c}: {status}"
            w = self.witnesses.get(c)
            if w is not None:
                ops = ", ".join(str(o) for o in w.operators)
                where = f"j={w.j + 1}" + (f", k={w.k + 1}" if w.k is not None else "")
                line += f"  [{where}; {ops}; {w.detail}]"
            lines.append(line)
        return "\n".join(lines)


def _other_letters(letter: str) -> str:
    return "".join(b for b in "XYZ" if b != letter)


def check_view(view: SchemeView, seq: Sequence[PauliOperator]) -> ConditionReport:
    """Check all five conditions on a single-code scheme and generator sequence.

    Fallback bases index positions 1..n-1 (the last entry is ignored); logical
    pairs index 1..n.  Each failing condition records its first witness.
    """
    n = view.n
    code = view.code
    if len(seq) != n - 1:
        raise ValueError(f"generator sequence has {len(seq)} entries, expected {n - 1}")
    report = ConditionReport()
    report.generating = spans_stabilizer_group(code, seq)
    for x, z in view.logicals:
        if coset_class(code, x) is not CosetClass.LOGICAL_X or coset_class(code, z) is not CosetClass.LOGICAL_Z:
            report.logical_classes = False
    b = [view.b(p) for p in range(n - 1)]

    def fail(c: int, w: Witness) -> None:
        if c not in report.witnesses:
            report.witnesses[c] = w

    # 1: b_j anticommutes with c_j
    for j in range(n - 1):
        if commutes(b[j], seq[j]):
            fail(1, Witness(j, j, (b[j], seq[j]), "b_j commutes with c_j"))
            break
    # 2: b_j commutes with every later c_k
    for j in range(n - 1):
        bad = next((k for k in range(j + 1, n - 1) if not commutes(b[j], seq[k])), None)
        if bad is not None:
            fail(2, Witness(j, bad, (b[j], seq[bad]), "b_j anticommutes with a later c_k"))
            break
    # 3: every other letter anticommutes with some c_k, k >= j, or completes a logical
    prior = SymplecticBasis.from_ops(code.generators, code.n)
    reps = (code.logical_x, code.logical_z, multiply(code.logical_x, code.logical_z, effective=True))
    for j in range(n - 1):
        q = view.order[j]
        for letter in _other_letters(view.bases[j]):
            t = PauliOperator.single(code.n, q, letter)
            if any(not commutes(t, seq[k]) for k in range(j, n - 1)):
                continue
            if any(prior.contains(multiply(t, rep, effective=True)) for rep in reps):
                continue
            fail(3, Witness(j, None, (t,), "neither anticommutes with a non-prior generator nor completes a logical"))
            break
        if 3 in report.witnesses:
            break
        prior.add(b[j])
    # 4: logical pair j commutes with every prior b_k
    for j in range(n):
        for k in range(min(j, n - 1)):
            hit = next((op for op in view.logicals[j] if not commutes(op, b[k])), None)
            if hit is not None:
                fail(4, Witness(j, k, (hit, b[k]), "logical pair anticommutes with a prior fallback"))
                break
        if 4 in report.witnesses:
            break
    # 5: the pair anticommutes site-wise only at its own qubit
    for j in range(n):
        x, z = view.logicals[j]
        sites = anticommute_positions(x, z)
        if sites != {view.order[j]}:
            fail(5, Witness(j, None, (x, z), f"site-wise anticommutation at {sorted(sites)}"))
            break
    for c in CONDITIONS:
        report.passed[c] = c not in report.witnesses
    return report


def check_conditions(scheme: Scheme, seq: Sequence[PauliOperator]) -> ConditionReport:
    """Conditions on a scheme whose generator sequence is given on the parent code."""
    return check_view(scheme.single_code(), reduce_sequence(scheme, seq))


def bound(n1: int, n2: int, p_b: Fraction) -> Fraction:
    """Best achievable logical success probability: 1 - (1 - P_B)^min(n1, n2)."""
    if n1 < 1 or n2 < 1:
        raise ValueError("code sizes must be positive")
    p_b = Fraction(p_b)
    if not 0 <= p_b <= 1:
        raise ValueError(f"P_B = {p_b} outside [0, 1]")
    return 1 - (1 - p_b) ** min(n1, n2)


def heuristic_no_premature_logical(scheme: Scheme, prefix: int | None = None) -> bool:
    """Every fallback in the all-partial run anticommutes with a non-logical generator.

    Runs on two copies of the (reduced) code; each fallback ``b⊗I`` is
    classified before it is measured, followed by ``I⊗b``.
    """
    view = scheme.single_code()
    code = view.code
    n = code.n
    state = init_encoded_bell(code, code)
    ident = PauliOperator.identity(n)
    stop = view.n - 1 if prefix is None else min(prefix, view.n - 1)
    for j in range(stop):
        b = view.b(j)
        for obs in (b.tensor(ident), ident.tensor(b)):
            if not isinstance(classify(state, obs), Anticommuting):
                return False
            _, state, _ = measure_mask(state, obs)
    return True


def almost_measured(view: SchemeView, prefix: int) -> tuple[PauliOperator, int] | None:
    """First single-qubit operator on an unmeasured qubit that, together with
    the first ``prefix`` fallbacks, would complete a stabilizer element."""
    code = view.code
    basis = SymplecticBasis.from_ops(code.generators, code.n)
    for j in range(prefix):
        basis.add(view.b(j))
    measured = set(view.order[:prefix])
    for q in range(code.n):
        if q in measured:
            continue
        for letter in "XYZ":
            m = PauliOperator.single(code.n, q, letter)
            if basis.contains(m):
                return m, prefix
    return None


def heuristic_no_almost_stabilizer(scheme: Scheme) -> bool:
    """No prefix of fallbacks is one single-qubit measurement short of a stabilizer."""
    view = scheme.single_code()
    return all(almost_measured(view, j) is None for j in range(view.n))
