import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.engine import exact_adaptive
from artifact.paulis import P, PauliOperator, anticommute_positions, commutes, multiply, product
from artifact.schemes import Scheme, build_optimal, reduce_sequence
from artifact.verify import (
    almost_measured,
    bound,
    check_conditions,
    heuristic_no_almost_stabilizer,
    heuristic_no_premature_logical,
)

HALF = Fraction(1, 2)

# the optimal schemes the checker must accept
ACCEPTED = [
    ("qpc", (2, 2)), ("qpc", (2, 3)), ("qpc", (3, 3)), ("qpc", (3, 4)), ("qpc", (4, 4)),
    ("five-qubit", ()), ("steane", ()),
    ("standard", (2, 2)), ("standard", (2, 3)), ("standard", (3, 3)),
    ("rotated", (2, 2)), ("rotated", (3, 3)), ("rotated", (4, 4)), ("rotated", (5, 5)), ("rotated", (3, 4)),
    ("tree", (2, 2)), ("tree", (2, 2, 2)), ("tree", (3, 2)),
]


@pytest.mark.parametrize("family,params", ACCEPTED)
def test_optimal_schemes_pass_conditions_and_heuristics(family, params):
    scheme, seq = build_optimal(family, params)
    report = check_conditions(scheme, seq)
    assert report.ok, report.to_text()
    assert heuristic_no_premature_logical(scheme)
    assert heuristic_no_almost_stabilizer(scheme)


@pytest.mark.parametrize("family,params", ACCEPTED)
def test_passing_schemes_reach_the_bound(family, params):
    scheme, _ = build_optimal(family, params)
    n = scheme.n
    for p_b in (Fraction(1, 4), HALF, Fraction(3, 4)):
        assert exact_adaptive(scheme, p_b).success_probability == bound(n, n, p_b)


def test_steane_listed_sequence():
    scheme, _ = build_optimal("steane")
    seq = [P(t) for t in ("ZZZZIII", "IXIXXXI", "IIXXIXX", "XIIXXIX", "IZIZZZI", "IIZZIZZ")]
    assert check_conditions(scheme, seq).ok


def test_misaligned_sequence_rejected():
    scheme, seq = build_optimal("five-qubit")
    with pytest.raises(ValueError):
        check_conditions(scheme, seq[:-1])


# independent condition oracle --------------------------------------------------


def brute_span(ops, n):
    out = set()
    for r in range(len(ops) + 1):
        for sel in itertools.combinations(ops, r):
            out.add(product(sel, n).vector if sel else 0)
    return out


def oracle_first_failures(view, seq):
    """First failing j per condition, straight from the definitions."""
    code, n = view.code, view.n
    b = [view.b(p) for p in range(n - 1)]
    reps = [code.logical_x, code.logical_z, multiply(code.logical_x, code.logical_z, effective=True)]
    first = {}
    for j in range(n - 1):
        if 1 not in first and commutes(b[j], seq[j]):
            first[1] = j
        if 2 not in first and any(not commutes(b[j], seq[k]) for k in range(j + 1, n - 1)):
            first[2] = j
        if 3 not in first:
            group = brute_span(list(code.generators) + b[:j], code.n)
            for letter in "XYZ":
                if letter == view.bases[j]:
                    continue
                t = PauliOperator.single(code.n, view.order[j], letter)
                if any(not commutes(t, seq[k]) for k in range(j, n - 1)):
                    continue
                if any(multiply(t, rep, effective=True).vector in group for rep in reps):
                    continue
                first[3] = j
                break
    for j in range(n):
        if 4 not in first and any(not commutes(op, b[k]) for op in view.logicals[j] for k in range(min(j, n - 1))):
            first[4] = j
        x, z = view.logicals[j]
        if 5 not in first and anticommute_positions(x, z) != {view.order[j]}:
            first[5] = j
    return first


def replay_witness(view, seq, c, w):
    """Re-derive the violation from the witness operators alone."""
    if c == 1:
        return commutes(*w.operators) and w.operators == (view.b(w.j), seq[w.j])
    if c == 2:
        return not commutes(*w.operators) and w.k > w.j
    if c == 3:
        (t,) = w.operators
        return all(commutes(t, seq[k]) for k in range(w.j, view.n - 1))
    if c == 4:
        return not commutes(*w.operators) and w.k < w.j
    return anticommute_positions(*w.operators) != {view.order[w.j]}


def mutated(scheme, bases):
    return Scheme(scheme.code, scheme.order, bases, scheme.logicals, scheme.pre_steps)


def test_five_qubit_mutation_fails_with_replayable_witness():
    scheme, seq = build_optimal("five-qubit")
    bad = mutated(scheme, "Z" + scheme.bases[1:])
    report = check_conditions(bad, seq)
    assert not report.ok and report.witnesses
    view, reduced = bad.single_code(), reduce_sequence(bad, seq)
    assert {c: w.j for c, w in report.witnesses.items()} == oracle_first_failures(view, reduced)
    for c, w in report.witnesses.items():
        assert replay_witness(view, reduced, c, w)
    assert exact_adaptive(bad, HALF).success_probability < bound(5, 5, HALF)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("five-qubit", ()), ("qpc", (2, 2)), ("steane", ()), ("tree", (2, 2))]), st.data())
def test_checker_agrees_with_brute_oracle(item, data):
    scheme, seq = build_optimal(*item)
    bases = "".join(data.draw(st.sampled_from("XYZ")) for _ in range(scheme.n))
    bad = mutated(scheme, bases)
    view, reduced = bad.single_code(), reduce_sequence(bad, seq)
    report = check_conditions(bad, seq)
    assert {c: w.j for c, w in report.witnesses.items()} == oracle_first_failures(view, reduced)
    for c, w in report.witnesses.items():
        assert replay_witness(view, reduced, c, w)
    if report.ok:
        # the implication under test: passing implies both rules
        assert heuristic_no_premature_logical(bad) and heuristic_no_almost_stabilizer(bad)


def test_qpc22_all_x_almost_measures_xxxx():
    scheme, _ = build_optimal("qpc", (2, 2))
    all_x = mutated(scheme, "XXXX")
    view = all_x.single_code()
    assert [almost_measured(view, j) for j in range(3)] == [None] * 3
    m, prefix = almost_measured(view, 3)
    assert (m.letters, prefix) == ("IIIX", 3)
    assert multiply(product([view.b(j) for j in range(3)], 4), m) == P("XXXX")
    assert not heuristic_no_almost_stabilizer(all_x)


def test_empty_prefix_is_vacuous():
    scheme, _ = build_optimal("qpc", (2, 2))
    assert heuristic_no_premature_logical(mutated(scheme, "ZZZZ"), prefix=0)
    assert almost_measured(scheme.single_code(), 0) is None


def test_bound_values():
    assert bound(4, 4, HALF) == Fraction(15, 16)
    assert bound(3, 9, Fraction(1)) == 1
    assert bound(3, 9, Fraction(1, 3)) == 1 - Fraction(2, 3) ** 3
    for n in range(1, 26):
        assert bound(n, n, HALF) == 1 - Fraction(1, 2**n)
    with pytest.raises(ValueError):
        bound(2, 2, Fraction(3, 2))
    with pytest.raises(ValueError):
        bound(0, 2, HALF)


def test_report_renders():
    scheme, seq = build_optimal("five-qubit")
    report = check_conditions(mutated(scheme, "Z" + scheme.bases[1:]), seq)
    assert "FAIL" in report.to_text()
    assert '"ok": false' in report.to_json()
