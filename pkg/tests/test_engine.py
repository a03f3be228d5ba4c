import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.engine import (
    CapExceeded,
    ModelAssumptionError,
    compile_path,
    enumerate_static,
    exact_adaptive,
    exact_static,
    exact_success_probability,
    flat_adaptive_probability,
    flat_static_probability,
    monte_carlo,
    necessity_check,
    run_trial,
)
from artifact.fastsim import compile_scheme, dual_rows, supports
from artifact.paulis import P, PauliOperator, commutes
from artifact.schemes import Scheme, build_optimal, build_static
from artifact.stabilizer import ForbiddenMeasurement, Kind

HALF = Fraction(1, 2)

OPTIMAL = [
    ("qpc", (1, 1)), ("qpc", (2, 2)), ("qpc", (3, 4)), ("five-qubit", ()), ("steane", ()),
    ("standard", (2, 2)), ("standard", (3, 3)), ("rotated", (3, 3)), ("rotated", (3, 4)),
    ("tree", (2, 2)), ("tree", (3, 2)), ("tree", (2, 2, 2)),
]
STATIC = [
    ("simple", (2, 2)), ("simple", (3, 3)), ("optimized", (3, 3)), ("optimized", (3, 4)),
    ("tree", (2, 2)), ("tree", (3, 2)), ("string", (2, 2)), ("string", (2, 3)),
]


def optimal(item):
    return build_optimal(*item)[0]


def static(item):
    return build_static(item[0], params=item[1])


# brute-force determination oracle ---------------------------------------------------


def rank(vectors):
    rows, r = list(vectors), 0
    for bit in range(max((v.bit_length() for v in rows), default=0)):
        pivot = next((i for i in range(r, len(rows)) if (rows[i] >> bit) & 1), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and (rows[i] >> bit) & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def in_span(v, vectors):
    return rank(vectors) == rank(vectors + [v])


def oracle_records(view, pattern, adaptive):
    n = view.code.n
    out = []
    for p, q in enumerate(view.order):
        if pattern[p]:
            out += [PauliOperator.single(n, q, "X").vector, PauliOperator.single(n, q, "Z").vector]
            if adaptive:
                lx, lz = view.logicals[p]
                for t in range(p + 1, view.n):
                    r = view.order[t]
                    letter = next((c for c in (lx.letter(r), lz.letter(r)) if c != "I"), view.bases[t])
                    out.append(PauliOperator.single(n, r, letter).vector)
                return out
        else:
            out.append(PauliOperator.single(n, q, view.bases[p]).vector)
    return out


def oracle_success(view, pattern, adaptive):
    rows = [g.vector for g in view.code.generators] + oracle_records(view, pattern, adaptive)
    return in_span(view.code.logical_x.vector, rows) and in_span(view.code.logical_z.vector, rows)


def oracle_probability(scheme, p_b):
    view = scheme.single_code()
    adaptive = isinstance(scheme, Scheme)
    total = Fraction(0)
    for pattern in itertools.product((False, True), repeat=view.n):
        if oracle_success(view, pattern, adaptive):
            k = sum(pattern)
            total += p_b**k * (1 - p_b) ** (view.n - k)
    return total


# exact values ------------------------------------------------------------------------


def test_qpc22_exact():
    assert exact_success_probability(optimal(("qpc", (2, 2))), HALF).success_probability == Fraction(15, 16)


def test_optimized_static_rotated_55():
    scheme = build_static("optimized", params=(5, 5))
    assert exact_success_probability(scheme, HALF).success_probability == Fraction(2047, 2048)


@pytest.mark.parametrize("item", [("qpc", (2, 2)), ("five-qubit", ()), ("steane", ()), ("standard", (2, 2)), ("tree", (2, 2)), ("rotated", (3, 3))])
@pytest.mark.parametrize("p_b", [Fraction(1, 3), HALF])
def test_adaptive_exact_matches_oracle(item, p_b):
    scheme = optimal(item)
    value = exact_adaptive(scheme, p_b).success_probability
    assert value == oracle_probability(scheme, p_b)
    assert value == flat_adaptive_probability(scheme, p_b)


@pytest.mark.parametrize("item", [("simple", (2, 2)), ("simple", (3, 3)), ("optimized", (3, 3)), ("tree", (2, 2)), ("tree", (3, 2)), ("string", (2, 2)), ("string", (2, 3))])
@pytest.mark.parametrize("p_b", [Fraction(1, 3), HALF])
def test_static_exact_matches_oracle(item, p_b):
    scheme = static(item)
    value = exact_static(scheme, p_b).success_probability
    assert value == oracle_probability(scheme, p_b)
    assert value == flat_static_probability(scheme, p_b)
    assert value == enumerate_static(scheme, p_b)


def test_static_workers_agree():
    scheme = build_static("simple", params=(4, 4))
    serial = exact_static(scheme, HALF).success_probability
    assert exact_static(scheme, HALF, workers=2).success_probability == serial
    assert enumerate_static(scheme, HALF, workers=2, split_depth=3) == serial


@pytest.mark.parametrize("scheme", [optimal(i) for i in OPTIMAL[:6]] + [static(i) for i in STATIC[:4]], ids=lambda s: s.name)
def test_trivial_pb(scheme):
    assert exact_success_probability(scheme, Fraction(0)).success_probability == 0
    one = exact_success_probability(scheme, Fraction(1)).success_probability
    assert one == (1 if isinstance(scheme, Scheme) else oracle_probability(scheme, Fraction(1)))


def test_cap_and_range_errors():
    with pytest.raises(CapExceeded) as info:
        exact_success_probability(build_static("simple", params=(6, 6)), HALF)
    assert info.value.attempts == 36
    with pytest.raises(CapExceeded):
        exact_success_probability(optimal(("qpc", (3, 4))), HALF, cap=10)
    with pytest.raises(ValueError):
        exact_success_probability(optimal(("qpc", (2, 2))), Fraction(5, 4))


def test_ledger_measure_sums_to_one():
    res = exact_adaptive(optimal(("five-qubit", ())), HALF, with_ledger=True)
    assert sum(e["weight"] for e in res.ledger.values()) == 1
    assert sum(e["weight"] for e in res.ledger.values() if e["success"]) == res.success_probability
    assert res.ledger["FFFFF"]["success"] is False


@settings(max_examples=25, deadline=None)
@given(st.fractions(0, 1, max_denominator=50), st.fractions(0, 1, max_denominator=50))
def test_monotone_in_pb(a, b):
    lo, hi = sorted((a, b))
    for scheme in (optimal(("steane", ())), static(("optimized", (3, 3))), static(("tree", (2, 2)))):
        assert exact_success_probability(scheme, lo).success_probability <= exact_success_probability(scheme, hi).success_probability


# necessity ---------------------------------------------------------------------------


@pytest.mark.parametrize("scheme", [optimal(i) for i in OPTIMAL] + [static(i) for i in STATIC], ids=lambda s: s.name)
def test_all_fail_pattern_fails(scheme):
    assert necessity_check(scheme)
    if scheme.code.n <= 16:
        trial = run_trial(scheme, 1, -1, pattern=(False,) * scheme.n, strict=False)
        assert trial.claimed is None


# two-code trials ---------------------------------------------------------------------


@pytest.mark.parametrize("truth", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_qpc22_success_on_last_pair(truth):
    scheme = optimal(("qpc", (2, 2)))
    trial = run_trial(scheme, *truth, pattern=(False, False, False, True), seed=11)
    assert trial.claimed == truth
    success = [e.observable.format(4)[1:] for e in trial.record if e.kind is Kind.BELL_SUCCESS]
    assert success == ["IIIX IIIX", "IIIZ IIIZ"]


def test_tree_completes_along_the_path():
    scheme = optimal(("tree", (2, 2)))
    trial = run_trial(scheme, -1, 1, p_b=Fraction(1), seed=5)
    assert trial.pattern == (True,) and trial.claimed == (-1, 1)
    first = scheme.order[0]
    parent = next(v for v, kids in enumerate(scheme.code.layout["children"]) if first in kids)
    n = scheme.code.n
    letters = {}
    for e in trial.record:
        if e.kind is Kind.SINGLE_QUBIT and e.observable.x | e.observable.z < 1 << n:
            (q,) = [q for q in range(n) if e.observable.letter(q) != "I"]
            letters[q] = e.observable.letter(q)
    assert letters.pop(0) == "X"  # root pre-step
    assert letters.pop(parent) == "X"
    assert set(letters.values()) == {"Z"}


def test_strict_guards():
    static_tree = static(("tree", (2, 2)))
    with pytest.raises((ModelAssumptionError, ForbiddenMeasurement)):
        run_trial(static_tree, 1, 1, pattern=(False,) * 6, strict=True)
    scheme = optimal(("five-qubit", ()))
    bad = Scheme(scheme.code, scheme.order, "ZZYYY", scheme.logicals)
    with pytest.raises(ForbiddenMeasurement):
        run_trial(bad, 1, 1, pattern=(False,) * 5)
    with pytest.raises(ValueError):
        run_trial(scheme, 1, 1)


@pytest.mark.parametrize("item", [("qpc", (2, 2)), ("five-qubit", ()), ("steane", ()), ("tree", (2, 2)), ("standard", (2, 2))])
def test_picture_equivalence_exhaustive(item):
    scheme = optimal(item)
    view = scheme.single_code()
    measure = Fraction(0)
    for pattern in itertools.product((False, True), repeat=view.n):
        path = compile_path(scheme, pattern)
        assert path.exact
        assert path.success == oracle_success(view, pattern, True)
        if path.success:
            measure += HALF**view.n
    assert measure == exact_adaptive(scheme, HALF).success_probability


# Monte Carlo -------------------------------------------------------------------------


def test_five_qubit_monte_carlo():
    res = monte_carlo(optimal(("five-qubit", ())), 100_000, HALF, seed=1)
    assert res.logical_errors == 0
    assert abs(res.estimate - 31 / 32) <= 4 * res.stderr


def test_static_tree_monte_carlo():
    res = monte_carlo(static(("tree", (2, 2))), 100_000, HALF, seed=2)
    assert res.logical_errors == 0
    assert abs(res.estimate - 0.75) <= 4 * res.stderr


def test_certain_success():
    res = monte_carlo(optimal(("steane", ())), 5_000, Fraction(1), seed=3)
    assert res.estimate == 1.0 and res.successes == 5_000 and res.logical_errors == 0


def test_worker_count_does_not_change_results():
    scheme = optimal(("qpc", (2, 2)))
    serial = monte_carlo(scheme, 20_000, HALF, seed=4)
    parallel = monte_carlo(scheme, 20_000, HALF, seed=4, workers=2)
    assert serial == parallel


@pytest.mark.parametrize("scheme", [optimal(("qpc", (2, 2))), optimal(("tree", (2, 2))), static(("tree", (2, 2))), static(("simple", (3, 3)))], ids=lambda s: s.name)
def test_kernel_and_symbolic_routes_agree(scheme):
    a = monte_carlo(scheme, 20_000, HALF, seed=9, method="kernel")
    b = monte_carlo(scheme, 20_000, HALF, seed=9, method="paths")
    assert a.successes == b.successes
    assert a.logical_errors == b.logical_errors == 0
    assert (a.forbidden_paths, a.nonuniform_paths) == (b.forbidden_paths, b.nonuniform_paths)


def test_monte_carlo_errors():
    scheme = optimal(("qpc", (2, 2)))
    with pytest.raises(ValueError):
        monte_carlo(scheme, 0, HALF)
    with pytest.raises(ValueError):
        monte_carlo(scheme, 10, HALF, method="fast")


def test_large_code_falls_back_to_symbolic_route():
    scheme = optimal(("qpc", (6, 6)))
    assert not supports(scheme)
    res = monte_carlo(scheme, 200, HALF, seed=5)
    assert res.estimate == 1.0 and res.logical_errors == 0


# compiled kernel against the reference path --------------------------------------------


@pytest.mark.parametrize(
    "scheme",
    [optimal(("qpc", (2, 2))), optimal(("five-qubit", ())), optimal(("steane", ())), optimal(("tree", (2, 2))),
     static(("tree", (2, 2))), static(("simple", (2, 2))), static(("string", (2, 2)))],
    ids=lambda s: s.name,
)
def test_kernel_matches_reference_on_every_pattern(scheme):
    compiled = compile_scheme(scheme)
    patterns = np.array(list(itertools.product((0, 1), repeat=scheme.n)), dtype=np.uint8)
    if isinstance(scheme, Scheme):
        # the kernel expects nothing after the first success
        first = np.where(patterns.any(axis=1), patterns.argmax(axis=1), scheme.n)
        patterns = (np.arange(scheme.n)[None, :] == first[:, None]).astype(np.uint8)
    rng = np.random.default_rng(0)
    reps = 8
    tiled = np.repeat(patterns, reps, axis=0)
    lbits = rng.integers(0, 2, size=(len(tiled), 2), dtype=np.int64)
    obits = rng.integers(0, 2, size=(len(tiled), compiled.max_random), dtype=np.int64)
    success, error, forb, _, nonu = compiled.run(tiled, lbits, obits)
    assert not error.any()
    for i, row in enumerate(patterns):
        path = compile_path(scheme, tuple(bool(b) for b in row))
        block = slice(i * reps, (i + 1) * reps)
        assert set(success[block].tolist()) == {int(path.success)}
        assert set((forb[block] > 0).tolist()) == {path.flags.forbidden > 0}
        assert set((nonu[block] > 0).tolist()) == {path.flags.nonuniform > 0}


@pytest.mark.parametrize("item", [("qpc", (2, 2)), ("steane", ()), ("rotated", (3, 3))])
def test_dual_rows_pair_off_with_generators(item):
    scheme = optimal(item)
    code = scheme.code
    ops = [g.stripped() for g in code.generators] + [code.logical_x, code.logical_z]
    duals = dual_rows(ops, code.n)
    for i, d in enumerate(duals):
        for j, g in enumerate(ops):
            assert commutes(d, g) == (i != j)
    with pytest.raises(ValueError):
        dual_rows([P("XI"), P("XI")], 2)
