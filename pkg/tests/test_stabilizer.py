import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.codes import build_code, five_qubit, qpc
from artifact.paulis import P, PauliOperator, SymplecticBasis, commutes, gf2_rank
from artifact.stabilizer import (
    LX,
    LZ,
    NEG,
    Anticommuting,
    Determined,
    Forbidden,
    ForbiddenMeasurement,
    Generator,
    Origin,
    OutcomeConflict,
    RecordEntry,
    StabilizerState,
    classify,
    infer_logicals,
    init_encoded_bell,
    measure,
    measure_mask,
)

QPC22 = qpc(2, 2)
# all-partial record of the QPC(2,2) walk-through: X, Z, X on pairs 1..3
WALK = ["XIII", "IZII", "IIXI"]


def both(letters: str) -> tuple[PauliOperator, PauliOperator]:
    ident = PauliOperator.identity(len(letters))
    op = P(letters)
    return op.tensor(ident), ident.tensor(op)


def walk_state(steps=3):
    state = init_encoded_bell(QPC22, QPC22)
    for letters in WALK[:steps]:
        for obs in both(letters):
            _, state, _ = measure_mask(state, obs)
    return state


def gens_text(state):
    return {(g.op.format(state.split)[1:], g.origin) for g in state.generators}


def test_init_qpc22():
    state = init_encoded_bell(QPC22, QPC22, 1, 1)
    assert len(state.generators) == 8
    signed = {str(g.signed()) for g in state.generators}
    assert "+XXIIXXII" in signed and "+ZIZIZIZI" in signed
    assert gf2_rank([g.op for g in state.generators]) == 8


def test_init_five_qubit_signs():
    code = five_qubit()
    state = init_encoded_bell(code, code, -1, 1)
    logical = {g.origin: g.signed() for g in state.generators if g.origin.is_logical}
    assert logical[Origin.LOGICAL_X] == code.logical_x.tensor(code.logical_x).negate()
    assert logical[Origin.LOGICAL_Z] == code.logical_z.tensor(code.logical_z)
    assert gf2_rank([g.op for g in state.generators]) == 10


def test_init_rejects_half_assignment():
    with pytest.raises(ValueError):
        init_encoded_bell(QPC22, QPC22, 1, None)


def test_classify_examples():
    state = init_encoded_bell(QPC22, QPC22, 1, 1)
    assert isinstance(classify(state, P("XIII IIII")), Anticommuting)
    for g in state.generators:
        if g.origin is Origin.CODE:
            cls = classify(state, g.op)
            assert isinstance(cls, Determined) and cls.sign == 1 and cls.reveals is None
    with pytest.raises(ValueError):
        classify(state, P("iXIII IIII"))


def test_walkthrough_intermediate_states():
    s1 = walk_state(1)
    assert gens_text(s1) == {
        ("XIII IIII", Origin.MEASURED), ("IIII XIII", Origin.MEASURED),
        ("XXXX IIII", Origin.CODE), ("IIZZ IIII", Origin.CODE),
        ("IIII XXXX", Origin.CODE), ("IIII IIZZ", Origin.CODE),
        ("XXII XXII", Origin.LOGICAL_X), ("IZZI IZZI", Origin.LOGICAL_Z),
    }
    s2 = walk_state(2)
    logical = {t for t in gens_text(s2) if t[1].is_logical}
    assert logical == {("IIXX IIXX", Origin.LOGICAL_X), ("IZZI IZZI", Origin.LOGICAL_Z)}
    s3 = walk_state(3)
    assert {t for t in gens_text(s3) if t[1] is Origin.CODE} == set()
    logical = {(t, g.mask) for g in s3.generators if g.origin.is_logical for t in [g.op.format(4)[1:]]}
    assert logical == {("IIXX IIXX", LX), ("IZIZ IZIZ", LZ)}


@pytest.mark.parametrize("letter", "XYZ")
def test_last_pair_is_forbidden_after_walk(letter):
    state = walk_state(3)
    for obs in both("III" + letter):
        cls = classify(state, obs)
        assert isinstance(cls, Forbidden)
        with pytest.raises(ForbiddenMeasurement):
            measure_mask(state, obs)


def single_code_state():
    gens = [Generator(P(t), Origin.CODE) for t in ("ZZII", "IIZZ", "XXXX")]
    gens.append(Generator(P("XXII"), Origin.LOGICAL_X, LX))
    return StabilizerState(4, gens)


def test_single_code_measurement_replaces_zz():
    state = single_code_state()
    out, new, cls = measure_mask(state, P("XIII"))
    assert cls == Anticommuting(0)
    assert [g.op.letters for g in new.generators] == ["XIII", "IIZZ", "XXXX", "XXII"]
    assert new.generators[0].origin is Origin.MEASURED and new.generators[0].mask == out
    # IXII is now fixed by the record and l_x: m2 = m1 * l_x
    out2, after, cls2 = measure_mask(new, P("IXII"))
    assert isinstance(cls2, Determined) and cls2.reveals == "x"
    assert out2 == out ^ LX
    assert after.generators == new.generators


def test_measure_generator_is_idempotent():
    state = init_encoded_bell(QPC22, QPC22, -1, 1)
    for g in state.generators:
        sign = g.signed().sign
        out, new = measure(state, g.op, forced=sign)
        assert out == sign and new.generators == state.generators
        with pytest.raises(OutcomeConflict):
            measure(state, g.op, forced=-sign)


def test_measure_refuses_symbolic_state():
    with pytest.raises(ValueError):
        measure(init_encoded_bell(QPC22, QPC22), P("XIII IIII"))


def record(*items):
    return [RecordEntry(P(t), 0) for t in items]


def test_infer_success_on_first_pair():
    rec = record("XIII XIII", "ZIII ZIII", "IXII IXII", "IIIZ IIIZ")
    info = infer_logicals(rec, QPC22, QPC22)
    assert info.values()["x"] == 1 and info.values()["z"] == 1
    flipped = [RecordEntry(rec[0].observable, NEG)] + rec[1:]
    assert infer_logicals(flipped, QPC22, QPC22).values()["x"] == -1


def test_infer_empty_record():
    assert infer_logicals([], QPC22, QPC22).known() == set()


@pytest.mark.parametrize("letter", "XYZ")
def test_infer_all_partial_walk_plus_last_partial(letter):
    state = walk_state(3)
    for obs in both("III" + letter):
        _, state, _ = measure_mask(state, obs, override=True)
    assert state.logical_count() <= 1
    known = infer_logicals(state.record, QPC22, QPC22).known()
    assert not {"x", "z"} <= known


# properties ------------------------------------------------------------------------

CODES = [("qpc", (2, 2)), ("qpc", (2, 3)), ("five-qubit", ()), ("steane", ()), ("standard", (2, 2)), ("tree", (2, 2))]


@st.composite
def measurement_runs(draw):
    family, params = draw(st.sampled_from(CODES))
    code = build_code(family, params)
    n = code.n
    qubits = draw(st.permutations(range(n)))
    count = draw(st.integers(0, n))
    steps = [(q, draw(st.sampled_from("XYZ")), draw(st.sampled_from(("first", "second", "both")))) for q in qubits[:count]]
    return code, steps


def step_ops(n, q, letter, which):
    ident = PauliOperator.identity(n)
    single = PauliOperator.single(n, q, letter)
    if which == "first":
        return [single.tensor(ident)]
    if which == "second":
        return [ident.tensor(single)]
    return [single.tensor(ident), ident.tensor(single)]


def assert_valid(state):
    ops = [g.op for g in state.generators]
    assert all(commutes(a, b) for a in ops for b in ops)
    assert gf2_rank(ops) == state.n


@settings(max_examples=60, deadline=None)
@given(measurement_runs())
def test_allowed_measurements_keep_standard_form(run):
    code, steps = run
    n = code.n
    state = init_encoded_bell(code, code)
    originals = SymplecticBasis.from_ops([g.op for g in state.generators if g.origin is Origin.CODE], 2 * n)
    start = {g.origin: g.op for g in state.generators if g.origin.is_logical}
    for q, letter, which in steps:
        for obs in step_ops(n, q, letter, which):
            if isinstance(classify(state, obs), Forbidden):
                continue
            _, state, _ = measure_mask(state, obs)
            assert_valid(state)
    measured = SymplecticBasis.from_ops([e.observable for e in state.record], 2 * n)
    for g in state.generators:
        if g.origin is Origin.CODE:
            assert originals.contains(g.op)
        elif g.origin is Origin.MEASURED:
            assert measured.contains(g.op)
    logical = [g for g in state.generators if g.origin.is_logical]
    assert len(logical) == 2
    for g in logical:
        # same coset as the starting representative, modulo the code stabilizers
        diff = PauliOperator(2 * n, g.op.x ^ start[g.origin].x, g.op.z ^ start[g.origin].z)
        assert originals.contains(diff)


@settings(max_examples=60, deadline=None)
@given(measurement_runs())
def test_forbidden_override_loses_a_logical_for_good(run):
    code, steps = run
    n = code.n
    state = init_encoded_bell(code, code)
    hit = False
    for q, letter, which in steps:
        for obs in step_ops(n, q, letter, which):
            forbidden = isinstance(classify(state, obs), Forbidden)
            _, state, _ = measure_mask(state, obs, override=True)
            assert_valid(state)
            hit |= forbidden
            if hit:
                assert state.logical_count() <= 1
                assert not {"x", "z"} <= infer_logicals(state.record, code, code).known()


@settings(max_examples=60, deadline=None)
@given(measurement_runs(), st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]), st.integers(0, 2**32 - 1))
def test_inferred_values_match_hidden_truth(run, truth, seed):
    import numpy as np

    code, steps = run
    n = code.n
    l_x, l_z = truth
    state = init_encoded_bell(code, code, l_x, l_z)
    rng = np.random.default_rng(seed)
    for q, letter, which in steps:
        for obs in step_ops(n, q, letter, which):
            if isinstance(classify(state, obs), Forbidden):
                continue
            _, state = measure(state, obs, rng=rng)
    values = infer_logicals(state.record, code, code).values()
    expected = {"x": l_x, "z": l_z, "y": -l_x * l_z}
    for key, v in values.items():
        if v is not None:
            assert v == expected[key]


def test_anticommuting_outcomes_are_fair():
    import numpy as np

    state = init_encoded_bell(QPC22, QPC22, 1, -1)
    obs = P("XIII IIII")
    assert isinstance(classify(state, obs), Anticommuting)
    rng = np.random.default_rng(7)
    trials = 10_000
    plus = sum(measure(state, obs, rng=rng)[0] == 1 for _ in range(trials))
    sigma = (trials * 0.25) ** 0.5
    assert abs(plus - trials / 2) <= 4 * sigma
