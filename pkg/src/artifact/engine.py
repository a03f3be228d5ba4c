"""Success probabilities of logical Bell-measurement schemes.

Two independent routes:

* exact: enumerate outcome patterns in the single-code picture, where a
  success on qubit q records X_q and Z_q and a failure records the fallback
  basis.  A leaf succeeds iff both stored logical representatives lie in the
  span of the records and the code stabilizers.
* Monte Carlo: simulate both code blocks with the stabilizer engine and read
  the logical values off the measurement record, checking them against the
  hidden truth.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .codes import StabilizerCode
from .fastsim import compile_scheme, supports as kernel_supports
from .paulis import PauliOperator, SymplecticBasis
from .schemes import Scheme, SchemeView, StaticScheme
from .stabilizer import (
    LX,
    LZ,
    Anticommuting,
    Determined,
    ForbiddenMeasurement,
    Kind,
    RecordEntry,
    StabilizerState,
    classify,
    infer_logicals,
    init_encoded_bell,
    measure_mask,
    sign_of,
)

DEFAULT_CAP = 26
DEFAULT_SEED = 20240917
CHUNK = 8192


class CapExceeded(RuntimeError):
    """The scheme needs more Bell-measurement attempts than the cap allows."""

    def __init__(self, attempts: int, cap: int):
        super().__init__(f"{attempts} attempted Bell measurements exceed the cap of {cap}")
        self.attempts = attempts
        self.cap = cap


class ModelAssumptionError(RuntimeError):
    """A Bell measurement was attempted on a pair whose outcomes are not uniform."""


def _check_pb(p_b: Fraction) -> Fraction:
    p_b = Fraction(p_b)
    if not 0 <= p_b <= 1:
        raise ValueError(f"P_B = {p_b} outside [0, 1]")
    return p_b


# single-code determination ----------------------------------------------------


def record_ops(view: SchemeView, pattern: Sequence[bool], adaptive: bool) -> list[PauliOperator]:
    """Single-code records for a success/failure pattern.

    For an adaptive scheme only the prefix up to the first success is read;
    the rest of the qubits follow the completion bases of that position.
    """
    n = view.code.n
    ops: list[PauliOperator] = []
    for p in range(view.n):
        q = view.order[p]
        if pattern[p]:
            ops.append(PauliOperator.single(n, q, "X"))
            ops.append(PauliOperator.single(n, q, "Z"))
            if adaptive:
                for t, letter in enumerate(view.completion_bases(p), start=p + 1):
                    ops.append(PauliOperator.single(n, view.order[t], letter))
                return ops
        else:
            ops.append(view.b(p))
    return ops


def determine(code: StabilizerCode, records: Iterable[PauliOperator]) -> set[str]:
    """Logical classes (subset of "xyz") fixed by ``records`` and the stabilizers."""
    basis = SymplecticBasis.from_ops(code.generators, code.n)
    for op in records:
        basis.add(op)
    out = set()
    x, z = code.logical_x.vector, code.logical_z.vector
    if basis.reduce(x)[0] == 0:
        out.add("x")
    if basis.reduce(z)[0] == 0:
        out.add("z")
    if basis.reduce(x ^ z)[0] == 0:
        out.add("y")
    return out


def pattern_text(pattern: Sequence[bool]) -> str:
    return "".join("S" if s else "F" for s in pattern)


@dataclass
class ExactResult:
    success_probability: Fraction
    attempts: int
    ledger: dict[str, dict] | None = None

    def as_dict(self) -> dict:
        p = self.success_probability
        return {"numerator": p.numerator, "denominator": p.denominator, "attempts": self.attempts}


def _adaptive_leaves(view: SchemeView) -> list[tuple[tuple[bool, ...], set[str]]]:
    n = view.n
    leaves = []
    for j in range(n):
        pattern = tuple([False] * j + [True])
        leaves.append((pattern, determine(view.code, record_ops(view, pattern + (False,) * (n - j - 1), True))))
    fail = tuple([False] * n)
    leaves.append((fail, determine(view.code, record_ops(view, fail, True))))
    return leaves


def exact_adaptive(scheme: Scheme, p_b: Fraction, cap: int = DEFAULT_CAP, with_ledger: bool = False) -> ExactResult:
    p_b = _check_pb(p_b)
    view = scheme.single_code()
    if view.n > cap:
        raise CapExceeded(view.n, cap)
    total = Fraction(0)
    ledger = {} if with_ledger else None
    for pattern, known in _adaptive_leaves(view):
        k = sum(pattern)
        weight = p_b**k * (1 - p_b) ** (len(pattern) - k)
        ok = {"x", "z"} <= known
        if ok:
            total += weight
        if ledger is not None:
            ledger[pattern_text(pattern)] = {"success": ok, "known": sorted(known), "weight": weight}
    return ExactResult(total, view.n, ledger)


# static schemes: frontier dynamic program ----------------------------------------


def _pack(op: PauliOperator, position: dict[int, int]) -> int:
    v = 0
    for q, t in position.items():
        if (op.x >> q) & 1:
            v |= 1 << (2 * t)
        if (op.z >> q) & 1:
            v |= 1 << (2 * t + 1)
    return v


def _rref(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced echelon form with pivots at the lowest set bit, sorted by pivot."""
    piv: dict[int, int] = {}
    for r in rows:
        for p, pr in piv.items():
            if (r >> p) & 1:
                r ^= pr
        if r:
            p = (r & -r).bit_length() - 1
            for q in piv:
                if (piv[q] >> p) & 1:
                    piv[q] ^= r
            piv[p] = r
    return tuple(piv[p] for p in sorted(piv))


def _residue(v: int | None, rows: tuple[int, ...]) -> int | None:
    if v is None:
        return None
    for r in rows:
        p = (r & -r).bit_length() - 1
        if (v >> p) & 1:
            v ^= r
    return v


_FAIL_MASK = {"X": 0b10, "Z": 0b01, "Y": 0b11}  # local bits that must vanish modulo the basis


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def _step(state, success: bool, basis: str):
    rows, rx, rz = state
    if not success:
        test = _FAIL_MASK[basis]
        pivot = None
        kept = []
        for r in rows:
            if _parity(r & test):
                if pivot is None:
                    pivot = r
                else:
                    kept.append(r ^ pivot)
            else:
                kept.append(r)
        rows = kept
        res = []
        for v in (rx, rz):
            if v is not None and _parity(v & test):
                v = None if pivot is None else v ^ pivot
            res.append(v)
        rx, rz = res
    new_rows = _rref(r >> 2 for r in rows)
    return new_rows, _residue(None if rx is None else rx >> 2, new_rows), _residue(
        None if rz is None else rz >> 2, new_rows
    )


def _classify_state(state) -> str | None:
    _, rx, rz = state
    if rx is None or rz is None:
        return "fail"
    if rx == 0 and rz == 0:
        return "success"
    return None


def _static_start(view: SchemeView):
    position = {q: t for t, q in enumerate(view.order)}
    rows = _rref(_pack(g, position) for g in view.code.generators)
    return (
        rows,
        _residue(_pack(view.code.logical_x, position), rows),
        _residue(_pack(view.code.logical_z, position), rows),
    )


def _run_frontier(args) -> Fraction:
    bases, start_t, states, p_b = args
    p_b = Fraction(p_b)
    q_b = 1 - p_b
    success = Fraction(0)
    layer = dict(states)
    for t in range(start_t, len(bases)):
        nxt: dict = {}
        for state, w in layer.items():
            for ok, pw in ((True, p_b), (False, q_b)):
                if pw == 0:
                    continue
                s = _step(state, ok, bases[t])
                verdict = _classify_state(s)
                if verdict == "success":
                    success += w * pw
                elif verdict is None:
                    nxt[s] = nxt.get(s, 0) + w * pw
        layer = nxt
    return success


def exact_static(
    scheme: StaticScheme,
    p_b: Fraction,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    split_depth: int = 4,
) -> ExactResult:
    """Exact success probability of a static scheme by a frontier dynamic program.

    Qubits are processed in scheme order.  The state after t qubits is the
    projection onto the remaining qubits of all stabilizer elements that are
    compatible with the records so far, plus the residues of the two logical
    representatives; patterns leading to the same state are merged.
    """
    p_b = _check_pb(p_b)
    view = scheme.single_code()
    if view.n > cap:
        raise CapExceeded(view.n, cap)
    start = _static_start(view)
    verdict = _classify_state(start)
    if verdict is not None:
        return ExactResult(Fraction(1 if verdict == "success" else 0), view.n)
    bases = view.bases
    depth = min(split_depth, view.n) if workers > 1 else 0
    # expand a few levels serially so the work splits into independent prefixes
    success = Fraction(0)
    layer = {start: Fraction(1)}
    for t in range(depth):
        nxt: dict = {}
        for state, w in layer.items():
            for ok, pw in ((True, p_b), (False, 1 - p_b)):
                if pw == 0:
                    continue
                s = _step(state, ok, bases[t])
                v = _classify_state(s)
                if v == "success":
                    success += w * pw
                elif v is None:
                    nxt[s] = nxt.get(s, 0) + w * pw
        layer = nxt
    items = sorted(layer.items(), key=lambda kv: repr(kv[0]))
    if workers > 1 and len(items) > 1:
        chunks = [dict(items[i::workers]) for i in range(workers)]
        args = [(bases, depth, c, str(p_b)) for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_frontier, args):
                success += part
    else:
        success += _run_frontier((bases, depth, dict(items), str(p_b)))
    return ExactResult(success, view.n)


def flat_static_probability(scheme: StaticScheme, p_b: Fraction, max_n: int = 20) -> Fraction:
    """Independent check: loop over every pattern and test spans directly."""
    p_b = _check_pb(p_b)
    view = scheme.single_code()
    if view.n > max_n:
        raise CapExceeded(view.n, max_n)
    total = Fraction(0)
    for pattern in cartesian((False, True), repeat=view.n):
        known = determine(view.code, record_ops(view, pattern, False))
        if {"x", "z"} <= known:
            k = sum(pattern)
            total += p_b**k * (1 - p_b) ** (view.n - k)
    return total


def _full_reduce(piv: dict[int, int], w: int) -> int:
    for p in sorted(piv, reverse=True):
        if (w >> p) & 1:
            w ^= piv[p]
    return w


def _insert(piv: dict[int, int], residues: list[int], w: int) -> None:
    """Add ``w`` to a fully reduced basis and keep the residues reduced."""
    w = _full_reduce(piv, w)
    if not w:
        return
    p = w.bit_length() - 1
    for q in piv:
        if (piv[q] >> p) & 1:
            piv[q] ^= w
    piv[p] = w
    for k, r in enumerate(residues):
        if (r >> p) & 1:
            residues[k] = r ^ w


def _enumerate_static_setup(scheme: StaticScheme):
    view = scheme.single_code()
    code = view.code
    n = code.n
    piv: dict[int, int] = {}
    res = [code.logical_x.vector, code.logical_z.vector]
    for g in code.generators:
        _insert(piv, res, g.vector)
    res = [_full_reduce(piv, r) for r in res]
    records = []
    for q, b in zip(view.order, view.bases):
        single = PauliOperator.single(n, q, b).vector
        records.append(((1 << q, 1 << (q + n)), (single,)))
    return piv, res, records


def _enumerate_subtree(args) -> Fraction:
    piv, res, records, t, weight, p_b = args
    p_b = Fraction(p_b)
    total = Fraction(0)
    stack = [(t, piv, res, Fraction(weight))]
    while stack:
        t, piv, res, w = stack.pop()
        if res[0] == 0 and res[1] == 0:
            total += w
            continue
        if t == len(records) or w == 0:
            continue
        for vecs, pw in ((records[t][0], p_b), (records[t][1], 1 - p_b)):
            if pw == 0:
                continue
            child = dict(piv)
            cres = list(res)
            for v in vecs:
                _insert(child, cres, v)
            stack.append((t + 1, child, cres, w * pw))
    return total


def enumerate_static(scheme: StaticScheme, p_b: Fraction, workers: int = 1, split_depth: int = 6, max_n: int = 32) -> Fraction:
    """Independent check of :func:`exact_static` that merges nothing.

    Walks every success/failure pattern depth first, extending a bit-packed
    GF(2) basis one record at a time; subtrees where both logicals are
    already determined are summed without expansion.  Prefixes of length
    ``split_depth`` are farmed out to ``workers`` processes.
    """
    p_b = _check_pb(p_b)
    piv, res, records = _enumerate_static_setup(scheme)
    if len(records) > max_n:
        raise CapExceeded(len(records), max_n)
    depth = min(split_depth, len(records)) if workers > 1 else 0
    seeds = [(piv, res, Fraction(1))]
    total = Fraction(0)
    for t in range(depth):
        nxt = []
        for pv, rs, w in seeds:
            if rs[0] == 0 and rs[1] == 0:
                total += w
                continue
            for vecs, pw in ((records[t][0], p_b), (records[t][1], 1 - p_b)):
                child, cres = dict(pv), list(rs)
                for v in vecs:
                    _insert(child, cres, v)
                nxt.append((child, cres, w * pw))
        seeds = nxt
    args = [(pv, rs, records, depth, str(w), str(p_b)) for pv, rs, w in seeds]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            total += sum(pool.map(_enumerate_subtree, args, chunksize=max(1, len(args) // (4 * workers))), Fraction(0))
    else:
        total += sum(map(_enumerate_subtree, args), Fraction(0))
    return total


def flat_adaptive_probability(scheme: Scheme, p_b: Fraction, max_n: int = 20) -> Fraction:
    """Independent check for feedforward schemes: every full-length pattern."""
    p_b = _check_pb(p_b)
    view = scheme.single_code()
    if view.n > max_n:
        raise CapExceeded(view.n, max_n)
    total = Fraction(0)
    for pattern in cartesian((False, True), repeat=view.n):
        if {"x", "z"} <= determine(view.code, record_ops(view, pattern, True)):
            k = sum(pattern)
            total += p_b**k * (1 - p_b) ** (view.n - k)
    return total


def exact_success_probability(
    scheme: Scheme | StaticScheme,
    p_b: Fraction,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    with_ledger: bool = False,
) -> ExactResult:
    if isinstance(scheme, Scheme):
        return exact_adaptive(scheme, p_b, cap, with_ledger)
    return exact_static(scheme, p_b, cap, workers)


def necessity_check(scheme: Scheme | StaticScheme) -> bool:
    """All-fail pattern leaves at most one of the x and z values known."""
    view = scheme.single_code()
    fail = (False,) * view.n
    known = determine(view.code, record_ops(view, fail, isinstance(scheme, Scheme)))
    return len(known & {"x", "z"}) <= 1


# two-code simulation -----------------------------------------------------------------


@dataclass
class PathFlags:
    forbidden: int = 0
    nonuniform: int = 0


@dataclass
class TrialResult:
    claimed: tuple[int, int] | None
    truth: tuple[int, int]
    record: list[RecordEntry]
    pattern: tuple[bool, ...]
    flags: PathFlags = field(default_factory=PathFlags)

    @property
    def success(self) -> bool:
        return self.claimed is not None

    @property
    def logical_error(self) -> bool:
        return self.claimed is not None and self.claimed != self.truth


def _pair_ops(n: int, q: int, letter: str) -> tuple[PauliOperator, PauliOperator, PauliOperator]:
    ident = PauliOperator.identity(n)
    single = PauliOperator.single(n, q, letter)
    return single.tensor(ident), ident.tensor(single), single.tensor(single)


def uniform_surrogate(state: StabilizerState, n: int, q: int) -> bool:
    """Each transversal product on pair q is random or tied to a logical value."""
    for letter in "XYZ":
        cls = classify(state, _pair_ops(n, q, letter)[2])
        if isinstance(cls, Anticommuting):
            continue
        if isinstance(cls, Determined) and cls.reveals is not None:
            continue
        return False
    return True


class _Runner:
    """Drives one two-code path through the stabilizer engine."""

    def __init__(self, state: StabilizerState, n: int, strict: bool, rng):
        self.state = state
        self.n = n
        self.strict = strict
        self.rng = rng
        self.flags = PathFlags()

    def measure(self, obs: PauliOperator, kind: Kind, allow_forbidden: bool = False) -> None:
        try:
            _, self.state, _ = measure_mask(self.state, obs, rng=self.rng, kind=kind)
        except ForbiddenMeasurement:
            if self.strict and not allow_forbidden:
                raise
            self.flags.forbidden += 1
            _, self.state, _ = measure_mask(self.state, obs, rng=self.rng, override=True, kind=kind)

    def attempt(self, q: int) -> None:
        if not uniform_surrogate(self.state, self.n, q):
            if self.strict:
                raise ModelAssumptionError(f"non-uniform Bell outcomes on pair {q}")
            self.flags.nonuniform += 1

    def success(self, q: int) -> None:
        self.measure(_pair_ops(self.n, q, "X")[2], Kind.BELL_SUCCESS)
        self.measure(_pair_ops(self.n, q, "Z")[2], Kind.BELL_SUCCESS)

    def partial(self, q: int, letter: str, allow_forbidden: bool = False) -> None:
        a, b, _ = _pair_ops(self.n, q, letter)
        self.measure(a, Kind.SINGLE_QUBIT, allow_forbidden)
        self.measure(b, Kind.SINGLE_QUBIT, allow_forbidden)


def _drive(scheme: Scheme | StaticScheme, runner: _Runner, pattern: Sequence[bool]) -> tuple[bool, ...]:
    """Play ``pattern`` through the runner; returns the attempt pattern actually used."""
    for q, letter in scheme.pre_steps:
        runner.partial(q, letter)
    adaptive = isinstance(scheme, Scheme)
    used: list[bool] = []
    n = scheme.n
    for p, q in enumerate(scheme.order):
        runner.attempt(q)
        ok = bool(pattern[p])
        used.append(ok)
        if ok:
            runner.success(q)
            if adaptive:
                view = scheme.single_code()
                for t, letter in enumerate(view.completion_bases(p), start=p + 1):
                    runner.partial(scheme.order[t], letter)
                break
        else:
            runner.partial(q, scheme.bases[p], allow_forbidden=(p == n - 1))
    return tuple(used)


def run_trial(
    scheme: Scheme | StaticScheme,
    l_x: int,
    l_z: int,
    p_b: Fraction | None = None,
    seed: int | None = None,
    pattern: Sequence[bool] | None = None,
    strict: bool | None = None,
) -> TrialResult:
    """One concrete two-code trial with known logical values.

    The success pattern is either forced or drawn with probability ``p_b``
    per attempt; measurement outcomes come from a generator seeded by ``seed``.
    """
    rng = np.random.default_rng(seed)
    if pattern is None:
        if p_b is None:
            raise ValueError("need either a forced pattern or P_B")
        p = float(_check_pb(p_b))
        pattern = tuple(bool(u < p) for u in rng.random(scheme.n))
    if len(pattern) < scheme.n:
        pattern = tuple(pattern) + (False,) * (scheme.n - len(pattern))
    strict = isinstance(scheme, Scheme) if strict is None else strict
    code = scheme.code
    runner = _Runner(init_encoded_bell(code, code, l_x, l_z), code.n, strict, rng)
    used = _drive(scheme, runner, pattern)
    info = infer_logicals(runner.state.record, code, code)
    claimed = None
    if info.x is not None and info.z is not None:
        claimed = (sign_of(info.x), sign_of(info.z))
    return TrialResult(claimed, (l_x, l_z), runner.state.record, used, runner.flags)


@dataclass
class CompiledPath:
    """Symbolic outcome of one success pattern: sign masks of the claimed values."""

    pattern: tuple[bool, ...]
    claimed_x: int | None
    claimed_z: int | None
    variables: int
    flags: PathFlags

    @property
    def success(self) -> bool:
        return self.claimed_x is not None and self.claimed_z is not None

    @property
    def exact(self) -> bool:
        """Claimed values equal the truth for every assignment of the variables."""
        return not self.success or (self.claimed_x == LX and self.claimed_z == LZ)


def compile_path(scheme: Scheme | StaticScheme, pattern: Sequence[bool], strict: bool | None = None) -> CompiledPath:
    code = scheme.code
    strict = isinstance(scheme, Scheme) if strict is None else strict
    runner = _Runner(init_encoded_bell(code, code), code.n, strict, None)
    used = _drive(scheme, runner, pattern)
    info = infer_logicals(runner.state.record, code, code)
    return CompiledPath(used, info.x, info.z, runner.state.next_var, runner.flags)


@dataclass
class MonteCarloResult:
    estimate: float
    stderr: float
    trials: int
    successes: int
    logical_errors: int
    seed: int
    forbidden_paths: int = 0
    nonuniform_paths: int = 0

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "trials": self.trials,
            "successes": self.successes,
            "logical_errors": self.logical_errors,
            "seed": self.seed,
        }


def _sample_patterns(rng: np.random.Generator, trials: int, n: int, p_b: float, adaptive: bool) -> np.ndarray:
    hits = rng.random((trials, n)) < p_b
    if adaptive:
        # everything after the first success is a completion, so drop it
        first = np.where(hits.any(axis=1), hits.argmax(axis=1), n)
        cols = np.arange(n)[None, :]
        hits = (cols == first[:, None]) & (first[:, None] < n)
    return hits


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))


def _mc_chunk_kernel(args) -> tuple[int, int, int, int]:
    compiled, n, adaptive, p_b, seed, chunk_index, trials = args
    rng = _chunk_rng(seed, chunk_index)
    patterns = _sample_patterns(rng, trials, n, float(p_b), adaptive)
    lbits = rng.integers(0, 2, size=(trials, 2), dtype=np.int64)
    obits = rng.integers(0, 2, size=(trials, compiled.max_random), dtype=np.int64)
    success, error, forb, viol, nonu = compiled.run(patterns.astype(np.uint8), lbits, obits)
    if compiled.strict and viol.any():
        raise ForbiddenMeasurement("a scheme measurement would erase logical Bell information")
    if compiled.strict and nonu.any():
        raise ModelAssumptionError("non-uniform Bell outcomes on some attempted pair")
    return int(success.sum()), int(error.sum()), int((forb > 0).sum()), int((nonu > 0).sum())


def _mc_chunk_paths(args) -> tuple[int, int, int, int]:
    """Symbolic route: compile each distinct pattern once, then draw its variables."""
    scheme, p_b, seed, chunk_index, trials = args
    rng = _chunk_rng(seed, chunk_index)
    adaptive = isinstance(scheme, Scheme)
    patterns = _sample_patterns(rng, trials, scheme.n, float(p_b), adaptive)
    keys, inverse = np.unique(patterns, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    cache: dict[tuple[bool, ...], CompiledPath] = {}
    successes = errors = forbidden = nonuniform = 0
    for g, key in enumerate(keys):
        members = np.flatnonzero(inverse == g)
        pattern = tuple(bool(b) for b in key)
        path = cache.get(pattern)
        if path is None:
            path = cache[pattern] = compile_path(scheme, pattern)
        forbidden += len(members) if path.flags.forbidden else 0
        nonuniform += len(members) if path.flags.nonuniform else 0
        if not path.success:
            continue
        successes += len(members)
        nbits = max(path.variables, path.claimed_x.bit_length(), path.claimed_z.bit_length(), 3)
        bits = rng.integers(0, 2, size=(len(members), nbits), dtype=np.uint8)
        bits[:, 0] = 1  # constant -1 factor

        def parity(mask: int) -> np.ndarray:
            cols = [k for k in range(nbits) if (mask >> k) & 1]
            return bits[:, cols].sum(axis=1) % 2 if cols else np.zeros(len(members), dtype=np.int64)

        wrong = (parity(path.claimed_x) != bits[:, 1]) | (parity(path.claimed_z) != bits[:, 2])
        errors += int(wrong.sum())
    return successes, errors, forbidden, nonuniform


def monte_carlo(
    scheme: Scheme | StaticScheme,
    trials: int,
    p_b: Fraction,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    method: str = "auto",
) -> MonteCarloResult:
    """Independent two-code trials with fresh random logical values.

    Trials are split into fixed chunks; chunk c draws from the stream
    ``SeedSequence(seed, spawn_key=(c,))`` so results do not depend on the
    number of workers.  ``method`` picks the concrete trial kernel
    ("kernel"), the symbolic per-pattern route ("paths"), or the kernel
    whenever the code fits it ("auto").
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_b = _check_pb(p_b)
    if method == "auto":
        method = "kernel" if kernel_supports(scheme) else "paths"
    sizes = [min(CHUNK, trials - s) for s in range(0, trials, CHUNK)]
    if method == "kernel":
        compiled = compile_scheme(scheme)
        adaptive = isinstance(scheme, Scheme)
        run, args = _mc_chunk_kernel, [(compiled, scheme.n, adaptive, p_b, seed, c, size) for c, size in enumerate(sizes)]
    elif method == "paths":
        run, args = _mc_chunk_paths, [(scheme, p_b, seed, c, size) for c, size in enumerate(sizes)]
    else:
        raise ValueError(f"unknown method {method!r}")
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, args))
    else:
        parts = [run(a) for a in args]
    successes = sum(p[0] for p in parts)
    errors = sum(p[1] for p in parts)
    est = successes / trials
    stderr = math.sqrt(est * (1 - est) / trials)
    return MonteCarloResult(
        est, stderr, trials, successes, errors, seed, sum(p[2] for p in parts), sum(p[3] for p in parts)
    )
