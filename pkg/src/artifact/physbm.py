"""Fock-space model of the dual-rail linear-optics Bell analyzer.

Qubit 1 lives in modes 0, 1 and qubit 2 in modes 2, 3, with |0> = one photon
in the first mode of the pair.  Two 50:50 splitters mix modes (0, 2) and
(1, 3).  All amplitudes are exact elements of Q(i, sqrt 2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

MODES = 4
BELL_NAMES = ("Phi+", "Phi-", "Psi+", "Psi-")


# exact scalars ---------------------------------------------------------------


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        d = self.re * self.re + self.im * self.im
        if d == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / d, -self.im / d)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)


_G0 = GaussianRational()


@dataclass(frozen=True)
class Amplitude:
    """a + b*sqrt(2) with Gaussian rationals a, b."""

    a: GaussianRational = _G0
    b: GaussianRational = _G0

    @classmethod
    def of(cls, re: int | Fraction = 0, im: int | Fraction = 0, root2: bool = False) -> "Amplitude":
        g = GaussianRational(Fraction(re), Fraction(im))
        return cls(_G0, g) if root2 else cls(g, _G0)

    def __add__(self, o: "Amplitude") -> "Amplitude":
        return Amplitude(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "Amplitude") -> "Amplitude":
        return Amplitude(self.a - o.a, self.b - o.b)

    def __neg__(self) -> "Amplitude":
        return Amplitude(-self.a, -self.b)

    def __mul__(self, o: "Amplitude") -> "Amplitude":
        two = GaussianRational(Fraction(2))
        return Amplitude(self.a * o.a + two * self.b * o.b, self.a * o.b + self.b * o.a)

    def conj(self) -> "Amplitude":
        return Amplitude(self.a.conj(), self.b.conj())

    def inverse(self) -> "Amplitude":
        # (a + b r)^-1 = (a - b r) / (a^2 - 2 b^2)
        two = GaussianRational(Fraction(2))
        d = self.a * self.a - two * self.b * self.b
        inv = d.inverse()
        return Amplitude(self.a * inv, -(self.b * inv))

    def __truediv__(self, o: "Amplitude") -> "Amplitude":
        return self * o.inverse()

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def abs2(self) -> "Amplitude":
        return self * self.conj()

    def rational(self) -> Fraction:
        """Value as a rational; raises if it is not one."""
        if self.b or self.a.im:
            raise ValueError(f"{self} is not rational")
        return self.a.re

    def render(self) -> str:
        """Exact form (p + qi)/2^(k/2) with integers p, q when possible."""
        if not self:
            return "0"
        for k in range(0, 16):
            scaled = self * ROOT2_POW[k]
            if scaled.b:
                continue
            re, im = scaled.a.re, scaled.a.im
            if re.denominator == 1 and im.denominator == 1:
                num = _gauss_text(int(re), int(im))
                if k == 0:
                    return num
                return f"{num}/{2 ** (k // 2)}" if k % 2 == 0 else f"{num}/2^({k}/2)"
        return f"({_gauss_text_frac(self.a)}) + ({_gauss_text_frac(self.b)})*sqrt2"

    def __repr__(self) -> str:
        return self.render()


def _gauss_text(p: int, q: int) -> str:
    if q == 0:
        return str(p)
    if p == 0:
        return f"{q}i" if q not in (1, -1) else ("i" if q == 1 else "-i")
    return f"({p}{'+' if q > 0 else '-'}{abs(q)}i)"


def _gauss_text_frac(g: GaussianRational) -> str:
    return f"{g.re}{'+' if g.im >= 0 else '-'}{abs(g.im)}i"


ZERO = Amplitude()
ONE = Amplitude.of(1)
I = Amplitude.of(0, 1)
ROOT2 = Amplitude.of(1, root2=True)
INV_ROOT2 = Amplitude.of(Fraction(1, 2), root2=True)
ROOT2_POW = [ONE]
for _ in range(16):
    ROOT2_POW.append(ROOT2_POW[-1] * ROOT2)


def _sqrt_int(k: int) -> Amplitude:
    if k == 1:
        return ONE
    if k == 2:
        return ROOT2
    if k == 4:
        return Amplitude.of(2)
    raise ValueError(f"sqrt({k}) is outside the supported field")


# Fock states -----------------------------------------------------------------

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class FockVector:
    amps: Mapping[Occupation, Amplitude]

    @classmethod
    def basis(cls, occ: Iterable[int]) -> "FockVector":
        return cls({tuple(occ): ONE})

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls.basis((0,) * MODES)

    def __add__(self, o: "FockVector") -> "FockVector":
        out = dict(self.amps)
        for k, v in o.amps.items():
            out[k] = out.get(k, ZERO) + v
        return FockVector({k: v for k, v in out.items() if v})

    def __sub__(self, o: "FockVector") -> "FockVector":
        return self + o.scale(-ONE)

    def scale(self, c: Amplitude) -> "FockVector":
        return FockVector({k: v * c for k, v in self.amps.items() if v * c})

    def amplitude(self, occ: Occupation) -> Amplitude:
        return self.amps.get(tuple(occ), ZERO)

    def norm2(self) -> Fraction:
        total = ZERO
        for v in self.amps.values():
            total = total + v.abs2()
        return total.rational()

    def render(self) -> str:
        terms = [f"{self.amps[k].render()}|{''.join(map(str, k))}>" for k in sorted(self.amps, reverse=True)]
        return " + ".join(terms) if terms else "0"


def _factorial(k: int) -> int:
    out = 1
    for t in range(2, k + 1):
        out *= t
    return out


def beam_splitter_pair(state: FockVector, modes: tuple[int, int]) -> FockVector:
    """Apply a† -> (a† + i b†)/√2, b† -> (i a† + b†)/√2 on modes (a, b).

    Each Fock term is written as a monomial in creation operators, the two
    affected operators are substituted, and the product is expanded back.
    """
    a, b = modes
    if a == b or not (0 <= a < MODES and 0 <= b < MODES):
        raise ValueError(f"invalid mode pair {modes}")
    out: dict[Occupation, Amplitude] = {}
    for occ, amp in state.amps.items():
        na, nb = occ[a], occ[b]
        # |n> = prod (c_k†)^{n_k} / sqrt(n_k!) |0>
        norm = _sqrt_int(_factorial(na) * _factorial(nb))
        # expand (x_a + i x_b)^na (i x_a + x_b)^nb / sqrt2^(na+nb)
        poly: dict[tuple[int, int], Amplitude] = {(0, 0): ONE}
        for factor in [(ONE, I)] * na + [(I, ONE)] * nb:
            nxt: dict[tuple[int, int], Amplitude] = {}
            for (ea, eb), c in poly.items():
                for (da, db), f in (((1, 0), factor[0]), ((0, 1), factor[1])):
                    key = (ea + da, eb + db)
                    nxt[key] = nxt.get(key, ZERO) + c * f * INV_ROOT2
            poly = nxt
        for (ea, eb), c in poly.items():
            if not c:
                continue
            new = list(occ)
            new[a], new[b] = ea, eb
            # monomial -> Fock: (c†)^e |0> = sqrt(e!) |e>
            coeff = amp * c * _sqrt_int(_factorial(ea) * _factorial(eb)) / norm
            key = tuple(new)
            out[key] = out.get(key, ZERO) + coeff
    return FockVector({k: v for k, v in out.items() if v})


def _rail_occupation(bits: tuple[int, int]) -> Occupation:
    occ = [0] * MODES
    occ[bits[0]] = 1
    occ[2 + bits[1]] = 1
    return tuple(occ)


def dual_rail(bits: tuple[int, int]) -> FockVector:
    """Computational basis state |b1 b2> in dual rail."""
    return FockVector.basis(_rail_occupation(bits))


def two_qubit_state(coeffs: Mapping[tuple[int, int], Amplitude]) -> FockVector:
    out = FockVector({})
    for bits, c in coeffs.items():
        out = out + dual_rail(bits).scale(c)
    return out


def bell_state(index: int) -> FockVector:
    """Phi+, Phi-, Psi+, Psi- for index 0..3."""
    sign = ONE if index % 2 == 0 else -ONE
    if index < 2:
        return two_qubit_state({(0, 0): INV_ROOT2, (1, 1): sign * INV_ROOT2})
    return two_qubit_state({(0, 1): INV_ROOT2, (1, 0): sign * INV_ROOT2})


def analyzer(state: FockVector) -> FockVector:
    return beam_splitter_pair(beam_splitter_pair(state, (0, 2)), (1, 3))


def two_photon_patterns() -> list[Occupation]:
    return sorted(
        (occ for occ in itertools.product(range(3), repeat=MODES) if sum(occ) == 2),
        reverse=True,
    )


# classification ----------------------------------------------------------------


@dataclass(frozen=True)
class Unambiguous:
    bell: int

    @property
    def name(self) -> str:
        return BELL_NAMES[self.bell]


@dataclass(frozen=True)
class Partial:
    zz: int
    z1: int
    z2: int


@dataclass(frozen=True)
class Unobserved:
    """Pattern with zero amplitude for every two-qubit input."""


OutcomeClass = Unambiguous | Partial | Unobserved


def _input_amplitudes(pattern: Occupation, inputs: list[FockVector]) -> list[Amplitude]:
    return [analyzer(s).amplitude(pattern) for s in inputs]


def classify_pattern(pattern: Iterable[int]) -> OutcomeClass:
    """Which Bell state a detector pattern identifies, or what it still reveals."""
    pattern = tuple(pattern)
    if len(pattern) != MODES or sum(pattern) != 2 or min(pattern) < 0:
        raise ValueError(f"need two photons in {MODES} modes, got {pattern}")
    bell = [i for i, a in enumerate(_input_amplitudes(pattern, [bell_state(i) for i in range(4)])) if a]
    if len(bell) == 1:
        return Unambiguous(bell[0])
    if not bell:
        return Unobserved()
    comp = [bits for bits in itertools.product((0, 1), repeat=2) if analyzer(dual_rail(bits)).amplitude(pattern)]
    if len(comp) != 1:
        raise ValueError(f"pattern {pattern} does not fix the computational input")
    b1, b2 = comp[0]
    z1, z2 = 1 - 2 * b1, 1 - 2 * b2
    return Partial(z1 * z2, z1, z2)


def pattern_probabilities(state: FockVector) -> dict[Occupation, Fraction]:
    """Detector statistics of the analyzer on a two-photon input."""
    out = analyzer(state)
    return {occ: out.amplitude(occ).abs2().rational() for occ in two_photon_patterns()}


def success_probability() -> Fraction:
    """Unambiguous probability on the uniform Bell mixture."""
    total = Fraction(0)
    for i in range(4):
        out = analyzer(bell_state(i))
        for occ, amp in out.amps.items():
            if isinstance(classify_pattern(occ), Unambiguous):
                total += amp.abs2().rational() / 4
    return total


def specificity_violations() -> list[tuple[Occupation, int]]:
    """(pattern, other Bell index) pairs that break perfect specificity."""
    bad = []
    for occ in two_photon_patterns():
        cls = classify_pattern(occ)
        if isinstance(cls, Unambiguous):
            for j in range(4):
                if j != cls.bell and analyzer(bell_state(j)).amplitude(occ):
                    bad.append((occ, j))
    return bad


# basis variants -------------------------------------------------------------------

Matrix = tuple[tuple[Amplitude, Amplitude], tuple[Amplitude, Amplitude]]

H_GATE: Matrix = ((INV_ROOT2, INV_ROOT2), (INV_ROOT2, -INV_ROOT2))
S_GATE: Matrix = ((ONE, ZERO), (ZERO, I))
PAULI_MATRICES: dict[str, Matrix] = {
    "I": ((ONE, ZERO), (ZERO, ONE)),
    "X": ((ZERO, ONE), (ONE, ZERO)),
    "Y": ((ZERO, -I), (I, ZERO)),
    "Z": ((ONE, ZERO), (ZERO, -ONE)),
}


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(a[r][0] * b[0][c] + a[r][1] * b[1][c] for c in range(2)) for r in range(2)
    )  # type: ignore[return-value]


def mat_dagger(a: Matrix) -> Matrix:
    return ((a[0][0].conj(), a[1][0].conj()), (a[0][1].conj(), a[1][1].conj()))


def _phase_key(m: Matrix) -> tuple:
    """Canonical representative up to a global phase."""
    flat = [m[0][0], m[0][1], m[1][0], m[1][1]]
    lead = next(x for x in flat if x)
    return tuple(x / lead for x in flat)


def single_qubit_cliffords() -> list[Matrix]:
    """The 24 single-qubit Cliffords modulo phase, by closure under H and S."""
    found = {_phase_key(PAULI_MATRICES["I"]): PAULI_MATRICES["I"]}
    frontier = [PAULI_MATRICES["I"]]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (H_GATE, S_GATE):
                p = mat_mul(g, m)
                k = _phase_key(p)
                if k not in found:
                    found[k] = p
                    nxt.append(p)
        frontier = nxt
    return list(found.values())


def apply_local(state: FockVector, u1: Matrix, u2: Matrix) -> FockVector:
    """(u1 ⊗ u2) on a dual-rail two-qubit state."""
    out = FockVector({})
    for bits in itertools.product((0, 1), repeat=2):
        amp = state.amplitude(_rail_occupation(bits))
        if not amp:
            continue
        for new in itertools.product((0, 1), repeat=2):
            c = u1[new[0]][bits[0]] * u2[new[1]][bits[1]] * amp
            if c:
                out = out + dual_rail(new).scale(c)
    return out


def _overlap(a: FockVector, b: FockVector) -> Amplitude:
    total = ZERO
    for k, v in a.amps.items():
        total = total + v.conj() * b.amplitude(k)
    return total


def bell_permutation(u1: Matrix, u2: Matrix) -> tuple[int, ...] | None:
    """Permutation p with (u1⊗u2)|Bell_i> ∝ |Bell_p[i]>, or None."""
    perm = []
    for i in range(4):
        img = apply_local(bell_state(i), u1, u2)
        hits = [j for j in range(4) if _overlap(bell_state(j), img)]
        if len(hits) != 1:
            return None
        perm.append(hits[0])
    return tuple(perm)


def _conjugate_pauli(u: Matrix, letter: str) -> tuple[str, int]:
    """u† P u as (letter, sign)."""
    m = mat_mul(mat_dagger(u), mat_mul(PAULI_MATRICES[letter], u))
    for name, p in PAULI_MATRICES.items():
        for sign in (1, -1):
            s = ONE if sign == 1 else -ONE
            if all(m[r][c] - s * p[r][c] == ZERO for r in range(2) for c in range(2)):
                return name, sign
    raise ValueError("not a Clifford conjugation")


@dataclass(frozen=True)
class BellAnalyzerVariant:
    """Standard analyzer preceded by local unitaries u1 ⊗ u2."""

    u1: Matrix
    u2: Matrix
    permutation: tuple[int, ...]

    @property
    def payload(self) -> str:
        """Two-qubit observable whose eigenvalue a partial outcome always gives."""
        a, _ = _conjugate_pauli(self.u1, "Z")
        b, _ = _conjugate_pauli(self.u2, "Z")
        if a != b:
            raise ValueError(f"mixed payload {a}{b}")
        return a + b

    def classify(self, pattern: Iterable[int]) -> OutcomeClass:
        """Outcome class in terms of the original Bell labels."""
        cls = classify_pattern(pattern)
        if isinstance(cls, Unambiguous):
            return Unambiguous(self.permutation.index(cls.bell))
        return cls


_CLIFFORDS: list[Matrix] | None = None
_VARIANTS: dict[tuple[int, ...], BellAnalyzerVariant] | None = None


def _variant_table() -> dict[tuple[int, ...], BellAnalyzerVariant]:
    global _CLIFFORDS, _VARIANTS
    if _VARIANTS is None:
        _CLIFFORDS = single_qubit_cliffords()
        table: dict[tuple[int, ...], BellAnalyzerVariant] = {}
        for u1 in _CLIFFORDS:
            for u2 in _CLIFFORDS:
                perm = bell_permutation(u1, u2)
                if perm is not None and perm not in table:
                    table[perm] = BellAnalyzerVariant(u1, u2, perm)
        _VARIANTS = table
    return _VARIANTS


def basis_variant(permutation: Iterable[int]) -> BellAnalyzerVariant:
    """Analyzer variant realizing a Bell-state permutation with local Cliffords."""
    perm = tuple(permutation)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{perm} is not a permutation of the four Bell states")
    table = _variant_table()
    if perm not in table:
        raise ValueError(f"permutation {perm} is not realizable with local Cliffords")
    return table[perm]


def variant_for_payload(payload: str) -> BellAnalyzerVariant:
    """Some variant whose guaranteed partial payload is XX, YY or ZZ."""
    for v in _variant_table().values():
        try:
            if v.payload == payload:
                return v
        except ValueError:
            continue
    raise ValueError(f"no variant with payload {payload}")


def compose(first: BellAnalyzerVariant, second: BellAnalyzerVariant) -> tuple[int, ...] | None:
    """Bell permutation of applying ``first`` then ``second``'s local unitaries."""
    return bell_permutation(mat_mul(second.u1, first.u1), mat_mul(second.u2, first.u2))


def output_table() -> list[tuple[str, FockVector]]:
    return [(BELL_NAMES[i], analyzer(bell_state(i))) for i in range(4)]
