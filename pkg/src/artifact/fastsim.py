"""Compiled two-code trial kernel for Monte-Carlo runs.

Mirrors the reference path of ``engine._drive`` with concrete signs instead
of symbolic ones: same survivor rule, same forbidden and uniformity flags,
same information-view inference.  Determined outcomes are read off a
destabilizer table instead of a fresh span decomposition.

Both copies together must fit one 64-bit word (2n <= 64), so an operator
is a pair of words and a set of generator rows is one word as well.
Phases are exponents of ``i`` modulo 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .paulis import PauliOperator
from .schemes import Scheme, StaticScheme

MAX_QUBITS = 64

_ZERO = np.uint64(0)
_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1, _S2, _S4, _S56 = np.uint64(1), np.uint64(2), np.uint64(4), np.uint64(56)

LETTER_CODE = {"X": 1, "Z": 2, "Y": 3}

# flag slots
F_FORBIDDEN, F_VIOLATION, F_NONUNIFORM = 0, 1, 2


@njit(cache=True)
def _popcount(v):
    v = v - ((v >> _S1) & _M1)
    v = (v & _M2) + ((v >> _S2) & _M2)
    v = (v + (v >> _S4)) & _M4
    return np.int64((v * _H01) >> _S56)


@njit(cache=True)
def _lowest(v):
    """Index of the lowest set bit of a nonzero word."""
    return _popcount((v & (~v + _ONE)) - _ONE)


@njit(cache=True)
def _site_op(n, q, letter, which):
    """Letter on qubit q of copy 1 (which=0), copy 2 (1) or both (2)."""
    x = _ZERO
    z = _ZERO
    for c in range(2):
        if which == 2 or which == c:
            bit = _ONE << np.uint64(q + c * n)
            if letter & 1:
                x |= bit
            if letter & 2:
                z |= bit
    return x, z


@njit(cache=True)
def _anti_mask(xs, zs, G, ox, oz):
    """Rows anticommuting with (ox, oz), as a bit mask over row indices."""
    m = _ZERO
    for k in range(G):
        v = np.uint64(_popcount((xs[k] & oz) ^ (zs[k] & ox)) & 1)
        m |= v << np.uint64(k)
    return m


@njit(cache=True)
def _mul_phase(ax, az, bx, bz):
    """Exponent of i picked up by the letter product a·b."""
    a_x = ax & ~az
    a_y = ax & az
    a_z = az & ~ax
    b_x = bx & ~bz
    b_y = bx & bz
    b_z = bz & ~bx
    plus = _popcount((a_x & b_y) | (a_y & b_z) | (a_z & b_x))
    minus = _popcount((a_y & b_x) | (a_z & b_y) | (a_x & b_z))
    return (plus - minus) % 4


@njit(cache=True)
def _classify(gx, gz, lmask, dx, dz, G, ox, oz):
    """0 anticommuting, 1 forbidden, 2 determined, 3 determined and revealing."""
    hits = _anti_mask(gx, gz, G, ox, oz)
    if hits & ~lmask:
        return 0
    if hits:
        return 1
    if _anti_mask(dx, dz, G, ox, oz) & lmask:
        return 3
    return 2


@njit(cache=True)
def _measure(st, ox, oz, allow, bits, bi, flags):
    """Measure (ox, oz); returns the outcome bit and the next random index."""
    gx, gz, gph, dx, dz, lmask, G = st
    hits = _anti_mask(gx, gz, G, ox, oz)
    if hits == 0:
        sel = _anti_mask(dx, dz, G, ox, oz)
        ax = _ZERO
        az = _ZERO
        ph = 0
        while sel:
            i = _lowest(sel)
            sel &= sel - _ONE
            ph = (ph + gph[i] + _mul_phase(ax, az, gx[i], gz[i])) % 4
            ax ^= gx[i]
            az ^= gz[i]
        return (1 if ph == 2 else 0), bi
    plain = hits & ~lmask[0]
    if plain:
        p = _lowest(plain)
    else:
        flags[F_FORBIDDEN] += 1
        if not allow:
            flags[F_VIOLATION] += 1
        p = _lowest(hits)
    out = bits[bi]
    px, pz, pph = gx[p], gz[p], gph[p]
    rest = hits & ~(_ONE << np.uint64(p))
    while rest:
        k = _lowest(rest)
        rest &= rest - _ONE
        gph[k] = (gph[k] + pph + _mul_phase(gx[k], gz[k], px, pz)) % 4
        gx[k] ^= px
        gz[k] ^= pz
    # destabilizers take the old survivor before it is replaced
    sel = _anti_mask(dx, dz, G, ox, oz) & ~(_ONE << np.uint64(p))
    while sel:
        i = _lowest(sel)
        sel &= sel - _ONE
        dx[i] ^= px
        dz[i] ^= pz
    dx[p] = px
    dz[p] = pz
    gx[p] = ox
    gz[p] = oz
    gph[p] = 2 * out
    lmask[0] &= ~(_ONE << np.uint64(p))
    return out, bi + 1


@njit(cache=True)
def _infer(ix, iz, iph, iout, K, tx, tz, tph, signs, bx, bz, bc, piv):
    """Sign bits of the targets from the items, -1 where a target is not in their span.

    Items are inserted in index order; an item joins the basis iff it is
    independent of the earlier ones, so the selected factors do not depend
    on the elimination details.  Rows are kept in lowest-bit echelon form
    over the 128-bit vector (x word, then z word).
    """
    Kw = bc.shape[1]
    vc = np.zeros(Kw, np.uint64)
    piv[:] = -1
    rank = 0
    for t in range(K + tx.shape[0]):
        if t < K:
            vx, vz = ix[t], iz[t]
        else:
            vx, vz = tx[t - K], tz[t - K]
        vc[:] = 0
        if t < K:
            vc[t >> 6] = _ONE << np.uint64(t & 63)
        low = -1
        while True:
            if vx:
                low = _lowest(vx)
            elif vz:
                low = 64 + _lowest(vz)
            else:
                low = -1
                break
            r = piv[low]
            if r < 0:
                break
            vx ^= bx[r]
            vz ^= bz[r]
            for w in range(Kw):
                vc[w] ^= bc[r, w]
        if t < K:
            if low >= 0:
                bx[rank] = vx
                bz[rank] = vz
                bc[rank] = vc
                piv[low] = rank
                rank += 1
            continue
        if low >= 0:
            signs[t - K] = -1
            continue
        # multiply the selected items in index order
        ax = _ZERO
        az = _ZERO
        ph = 0
        out = 0
        for j in range(K):
            if (vc[j >> 6] >> np.uint64(j & 63)) & _ONE:
                ph = (ph + iph[j] + _mul_phase(ax, az, ix[j], iz[j])) % 4
                ax ^= ix[j]
                az ^= iz[j]
                out ^= iout[j]
        signs[t - K] = out ^ (1 if (tph[t - K] - ph) % 4 == 2 else 0)


@njit(cache=True)
def run_trials(
    n, tgx, tgz, tgph, tdx, tdz, tlmask, lx_row, lz_row,
    cgx, cgz, cgph, tx, tz, tph,
    pre_q, pre_l, order, bases, adaptive, completion,
    patterns, lbits, obits,
):
    """Run one concrete trial per row of ``patterns``.

    Returns per-trial arrays: success, logical error, forbidden count,
    disallowed-forbidden count, non-uniform attempt count.
    """
    B = patterns.shape[0]
    G = tgx.shape[0]
    A = order.shape[0]
    K0 = cgx.shape[0]
    Kmax = obits.shape[1] + K0
    Kw = (Kmax + 63) // 64
    success = np.zeros(B, np.uint8)
    error = np.zeros(B, np.uint8)
    forb = np.zeros(B, np.int64)
    viol = np.zeros(B, np.int64)
    nonu = np.zeros(B, np.int64)
    gx = np.empty_like(tgx)
    gz = np.empty_like(tgz)
    gph = np.empty_like(tgph)
    dx = np.empty_like(tdx)
    dz = np.empty_like(tdz)
    lmask = np.zeros(1, np.uint64)
    ix = np.zeros(Kmax, np.uint64)
    iz = np.zeros(Kmax, np.uint64)
    iph = np.zeros(Kmax, np.int64)
    iout = np.zeros(Kmax, np.int64)
    bx = np.zeros(Kmax, np.uint64)
    bz = np.zeros(Kmax, np.uint64)
    bc = np.zeros((Kmax, Kw), np.uint64)
    piv = np.zeros(128, np.int64)
    signs = np.zeros(2, np.int64)
    flags = np.zeros(3, np.int64)
    st = (gx, gz, gph, dx, dz, lmask, G)
    for t in range(B):
        gx[:] = tgx
        gz[:] = tgz
        gph[:] = tgph
        dx[:] = tdx
        dz[:] = tdz
        lmask[0] = tlmask
        l_x, l_z = lbits[t, 0], lbits[t, 1]
        gph[lx_row] = (gph[lx_row] + 2 * l_x) % 4
        gph[lz_row] = (gph[lz_row] + 2 * l_z) % 4
        flags[:] = 0
        bits = obits[t]
        bi = 0
        nrec = 0
        # program: pre-steps, then attempts with fallbacks or completions
        for s in range(pre_q.shape[0]):
            for c in range(2):
                ox, oz = _site_op(n, pre_q[s], pre_l[s], c)
                out, bi = _measure(st, ox, oz, False, bits, bi, flags)
                ix[nrec], iz[nrec], iout[nrec] = ox, oz, out
                nrec += 1
        for p in range(A):
            q = order[p]
            for letter in (1, 3, 2):
                ox, oz = _site_op(n, q, letter, 2)
                c = _classify(gx, gz, lmask[0], dx, dz, G, ox, oz)
                if c == 1 or c == 2:
                    flags[F_NONUNIFORM] += 1
                    break
            if patterns[t, p]:
                for letter in (1, 2):
                    ox, oz = _site_op(n, q, letter, 2)
                    out, bi = _measure(st, ox, oz, False, bits, bi, flags)
                    ix[nrec], iz[nrec], iout[nrec] = ox, oz, out
                    nrec += 1
                if adaptive:
                    for u in range(p + 1, A):
                        for c in range(2):
                            ox, oz = _site_op(n, order[u], completion[p, u], c)
                            out, bi = _measure(st, ox, oz, False, bits, bi, flags)
                            ix[nrec], iz[nrec], iout[nrec] = ox, oz, out
                            nrec += 1
                    break
            else:
                for c in range(2):
                    ox, oz = _site_op(n, q, bases[p], c)
                    out, bi = _measure(st, ox, oz, p == A - 1, bits, bi, flags)
                    ix[nrec], iz[nrec], iout[nrec] = ox, oz, out
                    nrec += 1
        # items: records (phase 0), then both codes' generators
        for j in range(nrec):
            iph[j] = 0
        for j in range(K0):
            ix[nrec + j] = cgx[j]
            iz[nrec + j] = cgz[j]
            iph[nrec + j] = cgph[j]
            iout[nrec + j] = 0
        _infer(ix, iz, iph, iout, nrec + K0, tx, tz, tph, signs, bx, bz, bc, piv)
        if signs[0] >= 0 and signs[1] >= 0:
            success[t] = 1
            if signs[0] != l_x or signs[1] != l_z:
                error[t] = 1
        forb[t] = flags[F_FORBIDDEN]
        viol[t] = flags[F_VIOLATION]
        nonu[t] = flags[F_NONUNIFORM]
    return success, error, forb, viol, nonu


# host side -------------------------------------------------------------------


def _pack(ops: list[PauliOperator], nq: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = np.zeros(len(ops), np.uint64)
    zs = np.zeros(len(ops), np.uint64)
    ph = np.zeros(len(ops), np.int64)
    for r, op in enumerate(ops):
        if op.n != nq:
            raise ValueError(f"operator on {op.n} qubits, expected {nq}")
        xs[r], zs[r], ph[r] = op.x, op.z, op.phase_exp
    return xs, zs, ph


def dual_rows(ops: list[PauliOperator], nq: int) -> list[PauliOperator]:
    """Operators d_i with d_i anticommuting g_j exactly when i = j."""
    # <d, g> = d . swap(g), so solve D · swap(G)^T = I over GF(2)
    k = len(ops)
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, reduced row, tag of source rows)
    for i, op in enumerate(ops):
        v, tag = op.z | (op.x << nq), 1 << i
        for b, pv, pt in pivots:
            if (v >> b) & 1:
                v ^= pv
                tag ^= pt
        if v == 0:
            raise ValueError("generators are not independent")
        b = v.bit_length() - 1
        pivots = [(pb, pv ^ v, pt ^ tag) if (pv >> b) & 1 else (pb, pv, pt) for pb, pv, pt in pivots]
        pivots.append((b, v, tag))
    # the reduced rows have one pivot bit each, so d . row_j is d's bit at that pivot;
    # asking d . row_j = [i in tag_j] gives d . swap(g_m) = [m = i]
    out = []
    for i in range(k):
        d = 0
        for b, _, pt in pivots:
            if (pt >> i) & 1:
                d |= 1 << b
        out.append(PauliOperator(nq, d & ((1 << nq) - 1), d >> nq))
    return out


@dataclass
class CompiledScheme:
    """Templates and program arrays for :func:`run_trials`."""

    args: tuple
    max_random: int
    strict: bool

    def run(self, patterns: np.ndarray, lbits: np.ndarray, obits: np.ndarray):
        return run_trials(*self.args, patterns, lbits, obits)


def supports(scheme: Scheme | StaticScheme) -> bool:
    return 2 * scheme.code.n <= MAX_QUBITS


def compile_scheme(scheme: Scheme | StaticScheme, strict: bool | None = None) -> CompiledScheme:
    from .stabilizer import Origin, init_encoded_bell, logical_targets

    if not supports(scheme):
        raise ValueError(f"the trial kernel handles at most {MAX_QUBITS // 2} qubits per code")
    code = scheme.code
    n = code.n
    nq = 2 * n
    state = init_encoded_bell(code, code, 1, 1)
    gens = [g.op.with_sign(-1 if g.mask else 1) for g in state.generators]
    tgx, tgz, tgph = _pack(gens, nq)
    tdx, tdz, _ = _pack(dual_rows(gens, nq), nq)
    origins = [g.origin for g in state.generators]
    lmask = sum(1 << k for k, o in enumerate(origins) if o.is_logical)
    lx_row = origins.index(Origin.LOGICAL_X)
    lz_row = origins.index(Origin.LOGICAL_Z)
    id1 = PauliOperator.identity(n)
    items = [g.tensor(id1) for g in code.generators] + [id1.tensor(g) for g in code.generators]
    cgx, cgz, cgph = _pack(items, nq)
    targets = logical_targets(code, code)
    tx, tz, tph = _pack([targets["x"], targets["z"]], nq)
    pre_q = np.array([q for q, _ in scheme.pre_steps], np.int64)
    pre_l = np.array([LETTER_CODE[b] for _, b in scheme.pre_steps], np.int64)
    order = np.array(scheme.order, np.int64)
    bases = np.array([LETTER_CODE[b] for b in scheme.bases], np.int64)
    adaptive = isinstance(scheme, Scheme)
    A = len(scheme.order)
    completion = np.zeros((A, A), np.int64)
    if adaptive:
        view = scheme.single_code()
        for p in range(A):
            for u, letter in enumerate(view.completion_bases(p), start=p + 1):
                completion[p, u] = LETTER_CODE[letter]
    # every measurement is recorded, at most two per pre-step and per position
    max_random = 2 * (len(scheme.pre_steps) + A)
    args = (
        n, tgx, tgz, tgph, tdx, tdz, np.uint64(lmask), lx_row, lz_row,
        cgx, cgz, cgph, tx, tz, tph,
        pre_q, pre_l, order, bases, adaptive, completion,
    )
    return CompiledScheme(args, max_random, adaptive if strict is None else strict)
