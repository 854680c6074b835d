"""numba implementations of the hot loops."""
import math

import numpy as np
from numba import njit, prange

from ._codes import K_H, K_PHASE, K_RY, K_SWAP, K_X, K_Z


@njit(cache=True)
def _mask_of(ptr, idx, g):
    m = 0
    for p in range(ptr[g], ptr[g + 1]):
        m |= np.int64(1) << idx[p]
    return m


@njit(cache=True, parallel=True)
def _perm_x(state, dim, cmask, tmask, lowbit):
    for i in prange(dim):
        if (i & cmask) == cmask and (i & lowbit) == 0:
            j = i ^ tmask
            t = state[i]
            state[i] = state[j]
            state[j] = t


@njit(cache=True, parallel=True)
def _one_qubit(state, dim, cmask, tb, m00, m01, m10, m11):
    for i in prange(dim):
        if (i & cmask) == cmask and (i & tb) == 0:
            a = state[i]
            b = state[i | tb]
            state[i] = m00 * a + m01 * b
            state[i | tb] = m10 * a + m11 * b


@njit(cache=True, parallel=True)
def _diag(state, dim, mask, factor):
    for i in prange(dim):
        if (i & mask) == mask:
            state[i] *= factor


@njit(cache=True, parallel=True)
def _swap(state, dim, cmask, ab, abit):
    for i in prange(dim):
        if (i & cmask) == cmask and (i & ab) == abit:
            j = i ^ ab
            t = state[i]
            state[i] = state[j]
            state[j] = t


@njit(cache=True)
def dense_run(state, nq, kinds, conds, angles, tptr, tidx, cptr, cidx, start, stop):
    dim = np.int64(1) << nq
    for g in range(start, stop):
        if conds[g] == 0:
            continue
        cmask = _mask_of(cptr, cidx, g)
        k = kinds[g]
        t0 = tidx[tptr[g]]
        tb = np.int64(1) << t0
        if k == K_X:
            _perm_x(state, dim, cmask, _mask_of(tptr, tidx, g), tb)
        elif k == K_H:
            s = 1.0 / math.sqrt(2.0)
            _one_qubit(state, dim, cmask, tb, complex(s), complex(s), complex(s), complex(-s))
        elif k == K_RY:
            c = math.cos(angles[g] / 2.0)
            s = math.sin(angles[g] / 2.0)
            _one_qubit(state, dim, cmask, tb, complex(c), complex(-s), complex(s), complex(c))
        elif k == K_PHASE:
            _diag(state, dim, cmask | tb, complex(math.cos(angles[g]), math.sin(angles[g])))
        elif k == K_Z:
            _diag(state, dim, cmask | tb, complex(-1.0))
        elif k == K_SWAP:
            t1 = tidx[tptr[g] + 1]
            _swap(state, dim, cmask, tb | (np.int64(1) << t1), tb)


@njit(cache=True)
def branch_run(rows, a0, a1, valid, flag_q, kinds, conds, angles, tptr, tidx, cptr, cidx, start, stop):
    """Execute gates on the bit-sliced branch state.

    ``rows[q, w]`` holds qubit ``q`` for branches ``64*w .. 64*w+63``; the FLAG
    qubit lives in the complex pairs ``(a0, a1)`` instead of ``rows``.
    Returns the index of the first rejected gate, or -1.
    """
    nw = rows.shape[1]
    buf = np.empty(nw, dtype=np.uint64)
    for g in range(start, stop):
        if conds[g] == 0:
            continue
        for w in range(nw):
            buf[w] = valid[w]
        for p in range(cptr[g], cptr[g + 1]):
            c = cidx[p]
            if c == flag_q:
                return g
            for w in range(nw):
                buf[w] &= rows[c, w]
        k = kinds[g]
        if k == K_X:
            for p in range(tptr[g], tptr[g + 1]):
                t = tidx[p]
                if t == flag_q:
                    for w in range(nw):
                        word = buf[w]
                        for b in range(64):
                            if (word >> np.uint64(b)) & np.uint64(1):
                                i = w * 64 + b
                                tmp = a0[i]
                                a0[i] = a1[i]
                                a1[i] = tmp
                else:
                    for w in range(nw):
                        rows[t, w] ^= buf[w]
            continue
        t = tidx[tptr[g]]
        if k == K_SWAP:
            u = tidx[tptr[g] + 1]
            if t == flag_q or u == flag_q:
                return g
            for w in range(nw):
                diff = (rows[t, w] ^ rows[u, w]) & buf[w]
                rows[t, w] ^= diff
                rows[u, w] ^= diff
            continue
        if t != flag_q:
            if k == K_Z or k == K_PHASE:
                if k == K_Z:
                    f = complex(-1.0)
                else:
                    f = complex(math.cos(angles[g]), math.sin(angles[g]))
                for w in range(nw):
                    word = buf[w] & rows[t, w]
                    for b in range(64):
                        if (word >> np.uint64(b)) & np.uint64(1):
                            i = w * 64 + b
                            a0[i] *= f
                            a1[i] *= f
                continue
            return g
        if k == K_RY:
            c = math.cos(angles[g] / 2.0)
            s = math.sin(angles[g] / 2.0)
            m00, m01, m10, m11 = c, -s, s, c
        elif k == K_H:
            s = 1.0 / math.sqrt(2.0)
            m00, m01, m10, m11 = s, s, s, -s
        else:
            m00, m01, m10, m11 = 1.0, 0.0, 0.0, 1.0
        if k == K_PHASE:
            f = complex(math.cos(angles[g]), math.sin(angles[g]))
        elif k == K_Z:
            f = complex(-1.0)
        else:
            f = complex(1.0)
        for w in range(nw):
            word = buf[w]
            if word == 0:
                continue
            for b in range(64):
                if (word >> np.uint64(b)) & np.uint64(1):
                    i = w * 64 + b
                    if k == K_RY or k == K_H:
                        x = a0[i]
                        y = a1[i]
                        a0[i] = m00 * x + m01 * y
                        a1[i] = m10 * x + m11 * y
                    else:
                        a1[i] *= f
    return -1


@njit(cache=True)
def greedy_depth(nq, conds, tptr, tidx, cptr, cidx):
    last = np.zeros(nq, dtype=np.int64)
    depth = 0
    for g in range(conds.shape[0]):
        if conds[g] == 0:
            continue
        lv = 0
        for p in range(tptr[g], tptr[g + 1]):
            lv = max(lv, last[tidx[p]])
        for p in range(cptr[g], cptr[g + 1]):
            lv = max(lv, last[cidx[p]])
        lv += 1
        for p in range(tptr[g], tptr[g + 1]):
            last[tidx[p]] = lv
        for p in range(cptr[g], cptr[g + 1]):
            last[cidx[p]] = lv
        if lv > depth:
            depth = lv
    return depth


@njit(cache=True, parallel=True)
def max_share(x):
    """Per-row max_i x_i^2 / sum_i x_i^2."""
    out = np.empty(x.shape[0])
    for r in prange(x.shape[0]):
        mx = 0.0
        tot = 0.0
        for i in range(x.shape[1]):
            v = x[r, i] * x[r, i]
            tot += v
            if v > mx:
                mx = v
        out[r] = mx / tot
    return out


@njit(cache=True)
def sector_stats(img, rstarts, cstarts):
    """Return (sum of squares, max |pixel|) for each sector of the grid."""
    nr = rstarts.shape[0] - 1
    nc = cstarts.shape[0] - 1
    ss = np.zeros((nr, nc))
    mx = np.zeros((nr, nc))
    for a in range(nr):
        for b in range(nc):
            s = 0.0
            m = 0.0
            for i in range(rstarts[a], rstarts[a + 1]):
                for j in range(cstarts[b], cstarts[b + 1]):
                    v = abs(img[i, j])
                    s += v * v
                    if v > m:
                        m = v
            ss[a, b] = s
            mx[a, b] = m
    return ss, mx
