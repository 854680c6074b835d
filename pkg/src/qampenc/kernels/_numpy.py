"""Pure-numpy implementations; same signatures as the numba kernels."""
import math

import numpy as np

from ._codes import K_H, K_PHASE, K_RY, K_SWAP, K_X, K_Z

_IDX_CACHE = {}


def _indices(nq):
    idx = _IDX_CACHE.get(nq)
    if idx is None:
        _IDX_CACHE.clear()
        idx = _IDX_CACHE[nq] = np.arange(1 << nq, dtype=np.int64)
    return idx


def _mask_of(ptr, idx, g):
    m = 0
    for p in range(ptr[g], ptr[g + 1]):
        m |= 1 << int(idx[p])
    return m


def dense_run(state, nq, kinds, conds, angles, tptr, tidx, cptr, cidx, start, stop):
    idx = _indices(nq)
    for g in range(start, stop):
        if conds[g] == 0:
            continue
        cmask = _mask_of(cptr, cidx, g)
        k = kinds[g]
        tb = 1 << int(tidx[tptr[g]])
        ctl = (idx & cmask) == cmask if cmask else None
        if k == K_X or k == K_SWAP:
            if k == K_X:
                flip = _mask_of(tptr, tidx, g)
                sel = (idx & tb) == 0
            else:
                flip = tb | (1 << int(tidx[tptr[g] + 1]))
                sel = (idx & flip) == tb
            if ctl is not None:
                sel &= ctl
            i = idx[sel]
            j = i ^ flip
            tmp = state[i]
            state[i] = state[j]
            state[j] = tmp
        elif k == K_H or k == K_RY:
            if k == K_H:
                s = 1.0 / math.sqrt(2.0)
                m00, m01, m10, m11 = s, s, s, -s
            else:
                c, s = math.cos(angles[g] / 2.0), math.sin(angles[g] / 2.0)
                m00, m01, m10, m11 = c, -s, s, c
            sel = (idx & tb) == 0
            if ctl is not None:
                sel &= ctl
            i0 = idx[sel]
            i1 = i0 | tb
            a = state[i0]
            b = state[i1]
            state[i0] = m00 * a + m01 * b
            state[i1] = m10 * a + m11 * b
        else:
            f = -1.0 if k == K_Z else complex(math.cos(angles[g]), math.sin(angles[g]))
            mask = cmask | tb
            state[(idx & mask) == mask] *= f


def _unpack(words, n):
    return np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:n].astype(bool)


def branch_run(rows, a0, a1, valid, flag_q, kinds, conds, angles, tptr, tidx, cptr, cidx, start, stop):
    n = a0.shape[0]
    for g in range(start, stop):
        if conds[g] == 0:
            continue
        buf = valid.copy()
        for p in range(cptr[g], cptr[g + 1]):
            c = cidx[p]
            if c == flag_q:
                return g
            buf &= rows[c]
        k = kinds[g]
        if k == K_X:
            for p in range(tptr[g], tptr[g + 1]):
                t = tidx[p]
                if t == flag_q:
                    sel = _unpack(buf, n)
                    a0[sel], a1[sel] = a1[sel], a0[sel].copy()
                else:
                    rows[t] ^= buf
            continue
        t = tidx[tptr[g]]
        if k == K_SWAP:
            u = tidx[tptr[g] + 1]
            if t == flag_q or u == flag_q:
                return g
            diff = (rows[t] ^ rows[u]) & buf
            rows[t] ^= diff
            rows[u] ^= diff
            continue
        if t != flag_q:
            if k == K_Z or k == K_PHASE:
                f = -1.0 if k == K_Z else complex(math.cos(angles[g]), math.sin(angles[g]))
                sel = _unpack(buf & rows[t], n)
                a0[sel] *= f
                a1[sel] *= f
                continue
            return g
        sel = _unpack(buf, n)
        if k == K_RY or k == K_H:
            if k == K_RY:
                c, s = math.cos(angles[g] / 2.0), math.sin(angles[g] / 2.0)
                m00, m01, m10, m11 = c, -s, s, c
            else:
                s = 1.0 / math.sqrt(2.0)
                m00, m01, m10, m11 = s, s, s, -s
            x = a0[sel]
            y = a1[sel]
            a0[sel] = m00 * x + m01 * y
            a1[sel] = m10 * x + m11 * y
        else:
            a1[sel] *= -1.0 if k == K_Z else complex(math.cos(angles[g]), math.sin(angles[g]))
    return -1


def greedy_depth(nq, conds, tptr, tidx, cptr, cidx):
    last = np.zeros(nq, dtype=np.int64)
    depth = 0
    for g in range(conds.shape[0]):
        if conds[g] == 0:
            continue
        qs = np.concatenate((tidx[tptr[g]:tptr[g + 1]], cidx[cptr[g]:cptr[g + 1]]))
        lv = int(last[qs].max()) + 1
        last[qs] = lv
        depth = max(depth, lv)
    return depth


def max_share(x):
    sq = x * x
    return sq.max(axis=1) / sq.sum(axis=1)


def sector_stats(img, rstarts, cstarts):
    a = np.abs(img)
    rs, cs = rstarts[:-1], cstarts[:-1]
    ss = np.add.reduceat(np.add.reduceat(a * a, rs, axis=0), cs, axis=1)
    mx = np.maximum.reduceat(np.maximum.reduceat(a, rs, axis=0), cs, axis=1)
    return ss, mx
