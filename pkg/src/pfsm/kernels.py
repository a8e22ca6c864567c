"""Array-form scan kernel.

The machine is flattened into CSR transition tables and the active set
into packed int64 keys (state << 32 | tag), so the whole per-byte cycle
runs as integer array passes. The kernel is compiled with numba when it
is installed and the PFSM_NUMBA environment variable is not set to
0/false/off; otherwise the exact same function runs interpreted over
numpy arrays (slow, but identical output — see the benchmark harness for
the comparison).

Output is bit-identical to the reference Engine in pfsm.engine; the test
suite asserts this differentially.
"""

from __future__ import annotations

import os

import numpy as np

from .automaton import epsilon_closure
from .engine import ActiveSet, EngineStats, GenerationMismatchError, Match

_ENV = os.environ.get("PFSM_NUMBA", "").strip().lower()
_WANT_NUMBA = _ENV not in ("0", "false", "off", "no")

if _WANT_NUMBA:
    try:
        import numba
    except ImportError:
        numba = None
else:
    numba = None

NUMBA_ENABLED = numba is not None

_TAG_MASK = np.int64(0xFFFFFFFF)


def _msort(a):
    """Natural bottom-up merge sort (may reuse `a` as scratch).

    The per-cycle key arrays are concatenations of a few ascending runs,
    a pattern that drives the library quicksort quadratic; merging runs
    keeps every cycle O(k log k) worst case and O(k) in the common case.
    """
    n = a.shape[0]
    if n < 2:
        return a
    src = a
    dst = np.empty(n, np.int64)
    while True:
        i = 0
        out = 0
        runs = 0
        while i < n:
            j = i + 1
            while j < n and src[j - 1] <= src[j]:
                j += 1
            runs += 1
            if j == n:
                while i < n:
                    dst[out] = src[i]
                    out += 1
                    i += 1
                break
            k = j + 1
            while k < n and src[k - 1] <= src[k]:
                k += 1
            runs += 1
            p = i
            q = j
            while p < j and q < k:
                if src[p] <= src[q]:
                    dst[out] = src[p]
                    p += 1
                else:
                    dst[out] = src[q]
                    q += 1
                out += 1
            while p < j:
                dst[out] = src[p]
                out += 1
                p += 1
            while q < k:
                dst[out] = src[q]
                out += 1
                q += 1
            i = k
        tmp = src
        src = dst
        dst = tmp
        if runs <= 1:
            return src


def _sort_unique(a):
    """Ascending copy of `a` with duplicates dropped."""
    a = _msort(a)
    n = a.shape[0]
    if n == 0:
        return a
    out = np.empty(n, np.int64)
    m = 0
    for i in range(n):
        if i == 0 or a[i] != a[i - 1]:
            out[m] = a[i]
            m += 1
    return out[:m]


def _close_pairs(keys, eps_off, eps_tgt):
    """Sorted unique epsilon closure of packed (state, tag) keys."""
    if keys.shape[0] == 0:
        return keys
    result = _sort_unique(keys)
    frontier = result
    while frontier.shape[0] > 0:
        total = 0
        for k in frontier:
            s = k >> 32
            total += eps_off[s + 1] - eps_off[s]
        if total == 0:
            break
        new = np.empty(total, np.int64)
        w = 0
        for k in frontier:
            s = k >> 32
            t = k & _TAG_MASK
            for j in range(eps_off[s], eps_off[s + 1]):
                new[w] = (eps_tgt[j] << 32) | t
                w += 1
        new = _sort_unique(new)
        keep = np.empty(new.shape[0], np.bool_)
        n_keep = 0
        for i in range(new.shape[0]):
            p = np.searchsorted(result, new[i])
            fresh = p >= result.shape[0] or result[p] != new[i]
            keep[i] = fresh
            if fresh:
                n_keep += 1
        if n_keep == 0:
            break
        frontier = new[keep]
        merged = np.empty(result.shape[0] + frontier.shape[0], np.int64)
        p = 0
        q = 0
        w = 0
        while p < result.shape[0] and q < frontier.shape[0]:
            if result[p] <= frontier[q]:
                merged[w] = result[p]
                p += 1
            else:
                merged[w] = frontier[q]
                q += 1
            w += 1
        while p < result.shape[0]:
            merged[w] = result[p]
            p += 1
            w += 1
        while q < frontier.shape[0]:
            merged[w] = frontier[q]
            q += 1
            w += 1
        result = merged
    return result


def _scan(trans_off, trans_tgt, eps_off, eps_tgt, final_label, start_states,
          data, base, win_lo, win_hi, carry_keys, dedupe):
    """One worker pass. Window bounds are absolute positions; win_lo > win_hi
    means no reinitialization at all. Returns packed match keys
    ((start << 32) | label) with their end positions, the final active keys,
    per-cycle pair counts, and the number of cycles actually run."""
    cur = _close_pairs(carry_keys, eps_off, eps_tgt)

    n = data.shape[0]
    cycle_pairs = np.zeros(n, np.int64)
    m_cap = 16
    m_key = np.empty(m_cap, np.int64)
    m_end = np.empty(m_cap, np.int64)
    m_cnt = 0
    n_cycles = 0

    for i in range(n):
        pos = base + i
        if win_lo <= pos <= win_hi:
            # Steps 1+2: tag the start region with the current position.
            # (state, pos) pairs are new by construction: pos was never a
            # tag before this cycle.
            cur2 = np.empty(cur.shape[0] + start_states.shape[0], np.int64)
            cur2[:cur.shape[0]] = cur
            for j in range(start_states.shape[0]):
                cur2[cur.shape[0] + j] = (start_states[j] << 32) | np.int64(pos)
        else:
            cur2 = cur
        pairs_a = cur2.shape[0]

        # Steps 3+4: traverse transitions on the current byte, then close.
        b = np.int64(data[i])
        total = 0
        for k in cur2:
            idx = (k >> 32) * 256 + b
            total += trans_off[idx + 1] - trans_off[idx]
        nxt = np.empty(total, np.int64)
        w = 0
        for k in cur2:
            s = k >> 32
            t = k & _TAG_MASK
            idx = s * 256 + b
            for j in range(trans_off[idx], trans_off[idx + 1]):
                nxt[w] = (trans_tgt[j] << 32) | t
                w += 1
        nxt = _close_pairs(nxt, eps_off, eps_tgt)

        # Match detection: finals in the closed step-4 set end here.
        f_cnt = 0
        for k in nxt:
            if final_label[k >> 32] >= 0:
                f_cnt += 1
        if f_cnt > 0:
            mkeys = np.empty(f_cnt, np.int64)
            w = 0
            for k in nxt:
                lab = final_label[k >> 32]
                if lab >= 0:
                    mkeys[w] = ((k & _TAG_MASK) << 32) | np.int64(lab)
                    w += 1
            mkeys = _msort(mkeys)
            prev = np.int64(-1)
            for mk in mkeys:
                if dedupe and mk == prev:
                    continue
                prev = mk
                if m_cnt == m_cap:
                    m_cap *= 2
                    nk = np.empty(m_cap, np.int64)
                    nk[:m_cnt] = m_key
                    ne = np.empty(m_cap, np.int64)
                    ne[:m_cnt] = m_end
                    m_key = nk
                    m_end = ne
                m_key[m_cnt] = mk
                m_end[m_cnt] = pos
                m_cnt += 1

        cycle_pairs[i] = max(pairs_a, nxt.shape[0])
        cur = nxt
        n_cycles = i + 1
        if cur.shape[0] == 0 and pos >= win_hi:
            break

    return (m_key[:m_cnt], m_end[:m_cnt], cur, cycle_pairs, n_cycles)


if NUMBA_ENABLED:
    _msort = numba.njit(cache=True, nogil=True)(_msort)
    _sort_unique = numba.njit(cache=True, nogil=True)(_sort_unique)
    _close_pairs = numba.njit(cache=True, nogil=True)(_close_pairs)
    _scan = numba.njit(cache=True, nogil=True)(_scan)


class CompiledPfsm:
    """CSR flattening of one machine generation."""

    def __init__(self, pfsm):
        a = pfsm.automaton
        order = sorted(a.states)
        self.generation = pfsm.generation
        self.orig_of = np.asarray(order, np.int64)
        self.dense_of = {s: i for i, s in enumerate(order)}
        n = len(order)

        trans_off = np.zeros(n * 256 + 1, np.int64)
        eps_off = np.zeros(n + 1, np.int64)
        for s in order:
            d = self.dense_of[s]
            for byte, succ in a.byte_transitions.get(s, {}).items():
                trans_off[d * 256 + byte + 1] = len(succ)
            eps_off[d + 1] = len(a.epsilon_transitions.get(s, ()))
        np.cumsum(trans_off, out=trans_off)
        np.cumsum(eps_off, out=eps_off)

        trans_tgt = np.empty(trans_off[-1], np.int64)
        eps_tgt = np.empty(eps_off[-1], np.int64)
        for s in order:
            d = self.dense_of[s]
            for byte, succ in a.byte_transitions.get(s, {}).items():
                lo = trans_off[d * 256 + byte]
                trans_tgt[lo:lo + len(succ)] = sorted(self.dense_of[t] for t in succ)
            eps = a.epsilon_transitions.get(s, ())
            if eps:
                lo = eps_off[d]
                eps_tgt[lo:lo + len(eps)] = sorted(self.dense_of[t] for t in eps)

        final_label = np.full(n, -1, np.int64)
        for f, lab in a.final_labels.items():
            final_label[self.dense_of[f]] = lab

        self.trans_off = trans_off
        self.trans_tgt = trans_tgt
        self.eps_off = eps_off
        self.eps_tgt = eps_tgt
        self.final_label = final_label
        self.start_states = np.asarray(
            sorted(self.dense_of[s] for s in epsilon_closure(a, {a.initial})),
            np.int64)


def get_compiled(pfsm) -> CompiledPfsm:
    cached = getattr(pfsm, "_compiled", None)
    if cached is None or cached.generation != pfsm.generation:
        cached = CompiledPfsm(pfsm)
        pfsm._compiled = cached
    return cached


def run_segment_kernel(pfsm, data: bytes, window, carry_in, sink=None, *,
                       base: int = 0,
                       dedupe: bool = True) -> tuple[EngineStats, ActiveSet]:
    """Kernel-backed equivalent of engine.run_segment (same contract)."""
    comp = get_compiled(pfsm)

    if carry_in is not None:
        if carry_in.generation != pfsm.generation:
            raise GenerationMismatchError(
                f"active set is generation {carry_in.generation}, "
                f"machine is generation {pfsm.generation}")
        keys = []
        for s, tags in carry_in.tags.items():
            d = comp.dense_of.get(s)
            if d is None:
                raise GenerationMismatchError(f"active state {s} not in machine")
            if not tags:
                raise ValueError(f"active state {s} carries no tags")
            keys.extend((d << 32) | t for t in tags)
        carry_keys = np.asarray(keys, np.int64)
    else:
        carry_keys = np.empty(0, np.int64)

    if window is None:
        win_lo, win_hi = 0, -1
    else:
        win_lo, win_hi = window

    buf = np.frombuffer(bytes(data), np.uint8)
    m_key, m_end, out_keys, cycle_pairs, n_cycles = _scan(
        comp.trans_off, comp.trans_tgt, comp.eps_off, comp.eps_tgt,
        comp.final_label, comp.start_states, buf, base, win_lo, win_hi,
        carry_keys, dedupe)

    if sink is not None:
        for i in range(m_key.shape[0]):
            mk = int(m_key[i])
            sink(Match(mk & 0xFFFFFFFF, mk >> 32, int(m_end[i])))

    n_states = [e.n_states for e in pfsm.directory.values()]
    stats = EngineStats(n=int(n_cycles), r=len(pfsm.directory),
                        m_max=max(n_states, default=0),
                        per_cycle_pairs=[int(c) for c in cycle_pairs[:n_cycles]],
                        matches_emitted=int(m_key.shape[0]))

    tags: dict[int, set[int]] = {}
    for k in out_keys:
        k = int(k)
        tags.setdefault(int(comp.orig_of[k >> 32]), set()).add(k & 0xFFFFFFFF)
    return stats, ActiveSet(pfsm.generation, tags)
