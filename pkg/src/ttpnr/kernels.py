"""Compiled hot paths: bounds, firing and the whole A* loop on flat arrays.

Status vectors use the same encoding as :class:`ttpnr.state.TimedState`
(-1 unstarted, 0 done, residual > 0 executing). With numba disabled the same
functions run as plain Python; :func:`h_cp_numpy` / :func:`h_res_numpy` are
the vectorised numpy twins of the bound kernels.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ._jit import NUMBA_ENABLED, njit, objmode
from .heuristics import HeuristicKind, HeuristicMismatch
from .instance import RcpspInstance, topological_order
from .oracle import Schedule

__all__ = [
    "NUMBA_ENABLED",
    "KernelData",
    "h_cp_kernel",
    "h_res_kernel",
    "h_cp_numpy",
    "h_res_numpy",
    "fire_kernel",
    "search_kernel",
    "kernel_solve",
]

KIND_CODES = {
    HeuristicKind.ZERO: 0,
    HeuristicKind.CRITICAL_PATH: 1,
    HeuristicKind.RESOURCE_LOAD: 2,
    HeuristicKind.MAX: 3,
}

G_BITS = 20
G_MAX = (1 << G_BITS) - 1
COUNT_MAX = 1023
MAX_ACTIVITIES = COUNT_MAX
CLOCK_CHECK_EVERY = 1024

SOLVED, INFEASIBLE, TIMEOUT = 0, 1, 2

# stats vector layout
ST_EXPANDED, ST_GENERATED, ST_DUPLICATES, ST_CACHE_HITS, ST_PEAK_OPEN, ST_PEAK_CLOSED, ST_REOPEN, ST_MISMATCH = range(8)
N_STATS = 8


@dataclass(frozen=True)
class KernelData:
    durations: np.ndarray
    demands: np.ndarray
    caps: np.ndarray
    pred_ptr: np.ndarray
    pred_idx: np.ndarray
    topo: np.ndarray

    @classmethod
    def from_instance(cls, inst: RcpspInstance) -> "KernelData":
        preds = inst.predecessors
        ptr = np.zeros(inst.n_activities + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(p) for p in preds])
        idx = np.array([i for p in preds for i in p], dtype=np.int64)
        return cls(
            durations=np.ascontiguousarray(inst.durations, dtype=np.int64),
            demands=np.ascontiguousarray(inst.demand_matrix, dtype=np.int64).reshape(inst.n_activities, inst.n_resources),
            caps=np.ascontiguousarray(inst.capacity_array, dtype=np.int64),
            pred_ptr=ptr,
            pred_idx=idx,
            topo=np.array(topological_order(inst), dtype=np.int64),
        )


@njit(cache=True)
def _cp_into(status, durations, pred_ptr, pred_idx, topo, ref):
    n = status.shape[0]
    for q in range(topo.shape[0]):
        j = topo[q]
        v = status[j]
        if v > 0:
            ref[j] = v
        elif v == 0:
            ref[j] = 0
        else:
            best = 0
            for e in range(pred_ptr[j], pred_ptr[j + 1]):
                x = ref[pred_idx[e]]
                if x > best:
                    best = x
            ref[j] = best + durations[j]
    return ref[n - 1]


@njit(cache=True)
def h_cp_kernel(status, durations, pred_ptr, pred_idx, topo):
    ref = np.zeros(status.shape[0], dtype=np.int64)
    return _cp_into(status, durations, pred_ptr, pred_idx, topo, ref)


@njit(cache=True)
def h_res_kernel(status, durations, demands, caps):
    n = status.shape[0]
    best = 0
    for r in range(caps.shape[0]):
        work = 0
        for j in range(n):
            u = demands[j, r]
            if u != 0:
                v = status[j]
                if v > 0:
                    work += v * u
                elif v < 0:
                    work += durations[j] * u
        if work > 0:
            b = (work + caps[r] - 1) // caps[r]
            if b > best:
                best = b
    return best


def h_cp_numpy(status, durations, pred_ptr, pred_idx, topo) -> int:
    status = np.asarray(status, dtype=np.int64)
    ref = np.where(status > 0, status, 0)
    for j in topo:
        if status[j] < 0:
            lo, hi = pred_ptr[j], pred_ptr[j + 1]
            ref[j] = (ref[pred_idx[lo:hi]].max() if hi > lo else 0) + durations[j]
    return int(ref[-1])


def h_res_numpy(status, durations, demands, caps) -> int:
    status = np.asarray(status, dtype=np.int64)
    remaining = np.where(status < 0, durations, np.maximum(status, 0))
    work = remaining @ demands
    return int(np.max(-(-work // caps), initial=0))


@njit(cache=True)
def _bound(kind, status, durations, demands, caps, pred_ptr, pred_idx, topo, ref):
    if kind == 0:
        return 0
    a = 0
    b = 0
    if kind == 1 or kind == 3:
        a = _cp_into(status, durations, pred_ptr, pred_idx, topo, ref)
    if kind == 2 or kind == 3:
        b = h_res_kernel(status, durations, demands, caps)
    return a if a > b else b


@njit(cache=True)
def _resource_wait(status, demands, caps, r, need):
    n = status.shape[0]
    free = caps[r]
    for j in range(n):
        if status[j] > 0:
            free -= demands[j, r]
    if need <= free:
        return 0
    # smallest delay T whose cumulative supply reaches the requirement
    best = -1
    for c in range(n):
        tc = status[c]
        if tc <= 0 or demands[c, r] == 0:
            continue
        if best >= 0 and tc >= best:
            continue
        have = free
        for j in range(n):
            if status[j] > 0 and status[j] <= tc:
                have += demands[j, r]
        if have >= need:
            best = tc
    return best


@njit(cache=True)
def fire_kernel(status, t, durations, demands, caps, pred_ptr, pred_idx, out):
    """Write the successor of firing ``t`` into ``out``; return the time jump (-1 if not enabled)."""
    if status[t] >= 0:
        return -1
    dt = 0
    for e in range(pred_ptr[t], pred_ptr[t + 1]):
        v = status[pred_idx[e]]
        if v < 0:
            return -1
        if v > dt:
            dt = v
    for r in range(caps.shape[0]):
        need = demands[t, r]
        if need > 0:
            if need > caps[r]:
                return -1
            w = _resource_wait(status, demands, caps, r, need)
            if w > dt:
                dt = w
    for j in range(status.shape[0]):
        v = status[j]
        if v > 0:
            out[j] = v - dt if v > dt else 0
        else:
            out[j] = v
    out[t] = durations[t]
    return dt


@njit(cache=True)
def _hash_row(row):
    h = np.uint64(14695981039346656037)
    for q in range(row.shape[0]):
        h ^= np.uint64(row[q] + 2)
        h *= np.uint64(1099511628211)
    h ^= h >> np.uint64(29)
    return h


@njit(cache=True)
def _rows_equal(pool, a, b, n):
    for q in range(n):
        if pool[a, q] != pool[b, q]:
            return False
    return True


@njit(cache=True)
def _heap_less(hkey, hseq, a, b):
    if hkey[a] != hkey[b]:
        return hkey[a] < hkey[b]
    return hseq[a] < hseq[b]


@njit(cache=True)
def _heap_swap(hkey, hseq, hid, a, b):
    hkey[a], hkey[b] = hkey[b], hkey[a]
    hseq[a], hseq[b] = hseq[b], hseq[a]
    hid[a], hid[b] = hid[b], hid[a]


@njit(cache=True)
def _heap_push(hkey, hseq, hid, size, key, seq, sid):
    i = size
    hkey[i] = key
    hseq[i] = seq
    hid[i] = sid
    while i > 0:
        p = (i - 1) >> 1
        if _heap_less(hkey, hseq, i, p):
            _heap_swap(hkey, hseq, hid, i, p)
            i = p
        else:
            break


@njit(cache=True)
def _heap_pop_into_root(hkey, hseq, hid, size):
    # caller has read slot 0; move last to root and sift down; size is the new size
    hkey[0] = hkey[size]
    hseq[0] = hseq[size]
    hid[0] = hid[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        c = left
        if left + 1 < size and _heap_less(hkey, hseq, left + 1, left):
            c = left + 1
        if _heap_less(hkey, hseq, c, i):
            _heap_swap(hkey, hseq, hid, c, i)
            i = c
        else:
            break


@njit(cache=True)
def _pack(f, g, fin, act):
    return (f << 40) | ((G_MAX - g) << 20) | ((COUNT_MAX - fin) << 10) | (COUNT_MAX - act)


@njit(cache=True)
def _table_find(slots, mask, hashes, pool, cand, hv, n):
    i = np.int64(hv & np.uint64(mask))
    while True:
        s = slots[i]
        if s < 0:
            return -1, i
        if hashes[s] == hv and _rows_equal(pool, s, cand, n):
            return s, i
        i = (i + 1) & mask


@njit(cache=True)
def search_kernel(durations, demands, caps, pred_ptr, pred_idx, topo, kind, deadline, node_limit, debug, init_cap):
    """A* on status rows. Returns (code, goal id, parent, fired, g, stats)."""
    n = durations.shape[0]
    cap = max(init_cap, 16)
    pool = np.empty((cap, n), dtype=np.int16)
    g = np.empty(cap, dtype=np.int32)
    hval = np.empty(cap, dtype=np.int32)
    parent = np.empty(cap, dtype=np.int32)
    fired = np.empty(cap, dtype=np.int32)
    closed = np.zeros(cap, dtype=np.uint8)
    hashes = np.empty(cap, dtype=np.uint64)
    tsize = 64
    while tsize < 2 * cap:
        tsize *= 2
    slots = -np.ones(tsize, dtype=np.int64)
    mask = tsize - 1
    hcap = cap
    hkey = np.empty(hcap, dtype=np.int64)
    hseq = np.empty(hcap, dtype=np.int64)
    hid = np.empty(hcap, dtype=np.int32)
    hsize = 0
    ref = np.zeros(n, dtype=np.int64)
    stats = np.zeros(N_STATS, dtype=np.int64)

    pool[0, :] = -1
    g[0] = 0
    hval[0] = _bound(kind, pool[0], durations, demands, caps, pred_ptr, pred_idx, topo, ref)
    parent[0] = -1
    fired[0] = -1
    hv0 = _hash_row(pool[0])
    hashes[0] = hv0
    slots[np.int64(hv0 & np.uint64(mask))] = 0
    count = 1
    n_closed = 0
    _heap_push(hkey, hseq, hid, hsize, _pack(np.int64(hval[0]), np.int64(0), np.int64(0), np.int64(0)), np.int64(0), 0)
    hsize = 1
    seq = 1
    code = INFEASIBLE
    goal = -1

    while hsize > 0:
        key = hkey[0]
        sid = hid[0]
        hsize -= 1
        if hsize > 0:
            _heap_pop_into_root(hkey, hseq, hid, hsize)
        entry_g = G_MAX - ((key >> 20) & G_MAX)
        if closed[sid]:
            if entry_g < g[sid]:
                stats[ST_REOPEN] += 1
            continue
        closed[sid] = 1
        n_closed += 1
        stats[ST_EXPANDED] += 1
        if pool[sid, n - 1] >= 0:
            code = SOLVED
            goal = sid
            break
        if node_limit >= 0 and stats[ST_EXPANDED] >= node_limit:
            code = TIMEOUT
            break
        if stats[ST_EXPANDED] % CLOCK_CHECK_EVERY == 0:
            with objmode(now="float64"):
                now = time.perf_counter()
            if now > deadline:
                code = TIMEOUT
                break

        # room for n new rows and n heap entries
        if count + n + 1 >= cap:
            ncap = cap * 2
            pool2 = np.empty((ncap, n), dtype=np.int16)
            pool2[:count] = pool[:count]
            pool = pool2
            g2a = np.empty(ncap, dtype=np.int32)
            g2a[:count] = g[:count]
            g = g2a
            h2a = np.empty(ncap, dtype=np.int32)
            h2a[:count] = hval[:count]
            hval = h2a
            p2a = np.empty(ncap, dtype=np.int32)
            p2a[:count] = parent[:count]
            parent = p2a
            f2a = np.empty(ncap, dtype=np.int32)
            f2a[:count] = fired[:count]
            fired = f2a
            c2a = np.zeros(ncap, dtype=np.uint8)
            c2a[:count] = closed[:count]
            closed = c2a
            x2a = np.empty(ncap, dtype=np.uint64)
            x2a[:count] = hashes[:count]
            hashes = x2a
            cap = ncap
        if 2 * (count + n + 1) > tsize:
            tsize *= 2
            while 2 * (count + n + 1) > tsize:
                tsize *= 2
            mask = tsize - 1
            slots = -np.ones(tsize, dtype=np.int64)
            for s in range(count):
                i = np.int64(hashes[s] & np.uint64(mask))
                while slots[i] >= 0:
                    i = (i + 1) & mask
                slots[i] = s
        if hsize + n + 1 >= hcap:
            nh = hcap * 2
            k2 = np.empty(nh, dtype=np.int64)
            k2[:hsize] = hkey[:hsize]
            hkey = k2
            q2 = np.empty(nh, dtype=np.int64)
            q2[:hsize] = hseq[:hsize]
            hseq = q2
            i2 = np.empty(nh, dtype=np.int32)
            i2[:hsize] = hid[:hsize]
            hid = i2
            hcap = nh

        gp = np.int64(g[sid])
        hp = np.int64(hval[sid])
        for t in range(n):
            if pool[sid, t] >= 0:
                continue
            dt = fire_kernel(pool[sid], t, durations, demands, caps, pred_ptr, pred_idx, pool[count])
            if dt < 0:
                continue
            stats[ST_GENERATED] += 1
            gc = gp + dt
            hv = _hash_row(pool[count])
            other, slot = _table_find(slots, mask, hashes, pool, count, hv, n)
            if other >= 0:
                if closed[other]:
                    if gc < g[other]:
                        stats[ST_REOPEN] += 1
                    stats[ST_DUPLICATES] += 1
                    continue
                if g[other] <= gc:
                    stats[ST_DUPLICATES] += 1
                    continue
                target = other
                if dt == 0:
                    stats[ST_CACHE_HITS] += 1
                    hc = hp
                    if debug and hc != hval[other]:
                        stats[ST_MISMATCH] += 1
                else:
                    hc = np.int64(hval[other])
            else:
                target = count
                slots[slot] = count
                hashes[count] = hv
                closed[count] = 0
                count += 1
                if dt == 0:
                    stats[ST_CACHE_HITS] += 1
                    hc = hp
                    if debug:
                        fresh = _bound(kind, pool[target], durations, demands, caps, pred_ptr, pred_idx, topo, ref)
                        if fresh != hc:
                            stats[ST_MISMATCH] += 1
                else:
                    hc = _bound(kind, pool[target], durations, demands, caps, pred_ptr, pred_idx, topo, ref)
                hval[target] = hc
            g[target] = gc
            parent[target] = sid
            fired[target] = t
            fin = 0
            act = 0
            for q in range(n):
                v = pool[target, q]
                if v == 0:
                    fin += 1
                elif v > 0:
                    act += 1
            _heap_push(hkey, hseq, hid, hsize, _pack(gc + hc, gc, np.int64(fin), np.int64(act)), np.int64(seq), target)
            hsize += 1
            seq += 1
        if hsize > stats[ST_PEAK_OPEN]:
            stats[ST_PEAK_OPEN] = hsize
    stats[ST_PEAK_CLOSED] = n_closed
    return code, goal, parent[:count].copy(), fired[:count].copy(), g[:count].copy(), stats


def kernel_supported(inst: RcpspInstance) -> bool:
    return inst.n_activities <= MAX_ACTIVITIES and sum(a.duration for a in inst.activities) < G_MAX


def kernel_solve(net, kind: HeuristicKind, budget, debug: bool = False, init_cap: int = 1 << 14):
    """Run :func:`search_kernel` and wrap the result like the Python engine does."""
    from .astar import INFEASIBLE as S_INF, SOLVED as S_SOL, TIMEOUT as S_TO, SearchStats, SolveOutcome

    inst = net.instance
    if not kernel_supported(inst):
        raise ValueError(
            f"kernel engine limits: at most {MAX_ACTIVITIES} activities and total duration < {G_MAX}"
        )
    data = KernelData.from_instance(inst)
    t0 = time.perf_counter()
    node_limit = -1 if budget.node_limit is None else int(budget.node_limit)
    try:
        code, goal, parent, fired, gvals, raw = search_kernel(
            data.durations, data.demands, data.caps, data.pred_ptr, data.pred_idx, data.topo,
            KIND_CODES[kind], t0 + budget.timeout, node_limit, debug, init_cap,
        )
    except MemoryError:
        stats = SearchStats(wall_time=time.perf_counter() - t0)
        return SolveOutcome(S_TO, stats, None, kind.value, "kernel")
    stats = SearchStats(
        expanded=int(raw[ST_EXPANDED]),
        generated=int(raw[ST_GENERATED]),
        duplicates_pruned=int(raw[ST_DUPLICATES]),
        zero_cost_cache_hits=int(raw[ST_CACHE_HITS]),
        peak_open=int(raw[ST_PEAK_OPEN]),
        peak_closed=int(raw[ST_PEAK_CLOSED]),
        wall_time=time.perf_counter() - t0,
        reopen_violations=int(raw[ST_REOPEN]),
        cache_mismatches=int(raw[ST_MISMATCH]),
    )
    if debug and stats.cache_mismatches:
        raise HeuristicMismatch(f"{stats.cache_mismatches} zero-cost edges changed the bound")
    status = {SOLVED: S_SOL, INFEASIBLE: S_INF, TIMEOUT: S_TO}[int(code)]
    schedule = None
    if status == S_SOL:
        starts = {}
        sid = int(goal)
        while sid > 0:
            starts[int(fired[sid])] = int(gvals[sid])
            sid = int(parent[sid])
        schedule = Schedule(starts, int(gvals[goal]))
    return SolveOutcome(status, stats, schedule, kind.value, "kernel")
