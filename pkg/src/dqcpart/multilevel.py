"""Multilevel bisection engine: heavy-edge coarsening, graph growing, FM refinement.

Graphs here are plain adjacency lists (``list[dict[node, weight]]``) with a
parallel list of node weights. Callers go through
:func:`dqcpart.partition.multilevel_partition`.
"""
from __future__ import annotations

import heapq
from collections import deque

COARSEN_TO = 30
MIN_SHRINK = 0.9


class _Level:
    __slots__ = ("adj", "vwgt", "cmap")

    def __init__(self, adj, vwgt, cmap=None):
        self.adj = adj
        self.vwgt = vwgt
        # fine node -> coarse node (set on the finer of two levels)
        self.cmap = cmap


def coarsen(adj, vwgt, rng, max_vwgt):
    """One round of heavy-edge matching. Returns (coarse_adj, coarse_vwgt, cmap)."""
    n = len(adj)
    match = [-1] * n
    for u in rng.permutation(n).tolist():
        if match[u] != -1:
            continue
        best, best_w = -1, 0
        for v, w in adj[u].items():
            if match[v] == -1 and vwgt[u] + vwgt[v] <= max_vwgt:
                if w > best_w or (w == best_w and v < best):
                    best, best_w = v, w
        if best == -1:
            match[u] = u
        else:
            match[u], match[best] = best, u
    cmap = [-1] * n
    nc = 0
    for u in range(n):
        if cmap[u] == -1:
            cmap[u] = cmap[match[u]] = nc
            nc += 1
    cadj = [dict() for _ in range(nc)]
    cvwgt = [0] * nc
    for u in range(n):
        cu = cmap[u]
        cvwgt[cu] += vwgt[u]
        row = cadj[cu]
        for v, w in adj[u].items():
            cv = cmap[v]
            if cv != cu:
                row[cv] = row.get(cv, 0) + w
    return cadj, cvwgt, cmap


def cut_of(adj, part) -> int:
    return sum(w for u, row in enumerate(adj) for v, w in row.items()
               if u < v and part[u] != part[v])


def _bfs_far(adj, start):
    dist = {start: 0}
    dq = deque([start])
    far = start
    while dq:
        u = dq.popleft()
        if dist[u] > dist[far] or (dist[u] == dist[far] and u < far):
            far = u
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                dq.append(v)
    return far


def pseudo_peripheral(adj, start, sweeps: int = 2):
    node = start
    for _ in range(sweeps):
        node = _bfs_far(adj, node)
    return node


def grow_bisection(adj, vwgt, seed_node, target, hi):
    """Greedy graph growing: side 0 is grown from ``seed_node`` up to ``target`` weight."""
    n = len(adj)
    part = [1] * n
    # cut reduction if node joins side 0
    gain = [-sum(row.values()) for row in adj]
    heap: list[tuple[int, int]] = []
    w0 = 0
    nxt = seed_node
    while w0 < target:
        if nxt is None:
            while heap:
                g, v = heapq.heappop(heap)
                if part[v] == 1 and -g == gain[v] and w0 + vwgt[v] <= hi:
                    nxt = v
                    break
            if nxt is None:
                rest = [v for v in range(n) if part[v] == 1 and w0 + vwgt[v] <= hi]
                if not rest:
                    break
                nxt = min(rest)
        v, nxt = nxt, None
        part[v] = 0
        w0 += vwgt[v]
        for u, w in adj[v].items():
            if part[u] == 1:
                gain[u] += 2 * w
                heapq.heappush(heap, (-gain[u], u))
    return part


class FM:
    """Fiduccia-Mattheyses bisection refinement with a hard weight window on side 0."""

    def __init__(self, adj, vwgt, lo, hi, target):
        self.adj = adj
        self.vwgt = vwgt
        self.lo, self.hi, self.target = lo, hi, target

    def _degrees(self, part):
        ext = [0] * len(self.adj)
        inn = [0] * len(self.adj)
        for u, row in enumerate(self.adj):
            pu = part[u]
            for v, w in row.items():
                if part[v] == pu:
                    inn[u] += w
                else:
                    ext[u] += w
        return ext, inn

    def rebalance(self, part):
        """Greedy max-gain moves until side 0's weight lies in [lo, hi]."""
        w0 = sum(w for w, p in zip(self.vwgt, part) if p == 0)
        if self.lo <= w0 <= self.hi:
            return part
        ext, inn = self._degrees(part)
        while not self.lo <= w0 <= self.hi:
            src = 0 if w0 > self.hi else 1
            # weight that can leave src without crossing the opposite bound
            slack = w0 - self.lo if src == 0 else self.hi - w0
            side = [v for v in range(len(part)) if part[v] == src]
            fitting = [v for v in side if self.vwgt[v] <= slack]
            if fitting:
                v = max(fitting, key=lambda x: (ext[x] - inn[x], -x))
            elif side:
                v = min(side, key=lambda x: (self.vwgt[x], x))
            else:
                break
            self._move(part, v, ext, inn)
            w0 += -self.vwgt[v] if src == 0 else self.vwgt[v]
            if not fitting:
                break
        return part

    def _move(self, part, v, ext, inn):
        part[v] ^= 1
        ext[v], inn[v] = inn[v], ext[v]
        pv = part[v]
        for u, w in self.adj[v].items():
            if part[u] == pv:
                inn[u] += w
                ext[u] -= w
            else:
                inn[u] -= w
                ext[u] += w

    def refine(self, part, passes):
        part = self.rebalance(part)
        for _ in range(passes):
            if not self.fm_pass(part):
                break
        return part

    def fm_pass(self, part) -> bool:
        """One pass over boundary nodes; rolls back to the best prefix. True if cut dropped."""
        adj, vwgt = self.adj, self.vwgt
        n = len(adj)
        ext, inn = self._degrees(part)
        w0 = sum(w for w, p in zip(vwgt, part) if p == 0)
        locked = [False] * n
        heaps: list[list[tuple[int, int]]] = [[], []]
        for v in range(n):
            if ext[v] > 0:
                heaps[part[v]].append((-(ext[v] - inn[v]), v))
        for h in heaps:
            heapq.heapify(h)

        cut = 0
        best_cut, best_dev, best_len = 0, abs(w0 - self.target), 0
        moves: list[int] = []
        limit = max(25, n // 20)

        def top(side):
            h = heaps[side]
            while h:
                g, v = h[0]
                if locked[v] or part[v] != side or -g != ext[v] - inn[v] or ext[v] == 0:
                    heapq.heappop(h)
                    continue
                return -g, v
            return None

        while True:
            cands = []
            for side in (0, 1):
                t = top(side)
                if t is None:
                    continue
                g, v = t
                nw0 = w0 - vwgt[v] if side == 0 else w0 + vwgt[v]
                if self.lo <= nw0 <= self.hi:
                    cands.append((g, -abs(nw0 - self.target), -v, side, nw0))
            if not cands:
                break
            g, _, negv, side, nw0 = max(cands)
            v = -negv
            heapq.heappop(heaps[side])
            locked[v] = True
            self._move(part, v, ext, inn)
            w0 = nw0
            cut -= g
            moves.append(v)
            for u in adj[v]:
                if not locked[u] and ext[u] > 0:
                    heapq.heappush(heaps[part[u]], (-(ext[u] - inn[u]), u))
            dev = abs(w0 - self.target)
            if cut < best_cut or (cut == best_cut and dev < best_dev):
                best_cut, best_dev, best_len = cut, dev, len(moves)
            elif len(moves) - best_len > limit:
                break

        for v in reversed(moves[best_len:]):
            part[v] ^= 1
        return best_cut < 0


def bisect(adj, vwgt, lo, hi, target, rng, passes=4, tries=8):
    """Multilevel bisection; side 0 weight lands in [lo, hi] whenever the finest level allows."""
    total = sum(vwgt)
    max_vwgt = max(1, int(1.5 * total / COARSEN_TO))
    levels = [_Level(adj, vwgt)]
    while len(levels[-1].adj) > COARSEN_TO:
        cur = levels[-1]
        cadj, cvwgt, cmap = coarsen(cur.adj, cur.vwgt, rng, max_vwgt)
        if len(cadj) > MIN_SHRINK * len(cur.adj):
            break
        cur.cmap = cmap
        levels.append(_Level(cadj, cvwgt))

    coarse = levels[-1]
    fm = FM(coarse.adj, coarse.vwgt, lo, hi, target)
    best = None
    n = len(coarse.adj)
    for t in range(max(1, tries)):
        start = int(rng.integers(n))
        seed_node = pseudo_peripheral(coarse.adj, start) if t % 2 == 0 else start
        part = grow_bisection(coarse.adj, coarse.vwgt, seed_node, target, hi)
        part = fm.refine(part, passes)
        w0 = sum(w for w, p in zip(coarse.vwgt, part) if p == 0)
        key = (not lo <= w0 <= hi, cut_of(coarse.adj, part), t)
        if best is None or key < best[0]:
            best = (key, part)
    part = best[1]

    for li in range(len(levels) - 2, -1, -1):
        fine = levels[li]
        part = [part[c] for c in fine.cmap]
        part = FM(fine.adj, fine.vwgt, lo, hi, target).refine(part, passes)
    return part


def kway(adj, k, cap, rng, passes=4, tries=8):
    """Recursive bisection into k parts of size in [1, cap] (unit node weights)."""
    n = len(adj)
    out = [0] * n

    def rec(nodes, local_adj, parts, base):
        if parts == 1:
            for v in nodes:
                out[v] = base
            return
        k0, k1 = (parts + 1) // 2, parts // 2
        s = len(nodes)
        lo = max(k0, s - k1 * cap)
        hi = min(k0 * cap, s - k1)
        target = min(max(round(s * k0 / parts), lo), hi)
        part = bisect(local_adj, [1] * s, lo, hi, target, rng, passes, tries)
        for side, kk, b in ((0, k0, base), (1, k1, base + k0)):
            idx = [i for i in range(s) if part[i] == side]
            loc = {g: j for j, g in enumerate(idx)}
            sub = [{loc[v]: w for v, w in local_adj[i].items() if v in loc} for i in idx]
            rec([nodes[i] for i in idx], sub, kk, b)

    rec(list(range(n)), adj, k, 0)
    return out
