"""Path and tour primitives over small dense cost matrices.

Everything here works on local indices into a square ``cost`` matrix (a list
of lists). A *path* starts at a fixed ``start`` index, visits an ordered list
of movable indices, and optionally finishes at a fixed ``end`` index whose
incoming leg is multiplied by ``end_weight``. A closed tour is the special case
``end == start`` with ``end_weight == 1``. Costs may be asymmetric.
"""

from __future__ import annotations

import math
from itertools import permutations
from typing import Sequence

Matrix = Sequence[Sequence[float]]

# relative improvement threshold; scale-free so that rescaling the matrix
# never changes which moves are accepted
REL_TOL = 1e-10


def path_cost(
    order: Sequence[int],
    cost: Matrix,
    start: int,
    end: int | None = None,
    end_weight: float = 1.0,
) -> float:
    total = 0.0
    prev = start
    for v in order:
        total += cost[prev][v]
        prev = v
    if end is not None:
        total += end_weight * cost[prev][end]
    return total


def nearest_neighbour(cost: Matrix, start: int, items: Sequence[int]) -> list[int]:
    """Greedy order from ``start``; equal distances go to the lower index."""
    remaining = sorted(set(items) - {start})
    order: list[int] = []
    cur = start
    while remaining:
        row = cost[cur]
        nxt = min(remaining, key=lambda j: (row[j], j))
        order.append(nxt)
        remaining.remove(nxt)
        cur = nxt
    return order


def _prefix(seq: Sequence[int], cost: Matrix) -> tuple[list[float], list[float]]:
    fwd = [0.0]
    bwd = [0.0]
    for a, b in zip(seq, seq[1:]):
        fwd.append(fwd[-1] + cost[a][b])
        bwd.append(bwd[-1] + cost[b][a])
    return fwd, bwd


def best_two_opt_move(
    seq: Sequence[int], cost: Matrix, has_end: bool, end_weight: float
) -> tuple[float, int, int] | None:
    """Most improving segment reversal of ``seq[i..j]``, or None.

    ``seq`` is the full node sequence including the fixed start (and the
    fixed end when ``has_end``). Returns ``(delta, i, j)``.
    """
    n = len(seq)
    last = n - 2 if has_end else n - 1  # last movable position
    if last < 2:
        return None
    fwd, bwd = _prefix(seq, cost)
    best = None
    for i in range(1, last):
        a = seq[i - 1]
        si = seq[i]
        for j in range(i + 1, last + 1):
            sj = seq[j]
            old = cost[a][si] + (fwd[j] - fwd[i])
            new = cost[a][sj] + (bwd[j] - bwd[i])
            if j + 1 < n:
                b = seq[j + 1]
                w = end_weight if (has_end and j + 1 == n - 1) else 1.0
                old += w * cost[sj][b]
                new += w * cost[si][b]
            delta = new - old
            if best is None or delta < best[0]:
                best = (delta, i, j)
    return best


def best_or_opt_move(
    seq: Sequence[int], cost: Matrix, has_end: bool, end_weight: float, max_len: int = 3
) -> tuple[float, int, int, int, bool] | None:
    """Most improving relocation of a segment of 1..max_len movable nodes.

    Returns ``(delta, i, length, p, reverse)``: segment ``seq[i:i+length]`` is
    removed and reinserted between ``seq[p]`` and ``seq[p+1]`` (old indexing),
    optionally reversed.
    """
    n = len(seq)
    last = n - 2 if has_end else n - 1
    if last < 2:
        return None
    fwd, bwd = _prefix(seq, cost)

    def w(dest_pos: int) -> float:
        return end_weight if (has_end and dest_pos == n - 1) else 1.0

    best = None
    for length in range(1, max_len + 1):
        for i in range(1, last - length + 2):
            k = i + length - 1
            a, f, l = seq[i - 1], seq[i], seq[k]
            removed = cost[a][f]
            added = 0.0
            if k + 1 < n:
                b = seq[k + 1]
                removed += w(k + 1) * cost[l][b]
                added += w(k + 1) * cost[a][b]
            remove_delta = added - removed
            inner_rev = (bwd[k] - bwd[i]) - (fwd[k] - fwd[i])
            for p in range(0, last + 1):
                if i - 1 <= p <= k:
                    continue
                x = seq[p]
                if p + 1 < n:
                    y = seq[p + 1]
                    wy = w(p + 1)
                    base = -wy * cost[x][y]
                    fwd_ins = base + cost[x][f] + wy * cost[l][y]
                    rev_ins = base + cost[x][l] + wy * cost[f][y] + inner_rev
                else:
                    fwd_ins = cost[x][f]
                    rev_ins = cost[x][l] + inner_rev
                for reverse, ins in ((False, fwd_ins), (True, rev_ins)):
                    if reverse and length == 1:
                        continue
                    delta = remove_delta + ins
                    if best is None or delta < best[0]:
                        best = (delta, i, length, p, reverse)
    return best


def _apply_or_opt(seq: list[int], i: int, length: int, p: int, reverse: bool) -> list[int]:
    seg = seq[i : i + length]
    if reverse:
        seg.reverse()
    rest = seq[:i] + seq[i + length :]
    pos = p if p < i else p - length
    return rest[: pos + 1] + seg + rest[pos + 1 :]


def improve_path(
    order: Sequence[int],
    cost: Matrix,
    start: int,
    end: int | None = None,
    end_weight: float = 1.0,
) -> list[int]:
    """2-opt and or-opt descent until neither finds an improving move."""
    seq = [start, *order] + ([end] if end is not None else [])
    has_end = end is not None
    total = path_cost(order, cost, start, end, end_weight)
    while True:
        tol = REL_TOL * abs(total)
        move = best_two_opt_move(seq, cost, has_end, end_weight)
        if move is not None and move[0] < -tol:
            _, i, j = move
            seq[i : j + 1] = seq[i : j + 1][::-1]
            total += move[0]
            continue
        move2 = best_or_opt_move(seq, cost, has_end, end_weight)
        if move2 is not None and move2[0] < -tol:
            _, i, length, p, reverse = move2
            seq = _apply_or_opt(seq, i, length, p, reverse)
            total += move2[0]
            continue
        break
    return seq[1:-1] if has_end else seq[1:]


def held_karp_tour(cost: Matrix, start: int, items: Sequence[int]) -> tuple[list[int], float]:
    """Exact minimum closed tour ``start -> items -> start`` by dynamic programming."""
    stops = sorted(set(items) - {start})
    m = len(stops)
    if m == 0:
        return [], 0.0
    full = (1 << m) - 1
    # best[mask][k]: cheapest path from start covering mask and ending at stops[k]
    best = [[math.inf] * m for _ in range(1 << m)]
    parent = [[-1] * m for _ in range(1 << m)]
    for k in range(m):
        best[1 << k][k] = cost[start][stops[k]]
    for mask in range(1, full + 1):
        row = best[mask]
        for k in range(m):
            base = row[k]
            if base == math.inf or not (mask >> k) & 1:
                continue
            src = stops[k]
            for t in range(m):
                if (mask >> t) & 1:
                    continue
                nm = mask | (1 << t)
                cand = base + cost[src][stops[t]]
                if cand < best[nm][t]:
                    best[nm][t] = cand
                    parent[nm][t] = k
    finals = [best[full][k] + cost[stops[k]][start] for k in range(m)]
    k = min(range(m), key=lambda t: (finals[t], t))
    total = finals[k]
    order = []
    mask = full
    while k != -1:
        order.append(stops[k])
        pk = parent[mask][k]
        mask ^= 1 << k
        k = pk
    order.reverse()
    return order, total


def brute_force_path(
    cost: Matrix,
    start: int,
    items: Sequence[int],
    end: int | None = None,
    end_weight: float = 1.0,
) -> tuple[list[int], float]:
    best_order: list[int] = []
    best = math.inf
    for perm in permutations(items):
        c = path_cost(perm, cost, start, end, end_weight)
        if c < best:
            best, best_order = c, list(perm)
    if not items:
        best = path_cost([], cost, start, end, end_weight)
    return best_order, best
