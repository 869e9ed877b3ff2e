"""Offline optimal matching on the line: the OPT benchmark plus a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .core import as_rational, denominator_scale, scale_to_ints

# Largest scaled coordinate magnitude for which the int64 fast path is safe.
# DP values are sums of at most n distances; keep a wide margin below 2**63.
_INT64_COORD_LIMIT = 2**56


@dataclass(frozen=True)
class OptResult:
    cost: Fraction
    matching: tuple[tuple[int, int], ...]  # (request id, server id)


def _normalize(items: Iterable) -> list[tuple[int, Fraction]]:
    """Accept either (id, position) pairs or bare positions (ids by order)."""
    out = []
    for i, item in enumerate(items):
        if isinstance(item, tuple) and len(item) == 2:
            out.append((item[0], as_rational(item[1])))
        else:
            out.append((i, as_rational(item)))
    return out


def optimal_balanced(servers: Iterable, requests: Iterable) -> OptResult:
    """Sorted-pairing optimum for the balanced case.

    Sorting both sides and pairing in order is optimal on the line for
    |S| = |R|; this is the classical exchange argument.
    """
    srv = _normalize(servers)
    req = _normalize(requests)
    if len(srv) != len(req):
        raise ValueError(f"balanced matching needs |S| = |R|, got {len(srv)} vs {len(req)}")
    srv.sort(key=lambda t: t[1])
    req.sort(key=lambda t: t[1])
    cost = Fraction(0)
    matching = []
    for (rid, rpos), (sid, spos) in zip(req, srv):
        cost += abs(rpos - spos)
        matching.append((rid, sid))
    matching.sort()
    return OptResult(cost, tuple(matching))


def _dp_tables_int(spos: list[int], rpos: list[int]):
    """Full (n+1) x (m+1) DP table over (servers considered, requests matched)."""
    n, m = len(spos), len(rpos)
    INF = np.int64(2**62)
    table = np.full((n + 1, m + 1), INF, dtype=np.int64)
    table[0, 0] = 0
    r = np.asarray(rpos, dtype=np.int64)
    for i in range(1, n + 1):
        prev = table[i - 1]
        cost_row = np.abs(r - np.int64(spos[i - 1]))
        cand = np.empty(m + 1, dtype=np.int64)
        cand[0] = INF
        np.add(prev[:-1], cost_row, out=cand[1:])
        # guard paths growing out of the infeasible region
        np.minimum(cand, INF, out=cand)
        np.minimum(prev, cand, out=table[i])
    return table


def _dp_tables_frac(spos: list[Fraction], rpos: list[Fraction]):
    n, m = len(spos), len(rpos)
    INF = None
    table = [[INF] * (m + 1) for _ in range(n + 1)]
    table[0][0] = Fraction(0)
    for i in range(1, n + 1):
        prev = table[i - 1]
        row = table[i]
        s = spos[i - 1]
        row[0] = Fraction(0)
        for j in range(1, m + 1):
            best = prev[j]
            if prev[j - 1] is not None:
                cand = prev[j - 1] + abs(rpos[j - 1] - s)
                if best is None or cand < best:
                    best = cand
            row[j] = best
    return table


def optimal_dp(servers: Iterable, requests: Iterable) -> OptResult:
    """Exact minimum-cost matching of all requests into a superset of servers.

    Sorts both sides and runs the skip-server / match-next recurrence.  Ties
    between equal-cost matchings are broken toward the lexicographically
    smallest pairing by sorted index (skip preferred on the backward walk).
    """
    srv = _normalize(servers)
    req = _normalize(requests)
    if len(srv) < len(req):
        raise ValueError(f"need |S| >= |R|, got {len(srv)} vs {len(req)}")
    srv.sort(key=lambda t: t[1])
    req.sort(key=lambda t: t[1])
    if not req:
        return OptResult(Fraction(0), ())

    positions = [p for _, p in srv] + [p for _, p in req]
    scale = denominator_scale(positions)
    scaled = scale_to_ints(positions, scale)
    use_int = max(abs(v) for v in scaled) < _INT64_COORD_LIMIT

    n, m = len(srv), len(req)
    if use_int:
        spos = scaled[:n]
        rpos = scaled[n:]
        table = _dp_tables_int(spos, rpos)
        cost = Fraction(int(table[n, m]), scale)
        get = lambda i, j: int(table[i, j]) if table[i, j] < 2**61 else None
    else:
        spos = [p for _, p in srv]
        rpos = [p for _, p in req]
        table = _dp_tables_frac(spos, rpos)
        cost = table[n][m]
        get = lambda i, j: table[i][j]

    # backward walk, preferring "skip server" on ties -> earlier requests
    # get the smallest feasible server indices
    matching = []
    i, j = n, m
    while j > 0:
        if get(i - 1, j) is not None and get(i - 1, j) == get(i, j):
            i -= 1
        else:
            matching.append((req[j - 1][0], srv[i - 1][0]))
            i -= 1
            j -= 1
    matching.sort()
    return OptResult(cost, tuple(matching))


def optimal_cost(servers: Iterable, requests: Iterable) -> Fraction:
    """Cost-only convenience wrapper around :func:`optimal_dp`."""
    return optimal_dp(servers, requests).cost


def optimal_bruteforce(servers: Iterable, requests: Iterable, budget: int = 10) -> Fraction:
    """Exact minimum over all injective assignments; the validation oracle."""
    srv = _normalize(servers)
    req = _normalize(requests)
    if len(req) > budget:
        raise ValueError(f"brute force limited to {budget} requests, got {len(req)}")
    if len(srv) < len(req):
        raise ValueError("need |S| >= |R|")
    best = None
    rpos = [p for _, p in req]
    for perm in permutations([p for _, p in srv], len(req)):
        cost = sum((abs(a - b) for a, b in zip(perm, rpos)), Fraction(0))
        if best is None or cost < best:
            best = cost
    return best if best is not None else Fraction(0)
