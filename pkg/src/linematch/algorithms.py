"""The online algorithm zoo and the local-choice machinery the adversaries probe.

Deterministic algorithms break ties toward the left.  Randomized algorithms
draw from a per-run stream handed to ``init``, so runs are reproducible.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .core import (
    ContractViolationError,
    Instance,
    LocalInterval,
    MatchState,
    Side,
    as_rational,
    denominator_scale,
    extract_local_interval,
    mirror_interval,
    scale_to_ints,
    surrounding_free_servers,
    translate_interval,
)


# ---------------------------------------------------------------------------
# local choice functions
# ---------------------------------------------------------------------------

def greedy_choice(interval: LocalInterval) -> Side:
    """Closest surrounding server, ties to the left."""
    return Side.LEFT if interval.d_left <= interval.d_right else Side.RIGHT


@dataclass(frozen=True)
class BiasParams:
    """Multiplicative bias for the threshold family.

    ``betas`` gives one factor per construction level (levels are read off the
    interval's history size, so the rule stays local); a single Fraction
    applies at every level.  ``orientations`` optionally flips the preferred
    side per level.
    """

    betas: "tuple[Fraction, ...] | Fraction" = Fraction(1)
    orientations: "tuple[Side, ...] | Side" = Side.RIGHT

    def beta_for_level(self, level: int) -> Fraction:
        if isinstance(self.betas, Fraction):
            return self.betas
        idx = min(level - 1, len(self.betas) - 1)
        return self.betas[idx]

    def orientation_for_level(self, level: int) -> Side:
        if isinstance(self.orientations, Side):
            return self.orientations
        idx = min(level - 1, len(self.orientations) - 1)
        return self.orientations[idx]


def interval_level(interval: LocalInterval) -> int:
    """Construction level implied by the history size (2**i - 2 interior pairs)."""
    return (len(interval.history) + 2).bit_length() - 1


def biased_family_choice(params: BiasParams, interval: LocalInterval) -> Side:
    """Threshold rule with multiplicative bias: Left iff beta * d_left <= d_right.

    With beta = 1 this reduces to the greedy rule on every input (including
    its leftward tie-break).  An orientation of LEFT applies the mirrored rule
    at that level.
    """
    level = interval_level(interval)
    beta = params.beta_for_level(level)
    if beta <= 0:
        raise ValueError("bias factor must be positive")
    if params.orientation_for_level(level) is Side.RIGHT:
        return Side.LEFT if beta * interval.d_left <= interval.d_right else Side.RIGHT
    return Side.RIGHT if beta * interval.d_right < interval.d_left else Side.LEFT


def harmonic_p_left(interval: LocalInterval) -> Fraction:
    """Probability of taking the left server, inversely proportional to distance.

    p(s_L) = d_R / (d_L + d_R); a collocated server is taken with probability 1.
    """
    d_l, d_r = interval.d_left, interval.d_right
    if d_l == 0 and d_r == 0:
        raise ValueError("degenerate interval: request collocated with both endpoints")
    return d_r / (d_l + d_r)


class LocalChoice(Protocol):
    def choose(self, interval: LocalInterval) -> Side: ...


@dataclass(frozen=True)
class GreedyChoice:
    def choose(self, interval: LocalInterval) -> Side:
        return greedy_choice(interval)

    @staticmethod
    def choose_from_distances(d_left: Fraction, d_right: Fraction) -> Side:
        return Side.LEFT if d_left <= d_right else Side.RIGHT


@dataclass(frozen=True)
class BiasedChoice:
    params: BiasParams

    def choose(self, interval: LocalInterval) -> Side:
        return biased_family_choice(self.params, interval)


@dataclass(frozen=True)
class HarmonicChoice:
    """Randomized rule; exposes the exact left probability for probing."""

    def p_left(self, interval: LocalInterval) -> Fraction:
        return harmonic_p_left(interval)

    @staticmethod
    def p_left_from_distances(d_left: Fraction, d_right: Fraction) -> Fraction:
        if d_left == 0 and d_right == 0:
            raise ValueError("degenerate interval: request collocated with both endpoints")
        return d_right / (d_left + d_right)


@dataclass(frozen=True)
class ConstantChoice:
    side: Side

    def choose(self, interval: LocalInterval) -> Side:
        return self.side

    def choose_from_distances(self, d_left: Fraction, d_right: Fraction) -> Side:
        return self.side


@dataclass(frozen=True)
class AbsoluteCoordinateChoice:
    """Deliberately non-local rule for negative tests: reads absolute position."""

    def choose(self, interval: LocalInterval) -> Side:
        return Side.LEFT if int(interval.request) % 2 == 0 else Side.RIGHT


# ---------------------------------------------------------------------------
# online algorithms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunTrace:
    steps: tuple[tuple[int, int, Fraction], ...]  # (request id, server id, cost)
    total_cost: Fraction


class OnlineAlgorithm(Protocol):
    def init(self, instance: Instance, rng: Optional[random.Random] = None) -> None: ...
    def serve(self, state: MatchState, r_pos: Fraction, r_id: int) -> int: ...


def _bernoulli(rng: random.Random, p: Fraction) -> bool:
    """Exact rational Bernoulli draw (no float comparison)."""
    if p <= 0:
        return False
    if p >= 1:
        return True
    return rng.randrange(p.denominator) < p.numerator


class ChoiceAlgorithm:
    """Adapter running any local choice (deterministic or randomized) online.

    One-sided requests are forced to the only available side; otherwise the
    choice sees exactly the extracted local interval.
    """

    def __init__(self, choice):
        self.choice = choice
        self._rng: Optional[random.Random] = None

    def init(self, instance: Instance, rng: Optional[random.Random] = None) -> None:
        self._rng = rng

    def serve(self, state: MatchState, r_pos: Fraction, r_id: int) -> int:
        left, right = surrounding_free_servers(state, r_pos)
        if left is None:
            return right
        if right is None or left == right:
            return left
        choice = self.choice
        # distance-only rules skip the history extraction entirely
        if hasattr(choice, "p_left_from_distances"):
            inst = state.instance
            p = choice.p_left_from_distances(r_pos - inst.server_position(left),
                                             inst.server_position(right) - r_pos)
            side = Side.LEFT if self._draw(p) else Side.RIGHT
        elif hasattr(choice, "choose_from_distances"):
            inst = state.instance
            side = choice.choose_from_distances(r_pos - inst.server_position(left),
                                                inst.server_position(right) - r_pos)
        elif hasattr(choice, "p_left"):
            p = choice.p_left(extract_local_interval(state, r_pos))
            side = Side.LEFT if self._draw(p) else Side.RIGHT
        else:
            side = choice.choose(extract_local_interval(state, r_pos))
        return left if side is Side.LEFT else right

    def _draw(self, p: Fraction) -> bool:
        if self._rng is None:
            raise ValueError("randomized choice needs an rng (pass a seed to run_online)")
        return _bernoulli(self._rng, p)


def wfa_serve(state: MatchState, r_pos: Fraction) -> int:
    """Work-function step: commit the surrounding free server whose resulting
    configuration has the cheapest offline optimum.

    The candidate set is the two surrounding free servers (restricting to them
    is lossless for online matching on the line, and the work function
    algorithm is known to stay local).  The committed configuration is
    balanced, so its offline optimum is the sorted pairing, evaluated exactly.
    Ties go left.
    """
    r_pos = as_rational(r_pos)
    left, right = surrounding_free_servers(state, r_pos)
    if left is None:
        return right
    if right is None or left == right:
        return left
    inst = state.instance
    rpos_map = {rid: pos for rid, pos in inst.requests}
    used = sorted(inst.server_position(sid) for _, sid in state.pairs)
    reqs = sorted(rpos_map[rid] for rid, _ in state.pairs)
    bisect.insort(reqs, r_pos)

    def work_value(candidate_pos: Fraction) -> Fraction:
        servers = list(used)
        bisect.insort(servers, candidate_pos)
        return sum((abs(a - b) for a, b in zip(servers, reqs)), Fraction(0))

    w_left = work_value(inst.server_position(left))
    w_right = work_value(inst.server_position(right))
    return left if w_left <= w_right else right


class WfaAlgorithm:
    """Incremental work-function algorithm.

    Decision-equivalent to :func:`wfa_serve` (same exact work values, same
    leftward tie-break) but keeps sorted coordinate arrays between steps and
    evaluates the balanced pairing in scaled int64 when magnitudes allow.
    """

    def init(self, instance: Instance, rng: Optional[random.Random] = None) -> None:
        self.instance = instance
        positions = [pos for _, pos in instance.servers] + [pos for _, pos in instance.requests]
        self._scale = denominator_scale(positions) if positions else 1
        scaled = scale_to_ints(positions, self._scale)
        n_total = len(positions) + 1
        self._use_int = bool(scaled) and max(abs(c) for c in scaled) * n_total < 2**62
        if self._use_int:
            self._server_coord = {sid: c for (sid, _), c in zip(instance.servers, scaled)}
            self._request_coord = {rid: c for (rid, _), c in
                                   zip(instance.requests, scaled[len(instance.servers):])}
            self._used = np.zeros(0, dtype=np.int64)
            self._reqs = np.zeros(0, dtype=np.int64)
        self._seen_pairs = 0

    def _sync(self, state: MatchState) -> None:
        for rid, sid in state.pairs[self._seen_pairs:]:
            s = self._server_coord[sid]
            q = self._request_coord[rid]
            self._used = np.insert(self._used, int(np.searchsorted(self._used, s)), s)
            self._reqs = np.insert(self._reqs, int(np.searchsorted(self._reqs, q)), q)
        self._seen_pairs = len(state.pairs)

    def serve(self, state: MatchState, r_pos: Fraction, r_id: int) -> int:
        if not self._use_int:
            return wfa_serve(state, r_pos)
        left, right = surrounding_free_servers(state, r_pos)
        if left is None:
            return right
        if right is None or left == right:
            return left
        self._sync(state)
        r = self._request_coord.get(r_id)
        if r is None:
            return wfa_serve(state, r_pos)
        reqs = np.insert(self._reqs, int(np.searchsorted(self._reqs, r)), r)

        def work_value(coord: int):
            servers = np.insert(self._used, int(np.searchsorted(self._used, coord)), coord)
            return int(np.abs(servers - reqs).sum())

        w_left = work_value(self._server_coord[left])
        w_right = work_value(self._server_coord[right])
        return left if w_left <= w_right else right


class TNetCostAlgorithm:
    """Online matching by minimum t-net-cost augmenting paths.

    Keeps its own offline matching M; each request r finds the augmenting path
    from r over M minimizing t * (forward length) - (backward length), is
    matched online to the free server at the end of that path, and M is
    updated by augmenting along it.  For t = 1 this keeps M offline-optimal
    after every step (the Hungarian-method invariant).

    The search runs on the line graph: consecutive-point edges at rate t plus
    one negative jump edge per matched pair, relaxed to a fixpoint by
    Bellman-Ford sweeps (prefix-min scans, so each round is O(n)).  All
    arithmetic is exact; coordinates are pre-scaled to a common denominator
    once per instance and the sweeps run in int64 whenever magnitudes allow.
    """

    def __init__(self, t):
        t = as_rational(t)
        if t < 1:
            raise ValueError("t must be >= 1")
        self.t = t

    def init(self, instance: Instance, rng: Optional[random.Random] = None) -> None:
        self.instance = instance
        self.match_of_request: dict[int, int] = {}
        self._request_pos = {rid: pos for rid, pos in instance.requests}
        entries = [(pos, 0, sid) for sid, pos in instance.servers]
        entries += [(pos, 1, rid) for rid, pos in instance.requests]
        entries.sort()
        self._positions = [pos for pos, _, _ in entries]
        self._node_of = {(kind, ident): i for i, (_, kind, ident) in enumerate(entries)}
        self._t_num, self._t_den = self.t.numerator, self.t.denominator
        self._scale = denominator_scale(self._positions) if self._positions else 1
        coords = scale_to_ints(self._positions, self._scale)
        self._coords = coords
        factor = max(self._t_num, self._t_den)
        max_c = max(abs(c) for c in coords) if coords else 0
        self._use_int = max_c * factor * 8 < 2**62 and factor < 2**20
        if self._use_int:
            carr = np.asarray(coords, dtype=np.int64)
            self._travel = np.zeros(len(coords), dtype=np.int64)
            if len(coords) > 1:
                np.cumsum(np.diff(carr) * self._t_num, out=self._travel[1:])

    def internal_matching_cost(self) -> Fraction:
        total = Fraction(0)
        for rid, sid in self.match_of_request.items():
            total += abs(self._request_pos[rid] - self.instance.server_position(sid))
        return total

    def internal_matching(self) -> dict[int, int]:
        return dict(self.match_of_request)

    def _source_index(self, r_pos: Fraction, r_id: int) -> int:
        src = self._node_of.get((1, r_id))
        if src is None or self._positions[src] != as_rational(r_pos):
            raise ValueError("t-net-cost serves only requests of the instance it was initialized with")
        return src

    def _jump_pairs(self) -> list:
        return [(self._node_of[(0, sid)], self._node_of[(1, rid)])
                for rid, sid in self.match_of_request.items()]

    def serve(self, state: MatchState, r_pos: Fraction, r_id: int) -> int:
        src = self._source_index(r_pos, r_id)
        jump_pairs = self._jump_pairs()
        if self._use_int:
            dist = self._sweep_int(src, jump_pairs)
            best = None
            r_c = self._coords[src]
            for sid in state.free_ids:
                i = self._node_of[(0, sid)]
                d = int(dist[i])
                if d >= 2**61:
                    continue
                key = (d, abs(self._coords[i] - r_c), self._coords[i])
                if best is None or key < best[0]:
                    best = (key, sid, i)
            if best is None:
                raise ContractViolationError("no free server reachable")
            _, chosen_sid, end = best
            path_jumps = self._reconstruct_int(dist, jump_pairs, src, end)
        else:
            dist = self._sweep_frac(jump_pairs, src)
            best = None
            r_p = self._positions[src]
            for sid in state.free_ids:
                i = self._node_of[(0, sid)]
                if dist[i] is None:
                    continue
                key = (dist[i], abs(self._positions[i] - r_p), self._positions[i])
                if best is None or key < best[0]:
                    best = (key, sid, i)
            if best is None:
                raise ContractViolationError("no free server reachable")
            _, chosen_sid, end = best
            path_jumps = self._reconstruct_frac(dist, jump_pairs, src, end)
        prev_rid = r_id
        for si, ri in path_jumps:
            _, _, sid = self._entry(si)
            self.match_of_request[prev_rid] = sid
            prev_rid = self._entry(ri)[2]
        self.match_of_request[prev_rid] = chosen_sid
        return chosen_sid

    def _entry(self, idx: int):
        # inverse of _node_of, rebuilt lazily
        cache = getattr(self, "_entry_cache", None)
        if cache is None:
            cache = [None] * len(self._positions)
            for (kind, ident), i in self._node_of.items():
                cache[i] = (self._positions[i], kind, ident)
            self._entry_cache = cache
        return cache[idx]

    def net_cost_of_serving(self, state: MatchState, r_pos: Fraction, r_id: int) -> Fraction:
        """Minimum t-net cost over all augmenting paths from r (diagnostic)."""
        src = self._source_index(r_pos, r_id)
        jump_pairs = self._jump_pairs()
        frees = [self._node_of[(0, sid)] for sid in state.free_ids]
        if self._use_int:
            dist = self._sweep_int(src, jump_pairs)
            denom = self._scale * self._t_den
            values = [Fraction(int(dist[i]), denom) for i in frees if int(dist[i]) < 2**61]
        else:
            dist = self._sweep_frac(jump_pairs, src)
            values = [dist[i] for i in frees if dist[i] is not None]
        return min(values)

    # -- integer fast path ----------------------------------------------------

    def _sweep_int(self, source: int, jump_pairs) -> np.ndarray:
        # costs in units of 1/(scale * t_den): line edge t_num * gap, jump -t_den * length
        n = len(self._coords)
        INF = np.int64(2**62)
        dist = np.full(n, INF, dtype=np.int64)
        dist[source] = 0
        travel = self._travel
        if jump_pairs:
            jsrc = np.asarray([p[0] for p in jump_pairs], dtype=np.intp)
            jdst = np.asarray([p[1] for p in jump_pairs], dtype=np.intp)
            jw = np.asarray([-self._t_den * abs(self._coords[a] - self._coords[b])
                             for a, b in jump_pairs], dtype=np.int64)
        # one L2R + R2L pass fully relaxes the path edges for fixed jump inputs,
        # so the fixpoint test only needs to watch the jump relaxations
        for _ in range(len(jump_pairs) + 3):
            prefix = dist - travel
            np.minimum.accumulate(prefix, out=prefix)
            np.minimum(dist, prefix + travel, out=dist)
            suffix = np.minimum.accumulate((dist + travel)[::-1])[::-1]
            np.minimum(dist, suffix - travel, out=dist)
            if not jump_pairs:
                return dist
            # jump destinations are distinct (one matched server per request),
            # so fancy assignment replaces the slow ufunc.at scatter
            cand = dist[jsrc] + jw
            if not (cand < dist[jdst]).any():
                return dist
            np.minimum(cand, dist[jdst], out=cand)
            dist[jdst] = cand
        raise RuntimeError("t-net search did not stabilize; negative alternating cycle?")

    def _reconstruct_int(self, dist, jump_pairs, source, end):
        coords, t_num, t_den = self._coords, self._t_num, self._t_den
        return _tight_path_jumps(
            dist=lambda i: int(dist[i]),
            n=len(coords),
            line_cost=lambda u, v: t_num * abs(coords[u] - coords[v]),
            jump_cost=lambda u, v: -t_den * abs(coords[u] - coords[v]),
            jump_pairs=jump_pairs,
            source=source,
            end=end,
        )

    # -- exact fallback ---------------------------------------------------------

    def _sweep_frac(self, jump_pairs, source):
        positions = self._positions
        n = len(positions)
        t = self.t
        dist: list[Optional[Fraction]] = [None] * n
        dist[source] = Fraction(0)
        for _ in range(len(jump_pairs) + 3):
            changed = False
            for i in range(1, n):
                if dist[i - 1] is not None:
                    cand = dist[i - 1] + t * (positions[i] - positions[i - 1])
                    if dist[i] is None or cand < dist[i]:
                        dist[i] = cand
                        changed = True
            for i in range(n - 2, -1, -1):
                if dist[i + 1] is not None:
                    cand = dist[i + 1] + t * (positions[i + 1] - positions[i])
                    if dist[i] is None or cand < dist[i]:
                        dist[i] = cand
                        changed = True
            for si, di in jump_pairs:
                if dist[si] is not None:
                    cand = dist[si] - abs(positions[si] - positions[di])
                    if dist[di] is None or cand < dist[di]:
                        dist[di] = cand
                        changed = True
            if not changed:
                return dist
        raise RuntimeError("t-net search did not stabilize; negative alternating cycle?")

    def _reconstruct_frac(self, dist, jump_pairs, source, end):
        positions, t = self._positions, self.t
        return _tight_path_jumps(
            dist=lambda i: dist[i],
            n=len(positions),
            line_cost=lambda u, v: t * abs(positions[u] - positions[v]),
            jump_cost=lambda u, v: -abs(positions[u] - positions[v]),
            jump_pairs=jump_pairs,
            source=source,
            end=end,
        )


def _tight_path_jumps(dist, n, line_cost, jump_cost, jump_pairs, source, end):
    """Extract the jump edges of one shortest path from source to end.

    Walks the tight-edge graph (edges u -> v with dist[u] + cost == dist[v])
    backward from the end by BFS; the parent-pointer tree yields a simple
    shortest path even across zero-cost plateaus of collocated points.
    """
    from collections import deque

    jumps_into: dict[int, list[int]] = {}
    for si, ri in jump_pairs:
        jumps_into.setdefault(ri, []).append(si)
    parent: dict[int, tuple[int, bool]] = {end: (-1, False)}
    queue = deque([end])
    while queue:
        v = queue.popleft()
        if v == source:
            break
        d_v = dist(v)
        if d_v is None:
            continue
        for u in jumps_into.get(v, ()):
            if u not in parent and dist(u) is not None and dist(u) + jump_cost(u, v) == d_v:
                parent[u] = (v, True)
                queue.append(u)
        for u in (v - 1, v + 1):
            if 0 <= u < n and u not in parent and dist(u) is not None:
                if dist(u) + line_cost(u, v) == d_v:
                    parent[u] = (v, False)
                    queue.append(u)
    if source not in parent:
        raise RuntimeError("path reconstruction lost the shortest path")
    jumps = []
    cur = source
    while cur != end:
        nxt, was_jump = parent[cur]
        if was_jump:
            jumps.append((cur, nxt))
        cur = nxt
    return jumps


class ConstantSideAlgorithm(ChoiceAlgorithm):
    """Test stub that always picks one side of the interval."""

    def __init__(self, side: Side):
        super().__init__(ConstantChoice(side))


def run_online(algorithm, instance: Instance, seed: Optional[int] = None) -> RunTrace:
    """Replay the arrival sequence against an online algorithm.

    The algorithm must return a currently free server; anything else is a
    contract violation and raises.  ``seed`` feeds randomized algorithms.
    """
    rng = random.Random(seed) if seed is not None else None
    algorithm.init(instance, rng=rng)
    state = MatchState(instance)
    steps = []
    total = Fraction(0)
    for rid, rpos in instance.requests:
        sid = algorithm.serve(state, rpos, rid)
        if sid is None or not state.is_free(sid):
            raise ContractViolationError(f"algorithm chose non-free server {sid!r} for request {rid}")
        state.match(rid, sid)
        cost = abs(rpos - instance.server_position(sid))
        steps.append((rid, sid, cost))
        total += cost
    return RunTrace(tuple(steps), total)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

class SymmetryVerdict(Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class LocalityVerdict(Enum):
    LOCAL = "local"
    NONLOCAL = "nonlocal"


class SelfMirrorIntervalError(ValueError):
    """The probe interval is its own mirror image; behavior there is unspecified."""


def probe_symmetry(choice, interval: LocalInterval) -> SymmetryVerdict:
    """Does mirroring the window mirror the decision?

    Deterministic choices must answer the opposite side on the mirror image;
    randomized choices (anything with ``p_left``) must satisfy
    p_left(mirror(I)) = 1 - p_left(I) exactly.
    """
    mirrored = mirror_interval(interval)
    if mirrored == interval:
        raise SelfMirrorIntervalError("interval is a fixed point of reflection")
    if hasattr(choice, "p_left"):
        ok = choice.p_left(mirrored) == 1 - choice.p_left(interval)
    else:
        ok = choice.choose(mirrored) is choice.choose(interval).opposite()
    return SymmetryVerdict.SYMMETRIC if ok else SymmetryVerdict.ASYMMETRIC


def interval_to_instance(interval: LocalInterval, decoys: Sequence[tuple[Fraction, Fraction]] = ()) -> Instance:
    """Materialize a window (plus optional outside decoy pairs) as an instance.

    Decoy pairs are (server position, request position) strictly outside the
    window; their requests arrive before the interior history, the pending
    request arrives last.
    """
    for spos, rpos in decoys:
        if interval.s_left <= spos <= interval.s_right or interval.s_left <= rpos <= interval.s_right:
            raise ValueError("decoys must lie strictly outside the window")
    servers = [interval.s_left, interval.s_right]
    servers += [spos for spos, _ in interval.history]
    servers += [spos for spos, _ in decoys]
    arrivals = [rpos for _, rpos in decoys]
    arrivals += [rpos for _, rpos in interval.history]
    arrivals.append(interval.request)
    return Instance.from_positions(servers, arrivals)


def algorithm_choice_on_interval(algorithm_factory: Callable[[], "OnlineAlgorithm"],
                                 interval: LocalInterval,
                                 decoys: Sequence[tuple[Fraction, Fraction]] = (),
                                 seed: Optional[int] = None) -> Side:
    """Side a full algorithm takes for the pending request of a materialized window.

    The algorithm serves the decoy and interior requests itself (a fresh run),
    then the side of the server it picks for the pending request is reported
    relative to the request position.
    """
    inst = interval_to_instance(interval, decoys)
    algo = algorithm_factory()
    rng = random.Random(seed) if seed is not None else None
    algo.init(inst, rng=rng)
    state = MatchState(inst)
    requests = list(inst.requests)
    pending_id, pending_pos = requests[-1]
    for rid, rpos in requests[:-1]:
        sid = algo.serve(state, rpos, rid)
        state.match(rid, sid)
    chosen = algo.serve(state, pending_pos, pending_id)
    chosen_pos = inst.server_position(chosen)
    return Side.LEFT if chosen_pos <= pending_pos else Side.RIGHT


def probe_locality(algorithm_factory: Callable[[], "OnlineAlgorithm"],
                   interval: LocalInterval,
                   decoys: Sequence[tuple[Fraction, Fraction]] = (),
                   offsets: Sequence[Fraction] = (Fraction(17),),
                   seed: Optional[int] = None) -> LocalityVerdict:
    """Is the decision invariant under translation and under outside decoy history?"""
    baseline = algorithm_choice_on_interval(algorithm_factory, interval, seed=seed)
    for offset in offsets:
        moved = translate_interval(interval, offset)
        if algorithm_choice_on_interval(algorithm_factory, moved, seed=seed) is not baseline:
            return LocalityVerdict.NONLOCAL
    if decoys:
        if algorithm_choice_on_interval(algorithm_factory, interval, decoys=decoys, seed=seed) is not baseline:
            return LocalityVerdict.NONLOCAL
        for offset in offsets:
            moved = translate_interval(interval, offset)
            moved_decoys = [(s + offset, r + offset) for s, r in decoys]
            if algorithm_choice_on_interval(algorithm_factory, moved, decoys=moved_decoys, seed=seed) is not baseline:
                return LocalityVerdict.NONLOCAL
    return LocalityVerdict.LOCAL
