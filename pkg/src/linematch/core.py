"""Exact geometry of the line metric: rationals, instances, match state, local intervals.

Every coordinate in this package is a ``fractions.Fraction``; no rounding ever
happens on a construction or cost path.  Floats appear only in Monte Carlo
summaries (see :mod:`linematch.analysis`).
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction


class Side(Enum):
    """Which of the two surrounding free servers a choice refers to."""

    LEFT = "left"
    RIGHT = "right"

    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class NoFreeServerError(RuntimeError):
    """Raised when a request arrives and no server is free."""


class OneSidedIntervalError(RuntimeError):
    """Raised when a local interval is requested but a free server is missing on one side."""


class ContractViolationError(RuntimeError):
    """An online algorithm returned a server it is not allowed to use."""


def as_rational(value) -> Fraction:
    """Coerce ints, strings like ``"3/4"``, and Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def format_rational(q: Fraction) -> str:
    """Canonical ``num/den`` encoding, bit-exact on round trip."""
    q = as_rational(q)
    return f"{q.numerator}/{q.denominator}"


def denominator_scale(values: Iterable[Fraction]) -> int:
    """lcm of all denominators; multiplying by it maps every value to an int."""
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return scale


def scale_to_ints(values: Sequence[Fraction], scale: int) -> list[int]:
    out = []
    for v in values:
        num = v.numerator * (scale // v.denominator)
        out.append(num)
    return out


@dataclass(frozen=True)
class Instance:
    """Fixed servers plus an ordered request arrival sequence.

    ``servers`` is a tuple of (server id, position) with unique ids;
    ``requests`` is in arrival order.  ``meta`` carries construction
    bookkeeping (gap ledgers etc.) and does not take part in equality.
    """

    servers: tuple[tuple[int, Fraction], ...]
    requests: tuple[tuple[int, Fraction], ...]
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        sids = [sid for sid, _ in self.servers]
        if len(set(sids)) != len(sids):
            raise ValueError("server ids must be unique")
        rids = [rid for rid, _ in self.requests]
        if len(set(rids)) != len(rids):
            raise ValueError("request ids must be unique")
        if len(self.requests) > len(self.servers):
            raise ValueError("more requests than servers")

    @staticmethod
    def from_positions(server_positions: Iterable, request_positions: Iterable, meta: Optional[dict] = None) -> "Instance":
        """Build an instance from bare positions.

        Server ids are assigned in sorted-position order, request ids in
        arrival order, so identical geometry always yields identical ids.
        """
        spos = sorted(as_rational(p) for p in server_positions)
        servers = tuple((i, p) for i, p in enumerate(spos))
        requests = tuple((i, as_rational(p)) for i, p in enumerate(request_positions))
        return Instance(servers, requests, meta or {})

    def server_position(self, sid: int) -> Fraction:
        return self._server_map[sid]

    def request_position(self, rid: int) -> Fraction:
        return self._request_map[rid]

    @property
    def _server_map(self) -> dict:
        # cached lazily on the instance dict (frozen dataclass, so use object.__setattr__)
        cached = self.__dict__.get("_server_map_cache")
        if cached is None:
            cached = {sid: pos for sid, pos in self.servers}
            object.__setattr__(self, "_server_map_cache", cached)
        return cached

    @property
    def _request_map(self) -> dict:
        cached = self.__dict__.get("_request_map_cache")
        if cached is None:
            cached = {rid: pos for rid, pos in self.requests}
            object.__setattr__(self, "_request_map_cache", cached)
        return cached

    def to_jsonable(self) -> dict:
        return {
            "servers": [{"id": sid, "pos": format_rational(pos)} for sid, pos in self.servers],
            "requests": [{"id": rid, "pos": format_rational(pos)} for rid, pos in self.requests],
            "meta": self.meta,
        }

    @staticmethod
    def from_jsonable(data: dict) -> "Instance":
        servers = tuple((int(s["id"]), parse_rational(s["pos"])) for s in data["servers"])
        requests = tuple((int(r["id"]), parse_rational(r["pos"])) for r in data["requests"])
        return Instance(servers, requests, data.get("meta", {}))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_jsonable(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load(path) -> "Instance":
        with open(path) as fh:
            return Instance.from_jsonable(json.load(fh))


class MatchState:
    """Mutable matching state of one online run (single writer).

    Tracks the free-server set (kept sorted by position for surrounding-server
    queries) and the matched pairs in arrival order.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self._free_sorted: list[tuple[Fraction, int]] = sorted((pos, sid) for sid, pos in instance.servers)
        self._free_ids = {sid for _, sid in self._free_sorted}
        self.pairs: list[tuple[int, int]] = []  # (request id, server id) in match order
        self.pair_positions: list[tuple[Fraction, Fraction]] = []  # (server pos, request pos)
        self._matched_requests: set[int] = set()

    def is_free(self, sid: int) -> bool:
        return sid in self._free_ids

    @property
    def free_ids(self) -> frozenset:
        return frozenset(self._free_ids)

    def free_positions(self) -> list[tuple[Fraction, int]]:
        return list(self._free_sorted)

    def match(self, request_id: int, server_id: int) -> None:
        if server_id not in self._free_ids:
            raise ContractViolationError(f"server {server_id} is not free")
        if request_id in self._matched_requests:
            raise ContractViolationError(f"request {request_id} already matched")
        pos = self.instance.server_position(server_id)
        idx = bisect.bisect_left(self._free_sorted, (pos, server_id))
        # collocated servers share a position; scan for the exact id
        while self._free_sorted[idx][1] != server_id:
            idx += 1
        del self._free_sorted[idx]
        self._free_ids.discard(server_id)
        self._matched_requests.add(request_id)
        self.pairs.append((request_id, server_id))
        self.pair_positions.append((pos, self.instance.request_position(request_id)))


def matching_cost(state: MatchState) -> Fraction:
    """Exact total distance of the matched pairs."""
    inst = state.instance
    rpos = {rid: pos for rid, pos in inst.requests}
    total = Fraction(0)
    for rid, sid in state.pairs:
        total += abs(rpos[rid] - inst.server_position(sid))
    return total


def surrounding_free_servers(state: MatchState, r: Fraction) -> tuple[Optional[int], Optional[int]]:
    """Nearest free server at position <= r and nearest at position >= r.

    Either side may be absent at the boundary of the instance; a server
    collocated with ``r`` answers for both sides.
    """
    free = state._free_sorted
    if not free:
        raise NoFreeServerError("no free servers left")
    r = as_rational(r)
    idx = bisect.bisect_right(free, (r, float("inf")))
    left = free[idx - 1][1] if idx > 0 else None
    # a collocated server sits just left of the cut; it is also the nearest >= r
    if idx > 0 and free[idx - 1][0] == r:
        right = free[idx - 1][1]
    else:
        right = free[idx][1] if idx < len(free) else None
    return left, right


@dataclass(frozen=True)
class LocalInterval:
    """The window between the two surrounding free servers of a pending request.

    ``history`` lists (matched server position, matched request position)
    pairs strictly inside the window, in the order they were matched.  The
    order is part of the content: local algorithms may depend on it.
    """

    s_left: Fraction
    request: Fraction
    s_right: Fraction
    history: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if not (self.s_left <= self.request <= self.s_right):
            raise ValueError("request must lie between the free endpoints")
        if self.s_left >= self.s_right:
            raise ValueError("endpoints must be distinct")
        for spos, rpos in self.history:
            if not (self.s_left < spos < self.s_right and self.s_left < rpos < self.s_right):
                raise ValueError("history must lie strictly inside the window")

    @property
    def d_left(self) -> Fraction:
        return self.request - self.s_left

    @property
    def d_right(self) -> Fraction:
        return self.s_right - self.request

    @property
    def midpoint(self) -> Fraction:
        return (self.s_left + self.s_right) / 2


def _interval_trusted(s_left: Fraction, request: Fraction, s_right: Fraction,
                      history: tuple) -> LocalInterval:
    """Construct a LocalInterval skipping validation (hot paths whose inputs
    are valid by construction)."""
    interval = object.__new__(LocalInterval)
    object.__setattr__(interval, "s_left", s_left)
    object.__setattr__(interval, "request", request)
    object.__setattr__(interval, "s_right", s_right)
    object.__setattr__(interval, "history", history)
    return interval


def mirror_interval(interval: LocalInterval) -> LocalInterval:
    """Reflect the window across its midpoint; endpoint roles swap, order is kept."""
    c = interval.s_left + interval.s_right
    return LocalInterval(
        s_left=interval.s_left,
        request=c - interval.request,
        s_right=interval.s_right,
        history=tuple((c - spos, c - rpos) for spos, rpos in interval.history),
    )


def translate_interval(interval: LocalInterval, offset: Fraction) -> LocalInterval:
    offset = as_rational(offset)
    return LocalInterval(
        s_left=interval.s_left + offset,
        request=interval.request + offset,
        s_right=interval.s_right + offset,
        history=tuple((spos + offset, rpos + offset) for spos, rpos in interval.history),
    )


def extract_local_interval(state: MatchState, r: Fraction) -> LocalInterval:
    """The local window of a pending request, with full interior match history.

    Only pairs whose server and request both lie strictly inside the window
    are part of the content; everything outside is invisible by design.
    """
    r = as_rational(r)
    left, right = surrounding_free_servers(state, r)
    if left is None or right is None:
        raise OneSidedIntervalError("request has no free server on one side")
    lo = state.instance.server_position(left)
    hi = state.instance.server_position(right)
    if lo == hi:
        raise OneSidedIntervalError("request is collocated with the only surrounding server")
    history = tuple(
        (spos, qpos)
        for spos, qpos in state.pair_positions
        if lo < spos < hi and lo < qpos < hi
    )
    return _interval_trusted(lo, r, hi, history)
