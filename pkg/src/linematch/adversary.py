"""Builders for the lower-bound constructions.

Three families: the fixed symmetric tree (unit gaps 1 and 1+eps), the adaptive
tree driven by probing a choice function for its flip gap at every level, and
the randomized-symmetric tree (identical subtrees, user-supplied gap schedule).

Trees are immutable; a node's children are stored at their absolute positions
inside the node.  In every deterministic tree the left subtree keeps its
leftmost server free and the right subtree its rightmost, so the pending
request of a node always sees exactly the two endpoint servers free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import Instance, LocalInterval, Side, as_rational, format_rational


@dataclass(frozen=True)
class AdversaryTree:
    level: int
    servers: tuple[Fraction, ...]                 # sorted
    free_side: Optional[Side]                     # LEFT: leftmost server free; None for leaves
    free_pos: Fraction
    requests_by_level: tuple[tuple[Fraction, ...], ...]          # index 0 <-> level 1
    expected_by_level: tuple[tuple[tuple[Fraction, Fraction], ...], ...]  # (request pos, server pos)
    left: Optional["AdversaryTree"] = None
    right: Optional["AdversaryTree"] = None

    @property
    def leftmost(self) -> Fraction:
        return self.servers[0]

    @property
    def rightmost(self) -> Fraction:
        return self.servers[-1]

    @property
    def span(self) -> Fraction:
        return self.rightmost - self.leftmost


def leaf(position=Fraction(0)) -> AdversaryTree:
    position = as_rational(position)
    return AdversaryTree(0, (position,), None, position, (), ())


def translate_tree(tree: AdversaryTree, offset: Fraction) -> AdversaryTree:
    if offset == 0:
        return tree
    return AdversaryTree(
        level=tree.level,
        servers=tuple(s + offset for s in tree.servers),
        free_side=tree.free_side,
        free_pos=tree.free_pos + offset,
        requests_by_level=tuple(tuple(r + offset for r in lvl) for lvl in tree.requests_by_level),
        expected_by_level=tuple(tuple((r + offset, s + offset) for r, s in lvl) for lvl in tree.expected_by_level),
        left=translate_tree(tree.left, offset) if tree.left else None,
        right=translate_tree(tree.right, offset) if tree.right else None,
    )


def _mirror_around(tree: AdversaryTree, c: Fraction) -> AdversaryTree:
    side = tree.free_side.opposite() if tree.free_side else None
    return AdversaryTree(
        level=tree.level,
        servers=tuple(sorted(c - s for s in tree.servers)),
        free_side=side,
        free_pos=c - tree.free_pos,
        requests_by_level=tuple(tuple(sorted(c - r for r in lvl)) for lvl in tree.requests_by_level),
        expected_by_level=tuple(
            tuple(sorted(((c - r, c - s) for r, s in lvl), key=lambda p: p[0]))
            for lvl in tree.expected_by_level
        ),
        left=_mirror_around(tree.right, c) if tree.right else None,
        right=_mirror_around(tree.left, c) if tree.left else None,
    )


def mirror_tree(tree: AdversaryTree) -> AdversaryTree:
    """Reflect the tree across the midpoint of its own span; free side flips."""
    return _mirror_around(tree, tree.leftmost + tree.rightmost)


def combine(left: AdversaryTree, right: AdversaryTree, a: Fraction, b: Fraction,
            matched_side: Side) -> AdversaryTree:
    """One construction level: left subtree, gap a, request, gap b, right subtree.

    The request is matched to the free server of the ``matched_side`` subtree;
    the other subtree's free server survives and must sit at the new node's
    outer boundary, which the side invariants of the children guarantee.
    """
    a, b = as_rational(a), as_rational(b)
    if left.free_side not in (None, Side.LEFT):
        raise ValueError("left subtree must keep its leftmost server free")
    if right.free_side not in (None, Side.RIGHT):
        raise ValueError("right subtree must keep its rightmost server free")
    request_pos = left.rightmost + a
    right_t = translate_tree(right, request_pos + b - right.leftmost)
    if matched_side is Side.RIGHT:
        matched_pos = right_t.free_pos
        free_pos, free_side = left.free_pos, Side.LEFT
    else:
        matched_pos = left.free_pos
        free_pos, free_side = right_t.free_pos, Side.RIGHT
    level = max(left.level, right.level) + 1
    req_levels = []
    exp_levels = []
    for i in range(level - 1):
        lreq = left.requests_by_level[i] if i < len(left.requests_by_level) else ()
        rreq = right_t.requests_by_level[i] if i < len(right_t.requests_by_level) else ()
        req_levels.append(lreq + rreq)
        lexp = left.expected_by_level[i] if i < len(left.expected_by_level) else ()
        rexp = right_t.expected_by_level[i] if i < len(right_t.expected_by_level) else ()
        exp_levels.append(lexp + rexp)
    req_levels.append((request_pos,))
    exp_levels.append(((request_pos, matched_pos),))
    return AdversaryTree(
        level=level,
        servers=left.servers + right_t.servers,
        free_side=free_side,
        free_pos=free_pos,
        requests_by_level=tuple(req_levels),
        expected_by_level=tuple(exp_levels),
        left=left,
        right=right_t,
    )


def _probe_template(left: AdversaryTree, right: AdversaryTree, a: Fraction):
    """Precompute everything about the probe window that does not depend on b.

    Returns (request position, merged history template, right free offset);
    template entries are (from_right, server pos, request pos) with the right
    tree's positions relative to its own leftmost server.
    """
    request_pos = left.rightmost + as_rational(a)
    shift = right.leftmost
    template: list[tuple[bool, Fraction, Fraction]] = []
    depth = max(len(left.expected_by_level), len(right.expected_by_level))
    for i in range(depth):
        if i < len(left.expected_by_level):
            template.extend((False, spos, rpos) for rpos, spos in left.expected_by_level[i])
        if i < len(right.expected_by_level):
            template.extend((True, spos - shift, rpos - shift) for rpos, spos in right.expected_by_level[i])
    return request_pos, template, right.free_pos - shift


def _probe_from_template(s_left: Fraction, request_pos: Fraction, template,
                         free_offset: Fraction, b: Fraction) -> LocalInterval:
    base = request_pos + b
    history = tuple(
        (spos + base, rpos + base) if from_right else (spos, rpos)
        for from_right, spos, rpos in template
    )
    from .core import _interval_trusted
    return _interval_trusted(s_left, request_pos, base + free_offset, history)


def probe_interval(left: AdversaryTree, right: AdversaryTree, a: Fraction, b: Fraction) -> LocalInterval:
    """The local window a choice function sees for the request joining two trees.

    Interior history lists both subtrees' matched pairs level by level (the
    arrival order), left before right within a level.
    """
    request_pos, template, free_offset = _probe_template(left, right, a)
    return _probe_from_template(left.free_pos, request_pos, template, free_offset, as_rational(b))


@dataclass(frozen=True)
class GapLedger:
    """Per-level gap bookkeeping (a_i, b_i); x_i = a_i + b_i drives every bound."""

    levels: tuple[tuple[Fraction, Fraction], ...]
    eps: Fraction
    mode: str

    @property
    def k(self) -> int:
        return len(self.levels)

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(a + b for a, b in self.levels)

    def to_meta(self) -> dict:
        return {
            "mode": self.mode,
            "eps": format_rational(self.eps),
            "a": [format_rational(a) for a, _ in self.levels],
            "b": [format_rational(b) for _, b in self.levels],
            "x": [format_rational(x) for x in self.xs],
        }

    @staticmethod
    def from_meta(meta: dict) -> "GapLedger":
        levels = tuple(
            (Fraction(a), Fraction(b)) for a, b in zip(meta["a"], meta["b"])
        )
        return GapLedger(levels, Fraction(meta["eps"]), meta["mode"])


@dataclass(frozen=True)
class UnboundedWitness:
    """A probe transcript showing the choice function never flips.

    A constant-Right function chases the far gap (tested at the budget B); a
    constant-Left one ignores it (tested at the minimal gap).  Either way the
    adversary can stretch the corresponding gap at will.
    """

    level: int
    interval: LocalInterval
    side: Side
    gap: Fraction

    def replay(self, choice) -> bool:
        return choice.choose(self.interval) is self.side

    def to_jsonable(self) -> dict:
        return {
            "level": self.level,
            "side": self.side.value,
            "gap": format_rational(self.gap),
            "interval": {
                "s_left": format_rational(self.interval.s_left),
                "request": format_rational(self.interval.request),
                "s_right": format_rational(self.interval.s_right),
                "history": [
                    [format_rational(s), format_rational(r)] for s, r in self.interval.history
                ],
            },
        }


@dataclass(frozen=True)
class FlipGap:
    """b such that gap b elicits Right and gap b + eps elicits Left."""

    b: Fraction


FlipResult = Union[FlipGap, UnboundedWitness]


def find_flip_gap(choice, left: AdversaryTree, right: AdversaryTree, a: Fraction,
                  eps: Fraction, budget: Fraction, level: int = 0) -> FlipResult:
    """Search the right-hand gap at which the choice function flips Right -> Left.

    The scan runs on the grid {m * eps}: doubling until a Left answer appears,
    then integer bisection of the bracket.  No monotonicity is assumed; any
    adjacent sign change is accepted.  A constant answer over the whole grid
    is reported as an unbounded witness instead of an error.
    """
    a, eps, budget = as_rational(a), as_rational(eps), as_rational(budget)
    if eps <= 0 or a <= 0 or budget <= eps:
        raise ValueError("need a > 0, eps > 0, budget > eps")
    m_max = int(budget / eps)
    request_pos, template, free_offset = _probe_template(left, right, a)
    s_left = left.free_pos

    def probe(m: int) -> Side:
        return choice.choose(_probe_from_template(s_left, request_pos, template, free_offset, m * eps))

    if probe(1) is Side.LEFT:
        return UnboundedWitness(level, probe_interval(left, right, a, eps), Side.LEFT, eps)
    lo = 1  # Right here
    hi = None
    m = 2
    while m < m_max:
        if probe(m) is Side.LEFT:
            hi = m
            break
        lo = m
        m *= 2
    if hi is None:
        if probe(m_max) is Side.LEFT:
            hi = m_max
        else:
            return UnboundedWitness(level, probe_interval(left, right, a, budget), Side.RIGHT, budget)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid) is Side.RIGHT:
            lo = mid
        else:
            hi = mid
    return FlipGap(lo * eps)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstructionBuild:
    """A built instance plus everything needed to verify a replay."""

    instance: Instance
    ledger: GapLedger
    trees: tuple[AdversaryTree, ...]
    request_level: dict = field(compare=False)       # request id -> level (0 = cleanup)
    expected_server_pos: dict = field(compare=False)  # request id -> server position


def _assemble(trees: Sequence[AdversaryTree], ledger: GapLedger,
              cleanup: Sequence[Fraction] = (), extra_meta: Optional[dict] = None) -> ConstructionBuild:
    servers = [pos for t in trees for pos in t.servers]
    depth = max(t.level for t in trees)
    arrivals: list[tuple[Fraction, int, Optional[Fraction]]] = []
    for lvl in range(1, depth + 1):
        per_level = []
        for t in trees:
            if lvl <= len(t.requests_by_level):
                per_level.extend(t.expected_by_level[lvl - 1])
        per_level.sort(key=lambda p: p[0])
        arrivals.extend((rpos, lvl, spos) for rpos, spos in per_level)
    for pos in cleanup:
        arrivals.append((pos, 0, pos))
    meta = {"ledger": ledger.to_meta()}
    if extra_meta:
        meta.update(extra_meta)
    instance = Instance.from_positions(servers, [pos for pos, _, _ in arrivals], meta)
    request_level = {rid: lvl for (rid, _), (_, lvl, _) in zip(instance.requests, arrivals)}
    expected = {rid: spos for (rid, _), (_, _, spos) in zip(instance.requests, arrivals) if spos is not None}
    return ConstructionBuild(instance, ledger, tuple(trees), request_level, expected)


def build_symmetric(k: int, eps: Fraction) -> ConstructionBuild:
    """The fixed two-gap tree: every level joins mirror-image subtrees with
    gaps 1 and 1+eps, oriented so a closest-server decision keeps the outer
    server of each subtree free.

    Emits 2**k servers and 2**k - 1 requests, deepest level first.  The ledger
    records (a_i, b_i) = (1, 1+eps) at every level.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    one = Fraction(1)
    t_left_free = leaf()
    t_right_free = leaf()
    for _ in range(k):
        new_left = combine(t_left_free, t_right_free, one + eps, one, Side.RIGHT)
        new_right = combine(t_left_free, t_right_free, one, one + eps, Side.LEFT)
        t_left_free, t_right_free = new_left, new_right
    root = t_right_free  # (1, 1+eps) orientation: level-1 request sits at distance 1 from the left server
    ledger = GapLedger(tuple((one, one + eps) for _ in range(k)), eps, "symmetric")
    return _assemble([root], ledger)


def build_adaptive(choice, k: int, eps: Fraction, budget: Fraction) -> Union[ConstructionBuild, UnboundedWitness]:
    """Adversarial tree tailored to a choice function.

    Per level the left gap is fixed to 1 and the right gap searched so the
    choice answers Right; the sibling tree bumps that gap by eps to force
    Left.  The final instance is T_k next to (mirrored-role) T_k-bar with no
    top request, plus two cleanup requests collocated with the two free
    servers.  A never-flipping choice short-circuits into its witness.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    eps = as_rational(eps)
    a = Fraction(1)
    t_left_free = leaf()
    t_right_free = leaf()
    levels = []
    for level in range(1, k + 1):
        found = find_flip_gap(choice, t_left_free, t_right_free, a, eps, budget, level=level)
        if isinstance(found, UnboundedWitness):
            return found
        b = found.b
        new_left = combine(t_left_free, t_right_free, a, b, Side.RIGHT)
        new_right = combine(t_left_free, t_right_free, a, b + eps, Side.LEFT)
        t_left_free, t_right_free = new_left, new_right
        levels.append((a, b))
    ledger = GapLedger(tuple(levels), eps, "adaptive")
    separation = Fraction(2)
    right_tree = translate_tree(t_right_free, t_left_free.rightmost + separation - t_right_free.leftmost)
    cleanup = [t_left_free.free_pos, right_tree.free_pos]
    return _assemble([t_left_free, right_tree], ledger, cleanup=cleanup,
                     extra_meta={"cleanup_requests": 2})


def build_randomized(schedule: Sequence[tuple[Fraction, Fraction]], k: int) -> ConstructionBuild:
    """Same-shape tree for randomized lower bounds: both children of every
    level are identical copies, gaps (a_i, b_i) come from the schedule, and
    the leftmost server sits at position 2.

    Gaps may be zero (collocated points).  The accounting convention for the
    randomized ratio bound zeroes the top level; the builder records the
    schedule verbatim and leaves that convention to the bound evaluator.
    """
    schedule = [(as_rational(a), as_rational(b)) for a, b in schedule]
    if len(schedule) != k:
        raise ValueError(f"schedule must list {k} levels, got {len(schedule)}")
    for a, b in schedule:
        if a < 0 or b < 0:
            raise ValueError("gaps must be nonnegative")
    servers = [Fraction(0)]
    requests_by_level: list[list[Fraction]] = []
    for a, b in schedule:
        span = servers[-1] - servers[0]
        offset = span + a + b
        request = servers[-1] + a
        requests_by_level = [lvl + [r + offset for r in lvl] for lvl in requests_by_level]
        requests_by_level.append([request])
        servers = servers + [s + offset for s in servers]
    shift = Fraction(2)
    servers = [s + shift for s in servers]
    arrivals: list[tuple[Fraction, int]] = []
    for lvl, reqs in enumerate(requests_by_level, start=1):
        arrivals.extend((r + shift, lvl) for r in sorted(reqs))
    ledger = GapLedger(tuple(schedule), Fraction(0), "randomized")
    meta = {"ledger": ledger.to_meta()}
    instance = Instance.from_positions(servers, [pos for pos, _ in arrivals], meta)
    request_level = {rid: lvl for (rid, _), (_, lvl) in zip(instance.requests, arrivals)}
    return ConstructionBuild(instance, ledger, (), request_level, {})
