"""Pebble games over DAGs: black-white, labelled, and blob variants.

Validators are pure functions over immutable traces; optimal prices are
computed by exact breadth-first search over configuration space with
the moves explored in canonical vertex order (removals before
placements), so repeated runs return identical prices and witnesses.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dag import Dag
from .errors import (
    BudgetExceeded,
    IllegalMove,
    PeblabError,
    TraceError,
    WhitePebbleInBlackOnly,
    WrongEndpoints,
    search_budget,
)


# -- black-white game -----------------------------------------------------


@dataclass(frozen=True)
class BwConfiguration:
    black: frozenset[str] = frozenset()
    white: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.black & self.white:
            raise ValueError(f"vertices doubly pebbled: {sorted(self.black & self.white)}")

    @property
    def size(self) -> int:
        return len(self.black) + len(self.white)

    def __str__(self) -> str:
        b = ",".join(sorted(self.black)) or "-"
        w = ",".join(sorted(self.white)) or "-"
        return f"(B:{b} W:{w})"


@dataclass(frozen=True)
class BwPebbling:
    host: Dag
    steps: tuple[BwConfiguration, ...]

    @property
    def time(self) -> int:
        return len(self.steps) - 1


@dataclass(frozen=True)
class PebblingCost:
    time: int
    space: int


def validate_bw(pebbling: BwPebbling, black_only: bool = False) -> PebblingCost:
    """Check every transition against rules 1-4 and the endpoints.

    Rule 1: a black pebble may be placed on an empty vertex whose
    predecessors are all pebbled.  Rule 2: a black pebble may be removed
    at any time.  Rule 3: a white pebble may be placed on any empty
    vertex.  Rule 4: a white pebble may be removed if the vertex's
    predecessors are all pebbled.  Exactly one pebble changes per step.
    """
    g = pebbling.host
    steps = pebbling.steps
    if not steps:
        raise WrongEndpoints("pebbling has no configurations")
    for t, conf in enumerate(steps):
        for v in conf.black | conf.white:
            if not g.has_vertex(v):
                raise IllegalMove(t, f"unknown vertex {v!r}")
        if black_only and conf.white:
            raise WhitePebbleInBlackOnly(t)
    if steps[0].black or steps[0].white:
        raise WrongEndpoints("pebbling must start from the empty configuration")

    space = 0
    for t in range(1, len(steps)):
        prev, cur = steps[t - 1], steps[t]
        black_add = cur.black - prev.black
        black_rem = prev.black - cur.black
        white_add = cur.white - prev.white
        white_rem = prev.white - cur.white
        changed = len(black_add) + len(black_rem) + len(white_add) + len(white_rem)
        if changed != 1:
            raise IllegalMove(t, f"exactly one pebble must change, {changed} changed")
        pebbled = prev.black | prev.white
        if black_add:
            (v,) = black_add
            if v in prev.white:
                raise IllegalMove(t, f"black placed on white-pebbled vertex {v}")
            missing = [u for u in g.predecessors(v) if u not in pebbled]
            if missing:
                raise IllegalMove(t, f"rule 1: predecessors {missing} of {v} unpebbled")
        elif white_add:
            (v,) = white_add
            if v in prev.black:
                raise IllegalMove(t, f"white placed on black-pebbled vertex {v}")
        elif white_rem:
            (v,) = white_rem
            missing = [u for u in g.predecessors(v) if u not in pebbled]
            if missing:
                raise IllegalMove(t, f"rule 4: predecessors {missing} of {v} unpebbled")
        # black removal (rule 2) is always legal
        space = max(space, cur.size)
    last = steps[-1]
    if last.black != frozenset({g.sink}) or last.white:
        raise WrongEndpoints(f"pebbling must end at ({{{g.sink}}}, {{}}), got {last}")
    return PebblingCost(time=len(steps) - 1, space=space)


def greedy_black_strategy(g: Dag) -> BwPebbling:
    """Pebble-the-predecessors-then-the-vertex recursion in canonical order.

    Valid complete black pebbling for any DAG; not space-optimal.
    """
    cur: set[str] = set()
    steps = [BwConfiguration()]

    def snapshot():
        steps.append(BwConfiguration(black=frozenset(cur)))

    def visit(v: str) -> None:
        if v in cur:
            return
        placed_here = []
        for u in g.predecessors(v):
            if u not in cur:
                visit(u)
                placed_here.append(u)
        cur.add(v)
        snapshot()
        for u in placed_here:
            cur.remove(u)
            snapshot()

    visit(g.sink)
    return BwPebbling(host=g, steps=tuple(steps))


# -- optimal prices by exhaustive search ----------------------------------


def _bit_index(g: Dag) -> dict[str, int]:
    return {v: i for i, v in enumerate(g.topological_order())}


def optimal_black_pebbling(g: Dag, budget=None) -> BwPebbling:
    """A minimum-space complete black pebbling, by iterative deepening BFS."""
    limit = search_budget(budget)
    order = g.topological_order()
    bit = _bit_index(g)
    pred_masks = {}
    for v in order:
        m = 0
        for u in g.predecessors(v):
            m |= 1 << bit[u]
        pred_masks[v] = m
    sink_bit = 1 << bit[g.sink]
    visited_total = 0

    for s in range(1, len(order) + 1):
        parents: dict[int, tuple[int, int]] = {0: (-1, -1)}
        queue = deque([0])
        goal = None
        while queue:
            state = queue.popleft()
            visited_total += 1
            if visited_total > limit:
                raise BudgetExceeded(visited_total, limit, "black pebbling price search")
            if state & sink_bit:
                goal = state
                break
            size = bin(state).count("1")
            nxt = []
            for v in order:  # removals first, then placements
                b = 1 << bit[v]
                if state & b:
                    nxt.append(state & ~b)
            if size < s:
                for v in order:
                    b = 1 << bit[v]
                    if not state & b and state & pred_masks[v] == pred_masks[v]:
                        nxt.append(state | b)
            for new in nxt:
                if new not in parents:
                    parents[new] = (state, 0)
                    queue.append(new)
        if goal is None:
            continue
        path = []
        state = goal
        while state != -1:
            path.append(state)
            state = parents[state][0]
        path.reverse()
        # strip extra pebbles to end at exactly {sink}
        tail = goal
        for v in order:
            b = 1 << bit[v]
            if tail & b and b != sink_bit:
                tail &= ~b
                path.append(tail)
        steps = tuple(
            BwConfiguration(black=frozenset(v for v in order if st & (1 << bit[v])))
            for st in path
        )
        return BwPebbling(host=g, steps=steps)
    raise PeblabError("unreachable: every DAG admits a black pebbling")


def optimal_black_price(g: Dag, budget=None) -> int:
    """Peb(G): minimum space over all complete black pebblings; exact."""
    return validate_bw(optimal_black_pebbling(g, budget), black_only=True).space


def optimal_bw_pebbling(g: Dag, budget=None) -> BwPebbling:
    """A minimum-space complete black-white pebbling."""
    limit = search_budget(budget)
    order = g.topological_order()
    bit = _bit_index(g)
    pred_masks = {}
    for v in order:
        m = 0
        for u in g.predecessors(v):
            m |= 1 << bit[u]
        pred_masks[v] = m
    sink_bit = 1 << bit[g.sink]
    visited_total = 0

    for s in range(1, len(order) + 1):
        start = (0, 0)
        parents: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
        queue = deque([start])
        goal = None
        while queue:
            state = queue.popleft()
            visited_total += 1
            if visited_total > limit:
                raise BudgetExceeded(visited_total, limit, "black-white pebbling price search")
            black, white = state
            if black & sink_bit and white == 0:
                goal = state
                break
            both = black | white
            size = bin(both).count("1")
            nxt = []
            for v in order:  # removals first
                b = 1 << bit[v]
                if black & b:
                    nxt.append((black & ~b, white))
                elif white & b and both & pred_masks[v] == pred_masks[v]:
                    nxt.append((black, white & ~b))
            if size < s:
                for v in order:
                    b = 1 << bit[v]
                    if both & b:
                        continue
                    if both & pred_masks[v] == pred_masks[v]:
                        nxt.append((black | b, white))
                    nxt.append((black, white | b))
            for new in nxt:
                if new not in parents:
                    parents[new] = state
                    queue.append(new)
        if goal is None:
            continue
        path = []
        state = goal
        while state is not None:
            path.append(state)
            state = parents[state]
        path.reverse()
        black, white = goal
        for v in order:
            b = 1 << bit[v]
            if black & b and b != sink_bit:
                black &= ~b
                path.append((black, white))
        steps = tuple(
            BwConfiguration(
                black=frozenset(v for v in order if st[0] & (1 << bit[v])),
                white=frozenset(v for v in order if st[1] & (1 << bit[v])),
            )
            for st in path
        )
        return BwPebbling(host=g, steps=steps)
    raise PeblabError("unreachable: every DAG admits a black-white pebbling")


def optimal_bw_price(g: Dag, budget=None) -> int:
    """BW-Peb(G): minimum space over all complete black-white pebblings; exact."""
    return validate_bw(optimal_bw_pebbling(g, budget)).space


# -- labelled (L-) pebblings ----------------------------------------------


@dataclass(frozen=True)
class Subconf:
    """Pebble subconfiguration <v, W>: black pebble on v supported by whites W."""

    vertex: str
    support: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.vertex in self.support:
            raise ValueError(f"black vertex {self.vertex} inside its own support")

    def __str__(self) -> str:
        return f"<{self.vertex},{{{','.join(sorted(self.support))}}}>"


@dataclass(frozen=True)
class LabelledConfiguration:
    subconfs: frozenset[Subconf] = frozenset()

    def blacks(self) -> frozenset[str]:
        return frozenset(sc.vertex for sc in self.subconfs)

    def whites(self) -> frozenset[str]:
        out: set[str] = set()
        for sc in self.subconfs:
            out |= sc.support
        return frozenset(out)

    @property
    def size(self) -> int:
        return len(self.blacks() | self.whites())


@dataclass(frozen=True)
class LabelledPebbling:
    host: Dag
    steps: tuple[LabelledConfiguration, ...]

    @property
    def time(self) -> int:
        return len(self.steps) - 1


@dataclass(frozen=True)
class LabelledCost:
    time: int
    space: int
    bound: tuple[int, int]  # tightest (b, w)


def _labelled_move(g: Dag, prev: frozenset[Subconf], cur: frozenset[Subconf], t: int):
    """Classify one transition; returns a move descriptor or raises IllegalMove."""
    added = cur - prev
    removed = prev - cur
    if len(removed) == 1 and not added:
        return ("erase", next(iter(removed)))
    if len(added) == 1 and not removed:
        (sc,) = added
        if sc.support == frozenset(g.predecessors(sc.vertex)):
            return ("intro", sc)
        for first in sorted(prev, key=str):
            if first.vertex != sc.vertex:
                continue
            for second in sorted(prev, key=str):
                if second.vertex not in first.support:
                    continue
                if sc.vertex in second.support:
                    continue
                merged = (first.support | second.support) - {second.vertex}
                if merged == sc.support:
                    return ("merge", first, second, sc)
        raise IllegalMove(t, f"{sc} is neither an introduction nor a merger")
    raise IllegalMove(t, "exactly one subconfiguration must be added or removed")


def validate_labelled(p: LabelledPebbling) -> LabelledCost:
    """Accept iff every step is a legal Introduction, Merger, or Erasure;
    reports time, space, and the tightest (b, w) boundedness parameters."""
    g = p.host
    steps = p.steps
    if not steps:
        raise WrongEndpoints("pebbling has no configurations")
    for t, conf in enumerate(steps):
        for sc in conf.subconfs:
            for v in {sc.vertex} | sc.support:
                if not g.has_vertex(v):
                    raise IllegalMove(t, f"unknown vertex {v!r}")
    if steps[0].subconfs:
        raise WrongEndpoints("L-pebbling must start from the empty configuration")

    space = 0
    b = 0
    w = 0
    for t in range(1, len(steps)):
        _labelled_move(g, steps[t - 1].subconfs, steps[t].subconfs, t)
        conf = steps[t]
        space = max(space, conf.size)
        b = max(b, len(conf.subconfs))
        for sc in conf.subconfs:
            w = max(w, len(sc.support))
    if steps[-1].subconfs != frozenset({Subconf(g.sink)}):
        raise WrongEndpoints(f"L-pebbling must end at {{<{g.sink},{{}}>}}")
    return LabelledCost(time=len(steps) - 1, space=space, bound=(b, w))


def black_to_labelled(p: BwPebbling) -> LabelledPebbling:
    """Render a black-only pebbling as an L-pebbling.

    Each placement becomes an introduction followed by interleaved
    merger/erasure pairs that strip the white support, keeping at most
    one extra subconfiguration alive; a pebbling of space s and fan-in
    l becomes (s+1, l)-bounded.
    """
    g = p.host
    validate_bw(p, black_only=True)
    cur: set[Subconf] = set()
    steps = [LabelledConfiguration()]

    def snapshot():
        steps.append(LabelledConfiguration(frozenset(cur)))

    for t in range(1, len(p.steps)):
        prev_conf, conf = p.steps[t - 1], p.steps[t]
        added = conf.black - prev_conf.black
        removed = prev_conf.black - conf.black
        if added:
            (v,) = added
            preds = g.predecessors(v)
            work = Subconf(v, frozenset(preds))
            cur.add(work)
            snapshot()
            for u in preds:
                merged = Subconf(v, work.support - {u})
                cur.add(merged)
                snapshot()
                cur.remove(work)
                snapshot()
                work = merged
        else:
            (v,) = removed
            cur.remove(Subconf(v))
            snapshot()
    return LabelledPebbling(host=g, steps=tuple(steps))


@dataclass(frozen=True)
class BoundedSpaceReport:
    cost: LabelledCost
    bw_price: int
    bound_product: int  # b * (w + 1)


def check_bounded_space_consequence(p: LabelledPebbling, budget=None) -> BoundedSpaceReport:
    """Check the testable consequences of the L-to-black-white simulation:
    BW-Peb(host) <= space(p), and space(p) <= b(w+1) for the tightest (b,w)."""
    cost = validate_labelled(p)
    price = optimal_bw_price(p.host, budget)
    product = cost.bound[0] * (cost.bound[1] + 1)
    if price > cost.space:
        raise PeblabError(
            f"bounded-space consequence violated: BW-Peb={price} > space {cost.space}"
        )
    if cost.space > product:
        raise PeblabError(
            f"bounded-space consequence violated: space {cost.space} > b(w+1)={product}"
        )
    return BoundedSpaceReport(cost=cost, bw_price=price, bound_product=product)


# -- blob pebblings --------------------------------------------------------


@dataclass(frozen=True)
class BlobSubconf:
    """Blob subconfiguration [B, W]: black blob on vertex set B, whites W."""

    blob: frozenset[str]
    support: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.blob:
            raise ValueError("blob must be nonempty")
        if self.blob & self.support:
            raise ValueError(f"blob and support overlap: {sorted(self.blob & self.support)}")

    def __str__(self) -> str:
        return f"[{{{','.join(sorted(self.blob))}}},{{{','.join(sorted(self.support))}}}]"


@dataclass(frozen=True)
class BlobConfiguration:
    subconfs: frozenset[BlobSubconf] = frozenset()


@dataclass(frozen=True)
class BlobPebbling:
    host: Dag
    steps: tuple[BlobConfiguration, ...]

    @property
    def time(self) -> int:
        return len(self.steps) - 1


def _blob_move(g: Dag, prev: frozenset[BlobSubconf], cur: frozenset[BlobSubconf], t: int):
    added = cur - prev
    removed = prev - cur
    if len(removed) == 1 and not added:
        return ("erase", next(iter(removed)))
    if len(added) == 1 and not removed:
        (sc,) = added
        if len(sc.blob) == 1:
            (v,) = sc.blob
            if sc.support == frozenset(g.predecessors(v)):
                return ("intro", sc)
        for first in sorted(prev, key=str):
            for second in sorted(prev, key=str):
                for v in sorted(first.support & second.blob):
                    b1, w1 = first.blob, first.support - {v}
                    b2, w2 = second.blob - {v}, second.support
                    if b1 & w2:
                        continue
                    if b1 | b2 == sc.blob and w1 | w2 == sc.support:
                        return ("merge", first, second, v, sc)
        for src in sorted(prev, key=str):
            if src.blob <= sc.blob and src.support <= sc.support:
                return ("inflate", src, sc)
        raise IllegalMove(t, f"{sc} is not an introduction, merger, or inflation")
    raise IllegalMove(t, "exactly one subconfiguration must be added or removed")


def blob_config_space(g: Dag, conf: BlobConfiguration, budget=None) -> int:
    """Chargeable cost of one blob configuration.

    Black cost: the largest m such that some ordering of m distinct
    blobs has strictly expanding unions (exhaustive search over subsets,
    memoized).  White cost: number of distinct supporting whites lying
    below every vertex of their blob.
    """
    limit = search_budget(budget)
    blobs = sorted({sc.blob for sc in conf.subconfs}, key=lambda b: (len(b), sorted(b)))
    best = 0
    visited = 0
    seen = {frozenset()}
    frontier = [(frozenset(), frozenset())]  # (chosen indices, union)
    while frontier:
        chosen, union = frontier.pop()
        best = max(best, len(chosen))
        for i, blob in enumerate(blobs):
            if i in chosen or blob <= union:
                continue
            nxt = frozenset(chosen | {i})
            if nxt in seen:
                continue
            seen.add(nxt)
            visited += 1
            if visited > limit:
                raise BudgetExceeded(visited, limit, "blob black-cost search")
            frontier.append((nxt, union | blob))

    chargeable: set[str] = set()
    below: dict[str, frozenset[str]] = {}
    for sc in conf.subconfs:
        for wv in sc.support:
            if wv not in below:
                below[wv] = g.reachable_from(wv)
            if all(b in below[wv] for b in sc.blob):
                chargeable.add(wv)
    return best + len(chargeable)


def validate_blob(p: BlobPebbling, budget=None) -> PebblingCost:
    """Accept iff every step is a legal Introduction, Merger, Inflation, or
    Erasure; space per the chargeable-cost measure."""
    g = p.host
    steps = p.steps
    if not steps:
        raise WrongEndpoints("pebbling has no configurations")
    for t, conf in enumerate(steps):
        for sc in conf.subconfs:
            for v in sc.blob | sc.support:
                if not g.has_vertex(v):
                    raise IllegalMove(t, f"unknown vertex {v!r}")
    if steps[0].subconfs:
        raise WrongEndpoints("blob pebbling must start from the empty configuration")

    space = 0
    for t in range(1, len(steps)):
        _blob_move(g, steps[t - 1].subconfs, steps[t].subconfs, t)
        space = max(space, blob_config_space(g, steps[t], budget))
    if steps[-1].subconfs != frozenset({BlobSubconf(frozenset({g.sink}))}):
        raise WrongEndpoints(f"blob pebbling must end at {{[{{{g.sink}}},{{}}]}}")
    return PebblingCost(time=len(steps) - 1, space=space)


# -- trace format ----------------------------------------------------------
#
# Line-oriented, `#` comments.  Header: `game bw` | `game labelled` |
# `game blob`.  BW moves: `B+ v`, `B- v`, `W+ v`, `W- v`.  Labelled/blob
# moves reference subconfigurations by creation index (1-based):
# `I v` introduce, `M i j` merge (blob may need `M i j v` to fix the
# pivot), `E i` erase, and for blob games `X i : b1 b2 / w1 w2` inflates
# subconfiguration i to the given blob and support.


def serialize_pebbling(p: BwPebbling | LabelledPebbling | BlobPebbling) -> str:
    if isinstance(p, BwPebbling):
        lines = ["game bw"]
        for t in range(1, len(p.steps)):
            prev, cur = p.steps[t - 1], p.steps[t]
            for v in sorted(cur.black - prev.black):
                lines.append(f"B+ {v}")
            for v in sorted(prev.black - cur.black):
                lines.append(f"B- {v}")
            for v in sorted(cur.white - prev.white):
                lines.append(f"W+ {v}")
            for v in sorted(prev.white - cur.white):
                lines.append(f"W- {v}")
        return "\n".join(lines) + "\n"

    if isinstance(p, LabelledPebbling):
        lines = ["game labelled"]
        index: dict[Subconf, int] = {}  # value -> latest creation id
        creations = 0
        for t in range(1, len(p.steps)):
            move = _labelled_move(p.host, p.steps[t - 1].subconfs, p.steps[t].subconfs, t)
            if move[0] == "intro":
                creations += 1
                index[move[1]] = creations
                lines.append(f"I {move[1].vertex}")
            elif move[0] == "merge":
                _, first, second, sc = move
                lines.append(f"M {index[first]} {index[second]}")
                creations += 1
                index[sc] = creations
            else:
                lines.append(f"E {index[move[1]]}")
        return "\n".join(lines) + "\n"

    if isinstance(p, BlobPebbling):
        lines = ["game blob"]
        index: dict[BlobSubconf, int] = {}
        creations = 0
        for t in range(1, len(p.steps)):
            move = _blob_move(p.host, p.steps[t - 1].subconfs, p.steps[t].subconfs, t)
            if move[0] == "intro":
                sc = move[1]
                creations += 1
                index[sc] = creations
                (v,) = sc.blob
                lines.append(f"I {v}")
            elif move[0] == "merge":
                _, first, second, v, sc = move
                lines.append(f"M {index[first]} {index[second]} {v}")
                creations += 1
                index[sc] = creations
            elif move[0] == "inflate":
                _, src, sc = move
                lines.append(
                    f"X {index[src]} : {' '.join(sorted(sc.blob))} / {' '.join(sorted(sc.support))}"
                )
                creations += 1
                index[sc] = creations
            else:
                lines.append(f"E {index[move[1]]}")
        return "\n".join(lines) + "\n"

    raise TypeError(f"not a pebbling: {p!r}")


def parse_pebbling_trace(text: str, host: Dag):
    """Parse a pebbling trace into the pebbling object its header names."""
    body: list[tuple[int, list[str]]] = []
    game = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        # whole-line comments only: vertex names are opaque and may contain '#'
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if game is None:
            if fields[0] != "game" or len(fields) != 2:
                raise TraceError("first directive must be 'game <variant>'", line=lineno)
            game = fields[1]
            if game not in ("bw", "labelled", "blob"):
                raise TraceError(f"unknown game variant {game!r}", line=lineno)
            continue
        body.append((lineno, fields))
    if game is None:
        raise TraceError("empty trace: missing 'game' header")

    if game == "bw":
        black: set[str] = set()
        white: set[str] = set()
        steps = [BwConfiguration()]
        ops = {"B+": (black, "add"), "B-": (black, "remove"), "W+": (white, "add"), "W-": (white, "remove")}
        for lineno, fields in body:
            if len(fields) != 2 or fields[0] not in ops:
                raise TraceError(f"bad bw move {' '.join(fields)!r}", line=lineno)
            target, action = ops[fields[0]]
            v = fields[1]
            if action == "add":
                if v in black or v in white:
                    raise TraceError(f"vertex {v} already pebbled", line=lineno)
                target.add(v)
            else:
                if v not in target:
                    raise TraceError(f"no such pebble to remove on {v}", line=lineno)
                target.remove(v)
            steps.append(BwConfiguration(black=frozenset(black), white=frozenset(white)))
        return BwPebbling(host=host, steps=tuple(steps))

    if game == "labelled":
        created: list[Subconf] = []
        present: set[Subconf] = set()
        steps = [LabelledConfiguration()]

        def fetch(tok, lineno):
            try:
                sc = created[int(tok) - 1]
            except (ValueError, IndexError):
                raise TraceError(f"bad subconfiguration index {tok!r}", line=lineno) from None
            if sc not in present:
                raise TraceError(f"subconfiguration {sc} not present", line=lineno)
            return sc

        for lineno, fields in body:
            if fields[0] == "I" and len(fields) == 2:
                v = fields[1]
                if not host.has_vertex(v):
                    raise TraceError(f"unknown vertex {v!r}", line=lineno)
                sc = Subconf(v, frozenset(host.predecessors(v)))
            elif fields[0] == "M" and len(fields) == 3:
                first = fetch(fields[1], lineno)
                second = fetch(fields[2], lineno)
                if second.vertex not in first.support:
                    raise TraceError(f"merger pivot {second.vertex} not in support of {first}", line=lineno)
                try:
                    sc = Subconf(first.vertex, (first.support | second.support) - {second.vertex})
                except ValueError as e:
                    raise TraceError(str(e), line=lineno) from None
            elif fields[0] == "E" and len(fields) == 2:
                sc = fetch(fields[1], lineno)
                present.remove(sc)
                steps.append(LabelledConfiguration(frozenset(present)))
                continue
            else:
                raise TraceError(f"bad labelled move {' '.join(fields)!r}", line=lineno)
            created.append(sc)
            present.add(sc)
            steps.append(LabelledConfiguration(frozenset(present)))
        return LabelledPebbling(host=host, steps=tuple(steps))

    created_b: list[BlobSubconf] = []
    present_b: set[BlobSubconf] = set()
    steps_b = [BlobConfiguration()]

    def fetch_b(tok, lineno):
        try:
            sc = created_b[int(tok) - 1]
        except (ValueError, IndexError):
            raise TraceError(f"bad subconfiguration index {tok!r}", line=lineno) from None
        if sc not in present_b:
            raise TraceError(f"subconfiguration {sc} not present", line=lineno)
        return sc

    for lineno, fields in body:
        if fields[0] == "I" and len(fields) == 2:
            v = fields[1]
            if not host.has_vertex(v):
                raise TraceError(f"unknown vertex {v!r}", line=lineno)
            sc = BlobSubconf(frozenset({v}), frozenset(host.predecessors(v)))
        elif fields[0] == "M" and len(fields) in (3, 4):
            first = fetch_b(fields[1], lineno)
            second = fetch_b(fields[2], lineno)
            pivots = sorted(first.support & second.blob)
            if len(fields) == 4:
                if fields[3] not in pivots:
                    raise TraceError(f"{fields[3]!r} is not a merger pivot for this pair", line=lineno)
                pivots = [fields[3]]
            if len(pivots) != 1:
                raise TraceError(
                    f"merger pivot ambiguous ({pivots}); use 'M i j v'", line=lineno
                )
            v = pivots[0]
            try:
                sc = BlobSubconf(first.blob | (second.blob - {v}),
                                 (first.support - {v}) | second.support)
            except ValueError as e:
                raise TraceError(str(e), line=lineno) from None
        elif fields[0] == "X" and ":" in fields and "/" in fields:
            colon = fields.index(":")
            slash = fields.index("/")
            if colon != 2 or slash < colon:
                raise TraceError(f"bad inflation {' '.join(fields)!r}", line=lineno)
            src = fetch_b(fields[1], lineno)
            blob = frozenset(fields[colon + 1:slash])
            support = frozenset(fields[slash + 1:])
            try:
                sc = BlobSubconf(blob, support)
            except ValueError as e:
                raise TraceError(str(e), line=lineno) from None
            if not (src.blob <= sc.blob and src.support <= sc.support):
                raise TraceError(f"inflation must extend {src}", line=lineno)
        elif fields[0] == "E" and len(fields) == 2:
            sc = fetch_b(fields[1], lineno)
            present_b.remove(sc)
            steps_b.append(BlobConfiguration(frozenset(present_b)))
            continue
        else:
            raise TraceError(f"bad blob move {' '.join(fields)!r}", line=lineno)
        created_b.append(sc)
        present_b.add(sc)
        steps_b.append(BlobConfiguration(frozenset(present_b)))
    return BlobPebbling(host=host, steps=tuple(steps_b))
