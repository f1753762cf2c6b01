"""Interval scheduling engine for bus-episode piece plans.

Generators in this package build sequences piece by piece (a box, a layer, a
transition).  Each piece is described as a set of bus episodes -- attach and
detach tokens, some of which belong to episodes that span piece boundaries --
plus the pairs of episodes that must overlap to realize an edge.  This module
assigns a total order to the tokens of one piece such that:

  * every designated pair overlaps partially (the first episode to attach is
    the first to detach), which is the unique pattern giving the pair its two
    same-sign crossings;
  * every other opposite-quadrature pair either stays strictly disjoint
    (monotone mode: no transient interaction is ever created) or merely
    avoids partial overlap (event mode: nested blips are allowed and cancel);
  * explicit precedence constraints hold, and a qubit's episodes stay in
    serial order.

The search is depth-first over ready tokens with incremental pruning.
Placing a detach decides the overlap pattern of its episode against every
open episode, so an illegal pattern is rejected the moment it becomes
unavoidable; in monotone mode even an attach is rejected if a forbidden
partner is currently open.  A seed order makes the first descent
deterministic; restarts perturb the ordering with seeded jitter.  Solved
pieces are memoized by their canonical plan signature, so repeated layers of
a large grid are scheduled once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import BusOp, OpSequence, Quadrature

ATTACH = "A"
DETACH = "D"

# Episode ids are (qubit, serial); tokens are (ATTACH|DETACH, eid).
Eid = tuple[int, int]
Token = tuple[str, Eid]


class SchedulingError(RuntimeError):
    """The search budget was exhausted without finding a valid order."""


class PlanError(ValueError):
    """The piece plan is structurally inconsistent."""


@dataclass
class PiecePlan:
    """One piece's episodes, tokens, and ordering constraints."""

    coloring: dict[int, Quadrature]
    monotone: bool = True
    # eid -> (attach_here, detach_here, in_rank); in_rank is the attach order
    # of an episode opened in an earlier piece (negative, preserving order),
    # None for episodes attached here.
    episodes: dict[Eid, tuple[bool, bool, int | None]] = field(default_factory=dict)
    required: set[frozenset] = field(default_factory=set)
    precede: list[tuple[Token, Token]] = field(default_factory=list)
    seed: list[Token] = field(default_factory=list)

    def tokens(self) -> list[Token]:
        out = []
        for eid, (attach_here, detach_here, _) in sorted(self.episodes.items()):
            if attach_here:
                out.append((ATTACH, eid))
            if detach_here:
                out.append((DETACH, eid))
        return out

    def key(self) -> tuple:
        """Canonical signature for memoization."""
        eps = tuple(
            (eid, flags, self.coloring[eid[0]].value)
            for eid, flags in sorted(self.episodes.items())
        )
        req = tuple(sorted(tuple(sorted(p)) for p in self.required))
        pre = tuple(sorted(self.precede))
        return (self.monotone, eps, req, pre, tuple(self.seed))


def _build_preds(plan: PiecePlan) -> dict[Token, set[Token]]:
    preds: dict[Token, set[Token]] = {t: set() for t in plan.tokens()}
    by_qubit: dict[int, list[Eid]] = {}
    for eid, (attach_here, detach_here, in_rank) in plan.episodes.items():
        if attach_here and in_rank is not None:
            raise PlanError(f"episode {eid} both attaches here and carries an in-rank")
        if not attach_here and in_rank is None:
            raise PlanError(f"episode {eid} neither attaches here nor is open at entry")
        if attach_here and detach_here:
            preds[(DETACH, eid)].add((ATTACH, eid))
        by_qubit.setdefault(eid[0], []).append(eid)
    # A qubit's episodes run serially: an earlier episode must fully close
    # before a later one attaches.
    for qubit, eids in by_qubit.items():
        eids.sort(key=lambda e: e[1])
        for prev, nxt in zip(eids, eids[1:]):
            nxt_attach = plan.episodes[nxt][0]
            prev_detach = plan.episodes[prev][1]
            if nxt_attach and not prev_detach:
                raise PlanError(f"qubit {qubit} reattaches while episode {prev} stays open")
            if nxt_attach and prev_detach:
                preds[(ATTACH, nxt)].add((DETACH, prev))
    for before, after in plan.precede:
        if before not in preds or after not in preds:
            raise PlanError(f"precedence {before} -> {after} names a token absent from the piece")
        preds[after].add(before)
    return preds


def _solve(
    plan: PiecePlan,
    preds: dict[Token, set[Token]],
    seed_pos: dict[Token, float],
    node_budget: int,
    exhaustive: bool,
) -> list[Token] | None:
    """One DFS pass.  Returns an order, None if the tree was exhausted,
    and raises SchedulingError if the node budget ran out first."""
    tokens = list(preds)
    succs: dict[Token, list[Token]] = {t: [] for t in tokens}
    pending: dict[Token, int] = {}
    for tok, ps in preds.items():
        pending[tok] = len(ps)
        for p in ps:
            succs[p].append(tok)

    colors = {eid: plan.coloring[eid[0]] for eid in plan.episodes}
    req_partners: dict[Eid, set[Eid]] = {eid: set() for eid in plan.episodes}
    for pair in plan.required:
        a, b = tuple(pair)
        if colors[a] == colors[b]:
            raise PlanError(f"required pair {a}, {b} shares a quadrature and can never link")
        req_partners[a].add(b)
        req_partners[b].add(a)

    rank: dict[Eid, int] = {}
    is_open: set[Eid] = set()
    closed: set[Eid] = set()
    for eid, (_, _, in_rank) in plan.episodes.items():
        if in_rank is not None:
            rank[eid] = in_rank
            is_open.add(eid)
    if plan.monotone:
        for eid in is_open:
            for other in is_open:
                if other <= eid or colors[eid] == colors[other]:
                    continue
                if frozenset((eid, other)) not in plan.required:
                    raise PlanError(
                        f"monotone piece starts with forbidden pair {eid}, {other} both open"
                    )

    satisfied: set[frozenset] = set()
    order: list[Token] = []
    next_rank = 0
    nodes = 0
    budget_hit = False

    def attach_legal(eid: Eid) -> bool:
        for f in req_partners[eid]:
            if f in closed and frozenset((eid, f)) not in satisfied:
                return False
        if plan.monotone:
            for f in is_open:
                if colors[f] is not colors[eid] and frozenset((eid, f)) not in plan.required:
                    return False
        return True

    def detach_legal(eid: Eid) -> bool:
        my_rank = rank[eid]
        for f in is_open:
            if f == eid or colors[f] is colors[eid]:
                continue
            pair = frozenset((eid, f))
            if pair in plan.required:
                if rank[f] < my_rank:
                    return False
            elif my_rank < rank[f]:
                return False
        for f in req_partners[eid]:
            pair = frozenset((eid, f))
            if pair in satisfied or f in is_open:
                continue
            return False
        return True

    def place(tok: Token) -> list[frozenset]:
        nonlocal next_rank
        kind, eid = tok
        order.append(tok)
        for s in succs[tok]:
            pending[s] -= 1
        newly = []
        if kind == ATTACH:
            rank[eid] = next_rank
            next_rank += 1
            is_open.add(eid)
        else:
            is_open.discard(eid)
            closed.add(eid)
            for f in req_partners[eid]:
                pair = frozenset((eid, f))
                if pair not in satisfied and f in is_open and rank[eid] < rank[f]:
                    satisfied.add(pair)
                    newly.append(pair)
        return newly

    def unplace(tok: Token, newly: list[frozenset]) -> None:
        nonlocal next_rank
        kind, eid = tok
        order.pop()
        for s in succs[tok]:
            pending[s] += 1
        if kind == ATTACH:
            is_open.discard(eid)
            del rank[eid]
            next_rank -= 1
        else:
            closed.discard(eid)
            is_open.add(eid)
            for pair in newly:
                satisfied.discard(pair)

    total = len(tokens)

    def dfs() -> bool:
        nonlocal nodes, budget_hit
        if len(order) == total:
            return True
        nodes += 1
        if nodes > node_budget:
            budget_hit = True
            return False
        ready = []
        for tok in tokens:
            if pending[tok] != 0 or tok in placed:
                continue
            kind, eid = tok
            if kind == ATTACH:
                if attach_legal(eid):
                    ready.append(tok)
            elif eid in is_open and detach_legal(eid):
                ready.append(tok)
        ready.sort(key=lambda t: seed_pos.get(t, 1e9))
        for tok in ready:
            placed.add(tok)
            newly = place(tok)
            if dfs():
                return True
            unplace(tok, newly)
            placed.discard(tok)
            if budget_hit:
                return False
        return False

    placed: set[Token] = set()
    if dfs():
        return order
    if budget_hit:
        raise SchedulingError(f"node budget {node_budget} exhausted after {nodes} nodes")
    if exhaustive:
        return None
    raise SchedulingError(f"search tree exhausted unexpectedly after {nodes} nodes")


_MEMO: dict[tuple, list[Token] | None] = {}


def schedule(
    plan: PiecePlan,
    restarts: int = 8,
    node_budget: int = 250_000,
    exhaustive: bool = False,
) -> list[Token] | None:
    """Order a piece's tokens, or prove no order exists.

    Returns the token order.  With exhaustive=True a complete search is run
    and None is returned when the plan is infeasible; otherwise infeasible or
    oversized plans raise SchedulingError after all restarts.
    """
    key = plan.key()
    if key in _MEMO:
        result = _MEMO[key]
        return None if result is None else list(result)

    preds = _build_preds(plan)
    base_pos = {tok: float(i) for i, tok in enumerate(plan.seed)}
    if exhaustive:
        result = _solve(plan, preds, base_pos, node_budget=50_000_000, exhaustive=True)
        _MEMO[key] = None if result is None else list(result)
        return result

    last: SchedulingError | None = None
    for attempt in range(restarts):
        if attempt == 0:
            seed_pos = base_pos
        else:
            rng = random.Random((hash(key), attempt))
            spread = 4.0 * attempt
            seed_pos = {
                tok: base_pos.get(tok, 1e9) + rng.uniform(0, spread)
                for tok in preds
            }
        try:
            result = _solve(plan, preds, seed_pos, node_budget, exhaustive=False)
            if result is not None:
                _MEMO[key] = list(result)
                return result
        except SchedulingError as err:
            last = err
    raise SchedulingError(f"no valid order after {restarts} restarts: {last}")


class SequenceBuilder:
    """Accumulates scheduled pieces into one operation sequence.

    Tracks per-qubit episode serials and which episodes are still open on the
    bus, so pieces can designate edges whose two crossings land in different
    pieces (a dwelling qubit detaching one layer later).
    """

    def __init__(self, n_qubits: int, coloring: dict[int, Quadrature]):
        self.n_qubits = n_qubits
        self.coloring = coloring
        self.seq = OpSequence(n_qubits)
        self._serials: dict[int, int] = {}
        self._open_rank: dict[Eid, int] = {}
        self._next_rank = -1_000_000

    def open_episodes(self) -> list[Eid]:
        return sorted(self._open_rank, key=self._open_rank.get)

    def piece(self, monotone: bool = True) -> "PieceDraft":
        return PieceDraft(self, monotone)

    def _emit(self, draft: "PieceDraft", order: list[Token]) -> None:
        for kind, eid in order:
            qubit = eid[0]
            sign = 1 if kind == ATTACH else -1
            self.seq.append(BusOp(qubit, self.coloring[qubit], sign))
        for eid, (attach_here, detach_here, _) in draft.plan.episodes.items():
            if attach_here and not detach_here:
                self._next_rank += 1
                self._open_rank[eid] = self._next_rank
            elif detach_here and eid in self._open_rank:
                del self._open_rank[eid]

    def mark_section(self) -> None:
        self.seq.mark_section()


class PieceDraft:
    """Mutable plan for one piece, resolved by run()."""

    def __init__(self, builder: SequenceBuilder, monotone: bool):
        self.builder = builder
        self.plan = PiecePlan(coloring=builder.coloring, monotone=monotone)
        # Episodes open at entry join the plan lazily, only when referenced.

    def _ensure_open(self, eid: Eid) -> Eid:
        if eid not in self.plan.episodes:
            if eid not in self.builder._open_rank:
                raise PlanError(f"episode {eid} is not open at this piece")
            self.plan.episodes[eid] = (False, False, self.builder._open_rank[eid])
        return eid

    def attach(self, qubit: int) -> Eid:
        serial = self.builder._serials.get(qubit, 0)
        self.builder._serials[qubit] = serial + 1
        eid = (qubit, serial)
        self.plan.episodes[eid] = (True, False, None)
        return eid

    def detach(self, eid: Eid) -> Eid:
        if eid in self.plan.episodes:
            attach_here, detach_here, in_rank = self.plan.episodes[eid]
            if detach_here:
                raise PlanError(f"episode {eid} already detaches in this piece")
            self.plan.episodes[eid] = (attach_here, True, in_rank)
        else:
            self._ensure_open(eid)
            self.plan.episodes[eid] = (False, True, self.builder._open_rank[eid])
        return eid

    def full(self, qubit: int) -> Eid:
        return self.detach(self.attach(qubit))

    def require(self, e1: Eid, e2: Eid) -> None:
        self._ensure_known(e1)
        self._ensure_known(e2)
        self.plan.required.add(frozenset((e1, e2)))

    def precede(self, before: Token, after: Token) -> None:
        self.plan.precede.append((before, after))

    def seed(self, tokens: list[Token]) -> None:
        self.plan.seed = list(tokens)

    def _ensure_known(self, eid: Eid) -> None:
        if eid not in self.plan.episodes:
            self._ensure_open(eid)

    def run(self, restarts: int = 8, node_budget: int = 250_000) -> list[Token]:
        # Every episode still open on the bus joins the plan, tokens or not:
        # the overlap rules must see dwellers from earlier pieces even when
        # this piece never touches them.
        for eid, in_rank in self.builder._open_rank.items():
            if eid not in self.plan.episodes:
                self.plan.episodes[eid] = (False, False, in_rank)
        order = schedule(self.plan, restarts=restarts, node_budget=node_budget)
        self.builder._emit(self, order)
        return order
