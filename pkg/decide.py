"""
Validity checking by exhaustive quasimodel search with elimination

Worlds of the search space are (moment, index) pairs, where a moment is a
witness-closed chain of saturated types. Moments are connected by
transitions, the convex fully confluent sensible relations between two
chains; moments that cannot continue forever, or whose eventualities can
never be met, are eliminated until a fixpoint is reached.
"""
import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from config import Config
from formula import (And, Atom, Bot, ClosureSet, Coimp, Ev, Formula, Hence, Imp, Meta, Next,
                     Or, TEMPORAL, Top, closure, parse)
from labelled import (LabelledSystem, eventuality_failures, falsifies, quasimodel_to_dict,
                      sensible_pair, validate_quasimodel)
from types_core import TwoSidedType
from utils import BudgetExceededError, InternalError

logger = logging.getLogger(__name__)

IndexPair = Tuple[int, int]
World = Tuple[int, int]


@dataclass(frozen=True)
class Moment:
    """A witness-closed chain of saturated types, listed bottom-up"""
    chain: Tuple[TwoSidedType, ...]

    def __len__(self) -> int:
        return len(self.chain)

    def __getitem__(self, i: int) -> TwoSidedType:
        return self.chain[i]

    @property
    def sigma(self) -> ClosureSet:
        return self.chain[0].sigma

    def __str__(self) -> str:
        return ' < '.join(str(t) for t in self.chain)


@dataclass(frozen=True)
class Transition:
    """A serial, surjective, convex, fully confluent sensible relation between two moments"""
    source: Moment
    target: Moment
    intervals: Tuple[IndexPair, ...]

    @property
    def pairs(self) -> FrozenSet[IndexPair]:
        return frozenset((i, j) for i, (lo, hi) in enumerate(self.intervals)
                         for j in range(lo, hi + 1))


@dataclass
class SearchStats:
    moments: int = 0
    explored: int = 0
    worlds: int = 0
    rounds: int = 0
    alive_by_round: List[int] = field(default_factory=list)
    surviving: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {'moments': self.moments, 'explored': self.explored, 'worlds': self.worlds,
                'rounds': self.rounds, 'alive_by_round': list(self.alive_by_round),
                'surviving': self.surviving, 'elapsed': round(self.elapsed, 6)}


@dataclass
class Verdict:
    formula: Formula
    status: str
    sigma: ClosureSet
    witness: Optional[LabelledSystem] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def valid(self) -> bool:
        return self.status == 'valid'

    @property
    def falsifiable(self) -> bool:
        return self.status == 'falsifiable'

    def to_dict(self, include_witness: bool = False) -> Dict[str, Any]:
        data = {
            'formula': str(self.formula),
            'status': self.status,
            'sigma_size': len(self.sigma),
            'stats': self.stats.to_dict(),
        }
        if include_witness and self.witness is not None:
            data['witness'] = quasimodel_to_dict(self.witness)
        return data


def size_bound(n: int) -> int:
    """Upper bound on the number of worlds of a quotient over a closure set of size n"""
    return (n + 1) * 2 ** (n * (n + 1) + 1)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def _is_quasi_atom(f: Formula) -> bool:
    return isinstance(f, (Atom, Meta) + TEMPORAL)


def _threshold_options(f: Formula, h: Dict[Formula, int], n: int) -> Sequence[int]:
    """
    Possible thresholds of f on a chain of n types, given its subformulas

    A formula with threshold k is positive exactly at the k lowest types.
    Only atoms and temporal formulas can choose; everything else follows.
    """
    if isinstance(f, (Atom, Meta, Next)):
        return range(n, -1, -1)
    if isinstance(f, Ev):
        return range(n, h[f.operand] - 1, -1)
    if isinstance(f, Hence):
        return range(h[f.operand], -1, -1)
    if isinstance(f, Bot):
        return (0,)
    if isinstance(f, Top):
        return (n,)
    if isinstance(f, And):
        return (min(h[f.left], h[f.right]),)
    if isinstance(f, Or):
        return (max(h[f.left], h[f.right]),)
    if isinstance(f, Imp):
        return (n if h[f.left] <= h[f.right] else h[f.right],)
    if isinstance(f, Coimp):
        return (h[f.left] if h[f.left] > h[f.right] else 0,)
    raise ValueError(f"Unsupported formula node: {f!r}")


def enumerate_moments(sigma: ClosureSet) -> List[Moment]:
    """
    All witness-closed strictly increasing chains of saturated types

    Along such a chain every formula is positive on a prefix, so a chain is
    fixed by the thresholds of its quasi-atoms. The chain is strict exactly
    when every inner cut point is the threshold of some quasi-atom.
    """
    formulas = sigma.formulas
    remaining = [0] * (len(formulas) + 1)
    for i in range(len(formulas) - 1, -1, -1):
        remaining[i] = remaining[i + 1] + _is_quasi_atom(formulas[i])

    interned: Dict[FrozenSet[Formula], TwoSidedType] = {}

    def make_type(pos: FrozenSet[Formula]) -> TwoSidedType:
        if pos not in interned:
            interned[pos] = TwoSidedType.saturated(pos, sigma)
        return interned[pos]

    moments: List[Moment] = []
    for n in range(1, remaining[0] + 2):
        h: Dict[Formula, int] = {}

        def extend(i: int, missing: FrozenSet[int]) -> None:
            if len(missing) > remaining[i]:
                return
            if i == len(formulas):
                moments.append(Moment(tuple(
                    make_type(frozenset(f for f in formulas if k < h[f])) for k in range(n))))
                return
            f = formulas[i]
            for v in _threshold_options(f, h, n):
                h[f] = v
                extend(i + 1, missing - {v})
            del h[f]

        extend(0, frozenset(range(1, n)))

    logger.debug(f"{len(moments)} moments over {len(sigma)} formulas")
    return moments


# ---------------------------------------------------------------------------
# Transitions
# ---------------------------------------------------------------------------

def _interval_options(row: Sequence[bool]) -> List[IndexPair]:
    """Nonempty intervals on which row is true throughout"""
    options = []
    for lo in range(len(row)):
        hi = lo
        while hi < len(row) and row[hi]:
            options.append((lo, hi))
            hi += 1
    return options


def _follows(previous: IndexPair, current: IndexPair) -> bool:
    """Consecutive intervals: both ends weakly increase and no target index is skipped"""
    return previous[0] <= current[0] <= previous[1] + 1 and previous[1] <= current[1]


def _assignments(sensible: Sequence[Sequence[bool]]) -> Iterator[Tuple[IndexPair, ...]]:
    n, m = len(sensible), len(sensible[0])
    options = [_interval_options(row) for row in sensible]
    chosen: List[IndexPair] = []

    def extend(i: int) -> Iterator[Tuple[IndexPair, ...]]:
        if i == n:
            if chosen[-1][1] == m - 1:
                yield tuple(chosen)
            return
        for interval in options[i]:
            if (interval[0] == 0) if i == 0 else _follows(chosen[-1], interval):
                chosen.append(interval)
                yield from extend(i + 1)
                chosen.pop()

    yield from extend(0)


def _union_of_assignments(sensible: Sequence[Sequence[bool]]) -> FrozenSet[IndexPair]:
    """Pairs used by at least one transition, without enumerating transitions"""
    n, m = len(sensible), len(sensible[0])
    if all(all(row) for row in sensible):
        return frozenset((i, j) for i in range(n) for j in range(m))

    options = [_interval_options(row) for row in sensible]
    forward: List[Set[IndexPair]] = [set() for _ in range(n)]
    forward[0] = {iv for iv in options[0] if iv[0] == 0}
    for i in range(1, n):
        forward[i] = {iv for iv in options[i] if any(_follows(p, iv) for p in forward[i - 1])}

    useful: List[Set[IndexPair]] = [set() for _ in range(n)]
    useful[n - 1] = {iv for iv in forward[n - 1] if iv[1] == m - 1}
    for i in range(n - 2, -1, -1):
        useful[i] = {iv for iv in forward[i] if any(_follows(iv, nxt) for nxt in useful[i + 1])}

    return frozenset((i, j) for i in range(n) for lo, hi in useful[i] for j in range(lo, hi + 1))


def close_index_pairs(pairs: FrozenSet[IndexPair], n: int, m: int) -> FrozenSet[IndexPair]:
    """Convex closure of a relation between a chain of n and a chain of m indices"""
    lower_upper = {(x, y) for a, b in pairs for x in range(a + 1) for y in range(b, m)}
    upper_lower = {(x, y) for a, b in pairs for x in range(a, n) for y in range(b + 1)}
    return frozenset(lower_upper & upper_lower)


def transitions(c: Moment, d: Moment) -> List[Transition]:
    """
    All transitions from c to d

    A transition assigns each source index a nonempty interval of target
    indices; the first interval starts at the bottom, the last ends at the
    top, and consecutive intervals never move down or skip an index.
    """
    sensible = [[sensible_pair(a, b) for b in d.chain] for a in c.chain]
    return [Transition(c, d, intervals) for intervals in _assignments(sensible)]


class MomentSpace:
    """
    The moments over a closure set with their sensible successors

    Type comparisons run on bitmasks over closure positions. A pair (a, b)
    is sensible iff b is positive on must_pos(a) and negative on must_neg(a).
    """

    def __init__(self, sigma: ClosureSet, moments: Optional[List[Moment]] = None):
        self.sigma = sigma
        self.moments = enumerate_moments(sigma) if moments is None else moments
        self.type_ids: Dict[TwoSidedType, int] = {}
        self.pos_mask: List[int] = []
        self.must_pos: List[int] = []
        self.must_neg: List[int] = []
        self.chain_ids: List[Tuple[int, ...]] = [
            tuple(self._intern(t) for t in m.chain) for m in self.moments]

        self.by_ends: Dict[int, Dict[int, List[int]]] = {}
        for k, ids in enumerate(self.chain_ids):
            self.by_ends.setdefault(ids[0], {}).setdefault(ids[-1], []).append(k)
        self.last_ids = sorted({ids[-1] for ids in self.chain_ids})
        self._first_targets: Dict[int, List[int]] = {}
        self._last_targets: Dict[int, FrozenSet[int]] = {}
        self._successors: Dict[int, Dict[int, FrozenSet[IndexPair]]] = {}
        self._lock = threading.Lock()

    def _bit(self, f: Formula) -> int:
        return 1 << self.sigma.index(f)

    def _intern(self, t: TwoSidedType) -> int:
        if t in self.type_ids:
            return self.type_ids[t]
        pos = must_pos = must_neg = 0
        for f in t.pos:
            pos |= self._bit(f)
        for f in self.sigma.of_kind(Next, Ev, Hence):
            if isinstance(f, Next):
                if f in t.pos:
                    must_pos |= self._bit(f.operand)
                else:
                    must_neg |= self._bit(f.operand)
            elif isinstance(f, Ev):
                if f in t.pos and f.operand not in t.pos:
                    must_pos |= self._bit(f)
                elif f in t.neg:
                    must_neg |= self._bit(f)
            else:
                if f in t.pos:
                    must_pos |= self._bit(f)
                elif f.operand in t.pos:
                    must_neg |= self._bit(f)
        type_id = len(self.pos_mask)
        self.type_ids[t] = type_id
        self.pos_mask.append(pos)
        self.must_pos.append(must_pos)
        self.must_neg.append(must_neg)
        return type_id

    def sensible(self, a: int, b: int) -> bool:
        pos = self.pos_mask[b]
        return not (self.must_pos[a] & ~pos) and not (self.must_neg[a] & pos)

    def _candidates(self, k: int) -> List[int]:
        """Moments whose bottom and top types are sensible successors of k's bottom and top"""
        first, last = self.chain_ids[k][0], self.chain_ids[k][-1]
        with self._lock:
            if first not in self._first_targets:
                self._first_targets[first] = [b for b in self.by_ends if self.sensible(first, b)]
            if last not in self._last_targets:
                self._last_targets[last] = frozenset(b for b in self.last_ids if self.sensible(last, b))
            firsts, lasts = self._first_targets[first], self._last_targets[last]
        return sorted(k2 for b in firsts
                      for b2, ks in self.by_ends[b].items() if b2 in lasts for k2 in ks)

    def successors(self, k: int) -> Dict[int, FrozenSet[IndexPair]]:
        """For each moment reachable by some transition from k, the union of those transitions"""
        with self._lock:
            cached = self._successors.get(k)
        if cached is not None:
            return cached
        source = self.chain_ids[k]
        result: Dict[int, FrozenSet[IndexPair]] = {}
        for k2 in self._candidates(k):
            target = self.chain_ids[k2]
            sensible = [[self.sensible(a, b) for b in target] for a in source]
            pairs = _union_of_assignments(sensible)
            if pairs:
                result[k2] = pairs
        with self._lock:
            return self._successors.setdefault(k, result)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

class _Search:
    """One run of the elimination procedure for a single formula"""

    def __init__(self, f: Formula, sigma: ClosureSet, max_workers: int, verify: bool):
        self.formula = f
        self.sigma = sigma
        self.max_workers = max_workers
        self.verify = verify
        self.stats = SearchStats()

    def _explore(self, space: MomentSpace, starts: List[int]) -> Dict[int, Dict[int, FrozenSet[IndexPair]]]:
        """Successor maps of every moment forward-reachable from the starts, level by level"""
        succ: Dict[int, Dict[int, FrozenSet[IndexPair]]] = {}
        frontier = list(starts)
        seen = set(starts)
        executor = ThreadPoolExecutor(max_workers=self.max_workers) if self.max_workers > 1 else None
        try:
            while frontier:
                if executor is not None:
                    results = list(executor.map(space.successors, frontier))
                else:
                    results = [space.successors(k) for k in frontier]
                next_frontier = []
                for k, targets in zip(frontier, results):
                    succ[k] = targets
                    for k2 in targets:
                        if k2 not in seen:
                            seen.add(k2)
                            next_frontier.append(k2)
                frontier = sorted(next_frontier)
        finally:
            if executor is not None:
                executor.shutdown(wait=True)
        return succ

    def _eliminate(self, space: MomentSpace,
                   succ: Dict[int, Dict[int, FrozenSet[IndexPair]]]) -> Set[int]:
        """Surviving moments after removing dead ends and unfulfilled eventualities"""
        moments = space.moments
        self.closed = {(k, k2): close_index_pairs(pairs, len(moments[k]), len(moments[k2]))
                       for k, targets in succ.items() for k2, pairs in targets.items()}
        graph = nx.DiGraph()
        for k in succ:
            graph.add_nodes_from((k, i) for i in range(len(moments[k])))
        for (k, k2), pairs in self.closed.items():
            graph.add_edges_from(((k, i), (k2, j)) for i, j in pairs)
        self.graph = graph

        preds: Dict[int, Set[int]] = {k: set() for k in succ}
        for k, targets in succ.items():
            for k2 in targets:
                preds[k2].add(k)
        out_degree = {k: len(targets) for k, targets in succ.items()}

        alive = set(succ)
        doomed = deque(sorted(k for k, d in out_degree.items() if d == 0))

        def kill(ks: Sequence[int]) -> None:
            for k in ks:
                if k not in alive:
                    continue
                alive.discard(k)
                graph.remove_nodes_from((k, i) for i in range(len(moments[k])))
                for p in preds[k]:
                    out_degree[p] -= 1
                    if out_degree[p] == 0 and p in alive:
                        doomed.append(p)

        while True:
            while doomed:
                kill([doomed.popleft()])
            if not alive:
                return alive
            self.stats.rounds += 1
            self.stats.alive_by_round.append(len(alive))
            worlds = [(k, i) for k in sorted(alive) for i in range(len(moments[k]))]
            labels = {w: moments[w[0]][w[1]] for w in worlds}
            failures = eventuality_failures(graph, worlds, labels, self.sigma)
            dead = sorted({w[0] for w, _ in failures})
            logger.debug(f"Round {self.stats.rounds}: {len(alive)} alive, {len(dead)} unfulfilled")
            if not dead:
                return alive
            kill(dead)

    def _distances(self, space: MomentSpace) -> Dict[Formula, Dict[World, int]]:
        """Steps from each surviving world to the nearest world fulfilling each eventuality"""
        reverse = self.graph.reverse(copy=False)
        distances = {}
        for e in self.sigma.of_kind(Ev, Hence):
            if isinstance(e, Ev):
                goals = [w for w in self.graph if e.operand in space.moments[w[0]][w[1]].pos]
            else:
                goals = [w for w in self.graph if e.operand in space.moments[w[0]][w[1]].neg]
            distances[e] = nx.multi_source_dijkstra_path_length(reverse, goals) if goals else {}
        return distances

    def _witness(self, space: MomentSpace, start: int, alive: Set[int],
                 succ: Dict[int, Dict[int, FrozenSet[IndexPair]]]) -> LabelledSystem:
        """
        A small quasimodel containing the start moment

        Each moment keeps its least surviving successor, plus, for every
        pending eventuality of one of its worlds, a successor one step
        closer to fulfilling it. Pending claims persist along sensible
        edges, so following these choices always ends in fulfilment.
        """
        moments = space.moments
        distances = self._distances(space)

        def chosen(k: int) -> List[int]:
            picks = {min(k2 for k2 in succ[k] if k2 in alive)}
            for i, t in enumerate(moments[k].chain):
                for e, dist in distances.items():
                    pending = e in t.pos if isinstance(e, Ev) else e in t.neg
                    if pending and dist[(k, i)] > 0:
                        _, closer = min((dist[v], v) for v in self.graph.successors((k, i))
                                        if v in dist)
                        picks.add(closer[0])
            return sorted(picks)

        reached = [start]
        seen = {start}
        queue = deque([start])
        while queue:
            k = queue.popleft()
            for k2 in chosen(k):
                if k2 not in seen:
                    seen.add(k2)
                    reached.append(k2)
                    queue.append(k2)
        reached.sort()

        def name(k: int, i: int) -> str:
            return f"m{k}.{i}"

        worlds, order, labels, rel = [], [], {}, []
        for k in reached:
            for i, t in enumerate(moments[k].chain):
                worlds.append(name(k, i))
                labels[name(k, i)] = t
                if i > 0:
                    order.append((name(k, i - 1), name(k, i)))
            for k2 in succ[k]:
                if k2 in seen:
                    rel.extend((name(k, i), name(k2, j)) for i, j in self.closed[(k, k2)])
        logger.debug(f"Witness: {len(reached)} moments, {len(worlds)} worlds")
        return LabelledSystem.build(worlds, order, labels, rel, self.sigma)

    def run(self) -> Verdict:
        started = time.perf_counter()
        space = MomentSpace(self.sigma)
        self.stats.moments = len(space.moments)

        starts = [k for k, m in enumerate(space.moments)
                  if any(self.formula in t.neg for t in m.chain)]
        succ = self._explore(space, starts)
        self.stats.explored = len(succ)
        self.stats.worlds = sum(len(space.moments[k]) for k in succ)

        n = len(self.sigma)
        if self.stats.worlds > size_bound(n) * (n + 1):
            raise InternalError(f"Explored {self.stats.worlds} worlds, above the bound for |Sigma| = {n}")

        alive = self._eliminate(space, succ) if succ else set()
        self.stats.surviving = len(alive)
        surviving_starts = [k for k in starts if k in alive]

        if not surviving_starts:
            self.stats.elapsed = time.perf_counter() - started
            return Verdict(self.formula, 'valid', self.sigma, None, self.stats)

        witness = self._witness(space, surviving_starts[0], alive, succ)
        if self.verify:
            violation = validate_quasimodel(witness)
            if violation is not None:
                raise InternalError(f"Witness for {self.formula} fails validation: {violation}")
            if not falsifies(witness, self.formula):
                raise InternalError(f"Witness for {self.formula} does not falsify it")
        self.stats.elapsed = time.perf_counter() - started
        return Verdict(self.formula, 'falsifiable', self.sigma, witness, self.stats)


def decide(f: Formula, budget: Optional[int] = None, max_workers: Optional[int] = None,
           verify: Optional[bool] = None) -> Verdict:
    """
    Decide whether f is valid

    Args:
        f: Formula to decide
        budget: Largest accepted closure size; defaults to Config.SIGMA_BUDGET
        max_workers: Threads used to compute transitions; defaults to Config.MAX_WORKERS
        verify: Validate the witness before returning; defaults to Config.VERIFY_WITNESS

    Returns:
        Verdict with status 'valid', or 'falsifiable' together with a witness quasimodel

    Raises:
        BudgetExceededError: If the closure of f is larger than the budget
        InternalError: If a witness fails its self-check
    """
    budget = Config.SIGMA_BUDGET if budget is None else budget
    sigma = closure(f)
    if len(sigma) > budget:
        raise BudgetExceededError(len(sigma), budget)

    logger.info(f"Deciding {f} (|Sigma| = {len(sigma)})")
    search = _Search(f, sigma,
                     Config.MAX_WORKERS if max_workers is None else max_workers,
                     Config.VERIFY_WITNESS if verify is None else verify)
    verdict = search.run()
    stats = verdict.stats
    logger.info(f"{verdict.status}: {stats.explored}/{stats.moments} moments explored, "
                f"{stats.worlds} worlds, {stats.rounds} rounds, {stats.elapsed:.3f}s")
    return verdict


def decide_text(text: str, budget: Optional[int] = None) -> Verdict:
    return decide(parse(text), budget=budget)
