"""
Labelled spaces and systems: relational side conditions, quasimodel
validation, convex closure and the quotient by (label, component) pairs
"""
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import (Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set,
                    Tuple, Union)

import networkx as nx

from formula import ClosureSet, Coimp, Ev, Formula, Hence, Imp, Next, closure, parse
from types_core import TwoSidedType, check_type, leq_sigma
from utils import (ClosureError, FormulaSyntaxError, ModelError, ModelFormatError, Violation,
                   load_json_file)

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


@dataclass(frozen=True)
class LabelledSystem:
    """
    Worlds with a partial order, a Sigma-type labelling and a successor relation

    order holds the reflexive-transitive closure; use build() to construct
    a system from covering pairs.
    """
    worlds: Tuple[str, ...]
    order: FrozenSet[Pair]
    labels: Mapping[str, TwoSidedType]
    rel: FrozenSet[Pair]
    sigma: ClosureSet

    @classmethod
    def build(cls, worlds: Iterable[str], order_pairs: Iterable[Pair],
              labels: Mapping[str, TwoSidedType], rel: Iterable[Pair],
              sigma: ClosureSet) -> 'LabelledSystem':
        """
        Raises:
            ModelFormatError: If pairs or labels mention unknown worlds, or a world is unlabelled
        """
        worlds = tuple(worlds)
        known = set(worlds)
        if len(known) != len(worlds):
            raise ModelFormatError("World identifiers repeat")
        order_pairs = list(order_pairs)
        rel = frozenset(rel)
        for a, b in list(order_pairs) + sorted(rel):
            if a not in known or b not in known:
                raise ModelFormatError(f"Pair ({a}, {b}) mentions an unknown world")
        missing = [w for w in worlds if w not in labels]
        if missing:
            raise ModelFormatError(f"Unlabelled worlds: {', '.join(missing)}")

        graph = nx.DiGraph()
        graph.add_nodes_from(worlds)
        graph.add_edges_from(order_pairs)
        closed = nx.transitive_closure(graph)
        order = frozenset(closed.edges()) | frozenset((w, w) for w in worlds)
        return cls(worlds, order, {w: labels[w] for w in worlds}, rel, sigma)

    @cached_property
    def position(self) -> Dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def _down(self) -> Dict[str, FrozenSet[str]]:
        below: Dict[str, Set[str]] = {w: set() for w in self.worlds}
        for a, b in self.order:
            below[b].add(a)
        return {w: frozenset(vs) for w, vs in below.items()}

    @cached_property
    def _up(self) -> Dict[str, FrozenSet[str]]:
        above: Dict[str, Set[str]] = {w: set() for w in self.worlds}
        for a, b in self.order:
            above[a].add(b)
        return {w: frozenset(vs) for w, vs in above.items()}

    @cached_property
    def _succ(self) -> Dict[str, FrozenSet[str]]:
        out: Dict[str, Set[str]] = {w: set() for w in self.worlds}
        for a, b in self.rel:
            out[a].add(b)
        return {w: frozenset(vs) for w, vs in out.items()}

    @cached_property
    def _pred(self) -> Dict[str, FrozenSet[str]]:
        into: Dict[str, Set[str]] = {w: set() for w in self.worlds}
        for a, b in self.rel:
            into[b].add(a)
        return {w: frozenset(vs) for w, vs in into.items()}

    def down(self, w: str) -> FrozenSet[str]:
        return self._down[w]

    def up(self, w: str) -> FrozenSet[str]:
        return self._up[w]

    def succ(self, w: str) -> FrozenSet[str]:
        return self._succ[w]

    def pred(self, w: str) -> FrozenSet[str]:
        return self._pred[w]

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.order

    def comparable(self, w: str) -> FrozenSet[str]:
        return self._down[w] | self._up[w]

    def sorted_worlds(self, worlds: Iterable[str]) -> List[str]:
        return sorted(worlds, key=self.position.__getitem__)

    def components(self) -> List[List[str]]:
        """Connected components of the order, each listed bottom-up, in world order"""
        graph = nx.Graph()
        graph.add_nodes_from(self.worlds)
        graph.add_edges_from((a, b) for a, b in self.order if a != b)
        components = [sorted(c, key=lambda w: (len(self._down[w]), self.position[w]))
                      for c in nx.connected_components(graph)]
        return sorted(components, key=lambda c: min(self.position[w] for w in c))

    def height(self) -> int:
        return max((len(c) for c in self.components()), default=0)

    def world_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.worlds)
        graph.add_edges_from(self.rel)
        return graph


# ---------------------------------------------------------------------------
# Space conditions
# ---------------------------------------------------------------------------

def check_labels(s: LabelledSystem) -> Optional[Violation]:
    """Every label is a saturated type over the system's closure set"""
    for w in s.worlds:
        label = s.labels[w]
        if label.sigma != s.sigma:
            raise ClosureError(f"Label of {w} is over a different closure set")
        violation = check_type(label.pos, label.neg, s.sigma)
        if violation is not None:
            return replace(violation, worlds=(w,))
        if not label.is_saturated:
            missing = [f for f in s.sigma if f not in label.pos and f not in label.neg]
            return Violation('saturated', worlds=(w,), formula=missing[0],
                             message="label leaves a formula unassigned")
    return None


def validate_space(s: LabelledSystem) -> Optional[Violation]:
    """
    Check that s is a labelled space

    Checks, in order: the order is a partial order, each component is a
    chain, labels are monotone, negative implications have a witness below
    and positive coimplications have a witness above.
    """
    for a, b in sorted(s.order, key=lambda p: (s.position[p[0]], s.position[p[1]])):
        if a != b and (b, a) in s.order:
            return Violation('partial-order', worlds=(a, b), message="order is not antisymmetric")

    for component in s.components():
        members = s.sorted_worlds(component)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if not s.leq(a, b) and not s.leq(b, a):
                    return Violation('local-linearity', worlds=(a, b),
                                     message="incomparable worlds in one component")

    for a in s.worlds:
        for b in s.sorted_worlds(s.up(a)):
            if not leq_sigma(s.labels[a], s.labels[b]):
                return Violation('monotone', worlds=(a, b), message="label decreases along the order")

    for w in s.worlds:
        for f in s.labels[w].ordered_neg():
            if isinstance(f, Imp) and not any(
                    f.left in s.labels[v].pos and f.right in s.labels[v].neg for v in s.down(w)):
                return Violation('imp-witness', worlds=(w,), formula=f,
                                 message="no world below refutes the implication")
        for f in s.labels[w].ordered_pos():
            if isinstance(f, Coimp) and not any(
                    f.left in s.labels[v].pos and f.right in s.labels[v].neg for v in s.up(w)):
                return Violation('coimp-witness', worlds=(w,), formula=f,
                                 message="no world above witnesses the coimplication")
    return None


# ---------------------------------------------------------------------------
# Relation conditions
# ---------------------------------------------------------------------------

def insensible_condition(a: TwoSidedType, b: TwoSidedType) -> Optional[Tuple[str, Formula]]:
    """First failed sensibility condition for the pair (a, b), or None"""
    if a.sigma is not b.sigma and a.sigma != b.sigma:
        raise ClosureError("Types over different closure sets")
    for f in a.sigma:
        if isinstance(f, Next):
            if f in a.pos and f.operand not in b.pos:
                return 'sensible-1', f
            if f in a.neg and f.operand not in b.neg:
                return 'sensible-2', f
        elif isinstance(f, Ev):
            if f in a.pos and not (f.operand in a.pos or f in b.pos):
                return 'sensible-3', f
            if f in a.neg and not (f.operand in a.neg and f in b.neg):
                return 'sensible-4', f
        elif isinstance(f, Hence):
            if f in a.pos and not (f.operand in a.pos and f in b.pos):
                return 'sensible-5', f
            if f in a.neg and not (f.operand in a.neg or f in b.neg):
                return 'sensible-6', f
    return None


def sensible_pair(a: TwoSidedType, b: TwoSidedType) -> bool:
    return insensible_condition(a, b) is None


def check_seriality(s: LabelledSystem) -> Optional[Violation]:
    for w in s.worlds:
        if not s.succ(w):
            return Violation('serial', worlds=(w,), message="world without successor")
    return None


def check_sensible(s: LabelledSystem) -> Optional[Violation]:
    for x in s.worlds:
        for y in s.sorted_worlds(s.succ(x)):
            failed = insensible_condition(s.labels[x], s.labels[y])
            if failed is not None:
                return Violation(failed[0], worlds=(x, y), formula=failed[1])
    return None


def check_confluence(s: LabelledSystem) -> Optional[Violation]:
    """Forth-down, forth-up, back-down and back-up, by exhaustive search"""
    for x in s.worlds:
        for x2 in s.sorted_worlds(s.up(x)):
            for y2 in s.sorted_worlds(s.succ(x2)):
                if not s.succ(x) & s.down(y2):
                    return Violation('forth-down', worlds=(x, x2, y2))
    for x in s.worlds:
        for y in s.sorted_worlds(s.succ(x)):
            for x2 in s.sorted_worlds(s.up(x)):
                if not s.succ(x2) & s.up(y):
                    return Violation('forth-up', worlds=(x, y, x2))
    for x2 in s.worlds:
        for y2 in s.sorted_worlds(s.succ(x2)):
            for y in s.sorted_worlds(s.down(y2)):
                if not s.pred(y) & s.down(x2):
                    return Violation('back-down', worlds=(x2, y2, y))
    for x in s.worlds:
        for y in s.sorted_worlds(s.succ(x)):
            for y2 in s.sorted_worlds(s.up(y)):
                if not s.pred(y2) & s.up(x):
                    return Violation('back-up', worlds=(x, y, y2))
    return None


def check_convex(s: LabelledSystem) -> Optional[Violation]:
    """Images and preimages of single worlds are order intervals"""
    for x in s.worlds:
        image = s.succ(x)
        for y in s.worlds:
            if y not in image and s.down(y) & image and s.up(y) & image:
                return Violation('convex-image', worlds=(x, y),
                                 message="image skips a world between two successors")
    for y in s.worlds:
        preimage = s.pred(y)
        for x in s.worlds:
            if x not in preimage and s.down(x) & preimage and s.up(x) & preimage:
                return Violation('convex-preimage', worlds=(y, x),
                                 message="preimage skips a world between two predecessors")
    return None


def eventuality_failures(graph: nx.DiGraph, worlds: Sequence[Any],
                         labels: Mapping[Any, TwoSidedType],
                         sigma: ClosureSet) -> List[Tuple[Any, Formula]]:
    """
    Unrealized eventualities on a finite world graph

    A positive F-formula needs a reachable world where its operand is
    positive; a negative G-formula needs a reachable world where its operand
    is negative. Reachability is reflexive.

    Returns:
        (world, formula) pairs in world order, then closure order
    """
    eventualities = sigma.of_kind(Ev, Hence)
    if not eventualities:
        return []
    reverse = graph.reverse(copy=False)
    realizable: Dict[Formula, Set[Any]] = {}
    for e in eventualities:
        if isinstance(e, Ev):
            goals = [w for w in worlds if e.operand in labels[w].pos]
        else:
            goals = [w for w in worlds if e.operand in labels[w].neg]
        realizable[e] = set(nx.multi_source_dijkstra_path_length(reverse, goals)) if goals else set()

    failures = []
    for w in worlds:
        label = labels[w]
        for e in eventualities:
            claimed = e in label.pos if isinstance(e, Ev) else e in label.neg
            if claimed and w not in realizable[e]:
                failures.append((w, e))
    return failures


def check_omega_sensible(s: LabelledSystem) -> Optional[Violation]:
    failures = eventuality_failures(s.world_graph(), s.worlds, s.labels, s.sigma)
    if failures:
        w, e = failures[0]
        return Violation('omega-sensible', worlds=(w,), formula=e,
                         message="eventuality never realized along the relation")
    return None


def validate_quasimodel(s: LabelledSystem) -> Optional[Violation]:
    """First violation among labels, space, seriality, confluence, convexity, sensibility and eventualities"""
    for check in (check_labels, validate_space, check_seriality, check_confluence,
                  check_convex, check_sensible, check_omega_sensible):
        violation = check(s)
        if violation is not None:
            logger.debug(f"{check.__name__}: {violation}")
            return violation
    return None


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def convex_closure(s: LabelledSystem) -> LabelledSystem:
    """
    Replace R by the pairs (x, y) having x1 <= x <= x2 and y1 <= y <= y2
    with x2 R y1 and x1 R y2

    The two witnesses are independent, so the result is the intersection of
    (<= ; R ; <=) and (>= ; R ; >=).
    """
    lower_upper: Set[Pair] = set()
    upper_lower: Set[Pair] = set()
    for a, b in s.rel:
        lower_upper.update((x, y) for x in s.down(a) for y in s.up(b))
        upper_lower.update((x, y) for x in s.up(a) for y in s.down(b))
    return replace(s, rel=frozenset(lower_upper & upper_lower))


def quotient_with_map(s: LabelledSystem) -> Tuple[LabelledSystem, Dict[str, str]]:
    """
    Quotient of a system with functional R, together with the class of each world

    Raises:
        ModelError: If some world does not have exactly one successor
    """
    for w in s.worlds:
        if len(s.succ(w)) != 1:
            raise ModelError('functional-relation',
                             f"world {w} has {len(s.succ(w))} successors; quotient needs exactly one")

    keys: Dict[str, Tuple[TwoSidedType, FrozenSet[TwoSidedType]]] = {}
    for w in s.worlds:
        keys[w] = (s.labels[w], frozenset(s.labels[v] for v in s.comparable(w)))

    def canonical(key: Tuple[TwoSidedType, FrozenSet[TwoSidedType]]) -> tuple:
        label, component = key
        return (sorted(t.key() for t in component), label.key())

    distinct = sorted(set(keys.values()), key=canonical)
    names = {key: f"q{i}" for i, key in enumerate(distinct)}
    class_of = {w: names[keys[w]] for w in s.worlds}

    labels = {names[key]: key[0] for key in distinct}
    order = [(names[a], names[b]) for a in distinct for b in distinct
             if a != b and a[1] == b[1] and leq_sigma(a[0], b[0])]
    rel = {(class_of[w], class_of[next(iter(s.succ(w)))]) for w in s.worlds}

    induced = LabelledSystem.build([names[k] for k in distinct], order, labels, rel, s.sigma)
    logger.debug(f"Quotient: {len(s.worlds)} worlds -> {len(distinct)} classes")
    return convex_closure(induced), class_of


def quotient(s: LabelledSystem) -> LabelledSystem:
    return quotient_with_map(s)[0]


def falsifies(s: LabelledSystem, f: Formula) -> bool:
    """
    Raises:
        ClosureError: If f is not in the system's closure set
    """
    if f not in s.sigma:
        raise ClosureError(f"{f} is not in the closure set")
    return any(f in s.labels[w].neg for w in s.worlds)


# ---------------------------------------------------------------------------
# Quasimodel files
# ---------------------------------------------------------------------------

def covering_pairs(s: LabelledSystem) -> List[Pair]:
    pairs = []
    for a in s.worlds:
        for b in s.sorted_worlds(s.up(a)):
            if a == b:
                continue
            if not any(c not in (a, b) and s.leq(c, b) for c in s.up(a)):
                pairs.append((a, b))
    return pairs


def quasimodel_to_dict(s: LabelledSystem) -> Dict[str, Any]:
    return {
        'sigma': s.sigma.to_strings(),
        'worlds': list(s.worlds),
        'order': [[a, b] for a, b in covering_pairs(s)],
        'labels': {w: s.labels[w].to_dict() for w in s.worlds},
        'rel': [[a, b] for a, b in sorted(s.rel, key=lambda p: (s.position[p[0]], s.position[p[1]]))],
    }


def quasimodel_from_dict(data: Mapping[str, Any]) -> LabelledSystem:
    """
    Raises:
        ModelFormatError: On missing fields, bad formulas, or a sigma that is not subformula-closed
    """
    if not isinstance(data, Mapping):
        raise ModelFormatError("A quasimodel must be a JSON object")
    try:
        listed = [parse(text) for text in data['sigma']]
        worlds = [str(w) for w in data['worlds']]
        order = [(str(a), str(b)) for a, b in data.get('order', [])]
        rel = [(str(a), str(b)) for a, b in data.get('rel', [])]
        raw_labels = dict(data['labels'])
    except FormulaSyntaxError as e:
        raise ModelFormatError(f"Bad formula in sigma: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Quasimodel needs sigma, worlds and labels: {e}") from e

    sigma = closure(listed)
    if len(sigma) != len(set(listed)):
        raise ModelFormatError("sigma is not closed under subformulas")

    labels = {}
    for w, label in raw_labels.items():
        try:
            pos = frozenset(parse(text) for text in label.get('pos', []))
            neg = frozenset(parse(text) for text in label.get('neg', []))
        except (FormulaSyntaxError, AttributeError) as e:
            raise ModelFormatError(f"Bad label for world {w}: {e}") from e
        outside = [f for f in pos | neg if f not in sigma]
        if outside:
            raise ModelFormatError(f"Label of {w} mentions {outside[0]} outside sigma")
        labels[str(w)] = TwoSidedType(pos, neg, sigma)
    return LabelledSystem.build(worlds, order, labels, rel, sigma)


def load_quasimodel(path: Union[str, Path]) -> LabelledSystem:
    return quasimodel_from_dict(load_json_file(path))
