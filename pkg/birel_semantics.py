"""
Model checking over finite bi-relational models and their conversion to quasimodels
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Set, Tuple, Union

from formula import (And, Atom, Bot, ClosureSet, Coimp, Ev, Formula, Hence, Imp, Next, Or, Top)
from labelled import LabelledSystem
from real_semantics import ATOM_NAME, Flow, RealModel, flow_from_dict
from types_core import TwoSidedType
from utils import ModelError, ModelFormatError, Violation, format_rational, load_json_file

logger = logging.getLogger(__name__)

Point = Tuple[str, str]


@dataclass(frozen=True)
class BiRelModel:
    """
    A linear order of worlds crossed with a flow

    worlds are listed in increasing order; val maps each atom to the set of
    (world, moment) points where it holds.
    """
    worlds: Tuple[str, ...]
    flow: Flow
    val: Mapping[str, FrozenSet[Point]] = field(default_factory=dict)

    @property
    def points(self) -> FrozenSet[Point]:
        return frozenset((w, t) for w in self.worlds for t in self.flow.moments)

    def validate(self) -> Optional[Violation]:
        """First violated model invariant, or None"""
        if not self.worlds:
            return Violation('worlds-nonempty', message="at least one world is required")
        if len(set(self.worlds)) != len(self.worlds):
            return Violation('total-order', message="world identifiers repeat, so the list is not a linear order")
        violation = self.flow.validate()
        if violation is not None:
            return violation

        position = {w: i for i, w in enumerate(self.worlds)}
        for atom in sorted(self.val):
            for w, t in sorted(self.val[atom]):
                if w not in position or t not in self.flow.succ:
                    return Violation('unknown-point', worlds=(w, t), formula=Atom(atom))
            for w, t in sorted(self.val[atom]):
                for v in self.worlds[:position[w]]:
                    if (v, t) not in self.val[atom]:
                        return Violation('downward-closed', worlds=(w, v, t), formula=Atom(atom),
                                         message=f"{atom} holds at ({w},{t}) but not at ({v},{t})")
        return None

    def check(self) -> None:
        violation = self.validate()
        if violation is not None:
            raise ModelError(violation.condition, str(violation))

    def to_dict(self) -> Dict[str, Any]:
        data = self.flow.to_dict()
        data['worlds'] = list(self.worlds)
        data['val'] = {atom: [[w, t] for w, t in sorted(points)]
                       for atom, points in self.val.items()}
        return data


def birel_model_from_dict(data: Mapping[str, Any]) -> BiRelModel:
    """
    Build a bi-relational model from its JSON form

    Raises:
        ModelFormatError: On missing fields
        ModelError: On a violated model invariant
    """
    if not isinstance(data, Mapping):
        raise ModelFormatError("A bi-relational model must be a JSON object")
    try:
        worlds = tuple(str(w) for w in data['worlds'])
    except (KeyError, TypeError) as e:
        raise ModelFormatError(f"Model needs a 'worlds' list: {e}") from e
    flow = flow_from_dict(data)
    val: Dict[str, FrozenSet[Point]] = {}
    raw_val = data.get('val', {})
    if not isinstance(raw_val, Mapping):
        raise ModelFormatError("'val' must map atoms to lists of points")
    for atom, points in raw_val.items():
        if not ATOM_NAME.match(atom):
            raise ModelFormatError(f"Invalid atom name {atom!r}")
        try:
            val[atom] = frozenset((str(w), str(t)) for w, t in points)
        except (TypeError, ValueError) as e:
            raise ModelFormatError(f"Valuation of {atom!r} must list [world, moment] pairs") from e
    model = BiRelModel(worlds, flow, val)
    model.check()
    return model


def load_birel_model(path: Union[str, Path]) -> BiRelModel:
    return birel_model_from_dict(load_json_file(path))


class _Extensions:
    """Memoised truth sets for one model"""

    def __init__(self, model: BiRelModel):
        self.model = model
        self.memo: Dict[Formula, FrozenSet[Point]] = {}
        self.orbits = {t: model.flow.orbit(t) for t in model.flow.moments}

    def of(self, f: Formula) -> FrozenSet[Point]:
        cached = self.memo.get(f)
        if cached is not None:
            return cached
        m = self.model
        worlds, moments = m.worlds, m.flow.moments

        if isinstance(f, Atom):
            ext = frozenset(m.val.get(f.name, frozenset()))
        elif isinstance(f, Bot):
            ext = frozenset()
        elif isinstance(f, Top):
            ext = m.points
        elif isinstance(f, And):
            ext = self.of(f.left) & self.of(f.right)
        elif isinstance(f, Or):
            ext = self.of(f.left) | self.of(f.right)
        elif isinstance(f, Imp):
            a, b = self.of(f.left), self.of(f.right)
            points: Set[Point] = set()
            for t in moments:
                # every v <= w satisfying the antecedent satisfies the consequent
                holds = True
                for w in worlds:
                    holds = holds and ((w, t) not in a or (w, t) in b)
                    if holds:
                        points.add((w, t))
            ext = frozenset(points)
        elif isinstance(f, Coimp):
            a, b = self.of(f.left), self.of(f.right)
            points = set()
            for t in moments:
                # some v >= w satisfies the left side but not the right
                witnessed = False
                for w in reversed(worlds):
                    witnessed = witnessed or ((w, t) in a and (w, t) not in b)
                    if witnessed:
                        points.add((w, t))
            ext = frozenset(points)
        elif isinstance(f, Next):
            a = self.of(f.operand)
            ext = frozenset((w, t) for w in worlds for t in moments if (w, m.flow.succ[t]) in a)
        elif isinstance(f, Ev):
            a = self.of(f.operand)
            ext = frozenset((w, t) for w in worlds for t in moments
                            if any((w, s) in a for s in self.orbits[t]))
        elif isinstance(f, Hence):
            a = self.of(f.operand)
            ext = frozenset((w, t) for w in worlds for t in moments
                            if all((w, s) in a for s in self.orbits[t]))
        else:
            raise ValueError(f"Unsupported formula node: {f!r}")

        self.memo[f] = ext
        return ext


def extension(m: BiRelModel, f: Formula) -> FrozenSet[Point]:
    """
    Truth set of f as (world, moment) points

    Raises:
        ModelError: If the model violates one of its invariants
    """
    m.check()
    return _Extensions(m).of(f)


def globally_true_birel(m: BiRelModel, f: Formula) -> bool:
    return extension(m, f) == m.points


def point_id(w: str, t: str) -> str:
    return f"{w}@{t}"


def model_to_quasimodel(m: BiRelModel, sigma: ClosureSet) -> LabelledSystem:
    """
    Labelled system over the points of m

    Points with different moments are incomparable; within a moment the order
    is that of the worlds. Labels are the extensions restricted to sigma and
    each point's successor is the same world at the next moment.
    """
    m.check()
    extensions = _Extensions(m)
    truth = {f: extensions.of(f) for f in sigma}

    worlds: List[str] = []
    labels: Dict[str, TwoSidedType] = {}
    order: List[Tuple[str, str]] = []
    rel: List[Tuple[str, str]] = []
    for t in m.flow.moments:
        for i, w in enumerate(m.worlds):
            x = point_id(w, t)
            worlds.append(x)
            labels[x] = TwoSidedType.saturated((f for f in sigma if (w, t) in truth[f]), sigma)
            if i + 1 < len(m.worlds):
                order.append((x, point_id(m.worlds[i + 1], t)))
            rel.append((x, point_id(w, m.flow.succ[t])))

    logger.debug(f"Converted model with {len(worlds)} points over {len(sigma)} formulas")
    return LabelledSystem.build(worlds, order, labels, rel, sigma)


def real_to_birel(m: RealModel) -> BiRelModel:
    """
    Threshold model of a real model

    There is one world per positive value occurring in m (and for 1), ordered
    by value; an atom holds at (c, t) iff its value at t is at least c. Every
    formula then holds at (c, t) iff its real value at t is at least c.
    """
    m.check()
    thresholds = sorted({v for values in m.val.values() for v in values.values() if v > 0}
                        | {Fraction(1)})
    names = [f"c{format_rational(c)}" for c in thresholds]
    val = {
        atom: frozenset((name, t) for name, c in zip(names, thresholds)
                        for t in m.flow.moments if m.value(atom, t) >= c)
        for atom in m.val
    }
    return BiRelModel(tuple(names), m.flow, val)
