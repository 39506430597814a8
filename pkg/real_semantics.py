"""
Exact evaluation of formulas in finite real-valued models
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from formula import (Atom, Bot, Coimp, Ev, Formula, Hence, Imp, Next, Or, And, Top)
from utils import (ModelError, ModelFormatError, Violation, format_rational, load_json_file,
                   parse_rational)

logger = logging.getLogger(__name__)

ATOM_NAME = re.compile(r'^[a-z][A-Za-z0-9_]*$')

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Flow:
    """Finite set of moments with a total successor function"""
    moments: Tuple[str, ...]
    succ: Mapping[str, str]

    def validate(self) -> Optional[Violation]:
        if not self.moments:
            return Violation('flow-nonempty', message="a flow needs at least one moment")
        if len(set(self.moments)) != len(self.moments):
            return Violation('flow-distinct', message="moment identifiers repeat")
        known = set(self.moments)
        for t in self.moments:
            if t not in self.succ:
                return Violation('flow-total', worlds=(t,), message="moment without successor")
            if self.succ[t] not in known:
                return Violation('flow-total', worlds=(t, self.succ[t]),
                                 message="successor is not a moment")
        extra = sorted(set(self.succ) - known)
        if extra:
            return Violation('flow-total', worlds=tuple(extra), message="successor of unknown moment")
        return None

    def check(self) -> None:
        violation = self.validate()
        if violation is not None:
            raise ModelError(violation.condition, str(violation))

    def orbit(self, t: str) -> List[str]:
        """Distinct moments t, S(t), S(S(t)), ... up to the first repetition"""
        if t not in self.succ:
            raise ModelError('unknown-moment', f"{t!r} is not a moment of the flow")
        seen = []
        visited = set()
        while t not in visited:
            visited.add(t)
            seen.append(t)
            t = self.succ[t]
        return seen

    def to_dict(self) -> Dict[str, Any]:
        return {'moments': list(self.moments), 'succ': {t: self.succ[t] for t in self.moments}}


def flow_from_dict(data: Mapping[str, Any]) -> Flow:
    try:
        moments = tuple(str(t) for t in data['moments'])
        succ = {str(k): str(v) for k, v in dict(data['succ']).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"Flow needs 'moments' and 'succ': {e}") from e
    flow = Flow(moments, succ)
    flow.check()
    return flow


@dataclass(frozen=True)
class RealModel:
    """A flow with a rational valuation; unlisted (atom, moment) pairs read as 0"""
    flow: Flow
    val: Mapping[str, Mapping[str, Fraction]] = field(default_factory=dict)

    def value(self, atom: str, t: str) -> Fraction:
        return self.val.get(atom, {}).get(t, ZERO)

    def validate(self) -> Optional[Violation]:
        violation = self.flow.validate()
        if violation is not None:
            return violation
        for atom in sorted(self.val):
            for t, v in sorted(self.val[atom].items()):
                if t not in self.flow.succ:
                    return Violation('unknown-moment', worlds=(t,), formula=Atom(atom))
                if not ZERO <= v <= ONE:
                    return Violation('unit-interval', worlds=(t,), formula=Atom(atom),
                                     message=f"value {format_rational(v)} outside [0,1]")
        return None

    def check(self) -> None:
        violation = self.validate()
        if violation is not None:
            raise ModelError(violation.condition, str(violation))

    def to_dict(self) -> Dict[str, Any]:
        data = self.flow.to_dict()
        data['val'] = {atom: {t: format_rational(v) for t, v in values.items()}
                       for atom, values in self.val.items()}
        return data


def real_model_from_dict(data: Mapping[str, Any]) -> RealModel:
    """
    Build a real model from its JSON form

    Raises:
        ModelFormatError: On missing fields, unparseable values or values outside [0,1]
        ModelError: On a non-total flow or a valuation of an unknown moment
    """
    if not isinstance(data, Mapping):
        raise ModelFormatError("A real model must be a JSON object")
    flow = flow_from_dict(data)
    val: Dict[str, Dict[str, Fraction]] = {}
    raw_val = data.get('val', {})
    if not isinstance(raw_val, Mapping):
        raise ModelFormatError("'val' must map atoms to their values")
    for atom, values in raw_val.items():
        if not ATOM_NAME.match(atom):
            raise ModelFormatError(f"Invalid atom name {atom!r}")
        if not isinstance(values, Mapping):
            raise ModelFormatError(f"Values of {atom!r} must map moments to rationals")
        val[atom] = {str(t): parse_rational(v) for t, v in values.items()}
        outside = [t for t, v in val[atom].items() if not ZERO <= v <= ONE]
        if outside:
            raise ModelFormatError(f"Value of {atom!r} at {outside[0]!r} is outside [0,1]")
    model = RealModel(flow, val)
    model.check()
    return model


def load_real_model(path: Union[str, Path]) -> RealModel:
    return real_model_from_dict(load_json_file(path))


class _RealEvaluator:
    """Memoised evaluation of one model"""

    def __init__(self, model: RealModel):
        self.model = model
        self.memo: Dict[Tuple[Formula, str], Fraction] = {}
        self.orbits: Dict[str, List[str]] = {}

    def orbit(self, t: str) -> List[str]:
        if t not in self.orbits:
            self.orbits[t] = self.model.flow.orbit(t)
        return self.orbits[t]

    def value(self, f: Formula, t: str) -> Fraction:
        key = (f, t)
        cached = self.memo.get(key)
        if cached is not None:
            return cached

        if isinstance(f, Atom):
            v = self.model.value(f.name, t)
        elif isinstance(f, Bot):
            v = ZERO
        elif isinstance(f, Top):
            v = ONE
        elif isinstance(f, And):
            v = min(self.value(f.left, t), self.value(f.right, t))
        elif isinstance(f, Or):
            v = max(self.value(f.left, t), self.value(f.right, t))
        elif isinstance(f, Imp):
            a, b = self.value(f.left, t), self.value(f.right, t)
            v = ONE if a <= b else b
        elif isinstance(f, Coimp):
            a, b = self.value(f.left, t), self.value(f.right, t)
            v = a if a > b else ZERO
        elif isinstance(f, Next):
            v = self.value(f.operand, self.model.flow.succ[t])
        elif isinstance(f, Ev):
            v = max(self.value(f.operand, s) for s in self.orbit(t))
        elif isinstance(f, Hence):
            v = min(self.value(f.operand, s) for s in self.orbit(t))
        else:
            raise ValueError(f"Unsupported formula node: {f!r}")

        self.memo[key] = v
        return v


def eval_real(m: RealModel, f: Formula, t: str) -> Fraction:
    """
    Truth value of f at moment t

    Args:
        m: Real model
        f: Formula
        t: Moment identifier

    Returns:
        Exact value in [0,1]

    Raises:
        ModelError: If t is not a moment of the model
    """
    if t not in m.flow.succ:
        raise ModelError('unknown-moment', f"{t!r} is not a moment of the flow")
    return _RealEvaluator(m).value(f, t)


def real_values(m: RealModel, f: Formula) -> Dict[str, Fraction]:
    """Value of f at every moment, in flow order"""
    evaluator = _RealEvaluator(m)
    return {t: evaluator.value(f, t) for t in m.flow.moments}


def globally_true_real(m: RealModel, f: Formula) -> bool:
    return all(v == ONE for v in real_values(m, f).values())
