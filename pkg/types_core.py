"""
Two-sided Sigma-types: validation, enumeration and the information order
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from formula import (Atom, Bot, ClosureSet, Coimp, Ev, Formula, Hence, Imp, Meta, Next,
                     Or, And, Top, print_formula)
from utils import ClosureError, Violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoSidedType:
    """A pair (pos, neg) of subsets of a closure set"""
    pos: FrozenSet[Formula]
    neg: FrozenSet[Formula]
    sigma: ClosureSet = field(compare=False, repr=False)

    @classmethod
    def saturated(cls, pos: Iterable[Formula], sigma: ClosureSet) -> 'TwoSidedType':
        """The saturated type whose positive part is pos"""
        pos = frozenset(pos)
        return cls(pos, frozenset(f for f in sigma if f not in pos), sigma)

    @property
    def is_saturated(self) -> bool:
        return len(self.pos) + len(self.neg) == len(self.sigma)

    def key(self) -> Tuple[int, ...]:
        """Sign vector in closure order: 1 positive, 0 negative, -1 unassigned"""
        return tuple(1 if f in self.pos else 0 if f in self.neg else -1 for f in self.sigma)

    def ordered_pos(self) -> List[Formula]:
        return [f for f in self.sigma if f in self.pos]

    def ordered_neg(self) -> List[Formula]:
        return [f for f in self.sigma if f in self.neg]

    def __str__(self) -> str:
        pos = ', '.join(print_formula(f) for f in self.ordered_pos())
        neg = ', '.join(print_formula(f) for f in self.ordered_neg())
        return f"({{{pos}}}, {{{neg}}})"

    def to_dict(self) -> Dict[str, List[str]]:
        return {'pos': [print_formula(f) for f in self.ordered_pos()],
                'neg': [print_formula(f) for f in self.ordered_neg()]}


Condition = Tuple[str, str, Callable[[Formula, FrozenSet[Formula], FrozenSet[Formula]], bool]]

# Local closure conditions, numbered as in the definition of two-sided types.
# Each predicate must hold for every member f of the closure set.
_CONDITIONS: List[Condition] = [
    ('type-2', "conjunction positive needs both conjuncts positive",
     lambda f, P, N: not (isinstance(f, And) and f in P) or (f.left in P and f.right in P)),
    ('type-3', "conjunction negative needs a negative conjunct",
     lambda f, P, N: not (isinstance(f, And) and f in N) or (f.left in N or f.right in N)),
    ('type-4', "disjunction positive needs a positive disjunct",
     lambda f, P, N: not (isinstance(f, Or) and f in P) or (f.left in P or f.right in P)),
    ('type-5', "disjunction negative needs both disjuncts negative",
     lambda f, P, N: not (isinstance(f, Or) and f in N) or (f.left in N and f.right in N)),
    ('type-6', "implication positive needs antecedent negative or consequent positive",
     lambda f, P, N: not (isinstance(f, Imp) and f in P) or (f.left in N or f.right in P)),
    ('type-7', "implication negative needs consequent negative",
     lambda f, P, N: not (isinstance(f, Imp) and f in N) or f.right in N),
    ('type-8', "coimplication negative needs left negative or right positive",
     lambda f, P, N: not (isinstance(f, Coimp) and f in N) or (f.left in N or f.right in P)),
    ('type-9', "coimplication positive needs left positive",
     lambda f, P, N: not (isinstance(f, Coimp) and f in P) or f.left in P),
    ('type-10', "eventually negative needs operand negative",
     lambda f, P, N: not (isinstance(f, Ev) and f in N) or f.operand in N),
    ('type-11', "henceforth positive needs operand positive",
     lambda f, P, N: not (isinstance(f, Hence) and f in P) or f.operand in P),
    ('type-bot', "bot is never positive",
     lambda f, P, N: not (isinstance(f, Bot) and f in P)),
    ('type-top', "top is never negative",
     lambda f, P, N: not (isinstance(f, Top) and f in N)),
]


def check_type(pos: Iterable[Formula], neg: Iterable[Formula],
               sigma: ClosureSet) -> Optional[Violation]:
    """
    Check the type conditions for (pos, neg) over sigma

    Returns:
        None if every condition holds, otherwise the lowest-numbered violation

    Raises:
        ClosureError: If pos or neg mention a formula outside sigma
    """
    pos = frozenset(pos)
    neg = frozenset(neg)
    outside = [f for f in pos | neg if f not in sigma]
    if outside:
        raise ClosureError(f"Formulas outside the closure set: "
                           f"{', '.join(print_formula(f) for f in outside)}")

    for f in sigma:
        if f in pos and f in neg:
            return Violation('type-1', formula=f, message="formula both positive and negative")

    for name, description, holds in _CONDITIONS:
        for f in sigma:
            if not holds(f, pos, neg):
                return Violation(name, formula=f, message=description)
    return None


def _allowed_signs(f: Formula, signs: Dict[Formula, bool]) -> Tuple[bool, ...]:
    """Signs f may take in a saturated type, given the signs of its children"""
    if isinstance(f, (Atom, Meta, Next)):
        return (True, False)
    if isinstance(f, Bot):
        return (False,)
    if isinstance(f, Top):
        return (True,)
    if isinstance(f, And):
        return (signs[f.left] and signs[f.right],)
    if isinstance(f, Or):
        return (signs[f.left] or signs[f.right],)
    if isinstance(f, Imp):
        if signs[f.right]:
            return (True,)
        return (False,) if signs[f.left] else (True, False)
    if isinstance(f, Coimp):
        if not signs[f.left]:
            return (False,)
        return (True,) if not signs[f.right] else (True, False)
    if isinstance(f, Ev):
        return (True,) if signs[f.operand] else (True, False)
    if isinstance(f, Hence):
        return (True, False) if signs[f.operand] else (False,)
    raise ValueError(f"Unsupported formula node: {f!r}")


def enumerate_saturated(sigma: ClosureSet) -> List[TwoSidedType]:
    """
    All saturated types over sigma, positive choices first

    Sign assignments are filtered prefix by prefix in closure order. Every
    condition relates a formula to its immediate subformulas, which come
    earlier, so this keeps exactly the assignments a full filter would keep.
    """
    formulas = sigma.formulas
    result: List[TwoSidedType] = []
    signs: Dict[Formula, bool] = {}

    def extend(i: int) -> None:
        if i == len(formulas):
            result.append(TwoSidedType.saturated(
                (f for f, s in signs.items() if s), sigma))
            return
        f = formulas[i]
        for sign in _allowed_signs(f, signs):
            signs[f] = sign
            extend(i + 1)
        del signs[f]

    if formulas:
        extend(0)
    else:
        result.append(TwoSidedType(frozenset(), frozenset(), sigma))
    logger.debug(f"{len(result)} saturated types over {len(sigma)} formulas")
    return result


def leq_sigma(a: TwoSidedType, b: TwoSidedType) -> bool:
    """Information order: a <= b iff a.neg is contained in b.neg and a.pos contains b.pos"""
    if a.sigma is not b.sigma and a.sigma != b.sigma:
        raise ClosureError("Types over different closure sets are incomparable")
    return a.neg <= b.neg and a.pos >= b.pos
