"""
Characteristic formulas of quasimodel worlds and their provable laws
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from config import Config
from decide import Moment, MomentSpace, Verdict, decide
from formula import (And, ClosureSet, Coimp, Formula, Imp, Next, closure, coneg, conj, disj, neg)
from types_core import TwoSidedType, enumerate_saturated
from utils import BudgetExceededError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CharContext:
    """A world given by its type and the set of types on its component"""
    sigma: ClosureSet
    label: TwoSidedType
    component: FrozenSet[TwoSidedType]

    @classmethod
    def from_moment(cls, moment: Moment, index: int) -> 'CharContext':
        return cls(moment.sigma, moment[index], frozenset(moment.chain))


def arrow_formulas(delta: TwoSidedType) -> Tuple[Formula, Formula]:
    """The implication and co-implication from the conjunction of delta's positive part to the disjunction of its negative part"""
    positive = conj(delta.ordered_pos())
    negative = disj(delta.ordered_neg())
    return Imp(positive, negative), Coimp(positive, negative)


def chi(ctx: CharContext, saturated: Optional[List[TwoSidedType]] = None) -> Tuple[Formula, Formula, Formula]:
    """
    Characteristic formulas (chi0, chi_plus, chi_minus) of a world

    chi0 asserts that every type on the component is realized somewhere
    above or below and that no other type is.
    """
    saturated = enumerate_saturated(ctx.sigma) if saturated is None else saturated
    inside = [coneg(arrow_formulas(delta)[0]) for delta in saturated if delta in ctx.component]
    outside = [neg(arrow_formulas(delta)[1]) for delta in saturated if delta not in ctx.component]
    chi0 = conj(inside + outside)
    forward, backward = arrow_formulas(ctx.label)
    return chi0, And(backward, chi0), Imp(chi0, forward)


def _unique(formulas: List[Formula]) -> List[Formula]:
    seen = set()
    result = []
    for f in formulas:
        if f not in seen:
            seen.add(f)
            result.append(f)
    return result


def char_laws(sigma: ClosureSet, successor_laws: bool = False,
              budget: Optional[int] = None) -> List[Formula]:
    """
    Provable laws of the characteristic formulas of every world in the moment space

    Args:
        sigma: Closure set
        successor_laws: Also emit the one-step laws along all sensible transitions
        budget: Largest accepted closure size; defaults to Config.CHARFORM_BUDGET

    Raises:
        BudgetExceededError: If sigma is larger than the budget
    """
    budget = Config.CHARFORM_BUDGET if budget is None else budget
    if len(sigma) > budget:
        raise BudgetExceededError(len(sigma), budget)

    saturated = enumerate_saturated(sigma)
    space = MomentSpace(sigma)
    formulas: Dict[Tuple[int, int], Tuple[Formula, Formula, Formula]] = {}
    for k, moment in enumerate(space.moments):
        for i in range(len(moment)):
            formulas[(k, i)] = chi(CharContext.from_moment(moment, i), saturated)

    laws: List[Formula] = []
    for (k, i), (_, plus, minus) in formulas.items():
        label = space.moments[k][i]
        laws.extend(Imp(plus, psi) for psi in label.ordered_pos())
        laws.extend(Imp(psi, minus) for psi in label.ordered_neg())
        laws.extend(Imp(plus, Coimp(plus, psi)) for psi in label.ordered_neg())
        laws.extend(Imp(Imp(psi, minus), minus) for psi in label.ordered_pos())

    if successor_laws:
        for k in range(len(space.moments)):
            targets = space.successors(k)
            for i in range(len(space.moments[k])):
                nexts = sorted((k2, j) for k2, pairs in targets.items() for a, j in pairs if a == i)
                _, plus, minus = formulas[(k, i)]
                laws.append(Imp(plus, Next(disj(formulas[v][1] for v in nexts))))
                laws.append(Imp(Next(conj(formulas[v][2] for v in nexts)), minus))

    laws = _unique(laws)
    logger.debug(f"{len(laws)} characteristic laws over {len(sigma)} formulas")
    return laws


def check_law(law: Formula) -> Verdict:
    """Decide a law; laws are bounded through their closure set, not the decide budget"""
    return decide(law, budget=len(closure(law)))
