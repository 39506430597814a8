"""
Tests for characteristic formulas
"""
import pytest

from charform import CharContext, arrow_formulas, char_laws, check_law, chi
from decide import enumerate_moments
from formula import BOT, TOP, And, Atom, Coimp, Imp, Meta, closure, parse, subformulas
from types_core import TwoSidedType
from utils import BudgetExceededError

p, q = Atom('p'), Atom('q')
SIGMA_P = closure(p)
TRUE_P = TwoSidedType.saturated([p], SIGMA_P)
FALSE_P = TwoSidedType.saturated([], SIGMA_P)


def singleton(label):
    return CharContext(label.sigma, label, frozenset({label}))


class TestArrows:

    @pytest.mark.parametrize('delta,expected', [
        (TRUE_P, (Imp(p, BOT), Coimp(p, BOT))),
        (FALSE_P, (Imp(TOP, p), Coimp(TOP, p))),
        (TwoSidedType(frozenset({p}), frozenset({q}), closure([p, q])), (Imp(p, q), Coimp(p, q))),
    ])
    def test_examples(self, delta, expected):
        assert arrow_formulas(delta) == expected


class TestChi:

    def test_true_singleton(self):
        chi0, plus, minus = chi(singleton(TRUE_P))
        assert chi0 == And(Coimp(TOP, Imp(p, BOT)), Imp(Coimp(TOP, p), BOT))
        assert plus == And(Coimp(p, BOT), chi0)
        assert minus == Imp(chi0, Imp(p, BOT))

    def test_depends_only_on_label_and_component(self):
        moments = enumerate_moments(closure(parse('X p')))
        for moment in moments:
            for i in range(len(moment)):
                ctx = CharContext.from_moment(moment, i)
                again = CharContext(ctx.sigma, ctx.label, frozenset(ctx.component))
                assert chi(ctx) == chi(again)

    def test_only_primitive_connectives(self):
        for moment in enumerate_moments(closure(parse('X p'))):
            for i in range(len(moment)):
                for f in chi(CharContext.from_moment(moment, i)):
                    assert not any(isinstance(g, Meta) for g in subformulas(f))
                    assert {g.name for g in subformulas(f) if isinstance(g, Atom)} <= {'p'}

    def test_two_element_component(self):
        chain = CharContext(SIGMA_P, TRUE_P, frozenset({TRUE_P, FALSE_P}))
        chi0, _, _ = chi(chain)
        assert chi0 == And(Coimp(TOP, Imp(p, BOT)), Coimp(TOP, Imp(TOP, p)))


class TestLaws:

    def test_examples(self):
        laws = char_laws(SIGMA_P)
        _, plus_true, _ = chi(singleton(TRUE_P))
        _, _, minus_false = chi(singleton(FALSE_P))
        assert Imp(plus_true, p) in laws
        assert Imp(p, minus_false) in laws
        assert len(laws) == len(set(laws))

    def test_successor_laws_are_extra(self):
        assert set(char_laws(SIGMA_P)) < set(char_laws(SIGMA_P, successor_laws=True))

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            char_laws(closure(parse('p & q')))
        assert char_laws(closure(parse('p & q')), budget=3)

    @pytest.mark.slow
    def test_laws_are_valid(self):
        for law in char_laws(SIGMA_P):
            assert check_law(law).valid, str(law)

    @pytest.mark.slow
    def test_successor_laws_are_valid(self):
        base = set(char_laws(SIGMA_P))
        for law in char_laws(SIGMA_P, successor_laws=True):
            if law not in base:
                assert check_law(law).valid, str(law)

    @pytest.mark.slow
    @pytest.mark.skip(reason="laws over closure(X p) exceed what the search decides in reasonable time")
    def test_next_laws_are_valid(self):
        for law in char_laws(closure(parse('X p')), budget=2):
            assert check_law(law).valid, str(law)
