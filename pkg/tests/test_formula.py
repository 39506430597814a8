"""
Tests for formula syntax and closure sets
"""
import pytest
from hypothesis import given, settings

from formula import (BOT, TOP, And, Atom, Coimp, Ev, Hence, Imp, Meta, Next, Or, closure, conj,
                     depth, disj, parse, parse_schema, print_formula)
from utils import FormulaSyntaxError

from strategies import formulas

p, q, r, s = Atom('p'), Atom('q'), Atom('r'), Atom('s')


class TestParse:

    @pytest.mark.parametrize('text,expected', [
        ('p => (q <= r)', Imp(p, Coimp(q, r))),
        ('!p', Imp(p, BOT)),
        ('p <=> q', And(Imp(p, q), Imp(q, p))),
        ('~p', Coimp(TOP, p)),
        ('top', TOP),
        ('bot', BOT),
        ('p => q => r', Imp(p, Imp(q, r))),
        ('p <= q <= r', Coimp(Coimp(p, q), r)),
        ('X p & q | r => s', Imp(Or(And(Next(p), q), r), s)),
        ('G F !p', Hence(Ev(Imp(p, BOT)))),
        ('p & q & r', And(And(p, q), r)),
        ('  (p|q)\n&\tr ', And(Or(p, q), r)),
    ])
    def test_parse_examples(self, text, expected):
        assert parse(text) == expected

    @pytest.mark.parametrize('text', [
        'p => q <= r',
        'p <= q => r',
        'p <=> q <=> r',
        'p => q <=> r',
        '(p',
        'p q',
        '',
        '& p',
    ])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse(text)

    def test_error_location(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse('p #')
        assert (info.value.line, info.value.column) == (1, 3)

        with pytest.raises(FormulaSyntaxError) as info:
            parse('p &\n& q')
        assert (info.value.line, info.value.column) == (2, 1)

    def test_metavariables_only_in_schemas(self):
        with pytest.raises(FormulaSyntaxError):
            parse('$a => p')
        assert parse_schema('$a => $b') == Imp(Meta('a'), Meta('b'))


class TestPrint:

    @pytest.mark.parametrize('f,expected', [
        (Imp(p, BOT), 'p => bot'),
        (Next(Ev(p)), 'X F p'),
        (And(p, Or(q, r)), 'p & (q | r)'),
        (Imp(Imp(p, q), r), '(p => q) => r'),
        (Imp(p, Imp(q, r)), 'p => q => r'),
        (Coimp(Coimp(p, q), r), 'p <= q <= r'),
        (Imp(p, Coimp(q, r)), 'p => (q <= r)'),
        (Next(And(p, q)), 'X (p & q)'),
    ])
    def test_print_examples(self, f, expected):
        assert print_formula(f) == expected
        assert str(f) == expected

    @settings(max_examples=300)
    @given(formulas(atom_names=('p', 'q', 'r'), max_leaves=30))
    def test_round_trip(self, f):
        assert parse(print_formula(f)) == f

    @given(formulas(max_leaves=20))
    def test_depth_is_bounded_by_size(self, f):
        assert 1 <= depth(f) <= f.size


class TestClosure:

    @pytest.mark.parametrize('text,members', [
        ('F p', {'F p', 'p'}),
        ('p => (q <= p)', {'p => (q <= p)', 'p', 'q <= p', 'q'}),
        ('bot', {'bot'}),
        ('!p', {'p => bot', 'p', 'bot'}),
    ])
    def test_closure_examples(self, text, members):
        assert set(closure(parse(text)).to_strings()) == members

    @given(formulas())
    def test_closure_is_idempotent(self, f):
        sigma = closure(f)
        assert closure(sigma) == sigma
        assert closure(list(sigma)) == sigma

    @given(formulas())
    def test_subformulas_come_first(self, f):
        sigma = closure(f)
        for g in sigma:
            for child in g.children:
                assert sigma.index(child) < sigma.index(g)

    def test_quasi_atoms(self):
        sigma = closure(parse('X p & (q => G r)'))
        assert set(sigma.quasi_atoms()) == {p, q, r, Next(p), Hence(r)}

    def test_empty_conjunction_and_disjunction(self):
        assert conj([]) == TOP
        assert disj([]) == BOT
        assert conj([p, q, r]) == And(And(p, q), r)
        assert disj([p]) == p

    def test_empty_closure(self):
        assert len(closure([])) == 0
