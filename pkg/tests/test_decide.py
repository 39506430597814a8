"""
Tests for moment enumeration, transitions and the elimination procedure
"""
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations, product

import pytest
from hypothesis import assume, given, settings

from birel_semantics import globally_true_birel
from calculus import derived_theorems, get_schema, instantiate, schema_catalogue
from decide import (MomentSpace, close_index_pairs, decide, decide_text, enumerate_moments,
                    size_bound, transitions)
from formula import Coimp, Imp, closure, parse
from labelled import convex_closure, falsifies, quasimodel_to_dict, sensible_pair, validate_quasimodel
from real_semantics import globally_true_real
from types_core import enumerate_saturated, leq_sigma
from utils import BudgetExceededError

from strategies import (SMALL_SIGMAS, birel_models, formulas, real_models, transition_unions,
                        two_chain_system)

ORACLE_SIGMAS = SMALL_SIGMAS + [closure(parse(text)) for text in ('p => q', 'p <= q', '!!p => p')]

# closures above this size take minutes to decide
FAST_CLOSURE = 8

SLOW_AXIOMS = tuple(s.id for s in schema_catalogue()
                    if s.id in ('IV.e', 'IV.f') or len(closure(instantiate(s))) > FAST_CLOSURE)

NON_THEOREMS = ['p | !p', '!!p => p', 'F p => p', 'p => G p', 'X p => p', '~p | !p']


def witness_closed(chain):
    for k, t in enumerate(chain):
        for f in t.neg:
            if isinstance(f, Imp) and not any(
                    f.left in s.pos and f.right in s.neg for s in chain[:k + 1]):
                return False
        for f in t.pos:
            if isinstance(f, Coimp) and not any(
                    f.left in s.pos and f.right in s.neg for s in chain[k:]):
                return False
    return True


def brute_force_moments(sigma):
    types = enumerate_saturated(sigma)
    found = set()
    for size in range(1, len(types) + 1):
        for subset in combinations(types, size):
            chain = sorted(subset, key=lambda t: len(t.neg))
            if all(leq_sigma(a, b) for a, b in zip(chain, chain[1:])) and witness_closed(chain):
                found.add(tuple(chain))
    return found


def brute_force_relations(c, d):
    """All serial, surjective, sensible, convex and fully confluent relations between two chains"""
    n, m = len(c), len(d)
    cells = [(i, j) for i in range(n) for j in range(m) if sensible_pair(c[i], d[j])]
    found = set()
    for chosen in product((False, True), repeat=len(cells)):
        r = {cell for cell, keep in zip(cells, chosen) if keep}
        if not all(any((i, j) in r for j in range(m)) for i in range(n)):
            continue
        if not all(any((i, j) in r for i in range(n)) for j in range(m)):
            continue
        images = [[j for j in range(m) if (i, j) in r] for i in range(n)]
        preimages = [[i for i in range(n) if (i, j) in r] for j in range(m)]
        if any(len(s) != s[-1] - s[0] + 1 for s in images + preimages):
            continue
        forth_down = all(any((x, y) in r for y in range(y2 + 1))
                         for x2, y2 in r for x in range(x2 + 1))
        forth_up = all(any((x2, y2) in r for y2 in range(y, m))
                       for x, y in r for x2 in range(x, n))
        back_down = all(any((x, y) in r for x in range(x2 + 1))
                        for x2, y2 in r for y in range(y2 + 1))
        back_up = all(any((x2, y2) in r for x2 in range(x, n))
                      for x, y in r for y2 in range(y, m))
        if forth_down and forth_up and back_down and back_up:
            found.add(frozenset(r))
    return found


def single_moment(sigma, *positive):
    pos = {parse(text) for text in positive}
    for moment in enumerate_moments(sigma):
        if len(moment) == 1 and moment[0].pos == pos:
            return moment
    raise LookupError(positive)


class TestMoments:

    def test_atom(self):
        moments = enumerate_moments(closure(parse('p')))
        assert len(moments) == 3
        assert sum(len(m) for m in moments) == 4

    def test_empty_closure(self):
        assert len(enumerate_moments(closure([]))) == 1

    @pytest.mark.parametrize('sigma', ORACLE_SIGMAS, ids=str)
    def test_agrees_with_brute_force(self, sigma):
        moments = enumerate_moments(sigma)
        chains = [m.chain for m in moments]
        assert len(chains) == len(set(chains))
        assert set(chains) == brute_force_moments(sigma)
        assert all(len(m) <= len(sigma) + 1 for m in moments)


class TestTransitions:

    def test_self_sensible_singleton(self):
        m = single_moment(closure(parse('p')), 'p')
        found = transitions(m, m)
        assert len(found) == 1
        assert found[0].pairs == {(0, 0)}

    def test_next_blocks_transition(self):
        sigma = closure(parse('X p'))
        assert transitions(single_moment(sigma, 'X p'), single_moment(sigma)) == []

    def test_agrees_with_brute_force(self):
        moments = enumerate_moments(closure(parse('X p')))
        for c in moments:
            for d in moments:
                found = [t.pairs for t in transitions(c, d)]
                assert len(found) == len(set(found))
                assert set(found) == brute_force_relations(c, d)

    @pytest.mark.parametrize('sigma', SMALL_SIGMAS, ids=str)
    def test_successors_are_unions_of_transitions(self, sigma):
        space = MomentSpace(sigma)
        for k, c in enumerate(space.moments):
            targets = space.successors(k)
            for k2, d in enumerate(space.moments):
                union = frozenset().union(*(t.pairs for t in transitions(c, d)))
                assert targets.get(k2, frozenset()) == union

    @given(transition_unions())
    def test_index_closure_matches_system_closure(self, union):
        c, d, pairs = union
        closed = convex_closure(two_chain_system(c, d, pairs)).rel
        as_indices = {(int(a[1:]), int(b[1:])) for a, b in closed}
        assert close_index_pairs(pairs, len(c), len(d)) == as_indices


class TestDecide:

    @pytest.mark.parametrize('text', NON_THEOREMS)
    def test_falsifiable_with_witness(self, text):
        f = parse(text)
        verdict = decide(f)
        assert verdict.falsifiable
        assert validate_quasimodel(verdict.witness) is None
        assert falsifies(verdict.witness, f)

    @pytest.mark.parametrize('text', [
        '(p => q) | (q => p)',
        'F p => p | X F p',
        'G p => p',
        '!p | !!p',
        '(p <= q) => p',
        'top',
    ])
    def test_valid(self, text):
        verdict = decide_text(text)
        assert verdict.valid
        assert verdict.witness is None

    def test_budget(self):
        with pytest.raises(BudgetExceededError) as info:
            decide(parse('p & q'), budget=2)
        assert (info.value.size, info.value.budget) == (3, 2)

    def test_size_bound(self):
        assert size_bound(0) == 2
        assert size_bound(1) == 16

    def test_threads_do_not_change_the_verdict(self):
        f = parse('F p => p')
        one, two = decide(f, max_workers=1), decide(f, max_workers=2)
        assert one.status == two.status
        assert quasimodel_to_dict(one.witness) == quasimodel_to_dict(two.witness)

    @settings(max_examples=60)
    @given(formulas(max_leaves=5))
    def test_elimination_rounds_shrink_the_moments(self, f):
        assume(len(closure(f)) <= 6)
        stats = decide(f).stats
        assert stats.rounds == len(stats.alive_by_round)
        assert stats.rounds <= stats.explored <= stats.moments
        assert all(before > after for before, after in zip(stats.alive_by_round, stats.alive_by_round[1:]))
        if stats.rounds:
            assert stats.alive_by_round[0] <= stats.explored
            assert stats.alive_by_round[-1] >= stats.surviving

    def test_eventuality_elimination_takes_a_round(self):
        stats = decide_text('F p => p').stats
        assert stats.rounds >= 1
        assert stats.alive_by_round[-1] == stats.surviving

    def test_shared_successor_cache(self):
        sigma = closure(parse('F p => X p'))
        shared = MomentSpace(sigma)
        ks = list(range(len(shared.moments))) * 2
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(shared.successors, ks))
        fresh = MomentSpace(sigma)
        assert results == [fresh.successors(k) for k in ks]
        half = len(ks) // 2
        assert all(results[i] is results[i + half] for i in range(half))

    def test_verdict_report(self):
        report = decide_text('p | !p').to_dict(include_witness=True)
        assert report['status'] == 'falsifiable'
        assert report['sigma_size'] == 4
        assert report['witness']['worlds']

    @pytest.mark.parametrize('schema', [s for s in schema_catalogue() if s.id not in SLOW_AXIOMS],
                             ids=lambda s: s.id)
    def test_axioms_are_valid(self, schema):
        assert decide(instantiate(schema)).valid

    @pytest.mark.parametrize('f', [t for t in derived_theorems() if len(closure(t)) <= FAST_CLOSURE],
                             ids=str)
    def test_derived_theorems_are_valid(self, f):
        assert decide(f).valid


@pytest.mark.slow
class TestLargerClosures:

    @pytest.mark.parametrize('schema_id', SLOW_AXIOMS)
    def test_slow_axioms(self, schema_id):
        assert decide(instantiate(get_schema(schema_id))).valid

    @pytest.mark.parametrize('f', [t for t in derived_theorems() if len(closure(t)) > FAST_CLOSURE],
                             ids=str)
    def test_slow_derived_theorems(self, f):
        assert decide(f).valid

    @settings(max_examples=150)
    @given(formulas(max_leaves=5), real_models(), birel_models())
    def test_valid_verdicts_hold_in_models(self, f, real, birel):
        assume(len(closure(f)) <= 7)
        if decide(f).valid:
            assert globally_true_real(real, f)
            assert globally_true_birel(birel, f)
