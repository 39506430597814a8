"""
Tests for the proof checker and the theorem corpus
"""
from pathlib import Path

import pytest

from calculus import (check_proof, derived_theorems, get_schema, instantiate, load_proof,
                      match_schema, mutate_line, mutations, proof_from_data, schema_catalogue,
                      theorem_corpus)
from decide import decide
from formula import And, Atom, BOT, Ev, Next, Or, TOP, iff, parse
from utils import ProofError

p, q = Atom('p'), Atom('q')

PROOF_FILES = sorted((Path(__file__).resolve().parent.parent / 'proofs').glob('*.json'))


def line(formula, **by):
    return {'formula': formula, 'by': by}


class TestSchemas:

    def test_linearity_match(self):
        assert match_schema(parse('(p => q) | (q => p)'), get_schema('III.a')) == {'a': p, 'b': q}

    def test_seriality_match_is_empty(self):
        assert match_schema(parse('!X bot'), get_schema('IV.a')) == {}

    def test_non_instance(self):
        assert match_schema(parse('p & q'), get_schema('III.a')) is None

    def test_repeated_metavariable_must_agree(self):
        assert match_schema(parse('p => (q => q)'), get_schema('I.a')) is None

    def test_catalogue_ids_are_unique(self):
        ids = [s.id for s in schema_catalogue()]
        assert len(ids) == len(set(ids))
        assert {'I.a', 'II.a', 'III.a', 'IV.a', 'IV.i', 'V'} <= set(ids)

    def test_unknown_schema(self):
        with pytest.raises(ProofError):
            get_schema('VII')

    def test_instantiate_needs_enough_atoms(self):
        with pytest.raises(ValueError):
            instantiate(get_schema('I.b'), atom_names=('p',))

    def test_mutations(self):
        assert list(mutations(And(p, q))) == [Or(p, q)]
        assert list(mutations(Next(BOT))) == [Ev(BOT), Next(TOP)]
        assert list(mutations(p)) == []


class TestProofs:

    def test_single_axiom(self):
        proof = proof_from_data([line('(p => q) | (q => p)', axiom='III.a')])
        assert check_proof(proof) is None

    def test_modus_ponens_needs_the_antecedent(self):
        proof = proof_from_data([
            line('p => (q => p)', axiom='I.a'),
            line('q => p', mp=[1, 1]),
        ])
        issue = check_proof(proof)
        assert issue.line == 2
        assert issue.condition == 'mp'

    def test_disjunctive_rule(self):
        proof = proof_from_data([
            line('p => p | q', axiom='I.f'),
            line('(p <= p) => q', dimpDis=1),
        ])
        assert check_proof(proof) is None

    def test_monotone_rule(self):
        proof = proof_from_data([
            line('p & q => p', axiom='I.d'),
            line('(p & q <= r) => (p <= r)', dimpMon=1),
        ])
        assert check_proof(proof) is None

    def test_necessitation_cites_earlier_lines(self):
        proof = proof_from_data([
            line('top', axiom='I.j'),
            line('G top', necG=2),
        ])
        issue = check_proof(proof)
        assert (issue.line, issue.condition) == (2, 'reference')

    def test_necessitation_shape(self):
        proof = proof_from_data([
            line('top', axiom='I.j'),
            line('F top', necX=1),
        ])
        assert check_proof(proof).condition == 'necX'

    @pytest.mark.parametrize('lines,condition', [
        ([line('p', axiom='IX')], 'unknown-axiom'),
        ([line('p => p | q', axiom='I.f', subst={'a': 'q'})], 'substitution'),
        ([line('p => p', axiom='I.a')], 'axiom'),
        ([line('p => p | q', axiom='I.f'), line('(p <= q) => q', dimpDis=1)], 'dimpDis'),
    ])
    def test_rejections(self, lines, condition):
        assert check_proof(proof_from_data(lines)).condition == condition

    def test_goal_must_be_the_last_line(self):
        proof = proof_from_data({'goal': 'q => q',
                                 'lines': [line('(p => q) | (q => p)', axiom='III.a')]})
        assert check_proof(proof).condition == 'goal'

    @pytest.mark.parametrize('data', [
        [],
        [{'formula': 'p'}],
        [line('p', axiom='I.a', mp=[1, 2])],
        [line('p', mp=[1])],
        [line('p', necX=True)],
        [line('p (', axiom='I.a')],
        {'lines': 'p'},
    ])
    def test_malformed_proofs(self, data):
        with pytest.raises(ProofError):
            proof_from_data(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProofError):
            load_proof(tmp_path / 'absent.json')


class TestShippedProofs:

    def test_corpus_is_present(self):
        assert len(PROOF_FILES) >= 10

    @pytest.mark.parametrize('path', PROOF_FILES, ids=lambda path: path.stem)
    def test_proof_checks(self, path):
        assert check_proof(load_proof(path)) is None

    @pytest.mark.parametrize('path', PROOF_FILES, ids=lambda path: path.stem)
    def test_every_mutation_is_rejected(self, path):
        proof = load_proof(path)
        for k, proof_line in enumerate(proof.lines, start=1):
            for f in mutations(proof_line.formula):
                assert check_proof(mutate_line(proof, k, f)) is not None, f"line {k}: {f}"

    @pytest.mark.parametrize('path', PROOF_FILES, ids=lambda path: path.stem)
    def test_proved_formulas_are_valid(self, path):
        proof = load_proof(path)
        assert decide(proof.lines[-1].formula).valid

    def test_to_dict_reloads(self):
        for path in PROOF_FILES:
            proof = load_proof(path)
            assert proof_from_data(proof.to_dict()) == proof


class TestCorpus:

    def test_contents(self):
        corpus = theorem_corpus()
        assert iff(Next(Or(p, q)), Or(Next(p), Next(q))) in corpus
        assert parse('!X bot') in corpus
        assert parse('G (p => X p) => (p => G p)') in corpus
        assert parse('(p <= p) => q') in corpus

    def test_derived_families(self):
        theorems = derived_theorems()
        assert len(theorems) == 10
        assert theorems[0] == iff(Next(BOT), BOT)
        assert theorems[3] == iff(Next(TOP), TOP)
