"""
Hilbert-style proof checking for the GTL calculus
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from formula import (And, Atom, BINARY, Bot, Coimp, Ev, Formula, Hence, Imp, Meta, Next, Or, Top,
                     UNARY, conj, disj, iff, parse, parse_schema, subformulas)
from utils import FormulaSyntaxError, ModelFormatError, ProofError, Violation, load_json_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Schema:
    id: str
    pattern: Formula
    name: str = ''

    @property
    def metavariables(self) -> List[str]:
        return sorted({g.name for g in subformulas(self.pattern) if isinstance(g, Meta)})


# Group I is a fixed Hilbert basis for intuitionistic propositional logic;
# other intuitionistic tautologies must be derived from it.
_CATALOGUE: List[Tuple[str, str, str]] = [
    ('I.a', '$a => ($b => $a)', 'K'),
    ('I.b', '($a => ($b => $c)) => (($a => $b) => ($a => $c))', 'S'),
    ('I.c', '$a => ($b => $a & $b)', 'conjunction introduction'),
    ('I.d', '$a & $b => $a', 'conjunction elimination (left)'),
    ('I.e', '$a & $b => $b', 'conjunction elimination (right)'),
    ('I.f', '$a => $a | $b', 'disjunction introduction (left)'),
    ('I.g', '$b => $a | $b', 'disjunction introduction (right)'),
    ('I.h', '($a => $c) => (($b => $c) => ($a | $b => $c))', 'disjunction elimination'),
    ('I.i', 'bot => $a', 'ex falso'),
    ('I.j', 'top', 'verum'),
    ('II.a', '$a => $b | ($a <= $b)', 'co-implication'),
    ('III.a', '($a => $b) | ($b => $a)', 'linearity'),
    ('III.b', '!(($a <= $b) & ($b <= $a))', 'co-linearity'),
    ('IV.a', '!X bot', 'seriality'),
    ('IV.b', 'X ($a | $b) => X $a | X $b', 'next distributes over disjunction'),
    ('IV.c', 'X $a & X $b => X ($a & $b)', 'next distributes over conjunction'),
    ('IV.d', 'X ($a => $b) <=> (X $a => X $b)', 'next distributes over implication'),
    ('IV.e', 'G ($a => $b) => (G $a => G $b)', 'K for henceforth'),
    ('IV.f', 'G ($a => $b) => (F $a => F $b)', 'dual K for eventually'),
    ('IV.g', 'G $a => $a & X G $a', 'henceforth unfolds'),
    ('IV.h', '$a | X F $a => F $a', 'eventually folds'),
    ('IV.i', 'G ($a => X $a) => ($a => G $a)', 'henceforth induction'),
    ('IV.j', 'G (X $a => $a) => (F $a => $a)', 'eventually induction'),
    ('V', 'X ($a <= $b) => (X $a <= X $b)', 'back-up confluence'),
]

_SCHEMAS: Dict[str, Schema] = {
    schema_id: Schema(schema_id, parse_schema(text), name) for schema_id, text, name in _CATALOGUE
}

RULES = ('axiom', 'mp', 'necX', 'necG', 'dimpMon', 'dimpDis')


def schema_catalogue() -> List[Schema]:
    return list(_SCHEMAS.values())


def get_schema(schema_id: str) -> Schema:
    try:
        return _SCHEMAS[schema_id]
    except KeyError:
        raise ProofError(f"Unknown axiom {schema_id!r}") from None


def match_schema(f: Formula, schema: Schema) -> Optional[Dict[str, Formula]]:
    """
    Substitution of metavariables that turns the schema's pattern into f

    Returns:
        The substitution, or None if f is not an instance
    """
    subst: Dict[str, Formula] = {}
    return subst if _match(schema.pattern, f, subst) else None


def _match(pattern: Formula, f: Formula, subst: Dict[str, Formula]) -> bool:
    if isinstance(pattern, Meta):
        bound = subst.get(pattern.name)
        if bound is None:
            subst[pattern.name] = f
            return True
        return bound == f
    if type(pattern) is not type(f):
        return False
    if isinstance(pattern, Atom):
        return pattern.name == f.name
    return all(_match(p, g, subst) for p, g in zip(pattern.children, f.children))


def substitute(pattern: Formula, subst: Mapping[str, Formula]) -> Formula:
    if isinstance(pattern, Meta):
        return subst[pattern.name]
    if isinstance(pattern, BINARY):
        return type(pattern)(substitute(pattern.left, subst), substitute(pattern.right, subst))
    if isinstance(pattern, UNARY):
        return type(pattern)(substitute(pattern.operand, subst))
    return pattern


def instantiate(schema: Schema, atom_names: Sequence[str] = ('p', 'q', 'r')) -> Formula:
    """Instance of the schema with its metavariables, in name order, replaced by atoms"""
    metas = schema.metavariables
    if len(metas) > len(atom_names):
        raise ValueError(f"{schema.id} needs {len(metas)} atoms")
    return substitute(schema.pattern, {m: Atom(a) for m, a in zip(metas, atom_names)})


# ---------------------------------------------------------------------------
# Proofs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    rule: str
    refs: Tuple[int, ...] = ()
    axiom: Optional[str] = None
    subst: Optional[Mapping[str, Formula]] = None

    def to_dict(self) -> Dict[str, Any]:
        if self.rule == 'axiom':
            data: Dict[str, Any] = {'axiom': self.axiom}
            if self.subst is not None:
                data['subst'] = {k: str(v) for k, v in self.subst.items()}
            return data
        if self.rule == 'mp':
            return {'mp': list(self.refs)}
        return {self.rule: self.refs[0]}


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    by: Justification


@dataclass
class Proof:
    lines: List[ProofLine]
    name: Optional[str] = None
    goal: Optional[Formula] = None

    def to_dict(self) -> Dict[str, Any]:
        lines = [{'formula': str(line.formula), 'by': line.by.to_dict()} for line in self.lines]
        if self.name is None and self.goal is None:
            return {'lines': lines}
        return {'name': self.name, 'goal': None if self.goal is None else str(self.goal),
                'lines': lines}


@dataclass(frozen=True)
class ProofIssue(Violation):
    """A proof check failure at a 1-based line"""
    line: int = 0

    def __str__(self) -> str:
        return f"error line {self.line}: {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['line'] = self.line
        return data


def _parse_justification(by: Any, k: int) -> Justification:
    if not isinstance(by, Mapping):
        raise ProofError(f"line {k}: justification must be an object")
    rules = [r for r in RULES if r in by]
    if len(rules) != 1:
        raise ProofError(f"line {k}: justification needs exactly one of {', '.join(RULES)}")
    rule = rules[0]
    value = by[rule]

    if rule == 'axiom':
        if not isinstance(value, str):
            raise ProofError(f"line {k}: axiom id must be a string")
        subst = None
        if 'subst' in by:
            try:
                subst = {str(m).lstrip('$'): parse(text) for m, text in dict(by['subst']).items()}
            except (FormulaSyntaxError, TypeError, ValueError) as e:
                raise ProofError(f"line {k}: bad substitution: {e}") from e
        return Justification('axiom', axiom=value, subst=subst)

    refs = value if rule == 'mp' else [value]
    arity = 2 if rule == 'mp' else 1
    if (not isinstance(refs, list) or len(refs) != arity
            or not all(isinstance(i, int) and not isinstance(i, bool) for i in refs)):
        raise ProofError(f"line {k}: {rule} needs {'two line numbers' if arity == 2 else 'a line number'}")
    return Justification(rule, refs=tuple(refs))


def proof_from_data(data: Any) -> Proof:
    """
    Build a proof from its JSON form: a list of lines, or {name, goal, lines}

    Raises:
        ProofError: On a malformed structure or unparseable formula
    """
    name = goal = None
    if isinstance(data, Mapping):
        name = data.get('name')
        if data.get('goal') is not None:
            try:
                goal = parse(data['goal'])
            except FormulaSyntaxError as e:
                raise ProofError(f"goal: {e}") from e
        raw_lines = data.get('lines')
    else:
        raw_lines = data
    if not isinstance(raw_lines, list) or not raw_lines:
        raise ProofError("A proof needs a nonempty list of lines")

    lines = []
    for k, raw in enumerate(raw_lines, start=1):
        if not isinstance(raw, Mapping) or 'formula' not in raw or 'by' not in raw:
            raise ProofError(f"line {k}: needs 'formula' and 'by'")
        try:
            formula = parse(raw['formula'])
        except FormulaSyntaxError as e:
            raise ProofError(f"line {k}: {e}") from e
        lines.append(ProofLine(formula, _parse_justification(raw['by'], k)))
    return Proof(lines, name, goal)


def load_proof(path: Union[str, Path]) -> Proof:
    try:
        return proof_from_data(load_json_file(path))
    except ModelFormatError as e:
        raise ProofError(str(e)) from e


def _issue(k: int, condition: str, message: str, f: Optional[Formula] = None) -> ProofIssue:
    return ProofIssue(condition, formula=f, message=message, line=k)


def _check_line(lines: Sequence[ProofLine], k: int) -> Optional[ProofIssue]:
    line = lines[k - 1]
    f, by = line.formula, line.by
    for ref in by.refs:
        if not 1 <= ref < k:
            return _issue(k, 'reference', f"{by.rule} cites line {ref}, which is not an earlier line", f)
    premises = [lines[ref - 1].formula for ref in by.refs]

    if by.rule == 'axiom':
        if by.axiom not in _SCHEMAS:
            return _issue(k, 'unknown-axiom', f"unknown axiom {by.axiom}", f)
        subst = match_schema(f, _SCHEMAS[by.axiom])
        if subst is None:
            return _issue(k, 'axiom', f"{f} is not an instance of {by.axiom}", f)
        if by.subst is not None and any(subst.get(m) != g for m, g in by.subst.items()):
            return _issue(k, 'substitution', f"given substitution does not produce {f} from {by.axiom}", f)
        return None

    if by.rule == 'mp':
        minor, major = premises
        if not isinstance(major, Imp):
            return _issue(k, 'mp', f"line {by.refs[1]} is not an implication", f)
        if major.left != minor:
            return _issue(k, 'mp', f"line {by.refs[0]} is not the antecedent of line {by.refs[1]}", f)
        if major.right != f:
            return _issue(k, 'mp', f"consequent of line {by.refs[1]} is {major.right}, not {f}", f)
        return None

    premise = premises[0]
    if by.rule == 'necX':
        expected: Optional[Formula] = Next(premise)
    elif by.rule == 'necG':
        expected = Hence(premise)
    elif by.rule == 'dimpMon':
        # from a => b infer (a <= c) => (b <= c), for any c
        if not isinstance(premise, Imp):
            return _issue(k, 'dimpMon', f"line {by.refs[0]} is not an implication", f)
        expected = None
        if isinstance(f, Imp) and isinstance(f.left, Coimp) and isinstance(f.right, Coimp):
            theta = f.left.right
            expected = Imp(Coimp(premise.left, theta), Coimp(premise.right, theta))
    else:
        # from a => b | c infer (a <= b) => c
        if not (isinstance(premise, Imp) and isinstance(premise.right, Or)):
            return _issue(k, 'dimpDis', f"line {by.refs[0]} is not of the form a => b | c", f)
        expected = Imp(Coimp(premise.left, premise.right.left), premise.right.right)

    if f != expected:
        return _issue(k, by.rule, f"{by.rule} of line {by.refs[0]} does not give {f}", f)
    return None


def check_proof(proof: Proof) -> Optional[ProofIssue]:
    """
    Check every line, then the goal if the proof names one

    Returns:
        None if the proof is correct, otherwise the first failing line
    """
    for k in range(1, len(proof.lines) + 1):
        issue = _check_line(proof.lines, k)
        if issue is not None:
            logger.debug(f"Proof {proof.name or ''} rejected: {issue}")
            return issue
    if proof.goal is not None and proof.lines[-1].formula != proof.goal:
        k = len(proof.lines)
        return _issue(k, 'goal', f"last line proves {proof.lines[-1].formula}, not the goal {proof.goal}",
                      proof.lines[-1].formula)
    return None


# ---------------------------------------------------------------------------
# Mutations and the theorem corpus
# ---------------------------------------------------------------------------

_SWAP = {And: Or, Or: And, Imp: Coimp, Coimp: Imp, Next: Ev, Ev: Hence, Hence: Next}


def mutations(f: Formula) -> Iterator[Formula]:
    """Every formula obtained by changing exactly one connective or constant of f"""
    if isinstance(f, Bot):
        yield Top()
    elif isinstance(f, Top):
        yield Bot()
    elif isinstance(f, BINARY):
        yield _SWAP[type(f)](f.left, f.right)
        for g in mutations(f.left):
            yield type(f)(g, f.right)
        for g in mutations(f.right):
            yield type(f)(f.left, g)
    elif isinstance(f, UNARY):
        yield _SWAP[type(f)](f.operand)
        for g in mutations(f.operand):
            yield type(f)(g)


def mutate_line(proof: Proof, k: int, f: Formula) -> Proof:
    lines = list(proof.lines)
    lines[k - 1] = ProofLine(f, lines[k - 1].by)
    return Proof(lines, proof.name, proof.goal)


def derived_theorems(phi: Formula = Atom('p'), psi: Formula = Atom('q')) -> List[Formula]:
    """Derived principles: next over finite disjunctions and conjunctions, fixpoint converses, co-implication laws"""
    theorems = []
    for gamma in ([], [phi], [phi, psi]):
        theorems.append(iff(Next(disj(gamma)), disj(Next(g) for g in gamma)))
    for gamma in ([], [phi], [phi, psi]):
        theorems.append(iff(Next(conj(gamma)), conj(Next(g) for g in gamma)))
    theorems.extend([
        Imp(Ev(phi), Or(phi, Next(Ev(phi)))),
        Imp(And(phi, Next(Hence(phi))), Hence(phi)),
        Imp(Coimp(phi, phi), psi),
        Imp(Coimp(phi, psi), phi),
    ])
    return theorems


def theorem_corpus() -> List[Formula]:
    """Every axiom instantiated with p, q, r, followed by the derived theorems"""
    return [instantiate(s) for s in schema_catalogue()] + derived_theorems()
