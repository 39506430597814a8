"""
Formula syntax for Gödel temporal logic: AST, parser, printer and closure sets
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

from utils import FormulaSyntaxError

logger = logging.getLogger(__name__)


class Formula:
    """Base class of all formula nodes. Nodes are immutable and hash in O(1)."""

    def __post_init__(self) -> None:
        data = tuple(self.__dict__.values())
        object.__setattr__(self, '_hash', hash((type(self).__name__,) + data))
        object.__setattr__(self, '_size', 1 + sum(
            v._size for v in data if isinstance(v, Formula)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return print_formula(self)

    @property
    def children(self) -> Tuple['Formula', ...]:
        return tuple(v for v in self.__dict__.values() if isinstance(v, Formula))

    @property
    def size(self) -> int:
        return self._size


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Meta(Formula):
    """Schema metavariable; never produced by the object-language parser"""
    name: str
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Bot(Formula):
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Top(Formula):
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Coimp(Formula):
    left: Formula
    right: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Ev(Formula):
    operand: Formula
    __hash__ = Formula.__hash__


@dataclass(frozen=True)
class Hence(Formula):
    operand: Formula
    __hash__ = Formula.__hash__


BINARY = (And, Or, Imp, Coimp)
UNARY = (Next, Ev, Hence)
TEMPORAL = UNARY

BOT = Bot()
TOP = Top()

_RANK = {Bot: 0, Top: 1, Atom: 2, Meta: 3, Next: 4, Ev: 5, Hence: 6,
         And: 7, Or: 8, Imp: 9, Coimp: 10}


# Derived forms. The parser expands the same sugar, so these never create new node kinds.

def neg(f: Formula) -> Formula:
    return Imp(f, BOT)


def coneg(f: Formula) -> Formula:
    return Coimp(TOP, f)


def iff(f: Formula, g: Formula) -> Formula:
    return And(Imp(f, g), Imp(g, f))


def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is top"""
    result: Optional[Formula] = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TOP if result is None else result


def disj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is bot"""
    result: Optional[Formula] = None
    for f in formulas:
        result = f if result is None else Or(result, f)
    return BOT if result is None else result


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences of f, f first (depth-first, left to right)"""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children))


def atoms(f: Formula) -> List[str]:
    """Atom names of f in sorted order"""
    return sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})


def depth(f: Formula) -> int:
    children = f.children
    return 1 + max((depth(c) for c in children), default=0)


@lru_cache(maxsize=None)
def sort_key(f: Formula) -> tuple:
    """Canonical structural order: smaller formulas first, so subformulas precede superformulas"""
    if isinstance(f, (Atom, Meta)):
        return (f.size, _RANK[type(f)], f.name)
    return (f.size, _RANK[type(f)]) + tuple(sort_key(c) for c in f.children)


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r'''
    (?P<ws>\s+)
  | (?P<iff><=>)
  | (?P<imp>=>)
  | (?P<coimp><=)
  | (?P<and>&)
  | (?P<or>\|)
  | (?P<not>!)
  | (?P<conot>~)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<meta>\$[A-Za-z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<modal>[XFG])
''', re.VERBOSE)

_TOP_LEVEL = {'imp': '=>', 'coimp': '<=', 'iff': '<=>'}


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def _location(text: str, pos: int) -> Tuple[int, int]:
    line = text.count('\n', 0, pos) + 1
    column = pos - text.rfind('\n', 0, pos)
    return line, column


def tokenize(text: str) -> List[Token]:
    """Split concrete syntax into tokens; the list ends with an 'eof' token"""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            line, column = _location(text, pos)
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        if kind != 'ws':
            line, column = _location(text, pos)
            tokens.append(Token(kind, match.group(), line, column))
        pos = match.end()
    line, column = _location(text, pos)
    tokens.append(Token('eof', '', line, column))
    return tokens


class _Parser:
    """Recursive descent over the four precedence levels"""

    def __init__(self, text: str, allow_meta: bool):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_meta = allow_meta

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> FormulaSyntaxError:
        token = token or self.peek()
        return FormulaSyntaxError(message, token.line, token.column)

    def expect(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            found = 'end of input' if token.kind == 'eof' else repr(token.text)
            raise self.error(f"expected {what}, found {found}")
        return self.advance()

    def parse(self) -> Formula:
        f = self.parse_loosest()
        token = self.peek()
        if token.kind != 'eof':
            raise self.error(f"unexpected {token.text!r}")
        return f

    def parse_loosest(self) -> Formula:
        first = self.parse_or()
        kind = self.peek().kind
        if kind not in _TOP_LEVEL:
            return first

        operands = [first]
        while self.peek().kind == kind:
            operator = self.advance()
            operands.append(self.parse_or())
            if kind == 'iff' and len(operands) > 2:
                raise self.error("chained '<=>' requires parentheses", operator)

        other = self.peek()
        if other.kind in _TOP_LEVEL:
            raise self.error(
                f"mixing '{_TOP_LEVEL[kind]}' and '{_TOP_LEVEL[other.kind]}' requires parentheses",
                other)

        if kind == 'imp':
            result = operands[-1]
            for f in reversed(operands[:-1]):
                result = Imp(f, result)
            return result
        if kind == 'coimp':
            result = operands[0]
            for f in operands[1:]:
                result = Coimp(result, f)
            return result
        return iff(operands[0], operands[1])

    def parse_or(self) -> Formula:
        result = self.parse_and()
        while self.peek().kind == 'or':
            self.advance()
            result = Or(result, self.parse_and())
        return result

    def parse_and(self) -> Formula:
        result = self.parse_unary()
        while self.peek().kind == 'and':
            self.advance()
            result = And(result, self.parse_unary())
        return result

    def parse_unary(self) -> Formula:
        token = self.peek()
        if token.kind == 'modal':
            self.advance()
            operand = self.parse_unary()
            return {'X': Next, 'F': Ev, 'G': Hence}[token.text](operand)
        if token.kind == 'not':
            self.advance()
            return neg(self.parse_unary())
        if token.kind == 'conot':
            self.advance()
            return coneg(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.peek()
        if token.kind == 'ident':
            self.advance()
            if token.text == 'bot':
                return BOT
            if token.text == 'top':
                return TOP
            return Atom(token.text)
        if token.kind == 'meta':
            if not self.allow_meta:
                raise self.error(f"metavariable {token.text} outside a schema")
            self.advance()
            return Meta(token.text[1:])
        if token.kind == 'lpar':
            self.advance()
            inner = self.parse_loosest()
            self.expect('rpar', "')'")
            return inner
        found = 'end of input' if token.kind == 'eof' else repr(token.text)
        raise self.error(f"expected a formula, found {found}")


def parse(text: str) -> Formula:
    """
    Parse concrete syntax into a formula

    The sugar '!', '~' and '<=>' is expanded; 'bot' and 'top' stay primitive.

    Raises:
        FormulaSyntaxError: With the 1-based line and column of the offending token
    """
    return _Parser(text, allow_meta=False).parse()


def parse_schema(text: str) -> Formula:
    """Parse a pattern in which '$name' denotes a metavariable"""
    return _Parser(text, allow_meta=True).parse()


_LEVEL_LOOSEST, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY = 1, 2, 3, 4

_UNARY_SYMBOL = {Next: 'X', Ev: 'F', Hence: 'G'}


def _level(f: Formula) -> int:
    if isinstance(f, (Imp, Coimp)):
        return _LEVEL_LOOSEST
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    return _LEVEL_UNARY


def _wrap(f: Formula, parenthesize: bool) -> str:
    text = print_formula(f)
    return f"({text})" if parenthesize else text


def print_formula(f: Formula) -> str:
    """Canonical concrete syntax with minimal parentheses; parse() inverts it"""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Meta):
        return f"${f.name}"
    if isinstance(f, Bot):
        return 'bot'
    if isinstance(f, Top):
        return 'top'
    if isinstance(f, UNARY):
        return f"{_UNARY_SYMBOL[type(f)]} {_wrap(f.operand, _level(f.operand) < _LEVEL_UNARY)}"
    if isinstance(f, And):
        return (f"{_wrap(f.left, _level(f.left) < _LEVEL_AND)} & "
                f"{_wrap(f.right, _level(f.right) <= _LEVEL_AND)}")
    if isinstance(f, Or):
        return (f"{_wrap(f.left, _level(f.left) < _LEVEL_OR)} | "
                f"{_wrap(f.right, _level(f.right) <= _LEVEL_OR)}")
    if isinstance(f, Imp):
        # right-associative
        return (f"{_wrap(f.left, _level(f.left) == _LEVEL_LOOSEST)} => "
                f"{_wrap(f.right, isinstance(f.right, Coimp))}")
    if isinstance(f, Coimp):
        # left-associative
        return (f"{_wrap(f.left, isinstance(f.left, Imp))} <= "
                f"{_wrap(f.right, _level(f.right) == _LEVEL_LOOSEST)}")
    raise ValueError(f"Unsupported formula node: {f!r}")


# ---------------------------------------------------------------------------
# Closure sets
# ---------------------------------------------------------------------------

class ClosureSet:
    """
    A finite subformula-closed set of formulas in canonical order

    Subformulas always precede their superformulas, so a single left-to-right
    pass can compute anything defined by structural recursion.
    """

    def __init__(self, formulas: Iterable[Formula]):
        ordered = sorted(set(formulas), key=sort_key)
        self.formulas: Tuple[Formula, ...] = tuple(ordered)
        self._index: Dict[Formula, int] = {f: i for i, f in enumerate(self.formulas)}
        for f in self.formulas:
            for child in f.children:
                if child not in self._index:
                    raise ValueError(f"{child} missing from closure of {f}")
        self._hash = hash(self.formulas)

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    def __contains__(self, f: object) -> bool:
        return f in self._index

    def __getitem__(self, i: int) -> Formula:
        return self.formulas[i]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, ClosureSet):
            return NotImplemented
        return self.formulas == other.formulas

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ClosureSet({[str(f) for f in self.formulas]})"

    def index(self, f: Formula) -> int:
        return self._index[f]

    def quasi_atoms(self) -> Tuple[Formula, ...]:
        """Members whose truth is not fixed by their children within one moment"""
        return tuple(f for f in self.formulas if isinstance(f, (Atom,) + TEMPORAL))

    def of_kind(self, *kinds: type) -> Tuple[Formula, ...]:
        return tuple(f for f in self.formulas if isinstance(f, kinds))

    def to_strings(self) -> List[str]:
        return [print_formula(f) for f in self.formulas]


def closure(target: Union[Formula, Iterable[Formula]]) -> ClosureSet:
    """Smallest subformula-closed set containing a formula or a collection of formulas"""
    roots = [target] if isinstance(target, Formula) else list(target)
    found = set()
    for root in roots:
        for g in subformulas(root):
            found.add(g)
    return ClosureSet(found)
