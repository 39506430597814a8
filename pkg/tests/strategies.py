"""
Hypothesis strategies for formulas, models and relations between moments
"""
from functools import lru_cache
from typing import FrozenSet, List, Sequence, Tuple

from hypothesis import strategies as st

from birel_semantics import BiRelModel
from decide import Moment, enumerate_moments, transitions
from formula import BINARY, BOT, TOP, UNARY, Atom, ClosureSet, closure, parse
from labelled import LabelledSystem
from real_semantics import ONE, ZERO, Flow, RealModel

ATOMS = ('p', 'q')

# Closure sets small enough for exhaustive checks over pairs of moments
SMALL_SIGMAS = [closure(parse(text)) for text in ('X p', 'F p', 'G p', 'X p | G p')]


def formulas(atom_names: Sequence[str] = ATOMS, max_leaves: int = 8, temporal: bool = True):
    leaves = st.sampled_from([Atom(a) for a in atom_names] + [BOT, TOP])

    def extend(children):
        options = [st.builds(kind, children, children) for kind in BINARY]
        if temporal:
            options.extend(st.builds(kind, children) for kind in UNARY)
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def flows(draw, max_moments: int = 4) -> Flow:
    n = draw(st.integers(min_value=1, max_value=max_moments))
    moments = tuple(f"t{i}" for i in range(n))
    succ = {t: draw(st.sampled_from(moments)) for t in moments}
    return Flow(moments, succ)


@st.composite
def real_models(draw, atom_names: Sequence[str] = ATOMS, max_moments: int = 5,
                max_denominator: int = 6, boolean: bool = False) -> RealModel:
    flow = draw(flows(max_moments))
    values = (st.sampled_from([ZERO, ONE]) if boolean else
              st.fractions(min_value=0, max_value=1, max_denominator=max_denominator))
    val = {a: {t: draw(values) for t in flow.moments} for a in atom_names}
    return RealModel(flow, val)


@st.composite
def birel_models(draw, atom_names: Sequence[str] = ATOMS, max_worlds: int = 4,
                 max_moments: int = 4) -> BiRelModel:
    flow = draw(flows(max_moments))
    k = draw(st.integers(min_value=1, max_value=max_worlds))
    worlds = tuple(f"w{i}" for i in range(k))
    val = {}
    for a in atom_names:
        points = set()
        for t in flow.moments:
            # valuations are downward closed, so each moment holds a prefix of the worlds
            cut = draw(st.integers(min_value=0, max_value=k))
            points.update((w, t) for w in worlds[:cut])
        val[a] = frozenset(points)
    return BiRelModel(worlds, flow, val)


@lru_cache(maxsize=None)
def connected_moment_pairs(sigma: ClosureSet, max_worlds: int = 6) -> List[Tuple[Moment, Moment]]:
    moments = enumerate_moments(sigma)
    return [(c, d) for c in moments for d in moments
            if len(c) + len(d) <= max_worlds and transitions(c, d)]


@st.composite
def transition_unions(draw, sigmas: Sequence[ClosureSet] = tuple(SMALL_SIGMAS)):
    """Two moments and a union of transitions between them: sensible and fully confluent"""
    sigma = draw(st.sampled_from(list(sigmas)))
    c, d = draw(st.sampled_from(connected_moment_pairs(sigma)))
    options = transitions(c, d)
    chosen = draw(st.lists(st.sampled_from(options), min_size=1, max_size=3))
    pairs: FrozenSet[Tuple[int, int]] = frozenset().union(*(t.pairs for t in chosen))
    return c, d, pairs


def two_chain_system(c: Moment, d: Moment, pairs) -> LabelledSystem:
    """Labelled system with c's chain as worlds a0.., d's chain as b0.. and R given by index pairs"""
    a = [f"a{i}" for i in range(len(c))]
    b = [f"b{j}" for j in range(len(d))]
    order = [(a[i - 1], a[i]) for i in range(1, len(a))] + [(b[j - 1], b[j]) for j in range(1, len(b))]
    labels = {**{a[i]: c[i] for i in range(len(c))}, **{b[j]: d[j] for j in range(len(d))}}
    rel = [(a[i], b[j]) for i, j in pairs]
    return LabelledSystem.build(a + b, order, labels, rel, c.sigma)
