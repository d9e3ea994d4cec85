"""Depth-bounded untimed-language enumeration and comparison.

Words are enumerated by a breadth-first walk over determinized sets of
symbolic states, so each word is visited once no matter how many runs
spell it.  Four semantics share the walk: all finite run words
(safety), those whose run can end blocked (maximal), those ending in an
accepting location (reach), and stem/cycle lassos through accepting
locations (buchi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import ModelError, Pera
from .semantics import Analyzer, ExplorationConfig, ResourceExhausted, Sym, zone_graph

SEMANTICS = ("maximal", "buchi", "reach", "safety")

Word = tuple[str, ...]
Lasso = tuple[Word, Word]


@dataclass(frozen=True)
class LanguageSample:
    """Everything observable about one automaton's language at depth k."""

    semantics: str
    depth: int
    prefix_words: frozenset[Word]
    maximal_finite_words: frozenset[Word] = frozenset()
    accepted_words: frozenset[Word] = frozenset()
    lassos: frozenset[Lasso] = frozenset()

    def words_text(self, which: str = "prefix") -> str:
        table = {
            "prefix": self.prefix_words,
            "maximal_finite": self.maximal_finite_words,
            "accepted": self.accepted_words,
        }
        if which not in table:
            raise ModelError(f"unknown word set {which!r}")
        lines = [" ".join(w) for w in sorted(table[which], key=lambda w: (len(w), w))]
        return "\n".join(lines) + "\n"

    def lassos_text(self) -> str:
        def key(l: Lasso):
            return (len(l[0]) + len(l[1]), l[0], l[1])

        lines = [" ".join(s) + " | " + " ".join(c) for s, c in sorted(self.lassos, key=key)]
        return "\n".join(lines) + "\n"


def _min_rotation(word: Word) -> Word:
    if not word:
        return word
    return min(tuple(word[i:] + word[:i]) for i in range(len(word)))


def _word_walk(ana: Analyzer, k: int, node_limit: int, widen: bool):
    """Yield (word, state set) for every word of length <= k, determinized.

    State sets are frozensets of symbolic states; the per-set action
    transition table is memoized, so a state set shared by many words
    is expanded once.
    """
    start: frozenset[Sym] = frozenset({ana.widen(ana.initial()) if widen else ana.initial()})
    trans: dict[frozenset[Sym], dict[str, frozenset[Sym]]] = {}
    seen_sets = 1
    alphabet = ana.automaton.alphabet
    frontier: list[tuple[Word, frozenset[Sym]]] = [((), start)]
    yield (), start
    for _ in range(k):
        nxt: list[tuple[Word, frozenset[Sym]]] = []
        for word, states in frontier:
            table = trans.get(states)
            if table is None:
                table = {}
                for act in alphabet:
                    succ = set()
                    for sym in states:
                        for e in ana.edges_from[sym[0]]:
                            if e.action != act:
                                continue
                            nxt_sym = ana.successor(sym, e)
                            if nxt_sym is not None:
                                succ.add(ana.widen(nxt_sym) if widen else nxt_sym)
                    if succ:
                        table[act] = frozenset(succ)
                trans[states] = table
                seen_sets += len(table)
                if seen_sets > node_limit:
                    raise ResourceExhausted(
                        f"language walk exceeded {node_limit} determinized states"
                    )
            for act, succ in table.items():
                w2 = word + (act,)
                nxt.append((w2, succ))
                yield w2, succ
        frontier = nxt


def _lassos(a: Pera, cfg: ExplorationConfig) -> frozenset[Lasso]:
    """Stem/cycle pairs through accepting locations, on the widened graph.

    Cycles are elementary (no repeated node except the endpoints),
    found once each by only walking nodes with ids at or above the
    start node's; stems are the shortest, lexicographically smallest
    words reaching the cycle's start within the depth bound.  The cycle
    word is reported in its minimal rotation.
    """
    g = zone_graph(a, cfg)
    k = cfg.depth
    accepting = a.accepting
    out: set[Lasso] = set()

    # adjacency with actions
    adj: dict[int, list[tuple[str, int]]] = {i: [] for i in range(len(g.nodes))}
    for src, act, dst in g.edges:
        adj[src].append((act, dst))

    # shortest-lex stem per node, bounded by k
    stems: dict[int, Word] = {g.initial: ()}
    frontier = [g.initial]
    for _ in range(k):
        nxt = []
        for nid in sorted(frontier, key=lambda n: stems[n]):
            for act, dst in sorted(adj[nid]):
                if dst not in stems:
                    stems[dst] = stems[nid] + (act,)
                    nxt.append(dst)
        frontier = nxt
    # breadth order makes stems shortest; stem-sorted expansion makes ties lex-min

    is_acc = [loc in accepting for loc, _ in g.nodes]

    def cycles_from(c0: int) -> Iterable[Word]:
        # elementary cycles with minimal node id c0, length <= k
        stack: list[tuple[int, Word, frozenset[int], bool]] = [
            (c0, (), frozenset({c0}), is_acc[c0])
        ]
        while stack:
            nid, word, visited, hit = stack.pop()
            for act, dst in adj[nid]:
                if dst == c0:
                    if hit and len(word) + 1 <= k:
                        yield word + (act,)
                    continue
                if dst < c0 or dst in visited or len(word) + 1 >= k:
                    continue
                stack.append((dst, word + (act,), visited | {dst}, hit or is_acc[dst]))

    for c0, stem in stems.items():
        for cyc in cycles_from(c0):
            out.add((stem, _min_rotation(cyc)))
    return frozenset(out)


def enumerate_language(a: Pera, cfg: ExplorationConfig, semantics: str) -> LanguageSample:
    """Observe one automaton's untimed language at cfg.depth.

    See the module docstring for what each semantics records.  Büchi
    always works on the widened zone graph; the other three honor
    cfg.extrapolate.
    """
    if semantics not in SEMANTICS:
        raise ModelError(f"unknown semantics {semantics!r}; pick one of {SEMANTICS}")
    if a.parameters:
        raise ModelError("automaton still has parameters; valuate it first")
    if semantics in ("buchi", "reach") and not a.accepting:
        raise ModelError(f"{semantics} semantics needs a declared accepting set")

    if semantics == "buchi":
        return LanguageSample(semantics, cfg.depth, frozenset(), lassos=_lassos(a, cfg))

    ana = Analyzer(a, cfg)
    prefix: set[Word] = set()
    flagged: set[Word] = set()
    for word, states in _word_walk(ana, cfg.depth, cfg.node_limit, cfg.extrapolate):
        prefix.add(word)
        if semantics == "maximal":
            if any(ana.is_blocking(s) for s in states):
                flagged.add(word)
        elif semantics == "reach":
            if any(loc in a.accepting for loc, _ in states):
                flagged.add(word)
    if semantics == "maximal":
        return LanguageSample(semantics, cfg.depth, frozenset(prefix), frozenset(flagged))
    if semantics == "reach":
        return LanguageSample(
            semantics, cfg.depth, frozenset(prefix), accepted_words=frozenset(flagged)
        )
    return LanguageSample(
        semantics, cfg.depth, frozenset(prefix), accepted_words=frozenset(prefix)
    )


@dataclass(frozen=True)
class CompareResult:
    equal: bool
    field: str | None = None       # which set the witness came from
    witness: object | None = None  # a word, or a (stem, cycle) pair
    owner: str | None = None       # "left" or "right"

    def text(self) -> str:
        if self.equal:
            return "equal up to bound"
        if self.field == "lassos":
            stem, cyc = self.witness
            shown = " ".join(stem) + " | " + " ".join(cyc)
        else:
            shown = " ".join(self.witness) if self.witness else "(empty word)"
        return f"differs: {self.field} witness [{shown}] only on the {self.owner} side"


def _word_diff(left: frozenset[Word], right: frozenset[Word]):
    delta = left.symmetric_difference(right)
    if not delta:
        return None
    w = min(delta, key=lambda w: (len(w), w))
    return w, ("left" if w in left else "right")


def compare(s1: LanguageSample, s2: LanguageSample) -> CompareResult:
    """Bounded-language comparison; a difference names its shortest witness."""
    if s1.semantics != s2.semantics:
        raise ModelError("samples use different semantics")
    if s1.depth != s2.depth:
        raise ModelError("samples use different depth bounds")
    if s1.semantics == "buchi":
        delta = s1.lassos.symmetric_difference(s2.lassos)
        if not delta:
            return CompareResult(True)
        l = min(delta, key=lambda l: (len(l[0]) + len(l[1]), l[0], l[1]))
        return CompareResult(False, "lassos", l, "left" if l in s1.lassos else "right")
    fields = (
        ("prefix", s1.prefix_words, s2.prefix_words),
        ("maximal_finite", s1.maximal_finite_words, s2.maximal_finite_words),
        ("accepted", s1.accepted_words, s2.accepted_words),
    )
    best = None
    for name, left, right in fields:
        hit = _word_diff(left, right)
        if hit is None:
            continue
        w, owner = hit
        if best is None or (len(w), w) < (len(best[1]), best[1]):
            best = (name, w, owner)
    if best is None:
        return CompareResult(True)
    return CompareResult(False, best[0], best[1], best[2])
