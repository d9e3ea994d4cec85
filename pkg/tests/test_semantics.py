"""Zone exploration, blocking detection, and concrete replay."""

from fractions import Fraction

import pytest

from peralab.core import Atom, Edge, ModelError, Pera
from peralab.encoder import build, derive_schedule, encode_core
from peralab.language import enumerate_language
from peralab.minsky import loop
from peralab.semantics import (
    Analyzer,
    ExplorationConfig,
    ResourceExhausted,
    SimulationError,
    concrete_simulate,
    guard_holds,
    guard_zone,
    zone_graph,
)
from peralab import zones as Z


def one_loc(edges, invariant=(), actions=(("a", "x"),)):
    return Pera(
        actions=actions,
        parameters=(),
        locations=("only",),
        initial="only",
        edges=edges,
        invariants={"only": invariant} if invariant else {},
    )


@pytest.fixture(scope="module")
def loop2():
    return build(loop(), "wrapped").valuate({"p": 2})


# -- analyzer basics --------------------------------------------------------


def test_analyzer_rejects_parametric_automaton():
    with pytest.raises(ModelError):
        Analyzer(build(loop(), "wrapped"))


def test_analyzer_rejects_small_max_const(loop2):
    with pytest.raises(ModelError):
        Analyzer(loop2, ExplorationConfig(max_const=1))


def test_initial_must_contain_origin():
    a = one_loc((), invariant=(Atom("x", ">=", 1),))
    with pytest.raises(ModelError):
        Analyzer(a).initial()


def test_guard_zone_of_unsatisfiable_guard():
    guard = (Atom("x", "<", 0),)
    assert guard_zone(guard, ("x",)) is None
    assert guard_zone((), ("x",)) is not None


def test_successor_hand_case():
    a = one_loc((Edge("only", (Atom("x", ">=", 2),), "a", "only"),))
    ana = Analyzer(a)
    loc, zone = ana.successor(ana.initial(), a.edges[0])
    assert loc == "only"
    # delay to x >= 2, then reset: exactly the origin again, delay-closed later
    assert zone.key() == Z.origin(("x",)).key()
    nxt = ana.successors((loc, zone))
    assert len(nxt) == 1


def test_successor_requires_matching_source(loop2):
    ana = Analyzer(loop2)
    foreign = [e for e in loop2.edges if e.source != loop2.initial][0]
    with pytest.raises(ModelError):
        ana.successor(ana.initial(), foreign)


# -- blocking ---------------------------------------------------------------


def test_unguarded_loop_never_blocks():
    ana = Analyzer(one_loc((Edge("only", (), "a", "only"),)))
    assert ana.blocking_subset(ana.initial()).is_empty()
    assert not ana.is_blocking(ana.initial())


def test_unreachable_guard_blocks_everything():
    a = one_loc(
        (Edge("only", (Atom("x", "=", 2),), "a", "only"),),
        invariant=(Atom("x", "<=", 1),),
    )
    ana = Analyzer(a)
    init = ana.initial()
    fed = ana.blocking_subset(init)
    assert not fed.is_empty()
    assert fed.satisfies_point((Fraction(0),))
    assert ana.is_blocking(init)


def test_edgeless_location_blocks():
    ana = Analyzer(one_loc(()))
    assert ana.is_blocking(ana.initial())


def test_wrapped_encoding_blocks_only_mid_simulation(loop2):
    g = zone_graph(loop2)
    blocked = {g.nodes[i][0] for i, b in enumerate(g.blocking) if b}
    assert blocked == {"lbar_s0"}


# -- zone graph --------------------------------------------------------------


def test_zero_period_graph_stays_in_wrapper():
    a = build(loop(), "wrapped").valuate({"p": 0})
    g = zone_graph(a)
    assert {loc for loc, _ in g.nodes} == {"l_start", "l_acc1", "l_acc2"}
    assert not any(g.blocking)
    assert g.nodes[g.initial][0] == "l_start"


def test_zone_graph_reaches_fixpoint(loop2):
    g = zone_graph(loop2)
    assert len(g.nodes) == 48
    assert sum(g.blocking) == 1
    ids = {g.node_index[s] for s in g.nodes}
    assert ids == set(range(len(g.nodes)))
    for src, _, dst in g.edges:
        assert 0 <= src < len(g.nodes) and 0 <= dst < len(g.nodes)


def test_zone_graph_depth_zero(loop2):
    g = zone_graph(loop2, depth=0)
    assert len(g.nodes) == 1 and g.edges == []


def test_zone_graph_node_limit(loop2):
    with pytest.raises(ResourceExhausted):
        zone_graph(loop2, ExplorationConfig(node_limit=3))


def test_zone_graph_text(loop2):
    txt = zone_graph(loop2, depth=1).to_text()
    lines = txt.splitlines()
    assert lines[0].startswith("node 0 l_start [live] ")
    assert any(line.startswith("edge 0 ") for line in lines)
    assert txt.endswith("\n")


# -- concrete replay -----------------------------------------------------------


def test_empty_script_runs(loop2):
    run = concrete_simulate(loop2, ())
    assert run.steps == () and run.final_location == "l_start"
    assert run.untimed_word == () and run.timed_word == ()


def test_replay_rejects_parametric():
    with pytest.raises(ModelError):
        concrete_simulate(build(loop(), "wrapped"), ())


def test_replay_words_and_valuations():
    a = one_loc(
        (Edge("only", (), "a", "only"), Edge("only", (), "b", "only")),
        actions=(("a", "x"), ("b", "y")),
    )
    run = concrete_simulate(a, ((Fraction(1, 2), "a", "only"), (1, "b", "only")))
    assert run.untimed_word == ("a", "b")
    assert run.timed_word == (("a", Fraction(1, 2)), ("b", Fraction(3, 2)))
    assert run.steps[0].valuation == (Fraction(0), Fraction(1, 2))
    assert run.steps[1].valuation == (Fraction(1), Fraction(0))


def test_replay_negative_delay(loop2):
    with pytest.raises(SimulationError) as err:
        concrete_simulate(loop2, ((-1, "a_t", "l_start"),))
    assert err.value.index == 0 and "negative delay" in str(err.value)


def test_replay_initial_invariant_violation():
    a = one_loc((), invariant=(Atom("x", ">=", 1),))
    with pytest.raises(SimulationError) as err:
        concrete_simulate(a, ())
    assert "initial state" in str(err.value)


def test_replay_delay_leaves_invariant():
    a = one_loc((Edge("only", (), "a", "only"),), invariant=(Atom("x", "<=", 1),))
    with pytest.raises(SimulationError) as err:
        concrete_simulate(a, ((0, "a", "only"), (2, "a", "only")))
    assert err.value.index == 1
    assert "leaves the invariant" in str(err.value)
    assert str(err.value).startswith("step 1:")


def test_replay_unsatisfied_guard():
    a = one_loc((Edge("only", (Atom("x", "=", 2),), "a", "only"),))
    with pytest.raises(SimulationError) as err:
        concrete_simulate(a, ((1, "a", "only"),))
    assert "no fireable a edge only -> only" in str(err.value)


def test_replay_ambiguous_edges():
    a = one_loc(
        (
            Edge("only", (Atom("x", "<=", 5),), "a", "only"),
            Edge("only", (Atom("x", "<=", 7),), "a", "only"),
        )
    )
    with pytest.raises(SimulationError) as err:
        concrete_simulate(a, ((1, "a", "only"),))
    assert "ambiguous edge choice" in str(err.value)


def test_replay_target_invariant_violation():
    a = Pera(
        actions=(("a", "x"), ("b", "y")),
        parameters=(),
        locations=("u", "v"),
        initial="u",
        edges=(Edge("u", (), "a", "v"),),
        invariants={"v": (Atom("y", "<=", 0),)},
    )
    with pytest.raises(SimulationError) as err:
        concrete_simulate(a, ((1, "a", "v"),))
    assert "target invariant of v" in str(err.value)


# -- agreement between symbolic and concrete views ------------------------------


def half_grid_words(a, limit):
    """Every word of length <= limit realizable with half-integer delays."""
    grid = [Fraction(j, 2) for j in range(2 * a.max_constant() + 2)]
    clock_of = dict(a.actions)
    seen = set()

    def rec(loc, val, word):
        seen.add(word)
        if len(word) == limit:
            return
        for d in grid:
            after = {c: v + d for c, v in val.items()}
            if not guard_holds(a.invariant(loc), after):
                continue
            for e in a.edges:
                if e.source != loc or not guard_holds(e.guard, after):
                    continue
                nval = dict(after)
                nval[clock_of[e.action]] = Fraction(0)
                if not guard_holds(a.invariant(e.target), nval):
                    continue
                rec(e.target, nval, word + (e.action,))

    rec(a.initial, {c: Fraction(0) for c in a.clocks}, ())
    return seen


def test_symbolic_prefixes_match_concrete_search(loop2):
    """Soundness and completeness spot check at depth three.

    The symbolic walk must enumerate exactly the words witnessed by a
    brute-force search over concrete runs (half-integer delays suffice
    at this constant scale).
    """
    symbolic = enumerate_language(loop2, ExplorationConfig(depth=3), "maximal").prefix_words
    concrete = half_grid_words(loop2, 3)
    assert symbolic == concrete


def test_schedule_word_is_enumerated():
    m = loop()
    period = 2
    sch = derive_schedule(m, period)
    a = encode_core(m).valuate({"p": period})
    run = concrete_simulate(a, sch.script)
    sample = enumerate_language(
        a, ExplorationConfig(depth=len(sch.script), extrapolate=False), "maximal"
    )
    assert run.untimed_word in sample.prefix_words


def test_extrapolation_preserves_words(loop2):
    """Widening must not change the language up to the probe depth."""
    raw = enumerate_language(loop2, ExplorationConfig(depth=8, extrapolate=False), "maximal")
    wide = enumerate_language(loop2, ExplorationConfig(depth=8), "maximal")
    assert raw.prefix_words == wide.prefix_words
    assert raw.maximal_finite_words == wide.maximal_finite_words


def test_widen_is_extrapolation(loop2):
    ana = Analyzer(loop2)
    init = ana.initial()
    widened = ana.widen(init)
    assert widened[0] == init[0]
    assert widened[1].key() == Z.extrapolate(init[1], ana.max_const).key()
