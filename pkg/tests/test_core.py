"""Model layer: atoms, guards, automaton structure, serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from peralab.core import (
    Atom,
    Edge,
    ModelError,
    Pera,
    UnsatisfiableAtom,
    guard_text,
    integerize,
    parse_atom,
    parse_guard,
    parse_valuation,
)

CLOCKS = ("t", "x1", "x2", "z")


def tiny_automaton(**overrides):
    fields = dict(
        actions=(("a", "x"), ("b", "y")),
        parameters=("p",),
        locations=("l0", "l1"),
        initial="l0",
        edges=(
            Edge("l0", (Atom("x", "=", 1),), "a", "l1"),
            Edge("l1", (Atom("y", "<", 0, "p"),), "b", "l0"),
        ),
        invariants={"l0": (Atom("x", "<=", 0, "p"),)},
    )
    fields.update(overrides)
    return Pera(**fields)


# -- atoms ----------------------------------------------------------------


def test_atom_text_and_parse_round_trip():
    cases = [
        Atom("x", "<=", 3),
        Atom("x", "<", 0),
        Atom("t", "=", 0, "p"),
        Atom("z", ">=", -1, "p"),
        Atom("x1", ">", 2, "p"),
    ]
    for atom in cases:
        assert parse_atom(atom.text(), ("p",)) == atom


def test_parse_atom_rejects_junk():
    for bad in ("x", "x ! 3", "<= 3", "x <= p+q", "x <= -2"):
        with pytest.raises(ModelError):
            parse_atom(bad, ("p",))


def test_parse_guard_true_is_empty():
    assert parse_guard("true", ()) == ()
    assert guard_text(()) == "true"


def test_guard_text_joins_atoms():
    g = (Atom("x", "=", 0), Atom("x", "<", 0, "p"))
    assert guard_text(g) == "x = 0 && x < p"
    assert parse_guard(guard_text(g), ("p",)) == g


def test_split_eq():
    eq = Atom("x", "=", 2, "p")
    lo, hi = eq.split_eq()
    assert {lo.rel, hi.rel} == {"<=", ">="}
    assert all(a.offset == 2 and a.param == "p" for a in (lo, hi))
    assert Atom("x", "<", 1).split_eq() == (Atom("x", "<", 1),)


def test_atom_valuate_constant_and_offset():
    assert Atom("x", "<=", 1, "p").valuate({"p": 3}) == Atom("x", "<=", 4)
    assert Atom("x", "=", -1, "p").valuate({"p": 3}) == Atom("x", "=", 2)
    assert Atom("x", "<", 0).valuate({"p": 3}) == Atom("x", "<", 0)


def test_atom_valuate_negative_bound():
    with pytest.raises(UnsatisfiableAtom):
        Atom("x", "=", -1, "p").valuate({"p": 0})
    # trivially true atoms collapse to the nonnegativity stand-in
    assert Atom("x", ">=", -2, "p").valuate({"p": 1}) == Atom("x", ">=", 0)


def test_atom_valuate_strict_zero_stays():
    # x < 0 is unsatisfiable for clocks but stays representable, which
    # keeps locations with such invariants legal (just uninhabitable)
    assert Atom("x", "<", 0, "p").valuate({"p": 0}) == Atom("x", "<", 0)


@given(
    clock=st.sampled_from(CLOCKS),
    rel=st.sampled_from(("<", "<=", "=", ">=", ">")),
    offset=st.integers(min_value=-6, max_value=6),
    param=st.sampled_from((None, "p", "q")),
)
def test_atom_text_parse_property(clock, rel, offset, param):
    if param is None and offset < 0:
        return
    atom = Atom(clock, rel, offset, param)
    assert parse_atom(atom.text(), ("p", "q")) == atom


# -- automaton structure ---------------------------------------------------


def test_pera_accessors():
    a = tiny_automaton()
    assert a.alphabet == ("a", "b")
    assert a.clocks == ("x", "y")
    assert a.clock_of("b") == "y"
    with pytest.raises(ModelError):
        a.clock_of("zz")
    assert a.invariant("l1") == ()


def test_validate_rejects_bad_structure():
    with pytest.raises(ModelError):
        tiny_automaton(initial="nowhere")
    with pytest.raises(ModelError):
        tiny_automaton(locations=("l0", "l0", "l1"))
    with pytest.raises(ModelError):
        tiny_automaton(actions=(("a", "x"), ("b", "x")))
    with pytest.raises(ModelError):
        tiny_automaton(edges=(Edge("l0", (), "zz", "l1"),))
    with pytest.raises(ModelError):
        tiny_automaton(edges=(Edge("l0", (), "a", "nowhere"),))
    with pytest.raises(ModelError):
        tiny_automaton(invariants={"ghost": (Atom("x", "<=", 1),)})
    with pytest.raises(ModelError):
        tiny_automaton(edges=(Edge("l0", (Atom("w", "<=", 1),), "a", "l1"),))


def test_valuate_drops_unsatisfiable_edges():
    a = tiny_automaton(
        edges=(
            Edge("l0", (Atom("x", "=", -1, "p"),), "a", "l1"),
            Edge("l1", (), "b", "l0"),
        )
    )
    v = a.valuate({"p": 0})
    assert len(v.edges) == 1
    assert v.parameters == ()
    assert v.invariant("l0") == (Atom("x", "<=", 0),)


def test_valuate_requires_all_parameters():
    with pytest.raises(ModelError):
        tiny_automaton().valuate({})


def test_rescale_multiplies_offsets():
    a = tiny_automaton()
    b = a.rescale(3)
    assert b.edges[0].guard[0].offset == 3
    assert b.invariant("l0")[0].offset == 0
    assert b.max_constant() == max(3, a.max_constant() * 3)


def test_max_constant_covers_guards_and_invariants():
    a = tiny_automaton(
        edges=(Edge("l0", (Atom("x", "<=", 4),), "a", "l1"),),
        invariants={"l1": (Atom("y", "<", 7),)},
    )
    assert a.max_constant() == 7


def test_serialization_round_trip():
    a = tiny_automaton(accepting=frozenset({"l1"}))
    b = Pera.from_text(a.to_text())
    assert a == b


def test_from_text_rejects_garbage():
    with pytest.raises(ModelError):
        Pera.from_text("not json")
    with pytest.raises(ModelError):
        Pera.from_text("{}")


# -- valuations -------------------------------------------------------------


def test_parse_valuation():
    vals = parse_valuation(["p=2", "q=1/3"])
    assert vals == {"p": Fraction(2), "q": Fraction(1, 3)}
    with pytest.raises(ModelError):
        parse_valuation(["p"])
    with pytest.raises(ModelError):
        parse_valuation(["p=one"])


def test_integerize():
    ints, scale = integerize({"p": Fraction(1, 2)})
    assert (ints, scale) == ({"p": 1}, 2)
    ints, scale = integerize({"p": Fraction(2, 3), "q": Fraction(1, 2)})
    assert scale == 6 and ints == {"p": 4, "q": 3}
    ints, scale = integerize({"p": Fraction(5)})
    assert scale == 1 and ints == {"p": 5}


@given(
    num=st.integers(min_value=0, max_value=40),
    den=st.integers(min_value=1, max_value=12),
)
@settings(deadline=None)
def test_integerize_rescale_consistency(num, den):
    """Scaled integer value over the scaled automaton equals the rational."""
    value = Fraction(num, den)
    ints, scale = integerize({"p": value})
    assert ints["p"] == value * scale
    assert Fraction(ints["p"], scale) == value
