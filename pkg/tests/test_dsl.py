from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plkcrn.dsl import (
    EXAMPLES,
    CRNSemanticError,
    CRNSyntaxError,
    NetworkDocument,
    ReactionStatement,
    Term,
    example_text,
    format_document,
    load_example,
    parse,
    to_model,
)

F = Fraction


def test_single_reaction():
    doc = parse("A -> B ; k=1 ; F=[1,0]")
    net, kin = to_model(doc)
    assert net.species == ("A", "B") and net.r == 1
    assert kin.F == ((1, 0),) and kin.k == (1.0,)


def test_jose_file_matches_network():
    net, kin = load_example("jose")
    assert net.complexes == ((2, 2, 2), (0, 3, 3), (4, 1, 1), (6, 0, 0))
    assert net.reactions == ((0, 1), (1, 0), (1, 2), (2, 3), (3, 0))
    assert kin.F[1] == kin.F[2] == (-1, -1, 1)


def test_reversible_and_mass_action_expansion():
    doc = parse("kinetics = mass_action\n2 A <-> 3/2 B ; k=[1, 2.5] ; label=R\n")
    net, kin = to_model(doc)
    assert net.reactions == ((0, 1), (1, 0))
    assert kin.F == ((2, 0), (0, F(3, 2)))
    assert kin.k == (1.0, 2.5)
    assert net.labels == ("R_f", "R_r")


def test_params_empty_complex_and_comments():
    text = "# inflow\nparam a = 3/4\n0 -> X ; k=a ; F=[0] # zero order\nX -> 0 ; k=1 ; F=[1]\n"
    doc = parse(text)
    assert doc.comments == ["inflow", "zero order"]
    net, kin = to_model(doc)
    assert kin.k == (0.75, 1.0) and net.complexes == ((0,), (1,))
    assert to_model(doc, {"a": 2})[1].k == (2.0, 1.0)
    with pytest.raises(KeyError):
        to_model(doc, {"b": 1})


def test_species_declaration_fixes_order():
    doc = parse("species B, A\nA -> B ; k=1 ; F=[0, 1]\n")
    net, kin = to_model(doc)
    assert net.species == ("B", "A") and kin.F == ((0, 1),)


@pytest.mark.parametrize(
    "text, col, expected",
    [
        ("A -> B ; k=1 F=[1,0]", 14, ("end of line",)),
        ("A -> ; k=1", 6, ("number", "name")),
        ("A B ; k=1", 3, ("arrow", "rev")),
        ("A -> B ; q=1", 10, ("k", "F", "label")),
        ("A => B", 4, None),
    ],
)
def test_syntax_errors_carry_span_and_expected(text, col, expected):
    with pytest.raises(CRNSyntaxError) as exc:
        parse(text)
    (diag,) = exc.value.diagnostics
    assert diag.kind == "syntax" and diag.span.line == 1 and diag.span.col == col
    if expected is not None:
        assert diag.expected == expected
    else:
        assert diag.expected


def test_errors_reported_per_line():
    with pytest.raises(CRNSyntaxError) as exc:
        parse("A -> B ; k=1 ; F=[1,0]\nA ->\nB -> ; k=1\n")
    assert [d.span.line for d in exc.value.diagnostics] == [2, 3]


@pytest.mark.parametrize(
    "text, message",
    [
        ("A <-> B ; k=1 ; F=[[1,0],[0,1]]", "expected 2 rate constant"),
        ("A -> B ; k=1", "missing kinetic-order row"),
        ("kinetics = mass_action\nA -> B ; k=1 ; F=[1,0]", "under mass_action"),
        ("A -> B ; k=c ; F=[1,0]", "undefined parameter"),
        ("species A\nA -> B ; k=1 ; F=[1]", "undeclared species"),
        ("A + B -> B + A ; k=1 ; F=[1,1]", "self-loop"),
    ],
)
def test_semantic_errors(text, message):
    with pytest.raises(CRNSemanticError) as exc:
        parse(text)
    assert any(message in d.message for d in exc.value.diagnostics)


@pytest.mark.parametrize("name", EXAMPLES)
def test_bundled_examples_round_trip(name):
    doc = parse(example_text(name))
    assert parse(format_document(doc)) == doc


names = st.sampled_from(["A", "B", "C", "X1"])
coefs = st.one_of(
    st.fractions(min_value=0, max_value=5, max_denominator=4).filter(lambda f: f > 0),
    st.floats(0.25, 4.0).map(lambda x: round(x, 3)),
)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@st.composite
def documents(draw):
    species = ("A", "B", "C", "X1")
    mass = draw(st.booleans())
    reactions = []
    for _ in range(draw(st.integers(1, 4))):
        lhs = tuple(Term(draw(coefs), s) for s in draw(st.lists(names, max_size=2, unique=True)))
        rhs = tuple(Term(draw(coefs), s) for s in draw(st.lists(names, min_size=1, max_size=2, unique=True)))
        rev = draw(st.booleans())
        n = 2 if rev else 1
        k = tuple(draw(st.one_of(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10), st.just("p"))) for _ in range(n))
        Fm = None if mass else tuple(tuple(draw(rationals) for _ in species) for _ in range(n))
        label = draw(st.one_of(st.none(), st.sampled_from(["R1", "fast", "r_2"])))
        reactions.append(ReactionStatement(lhs, rhs, rev, k, Fm, label))
    return NetworkDocument(
        reactions=reactions,
        species=species,
        name=draw(st.one_of(st.none(), st.just("net"))),
        kinetics="mass_action" if mass else "power_law",
        params={"p": F(3, 2)},
    )


@given(documents())
@settings(max_examples=150, deadline=None)
def test_print_parse_round_trip(doc):
    text = format_document(doc)
    try:
        parsed = parse(text)
    except CRNSemanticError as e:
        # self-loops can be generated; everything else must be valid
        assert all("self-loop" in d.message for d in e.diagnostics)
        return
    assert parsed == doc
