from itertools import product

import pytest


from artiplan.domain import GroundAction, Plan
from artiplan.macros import (
    NOOP,
    MacroSchema,
    SortMismatch,
    UnsoundComposition,
    check_soundness,
    compose,
    compose_all,
    expand,
    expand_action,
    macro_schema,
    maes_action_set,
    rename,
)
from artiplan.schemas import (
    CHANGE_ANGLE,
    MOVE_LINK_TO_CENTRAL,
    RELEASE_LINKS,
    SAES_SCHEMAS,
    TAKE_LINKS_TO_MOVE,
    OperatorSchema,
    lit,
    lits,
)
from oracles import (
    CENTRE_TAKE_RULE_BODY,
    ROTATE_RELEASE_RULE_BODY,
    GRASP_ROTATE_RELEASE_RULE_BODY,
    EXAMPLE_MACRO_ADD,
    EXAMPLE_MACRO_DEL,
    EXAMPLE_MACRO_PRE,
    ROTATE_RELEASE_ADD,
    ROTATE_RELEASE_DEL,
)


def test_centre_and_take_matches_worked_example():
    m = compose(MOVE_LINK_TO_CENTRAL, TAKE_LINKS_TO_MOVE)
    assert m.pre == EXAMPLE_MACRO_PRE
    assert m.delete == EXAMPLE_MACRO_DEL
    assert m.add == EXAMPLE_MACRO_ADD
    assert m.constituents == (
        ("move_link_to_central", ("L1", "J1", "G2")),
        ("take_links_to_move", ("L1", "L2", "J1", "G1", "G2")),
    )


def test_macro_set_against_rule_bodies():
    m1, m2, m3 = maes_action_set()
    assert m1.pre == CENTRE_TAKE_RULE_BODY
    # the composed rotate-and-release keeps the time guard of its constituents
    assert m2.pre - ROTATE_RELEASE_RULE_BODY == lits("time(T)")
    assert ROTATE_RELEASE_RULE_BODY <= m2.pre
    # grasp-rotate-release also inherits the take's loose-link requirement
    assert m3.pre - GRASP_ROTATE_RELEASE_RULE_BODY == lits("not in_hand(L1,T)", "not in_hand(L2,T)")
    assert GRASP_ROTATE_RELEASE_RULE_BODY <= m3.pre
    for m in (m2, m3):
        assert m.add == ROTATE_RELEASE_ADD
        assert m.delete == ROTATE_RELEASE_DEL
    assert [m.name for m in (m1, m2, m3)] == [
        "linkToCentral_take",
        "changeAngle_release",
        "grasp_changeAngle_release",
    ]
    assert [m.variables for m in (m1, m2, m3)] == [
        ("L1", "L2", "J1", "G1", "G2"),
        ("L1", "L2", "J1", "G1", "G2", "A1", "A2"),
        ("L1", "L2", "J1", "A1", "A2", "G1", "G2"),
    ]


def test_macros_are_sound():
    assert all(isinstance(m, MacroSchema) for m in maes_action_set())
    assert check_soundness(MOVE_LINK_TO_CENTRAL, TAKE_LINKS_TO_MOVE).sound
    assert check_soundness(CHANGE_ANGLE, RELEASE_LINKS).sound


def test_release_then_rotate_is_unsound():
    verdict = check_soundness(RELEASE_LINKS, CHANGE_ANGLE)
    assert not verdict.sound and not verdict
    assert str(verdict.witness) == "grasped(G1,L1,T)"
    assert {str(w) for w in verdict.witnesses} == {
        "grasped(G1,L1,T)",
        "grasped(G2,L2,T)",
        "in_hand(L1,T)",
        "in_hand(L2,T)",
    }
    with pytest.raises(UnsoundComposition) as err:
        compose(RELEASE_LINKS, CHANGE_ANGLE, strict=True)
    assert len(err.value.witnesses) == 4
    # non-strict composition still produces the (unsound) macro
    assert compose(RELEASE_LINKS, CHANGE_ANGLE).name == "release_links_changeAngle"


def test_composition_formula_on_toy_operators():
    a = OperatorSchema("a", (("X", "link"),), lits("in_hand(X,T)"), lits("free(X,T)"), lits("in_hand(X,T)"))
    b = OperatorSchema(
        "b", (("X", "link"),), lits("free(X,T)", "not in_hand(X,T)", "link(X)"), lits("in_hand(X,T)"), lits("free(X,T)")
    )
    m = compose(a, b)
    assert m.pre == lits("in_hand(X,T)", "link(X)")
    assert m.delete == lits("free(X,T)")
    assert m.add == lits("in_hand(X,T)")


def test_noop_is_a_two_sided_identity():
    for s in SAES_SCHEMAS:
        for m in (compose(s, NOOP), compose(NOOP, s)):
            assert (m.pre, m.add, m.delete) == (s.pre, s.add, s.delete)
            assert m.constituents == ((s.name, s.variables),)


def test_single_schema_fold_is_identity():
    m = compose_all([CHANGE_ANGLE], name="c")
    assert (m.pre, m.add, m.delete) == (CHANGE_ANGLE.pre, CHANGE_ANGLE.add, CHANGE_ANGLE.delete)
    with pytest.raises(ValueError):
        compose_all([])


def _consistent_pair(first, second):
    """Neither deletes a positive nor adds a negated precondition of ``second``."""
    added = first.add - first.delete
    negated = {p.positive for p in second.pre if p.negated}
    return check_soundness(first, second).sound and not (added & negated)


@pytest.mark.parametrize(
    "a,b,c",
    [
        t
        for t in product(SAES_SCHEMAS, repeat=3)
        if _consistent_pair(t[0], t[1]) and _consistent_pair(t[1], t[2])
    ],
    ids=lambda s: s.name,
)
def test_composition_is_associative(a, b, c):
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert (left.pre, left.add, left.delete) == (right.pre, right.add, right.delete)
    assert left.constituents == right.constituents


def test_renaming_and_sort_checks():
    swapped = rename(TAKE_LINKS_TO_MOVE, {"L1": "L2", "L2": "L1"})
    assert lit("in_hand(L2,T)") in swapped.add
    with pytest.raises(ValueError):
        rename(TAKE_LINKS_TO_MOVE, {"L1": "L2"})
    with pytest.raises(ValueError):
        rename(TAKE_LINKS_TO_MOVE, {"T": "U"})
    with pytest.raises(SortMismatch):
        compose(MOVE_LINK_TO_CENTRAL, TAKE_LINKS_TO_MOVE, second_map={"J1": "G1", "G1": "J1"})
    with pytest.raises(ValueError):
        compose(MOVE_LINK_TO_CENTRAL, TAKE_LINKS_TO_MOVE, params=("L1",))


def test_schema_validation():
    with pytest.raises(ValueError):
        OperatorSchema("x", (("X", "link"),), lits("in_hand(Y,T)"), frozenset(), frozenset())
    with pytest.raises(ValueError):
        OperatorSchema("x", (("X", "colour"),), frozenset(), frozenset(), frozenset())
    with pytest.raises(ValueError):
        OperatorSchema("x", (("X", "link"),), frozenset(), lits("free(X,T)"), lits("free(X,T)"))
    with pytest.raises(ValueError):
        lit("bogus(X)")


def test_expand_single_macros():
    assert expand_action(GroundAction("linkToCentral_take", (5, 4, 4, 1, 2))) == [
        GroundAction("move_link_to_central", (5, 4, 2)),
        GroundAction("take_links_to_move", (5, 4, 4, 1, 2)),
    ]
    assert expand_action(GroundAction("changeAngle_release", (5, 4, 4, 1, 2, 300, 0))) == [
        GroundAction("changeAngle", (5, 4, 4, 300, 0, 1, 2)),
        GroundAction("release_links", (5, 4, 4, 1, 2)),
    ]
    assert [a.name for a in expand_action(GroundAction("grasp_changeAngle_release", (4, 3, 3, 0, 60, 1, 2)))] == [
        "take_links_to_move",
        "changeAngle",
        "release_links",
    ]
    with pytest.raises(ValueError):
        expand_action(GroundAction("linkToCentral_take", (1, 2)))
    with pytest.raises(KeyError):
        macro_schema("nope")


def test_expand_plan_keeps_elementary_actions(maes_plan):
    full = expand(maes_plan)
    assert len(full) == 10
    assert [a.timestep for a in full] == list(range(10))
    mixed = Plan.of([GroundAction("move_link_to_central", (1, 1, 1)), *maes_plan])
    assert expand(mixed)[0].name == "move_link_to_central"
