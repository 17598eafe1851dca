import pytest

from lace.engine import enumerate_solutions
from lace.globalize import (
    GlobalizeError,
    globalize_database,
    globalize_spec,
    lift_solution,
    linking_rules,
    object_positions,
    retype_schema,
)
from lace.model import Cell, DomainError, Kind, Partition, obj, tid, trivial_partitions, val
from lace.query import Var
from lace.rules import Specification
from lace.syntax import parse_workspace, render_workspace, Workspace

from conftest import cell, partition_with
from gen import random_instance


def test_fig1_object_positions_and_linking_rules(fig1):
    assert object_positions(fig1.schema) == [("Author", 1), ("Paper", 1), ("Paper", 4), ("Wrote", 1), ("Wrote", 2)]
    links = linking_rules(fig1.schema)
    assert len(links) == 25
    assert all(r.hard and not r.is_object for r in links)
    assert len({r.name for r in links}) == 25


def test_linking_rule_shape(fig1):
    rule = next(r for r in linking_rules(fig1.schema) if r.name == "link_Paper_4_Wrote_1")
    a, b = rule.body.atoms
    assert (a.relation, b.relation) == ("Paper", "Wrote")
    assert a.terms[0] == rule.x and b.terms[0] == rule.y
    assert a.terms[4] == b.terms[1] == Var("z")
    # z is the only variable the two atoms share
    shared = set(a.terms[1:]) & set(b.terms[1:])
    assert shared == {Var("z")}
    assert (rule.left_position, rule.right_position) == (4, 1)


def test_schema_is_retyped(fig1):
    s = retype_schema(fig1.schema)
    assert all(k is Kind.VAL for r in s.relations for k in r.types)
    assert s["Paper"].attributes == fig1.schema["Paper"].attributes


def test_hard_object_rule_is_anchored_at_first_occurrences(fig1):
    g = globalize_spec(fig1.schema, fig1.spec)
    rho = next(r for r in g.spec.rules if r.name == "rho_o1")
    assert not rho.is_object and rho.hard
    assert rho.body.free == (Var("t"), Var("t2"))
    assert (rho.left_position, rho.right_position) == (1, 1)
    sel = next(s for s in g.selections if s.rule == "rho_o1")
    assert (sel.x_atom, sel.x_position, sel.y_atom, sel.y_position) == (0, 1, 1, 1)


def test_globalized_spec_has_no_object_rules(fig1):
    g = globalize_spec(fig1.schema, fig1.spec)
    assert not g.spec.object_rules
    assert len(g.spec.rules) == len(fig1.spec.rules) + 25
    assert [r.name for r in g.spec.rules[:3]] == ["rho_o1", "sigma_o1", "rho_v1"]
    assert [r.hard for r in g.spec.rules[:3]] == [True, False, True]
    assert g.spec.constraints[0].name == "delta1"


def test_spec_without_object_rules_only_gains_links(fig1):
    spec = Specification(fig1.spec.value_rules, fig1.spec.constraints, fig1.sim)
    g = globalize_spec(fig1.schema, spec)
    assert g.spec.rules == tuple(r for r in g.spec.rules if r.name == "rho_v1") + g.linking_rules


def test_constant_tid_anchor_is_rejected(fig1):
    ws = parse_workspace(
        "relation R(obj, val)\n"
        't1: R(a, "x")\n'
        "hard obj: R(@t1, x, n), R(t2, y, n) => EqO(x, y)\n"
    )
    with pytest.raises(GlobalizeError) as info:
        globalize_spec(ws.schema, ws.spec)
    assert info.value.code == "E402"


def test_database_is_retyped(fig1):
    g = globalize_database(fig1.db)
    assert g.fact(tid("t14")).args == (val("a1"), val("p1"))
    assert not g.objects()
    assert len(g.cells()) == len(fig1.db.cells()) + sum(
        len(fig1.schema[f.relation].object_positions()) for f in fig1.db
    )


def test_lexeme_clash_is_rejected():
    ws = parse_workspace('relation R(obj, val)\nt1: R(a, "a")\n')
    with pytest.raises(DomainError):
        globalize_database(ws.db)


def _cells_by_object(db, e):
    """Cell classes induced by E alone: cells whose stored objects are E-equivalent."""
    groups = {}
    for f in db:
        for i in db.schema[f.relation].object_positions():
            groups.setdefault(e.find(f[i]), []).append(Cell(f.tid, i))
    return [tuple(sorted(g)) for g in groups.values() if len(g) > 1]


def test_lift_of_trivial_groups_cells_of_the_same_object(fig1):
    e, v = trivial_partitions(fig1.db)
    lifted = lift_solution(fig1.db, e, v)
    assert lifted.universe == frozenset(globalize_database(fig1.db).cells())
    assert lifted.nontrivial_classes() == sorted(_cells_by_object(fig1.db, e))
    # a1 is stored as an author id, a writer and the chair of p3 and p4
    assert lifted.class_of(cell("t1", 1)) == {cell("t1", 1), cell("t14", 1), cell("t11", 4), cell("t12", 4)}
    # value cells stay singletons
    assert lifted.class_of(cell("t1", 2)) == {cell("t1", 2)}


def test_lift_merges_every_cell_holding_the_objects(fig1):
    e = partition_with(fig1.db.objects(), [obj("a1"), obj("a2")])
    lifted = lift_solution(fig1.db, e, Partition(fig1.db.cells()))
    expected = {cell("t1", 1), cell("t2", 1), cell("t14", 1), cell("t15", 1), cell("t11", 4), cell("t12", 4)}
    assert lifted.class_of(cell("t1", 1)) == expected


def test_lift_keeps_cell_classes(fig1):
    e = Partition(fig1.db.objects())
    v = partition_with(fig1.db.cells(), [cell("t1", 2), cell("t2", 2)])
    lifted = lift_solution(fig1.db, e, v)
    assert lifted.class_of(cell("t1", 2)) == {cell("t1", 2), cell("t2", 2)}
    assert len(lifted.nontrivial_classes()) == len(_cells_by_object(fig1.db, e)) + 1


def _bijection_holds(db, spec):
    g = globalize_spec(db.schema, spec)
    gdb = globalize_database(db)
    lifted = sorted(lift_solution(db, s.e, s.v, gdb).key() for s in enumerate_solutions(db, spec))
    local = enumerate_solutions(gdb, g.spec)
    assert all(s.e.is_trivial() for s in local)
    return lifted == sorted(s.v.key() for s in local)


def test_fig1_bijection(fig1):
    assert _bijection_holds(fig1.db, fig1.spec)


@pytest.mark.parametrize("seed", range(30))
def test_generated_bijection(seed):
    inst = random_instance(seed)
    assert _bijection_holds(inst.db, inst.spec)


def test_globalized_workspace_renders_and_parses(fig1):
    g = globalize_spec(fig1.schema, fig1.spec)
    ws = Workspace(g.schema, globalize_database(fig1.db), g.spec)
    again = parse_workspace(render_workspace(ws))
    assert again.spec == g.spec and again.db == ws.db
