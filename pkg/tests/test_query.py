import random

import pytest

from lace.engine import SolutionState, enumerate_solutions, trivial_state
from lace.model import Database, Partition, eqrel_close, induce_extended_db, obj, tid, trivial_partitions, val
from lace.query import QueryError, check_dc, check_rule_sat, eval_answers, eval_boolean, validate_query
from lace.syntax import parse_query

from conftest import cell, partition_with
from gen import random_instance, random_query
from naive import naive_answers, naive_boolean, raw_answers


def named(spec, name):
    return next(x for x in (*spec.rules, *spec.constraints) if x.name == name)


@pytest.fixture(scope="module")
def states(fig1):
    db = fig1.db
    e12 = partition_with(db.objects(), [obj("a1"), obj("a2")])
    v12 = partition_with(db.cells(), [cell("t1", 2), cell("t2", 2)])
    return {
        "trivial": trivial_partitions(db),
        "a1a2": (e12, Partition(db.cells())),
        "a1a2+names": (e12, v12),
    }


def xdb_of(fig1, states, key):
    return induce_extended_db(fig1.db, *states[key])


def test_delta1_body_false_on_trivial(fig1, states):
    body = named(fig1.spec, "delta1").body
    assert not eval_boolean(body, xdb_of(fig1, states, "trivial"), fig1.sim)


def test_delta1_body_true_after_merging_a1_a2(fig1, states):
    body = named(fig1.spec, "delta1").body
    assert eval_boolean(body, xdb_of(fig1, states, "a1a2"), fig1.sim)


def test_value_join_intersects_sets(fig1, states):
    # t2's name set becomes {J. Smith, Joe Smith}; t3's is {J. Smith}
    q = parse_query('query(): Author(@t2, a, n, i), Author(@t3, b, n, j)', fig1.schema)
    assert eval_boolean(q, xdb_of(fig1, states, "a1a2+names"), fig1.sim)
    assert not eval_boolean(q, xdb_of(fig1, states, "a1a2"), fig1.sim)
    q2 = parse_query('query(n): Author(@t2, a, n, i), Author(@t3, b, n, j)', fig1.schema)
    assert eval_answers(q2, xdb_of(fig1, states, "a1a2+names"), fig1.sim) == {(val("J. Smith"),)}


def test_hard_object_rule_answers_only_reflexive_on_trivial(fig1, states):
    body = named(fig1.spec, "rho_o1").body
    answers = eval_answers(body, xdb_of(fig1, states, "trivial"), fig1.sim)
    assert answers == {(obj(f"a{k}"), obj(f"a{k}")) for k in range(1, 9)}


def test_value_rule_applies_after_merge(fig1, states):
    body = named(fig1.spec, "rho_v1").body
    answers = eval_answers(body, xdb_of(fig1, states, "a1a2"), fig1.sim)
    assert {(tid("t1"), tid("t2")), (tid("t2"), tid("t1"))} <= answers


def test_empty_database_has_no_answers(fig1):
    db = Database(fig1.schema)
    xdb = induce_extended_db(db, *trivial_partitions(db))
    assert eval_answers(named(fig1.spec, "rho_o1").body, xdb, fig1.sim) == set()
    for r in fig1.spec.rules:
        assert check_rule_sat(r, xdb, *trivial_partitions(db), fig1.sim)


def test_check_dc_examples(fig1, states):
    d1, d2 = named(fig1.spec, "delta1"), named(fig1.spec, "delta2")
    assert check_dc(d2, xdb_of(fig1, states, "trivial"), fig1.sim)
    assert not check_dc(d1, xdb_of(fig1, states, "a1a2"), fig1.sim)
    assert check_dc(d1, xdb_of(fig1, states, "a1a2+names"), fig1.sim)


def test_check_rule_sat_examples(fig1, states):
    rho_o1, rho_v1 = named(fig1.spec, "rho_o1"), named(fig1.spec, "rho_v1")
    e, v = states["trivial"]
    assert check_rule_sat(rho_o1, xdb_of(fig1, states, "trivial"), e, v, fig1.sim)
    e, v = states["a1a2"]
    assert not check_rule_sat(rho_v1, xdb_of(fig1, states, "a1a2"), e, v, fig1.sim)


def test_constant_outside_domain_never_matches(fig1, states):
    q = parse_query("query(): Wrote(t, @nobody, p)", fig1.schema)
    assert not eval_boolean(q, xdb_of(fig1, states, "trivial"), fig1.sim)


def test_tid_constant_selects_its_fact(fig1, states):
    q = parse_query("query(x): Author(@t2, x, n, i)", fig1.schema)
    assert eval_answers(q, xdb_of(fig1, states, "a1a2"), fig1.sim) == {(obj("a1"),), (obj("a2"),)}


def test_inequality_is_set_disjointness(fig1, states):
    # a1 and a2 share the aid set after merging, so x != y fails for t1, t2
    q = parse_query("query(): Author(@t1, x, n, i), Author(@t2, y, m, j), x != y", fig1.schema)
    assert eval_boolean(q, xdb_of(fig1, states, "trivial"), fig1.sim)
    assert not eval_boolean(q, xdb_of(fig1, states, "a1a2"), fig1.sim)


def test_similarity_needs_some_similar_pair(fig1, states):
    q = parse_query('query(): Author(@t3, x, n, i), Author(@t1, y, m, j), m ~ "Joe Smith", n ~ m', fig1.schema)
    assert eval_boolean(q, xdb_of(fig1, states, "trivial"), fig1.sim)
    q2 = parse_query('query(): Author(@t6, x, n, i), n ~ "Myriam Lee"', fig1.schema)
    assert not eval_boolean(q2, xdb_of(fig1, states, "trivial"), fig1.sim)


def test_boolean_and_answer_entry_points_check_arity(fig1, states):
    q = parse_query("query(x): Wrote(t, x, p)", fig1.schema)
    with pytest.raises(QueryError):
        eval_boolean(q, xdb_of(fig1, states, "trivial"), fig1.sim)
    with pytest.raises(QueryError):
        eval_answers(q.substitute([obj("a1")]), xdb_of(fig1, states, "trivial"), fig1.sim)


# -- differential and property tests -----------------------------------------


def _random_states(inst, rng, n):
    """The trivial state, some solutions, and random partitions."""
    db = inst.db
    out = [trivial_state(db)]
    out += enumerate_solutions(db, inst.spec)[:2]
    objs, cells = sorted(db.objects()), sorted(db.cells())
    for _ in range(n):
        e = eqrel_close([tuple(rng.sample(objs, 2)) for _ in range(rng.randint(0, 3))] if len(objs) > 1 else [], objs)
        v = eqrel_close([tuple(rng.sample(cells, 2)) for _ in range(rng.randint(0, 3))] if len(cells) > 1 else [], cells)
        out.append(SolutionState(e, v))
    return out


def _valid(q, schema):
    try:
        validate_query(q, schema)
    except QueryError:
        return False
    return True


def test_evaluation_matches_literal_definition():
    checked = 0
    for seed in range(60):
        inst = random_instance(seed)
        rng = random.Random(seed)
        for state in _random_states(inst, rng, 2):
            xdb = induce_extended_db(inst.db, state.e, state.v)
            for arity in (0, 1, 2):
                q = random_query(rng, inst.db.schema, inst.db, arity, with_ineq=rng.random() < 0.3)
                if not _valid(q, inst.db.schema):
                    continue
                checked += 1
                if arity == 0:
                    assert eval_boolean(q, xdb, inst.spec.sim) == naive_boolean(q, xdb, inst.spec.sim)
                else:
                    assert eval_answers(q, xdb, inst.spec.sim) == naive_answers(q, xdb, inst.spec.sim)
    assert checked > 300


def test_trivial_partitions_give_plain_cq_evaluation():
    for seed in range(80):
        inst = random_instance(seed)
        rng = random.Random(seed)
        xdb = induce_extended_db(inst.db, *trivial_partitions(inst.db))
        for arity in (1, 2):
            q = random_query(rng, inst.db.schema, inst.db, arity, with_ineq=rng.random() < 0.3)
            if _valid(q, inst.db.schema):
                assert eval_answers(q, xdb, inst.spec.sim) == raw_answers(q, inst.db, inst.spec.sim)


def test_answers_agree_with_substitution():
    for seed in range(40):
        inst = random_instance(seed)
        rng = random.Random(seed)
        domain = sorted(inst.db.domain())
        for state in _random_states(inst, rng, 1):
            xdb = induce_extended_db(inst.db, state.e, state.v)
            q = random_query(rng, inst.db.schema, inst.db, 1)
            if not _valid(q, inst.db.schema):
                continue
            answers = eval_answers(q, xdb, inst.spec.sim)
            for c in domain:
                assert ((c,) in answers) == eval_boolean(q.substitute([c]), xdb, inst.spec.sim)
