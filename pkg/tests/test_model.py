import pytest
from hypothesis import given, strategies as st

from lace.model import (
    Cell,
    Database,
    DomainError,
    Fact,
    Kind,
    Partition,
    Relation,
    Schema,
    SimilarityOracle,
    cells_of,
    dom_of,
    edit_similarity,
    eqrel_close,
    induce_extended_db,
    obj,
    obj_of,
    tid,
    trivial_partitions,
    val,
)

from conftest import cell, partition_with


# -- eqrel_close -------------------------------------------------------------


def test_close_of_nothing_is_identity():
    p = eqrel_close([], ["a", "b"])
    assert p.classes() == [("a",), ("b",)]


def test_close_is_transitive():
    p = eqrel_close([("a", "b"), ("b", "c")], "abcd")
    assert p.classes() == [("a", "b", "c"), ("d",)]
    assert p.same("a", "c")


def test_close_single_union_over_fig1_objects(fig1):
    p = eqrel_close([(obj("a1"), obj("a2"))], fig1.db.objects())
    assert p.nontrivial_classes() == [(obj("a1"), obj("a2"))]


def test_close_rejects_foreign_element():
    with pytest.raises(DomainError):
        eqrel_close([("a", "z")], "ab")


pairs_strategy = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=10)


@given(pairs_strategy)
def test_close_is_idempotent(pairs):
    p = eqrel_close(pairs, range(8))
    assert eqrel_close(p.pairs(), range(8)) == p


@given(pairs_strategy, pairs_strategy)
def test_close_is_monotone(p1, p2):
    small = eqrel_close(p1, range(8))
    big = eqrel_close(p1 + p2, range(8))
    assert small.pairs() <= big.pairs()
    assert small.refines(big)


@given(pairs_strategy)
def test_partition_relation_is_an_equivalence(pairs):
    rel = eqrel_close(pairs, range(8)).pairs()
    assert all((x, x) in rel for x in range(8))
    assert all((b, a) in rel for a, b in rel)
    assert all((a, d) in rel for a, b in rel for c, d in rel if b == c)


def test_partition_copy_is_independent():
    p = Partition("abc")
    q = p.copy()
    q.union("a", "b")
    assert p.is_trivial() and not q.is_trivial()


# -- database accessors ------------------------------------------------------


def test_fig1_cells_and_objects(fig1):
    cells = cells_of(fig1.db)
    assert {cell("t1", 2), cell("t1", 3), cell("t9", 2), cell("t9", 3)} <= cells
    assert cell("t14", 1) not in cells
    expected = {obj(f"a{i}") for i in range(1, 9)} | {obj(f"p{i}") for i in range(1, 6)}
    assert obj_of(fig1.db) == expected
    assert val("Sapienza") in dom_of(fig1.db)
    assert tid("t1") in dom_of(fig1.db)


def test_empty_database_has_empty_sets():
    db = Database(Schema((Relation("R", (Kind.OBJ,)),)))
    assert cells_of(db) == obj_of(db) == dom_of(db) == frozenset()


def test_database_rejects_reused_tid():
    schema = Schema((Relation("R", (Kind.OBJ,)),))
    with pytest.raises(ValueError):
        Database(schema, [Fact(tid("t"), "R", (obj("a"),)), Fact(tid("t"), "R", (obj("b"),))])


def test_fact_argument_kind_is_checked():
    schema = Schema((Relation("R", (Kind.OBJ,)),))
    with pytest.raises(ValueError):
        Database(schema, [Fact(tid("t"), "R", (val("a"),))])


# -- induced extended database -----------------------------------------------


def test_induce_with_trivial_partitions_is_singletons(fig1):
    xdb = induce_extended_db(fig1.db, *trivial_partitions(fig1.db))
    assert len(xdb.facts) == len(fig1.db)
    for f, xf in zip(fig1.db, xdb.facts):
        assert xf.relation == f.relation
        assert xf.args == tuple(frozenset((f[i],)) for i in range(len(f.args) + 1))


def test_induce_replaces_merged_objects_everywhere(fig1):
    e = partition_with(fig1.db.objects(), [obj("a1"), obj("a2")])
    xdb = induce_extended_db(fig1.db, e, Partition(fig1.db.cells()))
    both = frozenset((obj("a1"), obj("a2")))
    for t in ("t1", "t2", "t14", "t15"):
        assert xdb.fact(tid(t)).args[1] == both
    assert xdb.fact(tid("t11")).args[4] == both  # chair of p3 is a1
    assert xdb.fact(tid("t3")).args[1] == frozenset((obj("a3"),))


def test_induce_merges_cell_values(fig1):
    e = partition_with(fig1.db.objects(), [obj("a1"), obj("a2")])
    v = partition_with(fig1.db.cells(), [cell("t1", 2), cell("t2", 2)])
    xdb = induce_extended_db(fig1.db, e, v)
    names = frozenset((val("J. Smith"), val("Joe Smith")))
    assert xdb.fact(tid("t1")).args[2] == names
    assert xdb.fact(tid("t2")).args[2] == names
    assert xdb.fact(tid("t3")).args[2] == frozenset((val("J. Smith"),))
    assert xdb.fact(tid("t4")).args[2] == frozenset((val("Joe Smith"),))
    assert xdb.fact(tid("t5")).args[2] == frozenset((val("Joe Smith"),))
    # institutions are separate cells and stay apart
    assert xdb.fact(tid("t1")).args[3] == frozenset((val("Sapienza"),))


def test_induce_rejects_wrong_universe(fig1):
    with pytest.raises(DomainError):
        induce_extended_db(fig1.db, Partition([obj("zz")]), Partition(fig1.db.cells()))
    with pytest.raises(DomainError):
        induce_extended_db(fig1.db, Partition(fig1.db.objects()), Partition([]))


@given(st.data())
def test_induced_sets_are_classes(fig1, data):
    objs = sorted(fig1.db.objects())
    cells = sorted(fig1.db.cells())
    opairs = data.draw(st.lists(st.tuples(st.sampled_from(objs), st.sampled_from(objs)), max_size=6))
    cpairs = data.draw(st.lists(st.tuples(st.sampled_from(cells), st.sampled_from(cells)), max_size=6))
    e, v = eqrel_close(opairs, objs), eqrel_close(cpairs, cells)
    xdb = induce_extended_db(fig1.db, e, v)
    for f, xf in zip(fig1.db, xdb.facts):
        assert xf.args[0] == frozenset((f.tid,))
        for i, c in enumerate(f.args, 1):
            if c.kind is Kind.OBJ:
                assert xf.args[i] == e.class_of(c)
            else:
                assert xf.args[i] == {fig1.db.value_at(x) for x in v.class_of(Cell(f.tid, i))}


# -- similarity --------------------------------------------------------------


def test_fig1_similarity(fig1):
    s = fig1.sim
    assert s.similar(val("J. Smith"), val("Joe Smith"))
    assert s.similar(val("Min Lee"), val("M. Lee"))
    assert not s.similar(val("Min Lee"), val("Myriam Lee"))


def test_threshold_uses_edit_similarity():
    s = SimilarityOracle.from_pairs([], threshold=0.8)
    assert edit_similarity("Sapienza", "Sapienze") == pytest.approx(0.875)
    assert s.similar("Sapienza", "Sapienze")
    assert not s.similar("Oxford", "NYU")


def test_threshold_outside_unit_interval_is_rejected():
    with pytest.raises(ValueError):
        SimilarityOracle(threshold=1.5)


texts = st.text(alphabet="abcde .", max_size=6)


@given(st.lists(st.tuples(texts, texts), max_size=5), texts, texts, st.none() | st.floats(0, 1))
def test_similarity_is_reflexive_and_symmetric(pairs, a, b, threshold):
    s = SimilarityOracle.from_pairs(pairs, threshold)
    assert s.similar(a, a)
    assert s.similar(a, b) == s.similar(b, a)
