"""Compile object merges into value merges.

Every object position becomes a value position and every object constant a
value constant with the same lexeme. Each object rule ``q(x, y) -> EqO(x, y)``
becomes a value rule merging one cell holding x with one cell holding y, and a
family of hard "linking" rules keeps every cell that holds the same former
object in one class. Solutions of the two settings correspond via
:func:`lift_solution`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .model import Cell, Constant, Database, DomainError, Fact, Kind, Partition, Relation, Schema
from .query import Atom, Inequality, Query, Similarity, Var
from .rules import ObjectRule, Specification, ValueRule


class GlobalizeError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Selection:
    """Where the head variables of a converted object rule were anchored."""

    rule: str
    x_atom: int
    x_position: int
    y_atom: int
    y_position: int


@dataclass(frozen=True)
class GlobalizedSpec:
    schema: Schema
    spec: Specification
    selections: Tuple[Selection, ...] = ()
    linking_rules: Tuple[ValueRule, ...] = field(default=())


def retype_schema(schema: Schema) -> Schema:
    return Schema(
        tuple(
            Relation(r.name, tuple(Kind.VAL if k is Kind.OBJ else k for k in r.types), r.attributes)
            for r in schema.relations
        )
    )


def _retype_constant(c):
    if isinstance(c, Constant) and c.kind is Kind.OBJ:
        return Constant(Kind.VAL, c.lexeme)
    return c


def _retype_query(q: Query, free=None) -> Query:
    return Query(
        q.free if free is None else tuple(free),
        tuple(Atom(a.relation, tuple(_retype_constant(t) for t in a.terms)) for a in q.atoms),
        tuple(Inequality(_retype_constant(b.left), _retype_constant(b.right)) for b in q.inequalities),
        tuple(Similarity(_retype_constant(b.left), _retype_constant(b.right)) for b in q.similarities),
    )


def globalize_database(db: Database) -> Database:
    """D read over the retyped schema: objects become values."""
    objects = {o.lexeme for o in db.objects()}
    clash = sorted(objects & {c.lexeme for c in db.domain() if c.kind is Kind.VAL})
    if clash:
        raise DomainError(f"object and value constants share lexemes: {', '.join(clash)}")
    schema = retype_schema(db.schema)
    return Database(
        schema, [Fact(f.tid, f.relation, tuple(_retype_constant(c) for c in f.args)) for f in db.facts]
    )


def _anchor(rule: ObjectRule, x: Var) -> Tuple[int, int, Var]:
    occ = rule.body.occurrences(x)
    if not occ:
        raise GlobalizeError("E401", f"rule {rule.name}: head variable {x} occurs in no relational atom")
    k, i = occ[0]
    t = rule.body.atoms[k].terms[0]
    if not isinstance(t, Var):
        raise GlobalizeError("E402", f"rule {rule.name}: atom holding {x} has a constant tid, no cell to merge")
    return k, i, t


def convert_object_rule(rule: ObjectRule) -> Tuple[ValueRule, Selection]:
    """The value rule merging the first cells holding x and y."""
    kx, i, xt = _anchor(rule, rule.x)
    ky, j, yt = _anchor(rule, rule.y)
    body = _retype_query(rule.body, free=(xt, yt))
    return ValueRule(rule.name, body, i, j, rule.hard), Selection(rule.name, kx, i, ky, j)


def object_positions(schema: Schema) -> List[Tuple[str, int]]:
    return [(r.name, i) for r in schema.relations for i in r.object_positions()]


def _linking_atom(rel: Relation, tid_var: Var, position: int, z: Var, prefix: str) -> Atom:
    terms = [tid_var]
    for p in range(1, rel.arity + 1):
        terms.append(z if p == position else Var(f"{prefix}{p}"))
    return Atom(rel.name, tuple(terms))


def linking_rules(schema: Schema, taken=()) -> List[ValueRule]:
    """One hard rule per ordered pair of object positions (self-pairs too):
    two cells holding the same former object are merged."""
    taken = set(taken)
    xt, yt, z = Var("xt"), Var("yt"), Var("z")
    positions = object_positions(schema)
    out = []
    for p, i in positions:
        for p2, j in positions:
            name = f"link_{p}_{i}_{p2}_{j}"
            while name in taken:
                name += "_"
            taken.add(name)
            body = Query(
                (xt, yt),
                (_linking_atom(schema[p], xt, i, z, "u"), _linking_atom(schema[p2], yt, j, z, "v")),
            )
            out.append(ValueRule(name, body, i, j, True))
    return out


def globalize_spec(schema: Schema, spec: Specification) -> GlobalizedSpec:
    rules = []
    selections = []
    for r in spec.rules:
        if r.is_object:
            vr, sel = convert_object_rule(r)
            rules.append(vr)
            selections.append(sel)
        else:
            rules.append(ValueRule(r.name, _retype_query(r.body), r.left_position, r.right_position, r.hard))
    taken = {r.name for r in spec.rules} | {d.name for d in spec.constraints}
    links = linking_rules(schema, taken)
    constraints = tuple(type(d)(d.name, _retype_query(d.body)) for d in spec.constraints)
    new_spec = Specification(tuple(rules) + tuple(links), constraints, spec.sim)
    return GlobalizedSpec(retype_schema(schema), new_spec, tuple(selections), tuple(links))


def lift_solution(db: Database, e: Partition, v: Partition, gdb: Database = None) -> Partition:
    """V together with every pair of cells whose stored objects are E-equivalent,
    as a partition of the cells of the retyped database."""
    if gdb is None:
        gdb = globalize_database(db)
    out = Partition(gdb.cells())
    for cls in v.nontrivial_classes():
        for c in cls[1:]:
            out.union(cls[0], c)
    first: Dict[Constant, Cell] = {}
    for f in db.facts:
        rel = db.schema[f.relation]
        for i in rel.object_positions():
            root = e.find(f[i])
            cell = Cell(f.tid, i)
            if root in first:
                out.union(first[root], cell)
            else:
                first[root] = cell
    return out
