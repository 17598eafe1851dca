"""ER specifications: hard/soft merge rules for objects and values, and
denial constraints."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

from .model import Kind, Schema, SimilarityOracle
from .query import Query, QueryError, Var, validate_query


@dataclass(frozen=True)
class ObjectRule:
    """``body(x, y) => EqO(x, y)`` (hard) or ``~>`` (soft)."""

    name: str
    body: Query
    hard: bool

    is_object = True

    @property
    def x(self) -> Var:
        return self.body.free[0]

    @property
    def y(self) -> Var:
        return self.body.free[1]


@dataclass(frozen=True)
class ValueRule:
    """``body(xt, yt) => EqV(<xt, i>, <yt, j>)`` (hard) or ``~>`` (soft)."""

    name: str
    body: Query
    left_position: int
    right_position: int
    hard: bool

    is_object = False

    @property
    def x(self) -> Var:
        return self.body.free[0]

    @property
    def y(self) -> Var:
        return self.body.free[1]


Rule = Union[ObjectRule, ValueRule]


@dataclass(frozen=True)
class DenialConstraint:
    name: str
    body: Query

    @property
    def has_inequality(self) -> bool:
        return bool(self.body.inequalities)


@dataclass(frozen=True)
class Specification:
    """Rules (in declaration order), denial constraints and the similarity
    predicate they are evaluated with."""

    rules: Tuple[Rule, ...] = ()
    constraints: Tuple[DenialConstraint, ...] = ()
    sim: SimilarityOracle = field(default_factory=SimilarityOracle)

    @property
    def object_rules(self) -> Tuple[ObjectRule, ...]:
        return tuple(r for r in self.rules if r.is_object)

    @property
    def value_rules(self) -> Tuple[ValueRule, ...]:
        return tuple(r for r in self.rules if not r.is_object)

    @property
    def hard_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.hard)

    @property
    def soft_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if not r.hard)

    @property
    def inequality_free(self) -> bool:
        return not any(d.has_inequality for d in self.constraints)

    def replace(self, **changes) -> "Specification":
        from dataclasses import replace

        return replace(self, **changes)


def _rule_query_checks(q: Query, schema: Schema):
    kinds = validate_query(q, schema)
    if q.inequalities:
        raise QueryError("E210", "rule bodies may not contain inequality atoms", ("ineq", 0))
    if len(q.free) != 2:
        raise QueryError("E211", "rule bodies have exactly two distinguished variables")
    return kinds


def validate_rule(rule: Rule, schema: Schema) -> None:
    kinds = _rule_query_checks(rule.body, schema)
    if rule.is_object:
        for x in rule.body.free:
            if kinds[x] is not Kind.OBJ:
                raise QueryError("E212", f"head variable {x} of an object rule must occur only in object positions")
        return
    q = rule.body
    for x, pos in ((rule.x, rule.left_position), (rule.y, rule.right_position)):
        occ = q.occurrences(x)
        if len(occ) != 1 or occ[0][1] != 0:
            raise QueryError("E213", f"tid variable {x} must occur exactly once, in position 0")
        atom = q.atoms[occ[0][0]]
        rel = schema[atom.relation]
        if not 1 <= pos <= rel.arity or rel.type_at(pos) is not Kind.VAL:
            raise QueryError(
                "E214", f"EqV position {x}.{pos} is not a value position of {atom.relation}", ("atom", occ[0][0])
            )


def validate_constraint(dc: DenialConstraint, schema: Schema) -> None:
    validate_query(dc.body, schema)
    if not dc.body.is_boolean:
        raise QueryError("E215", "denial constraint bodies are Boolean")


def validate_specification(spec: Specification, schema: Schema) -> None:
    names = set()
    for item in (*spec.rules, *spec.constraints):
        if item.name in names:
            raise QueryError("E216", f"duplicate rule or constraint label {item.name}")
        names.add(item.name)
    for r in spec.rules:
        validate_rule(r, schema)
    for d in spec.constraints:
        validate_constraint(d, schema)


def make_specification(
    rules: Iterable[Rule] = (), constraints: Iterable[DenialConstraint] = (), sim: SimilarityOracle = None
) -> Specification:
    return Specification(tuple(rules), tuple(constraints), sim if sim is not None else SimilarityOracle())
