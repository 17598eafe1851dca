"""Conjunctive queries with similarity and inequality atoms, evaluated over
extended (set-valued) databases.

A relational atom is matched against a single extended fact; a variable's
image is the intersection of the sets it is matched to, and must be
non-empty. Similarity holds between two images when some pair of their
members is similar; inequality holds when the images are disjoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .model import Constant, Database, ExtendedDatabase, Kind, Partition, Schema, SimilarityOracle, Cell

if TYPE_CHECKING:
    from .rules import DenialConstraint, ObjectRule, ValueRule


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"?{self.name}"


Term = Union[Var, Constant]


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: Tuple[Term, ...]  # terms[0] is the tid term

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(format_term(t) for t in self.terms)})"


@dataclass(frozen=True)
class Inequality:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{format_term(self.left)} != {format_term(self.right)}"


@dataclass(frozen=True)
class Similarity:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{format_term(self.left)} ~ {format_term(self.right)}"


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.kind is Kind.VAL:
        return str(t)
    return "@" + t.lexeme


class QueryError(ValueError):
    """A query violates a well-formedness condition.

    ``code`` is a stable diagnostic code (see docs/format.md); ``where`` is
    ``("atom", i)``, ``("ineq", i)``, ``("sim", i)`` or ``None``.
    """

    def __init__(self, code: str, message: str, where: Optional[Tuple[str, int]] = None):
        super().__init__(message)
        self.code = code
        self.where = where


@dataclass(frozen=True)
class Query:
    free: Tuple[Var, ...]
    atoms: Tuple[Atom, ...]
    inequalities: Tuple[Inequality, ...] = ()
    similarities: Tuple[Similarity, ...] = ()

    @property
    def is_boolean(self) -> bool:
        return not self.free

    @property
    def arity(self) -> int:
        return len(self.free)

    def variables(self) -> List[Var]:
        seen: Dict[Var, None] = {}
        for a in self.atoms:
            for t in a.terms:
                if isinstance(t, Var):
                    seen.setdefault(t)
        for b in (*self.inequalities, *self.similarities):
            for t in (b.left, b.right):
                if isinstance(t, Var):
                    seen.setdefault(t)
        return list(seen)

    def constants(self) -> Set[Constant]:
        out = set()
        for a in self.atoms:
            out.update(t for t in a.terms if isinstance(t, Constant))
        for b in (*self.inequalities, *self.similarities):
            out.update(t for t in (b.left, b.right) if isinstance(t, Constant))
        return out

    def occurrences(self, v: Var) -> List[Tuple[int, int]]:
        """(atom index, position) pairs where ``v`` occurs."""
        return [(k, i) for k, a in enumerate(self.atoms) for i, t in enumerate(a.terms) if t == v]

    def substitute(self, values: Sequence[Constant]) -> "Query":
        """The Boolean query obtained by replacing free variable i by values[i]."""
        if len(values) != len(self.free):
            raise ValueError(f"expected {len(self.free)} constants, got {len(values)}")
        mapping: Dict[Var, Constant] = {}
        for x, c in zip(self.free, values):
            if mapping.setdefault(x, c) != c:
                raise ValueError(f"free variable {x} bound to two constants")

        def sub(t):
            return mapping.get(t, t) if isinstance(t, Var) else t

        return Query(
            (),
            tuple(Atom(a.relation, tuple(sub(t) for t in a.terms)) for a in self.atoms),
            tuple(Inequality(sub(b.left), sub(b.right)) for b in self.inequalities),
            tuple(Similarity(sub(b.left), sub(b.right)) for b in self.similarities),
        )

    def __str__(self) -> str:
        body = [str(a) for a in self.atoms] + [str(b) for b in self.similarities] + [str(b) for b in self.inequalities]
        return ", ".join(body)


def variable_kinds(q: Query, schema: Schema) -> Dict[Var, Kind]:
    """Kind of each variable, derived from the relational positions it occupies."""
    kinds: Dict[Var, Kind] = {}
    for k, a in enumerate(q.atoms):
        rel = schema.get(a.relation)
        if rel is None:
            raise QueryError("E201", f"unknown relation {a.relation}", ("atom", k))
        if len(a.terms) != rel.arity + 1:
            raise QueryError(
                "E202", f"{a.relation} expects {rel.arity} arguments, got {len(a.terms) - 1}", ("atom", k)
            )
        for i, t in enumerate(a.terms):
            if not isinstance(t, Var):
                continue
            kind = rel.type_at(i)
            prev = kinds.setdefault(t, kind)
            if prev is not kind:
                raise QueryError(
                    "E205", f"variable {t} occurs in both {prev} and {kind} positions", ("atom", k)
                )
    return kinds


def validate_query(q: Query, schema: Schema) -> Dict[Var, Kind]:
    """Check well-formedness; return the kind of every variable."""
    kinds = variable_kinds(q, schema)
    tid_terms: Dict[Term, int] = {}
    for k, a in enumerate(q.atoms):
        rel = schema[a.relation]
        for i, t in enumerate(a.terms):
            if isinstance(t, Constant) and t.kind is not rel.type_at(i):
                raise QueryError(
                    "E203", f"{rel.type_at(i)} position {i} of {a.relation} holds {t.kind} constant {t.lexeme}", ("atom", k)
                )
        t0 = a.terms[0]
        if t0 in tid_terms:
            raise QueryError("E206", f"tid term {format_term(t0)} is shared by two atoms", ("atom", k))
        tid_terms[t0] = k
    for x in q.free:
        if x not in kinds:
            raise QueryError("E204", f"free variable {x} occurs in no relational atom")
    for k, b in enumerate(q.inequalities):
        for t in (b.left, b.right):
            if isinstance(t, Var) and t not in kinds:
                raise QueryError("E204", f"unsafe variable {t} in inequality atom", ("ineq", k))
            if _term_kind(t, kinds) is Kind.TID:
                raise QueryError("E207", "inequality atoms cannot mention tids", ("ineq", k))
    for k, b in enumerate(q.similarities):
        for t in (b.left, b.right):
            if isinstance(t, Var) and t not in kinds:
                raise QueryError("E204", f"unsafe variable {t} in similarity atom", ("sim", k))
            if _term_kind(t, kinds) is not Kind.VAL:
                raise QueryError("E207", "similarity atoms relate value terms only", ("sim", k))
    return kinds


def _term_kind(t: Term, kinds: Dict[Var, Kind]) -> Kind:
    return kinds[t] if isinstance(t, Var) else t.kind


# -- evaluation ---------------------------------------------------------------


class _Compiled:
    """Index-based form of a query, with builtin atoms scheduled at the
    earliest atom after which all their variables' images are final."""

    def __init__(self, q: Query, deferred: FrozenSet[Var] = frozenset()):
        self.query = q
        self.vars = q.variables()
        self.index = {v: n for n, v in enumerate(self.vars)}
        self.atoms = []
        last_seen: Dict[Var, int] = {}
        for k, a in enumerate(q.atoms):
            slots = []
            for i, t in enumerate(a.terms):
                if isinstance(t, Var):
                    slots.append((i, self.index[t], None))
                    last_seen[t] = k
                else:
                    slots.append((i, -1, t))
            self.atoms.append((a.relation, tuple(slots)))
        n = len(q.atoms)
        self.checks: List[List[Tuple[str, object, object]]] = [[] for _ in range(n + 1)]
        self.deferred: List[Tuple[str, object, object]] = []
        for kind, builtins in (("ne", q.inequalities), ("sim", q.similarities)):
            for b in builtins:
                terms = (b.left, b.right)
                enc = tuple(("v", self.index[t]) if isinstance(t, Var) else ("c", t) for t in terms)
                if any(isinstance(t, Var) and t in deferred for t in terms):
                    self.deferred.append((kind, enc[0], enc[1]))
                    continue
                ready = max((last_seen[t] for t in terms if isinstance(t, Var)), default=-1)
                self.checks[ready + 1].append((kind, enc[0], enc[1]))


def _image(enc, images) -> FrozenSet[Constant]:
    return images[enc[1]] if enc[0] == "v" else frozenset((enc[1],))


def _holds(check, images, oracle: SimilarityOracle) -> bool:
    kind, l, r = check
    a, b = _image(l, images), _image(r, images)
    if kind == "ne":
        return a.isdisjoint(b)
    if a & b:
        return True
    return any(oracle.similar(x, y) for x in a for y in b)


def _match(c: _Compiled, xdb: ExtendedDatabase, oracle: SimilarityOracle) -> Iterator[List[FrozenSet[Constant]]]:
    """Yield variable images for every choice of extended facts (one per atom)
    satisfying the relational, inequality and similarity conditions (except
    deferred builtins)."""
    images: List[Optional[FrozenSet[Constant]]] = [None] * len(c.vars)
    n = len(c.atoms)
    for chk in c.checks[0]:
        if not _holds(chk, images, oracle):
            return

    def rec(k: int):
        if k == n:
            yield images
            return
        rel, slots = c.atoms[k]
        for xf in xdb.by_relation.get(rel, ()):
            saved = []
            ok = True
            for pos, idx, const in slots:
                s = xf.args[pos]
                if idx < 0:
                    if const not in s:
                        ok = False
                        break
                    continue
                cur = images[idx]
                new = s if cur is None else cur & s
                if not new:
                    ok = False
                    break
                saved.append((idx, cur))
                images[idx] = new
            if ok and all(_holds(chk, images, oracle) for chk in c.checks[k + 1]):
                yield from rec(k + 1)
            for idx, cur in reversed(saved):
                images[idx] = cur

    yield from rec(0)


def _constants_in_domain(q: Query, xdb: ExtendedDatabase) -> bool:
    consts = q.constants()
    return not consts or consts <= xdb.db.domain()


def eval_boolean(q: Query, xdb: ExtendedDatabase, oracle: SimilarityOracle) -> bool:
    if not q.is_boolean:
        raise QueryError("E208", "eval_boolean expects a Boolean query")
    if not _constants_in_domain(q, xdb):
        return False
    c = _Compiled(q)
    for _ in _match(c, xdb, oracle):
        return True
    return False


def eval_answers(q: Query, xdb: ExtendedDatabase, oracle: SimilarityOracle) -> Set[Tuple[Constant, ...]]:
    """All tuples over Dom(D) whose substitution into ``q`` is satisfied."""
    if q.is_boolean:
        raise QueryError("E208", "eval_answers expects at least one free variable")
    if not _constants_in_domain(q, xdb):
        return set()
    free = list(dict.fromkeys(q.free))
    c = _Compiled(q, frozenset(free))
    free_idx = [c.index[x] for x in free]
    pos_of = {x: n for n, x in enumerate(free)}
    out: Set[Tuple[Constant, ...]] = set()
    for images in _match(c, xdb, oracle):
        choices = [sorted(images[i]) for i in free_idx]
        for combo in itertools.product(*choices):
            if c.deferred:
                subst = list(images)
                for i, val in zip(free_idx, combo):
                    subst[i] = frozenset((val,))
                if not all(_holds(chk, subst, oracle) for chk in c.deferred):
                    continue
            out.add(tuple(combo[pos_of[x]] for x in q.free))
    return out


def check_dc(dc: "DenialConstraint", xdb: ExtendedDatabase, oracle: SimilarityOracle) -> bool:
    """True iff the constraint is satisfied (its body has no match)."""
    return not eval_boolean(dc.body, xdb, oracle)


def check_rule_sat(
    rule: Union["ObjectRule", "ValueRule"],
    xdb: ExtendedDatabase,
    e: Partition,
    v: Partition,
    oracle: SimilarityOracle,
) -> bool:
    """True iff every answer of the rule body is already merged."""
    for a, b in eval_answers(rule.body, xdb, oracle):
        if rule.is_object:
            if not e.same(a, b):
                return False
        elif not v.same(Cell(a, rule.left_position), Cell(b, rule.right_position)):
            return False
    return True
