"""Emit a normal logic program whose stable models are the solutions of a
database and specification, in clingo-compatible syntax.

Constant mangling (see docs/asp.md): tids ``t_<lexeme>``, objects
``o_<lexeme>``, values as quoted strings, positions as integers, relation
predicates ``r_<Name>``. Rule variables are ``V1, V2, ...`` numbered per rule
in order of introduction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .model import Cell, Constant, Database, Kind, Partition, trivial_partitions
from .query import Query, Var, variable_kinds
from .rules import Specification

Item = Union["AspRule", str]


class AspError(ValueError):
    pass


@dataclass(frozen=True)
class Literal:
    pred: str
    args: Tuple[str, ...] = ()
    negated: bool = False

    def __str__(self) -> str:
        atom = f"{self.pred}({','.join(self.args)})" if self.args else self.pred
        return f"not {atom}" if self.negated else atom


@dataclass(frozen=True)
class AspRule:
    head: Optional[Literal]
    body: Tuple[Literal, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        body = ", ".join(str(b) for b in self.body)
        return f"{self.head} :- {body}." if self.head is not None else f":- {body}."


@dataclass
class AspProgram:
    """Rules and facts in emission order; strings are comment lines."""

    items: List[Item] = field(default_factory=list)

    @property
    def rules(self) -> List[AspRule]:
        return [i for i in self.items if isinstance(i, AspRule)]

    @property
    def text(self) -> str:
        lines = []
        for i in self.items:
            lines.append(f"% {i}" if isinstance(i, str) else str(i))
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return self.text


def mangle(c: Constant) -> str:
    if c.kind is Kind.TID:
        return "t_" + c.lexeme
    if c.kind is Kind.OBJ:
        return "o_" + c.lexeme
    # clingo strings know only these three escapes; other characters go raw
    text = c.lexeme.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + text + '"'


def relation_predicate(name: str) -> str:
    return "r_" + name


def _is_var(arg: str) -> bool:
    return arg[:1].isupper()


def unsafe_variables(rule: AspRule) -> List[str]:
    """Variables not bound by a positive, non-similarity body literal."""
    bound = {a for b in rule.body if not b.negated and b.pred != "sim" for a in b.args if _is_var(a)}
    used = []
    for lit in ((rule.head,) if rule.head else ()) + rule.body:
        for a in lit.args:
            if _is_var(a) and a not in bound and a not in used:
                used.append(a)
    return used


def check_safety(program: AspProgram) -> None:
    for r in program.rules:
        bad = unsafe_variables(r)
        if bad:
            raise AspError(f"unsafe variables {', '.join(bad)} in rule: {r}")


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self) -> str:
        self.n += 1
        return f"V{self.n}"


class _Unsatisfiable(Exception):
    """The body can never hold (it mentions a constant outside the database)."""


@dataclass
class _Body:
    literals: List[Literal]
    names: Dict[Var, str]  # tid variables and, for object rules, head variables
    aux: List[AspRule]


def _rewrite(q: Query, db: Database, fresh: _Fresh, label: str, head_vars: Sequence[Var] = ()) -> _Body:
    """Build the body for ``q``: every relational atom is matched on its own,
    and joins, constants, similarity and inequality are re-expressed through
    ``val``/``eqo`` so that they hold over the current classes."""
    schema = db.schema
    kinds = variable_kinds(q, schema)
    domain = db.domain()
    names: Dict[Var, str] = {}
    occ_name: Dict[Tuple[int, int], str] = {}
    tid_term: List[str] = []
    rel_lits, const_lits = [], []

    for k, a in enumerate(q.atoms):
        args = []
        for i, t in enumerate(a.terms):
            if i == 0:
                if isinstance(t, Var):
                    if t not in names:
                        names[t] = fresh()
                    args.append(names[t])
                else:
                    args.append(mangle(t))
                tid_term.append(args[0])
                continue
            name = fresh()
            occ_name[(k, i)] = name
            args.append(name)
            if isinstance(t, Constant):
                if t.kind is Kind.VAL:
                    const_lits.append(Literal("val", (tid_term[k], str(i), mangle(t))))
                else:
                    const_lits.append(Literal("eqo", (name, mangle(t))))
        rel_lits.append(Literal(relation_predicate(a.relation), tuple(args)))

    def occurrences(v: Var) -> List[Tuple[int, int]]:
        return [(k, i) for k, i in q.occurrences(v) if i > 0]

    join_lits = []
    for v in q.variables():
        occ = occurrences(v)
        if kinds.get(v) is Kind.OBJ:
            if v in head_vars:
                names[v] = occ_name[occ[0]]
            if len(occ) > 1:
                shared = fresh()
                join_lits.extend(Literal("eqo", (occ_name[o], shared)) for o in occ)
        elif kinds.get(v) is Kind.VAL and len(occ) > 1:
            shared = fresh()
            join_lits.extend(Literal("val", (tid_term[k], str(i), shared)) for k, i in occ)

    sim_lits = []
    for s in q.similarities:
        sides = []
        for t in (s.left, s.right):
            if isinstance(t, Constant):
                sides.append(mangle(t))
                continue
            w = fresh()
            sim_lits.extend(Literal("val", (tid_term[k], str(i), w)) for k, i in occurrences(t))
            sides.append(w)
        sim_lits.append(Literal("sim", tuple(sides)))

    ineq_lits, aux = [], []
    for n, ineq in enumerate(q.inequalities, 1):
        l, r = ineq.left, ineq.right
        for t in (l, r):
            if isinstance(t, Constant) and t not in domain:
                raise _Unsatisfiable
        kl = l.kind if isinstance(l, Constant) else kinds[l]
        kr = r.kind if isinstance(r, Constant) else kinds[r]
        if kl is not kr:
            continue  # images of different kinds are always disjoint
        if isinstance(l, Constant) and isinstance(r, Constant):
            if l == r:
                raise _Unsatisfiable
            continue
        if kl is Kind.OBJ:
            terms = [mangle(t) if isinstance(t, Constant) else occ_name[occurrences(t)[0]] for t in (l, r)]
            ineq_lits.append(Literal("eqo", tuple(terms), negated=True))
            continue
        pred = f"ovl_{label}_{n}"
        consts = [mangle(t) for t in (l, r) if isinstance(t, Constant)]
        # against a constant, the other side must reach that very value
        shared = consts[0] if consts else fresh()
        body, args = [], []
        for t in (l, r):
            if isinstance(t, Var):
                for k, i in occurrences(t):
                    body.append(Literal("val", (tid_term[k], str(i), shared)))
                    if _is_var(tid_term[k]) and tid_term[k] not in args:
                        args.append(tid_term[k])
        head = Literal(pred, tuple(args))
        aux.append(AspRule(head, tuple(body)))
        ineq_lits.append(Literal(pred, tuple(args), negated=True))

    return _Body(rel_lits + const_lits + join_lits + sim_lits + ineq_lits, names, aux)


def _label(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_']", "_", name)


def _base_program(db: Database, spec: Specification) -> List[Item]:
    items: List[Item] = ["facts"]
    for f in db.facts:
        items.append(AspRule(Literal(relation_predicate(f.relation), tuple(mangle(c) for c in (f.tid, *f.args)))))
    values = sorted({c for c in db.domain() if c.kind is Kind.VAL}, key=lambda c: c.lexeme)
    items.append("similarity (reflexive and symmetric)")
    for a in values:
        for b in values:
            if spec.sim.similar(a, b):
                items.append(AspRule(Literal("sim", (mangle(a), mangle(b)))))
    items.append("tids and value positions")
    for f in db.facts:
        items.append(AspRule(Literal("tid", (mangle(f.tid),))))
    for c in db.cells():
        items.append(AspRule(Literal("valpos", (mangle(c.tid), str(c.position)))))
    items.append("projections and objects")
    for rel in db.schema.relations:
        pred = relation_predicate(rel.name)
        vs = tuple(f"V{n}" for n in range(1, rel.arity + 2))
        for i in range(1, rel.arity + 1):
            items.append(AspRule(Literal("proj", (vs[0], str(i), vs[i])), (Literal(pred, vs),)))
        for i in rel.object_positions():
            items.append(AspRule(Literal("obj", (vs[i],)), (Literal(pred, vs),)))
    items.append("values reachable from a cell through its class")
    items.append(AspRule(Literal("val", ("U", "I", "V")), (Literal("eqv", ("U", "I", "W", "J")), Literal("proj", ("W", "J", "V")))))
    items.append("equivalence closure")
    items.extend(
        [
            AspRule(Literal("eqo", ("U", "U")), (Literal("obj", ("U",)),)),
            AspRule(Literal("eqo", ("U", "V")), (Literal("eqo", ("V", "U")),)),
            AspRule(Literal("eqo", ("U", "W")), (Literal("eqo", ("U", "V")), Literal("eqo", ("V", "W")))),
            AspRule(Literal("eqv", ("U", "I", "U", "I")), (Literal("tid", ("U",)), Literal("valpos", ("U", "I")))),
            AspRule(Literal("eqv", ("U", "I", "V", "J")), (Literal("eqv", ("V", "J", "U", "I")),)),
            AspRule(
                Literal("eqv", ("U", "I", "W", "K")),
                (Literal("eqv", ("U", "I", "V", "J")), Literal("eqv", ("V", "J", "W", "K"))),
            ),
        ]
    )
    return items


_SOFT_OBJ = [
    AspRule(Literal("eqo", ("X", "Y")), (Literal("activeo", ("X", "Y")), Literal("neqo", ("X", "Y"), True))),
    AspRule(Literal("neqo", ("X", "Y")), (Literal("activeo", ("X", "Y")), Literal("eqo", ("X", "Y"), True))),
]
_SOFT_VAL = [
    AspRule(
        Literal("eqv", ("X", "I", "Y", "J")),
        (Literal("activev", ("X", "I", "Y", "J")), Literal("neqv", ("X", "I", "Y", "J"), True)),
    ),
    AspRule(
        Literal("neqv", ("X", "I", "Y", "J")),
        (Literal("activev", ("X", "I", "Y", "J")), Literal("eqv", ("X", "I", "Y", "J"), True)),
    ),
]


def emit_program(db: Database, spec: Specification) -> AspProgram:
    items = _base_program(db, spec)
    for rule in spec.rules:
        kind = "object" if rule.is_object else "value"
        items.append(f"rule {rule.name} ({'hard' if rule.hard else 'soft'} {kind})")
        fresh = _Fresh()
        try:
            b = _rewrite(rule.body, db, fresh, _label(rule.name), rule.body.free if rule.is_object else ())
        except _Unsatisfiable:
            items.append("body mentions a constant outside the database; never applicable")
            continue
        x, y = b.names[rule.x], b.names[rule.y]
        if rule.is_object:
            head = Literal("eqo" if rule.hard else "activeo", (x, y))
        else:
            args = (x, str(rule.left_position), y, str(rule.right_position))
            head = Literal("eqv" if rule.hard else "activev", args)
        items.extend(b.aux)
        items.append(AspRule(head, tuple(b.literals)))
    if spec.soft_rules:
        items.append("soft merges: each active pair is either merged or blocked")
        if any(r.is_object for r in spec.soft_rules):
            items.extend(_SOFT_OBJ)
        if any(not r.is_object for r in spec.soft_rules):
            items.extend(_SOFT_VAL)
    for dc in spec.constraints:
        items.append(f"constraint {dc.name}")
        try:
            b = _rewrite(dc.body, db, _Fresh(), _label(dc.name))
        except _Unsatisfiable:
            items.append("body mentions a constant outside the database; never violated")
            continue
        items.extend(b.aux)
        items.append(AspRule(None, tuple(b.literals)))
    program = AspProgram(items)
    check_safety(program)
    return program


_ATOM = re.compile(r"^(eqo|eqv)\((.*)\)$")
_ARG = re.compile(r'"(?:[^"\\]|\\.)*"|[^,]+')


class DecodeError(ValueError):
    pass


def _unquote(s: str) -> str:
    out, i = [], 1
    while i < len(s) - 1:
        ch = s[i]
        if ch == "\\":
            nxt = s[i + 1]
            out.append("\n" if nxt == "n" else nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def decode_model(atoms: Iterable[str], db: Database) -> Tuple[Partition, Partition]:
    """Read E and V off the ``eqo``/``eqv`` atoms of a stable model."""
    objects = {mangle(o): o for o in db.objects()}
    tids = {mangle(f.tid): f.tid for f in db.facts}
    cells = set(db.cells())
    e, v = trivial_partitions(db)
    for raw in atoms:
        m = _ATOM.match(raw.strip())
        if not m:
            continue
        args = [a.strip() for a in _ARG.findall(m.group(2))]
        if m.group(1) == "eqo":
            if len(args) != 2 or any(a not in objects for a in args):
                raise DecodeError(f"unknown object in {raw}")
            e.union(objects[args[0]], objects[args[1]])
        else:
            if len(args) != 4 or args[0] not in tids or args[2] not in tids:
                raise DecodeError(f"unknown tid in {raw}")
            try:
                c1 = Cell(tids[args[0]], int(args[1]))
                c2 = Cell(tids[args[2]], int(args[3]))
            except ValueError:
                raise DecodeError(f"malformed position in {raw}") from None
            if c1 not in cells or c2 not in cells:
                raise DecodeError(f"unknown cell in {raw}")
            v.union(c1, c2)
    return e, v
