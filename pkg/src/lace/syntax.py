"""Line-oriented text formats for schemas, databases, similarity tables,
specifications, solutions and queries (grammar in docs/format.md).

Every parser raises :class:`ParseError`, whose ``str`` is the
machine-readable diagnostic ``code:line:col:message``.
"""

from __future__ import annotations

import re
from decimal import Decimal
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .model import (
    Cell,
    Constant,
    Database,
    Fact,
    Kind,
    Partition,
    Relation,
    Schema,
    SimilarityOracle,
    eqrel_close,
    quote,
)
from .query import Atom, Inequality, Query, QueryError, Similarity, Term, Var, format_term, validate_query
from .rules import (
    DenialConstraint,
    ObjectRule,
    Specification,
    ValueRule,
    validate_constraint,
    validate_rule,
)


class ParseError(ValueError):
    def __init__(self, code: str, line: int, col: int, message: str):
        super().__init__(message)
        self.code = code
        self.line = line
        self.col = col
        self.message = message

    def __str__(self) -> str:
        return f"{self.code}:{self.line}:{self.col}:{self.message}"


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#.*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>=>|~>|->|!=|[():,.~@])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def value(self) -> str:
        if self.kind != "string":
            return self.text
        body = self.text[1:-1]
        return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def tokenize_line(text: str, lineno: int) -> List[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise ParseError("E001", lineno, pos + 1, "unterminated string literal")
            raise ParseError("E001", lineno, pos + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    return out


def _lines(text: str, first_line: int = 1) -> Iterable[Tuple[int, List[Token]]]:
    # only \n ends a line (a trailing \r is dropped), so other control
    # characters may appear inside strings
    for n, raw in enumerate(text.split("\n"), first_line):
        if raw.endswith("\r"):
            raw = raw[:-1]
        toks = tokenize_line(raw, n)
        if toks:
            yield n, toks


class _Cursor:
    def __init__(self, tokens: List[Token], lineno: int):
        self.toks = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, offset: int = 0) -> bool:
        t = self.peek(offset)
        return t is not None and t.kind in ("op", "ident") and t.text == text

    def _where(self) -> Tuple[int, int]:
        t = self.peek()
        if t is not None:
            return t.line, t.col
        last = self.toks[-1]
        return last.line, last.col + len(last.text)

    def error(self, message: str, code: str = "E002") -> ParseError:
        line, col = self._where()
        return ParseError(code, line, col, message)

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.peek()
            raise self.error(f"expected {text!r}, found {found.text!r}" if found else f"expected {text!r}")
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            raise self.error(f"expected {what}" + (f", found {t.text!r}" if t else ""))
        return self.next()

    def done(self) -> None:
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")


# -- line classification ------------------------------------------------------

_RULE_KEYWORDS = ("hard", "soft", "dc")


def _line_kind(toks: List[Token]) -> str:
    first = toks[0]
    if first.kind == "ident" and first.text == "relation":
        return "relation"
    if first.kind == "ident" and first.text == "sim":
        return "sim"
    if first.kind == "ident" and first.text == "query":
        return "query"
    if first.kind == "ident" and first.text in ("eqo", "eqv") and len(toks) > 1 and toks[1].text == ":":
        return "solution"
    if first.kind == "ident" and first.text in _RULE_KEYWORDS:
        return "rule"
    if first.kind == "ident" and len(toks) > 2 and toks[1].text == ":":
        if toks[2].kind == "ident" and toks[2].text in _RULE_KEYWORDS:
            return "rule"
        return "fact"
    return "unknown"


def _classify(toks: List[Token], lineno: int) -> str:
    kind = _line_kind(toks)
    if kind == "unknown":
        raise ParseError("E002", lineno, toks[0].col, f"cannot classify line starting with {toks[0].text!r}")
    return kind


# -- schema -------------------------------------------------------------------

_TYPE_WORDS = {"obj": Kind.OBJ, "val": Kind.VAL}


def _parse_relation(cur: _Cursor) -> Tuple[Relation, Token]:
    cur.expect("relation")
    name = cur.expect_kind("ident", "relation name")
    cur.expect("(")
    types, attrs = [], []
    while True:
        t = cur.expect_kind("ident", "attribute or type")
        if cur.at(":"):
            cur.next()
            ty = cur.expect_kind("ident", "type obj or val")
            attrs.append(t.text)
        else:
            ty = t
        if ty.text not in _TYPE_WORDS:
            raise ParseError("E102", ty.line, ty.col, f"unknown position type {ty.text!r} (use obj or val)")
        types.append(_TYPE_WORDS[ty.text])
        if cur.at(","):
            cur.next()
            continue
        cur.expect(")")
        break
    cur.done()
    if attrs and len(attrs) != len(types):
        raise ParseError("E102", name.line, name.col, "either name every attribute or none")
    return Relation(name.text, tuple(types), tuple(attrs)), name


def parse_schema(text: str) -> Schema:
    rels: List[Relation] = []
    for n, toks in _lines(text):
        if _classify(toks, n) != "relation":
            raise ParseError("E107", n, toks[0].col, "expected a relation declaration")
        rel, tok = _parse_relation(_Cursor(toks, n))
        if any(r.name == rel.name for r in rels):
            raise ParseError("E101", tok.line, tok.col, f"duplicate relation {rel.name}")
        rels.append(rel)
    return Schema(tuple(rels))


# -- data ---------------------------------------------------------------------


def _parse_fact(cur: _Cursor, schema: Schema) -> Fact:
    t = cur.expect_kind("ident", "tid")
    cur.expect(":")
    rname = cur.expect_kind("ident", "relation name")
    rel = schema.get(rname.text)
    if rel is None:
        raise ParseError("E103", rname.line, rname.col, f"unknown relation {rname.text}")
    cur.expect("(")
    args: List[Constant] = []
    while True:
        tok = cur.next()
        pos = len(args) + 1
        if tok.kind == "string":
            c = Constant(Kind.VAL, tok.value)
        elif tok.kind == "ident":
            c = Constant(Kind.OBJ, tok.text)
        else:
            raise ParseError("E002", tok.line, tok.col, f"expected a constant, found {tok.text!r}")
        if pos <= rel.arity and c.kind is not rel.type_at(pos):
            want = "an object identifier" if rel.type_at(pos) is Kind.OBJ else "a quoted value"
            raise ParseError("E105", tok.line, tok.col, f"position {pos} of {rel.name} expects {want}")
        args.append(c)
        if cur.at(","):
            cur.next()
            continue
        cur.expect(")")
        break
    cur.done()
    if len(args) != rel.arity:
        raise ParseError("E104", rname.line, rname.col, f"{rel.name} expects {rel.arity} arguments, got {len(args)}")
    return Fact(Constant(Kind.TID, t.text), rel.name, tuple(args))


def _add_facts(schema: Schema, lines: Iterable[Tuple[int, List[Token]]]) -> Database:
    facts: List[Fact] = []
    seen: Dict[Constant, int] = {}
    for n, toks in lines:
        f = _parse_fact(_Cursor(toks, n), schema)
        if f.tid in seen:
            raise ParseError("E106", n, toks[0].col, f"tid {f.tid.lexeme} already used on line {seen[f.tid]}")
        seen[f.tid] = n
        facts.append(f)
    return Database(schema, facts)


def parse_database(text: str, schema: Schema) -> Database:
    lines = []
    for n, toks in _lines(text):
        if _classify(toks, n) != "fact":
            raise ParseError("E107", n, toks[0].col, "expected a fact 'tid: Relation(...)'")
        lines.append((n, toks))
    return _add_facts(schema, lines)


# -- similarity ---------------------------------------------------------------


def _parse_sim_line(cur: _Cursor, pairs: List[Tuple[str, str]], threshold: List[float]) -> None:
    cur.expect("sim")
    if cur.at("threshold"):
        cur.next()
        num = cur.expect_kind("number", "threshold in [0, 1]")
        value = float(num.text)
        if not 0.0 <= value <= 1.0:
            raise ParseError("E303", num.line, num.col, "similarity threshold must lie in [0, 1]")
        cur.done()
        threshold.append(value)
        return
    items = [cur.expect_kind("string", "quoted value").value]
    while cur.at("~"):
        cur.next()
        items.append(cur.expect_kind("string", "quoted value").value)
    cur.done()
    if len(items) < 2:
        raise cur.error("expected '~' between similar values")
    pairs.extend(zip(items, items[1:]))


def _oracle(pairs, thresholds) -> SimilarityOracle:
    return SimilarityOracle.from_pairs(pairs, thresholds[-1] if thresholds else None)


def parse_sim(text: str) -> SimilarityOracle:
    pairs: List[Tuple[str, str]] = []
    thresholds: List[float] = []
    for n, toks in _lines(text):
        if _classify(toks, n) != "sim":
            raise ParseError("E107", n, toks[0].col, "expected a 'sim' line")
        _parse_sim_line(_Cursor(toks, n), pairs, thresholds)
    return _oracle(pairs, thresholds)


# -- queries and rules --------------------------------------------------------


class _BodyParser:
    """Parses a comma-separated body, remembering token positions for
    diagnostics raised by query validation."""

    def __init__(self, cur: _Cursor, schema: Schema):
        self.cur = cur
        self.schema = schema
        self.where: Dict[Tuple[str, int], Token] = {}

    def term(self, kind_hint: Optional[Kind]) -> Term:
        tok = self.cur.next()
        if tok.kind == "string":
            return Constant(Kind.VAL, tok.value)
        if tok.kind == "ident":
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "@":
            name = self.cur.expect_kind("ident", "constant name after '@'")
            if kind_hint is Kind.VAL:
                raise ParseError("E203", tok.line, tok.col, "value constants are written as quoted strings")
            return Constant(kind_hint or Kind.OBJ, name.text)
        raise ParseError("E002", tok.line, tok.col, f"expected a term, found {tok.text!r}")

    def body(self, stop: Tuple[str, ...]) -> Tuple[List[Atom], List[Inequality], List[Similarity]]:
        atoms, ineqs, sims = [], [], []
        while True:
            start = self.cur.peek()
            if start is None:
                raise self.cur.error("unexpected end of body")
            if start.kind == "ident" and self.cur.at("(", 1):
                atoms.append(self.atom())
                self.where[("atom", len(atoms) - 1)] = start
            else:
                left = self.term(None)
                op = self.cur.next()
                if op.text == "~":
                    sims.append(Similarity(left, self.term(None)))
                    self.where[("sim", len(sims) - 1)] = start
                elif op.text == "!=":
                    ineqs.append(Inequality(left, self.term(None)))
                    self.where[("ineq", len(ineqs) - 1)] = start
                else:
                    raise ParseError("E002", op.line, op.col, f"expected '~' or '!=', found {op.text!r}")
            if self.cur.at(","):
                self.cur.next()
                continue
            if any(self.cur.at(s) for s in stop):
                return atoms, ineqs, sims
            raise self.cur.error("expected ',' or " + " or ".join(repr(s) for s in stop))

    def atom(self) -> Atom:
        name = self.cur.expect_kind("ident", "relation name")
        rel = self.schema.get(name.text)
        if rel is None:
            raise ParseError("E201", name.line, name.col, f"unknown relation {name.text}")
        self.cur.expect("(")
        terms: List[Term] = []
        while True:
            pos = len(terms)
            hint = rel.type_at(pos) if pos <= rel.arity else None
            terms.append(self.term(hint))
            if self.cur.at(","):
                self.cur.next()
                continue
            self.cur.expect(")")
            break
        return Atom(rel.name, tuple(terms))

    def located(self, err: QueryError, fallback: Token) -> ParseError:
        tok = self.where.get(err.where, fallback) if err.where else fallback
        return ParseError(err.code, tok.line, tok.col, str(err))


def _parse_rule(cur: _Cursor, schema: Schema, default_name: str):
    name = default_name
    if cur.peek().kind == "ident" and cur.at(":", 1) and cur.peek().text != "dc":
        name = cur.next().text
        cur.expect(":")
    kw = cur.expect_kind("ident", "'hard', 'soft' or 'dc'")
    bp = _BodyParser(cur, schema)
    if kw.text == "dc":
        cur.expect(":")
        atoms, ineqs, sims = bp.body(("->",))
        cur.expect("->")
        cur.expect("false")
        cur.done()
        dc = DenialConstraint(name, Query((), tuple(atoms), tuple(ineqs), tuple(sims)))
        try:
            validate_constraint(dc, schema)
        except QueryError as err:
            raise bp.located(err, kw)
        return dc
    if kw.text not in ("hard", "soft"):
        raise ParseError("E002", kw.line, kw.col, "expected 'hard', 'soft' or 'dc'")
    target = cur.expect_kind("ident", "'obj' or 'val'")
    if target.text not in ("obj", "val"):
        raise ParseError("E002", target.line, target.col, "expected 'obj' or 'val'")
    cur.expect(":")
    atoms, ineqs, sims = bp.body(("=>", "~>"))
    arrow = cur.next()
    if (arrow.text == "=>") != (kw.text == "hard"):
        raise ParseError("E209", arrow.line, arrow.col, f"{kw.text} rules use '{'=>' if kw.text == 'hard' else '~>'}'")
    hard = kw.text == "hard"
    head = cur.expect_kind("ident", "rule head")
    if target.text == "obj":
        if head.text != "EqO":
            raise ParseError("E002", head.line, head.col, "object rules conclude EqO(x, y)")
        cur.expect("(")
        x = cur.expect_kind("ident", "variable")
        cur.expect(",")
        y = cur.expect_kind("ident", "variable")
        cur.expect(")")
        cur.done()
        q = Query((Var(x.text), Var(y.text)), tuple(atoms), tuple(ineqs), tuple(sims))
        rule = ObjectRule(name, q, hard)
    else:
        if head.text != "EqV":
            raise ParseError("E002", head.line, head.col, "value rules conclude EqV(x.i, y.j)")
        cur.expect("(")
        x = cur.expect_kind("ident", "tid variable")
        cur.expect(".")
        i = cur.expect_kind("number", "position")
        cur.expect(",")
        y = cur.expect_kind("ident", "tid variable")
        cur.expect(".")
        j = cur.expect_kind("number", "position")
        cur.expect(")")
        cur.done()
        for p in (i, j):
            if not p.text.isdigit():
                raise ParseError("E002", p.line, p.col, "positions are positive integers")
        q = Query((Var(x.text), Var(y.text)), tuple(atoms), tuple(ineqs), tuple(sims))
        rule = ValueRule(name, q, int(i.text), int(j.text), hard)
    try:
        validate_rule(rule, schema)
    except QueryError as err:
        raise bp.located(err, head)
    return rule


def _collect_spec(lines, schema: Schema, sim: SimilarityOracle) -> Specification:
    rules, dcs = [], []
    names: Dict[str, int] = {}
    for n, toks in lines:
        cur = _Cursor(toks, n)
        item = _parse_rule(cur, schema, f"{'d' if _is_dc(toks) else 'r'}{len(dcs if _is_dc(toks) else rules) + 1}")
        if item.name in names:
            raise ParseError("E216", n, toks[0].col, f"label {item.name} already used on line {names[item.name]}")
        names[item.name] = n
        (dcs if isinstance(item, DenialConstraint) else rules).append(item)
    return Specification(tuple(rules), tuple(dcs), sim)


def _is_dc(toks: List[Token]) -> bool:
    if toks[0].text == "dc":
        return True
    return len(toks) > 2 and toks[1].text == ":" and toks[2].text == "dc"


def parse_spec(text: str, schema: Schema, sim: Optional[SimilarityOracle] = None) -> Specification:
    lines = []
    pairs: List[Tuple[str, str]] = []
    thresholds: List[float] = []
    for n, toks in _lines(text):
        kind = _classify(toks, n)
        if kind == "sim":
            _parse_sim_line(_Cursor(toks, n), pairs, thresholds)
        elif kind == "rule":
            lines.append((n, toks))
        else:
            raise ParseError("E107", n, toks[0].col, "expected a rule or denial constraint")
    if sim is None:
        sim = _oracle(pairs, thresholds)
    elif pairs or thresholds:
        sim = _oracle(sorted(sim.declared_pairs()) + pairs, thresholds or ([sim.threshold] if sim.threshold is not None else []))
    return _collect_spec(lines, schema, sim)


def parse_query(text: str, schema: Schema) -> Query:
    lines = list(_lines(text))
    if len(lines) != 1:
        raise ParseError("E002", lines[1][0] if len(lines) > 1 else 1, 1, "a query file holds exactly one query")
    n, toks = lines[0]
    cur = _Cursor(toks, n)
    kw = cur.expect("query")
    free: List[Var] = []
    if cur.at("("):
        cur.next()
        if not cur.at(")"):
            while True:
                free.append(Var(cur.expect_kind("ident", "variable").text))
                if cur.at(","):
                    cur.next()
                    continue
                break
        cur.expect(")")
    cur.expect(":")
    bp = _BodyParser(cur, schema)
    atoms, ineqs, sims = _body_to_end(bp)
    q = Query(tuple(free), tuple(atoms), tuple(ineqs), tuple(sims))
    try:
        validate_query(q, schema)
    except QueryError as err:
        raise bp.located(err, kw)
    return q


def _body_to_end(bp: _BodyParser):
    # a query body runs to the end of the line
    last = bp.cur.toks[-1]
    bp.cur.toks = bp.cur.toks + [Token("op", "<eol>", last.line, last.col + len(last.text))]
    out = bp.body(("<eol>",))
    bp.cur.next()
    return out


# -- solutions ----------------------------------------------------------------


def parse_solution(text: str, db: Database) -> Tuple[Partition, Partition]:
    objects = {c.lexeme: c for c in db.objects()}
    cells = set(db.cells())
    owner: Dict[object, int] = {}
    e_pairs, v_pairs = [], []
    for n, toks in _lines(text):
        if _classify(toks, n) != "solution":
            raise ParseError("E107", n, toks[0].col, "expected 'eqo:' or 'eqv:'")
        cur = _Cursor(toks, n)
        head = cur.next()
        cur.expect(":")
        members = []
        while cur.peek() is not None:
            tok = cur.expect_kind("ident", "object" if head.text == "eqo" else "cell t.i")
            if head.text == "eqo":
                if tok.text not in objects:
                    raise ParseError("E301", tok.line, tok.col, f"{tok.text} is not an object of the database")
                el = objects[tok.text]
            else:
                cur.expect(".")
                pos = cur.expect_kind("number", "position")
                el = Cell(Constant(Kind.TID, tok.text), int(float(pos.text)))
                if not pos.text.isdigit() or el not in cells:
                    raise ParseError("E301", tok.line, tok.col, f"{tok.text}.{pos.text} is not a value cell of the database")
            if el in owner:
                raise ParseError("E302", tok.line, tok.col, f"{tok.text} already belongs to a class on line {owner[el]}")
            owner[el] = n
            members.append(el)
        pairs = e_pairs if head.text == "eqo" else v_pairs
        pairs.extend((members[0], m) for m in members[1:])
    return eqrel_close(e_pairs, db.objects()), eqrel_close(v_pairs, db.cells())


def render_solution(e: Partition, v: Partition) -> str:
    lines = []
    for cls in e.nontrivial_classes():
        lines.append("eqo: " + " ".join(o.lexeme for o in cls))
    for cls in v.nontrivial_classes():
        lines.append("eqv: " + " ".join(str(c) for c in cls))
    return "".join(line + "\n" for line in lines)


# -- rendering ----------------------------------------------------------------


def render_schema(schema: Schema) -> str:
    out = []
    for r in schema.relations:
        if r.attributes:
            inner = ", ".join(f"{a}: {k}" for a, k in zip(r.attributes, r.types))
        else:
            inner = ", ".join(str(k) for k in r.types)
        out.append(f"relation {r.name}({inner})\n")
    return "".join(out)


def render_database(db: Database) -> str:
    return "".join(f"{f}\n" for f in db)


def render_sim(oracle: SimilarityOracle) -> str:
    out = [f"sim {quote(a)} ~ {quote(b)}\n" for a, b in oracle.declared_pairs()]
    if oracle.threshold is not None:
        # positional notation: the number token has no exponent form
        out.append(f"sim threshold {format(Decimal(repr(oracle.threshold)), 'f')}\n")
    return "".join(out)


def render_query(q: Query) -> str:
    return f"query({', '.join(x.name for x in q.free)}): {q}\n"


def render_rule(rule) -> str:
    if isinstance(rule, DenialConstraint):
        return f"{rule.name}: dc: {rule.body} -> false"
    kw = "hard" if rule.hard else "soft"
    arrow = "=>" if rule.hard else "~>"
    if rule.is_object:
        head = f"EqO({rule.x}, {rule.y})"
        return f"{rule.name}: {kw} obj: {rule.body} {arrow} {head}"
    head = f"EqV({rule.x}.{rule.left_position}, {rule.y}.{rule.right_position})"
    return f"{rule.name}: {kw} val: {rule.body} {arrow} {head}"


def render_spec(spec: Specification, include_sim: bool = True) -> str:
    out = render_sim(spec.sim) if include_sim else ""
    out += "".join(render_rule(r) + "\n" for r in spec.rules)
    out += "".join(render_rule(d) + "\n" for d in spec.constraints)
    return out


# -- workspaces ---------------------------------------------------------------


@dataclass
class Workspace:
    schema: Schema
    db: Database
    spec: Specification

    @property
    def sim(self) -> SimilarityOracle:
        return self.spec.sim


def parse_workspace(text: str) -> Workspace:
    return load_sources([text])


def load_sources(
    workspaces: Iterable[str] = (),
    schema: Iterable[str] = (),
    data: Iterable[str] = (),
    sim: Iterable[str] = (),
    spec: Iterable[str] = (),
) -> Workspace:
    """Build a workspace from combined files plus optional separate files.

    Relations are collected first, so declarations may appear anywhere.
    """
    buckets: Dict[str, List[Tuple[int, List[Token]]]] = {k: [] for k in ("relation", "fact", "sim", "rule")}
    allowed = {"relation": {"relation"}, "fact": {"fact"}, "sim": {"sim"}, "rule": {"rule", "sim"}}
    sources = [(t, None) for t in workspaces]
    sources += [(t, "relation") for t in schema] + [(t, "fact") for t in data]
    sources += [(t, "sim") for t in sim] + [(t, "rule") for t in spec]
    for text, only in sources:
        for n, toks in _lines(text):
            kind = _classify(toks, n)
            if kind not in buckets or (only is not None and kind not in allowed[only]):
                raise ParseError("E107", n, toks[0].col, f"unexpected {kind} line")
            buckets[kind].append((n, toks))
    rels: List[Relation] = []
    for n, toks in buckets["relation"]:
        rel, tok = _parse_relation(_Cursor(toks, n))
        if any(r.name == rel.name for r in rels):
            raise ParseError("E101", tok.line, tok.col, f"duplicate relation {rel.name}")
        rels.append(rel)
    sch = Schema(tuple(rels))
    db = _add_facts(sch, buckets["fact"])
    pairs: List[Tuple[str, str]] = []
    thresholds: List[float] = []
    for n, toks in buckets["sim"]:
        _parse_sim_line(_Cursor(toks, n), pairs, thresholds)
    specification = _collect_spec(buckets["rule"], sch, _oracle(pairs, thresholds))
    return Workspace(sch, db, specification)


def render_workspace(ws: Workspace) -> str:
    parts = [render_schema(ws.schema), render_database(ws.db), render_sim(ws.sim), render_spec(ws.spec, include_sim=False)]
    return "\n".join(p for p in parts if p)
