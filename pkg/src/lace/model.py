"""Schemas, TID-annotated databases, partitions and induced extended databases."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple


class DomainError(ValueError):
    """An element or partition does not belong to the expected universe."""


class Kind(enum.IntEnum):
    OBJ = 0
    VAL = 1
    TID = 2

    def __str__(self) -> str:
        return self.name.lower()


class Constant(NamedTuple):
    """A constant from one of three disjoint namespaces (objects, values, tids)."""

    kind: Kind
    lexeme: str

    def __str__(self) -> str:
        if self.kind is Kind.VAL:
            return quote(self.lexeme)
        return self.lexeme

    def __repr__(self) -> str:
        return f"{self.kind.name.lower()}:{self.lexeme}"


def obj(lexeme: str) -> Constant:
    return Constant(Kind.OBJ, lexeme)


def val(lexeme: str) -> Constant:
    return Constant(Kind.VAL, lexeme)


def tid(lexeme: str) -> Constant:
    return Constant(Kind.TID, lexeme)


def quote(text: str) -> str:
    for raw, esc in (("\\", "\\\\"), ('"', '\\"'), ("\n", "\\n"), ("\r", "\\r"), ("\t", "\\t")):
        text = text.replace(raw, esc)
    return '"' + text + '"'


class Cell(NamedTuple):
    """A value cell: position ``position`` (>= 1) of the fact with tid ``tid``."""

    tid: Constant
    position: int

    def __str__(self) -> str:
        return f"{self.tid.lexeme}.{self.position}"

    def __repr__(self) -> str:
        return f"<{self.tid.lexeme},{self.position}>"


@dataclass(frozen=True)
class Relation:
    name: str
    types: Tuple[Kind, ...]
    attributes: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.types:
            raise ValueError(f"relation {self.name} must have arity >= 1")
        if any(k not in (Kind.OBJ, Kind.VAL) for k in self.types):
            raise ValueError(f"relation {self.name}: positions are typed obj or val")
        if self.attributes and len(self.attributes) != len(self.types):
            raise ValueError(f"relation {self.name}: attribute names do not match arity")

    @property
    def arity(self) -> int:
        return len(self.types)

    def type_at(self, position: int) -> Kind:
        """Type of 1-based ``position``; position 0 is the tid."""
        if position == 0:
            return Kind.TID
        if not 1 <= position <= self.arity:
            raise IndexError(f"{self.name} has no position {position}")
        return self.types[position - 1]

    def value_positions(self) -> List[int]:
        return [i for i, k in enumerate(self.types, 1) if k is Kind.VAL]

    def object_positions(self) -> List[int]:
        return [i for i, k in enumerate(self.types, 1) if k is Kind.OBJ]


@dataclass(frozen=True)
class Schema:
    relations: Tuple[Relation, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation name in schema")

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.relations)

    def __getitem__(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def get(self, name: str) -> Optional[Relation]:
        for r in self.relations:
            if r.name == name:
                return r
        return None


@dataclass(frozen=True)
class Fact:
    tid: Constant
    relation: str
    args: Tuple[Constant, ...]

    def __getitem__(self, position: int) -> Constant:
        """``fact[0]`` is the tid, ``fact[i]`` the i-th argument."""
        return self.tid if position == 0 else self.args[position - 1]

    def __str__(self) -> str:
        return f"{self.tid.lexeme}: {self.relation}({', '.join(str(a) for a in self.args)})"


class Database:
    """A finite set of facts; each tid identifies exactly one fact.

    Facts keep their insertion order so that everything derived from a
    database (renderings, ASP programs) is deterministic.
    """

    def __init__(self, schema: Schema, facts: Iterable[Fact] = ()):
        self.schema = schema
        self._facts: Tuple[Fact, ...] = ()
        self._by_tid: Dict[Constant, Fact] = {}
        for f in facts:
            self._add(f)
        self._cells: Optional[Tuple[Cell, ...]] = None
        self._objects: Optional[Tuple[Constant, ...]] = None

    def _add(self, f: Fact) -> None:
        rel = self.schema.get(f.relation)
        if rel is None:
            raise ValueError(f"unknown relation {f.relation}")
        if f.tid.kind is not Kind.TID:
            raise ValueError(f"{f.tid!r} is not a tid")
        if len(f.args) != rel.arity:
            raise ValueError(f"{f.relation} expects {rel.arity} arguments, got {len(f.args)}")
        for i, (c, k) in enumerate(zip(f.args, rel.types), 1):
            if c.kind is not k:
                raise ValueError(f"{f.tid.lexeme}: position {i} of {f.relation} expects {k}, got {c!r}")
        if f.tid in self._by_tid:
            raise ValueError(f"tid {f.tid.lexeme} occurs in more than one fact")
        self._by_tid[f.tid] = f
        self._facts += (f,)

    @property
    def facts(self) -> Tuple[Fact, ...]:
        return self._facts

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self._facts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Database)
            and self.schema == other.schema
            and set(self._facts) == set(other._facts)
        )

    def __hash__(self):
        return hash(frozenset(self._facts))

    def fact(self, t: Constant) -> Fact:
        return self._by_tid[t]

    def has_tid(self, t: Constant) -> bool:
        return t in self._by_tid

    def value_at(self, cell: Cell) -> Constant:
        return self._by_tid[cell.tid][cell.position]

    def cells(self) -> Tuple[Cell, ...]:
        if self._cells is None:
            out = []
            for f in self._facts:
                rel = self.schema[f.relation]
                out.extend(Cell(f.tid, i) for i in rel.value_positions())
            self._cells = tuple(out)
        return self._cells

    def objects(self) -> Tuple[Constant, ...]:
        if self._objects is None:
            seen: Dict[Constant, None] = {}
            for f in self._facts:
                for c in f.args:
                    if c.kind is Kind.OBJ:
                        seen.setdefault(c)
            self._objects = tuple(seen)
        return self._objects

    def domain(self) -> FrozenSet[Constant]:
        out = set()
        for f in self._facts:
            out.add(f.tid)
            out.update(f.args)
        return frozenset(out)


def cells_of(db: Database) -> FrozenSet[Cell]:
    return frozenset(db.cells())


def obj_of(db: Database) -> FrozenSet[Constant]:
    return frozenset(db.objects())


def dom_of(db: Database) -> FrozenSet[Constant]:
    return db.domain()


class Partition:
    """Equivalence relation over an explicit finite universe (union-find).

    Reflexivity is implicit: every universe element starts in its own
    class. ``copy`` gives an independent partition for branching search.
    """

    __slots__ = ("_parent", "_universe")

    def __init__(self, universe: Iterable[Hashable]):
        self._parent: Dict[Hashable, Hashable] = {x: x for x in universe}
        self._universe = frozenset(self._parent)

    @property
    def universe(self) -> FrozenSet[Hashable]:
        return self._universe

    def copy(self) -> "Partition":
        p = Partition.__new__(Partition)
        p._parent = dict(self._parent)
        p._universe = self._universe
        return p

    def _check(self, x) -> None:
        if x not in self._parent:
            raise DomainError(f"{x!r} is not in the partition's universe")

    def find(self, x):
        self._check(x)
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        """Merge the classes of ``a`` and ``b``; return False if already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return True

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def class_of(self, x) -> FrozenSet:
        r = self.find(x)
        return frozenset(y for y in self._parent if self.find(y) == r)

    def classes(self) -> List[Tuple]:
        """All classes as sorted tuples, ordered by smallest member."""
        groups: Dict[Hashable, list] = {}
        for x in self._parent:
            groups.setdefault(self.find(x), []).append(x)
        return sorted(tuple(sorted(g)) for g in groups.values())

    def nontrivial_classes(self) -> List[Tuple]:
        return [c for c in self.classes() if len(c) > 1]

    def key(self) -> Tuple[Tuple, ...]:
        return tuple(self.nontrivial_classes())

    def pairs(self) -> FrozenSet[Tuple]:
        """The relation as a set of ordered pairs, reflexive ones included."""
        out = set()
        for c in self.classes():
            out.update((a, b) for a in c for b in c)
        return frozenset(out)

    def refines(self, other: "Partition") -> bool:
        """True iff this relation is a subset of ``other`` (as pair sets)."""
        if self._universe != other._universe:
            raise DomainError("partitions over different universes")
        return all(other.same(x, self.find(x)) for x in self._parent)

    def is_trivial(self) -> bool:
        return all(self._parent[x] == x for x in self._parent)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self._universe == other._universe and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Partition({self.nontrivial_classes()!r})"


ObjectPartition = Partition
CellPartition = Partition


def eqrel_close(pairs: Iterable[Tuple[Hashable, Hashable]], universe: Iterable[Hashable]) -> Partition:
    """Smallest equivalence relation over ``universe`` containing ``pairs``."""
    p = Partition(universe)
    for a, b in pairs:
        if a not in p.universe or b not in p.universe:
            bad = a if a not in p.universe else b
            raise DomainError(f"{bad!r} is not in the universe")
        p.union(a, b)
    return p


def trivial_partitions(db: Database) -> Tuple[Partition, Partition]:
    return Partition(db.objects()), Partition(db.cells())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_similarity(a: str, b: str) -> float:
    """1 - levenshtein(a, b) / max(len); 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class SimilarityOracle:
    """The similarity predicate ``~``: an explicit pair table plus an optional
    edit-similarity threshold. Reflexive and symmetric by construction."""

    pairs: FrozenSet[FrozenSet[str]] = frozenset()
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.threshold is not None and not 0.0 <= self.threshold <= 1.0:
            raise ValueError("similarity threshold must lie in [0, 1]")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]], threshold: Optional[float] = None) -> "SimilarityOracle":
        # reflexive pairs are implicit and not stored
        return cls(frozenset(frozenset((_lex(a), _lex(b))) for a, b in pairs if _lex(a) != _lex(b)), threshold)

    def similar(self, a, b) -> bool:
        a, b = _lex(a), _lex(b)
        if a == b:
            return True
        if frozenset((a, b)) in self.pairs:
            return True
        return self.threshold is not None and edit_similarity(a, b) >= self.threshold

    def declared_pairs(self) -> List[Tuple[str, str]]:
        return sorted(tuple(sorted(p)) for p in self.pairs if len(p) == 2)


def _lex(c) -> str:
    return c.lexeme if isinstance(c, Constant) else c


def sim(oracle: SimilarityOracle, a, b) -> bool:
    return oracle.similar(a, b)


class ExtendedFact(NamedTuple):
    relation: str
    args: Tuple[FrozenSet[Constant], ...]  # args[0] is {tid}

    @property
    def tid(self) -> Constant:
        return next(iter(self.args[0]))


@dataclass
class ExtendedDatabase:
    """The database induced by ``D``, ``E`` and ``V``: arguments are sets."""

    db: Database
    facts: Tuple[ExtendedFact, ...]
    by_relation: Mapping[str, Tuple[ExtendedFact, ...]] = field(default_factory=dict)

    def fact(self, t: Constant) -> ExtendedFact:
        for f in self.facts:
            if t in f.args[0]:
                return f
        raise KeyError(t)


def induce_extended_db(db: Database, e: Partition, v: Partition) -> ExtendedDatabase:
    if e.universe != frozenset(db.objects()):
        raise DomainError("object partition is not over Obj(D)")
    if v.universe != frozenset(db.cells()):
        raise DomainError("cell partition is not over Cells(D)")
    obj_sets: Dict[Constant, FrozenSet[Constant]] = {}
    for cls in e.classes():
        s = frozenset(cls)
        for o in cls:
            obj_sets[o] = s
    cell_sets: Dict[Cell, FrozenSet[Constant]] = {}
    for cls in v.classes():
        s = frozenset(db.value_at(c) for c in cls)
        for c in cls:
            cell_sets[c] = s
    out = []
    by_rel: Dict[str, list] = {}
    for f in db:
        args = [frozenset((f.tid,))]
        for i, c in enumerate(f.args, 1):
            if c.kind is Kind.OBJ:
                args.append(obj_sets[c])
            else:
                args.append(cell_sets[Cell(f.tid, i)])
        xf = ExtendedFact(f.relation, tuple(args))
        out.append(xf)
        by_rel.setdefault(f.relation, []).append(xf)
    return ExtendedDatabase(db, tuple(out), {k: tuple(vs) for k, vs in by_rel.items()})
