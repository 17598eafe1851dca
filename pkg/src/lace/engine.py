"""Solution semantics: rule applicability, hard closure, recognition,
(maximal) solution enumeration and the merge/answer reasoning problems."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, NamedTuple, Sequence, Tuple, Union

from .model import Cell, Constant, Database, DomainError, ExtendedDatabase, Partition, induce_extended_db, trivial_partitions
from .query import Query, QueryError, check_dc, check_rule_sat, eval_answers, eval_boolean, validate_query
from .rules import Specification

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    def __init__(self, explored: int, budget: int):
        super().__init__(f"search budget of {budget} states exceeded")
        self.explored = explored
        self.budget = budget


@dataclass
class SearchStats:
    """Counts states expanded by the search; shared across calls if reused."""

    explored: int = 0


class NoSolution(Exception):
    """Raised by the merge/answer problems when Sol(D, spec) is empty."""


class MergeAction(NamedTuple):
    """One rule firing: an object pair or a pair of cells, and the rule."""

    rule: str
    left: Union[Constant, Cell]
    right: Union[Constant, Cell]

    @property
    def is_object(self) -> bool:
        return isinstance(self.left, Constant)


@dataclass(frozen=True)
class SolutionState:
    e: Partition
    v: Partition

    @property
    def key(self):
        return (self.e.key(), self.v.key())

    def __eq__(self, other):
        return isinstance(other, SolutionState) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def contains(self, pair: Tuple) -> bool:
        a, b = pair
        part = self.e if isinstance(a, Constant) else self.v
        return part.same(a, b)

    def included_in(self, other: "SolutionState") -> bool:
        """E u V of this state is a subset of E u V of ``other``."""
        return self.e.refines(other.e) and self.v.refines(other.v)

    def copy(self) -> "SolutionState":
        return SolutionState(self.e.copy(), self.v.copy())

    def apply(self, action: MergeAction) -> bool:
        part = self.e if action.is_object else self.v
        return part.union(action.left, action.right)


def trivial_state(db: Database) -> SolutionState:
    return SolutionState(*trivial_partitions(db))


def _check_state(db: Database, e: Partition, v: Partition) -> None:
    if e.universe != frozenset(db.objects()):
        raise DomainError("object partition is not over Obj(D)")
    if v.universe != frozenset(db.cells()):
        raise DomainError("cell partition is not over Cells(D)")


def _firings(rule, xdb: ExtendedDatabase, spec: Specification) -> List[Tuple]:
    pairs = set()
    for a, b in eval_answers(rule.body, xdb, spec.sim):
        if rule.is_object:
            left, right = a, b
        else:
            left, right = Cell(a, rule.left_position), Cell(b, rule.right_position)
        if left == right:
            continue
        pairs.add((left, right) if left <= right else (right, left))
    return sorted(pairs)


def _applicable(db, spec, state: SolutionState, rules, xdb=None) -> List[MergeAction]:
    if xdb is None:
        xdb = induce_extended_db(db, state.e, state.v)
    out = []
    for rule in rules:
        part = state.e if rule.is_object else state.v
        for left, right in _firings(rule, xdb, spec):
            if not part.same(left, right):
                out.append(MergeAction(rule.name, left, right))
    return out


def applicable_merges(db: Database, spec: Specification, e: Partition, v: Partition) -> List[MergeAction]:
    """Rule firings over D_{E,V} not yet merged, by rule order then pair."""
    _check_state(db, e, v)
    return _applicable(db, spec, SolutionState(e, v), spec.rules)


def _hard_close_in_place(db: Database, spec: Specification, state: SolutionState) -> SolutionState:
    hard = spec.hard_rules
    while hard:
        actions = _applicable(db, spec, state, hard)
        if not actions:
            break
        for a in actions:
            state.apply(a)
    return state


def hard_close(db: Database, spec: Specification, e: Partition, v: Partition) -> SolutionState:
    """Least extension of (e, v) closed under hard-rule firings."""
    _check_state(db, e, v)
    return _hard_close_in_place(db, spec, SolutionState(e.copy(), v.copy()))


def _satisfies_constraints(db, spec, state: SolutionState, xdb=None) -> bool:
    if xdb is None:
        xdb = induce_extended_db(db, state.e, state.v)
    return all(check_dc(d, xdb, spec.sim) for d in spec.constraints)


def is_candidate(db: Database, spec: Specification, e: Partition, v: Partition) -> bool:
    """Replay: repeatedly apply firings that stay inside (e, v), each evaluated
    over the current intermediate state; (e, v) is a candidate iff the replay
    reaches it exactly."""
    _check_state(db, e, v)
    cur = trivial_state(db)
    target = SolutionState(e, v)
    while True:
        grew = False
        for a in _applicable(db, spec, cur, spec.rules):
            if target.contains((a.left, a.right)) and cur.apply(a):
                grew = True
        if not grew:
            break
    return cur == target


def rec_check(db: Database, spec: Specification, e: Partition, v: Partition) -> bool:
    """Rec: is (e, v) a solution?"""
    if not is_candidate(db, spec, e, v):
        return False
    xdb = induce_extended_db(db, e, v)
    if not all(check_rule_sat(r, xdb, e, v, spec.sim) for r in spec.hard_rules):
        return False
    return _satisfies_constraints(db, spec, SolutionState(e, v), xdb)


class _Search:
    """Depth-first search over hard-closed candidate states, branching on
    applicable soft firings. Every solution is reachable this way because
    answers only grow as partitions grow (inequality-free rule bodies)."""

    def __init__(self, db: Database, spec: Specification, budget: int = DEFAULT_BUDGET, stats: SearchStats = None):
        self.db = db
        self.spec = spec
        self.budget = budget
        self.stats = stats if stats is not None else SearchStats()
        self.explored = 0
        self._soft = spec.soft_rules
        self._monotone_dcs = [d for d in spec.constraints if not d.has_inequality]

    def _violates_monotone(self, xdb) -> bool:
        return any(not check_dc(d, xdb, self.spec.sim) for d in self._monotone_dcs)

    def states(self) -> Iterator[Tuple[SolutionState, bool]]:
        """Yield (state, is_solution) for every reachable hard-closed state,
        skipping subtrees below violations of inequality-free constraints
        (such violations persist under further merges)."""
        root = _hard_close_in_place(self.db, self.spec, trivial_state(self.db))
        seen = {root.key}
        stack = [root]
        while stack:
            state = stack.pop()
            self.explored += 1
            self.stats.explored += 1
            if self.explored > self.budget:
                raise BudgetExceeded(self.explored, self.budget)
            xdb = induce_extended_db(self.db, state.e, state.v)
            if self._violates_monotone(xdb):
                yield state, False
                continue
            yield state, _satisfies_constraints(self.db, self.spec, state, xdb)
            children = []
            for action in _applicable(self.db, self.spec, state, self._soft, xdb):
                child = state.copy()
                child.apply(action)
                _hard_close_in_place(self.db, self.spec, child)
                if child.key not in seen:
                    seen.add(child.key)
                    children.append(child)
            stack.extend(reversed(children))

    def solutions(self) -> Iterator[SolutionState]:
        for state, ok in self.states():
            if ok:
                yield state


def enumerate_solutions(db: Database, spec: Specification, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> List[SolutionState]:
    """All solutions, in canonical order."""
    return sorted(_Search(db, spec, budget, stats).solutions())


def maximal(states: Iterable[SolutionState]) -> List[SolutionState]:
    """The states whose E u V is not strictly contained in another's."""
    states = list(states)
    out = []
    for s in states:
        if not any(t != s and s.included_in(t) for t in states):
            out.append(s)
    return sorted(out)


def enumerate_max_solutions(db: Database, spec: Specification, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> List[SolutionState]:
    return maximal(enumerate_solutions(db, spec, budget, stats))


def existence(db: Database, spec: Specification, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """Existence: is there at least one solution?"""
    if spec.inequality_free:
        root = _hard_close_in_place(db, spec, trivial_state(db))
        return _satisfies_constraints(db, spec, root)
    for _ in _Search(db, spec, budget, stats).solutions():
        return True
    return False


def existence_by_search(db: Database, spec: Specification, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    for _ in _Search(db, spec, budget, stats).solutions():
        return True
    return False


def max_rec_check(db: Database, spec: Specification, e: Partition, v: Partition, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """MaxRec: is (e, v) a maximal solution?"""
    if not rec_check(db, spec, e, v):
        return False
    if spec.inequality_free:
        return _max_rec_minimal_extension(db, spec, SolutionState(e, v))
    return _max_rec_by_search(db, spec, SolutionState(e, v), budget, stats)


def _max_rec_minimal_extension(db, spec, state: SolutionState) -> bool:
    # each unapplied soft firing is tried once, hard-closed, and tested
    for action in _applicable(db, spec, state, spec.soft_rules):
        ext = state.copy()
        ext.apply(action)
        _hard_close_in_place(db, spec, ext)
        if _satisfies_constraints(db, spec, ext):
            return False
    return True


def _max_rec_by_search(db, spec, state: SolutionState, budget: int, stats: SearchStats = None) -> bool:
    for sol in _Search(db, spec, budget, stats).solutions():
        if sol != state and state.included_in(sol):
            return False
    return True


def max_rec_check_by_search(db, spec, e, v, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    if not rec_check(db, spec, e, v):
        return False
    return _max_rec_by_search(db, spec, SolutionState(e, v), budget, stats)


def _check_pair(db: Database, pair: Tuple) -> None:
    a, b = pair
    if isinstance(a, Constant) and isinstance(b, Constant):
        objs = set(db.objects())
        for o in (a, b):
            if o not in objs:
                raise DomainError(f"{o!r} is not an object of the database")
    elif isinstance(a, Cell) and isinstance(b, Cell):
        cells = set(db.cells())
        for c in (a, b):
            if c not in cells:
                raise DomainError(f"{c!r} is not a value cell of the database")
    else:
        raise DomainError("a candidate merge is a pair of objects or a pair of cells")


def poss_merge(db: Database, spec: Specification, pair: Tuple, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """PossMerge: does some (maximal) solution contain the pair?

    Any solution containing the pair extends to a maximal one, so the
    search stops at the first witness.
    """
    _check_pair(db, pair)
    found = False
    for sol in _Search(db, spec, budget, stats).solutions():
        found = True
        if sol.contains(pair):
            return True
    if not found:
        raise NoSolution("no solution exists")
    return False


def cert_merge(db: Database, spec: Specification, pair: Tuple, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """CertMerge: does every maximal solution contain the pair?"""
    _check_pair(db, pair)
    maxes = enumerate_max_solutions(db, spec, budget, stats)
    if not maxes:
        raise NoSolution("no solution exists")
    return all(s.contains(pair) for s in maxes)


def _answer_query(db: Database, q: Query, values: Sequence[Constant]) -> Query:
    validate_query(q, db.schema)
    if q.inequalities:
        raise QueryError("E217", "answer queries may not contain inequality atoms")
    if len(values) != q.arity:
        raise QueryError("E218", f"query has arity {q.arity}, tuple has {len(values)} constants")
    return q.substitute(values)


def _holds_in(db, spec, q: Query, state: SolutionState) -> bool:
    return eval_boolean(q, induce_extended_db(db, state.e, state.v), spec.sim)


def poss_ans(db: Database, spec: Specification, q: Query, values: Sequence[Constant], budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """PossAns: is the tuple an answer over some (maximal) solution?"""
    qc = _answer_query(db, q, values)
    found = False
    for sol in _Search(db, spec, budget, stats).solutions():
        found = True
        if _holds_in(db, spec, qc, sol):
            return True
    if not found:
        raise NoSolution("no solution exists")
    return False


def poss_ans_over_maximal(db, spec, q: Query, values, budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    qc = _answer_query(db, q, values)
    maxes = enumerate_max_solutions(db, spec, budget, stats)
    if not maxes:
        raise NoSolution("no solution exists")
    return any(_holds_in(db, spec, qc, s) for s in maxes)


def cert_ans(db: Database, spec: Specification, q: Query, values: Sequence[Constant], budget: int = DEFAULT_BUDGET, stats: SearchStats = None) -> bool:
    """CertAns: is the tuple an answer over every maximal solution?"""
    qc = _answer_query(db, q, values)
    maxes = enumerate_max_solutions(db, spec, budget, stats)
    if not maxes:
        raise NoSolution("no solution exists")
    return all(_holds_in(db, spec, qc, s) for s in maxes)
