"""Exhaustive reference enumeration of solutions, used as a test oracle.

Deliberately naive: every single-merge derivation step is explored from the
trivial state, with no hard-closure shortcut and no pruning beyond skipping
already-visited states. Only model and query primitives are used.
"""

from __future__ import annotations

from collections import deque
from typing import List, Optional

from .model import Cell, Database, Partition, induce_extended_db, trivial_partitions
from .query import check_dc, check_rule_sat, eval_answers
from .rules import Specification


class GuardError(ValueError):
    """The instance is too large for exhaustive enumeration."""


def _key(e: Partition, v: Partition):
    return (e.key(), v.key())


def _successors(db: Database, spec: Specification, e: Partition, v: Partition):
    xdb = induce_extended_db(db, e, v)
    for rule in spec.rules:
        for a, b in eval_answers(rule.body, xdb, spec.sim):
            if rule.is_object:
                if e.same(a, b):
                    continue
                e2 = e.copy()
                e2.union(a, b)
                yield e2, v
            else:
                c, d = Cell(a, rule.left_position), Cell(b, rule.right_position)
                if v.same(c, d):
                    continue
                v2 = v.copy()
                v2.union(c, d)
                yield e, v2


def brute_force_solutions(
    db: Database, spec: Specification, max_objects: int = 6, max_cells: int = 8
) -> List[tuple]:
    """All solutions as sorted ``(E, V)`` pairs.

    The default guard keeps the search small; callers may raise it for
    instances known to have few reachable states.
    """
    n_obj, n_cells = len(db.objects()), len(db.cells())
    if n_obj > max_objects or n_cells > max_cells:
        raise GuardError(
            f"instance has {n_obj} objects and {n_cells} cells; limit is {max_objects} and {max_cells}"
        )
    e0, v0 = trivial_partitions(db)
    seen = {_key(e0, v0)}
    queue = deque([(e0, v0)])
    candidates = [(e0, v0)]
    while queue:
        e, v = queue.popleft()
        for e2, v2 in _successors(db, spec, e, v):
            k = _key(e2, v2)
            if k not in seen:
                seen.add(k)
                queue.append((e2, v2))
                candidates.append((e2, v2))
    out = []
    for e, v in candidates:
        xdb = induce_extended_db(db, e, v)
        if not all(check_rule_sat(r, xdb, e, v, spec.sim) for r in spec.hard_rules):
            continue
        if not all(check_dc(d, xdb, spec.sim) for d in spec.constraints):
            continue
        out.append((e, v))
    return sorted(out, key=lambda p: _key(*p))


def oracle_maxima(solutions) -> List[tuple]:
    """The E u V-maximal pairs among ``solutions``."""
    sols = list(solutions)
    return [
        (e, v)
        for e, v in sols
        if not any((e, v) != (e2, v2) and e.refines(e2) and v.refines(v2) for e2, v2 in sols)
    ]
