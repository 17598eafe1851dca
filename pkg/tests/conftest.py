import sys
from pathlib import Path

import pytest

from lace.model import Cell, Partition, obj, tid
from lace.syntax import parse_workspace

TESTS = Path(__file__).parent
ROOT = TESTS.parent
WORKSPACES = ROOT / "workspaces"
GOLDEN = TESTS / "golden"

sys.path.insert(0, str(TESTS))


def cell(t: str, i: int) -> Cell:
    return Cell(tid(t), i)


def partition_with(universe, *classes) -> Partition:
    p = Partition(universe)
    for cls in classes:
        first, *rest = cls
        for x in rest:
            p.union(first, x)
    return p


def objects(*names):
    return [obj(n) for n in names]


@pytest.fixture(scope="session")
def fig1():
    return parse_workspace((WORKSPACES / "fig1.lace").read_text(encoding="utf-8"))
