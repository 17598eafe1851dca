"""Run an external clingo-compatible solver on an emitted program.

The solver command comes from ``LACE_ASP_SOLVER`` (for example
``clingo`` or ``python3 -m clingo``); helpers here are used only when it is set.
"""

import json
import os
import re
import shlex
import subprocess
from pathlib import Path

from lace.asp import decode_model

SOLVER = os.environ.get("LACE_ASP_SOLVER")


def stable_models(text: str, workdir: Path):
    """All stable models of ``text`` as lists of atoms."""
    path = workdir / "program.lp"
    path.write_text(text, encoding="utf-8")
    cmd = shlex.split(SOLVER) + ["--outf=2", "0", str(path)]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    report = json.loads(proc.stdout)
    if report["Result"] == "UNSATISFIABLE":
        return []
    return [w["Value"] for call in report["Call"] for w in call.get("Witnesses", [])]


def decoded_models(text: str, db, workdir: Path) -> set:
    """Stable models decoded into ``(E.key(), V.key())`` pairs."""
    out = set()
    for atoms in stable_models(text, workdir):
        e, v = decode_model([a for a in atoms if re.match(r"eq[ov]\(", a)], db)
        out.add((e.key(), v.key()))
    return out
