"""Rewrite tests/golden/*.txt from the bundled fixtures (inspect the diff before committing)."""
from __future__ import annotations

import contextlib
import io
import sys
from pathlib import Path

from skewstc.cli import main

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "skewstc" / "fixtures"
GOLDEN = ROOT / "tests" / "golden"

CASES = {
    "circle_m312": [],
    "dicyclic_m2": [],
    "compare_orders_n4": [],
    "quantum_matrix_q3_m3": [],
    "negative_minus_identity": [],
    "abelian_theta_pair": [],
    "mixed_block_circle": [],
}


def run(name: str, extra: list) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([str(FIXTURES / f"{name}.json"), *extra])
    if code:
        sys.exit(f"{name}: exit code {code}")
    return buf.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, extra in CASES.items():
        (GOLDEN / f"{name}.txt").write_text(run(name, extra))
        print("wrote", name)
