"""Run every bundled problem file with its default commands and print the text reports."""
from __future__ import annotations

import argparse
import contextlib
import io
import time
from dataclasses import dataclass
from pathlib import Path

from skewstc.cli import main

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "skewstc" / "fixtures"


@dataclass
class Config:
    pattern: str = "*.json"
    max_degree: int | None = None


def run(cfg: Config) -> int:
    worst = 0
    for path in sorted(FIXTURES.glob(cfg.pattern)):
        argv = [str(path)]
        if cfg.max_degree is not None:
            argv += ["--max-degree", str(cfg.max_degree)]
        out, err = io.StringIO(), io.StringIO()
        t0 = time.perf_counter()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(argv)
        dt = time.perf_counter() - t0
        print(f"=== {path.stem}  (exit {code}, {dt:.2f}s)")
        print(out.getvalue().rstrip() or err.getvalue().rstrip())
        print()
        # negative fixtures are expected to exit 1
        if code == 2 or (code == 1 and not path.stem.startswith("negative_")):
            worst = max(worst, code)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pattern", default=Config.pattern)
    ap.add_argument("--max-degree", type=int, default=None)
    a = ap.parse_args()
    raise SystemExit(run(Config(a.pattern, a.max_degree)))
