"""Sweep M(n, alpha, beta): group order, circle generators and their verification."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from skewstc.invariants import circle_invariant_generators, verify_generators
from skewstc.series import format_product_form, molien_fixed_hilbert, recognize_product_form
from skewstc.structure import make_M_group


@dataclass
class Config:
    max_n: int = 3
    max_beta: int = 6
    max_degree: int = 10
    max_order: int = 2_000


def params(cfg: Config):
    for n in range(2, cfg.max_n + 1):
        for beta in range(2, cfg.max_beta + 1, 2):
            for alpha in range(1, beta + 1):
                if beta % alpha == 0:
                    yield n, alpha, beta


def main(cfg: Config) -> None:
    # "ok" and the product form only cover degrees up to max_degree
    print(f"{'group':<12} {'|G|':>5} {'Hilbert series':<28} {'ok':<4} generators  (checked to degree {cfg.max_degree})")
    for n, alpha, beta in params(cfg):
        t0 = time.perf_counter()
        try:
            G = make_M_group(n, alpha, beta, cap=cfg.max_order)
        except Exception as exc:  # group too large for this sweep
            print(f"M({n},{alpha},{beta})  skipped: {exc}")
            continue
        gens = circle_invariant_generators(n, alpha, beta, cfg.max_degree, G=G)
        ver = verify_generators(G.ring, G, gens.generators, cfg.max_degree)
        degs = recognize_product_form(molien_fixed_hilbert(G.ring, G, cfg.max_degree), n=n)
        form = format_product_form(degs) if degs else "-"
        names = ", ".join(str(f) for f in gens.generators)
        dt = time.perf_counter() - t0
        print(f"M({n},{alpha},{beta})".ljust(12), f"{len(G):>5}", f"{form:<28}",
              f"{'yes' if ver.ok else 'NO':<4}", names, f"({dt:.1f}s)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    ap.add_argument("--max-beta", type=int, default=Config.max_beta)
    ap.add_argument("--max-degree", type=int, default=Config.max_degree)
    ap.add_argument("--max-order", type=int, default=Config.max_order)
    a = ap.parse_args()
    main(Config(a.max_n, a.max_beta, a.max_degree, a.max_order))
