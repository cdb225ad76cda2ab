"""Element-order tables for M(n,1,2) against G(2,2,n)."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from skewstc.algebra import skew
from skewstc.autgroup import classical_family, close_group, compare_order_distributions
from skewstc.structure import make_M_group


@dataclass
class Config:
    ns: list = field(default_factory=lambda: [2, 3, 4])
    cap: int = 20_000


def table(n: int, cap: int) -> dict:
    M = make_M_group(n, 1, 2, cap=cap)
    A = skew(n, 1, order=4)
    G = close_group(classical_family(A, 2, 2), cap=cap, ring=A)
    return compare_order_distributions(M, G)


def main(cfg: Config) -> None:
    for n in cfg.ns:
        cmp = table(n, cfg.cap)
        a, b = cmp["distribution_a"], cmp["distribution_b"]
        verdict = ("identical" if cmp["same_distribution"]
                   else f"first differing order {cmp['first_differing_order']}")
        print(f"n = {n}: |M| = {cmp['orders'][0]}, |G| = {cmp['orders'][1]}, {verdict}")
        print(f"  {'order':>5} {'M(n,1,2)':>9} {'G(2,2,n)':>9}")
        for o in a:
            mark = "" if a[o] == b[o] else "  *"
            print(f"  {o:>5} {a[o]:>9} {b[o]:>9}{mark}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("ns", nargs="*", type=int, default=[2, 3, 4])
    ap.add_argument("--cap", type=int, default=Config.cap)
    a = ap.parse_args()
    main(Config(a.ns, a.cap))
