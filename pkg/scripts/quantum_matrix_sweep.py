"""Dihedral groups <g_1, g_b> on O_q(M_2): orders, invariant generators and n-th power relations."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from math import lcm

from skewstc.algebra import quantum_matrix
from skewstc.autgroup import close_group, g_b, root
from skewstc.cyclotomic import embed_root
from skewstc.invariants import mine_generators, quantum_power_relations, verify_generators


@dataclass
class Config:
    q_orders: list = field(default_factory=lambda: [3, 4, 5])
    ms: list = field(default_factory=lambda: [2, 3, 4])
    extra_degree: int = 4


def main(cfg: Config) -> None:
    for qo in cfg.q_orders:
        rel = quantum_power_relations(qo)
        good = sum(rel["relations"].values())
        print(f"q of order {qo}: n = {rel['n']}, q^(n^2) = {rel['q_n2']}, {good}/6 power relations hold")
        for m in cfg.ms:
            order = lcm(qo, m, 4)
            A = quantum_matrix(embed_root(qo, 1), order=order)
            b = root(A, m)
            G = close_group([g_b(A, 1), g_b(A, b)])
            x11, x12, x21, x22 = A.gens()
            D = m + cfg.extra_degree
            ver = verify_generators(A, G, [x11, x22, x12 * x21, x12 ** m + (x21 ** m).scale(b ** m)], D)
            mined = mine_generators(A, G, D)
            print(f"  m = {m}: |G| = {len(G)}, given set verified to {D}: {'yes' if ver.ok else 'no'}, "
                  f"redundant {[str(ver.generators[i]) for i in ver.redundant]}, mined degrees {mined.degrees}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-orders", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--ms", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--extra-degree", type=int, default=Config.extra_degree)
    a = ap.parse_args()
    main(Config(a.q_orders, a.ms, a.extra_degree))
