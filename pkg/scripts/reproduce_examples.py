"""Worked examples: the two-row matrix (perm-vectors, degree-M vectors,
minimum pseudo-weight) and the quasi-cyclic 9x12 matrix (block-ring and
scalar permanent vectors, cone checks, scaled vectors)."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from betheperm.harness import MOTIVATION_WEIGHT_PRINTED, QC_CODEWORD, QC_EXPONENTS, QC_PROTO, block_column_vectors
from betheperm.matrix import expand_exponents, gf2_syndrome
from betheperm.pseudo import (
    awgnc_pseudo_weight,
    bethe_perm_vector,
    bethe_perm_vector_M,
    in_fundamental_cone,
    min_pseudo_weight_bound,
    perm_vector,
    root_M_scale,
)


@dataclass(frozen=True)
class ExamplesConfig:
    M_max: int = 4


def two_row(cfg: ExamplesConfig) -> None:
    H = np.array([[1, 1, 1, 0], [0, 1, 1, 1]])
    print("two-row matrix")
    for beta in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]:
        w = perm_vector(H, beta)
        print(f"  perm-vector beta={beta}: {tuple(int(x) for x in w.values)}  cone={in_fundamental_cone(H, w).member}")
    print(f"  min pseudo-weight (perm): {min_pseudo_weight_bound(H)[0]}")
    for M in range(1, cfg.M_max + 1):
        w = bethe_perm_vector_M(H, (1, 2, 3), M)
        print(f"  degree-{M} vector beta=(1,2,3): {tuple(round(float(x), 6) for x in w.values)}  powers {tuple(str(x) for x in w.powers)}")
    w = bethe_perm_vector(H, (1, 2, 3))
    print(f"  limit vector beta=(1,2,3): {tuple(round(x, 6) for x in w.values)}")
    print(f"  min pseudo-weight (limit): {min_pseudo_weight_bound(H, 'bethe_limit')[0]:.6f}")


def quasi_cyclic() -> None:
    H = expand_exponents(QC_EXPONENTS)
    print("quasi-cyclic 9x12 matrix")
    print(f"  syndrome of {QC_CODEWORD}: {gf2_syndrome(H, QC_CODEWORD).tolist()}")
    w, wt, D = block_column_vectors(QC_EXPONENTS)
    print(f"  block-ring permanent without block column 1:\n{np.array(D[0]).astype(int)}")
    print(f"  w (block-ring route):  {w}  cone={in_fundamental_cone(QC_PROTO, w).member}")
    print(f"  w (scalar route):      {wt}  cone={in_fundamental_cone(QC_PROTO, wt).member}")
    for vec in (w, wt):
        r = root_M_scale(vec, 3)
        print(f"  cube root of {vec}: {tuple(round(x, 6) for x in r.values)}  cone={in_fundamental_cone(QC_PROTO, r).member}  "
              f"weight {awgnc_pseudo_weight(r):.4f}")
    print(f"  weight (3,1,1,1) = {awgnc_pseudo_weight((3, 1, 1, 1))}")
    alt = awgnc_pseudo_weight((2 * 3 ** (1 / 3), 1.0, 1.0, 1.0))
    print(f"  weight (2*3^(1/3),1,1,1) = {alt:.4f} (reference figure {MOTIVATION_WEIGHT_PRINTED})")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--M-max", dest="M_max", type=int, default=ExamplesConfig.M_max)
    cfg = ExamplesConfig(**vars(p.parse_args()))
    two_row(cfg)
    quasi_cyclic()


if __name__ == "__main__":
    main()
