"""Print the coefficient tables behind the commutator identities.

Product rule D_i, power-rule weights E_w, and the binomial table for
expanding e x^n. Every table is recomputed and re-verified symbolically.

    python scripts/coefficient_tables.py --kmax 6 --rmax 3 --smax 3
"""

import argparse
from dataclasses import dataclass

from diffpoly.commcalc import expand_lemma6, expand_lemma7, lemma9_expand


@dataclass
class TableConfig:
    kmax: int = 6
    rmax: int = 3
    smax: int = 3
    nmax: int = 3


def main(cfg: TableConfig):
    print("product rule: [ab,c]_k = sum_i D_i [a,c]_i [b,c]_(k-i)")
    for k in range(cfg.kmax + 1):
        cert = expand_lemma6(k)
        row = " ".join(f"{cert.coefficients[i]:>3}" for i in range(k + 1))
        print(f"  k={k}: {row}   verified={cert.verified} unique={cert.extra['unique']}")

    print("\npower rule: [a^r,b]_s = sum_w E_w [a,b]_w1 ... [a,b]_wr")
    for r in range(1, cfg.rmax + 1):
        for s in range(cfg.smax + 1):
            cert = expand_lemma7(r, s)
            body = ", ".join(f"{w}:{e}" for w, e in cert.coefficients.items())
            print(f"  r={r} s={s}: {body}   verified={cert.verified}")

    print("\nidempotent expansion: e x^n = sum_i C(n,i) x^i [e,x]_(n-i)")
    for n in range(cfg.nmax + 1):
        cert = lemma9_expand((n,))
        body = " ".join(f"{cert.coefficients[(i,)]}" for i in range(n + 1))
        print(f"  n={n}: {body}   verified={cert.verified}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in TableConfig.__dataclass_fields__:
        ap.add_argument(f"--{f}", type=int, default=getattr(TableConfig, f))
    main(TableConfig(**vars(ap.parse_args())))
