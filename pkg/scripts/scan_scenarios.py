"""Exhaustive bounded-degree idempotent scans over every valid bundled scenario.

For each scenario: audit, scan up to the degree bound (skipping ones whose
candidate count exceeds the limit), then run the filtration check on each
idempotent found. Expected outcome everywhere: only e = 0.

    python scripts/scan_scenarios.py --degree 1 --limit 600000
"""

import argparse
import time
from dataclasses import dataclass

from diffpoly.algebra import SearchTooLargeError
from diffpoly.radical import lemma13_check, truncated_idempotent_scan
from diffpoly.specfiles import load_scenario

SCENARIOS = ["n2_zero", "n3_inner", "n3_zero2", "n3_tower2", "n3z3_tower2", "n3z3_grading"]


@dataclass
class ScanConfig:
    degree: int = 1
    limit: int = 2**20


def main(cfg: ScanConfig):
    for name in SCENARIOS:
        inst = load_scenario(f"bundled:{name}")
        t0 = time.perf_counter()
        try:
            rep = truncated_idempotent_scan(inst, cfg.degree, cfg.limit)
        except SearchTooLargeError as exc:
            print(f"{name:14s} skipped: {exc}")
            continue
        verdicts = {lemma13_check(inst.with_element(e, [cfg.degree] * inst.tower.n)).status for e in rep.idempotents}
        print(
            f"{name:14s} audit={'ok' if inst.valid else 'FAIL'} candidates={rep.candidates:>8} "
            f"idempotents={[str(e) for e in rep.idempotents]} lemma13={sorted(verdicts)} "
            f"{time.perf_counter() - t0:.1f}s"
        )


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=ScanConfig.degree)
    ap.add_argument("--limit", type=int, default=ScanConfig.limit)
    main(ScanConfig(**vars(ap.parse_args())))
