#!/usr/bin/env python3
"""Generate the committed hunter fixture logs in data/hunter_logs/.

The fixture set models a 16-run parameter sweep on a 32-thread workstation:
16 runs, 6638 accepted candidates in total (average 414.875 per run), and
elapsed times with min/max/avg of 20.001 / 120.006 / 61.253 seconds. The
per-candidate security and failure values are synthetic (deterministic
formulas in q chosen so that exactly the intended candidates pass the
320-bit / -150 thresholds); they exist so the summarizer and log parser can
be exercised without the external estimation tool.

Rerunning this script reproduces the committed files byte for byte.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from kyfrog.hunter import (CandidateRecord, HunterRunLog, HuntConfig,
                           STATUS_SKIPPED, write_run_log)
from kyfrog.params import is_prime

CPU = "AMD Ryzen 9 5950X 16-Core Processor"
THREADS = 32

# (q_lo, q_hi, accepted_count, elapsed_seconds)
RUNS = [
    (77000, 77999, 0, "20.001"),
    (1, 1500, 0, "21.352"),
    (1, 15000, 8, "89.742"),
    (1, 20000, 2113, "118.430"),
    (1000, 20999, 2192, "120.006"),
    (2000, 4999, 312, "31.207"),
    (5000, 7999, 296, "42.118"),
    (8000, 10999, 256, "55.893"),
    (11000, 13999, 243, "60.004"),
    (14000, 16999, 208, "64.358"),
    (17000, 19999, 204, "71.446"),
    (20000, 22999, 187, "48.773"),
    (23000, 25999, 186, "66.201"),
    (26000, 28999, 178, "58.915"),
    (29000, 31999, 154, "73.332"),
    (32000, 34999, 101, "38.270"),
]

SIGMA = 1.4


def synth_record(q: int, accept: bool) -> CandidateRecord:
    alpha = SIGMA / q
    if accept:
        classical = 321.0 + (q * 37 % 1000) / 250.0          # [321, 325)
        quantum = classical - 0.6
        log10_fail = -151.0 - (q * 11 % 500) / 100.0          # [-156, -151]
    else:
        classical = 290.0 + (q * 13 % 500) / 25.0             # [290, 310) < 320
        quantum = classical - 0.6
        log10_fail = -149.0 + (q * 7 % 100) / 100.0           # > -150
    return CandidateRecord(q=q, alpha=alpha, classical_bits=classical,
                           quantum_bits=quantum, log10_fail_per_ct=log10_fail,
                           accepted=accept)


def build_run(q_lo: int, q_hi: int, count: int, elapsed: str) -> HunterRunLog:
    primes = [q for q in range(q_lo, q_hi + 1) if is_prime(q)]
    if count > len(primes):
        raise SystemExit(f"range [{q_lo},{q_hi}] has only {len(primes)} primes, need {count}")
    # spread the accepted candidates evenly across the range
    chosen = {primes[i * len(primes) // count] for i in range(count)} if count else set()
    assert len(chosen) == count
    records = []
    for q in range(q_lo, q_hi + 1):
        if not is_prime(q):
            records.append(CandidateRecord(q=q, alpha=SIGMA / q, classical_bits=None,
                                           quantum_bits=None, log10_fail_per_ct=None,
                                           accepted=False, status=STATUS_SKIPPED))
        else:
            records.append(synth_record(q, q in chosen))
    cfg = HuntConfig(q_lo=q_lo, q_hi=q_hi, threads=THREADS, oracle="fixture:external")
    from decimal import Decimal
    return HunterRunLog(cpu_model=CPU, threads=THREADS, q_lo=q_lo, q_hi=q_hi,
                        elapsed_seconds=Decimal(elapsed), candidate_count=count,
                        config=cfg, records=tuple(records))


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "data" / "hunter_logs"
    out_dir.mkdir(parents=True, exist_ok=True)
    total = 0
    for i, (q_lo, q_hi, count, elapsed) in enumerate(RUNS, start=1):
        log = build_run(q_lo, q_hi, count, elapsed)
        path = out_dir / f"run{i:02d}.log"
        write_run_log(log, path)
        total += count
        print(f"{path.name}: [{q_lo}, {q_hi}] candidates={count} elapsed={elapsed}s")
    print(f"total runs={len(RUNS)} candidates={total}")


if __name__ == "__main__":
    main()
