"""Parallel parameter-space search over moduli q, structured run logging, and
log summarization.

Every integer q in the configured range appears exactly once in a run's
records: primes are evaluated through the failure filter and the selected
security oracle, composites are recorded as skipped. Evaluation is pure, so
the record list (everything except elapsed time and host metadata) is a pure
function of the configuration regardless of thread count.
"""

from __future__ import annotations

import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .estimator import (SOURCE_FIXTURE, SecurityEstimate, estimate_builtin,
                        estimate_external, fingerprint_matches, load_records)
from .failure import FAILURE_MODELS, failure_log10
from .params import ParameterSet, is_prime

__all__ = [
    "HuntConfig",
    "CandidateRecord",
    "HunterRunLog",
    "RunSummary",
    "hunt",
    "fixture_oracle",
    "run_log_text",
    "write_run_log",
    "read_run_log",
    "summarize_logs",
    "summary_csv",
    "runs_csv",
    "format_exact",
]

_CHUNK = 64
_CSV_HEADER = "q,alpha,classical_bits,quantum_bits,log10_fail_per_ct,accepted"

STATUS_EVALUATED = "evaluated"
STATUS_SKIPPED = "skipped_composite"
STATUS_UNEVALUATED = "unevaluated"


@dataclass(frozen=True)
class HuntConfig:
    q_lo: int
    q_hi: int
    n: int = 1024
    k: int = 1
    sigma_s: float = 1.4
    sigma_e: float = 1.4
    min_classical_bits: float = 320.0
    min_quantum_bits: float = 320.0
    max_log10_fail: float = -150.0
    threads: int = 1
    oracle: str = "builtin"
    failure_model: str = "full_model"

    def __post_init__(self):
        if self.q_lo > self.q_hi:
            raise ValueError(f"empty modulus range [{self.q_lo}, {self.q_hi}]")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.failure_model not in FAILURE_MODELS:
            raise ValueError(f"unknown failure model {self.failure_model!r}")
        for name in ("min_classical_bits", "min_quantum_bits", "max_log10_fail"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class CandidateRecord:
    q: int
    alpha: float
    classical_bits: float | None
    quantum_bits: float | None
    log10_fail_per_ct: float | None
    accepted: bool
    status: str = STATUS_EVALUATED


@dataclass(frozen=True)
class HunterRunLog:
    cpu_model: str
    threads: int
    q_lo: int
    q_hi: int
    elapsed_seconds: Decimal
    candidate_count: int
    config: HuntConfig
    records: tuple[CandidateRecord, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class RunSummary:
    number_of_runs: int
    total_candidates: int
    avg_candidates_per_run: Fraction
    min_elapsed_seconds: Fraction
    max_elapsed_seconds: Fraction
    avg_elapsed_seconds: Fraction


def _cpu_model() -> str:
    try:
        with open("/proc/cpuinfo", "r", encoding="utf-8") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or platform.machine() or "unknown"


def fixture_oracle(path) -> Callable[[ParameterSet], SecurityEstimate | None]:
    """Oracle backed by a file of external estimate records."""
    records = load_records(path)

    def oracle(p: ParameterSet) -> SecurityEstimate | None:
        for rec in records:
            if fingerprint_matches(p, rec):
                return estimate_external(p, rec, source=SOURCE_FIXTURE)
        return None

    return oracle


def _resolve_oracle(cfg: HuntConfig) -> Callable[[ParameterSet], SecurityEstimate | None]:
    if cfg.oracle == "builtin":
        return estimate_builtin
    if cfg.oracle.startswith("fixture:"):
        return fixture_oracle(cfg.oracle.split(":", 1)[1])
    raise ValueError(f"unknown oracle {cfg.oracle!r}; use 'builtin' or 'fixture:FILE'")


def evaluate_candidate(cfg: HuntConfig, q: int,
                       oracle: Callable[[ParameterSet], SecurityEstimate | None]) -> CandidateRecord:
    """Run one modulus through the failure filter and the security oracle."""
    alpha = cfg.sigma_e / q
    if not is_prime(q):
        return CandidateRecord(q=q, alpha=alpha, classical_bits=None, quantum_bits=None,
                               log10_fail_per_ct=None, accepted=False, status=STATUS_SKIPPED)
    p = ParameterSet(n=cfg.n, k=cfg.k, q=q, sigma_s=cfg.sigma_s, sigma_e=cfg.sigma_e)
    log10_fail = failure_log10(p, cfg.failure_model).log10_per_ct
    est = oracle(p)
    if est is None:
        return CandidateRecord(q=q, alpha=alpha, classical_bits=None, quantum_bits=None,
                               log10_fail_per_ct=log10_fail, accepted=False,
                               status=STATUS_UNEVALUATED)
    accepted = (est.classical_bits >= cfg.min_classical_bits
                and est.quantum_bits >= cfg.min_quantum_bits
                and log10_fail <= cfg.max_log10_fail)
    return CandidateRecord(q=q, alpha=alpha,
                           classical_bits=est.classical_bits, quantum_bits=est.quantum_bits,
                           log10_fail_per_ct=log10_fail, accepted=accepted)


def hunt(cfg: HuntConfig) -> HunterRunLog:
    """Scan [q_lo, q_hi]; returns the run log with records ordered by q."""
    oracle = _resolve_oracle(cfg)
    qs = range(cfg.q_lo, cfg.q_hi + 1)
    start = time.perf_counter()
    if cfg.threads == 1:
        records = [evaluate_candidate(cfg, q, oracle) for q in qs]
    else:
        chunks = [qs[i : i + _CHUNK] for i in range(0, len(qs), _CHUNK)]
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = pool.map(lambda chunk: [evaluate_candidate(cfg, q, oracle) for q in chunk],
                             chunks)
            records = [rec for part in parts for rec in part]
    records.sort(key=lambda rec: rec.q)
    elapsed = Decimal(f"{time.perf_counter() - start:.3f}")
    return HunterRunLog(
        cpu_model=_cpu_model(),
        threads=cfg.threads,
        q_lo=cfg.q_lo,
        q_hi=cfg.q_hi,
        elapsed_seconds=elapsed,
        candidate_count=sum(1 for rec in records if rec.accepted),
        config=cfg,
        records=tuple(records),
    )


def _fmt_opt(value: float | None) -> str:
    if value is None:
        return ""
    return repr(value)


def record_csv_line(rec: CandidateRecord) -> str:
    return (f"{rec.q},{rec.alpha!r},{_fmt_opt(rec.classical_bits)},"
            f"{_fmt_opt(rec.quantum_bits)},{_fmt_opt(rec.log10_fail_per_ct)},"
            f"{int(rec.accepted)}")


def _parse_record_line(line: str) -> CandidateRecord:
    parts = line.split(",")
    if len(parts) != 6:
        raise ValueError(f"record line must have 6 columns: {line!r}")
    q = int(parts[0])
    alpha = float(parts[1])
    classical = float(parts[2]) if parts[2] else None
    quantum = float(parts[3]) if parts[3] else None
    log10_fail = float(parts[4]) if parts[4] else None
    accepted = bool(int(parts[5]))
    if classical is None and log10_fail is None:
        status = STATUS_SKIPPED
    elif classical is None:
        status = STATUS_UNEVALUATED
    else:
        status = STATUS_EVALUATED
    return CandidateRecord(q=q, alpha=alpha, classical_bits=classical, quantum_bits=quantum,
                           log10_fail_per_ct=log10_fail, accepted=accepted, status=status)


def run_log_text(log: HunterRunLog) -> str:
    cfg = log.config
    lines = [
        f"cpu_model={log.cpu_model}",
        f"threads={log.threads}",
        f"q_lo={log.q_lo}",
        f"q_hi={log.q_hi}",
        f"elapsed_seconds={log.elapsed_seconds}",
        f"candidate_count={log.candidate_count}",
        f"min_classical_bits={cfg.min_classical_bits!r}",
        f"min_quantum_bits={cfg.min_quantum_bits!r}",
        f"max_log10_fail={cfg.max_log10_fail!r}",
        f"n={cfg.n}",
        f"k={cfg.k}",
        f"sigma_s={cfg.sigma_s!r}",
        f"sigma_e={cfg.sigma_e!r}",
        f"oracle={cfg.oracle}",
        f"failure_model={cfg.failure_model}",
        _CSV_HEADER,
    ]
    lines.extend(record_csv_line(rec) for rec in log.records)
    return "\n".join(lines) + "\n"


def write_run_log(log: HunterRunLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(run_log_text(log))


def read_run_log(path) -> HunterRunLog:
    """Parse a run-log file, enforcing the candidate-count invariant."""
    header: dict[str, str] = {}
    records: list[CandidateRecord] = []
    in_records = False
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line == _CSV_HEADER:
                in_records = True
                continue
            if in_records:
                records.append(_parse_record_line(line))
            else:
                if "=" not in line:
                    raise ValueError(f"malformed header line {line!r}")
                key, value = line.split("=", 1)
                header[key] = value
    required = ("cpu_model", "threads", "q_lo", "q_hi", "elapsed_seconds", "candidate_count")
    missing = [key for key in required if key not in header]
    if missing:
        raise ValueError(f"run log missing header keys: {', '.join(missing)}")
    cfg = HuntConfig(
        q_lo=int(header["q_lo"]),
        q_hi=int(header["q_hi"]),
        n=int(header.get("n", 1024)),
        k=int(header.get("k", 1)),
        sigma_s=float(header.get("sigma_s", 1.4)),
        sigma_e=float(header.get("sigma_e", 1.4)),
        min_classical_bits=float(header.get("min_classical_bits", 320.0)),
        min_quantum_bits=float(header.get("min_quantum_bits", 320.0)),
        max_log10_fail=float(header.get("max_log10_fail", -150.0)),
        threads=int(header["threads"]),
        oracle=header.get("oracle", "builtin"),
        failure_model=header.get("failure_model", "full_model"),
    )
    count = int(header["candidate_count"])
    accepted = sum(1 for rec in records if rec.accepted)
    if records and accepted != count:
        raise ValueError(f"candidate_count={count} but {accepted} accepted records")
    return HunterRunLog(
        cpu_model=header["cpu_model"],
        threads=cfg.threads,
        q_lo=cfg.q_lo,
        q_hi=cfg.q_hi,
        elapsed_seconds=Decimal(header["elapsed_seconds"]),
        candidate_count=count,
        config=cfg,
        records=tuple(records),
    )


def summarize_logs(logs: Iterable[HunterRunLog]) -> RunSummary:
    """Aggregate counts and timings; averages are exact rationals."""
    logs = list(logs)
    if not logs:
        zero = Fraction(0)
        return RunSummary(0, 0, zero, zero, zero, zero)
    total = sum(log.candidate_count for log in logs)
    elapsed = [Fraction(log.elapsed_seconds) for log in logs]
    n = len(logs)
    return RunSummary(
        number_of_runs=n,
        total_candidates=total,
        avg_candidates_per_run=Fraction(total, n),
        min_elapsed_seconds=min(elapsed),
        max_elapsed_seconds=max(elapsed),
        avg_elapsed_seconds=sum(elapsed) / n,
    )


def format_exact(value: Fraction, max_digits: int = 12) -> str:
    """Exact decimal string when the fraction terminates, else a rounding."""
    num, den = value.numerator, value.denominator
    d = den
    twos = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    fives = 0
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        shift = max(twos, fives)
        scaled = num * 10**shift // den
        text = f"{scaled:0{shift + 1}d}"
        if shift == 0:
            return text
        return (text[:-shift] or "0") + "." + text[-shift:]
    return f"{float(value):.{max_digits}g}"


def summary_csv(summary: RunSummary) -> str:
    """Two-line CSV whose columns mirror the summary-table rows."""
    header = ("number_of_runs,total_candidates,avg_candidates_per_run,"
              "min_elapsed_seconds,max_elapsed_seconds,avg_elapsed_seconds")
    row = ",".join([
        str(summary.number_of_runs),
        str(summary.total_candidates),
        format_exact(summary.avg_candidates_per_run),
        format_exact(summary.min_elapsed_seconds),
        format_exact(summary.max_elapsed_seconds),
        format_exact(summary.avg_elapsed_seconds),
    ])
    return header + "\n" + row + "\n"


def runs_csv(logs: Iterable[HunterRunLog]) -> str:
    """Per-run breakdown CSV: one row per run log (feeds the density figure)."""
    lines = ["q_lo,q_hi,candidate_count,elapsed_seconds"]
    for log in logs:
        lines.append(f"{log.q_lo},{log.q_hi},{log.candidate_count},{log.elapsed_seconds}")
    return "\n".join(lines) + "\n"
