"""Bridge to the external lattice security estimation tool.

Queries run the tool's default attack portfolio for an LWE parameter set,
take the minimum cost over every reported attack, and emit one fingerprinted
record line per parameter set:

    n=.. k=.. q=.. sigma_s=.. sigma_e=.. classical_bits=.. quantum_bits=.. estimator_version=..

The line layout is byte-compatible with the record reader in the main
package, which consumes these files for its external oracle mode. Every
record echoes the queried parameters and the tool version, so results stay
attributable when the tool's cost models drift between releases.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from typing import Callable, Iterable

__all__ = [
    "BridgeRecord",
    "ToolMissingError",
    "query",
    "batch_query",
    "format_record_line",
    "lattice_estimator_backend",
    "main",
]

# backend signature: (n, k, q, sigma_s, sigma_e) -> (classical_bits, quantum_bits, version)
Backend = Callable[[int, int, int, float, float], tuple[float, float, str]]


class ToolMissingError(RuntimeError):
    """The external estimation tool is not importable in this environment."""

    def __init__(self):
        super().__init__(
            "the external lattice security estimator is not installed; install it "
            "(it needs a SageMath runtime) or fall back to the main package's "
            "builtin/fixture oracles (`hunt --oracle builtin` or "
            "`hunt --oracle fixture:FILE`)"
        )


@dataclass(frozen=True)
class BridgeRecord:
    n: int
    k: int
    q: int
    sigma_s: float
    sigma_e: float
    classical_bits: float
    quantum_bits: float
    estimator_version: str


def lattice_estimator_backend(n: int, k: int, q: int,
                              sigma_s: float, sigma_e: float) -> tuple[float, float, str]:
    """Run the external tool's default attack portfolio; min cost over attacks."""
    try:
        from estimator import LWE, ND
        import estimator as _tool
    except ImportError as exc:
        raise ToolMissingError() from exc

    params = LWE.Parameters(
        n=n * k,
        q=q,
        Xs=ND.DiscreteGaussian(sigma_s),
        Xe=ND.DiscreteGaussian(sigma_e),
    )
    classical = LWE.estimate(params)
    classical_bits = min(math.log2(float(cost["rop"])) for cost in classical.values())
    quantum = LWE.estimate(params, red_cost_model="ADPS16,quantum")
    quantum_bits = min(math.log2(float(cost["rop"])) for cost in quantum.values())
    version = getattr(_tool, "__version__", "unknown")
    return classical_bits, quantum_bits, version


def query(n: int, k: int, q: int, sigma_s: float, sigma_e: float,
          backend: Backend | None = None) -> BridgeRecord:
    """One parameter set through the estimation backend; fingerprint echoed."""
    if backend is None:
        backend = lattice_estimator_backend
    classical_bits, quantum_bits, version = backend(n, k, q, sigma_s, sigma_e)
    return BridgeRecord(n=n, k=k, q=q, sigma_s=sigma_s, sigma_e=sigma_e,
                        classical_bits=classical_bits, quantum_bits=quantum_bits,
                        estimator_version=version)


def format_record_line(rec: BridgeRecord) -> str:
    def fmt(value):
        return repr(value) if isinstance(value, float) else str(value)

    return " ".join([
        f"n={rec.n}", f"k={rec.k}", f"q={rec.q}",
        f"sigma_s={fmt(rec.sigma_s)}", f"sigma_e={fmt(rec.sigma_e)}",
        f"classical_bits={fmt(rec.classical_bits)}",
        f"quantum_bits={fmt(rec.quantum_bits)}",
        f"estimator_version={rec.estimator_version}",
    ])


def _is_prime(n: int) -> bool:
    # deterministic Miller-Rabin, valid for n < 4_759_123_141
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d, r = d // 2, r + 1
    for a in (2, 7, 61):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def batch_query(rows: Iterable[tuple[int, int, int, float, float]],
                backend: Backend | None = None) -> Iterable[BridgeRecord]:
    for n, k, q, sigma_s, sigma_e in rows:
        yield query(n, k, q, sigma_s, sigma_e, backend=backend)


def range_rows(n: int, k: int, sigma_s: float, sigma_e: float,
               q_lo: int, q_hi: int) -> list[tuple[int, int, int, float, float]]:
    """One row per prime q in [q_lo, q_hi]."""
    return [(n, k, q, sigma_s, sigma_e)
            for q in range(q_lo, q_hi + 1) if _is_prime(q)]


def read_params_csv(path: str) -> list[tuple[int, int, int, float, float]]:
    """CSV with header n,k,q,sigma_s,sigma_e; one parameter set per row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for row in reader:
            rows.append((int(row["n"]), int(row["k"]), int(row["q"]),
                         float(row["sigma_s"]), float(row["sigma_e"])))
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kyfrog-bridge",
        description="query the external lattice security estimator and emit "
                    "fingerprinted record lines")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--params-csv", help="CSV of parameter sets (n,k,q,sigma_s,sigma_e)")
    source.add_argument("--q-lo", type=int, help="scan primes starting here")
    parser.add_argument("--q-hi", type=int, help="end of the prime scan (with --q-lo)")
    parser.add_argument("--n", type=int, default=1024)
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--sigma-s", type=float, default=1.4)
    parser.add_argument("--sigma-e", type=float, default=1.4)
    parser.add_argument("--out", help="output record file (default stdout)")
    args = parser.parse_args(argv)

    if args.params_csv:
        rows = read_params_csv(args.params_csv)
    else:
        if args.q_hi is None:
            parser.error("--q-lo requires --q-hi")
        rows = range_rows(args.n, args.k, args.sigma_s, args.sigma_e,
                          args.q_lo, args.q_hi)
    try:
        lines = [format_record_line(rec) for rec in batch_query(rows)]
    except ToolMissingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
