"""Command-line interface: thin adapters over the library modules.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 authentication or parse
failure. Diagnostics go to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

from . import failure as failure_mod
from . import hunter as hunter_mod
from . import hybrid as hybrid_mod
from . import kem as kem_mod
from . import pke
from .params import REFERENCE, InvalidParameterError, ParameterSet, derive_sizes
from .rng import Drbg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_AUTH = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _IoError(f"cannot read {path}: {exc}") from exc


class _IoError(Exception):
    pass


def _write_file(path: str, data: bytes, force: bool) -> None:
    target = Path(path)
    if target.exists() and not force:
        raise _IoError(f"refusing to overwrite {path} (pass --force)")
    try:
        target.write_bytes(data)
    except OSError as exc:
        raise _IoError(f"cannot write {path}: {exc}") from exc


def _drbg_from_args(args) -> Drbg:
    seed_hex = getattr(args, "drbg_seed", None)
    if seed_hex is None:
        return Drbg()
    if not getattr(args, "insecure_deterministic", False):
        raise UsageError("--drbg-seed requires --insecure-deterministic")
    try:
        seed = bytes.fromhex(seed_hex)
    except ValueError as exc:
        raise UsageError(f"--drbg-seed must be hex: {exc}") from exc
    return Drbg(seed)


def _params_from_args(args) -> ParameterSet:
    return ParameterSet(
        n=getattr(args, "n", REFERENCE.n),
        k=1,
        q=getattr(args, "q", REFERENCE.q),
        sigma_s=getattr(args, "sigma_s", REFERENCE.sigma_s),
        sigma_e=getattr(args, "sigma_e", REFERENCE.sigma_e),
    )


def _add_deterministic_flags(sub) -> None:
    sub.add_argument("--drbg-seed", metavar="HEX", help=argparse.SUPPRESS)
    sub.add_argument("--insecure-deterministic", action="store_true",
                     help=argparse.SUPPRESS)


def _add_param_flags(sub) -> None:
    sub.add_argument("--n", type=int, default=REFERENCE.n)
    sub.add_argument("--q", type=int, default=REFERENCE.q)
    sub.add_argument("--sigma-s", dest="sigma_s", type=float, default=REFERENCE.sigma_s)
    sub.add_argument("--sigma-e", dest="sigma_e", type=float, default=REFERENCE.sigma_e)


def build_parser() -> _Parser:
    parser = _Parser(prog="kyfrog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_params = sub.add_parser("params", help="print the parameter set and derived sizes")
    _add_param_flags(p_params)

    p_keygen = sub.add_parser("keygen", help="generate a key pair")
    p_keygen.add_argument("--pk-out", required=True)
    p_keygen.add_argument("--sk-out", required=True)
    p_keygen.add_argument("--force", action="store_true")
    _add_deterministic_flags(p_keygen)

    p_encap = sub.add_parser("encap", help="encapsulate a shared key")
    p_encap.add_argument("--pk", required=True)
    p_encap.add_argument("--ct-out", required=True)
    p_encap.add_argument("--key-out", required=True)
    p_encap.add_argument("--force", action="store_true")
    _add_deterministic_flags(p_encap)

    p_decap = sub.add_parser("decap", help="decapsulate a shared key")
    p_decap.add_argument("--sk", required=True)
    p_decap.add_argument("--pk", required=True)
    p_decap.add_argument("--ct", required=True)
    p_decap.add_argument("--key-out", required=True)
    p_decap.add_argument("--force", action="store_true")

    p_enc = sub.add_parser("encrypt", help="hybrid-encrypt a file")
    p_enc.add_argument("--pk", required=True)
    p_enc.add_argument("--in", dest="infile", required=True)
    p_enc.add_argument("--out", required=True)
    p_enc.add_argument("--force", action="store_true")
    _add_deterministic_flags(p_enc)

    p_dec = sub.add_parser("decrypt", help="decrypt a hybrid container")
    p_dec.add_argument("--sk", required=True)
    p_dec.add_argument("--pk", required=True)
    p_dec.add_argument("--in", dest="infile", required=True)
    p_dec.add_argument("--out", required=True)
    p_dec.add_argument("--force", action="store_true")

    p_fail = sub.add_parser("analyze-failure", help="decryption-failure analysis")
    _add_param_flags(p_fail)
    p_fail.add_argument("--mc-trials", type=int, default=0,
                        help="Monte Carlo trials (0 = analytic only)")
    p_fail.add_argument("--mc-seed", type=int, default=0)

    p_hunt = sub.add_parser("hunt", help="scan a modulus range for candidates")
    p_hunt.add_argument("--q-lo", type=int, required=True)
    p_hunt.add_argument("--q-hi", type=int, required=True)
    p_hunt.add_argument("--threads", type=int, default=1)
    p_hunt.add_argument("--oracle", default="builtin",
                        help="'builtin' or 'fixture:FILE'")
    p_hunt.add_argument("--min-bits", type=float, default=320.0,
                        help="threshold for both classical and quantum bits")
    p_hunt.add_argument("--max-log10-fail", type=float, default=-150.0)
    p_hunt.add_argument("--failure-model", default="full_model",
                        choices=sorted(failure_mod.FAILURE_MODELS))
    p_hunt.add_argument("--out", help="run-log file (default: stdout)")
    p_hunt.add_argument("--force", action="store_true")

    p_sum = sub.add_parser("summarize", help="aggregate hunter run logs")
    p_sum.add_argument("logs", nargs="+", metavar="LOG")
    p_sum.add_argument("--csv-out", help="write the summary CSV to a file")
    p_sum.add_argument("--runs-csv-out", help="write a per-run breakdown CSV to a file")
    p_sum.add_argument("--force", action="store_true")

    p_bench = sub.add_parser("bench", help="time keygen/encap/decap")
    p_bench.add_argument("--iterations", type=int, default=10)

    return parser


def _cmd_params(args) -> int:
    p = _params_from_args(args)
    sizes = derive_sizes(p)
    for key, value in [("n", p.n), ("k", p.k), ("q", p.q),
                       ("sigma_s", p.sigma_s), ("sigma_e", p.sigma_e),
                       ("alpha", repr(sizes.alpha)),
                       ("bits_per_coeff", sizes.bits_per_coeff),
                       ("pk_bytes", sizes.pk_bytes), ("sk_bytes", sizes.sk_bytes),
                       ("ct_bytes", sizes.ct_bytes)]:
        print(f"{key}={value}")
    return EXIT_OK


def _cmd_keygen(args) -> int:
    drbg = _drbg_from_args(args)
    pk, sk = pke.keygen(drbg, REFERENCE)
    _write_file(args.pk_out, pke.write_public_key(pk, REFERENCE), args.force)
    _write_file(args.sk_out, pke.write_secret_key(sk, REFERENCE), args.force)
    return EXIT_OK


def _cmd_encap(args) -> int:
    pk = pke.read_public_key(_read_file(args.pk), REFERENCE)
    drbg = _drbg_from_args(args)
    ct, key = kem_mod.encap(pk, drbg, REFERENCE)
    _write_file(args.ct_out, ct, args.force)
    _write_file(args.key_out, key, args.force)
    return EXIT_OK


def _cmd_decap(args) -> int:
    sk = pke.read_secret_key(_read_file(args.sk), REFERENCE)
    pk = pke.read_public_key(_read_file(args.pk), REFERENCE)
    ct = _read_file(args.ct)
    key = kem_mod.decap(sk, pk, ct, REFERENCE)
    _write_file(args.key_out, key, args.force)
    return EXIT_OK  # implicit rejection is not an error


def _cmd_encrypt(args) -> int:
    pk = pke.read_public_key(_read_file(args.pk), REFERENCE)
    drbg = _drbg_from_args(args)
    plaintext = _read_file(args.infile)
    container = hybrid_mod.encrypt_file_bytes(pk, plaintext, drbg, REFERENCE)
    _write_file(args.out, container, args.force)
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    sk = pke.read_secret_key(_read_file(args.sk), REFERENCE)
    pk = pke.read_public_key(_read_file(args.pk), REFERENCE)
    data = _read_file(args.infile)
    try:
        plaintext = hybrid_mod.decrypt_file_bytes(sk, pk, data, REFERENCE)
    except hybrid_mod.AuthenticationError:
        print("authentication failure", file=sys.stderr)
        return EXIT_AUTH
    _write_file(args.out, plaintext, args.force)
    return EXIT_OK


def _cmd_analyze_failure(args) -> int:
    p = _params_from_args(args)
    mc = None
    if args.mc_trials > 0:
        mc = failure_mod.monte_carlo_failure(p, args.mc_trials, seed=args.mc_seed)
    report = failure_mod.failure_report(p, mc)
    for key, value in report.items():
        print(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
    print(",".join(report))
    print(",".join(repr(v) if isinstance(v, float) else str(v) for v in report.values()))
    return EXIT_OK


def _cmd_hunt(args) -> int:
    cfg = hunter_mod.HuntConfig(
        q_lo=args.q_lo, q_hi=args.q_hi,
        min_classical_bits=args.min_bits, min_quantum_bits=args.min_bits,
        max_log10_fail=args.max_log10_fail,
        threads=args.threads, oracle=args.oracle, failure_model=args.failure_model,
    )
    log = hunter_mod.hunt(cfg)
    if args.out:
        if Path(args.out).exists() and not args.force:
            raise _IoError(f"refusing to overwrite {args.out} (pass --force)")
        hunter_mod.write_run_log(log, args.out)
        print(f"candidates={log.candidate_count} elapsed={log.elapsed_seconds}s "
              f"records={len(log.records)}", file=sys.stderr)
    else:
        print(hunter_mod.run_log_text(log), end="")
    return EXIT_OK


def _cmd_summarize(args) -> int:
    logs = [hunter_mod.read_run_log(path) for path in args.logs]
    summary = hunter_mod.summarize_logs(logs)
    fmt = hunter_mod.format_exact
    print(f"number_of_runs={summary.number_of_runs}")
    print(f"total_candidates={summary.total_candidates}")
    print(f"avg_candidates_per_run={fmt(summary.avg_candidates_per_run)}")
    print(f"min_elapsed_seconds={fmt(summary.min_elapsed_seconds)}")
    print(f"max_elapsed_seconds={fmt(summary.max_elapsed_seconds)}")
    print(f"avg_elapsed_seconds={fmt(summary.avg_elapsed_seconds)}")
    csv_text = hunter_mod.summary_csv(summary)
    print(csv_text, end="")
    if args.csv_out:
        _write_file(args.csv_out, csv_text.encode(), args.force)
    if args.runs_csv_out:
        _write_file(args.runs_csv_out, hunter_mod.runs_csv(logs).encode(), args.force)
    return EXIT_OK


def _cmd_bench(args) -> int:
    if args.iterations < 1:
        raise UsageError("--iterations must be >= 1")
    p = REFERENCE
    drbg = Drbg(bytes(48))
    times = {"keygen": [], "encap": [], "decap": []}
    for _ in range(args.iterations):
        t0 = time.perf_counter()
        pk, sk = pke.keygen(drbg, p)
        t1 = time.perf_counter()
        ct, _key = kem_mod.encap(pk, drbg, p)
        t2 = time.perf_counter()
        kem_mod.decap(sk, pk, ct, p)
        t3 = time.perf_counter()
        times["keygen"].append(t1 - t0)
        times["encap"].append(t2 - t1)
        times["decap"].append(t3 - t2)
    print("operation,iterations,mean_seconds,median_seconds")
    for op in ("keygen", "encap", "decap"):
        samples = times[op]
        print(f"{op},{len(samples)},{statistics.fmean(samples):.6f},"
              f"{statistics.median(samples):.6f}")
    return EXIT_OK


_COMMANDS = {
    "params": _cmd_params,
    "keygen": _cmd_keygen,
    "encap": _cmd_encap,
    "decap": _cmd_decap,
    "encrypt": _cmd_encrypt,
    "decrypt": _cmd_decrypt,
    "analyze-failure": _cmd_analyze_failure,
    "hunt": _cmd_hunt,
    "summarize": _cmd_summarize,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IoError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    except (pke.KeyFormatError, kem_mod.MalformedCiphertext, ValueError) as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_AUTH


if __name__ == "__main__":
    sys.exit(main())
