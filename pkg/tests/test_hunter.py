from decimal import Decimal
from fractions import Fraction

import pytest

from conftest import DATA_DIR
from kyfrog.estimator import estimate_builtin
from kyfrog.failure import failure_log10
from kyfrog.hunter import (HuntConfig, STATUS_EVALUATED, STATUS_SKIPPED,
                           STATUS_UNEVALUATED, evaluate_candidate, format_exact,
                           hunt, read_run_log, run_log_text, summarize_logs,
                           summary_csv, write_run_log)
from kyfrog.params import ParameterSet, is_prime

FIXTURES = sorted((DATA_DIR / "hunter_logs").glob("run*.log"))


def test_accept_everything_counts_primes():
    cfg = HuntConfig(q_lo=2, q_hi=100, min_classical_bits=0.0,
                     min_quantum_bits=0.0, max_log10_fail=0.0)
    log = hunt(cfg)
    assert log.candidate_count == 25  # pi(100)
    assert len(log.records) == 99


def test_range_without_primes():
    cfg = HuntConfig(q_lo=24, q_hi=28)
    log = hunt(cfg)
    assert log.candidate_count == 0
    assert len(log.records) == 5
    assert all(rec.status == STATUS_SKIPPED for rec in log.records)


def test_every_q_appears_exactly_once():
    log = hunt(HuntConfig(q_lo=100, q_hi=260))
    assert [rec.q for rec in log.records] == list(range(100, 261))
    for rec in log.records:
        assert rec.status == (STATUS_EVALUATED if is_prime(rec.q) else STATUS_SKIPPED)


def test_determinism_across_thread_counts():
    base = None
    for threads in (1, 4):
        cfg = HuntConfig(q_lo=1000, q_hi=1200, threads=threads)
        log = hunt(cfg)
        if base is None:
            base = log.records
        else:
            assert log.records == base


def test_acceptance_predicate_holds_on_every_record():
    cfg = HuntConfig(q_lo=900, q_hi=1300, min_classical_bits=320.0,
                     min_quantum_bits=320.0, max_log10_fail=-1.0)
    log = hunt(cfg)
    for rec in log.records:
        if rec.status != STATUS_EVALUATED:
            assert not rec.accepted
            continue
        p = ParameterSet(n=cfg.n, k=1, q=rec.q, sigma_s=cfg.sigma_s, sigma_e=cfg.sigma_e)
        est = estimate_builtin(p)
        expected = (est.classical_bits >= cfg.min_classical_bits
                    and est.quantum_bits >= cfg.min_quantum_bits
                    and failure_log10(p, cfg.failure_model).log10_per_ct
                    <= cfg.max_log10_fail
                    and is_prime(rec.q))
        assert rec.accepted == expected


def test_candidate_count_counts_accepted():
    log = hunt(HuntConfig(q_lo=1000, q_hi=1120, max_log10_fail=-0.1))
    assert log.candidate_count == sum(1 for rec in log.records if rec.accepted)


def test_builtin_oracle_accepts_reference_neighbourhood():
    # with the builtin estimate the 320-bit filter keeps moduli near 1103,
    # but the honest failure filter at -150 rejects everything
    cfg = HuntConfig(q_lo=1100, q_hi=1110)
    log = hunt(cfg)
    assert log.candidate_count == 0
    rec = next(r for r in log.records if r.q == 1103)
    assert rec.classical_bits is not None and rec.classical_bits >= 320
    assert rec.log10_fail_per_ct > -150


def test_fixture_oracle_marks_missing_as_unevaluated(tmp_path):
    path = tmp_path / "ext.records"
    path.write_text(
        "n=1024 k=1 q=1009 sigma_s=1.4 sigma_e=1.4 classical_bits=326.0 "
        "quantum_bits=325.0 estimator_version=test\n")
    cfg = HuntConfig(q_lo=1008, q_hi=1014, oracle=f"fixture:{path}",
                     max_log10_fail=0.0)
    log = hunt(cfg)
    by_q = {rec.q: rec for rec in log.records}
    assert by_q[1009].accepted
    assert by_q[1013].status == STATUS_UNEVALUATED  # prime, no record
    assert not by_q[1013].accepted
    assert by_q[1012].status == STATUS_SKIPPED


def test_evaluate_candidate_composite():
    cfg = HuntConfig(q_lo=2, q_hi=10)
    rec = evaluate_candidate(cfg, 9, estimate_builtin)
    assert rec.status == STATUS_SKIPPED
    assert rec.classical_bits is None and rec.log10_fail_per_ct is None


class TestLogIO:
    def test_roundtrip(self, tmp_path):
        log = hunt(HuntConfig(q_lo=1000, q_hi=1050, threads=2))
        path = tmp_path / "run.log"
        write_run_log(log, path)
        back = read_run_log(path)
        assert back.records == log.records
        assert back.candidate_count == log.candidate_count
        assert back.elapsed_seconds == log.elapsed_seconds
        assert back.config == log.config
        assert back.cpu_model == log.cpu_model

    def test_text_has_header_then_csv(self):
        log = hunt(HuntConfig(q_lo=10, q_hi=12))
        text = run_log_text(log)
        lines = text.splitlines()
        assert lines[0].startswith("cpu_model=")
        assert "q,alpha,classical_bits,quantum_bits,log10_fail_per_ct,accepted" in lines
        assert lines[-1].startswith("12,")

    def test_count_invariant_enforced(self, tmp_path):
        log = hunt(HuntConfig(q_lo=2, q_hi=30, min_classical_bits=0.0,
                              min_quantum_bits=0.0, max_log10_fail=0.0))
        path = tmp_path / "bad.log"
        text = run_log_text(log).replace("candidate_count=10", "candidate_count=3")
        assert "candidate_count=10" in run_log_text(log)
        path.write_text(text)
        with pytest.raises(ValueError, match="candidate_count"):
            read_run_log(path)


class TestSummaries:
    def test_fixture_set_matches_published_statistics(self):
        assert len(FIXTURES) == 16
        summary = summarize_logs(read_run_log(p) for p in FIXTURES)
        assert summary.number_of_runs == 16
        assert summary.total_candidates == 6638
        assert summary.avg_candidates_per_run == Fraction(6638, 16)
        assert format_exact(summary.avg_candidates_per_run) == "414.875"
        assert format_exact(summary.min_elapsed_seconds) == "20.001"
        assert format_exact(summary.max_elapsed_seconds) == "120.006"
        assert format_exact(summary.avg_elapsed_seconds) == "61.253"

    def test_fixture_records_satisfy_thresholds(self):
        for path in FIXTURES[:3]:
            log = read_run_log(path)
            for rec in log.records:
                if rec.accepted:
                    assert rec.classical_bits >= 320
                    assert rec.quantum_bits >= 320
                    assert rec.log10_fail_per_ct <= -150
                    assert is_prime(rec.q)

    def test_empty_summary(self):
        summary = summarize_logs([])
        assert summary.number_of_runs == 0
        assert summary.total_candidates == 0
        assert summary.avg_candidates_per_run == 0

    def test_summary_csv_shape(self):
        summary = summarize_logs(read_run_log(p) for p in FIXTURES)
        lines = summary_csv(summary).splitlines()
        assert len(lines) == 2
        assert lines[0].split(",") == [
            "number_of_runs", "total_candidates", "avg_candidates_per_run",
            "min_elapsed_seconds", "max_elapsed_seconds", "avg_elapsed_seconds"]
        assert lines[1] == "16,6638,414.875,20.001,120.006,61.253"


def test_format_exact():
    assert format_exact(Fraction(6638, 16)) == "414.875"
    assert format_exact(Fraction(61253, 1000)) == "61.253"
    assert format_exact(Fraction(5)) == "5"
    assert format_exact(Fraction(1, 3)).startswith("0.3333")


def test_config_validation():
    with pytest.raises(ValueError):
        HuntConfig(q_lo=10, q_hi=5)
    with pytest.raises(ValueError):
        HuntConfig(q_lo=1, q_hi=2, threads=0)
    with pytest.raises(ValueError):
        HuntConfig(q_lo=1, q_hi=2, failure_model="bogus")
