import pathlib

import pytest

from conftest import DATA_DIR, GOOD_ENCAP_SEEDS, GOOD_HYBRID_SEED, KEYGEN_SEED
from kyfrog.cli import main

FIXTURE_LOGS = sorted(str(p) for p in (DATA_DIR / "hunter_logs").glob("run*.log"))


def run(*argv):
    return main(list(argv))


def _kv(capsys):
    out = capsys.readouterr().out
    pairs = {}
    for line in out.splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            pairs[key] = value
    return pairs


def _keygen(tmp_path):
    pk, sk = tmp_path / "pk", tmp_path / "sk"
    assert run("keygen", "--pk-out", str(pk), "--sk-out", str(sk),
               "--drbg-seed", KEYGEN_SEED.hex(), "--insecure-deterministic") == 0
    return pk, sk


class TestParams:
    def test_reference_values(self, capsys):
        assert run("params") == 0
        pairs = _kv(capsys)
        assert pairs["n"] == "1024"
        assert pairs["q"] == "1103"
        assert pairs["pk_bytes"] == "1440"
        assert pairs["sk_bytes"] == "2048"
        assert pairs["ct_bytes"] == "524813"
        assert pairs["alpha"] == "0.001269265639165911"
        assert pairs["bits_per_coeff"] == "11"

    def test_invalid_parameters_exit_usage(self, capsys):
        assert run("params", "--q", "1105") == 1
        assert "prime" in capsys.readouterr().err


class TestKemFlow:
    def test_keygen_sizes(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        assert pk.stat().st_size == 1445  # 5-byte header + payload
        assert sk.stat().st_size == 2053

    def test_roundtrip_via_files(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        ct, k1, k2 = tmp_path / "ct", tmp_path / "k1", tmp_path / "k2"
        assert run("encap", "--pk", str(pk), "--ct-out", str(ct), "--key-out", str(k1),
                   "--drbg-seed", GOOD_ENCAP_SEEDS[0].hex(),
                   "--insecure-deterministic") == 0
        assert ct.stat().st_size == 524813
        assert run("decap", "--sk", str(sk), "--pk", str(pk), "--ct", str(ct),
                   "--key-out", str(k2)) == 0
        assert k1.read_bytes() == k2.read_bytes()
        assert len(k1.read_bytes()) == 32

    def test_decap_of_garbage_still_exits_zero(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        ct = tmp_path / "ct"
        ct.write_bytes(b"\x00" * 1000)
        out = tmp_path / "k"
        assert run("decap", "--sk", str(sk), "--pk", str(pk), "--ct", str(ct),
                   "--key-out", str(out)) == 0
        assert len(out.read_bytes()) == 32

    def test_deterministic_invocations_identical(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        cts = []
        for name in ("a", "b"):
            ct = tmp_path / name
            run("encap", "--pk", str(pk), "--ct-out", str(ct),
                "--key-out", str(tmp_path / f"k{name}"),
                "--drbg-seed", GOOD_ENCAP_SEEDS[1].hex(), "--insecure-deterministic")
            cts.append(ct.read_bytes())
        assert cts[0] == cts[1]


class TestHybridFlow:
    def test_encrypt_decrypt(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        msg = tmp_path / "msg"
        msg.write_bytes(b"paranoid payload")
        enc, dec = tmp_path / "enc", tmp_path / "dec"
        assert run("encrypt", "--pk", str(pk), "--in", str(msg), "--out", str(enc),
                   "--drbg-seed", GOOD_HYBRID_SEED.hex(), "--insecure-deterministic") == 0
        assert run("decrypt", "--sk", str(sk), "--pk", str(pk), "--in", str(enc),
                   "--out", str(dec)) == 0
        assert dec.read_bytes() == b"paranoid payload"

    def test_tampered_exits_3_with_generic_message(self, tmp_path, capsys):
        pk, sk = _keygen(tmp_path)
        msg = tmp_path / "msg"
        msg.write_bytes(b"payload")
        enc = tmp_path / "enc"
        run("encrypt", "--pk", str(pk), "--in", str(msg), "--out", str(enc),
            "--drbg-seed", GOOD_HYBRID_SEED.hex(), "--insecure-deterministic")
        blob = bytearray(enc.read_bytes())
        blob[20] ^= 1
        enc.write_bytes(bytes(blob))
        capsys.readouterr()
        assert run("decrypt", "--sk", str(sk), "--pk", str(pk), "--in", str(enc),
                   "--out", str(tmp_path / "dec")) == 3
        assert capsys.readouterr().err.strip() == "authentication failure"


class TestHuntSummarize:
    def test_hunt_writes_log(self, tmp_path):
        out = tmp_path / "run.log"
        assert run("hunt", "--q-lo", "50", "--q-hi", "80", "--threads", "2",
                   "--out", str(out)) == 0
        text = out.read_text()
        assert "q_lo=50" in text
        assert text.count("\n") >= 32

    def test_hunt_honours_min_bits(self, tmp_path, capsys):
        assert run("hunt", "--q-lo", "1100", "--q-hi", "1105",
                   "--min-bits", "0", "--max-log10-fail", "0") == 0
        out = capsys.readouterr().out
        assert "1103," in out
        line = next(l for l in out.splitlines() if l.startswith("1103,"))
        assert line.endswith(",1")

    def test_summarize_fixture_set(self, capsys):
        assert run("summarize", *FIXTURE_LOGS) == 0
        pairs = _kv(capsys)
        assert pairs["number_of_runs"] == "16"
        assert pairs["total_candidates"] == "6638"
        assert pairs["avg_candidates_per_run"] == "414.875"
        assert pairs["min_elapsed_seconds"] == "20.001"
        assert pairs["max_elapsed_seconds"] == "120.006"
        assert pairs["avg_elapsed_seconds"] == "61.253"

    def test_summarize_csv_out(self, tmp_path, capsys):
        target = tmp_path / "summary.csv"
        assert run("summarize", *FIXTURE_LOGS, "--csv-out", str(target)) == 0
        lines = target.read_text().splitlines()
        assert lines[1] == "16,6638,414.875,20.001,120.006,61.253"


class TestAnalyzeFailure:
    def test_reports_measured_and_claimed(self, capsys):
        assert run("analyze-failure") == 0
        pairs = _kv(capsys)
        assert pairs["claimed_log10_fail_bound"] == "-150.0"
        assert pairs["claimed_bound_met_full"] == "False"
        assert float(pairs["log10_per_bit_paper"]) == pytest.approx(-4.9485, abs=1e-3)
        assert float(pairs["log10_per_bit_full"]) == pytest.approx(-2.7215, abs=1e-3)
        assert float(pairs["sigma_err_full"]) == pytest.approx(88.7105, abs=1e-3)

    def test_monte_carlo_option(self, capsys):
        assert run("analyze-failure", "--mc-trials", "20000", "--mc-seed", "4") == 0
        pairs = _kv(capsys)
        assert int(pairs["mc_trials"]) == 20000
        assert 0 <= float(pairs["mc_rate"]) < 0.01


class TestBench:
    def test_csv_has_three_data_rows(self, capsys):
        assert run("bench", "--iterations", "1") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "operation,iterations,mean_seconds,median_seconds"
        assert [l.split(",")[0] for l in lines[1:]] == ["keygen", "encap", "decap"]
        assert all(l.split(",")[1] == "1" for l in lines[1:])


class TestErrorHandling:
    def test_missing_required_flag_exits_1(self, capsys):
        assert run("encap", "--pk", "x") == 1
        assert capsys.readouterr().err

    def test_unknown_flag_exits_1(self):
        assert run("params", "--bogus") == 1

    def test_unreadable_file_exits_2(self, tmp_path):
        assert run("encap", "--pk", str(tmp_path / "nope"),
                   "--ct-out", str(tmp_path / "ct"),
                   "--key-out", str(tmp_path / "k")) == 2

    def test_no_silent_overwrite(self, tmp_path, capsys):
        pk, sk = _keygen(tmp_path)
        assert run("keygen", "--pk-out", str(pk), "--sk-out", str(sk),
                   "--drbg-seed", KEYGEN_SEED.hex(), "--insecure-deterministic") == 2
        assert "overwrite" in capsys.readouterr().err
        assert run("keygen", "--pk-out", str(pk), "--sk-out", str(sk), "--force",
                   "--drbg-seed", KEYGEN_SEED.hex(), "--insecure-deterministic") == 0

    def test_drbg_seed_requires_opt_in(self, tmp_path, capsys):
        assert run("keygen", "--pk-out", str(tmp_path / "a"),
                   "--sk-out", str(tmp_path / "b"),
                   "--drbg-seed", "00" * 48) == 1
        assert "insecure-deterministic" in capsys.readouterr().err

    def test_corrupt_key_file_exits_3(self, tmp_path):
        pk, sk = _keygen(tmp_path)
        data = bytearray(pk.read_bytes())
        data[0] ^= 0xFF
        pk.write_bytes(bytes(data))
        assert run("encap", "--pk", str(pk), "--ct-out", str(tmp_path / "ct"),
                   "--key-out", str(tmp_path / "k")) == 3
