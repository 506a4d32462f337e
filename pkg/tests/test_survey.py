import json
import os
import signal
import subprocess
import sys
import time

import pytest

from kummer_rank.errors import BadRange, ConfigMismatch, IoFailure, MixedP
from kummer_rank.modarith import is_prime
from kummer_rank.survey import (
    CSV_COLUMNS,
    CSV_HEADER,
    PrimeRecord,
    SurveyConfig,
    TableAggregate,
    aggregate,
    csv_line,
    process_prime,
    read_records,
    run_survey,
    sieve,
)


def _trial(p, lo, hi):
    return [n for n in range(lo, hi + 1) if n % p == 1 and is_prime(n)]


def test_sieve_examples():
    assert sieve(5, 2, 100) == [11, 31, 41, 61, 71]
    assert sieve(7, 2, 100) == [29, 43, 71]
    with pytest.raises(BadRange):
        sieve(5, 50, 40)
    with pytest.raises(BadRange):
        sieve(5, 1, 40)
    with pytest.raises(BadRange):
        sieve(5, 2, 1 << 63)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 37])
def test_sieve_matches_trial_division(p):
    assert sieve(p, 2, 60000) == _trial(p, 2, 60000)


def test_sieve_window_edges():
    for lo, hi in [(11, 11), (12, 30), (31, 31), (1000, 1000), (999_000, 1_001_000)]:
        assert sieve(5, lo, hi) == _trial(5, lo, hi)


def test_sieve_high_window():
    lo = 10**12
    got = sieve(7, lo, lo + 20000)
    assert got == [n for n in range(lo + (1 - lo) % 7, lo + 20001, 7) if is_prime(n)]


def test_sieve_total_count_p5():
    assert len(sieve(5, 2, 2 * 10**7)) == 317_587


def test_process_prime_examples():
    r = process_prime(5, 11)
    assert r.dim_string == "00" and r.rank_exact and r.rank_lower == 1
    assert r.s_labels == (1, 0, 3) and r.elapsed_us is None
    r = process_prime(7, 337)
    assert r.dim_string[0] == "0" and r.dim_string[2] == "1" and r.rank_lower == 2


def test_process_prime_never_raises():
    r = process_prime(5, 13)
    assert r.error.startswith("ValidationError") and r.key == "ERROR"
    assert process_prime(5, 11, timing=True).elapsed_us is not None


def test_record_round_trips():
    recs = [process_prime(7, n) for n in sieve(7, 2, 3000)] + [process_prime(5, 13), process_prime(5, 11, True)]
    for r in recs:
        assert PrimeRecord.from_json(r.to_json()) == r
        row = dict(zip(CSV_COLUMNS, r.to_row()))
        assert PrimeRecord.from_row(row) == r
        assert csv_line(r).endswith("\n") and "\r" not in csv_line(r)


def test_aggregate_basics():
    agg = aggregate([process_prime(5, 11)])
    assert agg.total == 1 and agg.counts == {"00": 1}
    with pytest.raises(MixedP):
        aggregate([process_prime(5, 11), process_prime(7, 29)])
    a = aggregate(process_prime(5, n) for n in sieve(5, 2, 3000))
    b = aggregate(process_prime(5, n) for n in sieve(5, 3001, 6000))
    c = aggregate(process_prime(5, n) for n in sieve(5, 2, 6000))
    assert a.merge(b).to_dict() == c.to_dict() == b.merge(a).to_dict()
    assert TableAggregate.from_dict(c.to_dict()).to_dict() == c.to_dict()
    with pytest.raises(MixedP):
        a.merge(aggregate([process_prime(7, 29)]))
    assert "Total" in c.render()


def test_aggregate_error_key():
    agg = aggregate([process_prime(5, 13), process_prime(5, 11)])
    assert agg.counts["ERROR"] == 1 and agg.total == 2


def test_small_survey(tmp_path):
    agg = run_survey(SurveyConfig(p=5, max_n=100, output=tmp_path))
    assert agg.total == 5
    assert sum(agg.counts[k] for k in ("00", "10", "11")) == 5
    text = (tmp_path / "records.csv").read_bytes()
    assert text.startswith(CSV_HEADER.encode()) and b"\r" not in text
    assert [r.N for r in read_records(tmp_path)] == [11, 31, 41, 61, 71]
    assert read_records(tmp_path / "records.jsonl") == read_records(tmp_path)
    assert json.loads((tmp_path / "summary.json").read_text())["total"] == 5
    ck = json.loads((tmp_path / "checkpoint.json").read_text())
    assert set(ck) == {"config_hash", "last_n", "partial_counts"} and ck["last_n"] == 71


def _files(d):
    return {name: (d / name).read_bytes() for name in ("records.csv", "records.jsonl", "summary.json", "checkpoint.json")}


def test_worker_count_does_not_change_output(tmp_path):
    one = run_survey(SurveyConfig(p=7, max_n=40000, output=tmp_path / "a", workers=1, chunk_size=7))
    three = run_survey(SurveyConfig(p=7, max_n=40000, output=tmp_path / "b", workers=3, chunk_size=5))
    assert one.to_dict() == three.to_dict()
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_stop_and_resume_is_byte_identical(tmp_path):
    full = SurveyConfig(p=5, max_n=50000, output=tmp_path / "full", checkpoint_every=100)
    run_survey(full)
    part = SurveyConfig(p=5, max_n=50000, output=tmp_path / "part", checkpoint_every=100, stop_after=500, workers=2)
    run_survey(part)
    assert not (tmp_path / "part" / "summary.json").exists()
    resumed = SurveyConfig(p=5, max_n=50000, output=tmp_path / "part", checkpoint_every=100, resume=True, workers=2)
    run_survey(resumed)
    assert _files(tmp_path / "full") == _files(tmp_path / "part")


def test_resume_discards_rows_past_checkpoint(tmp_path):
    cfg = SurveyConfig(p=5, max_n=20000, output=tmp_path, checkpoint_every=50, stop_after=120)
    run_survey(cfg)
    # simulate rows written after the last checkpoint plus a torn line
    with open(tmp_path / "records.csv", "a") as fh:
        fh.write("5,999999,00,1,1,1,0,1;0;3,0,,\n5,1000")
    with open(tmp_path / "records.jsonl", "a") as fh:
        fh.write('{"p": 5, "N": 999999}\n{"p"')
    run_survey(SurveyConfig(p=5, max_n=20000, output=tmp_path, checkpoint_every=50, resume=True))
    ref = tmp_path / "ref"
    run_survey(SurveyConfig(p=5, max_n=20000, output=ref, checkpoint_every=50))
    assert _files(tmp_path) == _files(ref)


def test_resume_with_other_config_is_refused(tmp_path):
    run_survey(SurveyConfig(p=5, max_n=2000, output=tmp_path))
    with pytest.raises(ConfigMismatch):
        run_survey(SurveyConfig(p=5, max_n=3000, output=tmp_path, resume=True))
    # worker count is not part of the configuration identity
    run_survey(SurveyConfig(p=5, max_n=2000, output=tmp_path, resume=True, workers=2))


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoFailure):
        run_survey(SurveyConfig(p=5, max_n=100, output=blocker / "sub"))


def test_timing_is_opt_in(tmp_path):
    run_survey(SurveyConfig(p=5, max_n=200, output=tmp_path, timing=True))
    assert all(r.elapsed_us is not None for r in read_records(tmp_path))


def test_sigkill_then_resume(tmp_path):
    out, ref = tmp_path / "killed", tmp_path / "ref"
    args = ["survey", "--p", "7", "--max", "150000", "--checkpoint-every", "100"]
    cmd = [sys.executable, "-m", "kummer_rank", *args, "--out", str(out)]
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    ckpt = out / "checkpoint.json"
    deadline = time.time() + 120
    while time.time() < deadline:
        try:
            if json.loads(ckpt.read_text())["last_n"] > 0:
                break
        except (OSError, ValueError, KeyError):
            pass
        time.sleep(0.05)
    os.kill(proc.pid, signal.SIGKILL)
    proc.wait()
    assert not (out / "summary.json").exists()
    subprocess.run([*cmd, "--resume"], check=True, stdout=subprocess.DEVNULL)
    subprocess.run([sys.executable, "-m", "kummer_rank", *args, "--out", str(ref), "--workers", "2"],
                   check=True, stdout=subprocess.DEVNULL)
    assert _files(out) == _files(ref)
