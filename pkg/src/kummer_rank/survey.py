"""Batch survey over primes N = 1 mod p with checkpoint/resume.

Output directory layout::

    records.csv       one row per prime, ascending N
    records.jsonl     the same records as JSON lines (optional)
    checkpoint.json   {config_hash, last_n, partial_counts}
    summary.json      final aggregate, written when the run completes

Records are merged in ascending-N order by a single writer no matter which
worker finished first, so the files are byte-identical for any worker count
and across kill/resume cycles.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import multiprocessing as mp
import os
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import BadRange, ConfigMismatch, IoFailure, KummerError, MixedP
from .modarith import PrimePair
from .selmer import dimension_string, rank_estimate, s_classes

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "p",
    "N",
    "dim_string",
    "rank_lower",
    "rank_upper",
    "rank_exact",
    "mu",
    "s_labels",
    "degenerate_flag",
    "error",
    "elapsed_us",
)
FORMAT_VERSION = 1
ERROR_KEY = "ERROR"
_SEGMENT = 1 << 18


# ---------------------------------------------------------------------------
# sieve


def _base_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, np.int64)
    flags = np.ones(limit + 1, bool)
    flags[:2] = False
    flags[4::2] = False
    for q in range(3, math.isqrt(limit) + 1, 2):
        if flags[q]:
            flags[q * q :: 2 * q] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve(p: int, lo: int, hi: int) -> list[int]:
    """Primes N in [lo, hi] with N = 1 mod p, ascending.

    Sieves the progression N = 1 + 2p*t directly: for each base prime q the
    composite indices form one residue class t = -(2p)^-1 mod q.
    """
    if not (2 <= lo <= hi < 1 << 63):
        raise BadRange(f"need 2 <= lo <= hi < 2**63, got lo={lo} hi={hi}")
    step = 2 * p
    t_lo = max(1, -(-(lo - 1) // step))
    t_hi = (hi - 1) // step
    if t_hi < t_lo:
        return []
    qs = [int(q) for q in _base_primes(math.isqrt(1 + step * t_hi)) if q != 2 and q != p]
    starts = {q: (-pow(step, -1, q)) % q for q in qs}
    out: list[int] = []
    for a in range(t_lo, t_hi + 1, _SEGMENT):
        b = min(a + _SEGMENT - 1, t_hi)
        alive = np.ones(b - a + 1, bool)
        for q in qs:
            first = a + (starts[q] - a) % q
            if first > b:
                continue
            alive[first - a :: q] = False
            if 1 + step * first == q:  # q itself lies in the progression
                alive[first - a] = True
        ts = np.flatnonzero(alive) + a
        out.extend(int(1 + step * t) for t in ts)
    return out


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class PrimeRecord:
    p: int
    N: int
    dim_string: str = ""
    rank_lower: int | None = None
    rank_upper: int | None = None
    rank_exact: bool = False
    mu: int | None = None
    s_labels: tuple[int, ...] = ()
    degenerate_flag: bool = False
    error: str = ""
    elapsed_us: int | None = None

    @property
    def key(self) -> str:
        return ERROR_KEY if self.error else self.dim_string

    def to_row(self) -> list[str]:
        def opt(v):
            return "" if v is None else str(v)

        return [
            str(self.p),
            str(self.N),
            self.dim_string,
            opt(self.rank_lower),
            opt(self.rank_upper),
            str(int(self.rank_exact)),
            opt(self.mu),
            ";".join(map(str, self.s_labels)),
            str(int(self.degenerate_flag)),
            self.error,
            opt(self.elapsed_us),
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "PrimeRecord":
        def opt(v: str):
            return None if v == "" else int(v)

        return cls(
            p=int(row["p"]),
            N=int(row["N"]),
            dim_string=row["dim_string"],
            rank_lower=opt(row["rank_lower"]),
            rank_upper=opt(row["rank_upper"]),
            rank_exact=row["rank_exact"] == "1",
            mu=opt(row["mu"]),
            s_labels=tuple(int(x) for x in row["s_labels"].split(";") if x != ""),
            degenerate_flag=row["degenerate_flag"] == "1",
            error=row["error"],
            elapsed_us=opt(row["elapsed_us"]),
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["rank_exact"] = int(self.rank_exact)
        d["degenerate_flag"] = int(self.degenerate_flag)
        d["s_labels"] = list(self.s_labels)
        return json.dumps({k: d[k] for k in CSV_COLUMNS})

    @classmethod
    def from_json(cls, line: str) -> "PrimeRecord":
        d = json.loads(line)
        d["rank_exact"] = bool(d["rank_exact"])
        d["degenerate_flag"] = bool(d["degenerate_flag"])
        d["s_labels"] = tuple(d["s_labels"])
        return cls(**d)


def csv_line(record: PrimeRecord) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(record.to_row())
    return buf.getvalue()


CSV_HEADER = ",".join(CSV_COLUMNS) + "\n"


def process_prime(p: int, n: int, timing: bool = False) -> PrimeRecord:
    """Evaluate one prime; errors land in the record instead of propagating."""
    t0 = time.perf_counter_ns()
    try:
        pair = PrimePair(p, n)
        labels = tuple(c.label for c in s_classes(pair))
        if p == 3:
            dims_str, lo, up, exact, mu, degenerate = "", 1, 1, True, 0, False
        else:
            dims = dimension_string(pair)
            est = rank_estimate(pair, dims)
            dims_str, lo, up, exact, mu, degenerate = str(dims), est.lower, est.upper, est.exact, est.mu, dims.degenerate
        rec = PrimeRecord(p, n, dims_str, lo, up, exact, mu, labels, degenerate)
    except KummerError as exc:
        rec = PrimeRecord(p, n, error=f"{type(exc).__name__}: {exc}")
    if timing:
        rec = replace(rec, elapsed_us=(time.perf_counter_ns() - t0) // 1000)
    return rec


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class TableAggregate:
    p: int | None = None
    counts: Counter = field(default_factory=Counter)
    rank_counts: Counter = field(default_factory=Counter)  # "string:rank" for exact records
    total: int = 0

    def add(self, rec: PrimeRecord) -> None:
        if self.p is None:
            self.p = rec.p
        elif rec.p != self.p:
            raise MixedP(f"record for p={rec.p} in a p={self.p} aggregate")
        self.counts[rec.key] += 1
        if not rec.error and rec.rank_exact:
            self.rank_counts[f"{rec.dim_string}:{rec.rank_lower}"] += 1
        self.total += 1

    def merge(self, other: "TableAggregate") -> "TableAggregate":
        if self.p is not None and other.p is not None and self.p != other.p:
            raise MixedP(f"cannot merge p={self.p} with p={other.p}")
        return TableAggregate(
            self.p if self.p is not None else other.p,
            self.counts + other.counts,
            self.rank_counts + other.rank_counts,
            self.total + other.total,
        )

    def fraction(self, dim_string: str) -> float:
        return self.counts[dim_string] / self.total if self.total else 0.0

    def fraction_entry(self, i: int, value: str = "1") -> float:
        """Share of all processed primes whose entry i equals value."""
        hits = sum(c for s, c in self.counts.items() if s != ERROR_KEY and len(s) >= i and s[i - 1] == value)
        return hits / self.total if self.total else 0.0

    def fraction_rank_at_least(self, r: int) -> float:
        hits = sum(c for k, c in self.rank_counts.items() if int(k.rsplit(":", 1)[1]) >= r)
        return hits / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "total": self.total,
            "counts": dict(sorted(self.counts.items())),
            "rank_counts": dict(sorted(self.rank_counts.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TableAggregate":
        return cls(d.get("p"), Counter(d.get("counts", {})), Counter(d.get("rank_counts", {})), d.get("total", 0))

    def render(self) -> str:
        """Text table in the layout of the published data tables."""
        lines = [f"p = {self.p}", f"{'Dimensions':<12}{'r_K':>6}{'Number of N':>14}{'share':>9}"]
        for s in sorted(self.counts, key=lambda k: (k == ERROR_KEY, _string_order(k))):
            ranks = sorted(int(k.rsplit(":", 1)[1]) for k in self.rank_counts if k.rsplit(":", 1)[0] == s)
            rk = ",".join(map(str, ranks)) if ranks and sum(
                self.rank_counts[f"{s}:{r}"] for r in ranks
            ) == self.counts[s] else "-"
            lines.append(f"{s or '(empty)':<12}{rk:>6}{self.counts[s]:>14,}{self.fraction(s):>9.4f}")
        lines.append(f"{'Total':<12}{'':>6}{self.total:>14,}")
        return "\n".join(lines)


def _string_order(s: str) -> tuple:
    # rows ordered by number of ones, then by the position of the ones
    return (s.count("1"), [-ord(c) for c in s])


def aggregate(records: Iterable[PrimeRecord], p: int | None = None) -> TableAggregate:
    agg = TableAggregate(p)
    for rec in records:
        agg.add(rec)
    return agg


# ---------------------------------------------------------------------------
# the run


@dataclass(frozen=True)
class SurveyConfig:
    p: int
    max_n: int
    output: Path
    workers: int = 1
    resume: bool = False
    min_n: int = 2
    checkpoint_every: int = 10_000
    timing: bool = False
    jsonl: bool = True
    stop_after: int | None = None  # process at most this many new records, then return
    chunk_size: int = 32

    def config_hash(self) -> str:
        key = {
            "p": self.p,
            "min_n": self.min_n,
            "max_n": self.max_n,
            "timing": self.timing,
            "jsonl": self.jsonl,
            "format": FORMAT_VERSION,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


def _process_chunk(args: tuple[int, tuple[int, ...], bool]) -> list[PrimeRecord]:
    p, ns, timing = args
    return [process_prime(p, n, timing) for n in ns]


def _chunks(ns: list[int], size: int) -> Iterator[tuple[int, ...]]:
    for k in range(0, len(ns), size):
        yield tuple(ns[k : k + size])


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _truncate_to(path: Path, last_n: int, n_of_line, header: str = "") -> int:
    """Keep the header and the lines whose N <= last_n; return kept record count."""
    if not path.exists():
        _atomic_write(path, header)
        return 0
    kept, count = [header] if header else [], 0
    with open(path, newline="") as fh:
        if header:
            fh.readline()
        for line in fh:
            if not line.endswith("\n"):
                break  # torn final line from a killed run
            try:
                n = n_of_line(line)
            except (ValueError, KeyError, IndexError, json.JSONDecodeError):
                break
            if n > last_n:
                break
            kept.append(line)
            count += 1
    _atomic_write(path, "".join(kept))
    return count


def _csv_n(line: str) -> int:
    return int(line.split(",", 2)[1])


def _jsonl_n(line: str) -> int:
    return int(json.loads(line)["N"])


def run_survey(config: SurveyConfig) -> TableAggregate:
    out = Path(config.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    csv_path, jsonl_path = out / "records.csv", out / "records.jsonl"
    ckpt_path, summary_path = out / "checkpoint.json", out / "summary.json"
    chash = config.config_hash()

    last_n, agg = 0, TableAggregate(config.p)
    try:
        if config.resume and ckpt_path.exists():
            ckpt = json.loads(ckpt_path.read_text())
            if ckpt.get("config_hash") != chash:
                raise ConfigMismatch("checkpoint was written with a different configuration")
            last_n = int(ckpt["last_n"])
            agg = TableAggregate.from_dict(ckpt["partial_counts"])
            kept = _truncate_to(csv_path, last_n, _csv_n, CSV_HEADER)
            if config.jsonl:
                _truncate_to(jsonl_path, last_n, _jsonl_n)
            if kept != agg.total:
                raise IoFailure(f"records.csv holds {kept} rows up to N={last_n}, checkpoint says {agg.total}")
            log.info("resuming after N=%d (%d records)", last_n, kept)
        else:
            _atomic_write(csv_path, CSV_HEADER)
            if config.jsonl:
                _atomic_write(jsonl_path, "")
            if summary_path.exists():
                summary_path.unlink()
            _write_checkpoint(ckpt_path, chash, 0, agg)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

    primes = [n for n in sieve(config.p, config.min_n, config.max_n) if n > last_n]
    if config.stop_after is not None:
        primes = primes[: config.stop_after]
    log.info("p=%d: %d primes to process with %d worker(s)", config.p, len(primes), config.workers)

    tasks = ((config.p, ns, config.timing) for ns in _chunks(primes, config.chunk_size))
    pool = mp.get_context("fork").Pool(config.workers) if config.workers > 1 else None
    results = pool.imap(_process_chunk, tasks) if pool else map(_process_chunk, tasks)
    done = 0
    try:
        with open(csv_path, "a", newline="") as fcsv, (
            open(jsonl_path, "a") if config.jsonl else open(os.devnull, "w")
        ) as fjson:
            for chunk in results:
                for rec in chunk:
                    fcsv.write(csv_line(rec))
                    if config.jsonl:
                        fjson.write(rec.to_json() + "\n")
                    agg.add(rec)
                    done += 1
                    if done % config.checkpoint_every == 0:
                        _sync(fcsv, fjson)
                        _write_checkpoint(ckpt_path, chash, rec.N, agg)
            _sync(fcsv, fjson)
            final_n = primes[-1] if primes else last_n
            _write_checkpoint(ckpt_path, chash, final_n, agg)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    finally:
        if pool:
            pool.terminate()

    finished = config.stop_after is None or len(primes) < config.stop_after or not _has_more(config, primes)
    if finished:
        _atomic_write(summary_path, json.dumps(agg.to_dict(), indent=2) + "\n")
    return agg


def _has_more(config: SurveyConfig, primes: list[int]) -> bool:
    last = primes[-1] if primes else config.min_n
    return last < config.max_n and bool(sieve(config.p, min(last + 1, config.max_n), config.max_n))


def _sync(*handles) -> None:
    for fh in handles:
        fh.flush()
        try:
            os.fsync(fh.fileno())
        except OSError:
            pass


def _write_checkpoint(path: Path, chash: str, last_n: int, agg: TableAggregate) -> None:
    body = {"config_hash": chash, "last_n": last_n, "partial_counts": agg.to_dict()}
    _atomic_write(path, json.dumps(body, sort_keys=True) + "\n")


def read_records(path: Path) -> list[PrimeRecord]:
    """Load records from a records.csv / records.jsonl file or a survey directory."""
    path = Path(path)
    if path.is_dir():
        path = path / "records.csv"
    try:
        with open(path, newline="") as fh:
            if path.suffix == ".jsonl":
                return [PrimeRecord.from_json(line) for line in fh if line.strip()]
            return [PrimeRecord.from_row(row) for row in csv.DictReader(fh)]
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
