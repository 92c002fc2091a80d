"""Measure ingest throughput on a large synthetic ssl.log.gz.

The file is built by repeating one block of calibrated TLS rows until the
decompressed size reaches ``--size-mb``. Throughput is decompressed TSV bytes
per second of wall time, for bare parsing and for the full aggregation.

    python scripts/bench_throughput.py --size-mb 1024
"""

import argparse
import gzip
import tempfile
import time
from pathlib import Path

from pqcmeter import loggen
from pqcmeter.ingest import IngestStats, observations
from pqcmeter.pipeline import aggregate_source
from pqcmeter.registry import load_registry


def build(path: Path, size_mb: float, seed: int) -> int:
    rows = loggen.tls_rows(0.02, seed)
    rows.sort(key=lambda r: r["ts"])
    text = loggen.render_log(loggen.SSL_SCHEMA, rows, close=False)
    cut = text.index(b"\n", text.index(b"#types")) + 1
    header, body = text[:cut], text[cut:]
    target = int(size_mb * 1e6)
    written = 0
    with gzip.open(path, "wb", compresslevel=1) as gz:
        gz.write(header)
        written += len(header)
        while written < target:
            gz.write(body)
            written += len(body)
    return written


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size-mb", type=float, default=1024)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--keep", help="write the file here instead of a temporary directory")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(args.keep) if args.keep else Path(tmp) / "ssl.log.gz"
        size, build_s = timed(lambda: build(path, args.size_mb, args.seed))
        print(f"built {size / 1e6:.0f} MB decompressed ({path.stat().st_size / 1e6:.0f} MB gzip) in {build_s:.1f} s")

        stats = IngestStats()
        n, parse_s = timed(lambda: sum(1 for _ in observations(path, stats)))
        print(f"parse      {n} records  {stats.bytes_read / 1e6 / parse_s:7.1f} MB/s")

        registry = load_registry()
        agg, agg_s = timed(lambda: aggregate_source(path, registry))
        print(f"aggregate  {sum(agg.tls_suites.values())} suites  {agg.ingest.bytes_read / 1e6 / agg_s:7.1f} MB/s")


if __name__ == "__main__":
    main()
