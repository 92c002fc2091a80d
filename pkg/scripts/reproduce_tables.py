"""Regenerate every synthetic fixture and print the headline measurements.

    python scripts/reproduce_tables.py [--out DIR] [--scale-tls 1.0]
"""

import argparse
import contextlib
import io
import json
import tempfile
from pathlib import Path

from pqcmeter import cli, loggen


def run(*argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(list(argv))
    if code != 0:
        raise SystemExit(f"pqcmeter {' '.join(argv)} exited {code}")
    return buf.getvalue()


def show_distribution(title, dist):
    print(f"\n{title} (n={dist['total']})")
    for item in dist["items"]:
        print(f"  {item['identifier']:<48} {item['count']:>8}  {item['percent']:>7}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="fixture directory (default: temporary)")
    ap.add_argument("--scale-tls", type=float, default=1.0)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(args.out or tmp)
        for name in loggen.PROFILES:
            scale = args.scale_tls if name == "tls-top10" else 1.0
            loggen.generate(loggen.GenProfile(name, scale=scale), root / name)

        ssh = json.loads(run("report", "-i", str(root / "table2-ssh-day")))["ssh"]
        for role in ("cipher", "mac", "hostkey", "kex"):
            show_distribution(f"SSH {role}", ssh["distributions"][role])
        print(f"\nsample day PQC adoption {ssh['adoption']['rendered']}")

        tls = json.loads(run("report", "-i", str(root / "tls-top10")))["tls"]
        show_distribution("TLS cipher suites", tls["suites"])
        print(f"weak suite share {tls['weak_suites']['percent']}")

        head = json.loads(run("report", "-i", str(root / "trend-2023-2024" / "headline")))["ssh"]["adoption"]
        print(f"\nheadline PQC adoption {head['rendered']} ({head['pqc_count']}/{head['total_count']})")

        series = json.loads(run("series", "-i", str(root / "trend-2023-2024" / "trend"), "--format", "json"))
        print("\nmonthly PQC connections")
        for row in series["buckets"]:
            print(f"  {row['month']}  {row['count']:>6}")
        trend = series["trend"]
        print(f"  slope {trend['slope']:.2f}/month  r^2 {trend['r_squared']:.3f}")

        stale = json.loads(run("report", "-i", str(root / "stale-servers-83")))["ssh"]["stale_servers"]
        print(f"\nservers released before 2019: {stale['fraction']:.1%} of {stale['resolvable']} resolvable")

        d = root / "asn-head-tail"
        asn = json.loads(run("asn", "-i", str(d), "--asn-table", str(d / "asn_table.csv"), "--format", "json"))
        print(f"\ntop autonomous systems of {asn['pqc_total']} PQC connections")
        for row in asn["top"]:
            print(f"  AS{row['asn']:<8} {row['count']:>6}  {row['org_name']}")

        alerts = run("alerts", "-i", str(root / "downgrade-episode"), "--kind", "downgrade").splitlines()
        print(f"\ndowngrade alerts: {len(alerts)}")


if __name__ == "__main__":
    main()
