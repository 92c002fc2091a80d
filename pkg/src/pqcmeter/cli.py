"""Command-line front end: ``pqcmeter <subcommand>``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 malformed-line ratio
above threshold, 4 key-exchange negotiation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from . import __version__
from .analytics import linear_trend
from .anomaly import DEFAULT_WINDOW_S, alerts_to_jsonl, detect_downgrades
from .asn import AsnTableError, histogram_from_clients, load_asn_table
from .ingest import SshObservation, observations
from .kexmodel import (
    AlgorithmPolicy,
    CurveParams,
    NegotiationFailure,
    SntrupParams,
    simulate_handshake,
    validate_curve_params,
    validate_sntrup_params,
)
from .loggen import PROFILES, GenProfile, generate
from .pipeline import (
    REPORT_SCHEMA,
    SERIES_PREDICATES,
    DateRange,
    aggregate_files,
    expand_inputs,
    series_for,
    snapshot_report,
)
from .registry import RegistryError, load_registry, load_version_years

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_QUALITY, EXIT_NEGOTIATION = 0, 1, 2, 3, 4

log = logging.getLogger("pqcmeter")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    protocols: set[str] | None = None
    registry_path: str | None = None
    asn_table_path: str | None = None
    dates: DateRange | None = None
    output_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.output_format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")


def _parse_day(value: str | None, end: bool = False) -> int | None:
    if value is None:
        return None
    try:
        day = datetime.strptime(value, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    except ValueError:
        raise UsageError(f"dates are YYYY-MM-DD (UTC), got {value!r}") from None
    if end:
        day += timedelta(days=1)
        return int(day.timestamp()) * 1_000_000 - 1
    return int(day.timestamp()) * 1_000_000


def config_from_args(args) -> RunConfig:
    try:
        dates = DateRange(_parse_day(args.date_from), _parse_day(args.date_to, end=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(
        inputs=[p for group in args.input or [] for p in group],
        protocols=set(args.protocol) if args.protocol else None,
        registry_path=args.registry,
        asn_table_path=args.asn_table,
        dates=dates if (dates.start_us or dates.end_us) else None,
        output_format=args.format,
        workers=args.workers,
    )


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _stamp(doc: dict, args) -> dict:
    if getattr(args, "stamp", False):
        doc["generated_at"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return doc


def _aggregate(cfg: RunConfig):
    paths = expand_inputs(cfg.inputs)
    if not paths:
        raise InputError("no input files matched " + (", ".join(cfg.inputs) or "(no --input given)"))
    for p in paths:
        try:
            with open(p, "rb"):
                pass
        except OSError as exc:
            raise InputError(f"cannot read {p}: {exc.strerror}") from None
    try:
        registry = load_registry(cfg.registry_path)
    except RegistryError as exc:
        raise InputError(f"registry: {exc}") from None
    agg = aggregate_files(paths, cfg.registry_path, cfg.protocols, cfg.dates, cfg.workers)
    return agg, registry


def _quality_exit(agg, args) -> int:
    lines = agg.ingest.lines
    if lines and agg.ingest.malformed / lines > args.max_malformed_ratio:
        print(f"pqcmeter: malformed-line ratio {agg.ingest.malformed / lines:.4f} exceeds "
              f"{args.max_malformed_ratio}", file=sys.stderr)
        return EXIT_QUALITY
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = config_from_args(args)
    agg, registry = _aggregate(cfg)
    table = _load_asn(cfg.asn_table_path) if cfg.asn_table_path else None
    doc = snapshot_report(agg, registry, load_version_years(), table, args.top, args.cutoff_year)
    if cfg.output_format == "json":
        sys.stdout.write(_dump_json(_stamp(doc, args)))
    else:
        rows = []
        for role, dist in doc["ssh"]["distributions"].items():
            rows += [(f"ssh.{role}", i["identifier"], i["count"], repr(i["ratio"]), i["percent"]) for i in dist["items"]]
        for section, dist in (("tls.suite", doc["tls"]["suites"]), ("rdp.security_protocol",
                                                                     doc["rdp"]["security_protocols"])):
            rows += [(section, i["identifier"], i["count"], repr(i["ratio"]), i["percent"]) for i in dist["items"]]
        sys.stdout.write(_csv(rows, ["distribution", "identifier", "count", "ratio", "percent"]))
    return _quality_exit(agg, args)


def cmd_series(args) -> int:
    cfg = config_from_args(args)
    agg, _ = _aggregate(cfg)
    series = series_for(agg, args.predicate)
    trend = linear_trend(series) if len(series.buckets) >= 2 else None
    if cfg.output_format == "csv":
        sys.stdout.write(_csv(series.buckets, ["month", "count"]))
        if trend is not None:
            print(f"trend: slope={trend.slope:.6g}/month intercept={trend.intercept:.6g} "
                  f"r_squared={trend.r_squared:.6f}", file=sys.stderr)
    else:
        doc = {"schema": REPORT_SCHEMA, "kind": "series", **series.to_dict(),
               "trend": trend.to_dict() if trend else None}
        sys.stdout.write(_dump_json(_stamp(doc, args)))
    return _quality_exit(agg, args)


def _load_asn(path):
    try:
        return load_asn_table(path)
    except AsnTableError as exc:
        raise InputError(str(exc)) from None


def cmd_asn(args) -> int:
    cfg = config_from_args(args)
    if not cfg.asn_table_path:
        raise UsageError("asn needs --asn-table FILE (CSV rows: CIDR,ASN,org-name)")
    table = _load_asn(cfg.asn_table_path)
    agg, _ = _aggregate(cfg)
    hist = histogram_from_clients(agg.pqc_clients, table, args.top)
    total = sum(agg.pqc_clients.values())
    rows = [(rank, e.asn, e.org_name, "" if e.prefix is None else str(e.prefix), c,
             repr(c / total) if total else "") for rank, (e, c) in enumerate(hist, 1)]
    if cfg.output_format == "csv":
        sys.stdout.write(_csv(rows, ["rank", "asn", "org_name", "prefix", "count", "share"]))
    else:
        doc = {"schema": REPORT_SCHEMA, "kind": "asn", "pqc_total": total,
               "top": [dict(zip(["rank", "asn", "org_name", "prefix", "count"], r[:5])) for r in rows]}
        sys.stdout.write(_dump_json(_stamp(doc, args)))
    return _quality_exit(agg, args)


def cmd_alerts(args) -> int:
    cfg = config_from_args(args)
    paths = expand_inputs(cfg.inputs)
    if not paths:
        raise InputError("no input files matched " + (", ".join(cfg.inputs) or "(no --input given)"))
    try:
        registry = load_registry(cfg.registry_path)
    except RegistryError as exc:
        raise InputError(f"registry: {exc}") from None
    out = []
    if args.kind in ("downgrade", "all"):
        ssh = []
        for p in paths:
            try:
                ssh.extend(o for o in observations(p, protocols={"ssh"}) if isinstance(o, SshObservation)
                           and (cfg.dates is None or o.conn.ts_us in cfg.dates))
            except OSError as exc:
                raise InputError(f"cannot read {p}: {exc}") from None
        out.append(alerts_to_jsonl(detect_downgrades(ssh, registry, args.window_days * 86400)))
    if args.kind in ("weak", "all"):
        agg = aggregate_files(paths, cfg.registry_path, cfg.protocols, cfg.dates, cfg.workers)
        out.append("".join(json.dumps(f.to_dict(), sort_keys=True) + "\n" for f in agg.weak.findings(registry)))
    sys.stdout.write("".join(out))
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        profile = GenProfile(args.profile, args.scale, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        paths = generate(profile, args.out)
    except OSError as exc:
        raise InputError(str(exc)) from None
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        client = AlgorithmPolicy.parse(args.client_kex)
        server = AlgorithmPolicy.parse(args.server_kex)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kem_seed = args.kem_seed if args.kem_seed is not None else args.seed
    ecdh_seed = args.ecdh_seed if args.ecdh_seed is not None else args.seed + 1
    try:
        t = simulate_handshake(client, server, kem_seed, ecdh_seed)
    except NegotiationFailure as exc:
        print(f"pqcmeter: negotiation failed: {exc}", file=sys.stderr)
        return EXIT_NEGOTIATION
    sys.stdout.write(_dump_json({"schema": REPORT_SCHEMA, "kind": "transcript", **t.to_dict()}))
    return EXIT_OK


def cmd_validate_params(args) -> int:
    reports = [
        validate_sntrup_params(SntrupParams(args.p, args.q, args.w), irreducibility=not args.skip_irreducibility),
        validate_curve_params(CurveParams(args.modulus, args.A)),
    ]
    doc = {"schema": REPORT_SCHEMA, "kind": "validation", "passed": all(r.passed for r in reports),
           "reports": [r.to_dict() for r in reports]}
    sys.stdout.write(_dump_json(_stamp(doc, args)))
    return EXIT_OK


def _common(p: argparse.ArgumentParser):
    p.add_argument("--input", "-i", action="append", nargs="+", metavar="PATH",
                   help="log files, directories or globs (repeatable)")
    p.add_argument("--protocol", action="append", choices=("ssh", "tls", "rdp"), help="restrict to protocol")
    p.add_argument("--registry", help="classification registry TSV (default: embedded)")
    p.add_argument("--asn-table", help="CIDR,ASN,org-name CSV")
    p.add_argument("--from", dest="date_from", metavar="YYYY-MM-DD", help="first UTC day to include")
    p.add_argument("--to", dest="date_to", metavar="YYYY-MM-DD", help="last UTC day to include")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1, help="files parsed in parallel")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-malformed-ratio", type=float, default=0.05,
                   help="exit 3 when malformed lines exceed this fraction")
    p.add_argument("--stamp", action="store_true", help="add wall-clock generated_at to JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pqcmeter", description="Measure PQC adoption in Zeek connection logs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("report", help="snapshot report of every metric")
    _common(p)
    p.add_argument("--top", type=int, default=5, help="ASN histogram length")
    p.add_argument("--cutoff-year", type=int, default=2019, help="stale server release-year cutoff")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("series", help="monthly counts as month,count")
    _common(p)
    p.add_argument("--predicate", choices=SERIES_PREDICATES, default="pqc")
    p.set_defaults(func=cmd_series, format="csv")

    p = sub.add_parser("asn", help="top autonomous systems of PQC clients")
    _common(p)
    p.add_argument("-n", "--top", type=int, default=5)
    p.set_defaults(func=cmd_asn, format="csv")

    p = sub.add_parser("alerts", help="heuristic downgrade alerts and weak-algorithm findings (JSON lines)")
    _common(p)
    p.add_argument("--kind", choices=("downgrade", "weak", "all"), default="all")
    p.add_argument("--window-days", type=float, default=DEFAULT_WINDOW_S / 86400)
    p.set_defaults(func=cmd_alerts)

    p = sub.add_parser("gen", help="write a calibrated synthetic fixture")
    p.add_argument("profile", choices=PROFILES)
    p.add_argument("--out", "-o", required=True, help="output directory")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="model the hybrid key exchange")
    p.add_argument("--client-kex", default="pqc,classical", help="comma list; 'pqc'/'classical' shorthands")
    p.add_argument("--server-kex", default="pqc,classical")
    p.add_argument("--kem-seed", type=int)
    p.add_argument("--ecdh-seed", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate-params", help="check the sntrup761 and Curve25519 parameters")
    p.add_argument("--p", type=int, default=SntrupParams.p)
    p.add_argument("--q", type=int, default=SntrupParams.q)
    p.add_argument("--w", type=int, default=SntrupParams.w)
    p.add_argument("--modulus", type=int, default=CurveParams.modulus)
    p.add_argument("--A", type=int, default=CurveParams.A)
    p.add_argument("--skip-irreducibility", action="store_true", help="skip the multi-second polynomial test")
    p.add_argument("--stamp", action="store_true")
    p.set_defaults(func=cmd_validate_params)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors (1), --help and --version (0) come back as return codes
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pqcmeter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"pqcmeter: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
