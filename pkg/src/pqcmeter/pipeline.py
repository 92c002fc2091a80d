"""File-parallel aggregation and snapshot report assembly.

Every input file is reduced to an :class:`Aggregate` of counters; aggregates
merge associatively and commutatively, so the result does not depend on how
files are spread across workers or in which order records arrive.
"""

from __future__ import annotations

import glob
import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache, reduce
from typing import Iterable, Sequence

from .analytics import (
    AdoptionStat,
    Distribution,
    EmptyInput,
    TimeSeries,
    class_share,
    format_percent,
    linear_trend,
    month_of,
    stale_share_from_banners,
    version_share_from_counts,
)
from .anomaly import WeakUsageCounter, observe_weak
from .asn import AsnTable, histogram_from_clients
from .ingest import IngestStats, RdpObservation, SshObservation, TlsObservation, observations
from .registry import WEAK_CLASSES, AlgorithmClass, CryptoRegistry, VersionYearMap, load_registry

REPORT_SCHEMA = "pqcmeter.report/1"
SSH_ROLES = ("cipher", "mac", "hostkey", "kex")
SSH_ROLE_FIELDS = {"cipher": "cipher_alg", "mac": "mac_alg", "hostkey": "host_key_alg", "kex": "kex_alg"}

# External comparison point: Cloudflare's published TLS 1.3 hybrid PQC share.
REFERENCE_TLS_PQC = {
    "ratio": 0.0178,
    "percent": "1.78%",
    "protocol": "tls",
    "source": "Cloudflare, The state of the post-quantum Internet (2024)",
}

SERIES_PREDICATES = ("pqc", "ssh", "weak")


def _empty_roles() -> dict[str, Counter]:
    return {r: Counter() for r in SSH_ROLES}


@dataclass
class Aggregate:
    ingest: IngestStats = field(default_factory=IngestStats)
    files: int = 0
    ssh_roles: dict[str, Counter] = field(default_factory=_empty_roles)
    ssh_records: int = 0
    months: dict[str, Counter] = field(default_factory=lambda: {p: Counter() for p in SERIES_PREDICATES})
    pqc_clients: Counter = field(default_factory=Counter)
    server_banners: Counter = field(default_factory=Counter)
    tls_suites: Counter = field(default_factory=Counter)
    tls_versions: Counter = field(default_factory=Counter)
    rdp_protocols: Counter = field(default_factory=Counter)
    weak: WeakUsageCounter = field(default_factory=WeakUsageCounter)
    first_ts_us: int | None = None
    last_ts_us: int | None = None

    def merge(self, other: "Aggregate") -> "Aggregate":
        return Aggregate(
            ingest=self.ingest.merge(other.ingest),
            files=self.files + other.files,
            ssh_roles={r: self.ssh_roles[r] + other.ssh_roles[r] for r in SSH_ROLES},
            ssh_records=self.ssh_records + other.ssh_records,
            months={p: self.months[p] + other.months[p] for p in SERIES_PREDICATES},
            pqc_clients=self.pqc_clients + other.pqc_clients,
            server_banners=self.server_banners + other.server_banners,
            tls_suites=self.tls_suites + other.tls_suites,
            tls_versions=self.tls_versions + other.tls_versions,
            rdp_protocols=self.rdp_protocols + other.rdp_protocols,
            weak=self.weak.merge(other.weak),
            first_ts_us=_opt(min, self.first_ts_us, other.first_ts_us),
            last_ts_us=_opt(max, self.last_ts_us, other.last_ts_us),
        )

    __add__ = merge

    def observe(self, obs, registry: CryptoRegistry):
        ts = obs.conn.ts_us
        self.first_ts_us = ts if self.first_ts_us is None else min(self.first_ts_us, ts)
        self.last_ts_us = ts if self.last_ts_us is None else max(self.last_ts_us, ts)
        month = month_of(ts)
        if isinstance(obs, SshObservation):
            self._observe_ssh(obs, registry, month)
        elif isinstance(obs, TlsObservation):
            if obs.cipher_suite is not None:
                self.tls_suites[registry.canonical("tls", "suite", obs.cipher_suite)] += 1
            self.tls_versions[obs.tls_version] += 1
        elif isinstance(obs, RdpObservation):
            if obs.security_protocol:
                self.rdp_protocols[registry.canonical("rdp", "security_protocol", obs.security_protocol)] += 1
        if observe_weak(self.weak, obs, registry):
            self.months["weak"][month] += 1

    def _observe_ssh(self, obs: SshObservation, registry: CryptoRegistry, month):
        if not obs.has_algorithms:
            return
        self.ssh_records += 1
        for role in SSH_ROLES:
            ident = getattr(obs, SSH_ROLE_FIELDS[role])
            if ident is not None:
                self.ssh_roles[role][ident] += 1
        if obs.server_banner is not None:
            self.server_banners[obs.server_banner] += 1
        if obs.kex_alg is not None:
            self.months["ssh"][month] += 1
            if registry.classify("ssh", "kex", obs.kex_alg) is AlgorithmClass.PostQuantumHybrid:
                self.months["pqc"][month] += 1
                self.pqc_clients[str(obs.conn.orig_ip)] += 1


def _opt(fn, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return fn(a, b)


@dataclass(frozen=True)
class DateRange:
    start_us: int | None = None
    end_us: int | None = None

    def __post_init__(self):
        if self.start_us is not None and self.end_us is not None and self.start_us > self.end_us:
            raise ValueError("date range start is after its end")

    def __contains__(self, ts_us: int) -> bool:
        return (self.start_us is None or ts_us >= self.start_us) and (self.end_us is None or ts_us <= self.end_us)


def aggregate_source(source, registry: CryptoRegistry, protocols: set[str] | None = None,
                     dates: DateRange | None = None) -> Aggregate:
    agg = Aggregate(files=1)
    for obs in observations(source, agg.ingest, protocols):
        if dates is not None and obs.conn.ts_us not in dates:
            continue
        agg.observe(obs, registry)
    return agg


@lru_cache(maxsize=4)
def _registry_for(path: str | None) -> CryptoRegistry:
    return load_registry(path)


def _worker(args) -> Aggregate:
    path, registry_path, protocols, dates = args
    return aggregate_source(path, _registry_for(registry_path), protocols, dates)


def expand_inputs(patterns: Sequence[str]) -> list[str]:
    """Expand files, directories and globs; sorted, de-duplicated.

    Directories are walked recursively for Zeek log names (``*.log``,
    ``*.log.gz`` and rotated forms); named files are taken as given.
    """
    out: set[str] = set()
    for pat in patterns:
        if os.path.isdir(pat):
            for root, _, files in os.walk(pat):
                out.update(os.path.join(root, f) for f in files if _is_log_name(f))
        elif os.path.isfile(pat):
            out.add(pat)
        else:
            out.update(p for p in glob.glob(pat, recursive=True) if os.path.isfile(p))
    return sorted(out)


_LOG_NAME = re.compile(r"^[^.].*\.log(\.gz)?$")


def _is_log_name(name: str) -> bool:
    return _LOG_NAME.match(name) is not None


def aggregate_files(paths: Iterable[str], registry_path: str | None = None, protocols: set[str] | None = None,
                    dates: DateRange | None = None, workers: int = 1) -> Aggregate:
    paths = list(paths)
    jobs = [(p, registry_path, frozenset(protocols) if protocols else None, dates) for p in paths]
    if workers <= 1 or len(paths) <= 1:
        parts = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_worker, jobs))
    return reduce(Aggregate.merge, parts, Aggregate())


# --- report -------------------------------------------------------------------

def _iso(ts_us: int | None) -> str | None:
    if ts_us is None:
        return None
    return datetime.fromtimestamp(ts_us / 1e6, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def adoption_from_kex(kex: Counter, registry: CryptoRegistry) -> AdoptionStat:
    pqc, total = class_share(kex, registry, "ssh", "kex", [AlgorithmClass.PostQuantumHybrid])
    return AdoptionStat(pqc, total)


def series_for(agg: Aggregate, predicate: str = "pqc") -> TimeSeries:
    if predicate not in SERIES_PREDICATES:
        raise ValueError(f"unknown series predicate {predicate!r}; choose from {SERIES_PREDICATES}")
    return TimeSeries.from_month_counts(agg.months[predicate], predicate)


def snapshot_report(agg: Aggregate, registry: CryptoRegistry, years: VersionYearMap | None = None,
                    asn_table: AsnTable | None = None, top_n: int = 5, cutoff_year: int = 2019) -> dict:
    """Assemble every metric into one JSON-serialisable document.

    Sections without qualifying data are ``null`` rather than zero.
    """
    ssh: dict = {"records": agg.ssh_records}
    try:
        ssh["adoption"] = adoption_from_kex(agg.ssh_roles["kex"], registry).to_dict()
    except EmptyInput:
        ssh["adoption"] = None
    ssh["distributions"] = {r: Distribution.from_counts(agg.ssh_roles[r]).to_dict() for r in SSH_ROLES}
    ssh["stale_servers"] = None
    if years is not None:
        try:
            ssh["stale_servers"] = stale_share_from_banners(agg.server_banners, years, cutoff_year).to_dict()
        except EmptyInput:
            pass
    series = series_for(agg, "pqc")
    ssh["pqc_series"] = series.to_dict()
    ssh["pqc_trend"] = linear_trend(series).to_dict() if len(series.buckets) >= 2 else None

    tls: dict = {"suites": Distribution.from_counts(agg.tls_suites).to_dict()}
    try:
        tls["versions"] = version_share_from_counts(agg.tls_versions)
    except EmptyInput:
        tls["versions"] = None
    weak, total = class_share(agg.tls_suites, registry, "tls", "suite", WEAK_CLASSES)
    tls["weak_suites"] = None if total == 0 else {
        "label": "weak", "count": weak, "total": total, "ratio": weak / total,
        "percent": format_percent(weak / total)}

    asn = None
    if asn_table is not None:
        asn = [{"asn": e.asn, "org_name": e.org_name, "prefix": None if e.prefix is None else str(e.prefix),
                "count": c} for e, c in histogram_from_clients(agg.pqc_clients, asn_table, top_n)]

    return {
        "schema": REPORT_SCHEMA,
        "kind": "snapshot",
        "data_window": {"first": _iso(agg.first_ts_us), "last": _iso(agg.last_ts_us)},
        "ingest": {"files": agg.files, **agg.ingest.to_dict()},
        "ssh": ssh,
        "tls": tls,
        "rdp": {"security_protocols": Distribution.from_counts(agg.rdp_protocols).to_dict()},
        "asn_top": asn,
        "weak_algorithms": [f.to_dict() for f in agg.weak.findings(registry)],
        "reference": {"tls_pqc_adoption": dict(REFERENCE_TLS_PQC)},
        "comparison": {
            "ssh_pqc_percent": ssh["adoption"]["rendered"] if ssh["adoption"] else None,
            "reference_tls_pqc_percent": REFERENCE_TLS_PQC["percent"],
        },
    }


def _when(kind: str, then: dict) -> dict:
    return {"if": {"properties": {"kind": {"const": kind}}}, "then": then}


_SNAPSHOT = {
    "required": ["ingest", "ssh", "tls", "rdp", "asn_top", "weak_algorithms", "reference"],
    "properties": {
        "ingest": {"type": "object", "required": ["records", "malformed"]},
        "ssh": {
            "type": "object",
            "required": ["adoption", "distributions", "stale_servers", "pqc_series"],
            "properties": {
                "adoption": {"type": ["object", "null"],
                             "required": ["pqc_count", "total_count", "ratio", "rendered"]},
                "distributions": {"type": "object", "required": list(SSH_ROLES)},
            },
        },
        "tls": {"type": "object", "required": ["suites", "versions", "weak_suites"]},
        "rdp": {"type": "object"},
        "asn_top": {"type": ["array", "null"]},
        "weak_algorithms": {"type": "array"},
        "reference": {"type": "object", "required": ["tls_pqc_adoption"]},
    },
}

# JSON documents written by the CLI; "kind" selects the shape
REPORT_JSON_SCHEMA = {
    "type": "object",
    "required": ["schema", "kind"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA},
        "kind": {"enum": ["snapshot", "series", "asn", "transcript", "validation"]},
    },
    "allOf": [
        _when("snapshot", _SNAPSHOT),
        _when("series", {"required": ["predicate", "buckets", "trend"],
                         "properties": {"buckets": {"type": "array", "items": {"required": ["month", "count"]}}}}),
        _when("asn", {"required": ["pqc_total", "top"], "properties": {"top": {"type": "array"}}}),
        _when("transcript", {"required": ["negotiated_kex", "steps", "final_key", "agreed"],
                             "properties": {"steps": {"type": "array", "minItems": 5, "maxItems": 5}}}),
        _when("validation", {"required": ["passed", "reports"],
                             "properties": {"reports": {"type": "array", "items": {
                                 "type": "object", "required": ["subject", "passed", "checks"]}}}}),
    ],
}
