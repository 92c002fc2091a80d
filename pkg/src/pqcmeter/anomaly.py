"""Heuristic detectors: weak-algorithm usage and PQC-to-classical downgrades.

The downgrade rule is a heuristic, not evidence of an attack. A client-server
pair that negotiated a post-quantum hybrid key exchange and later, within a
window, settles on a classical one while presenting the same or a newer client
banner is flagged once per contiguous episode.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable

from .analytics import ROLE_FIELDS
from .ingest import RdpObservation, SshObservation, TlsObservation
from .registry import WEAK_CLASSES, AlgorithmClass, CryptoRegistry, parse_banner, version_key

DEFAULT_WINDOW_S = 30 * 24 * 3600
MAX_SAMPLE_UIDS = 10


@dataclass(frozen=True)
class DowngradeAlert:
    client_ip: str
    server_ip: str
    first_pqc_ts: float
    downgraded_ts: float
    pqc_kex: str
    fallback_kex: str
    client_banner_then: str | None
    client_banner_now: str | None

    def to_dict(self) -> dict:
        return {
            "kind": "pqc_downgrade",
            "heuristic": True,
            "client_ip": self.client_ip,
            "server_ip": self.server_ip,
            "first_pqc_ts": self.first_pqc_ts,
            "first_pqc_time": _iso(self.first_pqc_ts),
            "downgraded_ts": self.downgraded_ts,
            "downgraded_time": _iso(self.downgraded_ts),
            "pqc_kex": self.pqc_kex,
            "fallback_kex": self.fallback_kex,
            "client_banner_then": self.client_banner_then,
            "client_banner_now": self.client_banner_now,
        }


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def banner_not_older(now: str | None, then: str | None) -> bool:
    """True when ``now`` is the same banner as ``then`` or a newer version of the same software."""
    if now == then:
        return True
    a, b = parse_banner(now), parse_banner(then)
    if a is None or b is None or a[0] != b[0]:
        return False
    return version_key(a[1]) >= version_key(b[1])


def _pair_key(obs: SshObservation) -> tuple[str, str]:
    return str(obs.conn.orig_ip), str(obs.conn.resp_ip)


def _scan_pair(events: list[SshObservation], registry: CryptoRegistry, window_us: int) -> list[DowngradeAlert]:
    alerts = []
    last_pqc: SshObservation | None = None
    in_episode = False
    for obs in events:
        cls = registry.classify("ssh", "kex", obs.kex_alg)
        if cls is AlgorithmClass.PostQuantumHybrid:
            last_pqc = obs
            in_episode = False
            continue
        # an unlisted identifier may well be a newer PQC scheme; only known classes count as fallback
        if cls is AlgorithmClass.Unknown or in_episode or last_pqc is None:
            continue
        if obs.conn.ts_us <= last_pqc.conn.ts_us or obs.conn.ts_us - last_pqc.conn.ts_us > window_us:
            continue
        if not banner_not_older(obs.client_banner, last_pqc.client_banner):
            continue
        client, server = _pair_key(obs)
        alerts.append(DowngradeAlert(
            client, server, last_pqc.conn.ts, obs.conn.ts, last_pqc.kex_alg, obs.kex_alg,
            last_pqc.client_banner, obs.client_banner))
        in_episode = True
    return alerts


def detect_downgrades(observations: Iterable[SshObservation], registry: CryptoRegistry,
                      window_s: float = DEFAULT_WINDOW_S) -> list[DowngradeAlert]:
    """Scan each (client, server) pair in timestamp order.

    Observations without a key-exchange identifier are ignored. Output is
    sorted by (client, server, downgrade time) so it does not depend on input
    interleaving.
    """
    pairs: dict[tuple[str, str], list[SshObservation]] = defaultdict(list)
    for obs in observations:
        if obs.kex_alg is not None:
            pairs[_pair_key(obs)].append(obs)
    window_us = int(window_s * 1_000_000)
    alerts = []
    for key in sorted(pairs):
        events = sorted(pairs[key], key=lambda o: (o.conn.ts_us, o.conn.uid))
        alerts.extend(_scan_pair(events, registry, window_us))
    return alerts


def alerts_to_jsonl(alerts: Iterable[DowngradeAlert]) -> str:
    return "".join(json.dumps(a.to_dict(), sort_keys=True) + "\n" for a in alerts)


@dataclass
class DeprecationFinding:
    identifier: str
    protocol: str
    role: str
    cls: AlgorithmClass
    count: int = 0
    sample_uids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": "weak_algorithm", "identifier": self.identifier, "protocol": self.protocol,
                "role": self.role, "class": self.cls.value, "count": self.count,
                "sample_uids": list(self.sample_uids)}


class WeakUsageCounter:
    """Mergeable tally of Deprecated/Insecure identifiers with sample connection uids."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.uids: dict[tuple[str, str, str], list[str]] = {}

    def add(self, key: tuple[str, str, str], uid: str):
        self.counts[key] += 1
        sample = self.uids.setdefault(key, [])
        # keep the lexicographically smallest uids so merges are partition-independent
        if uid in sample:
            return
        if len(sample) < MAX_SAMPLE_UIDS or uid < sample[-1]:
            sample.append(uid)
            sample.sort()
            del sample[MAX_SAMPLE_UIDS:]

    def merge(self, other: "WeakUsageCounter") -> "WeakUsageCounter":
        out = WeakUsageCounter()
        out.counts = self.counts + other.counts
        for key in set(self.uids) | set(other.uids):
            out.uids[key] = sorted(set(self.uids.get(key, [])) | set(other.uids.get(key, [])))[:MAX_SAMPLE_UIDS]
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeakUsageCounter):
            return NotImplemented
        return +self.counts == +other.counts and self.uids == other.uids

    __hash__ = None

    def findings(self, registry: CryptoRegistry) -> list[DeprecationFinding]:
        out = []
        for (ident, proto, role), n in self.counts.items():
            cls = registry.classify(proto, role, ident)
            out.append(DeprecationFinding(ident, proto, role, cls, n,
                                          list(self.uids.get((ident, proto, role), []))))
        out.sort(key=lambda f: (f.protocol, f.role, -f.count, f.identifier))
        return out


def observe_weak(counter: WeakUsageCounter, obs, registry: CryptoRegistry) -> bool:
    """Tally weak identifiers of one observation; True if any were found."""
    proto = _protocol_of(obs)
    found = False
    for (p, role), attr in ROLE_FIELDS.items():
        if p != proto:
            continue
        ident = getattr(obs, attr, None)
        if ident is not None and registry.classify(p, role, ident) in WEAK_CLASSES:
            counter.add((registry.canonical(p, role, ident), p, role), obs.conn.uid)
            found = True
    return found


def _protocol_of(obs) -> str:
    if isinstance(obs, SshObservation):
        return "ssh"
    if isinstance(obs, TlsObservation):
        return "tls"
    if isinstance(obs, RdpObservation):
        return "rdp"
    raise TypeError(f"not an observation: {obs!r}")


def deprecated_usage(observations: Iterable, registry: CryptoRegistry) -> list[DeprecationFinding]:
    """One finding per (identifier, protocol, role) classified Deprecated or Insecure."""
    counter = WeakUsageCounter()
    for obs in observations:
        observe_weak(counter, obs, registry)
    return counter.findings(registry)
