"""CIDR to autonomous-system attribution by longest-prefix match.

Table files hold one ``CIDR,ASN,org-name`` row per line; ``#`` starts a
comment line. IPv4 and IPv6 prefixes live in separate binary tries.
"""

from __future__ import annotations

import csv
import ipaddress
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

IPAddress = ipaddress.IPv4Address | ipaddress.IPv6Address
IPNetwork = ipaddress.IPv4Network | ipaddress.IPv6Network

UNKNOWN_ASN = 0  # AS0 is reserved and never routed (RFC 7607)


class AsnTableError(ValueError):
    pass


@dataclass(frozen=True)
class AsEntry:
    prefix: IPNetwork | None
    asn: int
    org_name: str

    @property
    def is_unknown(self) -> bool:
        return self.prefix is None


UNKNOWN = AsEntry(None, UNKNOWN_ASN, "unknown")


class _Node:
    __slots__ = ("children", "entry")

    def __init__(self):
        self.children: list[_Node | None] = [None, None]
        self.entry: AsEntry | None = None


class AsnTable:
    def __init__(self, entries: Iterable[AsEntry] = ()):
        self.entries: list[AsEntry] = []
        self._roots = {4: _Node(), 6: _Node()}
        for e in entries:
            self.add(e)

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, entry: AsEntry):
        net = entry.prefix
        node = self._roots[net.version]
        bits = int(net.network_address)
        width = net.max_prefixlen
        for i in range(net.prefixlen):
            b = (bits >> (width - 1 - i)) & 1
            if node.children[b] is None:
                node.children[b] = _Node()
            node = node.children[b]
        # a later duplicate prefix replaces the earlier one
        node.entry = entry
        self.entries.append(entry)

    def lookup(self, ip: IPAddress | str) -> AsEntry | None:
        if isinstance(ip, str):
            ip = ipaddress.ip_address(ip)
        if isinstance(ip, ipaddress.IPv6Address) and ip.ipv4_mapped is not None:
            ip = ip.ipv4_mapped
        node = self._roots[ip.version]
        bits = int(ip)
        width = ip.max_prefixlen
        best = node.entry
        for i in range(width):
            node = node.children[(bits >> (width - 1 - i)) & 1]
            if node is None:
                break
            if node.entry is not None:
                best = node.entry
        return best


def asn_lookup(ip: IPAddress | str, table: AsnTable) -> AsEntry | None:
    return table.lookup(ip)


def parse_asn_table(text: str, source: str = "<asn table>") -> AsnTable:
    table = AsnTable()
    rows = (ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#"))
    for lineno, row in enumerate(csv.reader(rows), 1):
        if len(row) < 3:
            raise AsnTableError(f"{source}: row {lineno}: expected CIDR,ASN,org-name")
        cidr, asn, org = row[0].strip(), row[1].strip(), ",".join(row[2:]).strip()
        try:
            net = ipaddress.ip_network(cidr, strict=False)
            num = int(asn.upper().removeprefix("AS"))
        except ValueError as exc:
            raise AsnTableError(f"{source}: row {lineno}: {exc}") from None
        if not 0 <= num < 2 ** 32:
            raise AsnTableError(f"{source}: row {lineno}: ASN {num} outside 0..4294967295")
        table.add(AsEntry(net, num, org))
    return table


def load_asn_table(path: str | Path) -> AsnTable:
    path = Path(path)
    if not path.is_file():
        raise AsnTableError(f"ASN table not found: {path}")
    return parse_asn_table(path.read_text(encoding="utf-8"), str(path))


def histogram_from_clients(clients: Counter, table: AsnTable, n: int) -> list[tuple[AsEntry, int]]:
    """Group per-client counts by AS; unattributed clients share one bucket."""
    if n <= 0:
        return []
    by_asn: dict[tuple[int, str], int] = Counter()
    entries: dict[tuple[int, str], AsEntry] = {}
    for ip, count in clients.items():
        entry = table.lookup(ip) or UNKNOWN
        key = (entry.asn, entry.org_name) if not entry.is_unknown else (UNKNOWN_ASN, "\0unknown")
        by_asn[key] += count
        # several prefixes may share an AS; report the one with the lowest network address
        prev = entries.get(key)
        if prev is None or (entry.prefix is not None and _net_key(entry.prefix) < _net_key(prev.prefix)):
            entries[key] = entry
    ranked = sorted(by_asn.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
    return [(entries[k], c) for k, c in ranked[:n]]


def _net_key(net: IPNetwork) -> tuple[int, int, int]:
    return (net.version, int(net.network_address), net.prefixlen)


def top_asn_histogram(observations: Iterable, table: AsnTable, n: int = 5) -> list[tuple[AsEntry, int]]:
    """Client-side (originator address) AS histogram, descending by count, ties by ASN."""
    return histogram_from_clients(Counter(o.conn.orig_ip for o in observations), table, n)
