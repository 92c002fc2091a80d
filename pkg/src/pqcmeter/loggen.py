"""Synthetic Zeek logs calibrated to published measurement figures.

Each profile writes gzip TSV logs whose aggregate statistics hit fixed target
counts exactly at scale 1. Other scales multiply every count vector with
largest-remainder rounding. Output is byte-identical for a given
(profile, scale, seed): gzip headers carry no mtime or filename, and header
timestamps come from the data.
"""

from __future__ import annotations

import gzip
import ipaddress
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import LogSchema

PQC_KEX = "sntrup761x25519-sha512@openssh.com"

SSH_SCHEMA = LogSchema(
    path="ssh",
    field_names=("ts", "uid", "id.orig_h", "id.orig_p", "id.resp_h", "id.resp_p", "version", "auth_success",
                 "auth_attempts", "direction", "client", "server", "cipher_alg", "mac_alg", "compression_alg",
                 "kex_alg", "host_key_alg", "host_key"),
    field_types=("time", "string", "addr", "port", "addr", "port", "count", "bool", "count", "enum", "string",
                 "string", "string", "string", "string", "string", "string", "string"),
)

SSL_SCHEMA = LogSchema(
    path="ssl",
    field_names=("ts", "uid", "id.orig_h", "id.orig_p", "id.resp_h", "id.resp_p", "version", "cipher", "curve",
                 "server_name", "resumed", "last_alert", "next_protocol", "established", "ssl_history",
                 "cert_chain_fps", "client_cert_chain_fps", "sni_matches_cert"),
    field_types=("time", "string", "addr", "port", "addr", "port", "string", "string", "string", "string", "bool",
                 "string", "string", "bool", "string", "vector[string]", "vector[string]", "bool"),
)

RDP_SCHEMA = LogSchema(
    path="rdp",
    field_names=("ts", "uid", "id.orig_h", "id.orig_p", "id.resp_h", "id.resp_p", "cookie", "result",
                 "security_protocol", "client_channels", "keyboard_layout", "client_build", "client_name",
                 "client_dig_product_id", "desktop_width", "desktop_height", "requested_color_depth", "cert_type",
                 "cert_count", "cert_permanent", "encryption_level", "encryption_method"),
    field_types=("time", "string", "addr", "port", "addr", "port", "string", "string", "string", "vector[string]",
                 "string", "string", "string", "string", "count", "count", "string", "string", "count", "bool",
                 "string", "string"),
)

# --- calibration targets ------------------------------------------------------------

TABLE2 = {
    "cipher_alg": [("aes256-gcm@openssh.com", 1686), ("aes128-ctr", 454), ("chacha20-poly1305@openssh.com", 188),
                   ("aes128-gcm@openssh.com", 156), ("aes256-ctr", 31), ("aes128-cbc", 2), ("3des-cbc", 1)],
    "mac_alg": [("hmac-sha2-256-etm@openssh.com", 1844), ("hmac-sha2-256", 457), ("umac-128-etm@openssh.com", 154),
                ("umac-64-etm@openssh.com", 33), ("hmac-sha1", 17), ("hmac-sha2-512", 13)],
    "host_key_alg": [("ecdsa-sha2-nistp256", 1275), ("ssh-ed25519", 1233), ("ssh-rsa", 5), ("rsa-sha2-512", 4)],
    "kex_alg": [("curve25519-sha256", 2030), ("curve25519-sha256@libssh.org", 473),
                ("diffie-hellman-group-exchange-sha256", 6), ("diffie-hellman-group1-sha1", 5),
                (PQC_KEX, 2), ("diffie-hellman-group14-sha1", 2)],
}

# Zeek spells suites in IANA underscore form; the registry aliases them to dashes.
TLS_TOP10 = [
    ("TLS_AES_128_GCM_SHA256", 416447, "TLSv13"),
    ("TLS_ECDHE_RSA_WITH_AES_256_GCM_SHA384", 117788, "TLSv12"),
    ("TLS_AES_256_GCM_SHA384", 100708, "TLSv13"),
    ("TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256", 79171, "TLSv12"),
    ("TLS_DH_anon_WITH_AES_256_GCM_SHA384", 42261, "TLSv12"),
    ("TLS_ECDH_anon_WITH_AES_256_CBC_SHA", 14787, "TLSv12"),
    ("TLS_ECDHE_RSA_WITH_NULL_SHA", 5612, "TLSv12"),
    ("TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256", 3382, "TLSv12"),
    ("TLS_ECDHE_RSA_WITH_CHACHA20_POLY1305_SHA256", 2787, "TLSv12"),
    ("TLS_ECDHE_ECDSA_WITH_AES_256_GCM_SHA384", 2497, "TLSv12"),
]
TLS13_TARGET_SHARE = 0.65

# RDP: 26 connections, 2 with HYBRID_EX; the split of the other 24 is illustrative.
RDP_SAMPLE = [("HYBRID_EX", 2), ("HYBRID", 12), ("SSL", 8), ("RDP", 4)]

TREND_START = (2023, 1)
TREND_MONTHS = 16
TREND_ENDPOINTS = (37, 1585)
TREND_BACKGROUND = 120  # classical kex records per month

HEADLINE = (6044, 20_556_816)
HEADLINE_SCALE = 1 / 1000

STALE_TARGET = (830, 170)
STALE_UNRESOLVABLE = 25
STALE_VERSIONS = ["5.3", "6.6", "7.2", "7.4", "7.6", "7.9", "8.0", "8.1"]
FRESH_VERSIONS = ["8.2", "8.4", "8.9", "9.0", "9.2", "9.3", "9.6", "9.7"]
UNRESOLVABLE_BANNERS = ["SSH-2.0-dropbear_2019.78", "SSH-2.0-Cisco-1.25", "SSH-2.0-libssh_0.9.6"]

# (generation prefix, ASN, org, PQC client connections); addresses come from the
# bundled toy table (data/toy_asn.csv). 172.31.0.0/16 is deliberately unlisted.
ASN_PROFILE = [
    ("10.1.0.0/24", 64601, "OARNET (toy)", 420),
    ("10.2.0.0/24", 64602, "GTT (toy)", 310),
    ("10.3.0.0/24", 64603, "Google Fiber Webpass (toy)", 240),
    ("10.4.0.0/24", 64604, "Uppsala Lans Landsting (toy)", 180),
    ("10.5.0.0/24", 64605, "Comcast (toy)", 150),
] + [
    (f"10.{16 + i}.0.0/24", 64620 + i, f"Tail network {i + 1} (toy)", 30 - i) for i in range(20)
] + [
    ("10.1.200.0/24", 64650, "Nested customer of OARNET, (toy)", 12),
    ("fd00:64:1::/64", 64660, "IPv6 campus (toy)", 9),
    ("172.31.0.0/24", None, "unattributed", 40),
]

PROFILES = ("table2-ssh-day", "tls-top10", "trend-2023-2024", "asn-head-tail", "stale-servers-83",
            "downgrade-episode")

ADDR_POOL = 2048
CLIENT_NETS = [ipaddress.ip_network(n) for n in ("192.0.2.0/24", "203.0.113.0/24", "2001:db8:1::/112")]
SERVER_NETS = [ipaddress.ip_network(n) for n in ("198.51.100.0/24", "2001:db8:2::/112")]
CLIENT_BANNERS = ["SSH-2.0-OpenSSH_8.9p1 Ubuntu-3ubuntu0.6", "SSH-2.0-OpenSSH_9.0", "SSH-2.0-OpenSSH_9.3",
                  "SSH-2.0-OpenSSH_8.4p1 Debian-5+deb11u1", "SSH-2.0-OpenSSH_7.4", "SSH-2.0-PuTTY_Release_0.78"]
SERVER_BANNERS = ["SSH-2.0-OpenSSH_7.4", "SSH-2.0-OpenSSH_8.0", "SSH-2.0-OpenSSH_7.9p1 Debian-10+deb10u2",
                  "SSH-2.0-OpenSSH_9.1p1 Debian-2", "SSH-2.0-OpenSSH_8.2p1 Ubuntu-4ubuntu0.5"]


@dataclass(frozen=True)
class GenProfile:
    name: str
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.name not in PROFILES:
            raise ValueError(f"unknown profile {self.name!r}; choose from {', '.join(PROFILES)}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def scale_counts(counts: Sequence[int], scale: float) -> list[int]:
    """Largest-remainder apportionment of ``round(sum * scale)`` over ``counts``."""
    if scale == 1:
        return list(counts)
    exact = [c * scale for c in counts]
    out = [int(x) for x in exact]
    target = round(sum(counts) * scale)
    order = sorted(range(len(counts)), key=lambda i: (-(exact[i] - out[i]), i))
    for i in order[:max(0, target - sum(out))]:
        out[i] += 1
    return out


# --- writing ------------------------------------------------------------------

def _stamp(ts_us: int) -> str:
    return datetime.fromtimestamp(ts_us // 1_000_000, tz=timezone.utc).strftime("%Y-%m-%d-%H-%M-%S")


def format_ts(ts_us: int) -> str:
    return f"{ts_us // 1_000_000}.{ts_us % 1_000_000:06d}"


def render_log(schema: LogSchema, rows: Sequence[dict], close: bool = True) -> bytes:
    """Serialise rows (field name -> value, ``ts`` in integer microseconds) as Zeek TSV."""
    sep = schema.separator.decode("latin-1")
    first = rows[0]["ts"] if rows else 0
    last = rows[-1]["ts"] if rows else 0
    lines = schema.header_lines(open_stamp=_stamp(first))
    names = schema.field_names
    unset, empty = schema.unset_marker, schema.empty_marker
    for row in rows:
        vals = []
        for name in names:
            v = row.get(name)
            if name == "ts":
                vals.append(format_ts(v))
            else:
                vals.append(unset if v is None else empty if v == "" else str(v))
        lines.append(sep.join(vals))
    if close:
        lines.append(f"#close{sep}{_stamp(last)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_gzip(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as raw, gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0, compresslevel=6) as gz:
        gz.write(data)


# --- row construction -------------------------------------------------------------

class _Gen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self._pools: dict = {}

    def uid(self) -> str:
        # Zeek uids are base62; hex digits are a subset and far cheaper to draw
        return "C" + format(self.rng.getrandbits(68), "017x")

    def addr(self, nets: list) -> str:
        """A host drawn from a bounded per-network pool, so clients recur like real ones do."""
        pools = self._pools.get(id(nets))
        if pools is None:
            pools = self._pools[id(nets)] = [
                [str(net.network_address + k) for k in range(1, min(net.num_addresses - 1, ADDR_POOL))]
                for net in nets
            ]
        pool = pools[self.rng.randrange(len(pools))]
        return pool[self.rng.randrange(len(pool))]

    def port(self) -> int:
        return self.rng.randrange(1024, 65536)

    def ts_in(self, start_us: int, end_us: int) -> int:
        return self.rng.randrange(start_us, end_us)


def _epoch_us(y: int, m: int, d: int = 1, hh: int = 0) -> int:
    return int(datetime(y, m, d, hh, tzinfo=timezone.utc).timestamp()) * 1_000_000


def _expand(pairs: Iterable[tuple[str, int]]) -> list[str]:
    out = []
    for ident, n in pairs:
        out.extend([ident] * n)
    return out


def ssh_row(g: _Gen, ts: int, client=None, server=None, cipher=None, mac=None, kex=None, hostkey=None,
            orig=None, resp=None) -> dict:
    return {
        "ts": ts, "uid": g.uid(), "id.orig_h": orig or g.addr(CLIENT_NETS), "id.orig_p": g.port(),
        "id.resp_h": resp or g.addr(SERVER_NETS), "id.resp_p": 22, "version": 2, "auth_success": None,
        "auth_attempts": 0, "direction": None, "client": client, "server": server, "cipher_alg": cipher,
        "mac_alg": mac, "compression_alg": "none", "kex_alg": kex, "host_key_alg": hostkey, "host_key": None,
    }


def sample_ssh_row() -> dict:
    """The example SSH connection shown in the dataset overview, as a full ssh.log row."""
    return {
        "ts": 1_700_000_000_000_000, "uid": "CsampleRow0000001", "id.orig_h": "73.45.0.1", "id.orig_p": 50022,
        "id.resp_h": "198.51.100.7", "id.resp_p": 22, "version": 2, "auth_success": None, "auth_attempts": 0,
        "direction": None, "client": "SSH-2.0-OpenSSH_9.1p1 Debian-2", "server": "SSH-2.0-OpenSSH_9.1p1 Debian-2",
        "cipher_alg": "chacha20-poly1305@openssh.com", "mac_alg": "umac-64-etm@openssh.com",
        "compression_alg": "none", "kex_alg": PQC_KEX, "host_key_alg": "ecdsa-sha2-nistp256", "host_key": None,
    }


def _column(pairs, scale: float, n: int, rng: random.Random) -> list[str | None]:
    counts = scale_counts([c for _, c in pairs], scale)
    col: list[str | None] = _expand(zip([p for p, _ in pairs], counts))
    col += [None] * (n - len(col))
    rng.shuffle(col)
    return col


def table2_rows(scale: float, seed: int) -> tuple[list[dict], list[dict]]:
    g = _Gen(seed)
    n = max(sum(scale_counts([c for _, c in pairs], scale)) for pairs in TABLE2.values())
    cols = {f: _column(pairs, scale, n, g.rng) for f, pairs in TABLE2.items()}
    day = _epoch_us(2024, 3, 12)
    stamps = sorted(g.ts_in(day, day + 86_400_000_000) for _ in range(n))
    rows = []
    for i, ts in enumerate(stamps):
        kex = cols["kex_alg"][i]
        client = "SSH-2.0-OpenSSH_9.3" if kex == PQC_KEX else g.rng.choice(CLIENT_BANNERS)
        rows.append(ssh_row(g, ts, client, g.rng.choice(SERVER_BANNERS), cols["cipher_alg"][i], cols["mac_alg"][i],
                            kex, cols["host_key_alg"][i]))
    rdp = []
    protos = _column(RDP_SAMPLE, scale, sum(scale_counts([c for _, c in RDP_SAMPLE], scale)), g.rng)
    rdp_stamps = sorted(g.ts_in(day, day + 86_400_000_000) for _ in protos)
    for ts, proto in zip(rdp_stamps, protos):
        rdp.append({"ts": ts, "uid": g.uid(), "id.orig_h": g.addr(CLIENT_NETS), "id.orig_p": g.port(),
                    "id.resp_h": g.addr(SERVER_NETS), "id.resp_p": 3389, "cookie": "toy", "result": "Success",
                    "security_protocol": proto, "client_channels": "", "keyboard_layout": "English - United States",
                    "client_build": "RDP 10.0", "client_name": "WS01", "client_dig_product_id": None,
                    "desktop_width": 1920, "desktop_height": 1080, "requested_color_depth": "32bit",
                    "cert_type": None, "cert_count": 0, "cert_permanent": None, "encryption_level": None,
                    "encryption_method": None})
    return rows, rdp


def tls_rows(scale: float, seed: int) -> list[dict]:
    """Suite counts from the top-ten table; TLS 1.3 share calibrated to 65% of versioned records.

    TLS 1.3 suites only occur under TLS 1.3, and they alone exceed 65% of the
    records, so some TLS 1.3 records carry no version (Zeek leaves it unset
    when the server hello is not seen). Those drop out of the version share.
    """
    g = _Gen(seed)
    counts = scale_counts([c for _, c, _ in TLS_TOP10], scale)
    v12 = sum(c for c, (_, _, v) in zip(counts, TLS_TOP10) if v == "TLSv12")
    v13_total = sum(counts) - v12
    v13_versioned = min(v13_total, round(v12 * TLS13_TARGET_SHARE / (1 - TLS13_TARGET_SHARE)))
    unversioned = v13_total - v13_versioned
    specs = []
    for (suite, _, version), c in zip(TLS_TOP10, counts):
        specs.extend([(suite, version)] * c)
    g.rng.shuffle(specs)
    # strip the version from the first `unversioned` TLS 1.3 records in shuffled order
    rows = []
    start = _epoch_us(2024, 3, 1)
    span = 31 * 86_400_000_000
    stamps = sorted(g.ts_in(start, start + span) for _ in specs)
    curves = {"TLSv13": "x25519", "TLSv12": "secp256r1"}
    for ts, (suite, version) in zip(stamps, specs):
        if version == "TLSv13" and unversioned > 0:
            version = None
            unversioned -= 1
        rows.append({"ts": ts, "uid": g.uid(), "id.orig_h": g.addr(CLIENT_NETS), "id.orig_p": g.port(),
                     "id.resp_h": g.addr(SERVER_NETS), "id.resp_p": 443, "version": version, "cipher": suite,
                     "curve": curves.get(version), "server_name": None, "resumed": "F", "last_alert": None,
                     "next_protocol": None, "established": "T", "ssl_history": None, "cert_chain_fps": None,
                     "client_cert_chain_fps": None, "sni_matches_cert": None})
    return rows


def trend_counts(scale: float = 1.0) -> list[int]:
    lo, hi = TREND_ENDPOINTS
    r = (hi / lo) ** (1 / (TREND_MONTHS - 1))
    base = [lo] + [round(lo * r ** i) for i in range(1, TREND_MONTHS - 1)] + [hi]
    return scale_counts(base, scale)


def _months(start: tuple[int, int], n: int) -> list[tuple[int, int]]:
    y, m = start
    out = []
    for _ in range(n):
        out.append((y, m))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def trend_rows(scale: float, seed: int) -> list[dict]:
    g = _Gen(seed)
    rows = []
    for (y, m), pqc in zip(_months(TREND_START, TREND_MONTHS), trend_counts(scale)):
        start = _epoch_us(y, m)
        end = _epoch_us(y, m, 28, 23)
        background = max(1, round(TREND_BACKGROUND * scale))
        for kex in [PQC_KEX] * pqc + ["curve25519-sha256"] * background:
            client = "SSH-2.0-OpenSSH_9.3" if kex == PQC_KEX else g.rng.choice(CLIENT_BANNERS)
            rows.append(ssh_row(g, g.ts_in(start, end), client, g.rng.choice(SERVER_BANNERS),
                                "chacha20-poly1305@openssh.com", "hmac-sha2-256-etm@openssh.com", kex, "ssh-ed25519"))
    rows.sort(key=lambda r: r["ts"])
    return rows


def headline_rows(scale: float, seed: int) -> list[dict]:
    """SSH kex stream whose PQC ratio matches the headline rate (6 of 20,557 at scale 1)."""
    g = _Gen(seed + 1)
    pqc, rest = scale_counts([HEADLINE[0], HEADLINE[1] - HEADLINE[0]], scale * HEADLINE_SCALE)
    kexes = [PQC_KEX] * pqc + ["curve25519-sha256"] * rest
    g.rng.shuffle(kexes)
    start = _epoch_us(2024, 4)
    stamps = sorted(g.ts_in(start, start + 30 * 86_400_000_000) for _ in kexes)
    return [ssh_row(g, ts, "SSH-2.0-OpenSSH_9.3" if k == PQC_KEX else "SSH-2.0-OpenSSH_8.9p1 Ubuntu-3ubuntu0.6",
                    "SSH-2.0-OpenSSH_8.0", "aes256-gcm@openssh.com", "hmac-sha2-256-etm@openssh.com", k, "ssh-ed25519")
            for ts, k in zip(stamps, kexes)]


def _host_in(g: _Gen, net) -> str:
    return str(net.network_address + g.rng.randrange(1, min(net.num_addresses - 1, 250)))


def asn_rows(scale: float, seed: int) -> list[dict]:
    g = _Gen(seed)
    counts = scale_counts([c for *_, c in ASN_PROFILE], scale)
    start = _epoch_us(2024, 4)
    rows = []
    for (prefix, _, _, _), n in zip(ASN_PROFILE, counts):
        net = ipaddress.ip_network(prefix)
        for _ in range(n):
            rows.append(ssh_row(g, g.ts_in(start, start + 30 * 86_400_000_000), "SSH-2.0-OpenSSH_9.6",
                                "SSH-2.0-OpenSSH_9.6", "chacha20-poly1305@openssh.com",
                                "hmac-sha2-256-etm@openssh.com", PQC_KEX, "ssh-ed25519", orig=_host_in(g, net)))
    rows.sort(key=lambda r: r["ts"])
    return rows


def stale_rows(scale: float, seed: int) -> list[dict]:
    g = _Gen(seed)
    stale, fresh, unresolvable = scale_counts([*STALE_TARGET, STALE_UNRESOLVABLE], scale)
    banners = ([f"SSH-2.0-OpenSSH_{g.rng.choice(STALE_VERSIONS)}" for _ in range(stale)]
               + [f"SSH-2.0-OpenSSH_{g.rng.choice(FRESH_VERSIONS)}" for _ in range(fresh)]
               + [g.rng.choice(UNRESOLVABLE_BANNERS) for _ in range(unresolvable)])
    g.rng.shuffle(banners)
    start = _epoch_us(2024, 2)
    stamps = sorted(g.ts_in(start, start + 28 * 86_400_000_000) for _ in banners)
    return [ssh_row(g, ts, g.rng.choice(CLIENT_BANNERS), b, "aes128-ctr", "hmac-sha2-256", "curve25519-sha256",
                    "ssh-ed25519") for ts, b in zip(stamps, banners)]


DOWNGRADE_PAIRS = {
    # name: (client, server, [(hours offset, kex, client banner)])
    "episode": ("192.0.2.10", "198.51.100.22", [(0, "pqc", "9.3"), (24, "pqc", "9.3"), (25, "classical", "9.3"),
                                                (26, "classical", "9.3"), (27, "classical", "9.6")]),
    "all_pqc": ("192.0.2.11", "198.51.100.22", [(0, "pqc", "9.3"), (5, "pqc", "9.3"), (48, "pqc", "9.6")]),
    "all_classical": ("192.0.2.12", "198.51.100.23", [(0, "classical", "8.2"), (3, "classical", "8.2"),
                                                      (30, "classical", "8.2")]),
    "upgrade": ("192.0.2.13", "198.51.100.23", [(0, "classical", "8.9"), (12, "pqc", "9.3"), (40, "pqc", "9.3")]),
    "older_client": ("192.0.2.14", "198.51.100.24", [(0, "pqc", "9.3"), (2, "classical", "7.4")]),
    "outside_window": ("192.0.2.15", "198.51.100.24", [(0, "pqc", "9.3"), (45 * 24, "classical", "9.3")]),
}


def downgrade_rows(seed: int, pairs: Sequence[str] | None = None) -> list[dict]:
    g = _Gen(seed)
    base = _epoch_us(2024, 3, 4, 9)
    rows = []
    for name in pairs or DOWNGRADE_PAIRS:
        client, server, events = DOWNGRADE_PAIRS[name]
        for hours, kind, version in events:
            kex = PQC_KEX if kind == "pqc" else "curve25519-sha256"
            ts = base + hours * 3_600_000_000 + g.rng.randrange(0, 1_000_000)
            rows.append(ssh_row(g, ts, f"SSH-2.0-OpenSSH_{version}", "SSH-2.0-OpenSSH_9.3",
                                "chacha20-poly1305@openssh.com", "hmac-sha2-256-etm@openssh.com", kex,
                                "ssh-ed25519", orig=client, resp=server))
    rows.sort(key=lambda r: r["ts"])
    return rows


def toy_asn_table_text() -> str:
    return resources.files("pqcmeter.data").joinpath("toy_asn.csv").read_text(encoding="utf-8")


def generate(profile: GenProfile, out_dir: str | Path) -> list[Path]:
    """Write the profile's logs under ``out_dir`` and return their paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    s, seed = profile.scale, profile.seed
    written: list[tuple[Path, LogSchema, list[dict]]] = []
    if profile.name == "table2-ssh-day":
        ssh, rdp = table2_rows(s, seed)
        written += [(out / "ssh.log.gz", SSH_SCHEMA, ssh), (out / "rdp.log.gz", RDP_SCHEMA, rdp)]
    elif profile.name == "tls-top10":
        written.append((out / "ssl.log.gz", SSL_SCHEMA, tls_rows(s, seed)))
    elif profile.name == "trend-2023-2024":
        written += [(out / "trend" / "ssh.log.gz", SSH_SCHEMA, trend_rows(s, seed)),
                    (out / "headline" / "ssh.log.gz", SSH_SCHEMA, headline_rows(s, seed))]
    elif profile.name == "asn-head-tail":
        written.append((out / "ssh.log.gz", SSH_SCHEMA, asn_rows(s, seed)))
        (out / "asn_table.csv").write_bytes(toy_asn_table_text().encode("utf-8"))
    elif profile.name == "stale-servers-83":
        written.append((out / "ssh.log.gz", SSH_SCHEMA, stale_rows(s, seed)))
    elif profile.name == "downgrade-episode":
        written.append((out / "ssh.log.gz", SSH_SCHEMA, downgrade_rows(seed)))
    paths = [out / "asn_table.csv"] if profile.name == "asn-head-tail" else []
    for path, schema, rows in written:
        write_gzip(path, render_log(schema, rows))
        paths.append(path)
    return paths
