"""Streaming reader for Zeek TSV logs (plain or gzip) and typed projections.

Zeek writes one header block of ``#``-prefixed metadata lines, then one record
per line. Files are read line by line so memory stays proportional to the
longest line, not the file.
"""

from __future__ import annotations

import gzip
import io
import ipaddress
import zlib
from functools import lru_cache
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator

GZIP_MAGIC = b"\x1f\x8b"
MAX_SAMPLES = 10


class LogFormatError(ValueError):
    pass


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class LogSchema:
    separator: bytes = b"\t"
    set_separator: str = ","
    unset_marker: str = "-"
    empty_marker: str = "(empty)"
    field_names: tuple[str, ...] = ()
    field_types: tuple[str, ...] = ()
    path: str = ""

    def __post_init__(self):
        if self.field_types and len(self.field_types) != len(self.field_names):
            raise LogFormatError("#fields and #types have different lengths")
        if len(set(self.field_names)) != len(self.field_names):
            raise LogFormatError("duplicate field names")

    @property
    def arity(self) -> int:
        return len(self.field_names)

    def header_lines(self, open_stamp: str | None = None) -> list[str]:
        sep = self.separator.decode("latin-1")
        lines = [
            "#separator " + "".join(f"\\x{b:02x}" for b in self.separator),
            f"#set_separator{sep}{self.set_separator}",
            f"#empty_field{sep}{self.empty_marker}",
            f"#unset_field{sep}{self.unset_marker}",
            f"#path{sep}{self.path}",
        ]
        if open_stamp is not None:
            lines.append(f"#open{sep}{open_stamp}")
        lines.append("#fields" + sep + sep.join(self.field_names))
        if self.field_types:
            lines.append("#types" + sep + sep.join(self.field_types))
        return lines


def _decode_escapes(value: str) -> bytes:
    out = bytearray()
    i = 0
    while i < len(value):
        if value.startswith("\\x", i) and i + 4 <= len(value):
            try:
                out.append(int(value[i + 2:i + 4], 16))
                i += 4
                continue
            except ValueError:
                pass
        out.extend(value[i].encode("utf-8"))
        i += 1
    return bytes(out)


def parse_header(lines: list[str] | list[bytes]) -> LogSchema:
    """Build a schema from the ``#`` metadata lines at the top of a log."""
    if not lines:
        raise LogFormatError("empty header")
    text = [ln.decode("utf-8", "replace") if isinstance(ln, bytes) else ln for ln in lines]
    text = [ln.rstrip("\r\n") for ln in text]
    first = text[0]
    if not first.startswith("#separator"):
        raise LogFormatError("header must begin with #separator")
    sep = _decode_escapes(first[len("#separator"):].strip())
    if len(sep) != 1:
        raise LogFormatError(f"separator must be a single byte, got {sep!r}")
    sep_s = sep.decode("latin-1")
    meta: dict[str, list[str]] = {}
    for ln in text[1:]:
        if not ln.startswith("#"):
            break
        key, _, rest = ln[1:].partition(sep_s)
        meta[key] = rest.split(sep_s) if key in ("fields", "types") else [rest]
    if "fields" not in meta:
        raise LogFormatError("header lacks #fields")
    return LogSchema(
        separator=sep,
        set_separator=meta.get("set_separator", [","])[0],
        unset_marker=meta.get("unset_field", ["-"])[0],
        empty_marker=meta.get("empty_field", ["(empty)"])[0],
        field_names=tuple(meta["fields"]),
        field_types=tuple(meta.get("types", [])),
        path=meta.get("path", [""])[0],
    )


@dataclass
class IngestStats:
    """Per-source counters; ``merge`` combines results of parallel parses."""

    records: int = 0
    malformed: int = 0
    replaced_utf8: int = 0
    bytes_read: int = 0
    truncated: list[str] = field(default_factory=list)
    samples: list[tuple[str, int, str]] = field(default_factory=list)

    @property
    def lines(self) -> int:
        return self.records + self.malformed

    def note_malformed(self, source: str, lineno: int, raw: bytes):
        self.malformed += 1
        if len(self.samples) < MAX_SAMPLES:
            self.samples.append((source, lineno, raw.decode("utf-8", "replace")))

    def merge(self, other: "IngestStats") -> "IngestStats":
        samples = sorted(self.samples + other.samples)[:MAX_SAMPLES]
        return IngestStats(
            self.records + other.records,
            self.malformed + other.malformed,
            self.replaced_utf8 + other.replaced_utf8,
            self.bytes_read + other.bytes_read,
            sorted(self.truncated + other.truncated),
            samples,
        )

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "malformed": self.malformed,
            "utf8_replaced": self.replaced_utf8,
            "truncated_sources": list(self.truncated),
            "malformed_samples": [{"source": s, "line": n, "text": t} for s, n, t in self.samples],
        }


def _split(line: bytes, schema: LogSchema) -> tuple[dict[str, str | None] | None, bool]:
    if line.endswith(b"\n"):
        line = line[:-1]
    if line.endswith(b"\r"):
        line = line[:-1]
    sep = schema.separator
    replaced = False
    if sep[0] < 0x80:
        # an ASCII separator cannot occur inside a multi-byte sequence, so decode once
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError:
            text = line.decode("utf-8", "replace")
            replaced = True
        values = text.split(chr(sep[0]))
    else:
        parts = line.split(sep)
        try:
            values = [p.decode("utf-8") for p in parts]
        except UnicodeDecodeError:
            values = [p.decode("utf-8", "replace") for p in parts]
            replaced = True
    if len(values) != schema.arity:
        return None, False
    unset, empty = schema.unset_marker, schema.empty_marker
    rec = {
        name: (None if v == unset else "" if v == empty else v)
        for name, v in zip(schema.field_names, values)
    }
    return rec, replaced


def parse_record(line: bytes, schema: LogSchema) -> dict[str, str | None] | None:
    """Split one data line into a field map, or ``None`` on arity mismatch.

    Invalid UTF-8 is decoded with U+FFFD replacement.
    """
    return _split(line, schema)[0]


def _open_binary(source) -> tuple[BinaryIO, str, BinaryIO | None]:
    """Return (reader, display name, handle to close or None)."""
    if isinstance(source, (str, Path)):
        fh = owned = open(source, "rb")
        name = str(source)
    else:
        fh, owned = source, None
        name = getattr(source, "name", "<stream>")
    if not hasattr(fh, "peek"):
        fh = io.BufferedReader(fh) if isinstance(fh, io.RawIOBase) else io.BufferedReader(_Raw(fh))
    if fh.peek(2)[:2] == GZIP_MAGIC:
        fh = gzip.GzipFile(fileobj=fh, mode="rb")
    return fh, name, owned


class _Raw(io.RawIOBase):
    def __init__(self, inner):
        self._inner = inner

    def readable(self):
        return True

    def readinto(self, b):
        data = self._inner.read(len(b))
        b[:len(data)] = data
        return len(data)


def stream_log(source, stats: IngestStats | None = None) -> Iterator[tuple[dict, LogSchema]]:
    """Yield ``(record, schema)`` pairs in file order.

    ``source`` may be a path or a binary stream. Malformed lines are counted on
    ``stats`` and skipped; a truncated or corrupt gzip member ends iteration
    early and is recorded in ``stats.truncated``.
    """
    if stats is None:
        stats = IngestStats()
    fh, name, owned = _open_binary(source)
    schema: LogSchema | None = None
    header: list[bytes] = []
    lineno = 0
    try:
        while True:
            try:
                raw = fh.readline()
            except (EOFError, zlib.error, gzip.BadGzipFile, OSError):
                stats.truncated.append(name)
                break
            if not raw:
                break
            lineno += 1
            stats.bytes_read += len(raw)
            if raw.startswith(b"#"):
                if raw.startswith(b"#separator"):
                    header = [raw]
                    schema = None
                elif raw.startswith(b"#close"):
                    header = []
                    continue
                else:
                    header.append(raw)
                if raw.startswith((b"#fields", b"#types")):
                    try:
                        schema = parse_header(header)
                    except LogFormatError:
                        schema = None
                continue
            if schema is None:
                if raw.strip():
                    stats.note_malformed(name, lineno, raw)
                continue
            if not raw.strip(b"\r\n"):
                continue
            rec, replaced = _split(raw, schema)
            if rec is None:
                stats.note_malformed(name, lineno, raw)
                continue
            stats.replaced_utf8 += replaced
            stats.records += 1
            yield rec, schema
    finally:
        if owned is not None:
            owned.close()


# --- typed projections ---------------------------------------------------------

@dataclass(frozen=True)
class ConnTuple:
    ts_us: int
    orig_ip: ipaddress.IPv4Address | ipaddress.IPv6Address
    orig_port: int
    resp_ip: ipaddress.IPv4Address | ipaddress.IPv6Address
    resp_port: int
    uid: str

    @property
    def ts(self) -> float:
        return self.ts_us / 1_000_000


@dataclass(frozen=True)
class SshObservation:
    conn: ConnTuple
    client_banner: str | None = None
    server_banner: str | None = None
    cipher_alg: str | None = None
    mac_alg: str | None = None
    kex_alg: str | None = None
    host_key_alg: str | None = None

    @property
    def has_algorithms(self) -> bool:
        return any((self.cipher_alg, self.mac_alg, self.kex_alg, self.host_key_alg))


@dataclass(frozen=True)
class TlsObservation:
    conn: ConnTuple
    tls_version: str | None = None
    cipher_suite: str | None = None
    curve_or_group: str | None = None


@dataclass(frozen=True)
class RdpObservation:
    conn: ConnTuple
    security_protocol: str | None = None


def parse_ts(value: str) -> int:
    """Zeek epoch seconds ("1672531200.123456") to integer microseconds, exact."""
    whole, _, frac = value.partition(".")
    if not whole.isdigit() or (frac and not frac.isdigit()):
        raise ValueError(f"bad timestamp {value!r}")
    frac = (frac + "000000")[:6]
    return int(whole) * 1_000_000 + int(frac)


# client and server addresses repeat heavily within a log
_ip_address = lru_cache(maxsize=1 << 16)(ipaddress.ip_address)


def _conn(record: dict, schema: LogSchema) -> ConnTuple:
    try:
        ts = record["ts"]
        uid = record["uid"]
        oh, op = record["id.orig_h"], record["id.orig_p"]
        rh, rp = record["id.resp_h"], record["id.resp_p"]
    except KeyError as exc:
        raise ProjectionError(f"{schema.path} record lacks field {exc.args[0]}") from None
    if None in (ts, uid, oh, op, rh, rp):
        raise ProjectionError("required connection field is unset")
    try:
        ts_us = parse_ts(ts)
        orig_port, resp_port = int(op), int(rp)
        orig_ip, resp_ip = _ip_address(oh), _ip_address(rh)
    except ValueError as exc:
        raise ProjectionError(str(exc)) from None
    if ts_us <= 0 or not (1 <= orig_port <= 65535 and 1 <= resp_port <= 65535):
        raise ProjectionError("timestamp or port out of range")
    return ConnTuple(ts_us, orig_ip, orig_port, resp_ip, resp_port, uid)


def _check_path(schema: LogSchema, expected: tuple[str, ...]):
    if schema.path not in expected:
        raise ProjectionError(f"cannot project a {schema.path!r} record as {expected[0]}")


def project_ssh(record: dict, schema: LogSchema) -> SshObservation:
    _check_path(schema, ("ssh",))
    g = record.get
    return SshObservation(_conn(record, schema), g("client"), g("server"), g("cipher_alg"),
                          g("mac_alg"), g("kex_alg"), g("host_key_alg"))


# Zeek prints versions without the dot ("TLSv13"); reports use "TLSv1.3".
_TLS_VERSIONS = {
    "TLSv10": "TLSv1.0", "TLSv11": "TLSv1.1", "TLSv12": "TLSv1.2", "TLSv13": "TLSv1.3",
    "TLSv1.0": "TLSv1.0", "TLSv1.1": "TLSv1.1", "TLSv1.2": "TLSv1.2", "TLSv1.3": "TLSv1.3",
}


def project_tls(record: dict, schema: LogSchema) -> TlsObservation:
    _check_path(schema, ("ssl", "tls"))
    version = record.get("version")
    if version is not None:
        version = _TLS_VERSIONS.get(version, version)
    return TlsObservation(_conn(record, schema), version, record.get("cipher"), record.get("curve"))


def project_rdp(record: dict, schema: LogSchema) -> RdpObservation:
    _check_path(schema, ("rdp",))
    return RdpObservation(_conn(record, schema), record.get("security_protocol"))


PROJECTIONS = {"ssh": project_ssh, "ssl": project_tls, "tls": project_tls, "rdp": project_rdp}


def observations(source, stats: IngestStats | None = None, protocols: set[str] | None = None):
    """Stream typed observations; records of other log paths are skipped.

    Records whose connection fields cannot be projected are counted as malformed.
    """
    if stats is None:
        stats = IngestStats()
    for rec, schema in stream_log(source, stats):
        proj = PROJECTIONS.get(schema.path)
        if proj is None:
            continue
        if protocols is not None and _protocol_of(schema.path) not in protocols:
            continue
        try:
            yield proj(rec, schema)
        except ProjectionError:
            stats.records -= 1
            stats.malformed += 1


def _protocol_of(path: str) -> str:
    return "tls" if path in ("ssl", "tls") else path
