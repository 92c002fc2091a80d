"""Classification registry for negotiated cryptographic identifiers.

The registry is plain data: a tab-separated table shipped inside the package
(``data/registry.tsv``) that maps ``(identifier, protocol, role)`` to one of a
handful of security classes. Anything not listed classifies as ``Unknown``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

PROTOCOLS = ("ssh", "tls", "rdp")
ROLES = ("kex", "cipher", "mac", "hostkey", "suite", "security_protocol")


class AlgorithmClass(str, enum.Enum):
    PostQuantumHybrid = "PostQuantumHybrid"
    Classical = "Classical"
    Deprecated = "Deprecated"
    Insecure = "Insecure"
    Unknown = "Unknown"

    def __str__(self) -> str:
        return self.value


# Classes that the anomaly module reports as findings.
WEAK_CLASSES = frozenset({AlgorithmClass.Deprecated, AlgorithmClass.Insecure})


class RegistryError(ValueError):
    """Raised for malformed or inconsistent registry files."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


@dataclass(frozen=True)
class RegistryEntry:
    identifier: str
    protocol: str
    role: str
    cls: AlgorithmClass
    alias: str | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.identifier, self.protocol, self.role)


@dataclass(frozen=True)
class ProtocolStatus:
    protocol: str
    pqc_implementation: str | None = None


@dataclass(frozen=True)
class CryptoRegistry:
    """Immutable lookup table; build with :func:`load_registry` or :meth:`from_entries`."""

    entries: tuple[RegistryEntry, ...] = ()
    statuses: tuple[ProtocolStatus, ...] = ()
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _canonical: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _status: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for e in self.entries:
            self._index[e.key] = e.cls
            self._canonical[e.key] = e.identifier
            if e.alias is not None:
                akey = (e.alias, e.protocol, e.role)
                # an alias never shadows a primary identifier
                self._index.setdefault(akey, e.cls)
                self._canonical.setdefault(akey, e.identifier)
        for s in self.statuses:
            self._status[s.protocol] = s

    @classmethod
    def from_entries(cls, entries: Iterable[RegistryEntry],
                     statuses: Iterable[ProtocolStatus] = ()) -> "CryptoRegistry":
        entries = tuple(entries)
        seen: set[tuple[str, str, str]] = set()
        for e in entries:
            if e.key in seen:
                raise RegistryError(f"duplicate entry {e.key!r}")
            seen.add(e.key)
        return cls(entries, tuple(statuses))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RegistryEntry]:
        return iter(self.entries)

    def classify(self, protocol: str, role: str, identifier: str | None) -> AlgorithmClass:
        if identifier is None:
            return AlgorithmClass.Unknown
        return self._index.get((identifier, protocol, role), AlgorithmClass.Unknown)

    def canonical(self, protocol: str, role: str, identifier: str) -> str:
        """Return the primary spelling for an identifier or alias (identity if unlisted)."""
        return self._canonical.get((identifier, protocol, role), identifier)

    def protocol_status(self, protocol: str) -> ProtocolStatus:
        return self._status.get(protocol.lower(), ProtocolStatus(protocol))

    def identifiers(self, protocol: str, role: str, cls: AlgorithmClass | None = None) -> list[str]:
        return [e.identifier for e in self.entries
                if e.protocol == protocol and e.role == role and (cls is None or e.cls is cls)]


def classify(registry: CryptoRegistry, protocol: str, role: str, identifier: str | None) -> AlgorithmClass:
    return registry.classify(protocol, role, identifier)


def protocol_status(registry: CryptoRegistry, protocol: str) -> ProtocolStatus:
    return registry.protocol_status(protocol)


def _data_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def parse_registry(text: str, source: str | None = None) -> list[RegistryEntry]:
    entries = []
    seen: dict[tuple[str, str, str], int] = {}
    for lineno, parts in _data_lines(text):
        if len(parts) not in (4, 5):
            raise RegistryError(f"expected 4 or 5 tab-separated fields, got {len(parts)}", lineno, source)
        ident, proto, role, cls_name = parts[:4]
        alias = parts[4] if len(parts) == 5 and parts[4] else None
        if not ident:
            raise RegistryError("empty identifier", lineno, source)
        if proto not in PROTOCOLS:
            raise RegistryError(f"unknown protocol {proto!r}", lineno, source)
        if role not in ROLES:
            raise RegistryError(f"unknown role {role!r}", lineno, source)
        try:
            cls = AlgorithmClass(cls_name)
        except ValueError:
            raise RegistryError(f"unknown class {cls_name!r}", lineno, source) from None
        if cls is AlgorithmClass.Unknown:
            raise RegistryError("class Unknown cannot be assigned explicitly", lineno, source)
        entry = RegistryEntry(ident, proto, role, cls, alias)
        if entry.key in seen:
            raise RegistryError(
                f"duplicate entry {entry.key!r} (first defined on line {seen[entry.key]})", lineno, source)
        seen[entry.key] = lineno
        entries.append(entry)
    return entries


def parse_statuses(text: str, source: str | None = None) -> list[ProtocolStatus]:
    out = []
    for lineno, parts in _data_lines(text):
        if len(parts) != 2:
            raise RegistryError("expected protocol<TAB>descriptor", lineno, source)
        proto, desc = parts
        out.append(ProtocolStatus(proto.lower(), None if desc in ("", "N/A") else desc))
    return out


def _read_data(name: str) -> str:
    return resources.files("pqcmeter.data").joinpath(name).read_text(encoding="utf-8")


def load_registry(path: str | Path | None = None) -> CryptoRegistry:
    """Load a registry file; ``None`` loads the embedded default table.

    Protocol PQC statuses always come from the embedded table.
    """
    statuses = parse_statuses(_read_data("protocol_status.tsv"), "protocol_status.tsv")
    if path is None:
        return CryptoRegistry(tuple(parse_registry(_read_data("registry.tsv"), "registry.tsv")), tuple(statuses))
    path = Path(path)
    if not path.is_file():
        raise RegistryError(f"registry file not found: {path}")
    text = path.read_text(encoding="utf-8")
    return CryptoRegistry(tuple(parse_registry(text, str(path))), tuple(statuses))


def serialize_registry(registry: CryptoRegistry) -> str:
    lines = []
    for e in registry.entries:
        fields = [e.identifier, e.protocol, e.role, e.cls.value]
        if e.alias is not None:
            fields.append(e.alias)
        lines.append("\t".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


_default: CryptoRegistry | None = None


def default_registry() -> CryptoRegistry:
    global _default
    if _default is None:
        _default = load_registry()
    return _default


# --- software release years -------------------------------------------------

def version_key(version: str) -> tuple[int, ...]:
    """Dotted-numeric ordering key; non-numeric tails are ignored ("9.1p1" -> (9, 1))."""
    m = re.match(r"\d+(?:\.\d+)*", version)
    if not m:
        raise ValueError(f"not a dotted version: {version!r}")
    return tuple(int(x) for x in m.group(0).split("."))


_BANNER = re.compile(r"^SSH-\d+\.\d+-(?P<software>[A-Za-z][A-Za-z0-9.-]*?)[_-](?P<version>\d+(?:\.\d+)*)")


def parse_banner(banner: str | None) -> tuple[str, str] | None:
    """Split an SSH identification string into (software, dotted version).

    >>> parse_banner("SSH-2.0-OpenSSH_9.1p1 Debian-2")
    ('OpenSSH', '9.1')
    """
    if not banner:
        return None
    m = _BANNER.match(banner.strip())
    if not m:
        return None
    return m.group("software"), m.group("version")


@dataclass(frozen=True)
class VersionYearMap:
    entries: tuple[tuple[str, str, int], ...] = ()

    def __post_init__(self):
        for software, version, year in self.entries:
            version_key(version)
            if not 1999 <= year <= 2030:
                raise ValueError(f"release year out of range for {software} {version}: {year}")

    def lookup(self, software: str, version: str) -> int | None:
        key = version_key(version)
        best = None
        for sw, ver, year in self.entries:
            if sw != software:
                continue
            vk = version_key(ver)
            if vk == key:
                return year
            # "9.1.2" falls back to the "9.1" row
            if key[:len(vk)] == vk and (best is None or len(vk) > best[0]):
                best = (len(vk), year)
        return best[1] if best else None


def load_version_years(path: str | Path | None = None) -> VersionYearMap:
    if path is None:
        text, source = _read_data("openssh_years.tsv"), "openssh_years.tsv"
    else:
        text, source = Path(path).read_text(encoding="utf-8"), str(path)
    entries = []
    for lineno, parts in _data_lines(text):
        if len(parts) != 3:
            raise RegistryError("expected software<TAB>version<TAB>year", lineno, source)
        try:
            entries.append((parts[0], parts[1], int(parts[2])))
        except ValueError:
            raise RegistryError(f"bad year {parts[2]!r}", lineno, source) from None
    try:
        return VersionYearMap(tuple(entries))
    except ValueError as exc:
        raise RegistryError(str(exc), source=source) from None


def release_year(years: VersionYearMap, banner: str | None) -> int | None:
    parsed = parse_banner(banner)
    if parsed is None:
        return None
    return years.lookup(*parsed)
