"""Adoption statistics, distributions, monthly series and trend fits."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .ingest import SshObservation, TlsObservation
from .registry import AlgorithmClass, CryptoRegistry, VersionYearMap, release_year

# Observation attribute carrying each (protocol, role).
ROLE_FIELDS = {
    ("ssh", "kex"): "kex_alg",
    ("ssh", "cipher"): "cipher_alg",
    ("ssh", "mac"): "mac_alg",
    ("ssh", "hostkey"): "host_key_alg",
    ("tls", "suite"): "cipher_suite",
    ("rdp", "security_protocol"): "security_protocol",
}


class EmptyInput(ValueError):
    """No qualifying observations; distinct from a zero result."""


def format_percent(ratio: float, places: int = 2) -> str:
    """Render a ratio as a percentage, rounding half away from zero.

    Rates below 0.05% get one extra decimal so they do not collapse to a single
    significant digit (0.000294 -> "0.029%", 0.000794 -> "0.08%").
    """
    pct = Decimal(repr(ratio)) * 100
    if 0 < abs(pct) < Decimal("0.05"):
        places += 1
    q = Decimal(1).scaleb(-places)
    return f"{pct.quantize(q, rounding=ROUND_HALF_UP)}%"


@dataclass(frozen=True)
class AdoptionStat:
    pqc_count: int
    total_count: int

    def __post_init__(self):
        if self.total_count < 1:
            raise EmptyInput("adoption rate needs at least one observation")
        if not 0 <= self.pqc_count <= self.total_count:
            raise ValueError("pqc_count must lie in [0, total_count]")

    @property
    def ratio(self) -> float:
        return self.pqc_count / self.total_count

    def render(self) -> str:
        return format_percent(self.ratio)

    def to_dict(self) -> dict:
        return {"pqc_count": self.pqc_count, "total_count": self.total_count,
                "ratio": self.ratio, "rendered": self.render()}


def adoption_rate(observations: Iterable, registry: CryptoRegistry, protocol: str = "ssh",
                  role: str = "kex") -> AdoptionStat:
    """Share of observations whose ``role`` identifier is post-quantum hybrid.

    Observations without the role identifier set are not counted.
    """
    attr = ROLE_FIELDS[(protocol, role)]
    pqc = total = 0
    for obs in observations:
        ident = getattr(obs, attr, None)
        if ident is None:
            continue
        total += 1
        if registry.classify(protocol, role, ident) is AlgorithmClass.PostQuantumHybrid:
            pqc += 1
    if total == 0:
        raise EmptyInput(f"no {protocol} observations with {role} set")
    return AdoptionStat(pqc, total)


@dataclass(frozen=True)
class DistributionItem:
    identifier: str
    count: int
    total: int

    @property
    def ratio(self) -> float:
        return self.count / self.total

    @property
    def percentage(self) -> float:
        return 100.0 * self.count / self.total


@dataclass(frozen=True)
class Distribution:
    items: tuple[DistributionItem, ...]
    total: int

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Distribution":
        total = sum(counts.values())
        ordered = sorted(((k, v) for k, v in counts.items() if v > 0), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(DistributionItem(k, v, total) for k, v in ordered), total)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, identifier: str) -> DistributionItem:
        for item in self.items:
            if item.identifier == identifier:
                return item
        raise KeyError(identifier)

    def counts(self) -> dict[str, int]:
        return {i.identifier: i.count for i in self.items}

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "items": [{"identifier": i.identifier, "count": i.count, "ratio": i.ratio,
                       "percent": format_percent(i.ratio)} for i in self.items],
        }


def distribution(observations: Iterable, selector: str | Callable) -> Distribution:
    """Count identifiers picked by ``selector`` (attribute name or callable).

    Unset identifiers are skipped.
    """
    get = (lambda o: getattr(o, selector, None)) if isinstance(selector, str) else selector
    counts = Counter()
    for obs in observations:
        ident = get(obs)
        if ident is not None:
            counts[ident] += 1
    return Distribution.from_counts(counts)


# --- monthly series -----------------------------------------------------------

def month_of(ts_us: int) -> tuple[int, int]:
    return _month_of_day(ts_us // 86_400_000_000)


@lru_cache(maxsize=4096)
def _month_of_day(day: int) -> tuple[int, int]:
    dt = datetime.fromtimestamp(day * 86_400, tz=timezone.utc)
    return dt.year, dt.month


def _next_month(ym: tuple[int, int]) -> tuple[int, int]:
    y, m = ym
    return (y + 1, 1) if m == 12 else (y, m + 1)


@dataclass(frozen=True)
class TimeSeries:
    buckets: tuple[tuple[str, int], ...]
    predicate_label: str = ""

    @classmethod
    def from_month_counts(cls, counts: Mapping[tuple[int, int], int], label: str = "") -> "TimeSeries":
        if not counts:
            return cls((), label)
        lo, hi = min(counts), max(counts)
        out = []
        ym = lo
        while ym <= hi:
            out.append((f"{ym[0]:04d}-{ym[1]:02d}", counts.get(ym, 0)))
            ym = _next_month(ym)
        return cls(tuple(out), label)

    def __getitem__(self, month: str) -> int:
        return dict(self.buckets)[month]

    def counts(self) -> list[int]:
        return [c for _, c in self.buckets]

    def to_dict(self) -> dict:
        return {"predicate": self.predicate_label,
                "buckets": [{"month": m, "count": c} for m, c in self.buckets]}


def monthly_series(observations: Iterable, predicate: Callable[[object], bool],
                   label: str = "") -> TimeSeries:
    counts: Counter = Counter()
    for obs in observations:
        if predicate(obs):
            counts[month_of(obs.conn.ts_us)] += 1
    return TimeSeries.from_month_counts(counts, label)


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    r_squared: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared}


def linear_trend(series: TimeSeries | Iterable[float]) -> TrendFit:
    """Ordinary least squares of count against month index (0, 1, 2, ...)."""
    ys = series.counts() if isinstance(series, TimeSeries) else list(series)
    n = len(ys)
    if n < 2:
        raise ValueError("trend needs at least two buckets")
    xbar = (n - 1) / 2
    ybar = math.fsum(ys) / n
    sxx = math.fsum((i - xbar) ** 2 for i in range(n))
    sxy = math.fsum((i - xbar) * (y - ybar) for i, y in enumerate(ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    syy = math.fsum((y - ybar) ** 2 for y in ys)
    if syy == 0:
        r2 = 1.0
    else:
        ss_res = math.fsum((y - (intercept + slope * i)) ** 2 for i, y in enumerate(ys))
        r2 = min(1.0, max(0.0, 1.0 - ss_res / syy))
    return TrendFit(slope, intercept, r2)


# --- shares ---------------------------------------------------------------------

def version_share_from_counts(counts: Mapping[str | None, int]) -> dict[str, float]:
    total = sum(v for k, v in counts.items() if k is not None)
    if total == 0:
        raise EmptyInput("no TLS records with a version")
    return {k: v / total for k, v in sorted(counts.items(), key=lambda kv: str(kv[0])) if k is not None and v}


def tls_version_share(observations: Iterable[TlsObservation]) -> dict[str, float]:
    """Fraction of each TLS version among records that report one."""
    return version_share_from_counts(Counter(o.tls_version for o in observations))


@dataclass(frozen=True)
class StaleShare:
    stale: int
    resolvable: int
    unresolvable: int
    cutoff_year: int

    @property
    def fraction(self) -> float:
        return self.stale / self.resolvable

    def to_dict(self) -> dict:
        return {"cutoff_year": self.cutoff_year, "stale": self.stale, "resolvable": self.resolvable,
                "unresolvable": self.unresolvable, "fraction": self.fraction,
                "percent": format_percent(self.fraction)}


def stale_share_from_banners(banners: Mapping[str | None, int], years: VersionYearMap,
                             cutoff_year: int) -> StaleShare:
    stale = resolvable = unresolvable = 0
    for banner, n in banners.items():
        year = release_year(years, banner)
        if year is None:
            unresolvable += n
            continue
        resolvable += n
        if year <= cutoff_year:
            stale += n
    if resolvable == 0:
        raise EmptyInput("no server banner maps to a release year")
    return StaleShare(stale, resolvable, unresolvable, cutoff_year)


def stale_server_share(observations: Iterable[SshObservation], years: VersionYearMap,
                       cutoff_year: int = 2019) -> float:
    """Fraction of resolvable server banners released in or before ``cutoff_year``."""
    banners = Counter(o.server_banner for o in observations)
    return stale_share_from_banners(banners, years, cutoff_year).fraction


def class_share(counts: Mapping[str, int], registry: CryptoRegistry, protocol: str, role: str,
                classes: Iterable[AlgorithmClass]) -> tuple[int, int]:
    """(count in ``classes``, total) over an identifier count map."""
    classes = set(classes)
    hit = sum(n for ident, n in counts.items() if registry.classify(protocol, role, ident) in classes)
    return hit, sum(counts.values())
