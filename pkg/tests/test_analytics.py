import io
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqcmeter import loggen
from pqcmeter.analytics import (
    AdoptionStat,
    Distribution,
    EmptyInput,
    TimeSeries,
    adoption_rate,
    distribution,
    format_percent,
    linear_trend,
    month_of,
    monthly_series,
    stale_share_from_banners,
    stale_server_share,
    tls_version_share,
    version_share_from_counts,
)
from pqcmeter.ingest import observations
from pqcmeter.pipeline import Aggregate, snapshot_report


@pytest.mark.parametrize("ratio,text", [
    (0.0, "0.00%"),
    (1.0, "100.00%"),
    (0.5302085, "53.02%"),
    (0.00125, "0.13%"),      # half away from zero, not banker's
    (0.000294, "0.029%"),    # below 0.05% gains a decimal
    (2 / 2518, "0.08%"),
    (2 / 2519, "0.08%"),
    (0.0005, "0.05%"),
    (0.00049, "0.049%"),
    (0.6696, "66.96%"),
])
def test_format_percent(ratio, text):
    assert format_percent(ratio) == text


def test_adoption_stat():
    s = AdoptionStat(6, 20557)
    assert 0.00028 <= s.ratio <= 0.00030
    assert s.render() == "0.029%"
    with pytest.raises(EmptyInput):
        AdoptionStat(0, 0)
    with pytest.raises(ValueError):
        AdoptionStat(3, 2)


@pytest.fixture(scope="module")
def table2_obs(fixture_dir):
    d = fixture_dir("table2-ssh-day")
    return list(observations(d / "ssh.log.gz"))


def test_adoption_rate_sample_day(table2_obs, registry):
    s = adoption_rate(table2_obs, registry)
    assert (s.pqc_count, s.total_count) == (2, 2518)
    assert s.render() == "0.08%"
    with pytest.raises(EmptyInput):
        adoption_rate([], registry)


def test_distribution_ordering(table2_obs):
    d = distribution(table2_obs, "kex_alg")
    assert [i.count for i in d.items] == [2030, 473, 6, 5, 2, 2]
    # ties broken by identifier
    tied = [i.identifier for i in d.items if i.count == 2]
    assert tied == sorted(tied)
    assert d.total == 2518
    assert sum(i.ratio for i in d.items) == pytest.approx(1.0)


@given(st.dictionaries(st.text(min_size=1, max_size=5), st.integers(0, 1000), max_size=20))
def test_distribution_properties(counts):
    d = Distribution.from_counts(counts)
    assert d.total == sum(counts.values())
    assert d.counts() == {k: v for k, v in counts.items() if v}
    keys = [(-i.count, i.identifier) for i in d.items]
    assert keys == sorted(keys)


def test_month_of_boundaries():
    assert month_of(1_704_067_199_999_999) == (2023, 12)
    assert month_of(1_704_067_200_000_000) == (2024, 1)


def test_series_zero_fills():
    s = TimeSeries.from_month_counts({(2023, 11): 3, (2024, 2): 5})
    assert s.buckets == (("2023-11", 3), ("2023-12", 0), ("2024-01", 0), ("2024-02", 5))
    assert TimeSeries.from_month_counts({}).buckets == ()


def test_monthly_series_from_trend_fixture(fixture_dir, registry):
    obs = observations(fixture_dir("trend-2023-2024") / "trend" / "ssh.log.gz")
    s = monthly_series(obs, lambda o: registry.classify("ssh", "kex", o.kex_alg).value == "PostQuantumHybrid")
    assert len(s.buckets) == 16
    assert s["2023-01"] == 37 and s["2024-04"] == 1585


@given(st.lists(st.integers(0, 10_000), min_size=2, max_size=40))
def test_trend_matches_polyfit(ys):
    fit = linear_trend(ys)
    slope, intercept = np.polyfit(np.arange(len(ys)), np.array(ys, dtype=float), 1)
    assert fit.slope == pytest.approx(slope, rel=1e-9, abs=1e-7)
    assert fit.intercept == pytest.approx(intercept, rel=1e-9, abs=1e-6)
    assert 0.0 <= fit.r_squared <= 1.0


@given(st.integers(-50, 50), st.integers(-1000, 1000), st.integers(2, 30))
def test_trend_exact_on_lines(a, b, n):
    fit = linear_trend([a * i + b for i in range(n)])
    assert fit.slope == pytest.approx(a, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


def test_trend_needs_two_points():
    with pytest.raises(ValueError):
        linear_trend([5])


def test_version_share():
    share = version_share_from_counts({"TLSv1.3": 65, "TLSv1.2": 35, None: 400})
    assert share == {"TLSv1.2": 0.35, "TLSv1.3": 0.65}
    with pytest.raises(EmptyInput):
        version_share_from_counts({None: 3})


def test_tls_version_share_small_fixture():
    rows = loggen.tls_rows(0.01, 0)
    share = tls_version_share(observations(io.BytesIO(loggen.render_log(loggen.SSL_SCHEMA, rows))))
    assert share["TLSv1.3"] == pytest.approx(0.65, abs=0.005)


def test_stale_share(fixture_dir, years):
    obs = list(observations(fixture_dir("stale-servers-83") / "ssh.log.gz"))
    assert stale_server_share(obs, years) == pytest.approx(0.83, abs=0.005)
    banners = Counter(o.server_banner for o in obs)
    s = stale_share_from_banners(banners, years, 2019)
    assert s.unresolvable == 25
    # a later cutoff can only add stale servers
    assert stale_share_from_banners(banners, years, 2022).stale >= s.stale


def _report(obs, registry, years):
    agg = Aggregate(files=1)
    for o in obs:
        agg.observe(o, registry)
    return snapshot_report(agg, registry, years)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32))
def test_report_permutation_invariant(table2_obs, registry, years, seed):
    shuffled = list(table2_obs)
    random.Random(seed).shuffle(shuffled)
    assert _report(shuffled, registry, years) == _report(table2_obs, registry, years)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32))
def test_merge_associative_commutative(table2_obs, registry, seed):
    obs = list(table2_obs)
    cuts = sorted(random.Random(seed).sample(range(len(obs)), 2))
    parts = []
    for chunk in (obs[:cuts[0]], obs[cuts[0]:cuts[1]], obs[cuts[1]:]):
        a = Aggregate(files=1)
        for o in chunk:
            a.observe(o, registry)
        parts.append(a)
    a, b, c = parts
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a + b + c).ssh_records == 2518


def test_random_partition_report_equal(table2_obs, registry, years):
    rnd = random.Random(4)
    obs = list(table2_obs)
    rnd.shuffle(obs)
    halves = [Aggregate(files=1), Aggregate(files=0)]
    for o in obs:
        halves[rnd.random() < 0.3].observe(o, registry)
    assert snapshot_report(halves[0] + halves[1], registry, years) == _report(table2_obs, registry, years)
