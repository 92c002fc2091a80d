import os
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

from pqcmeter import loggen
from pqcmeter.registry import default_registry, load_version_years

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", max_examples=20, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def years():
    return load_version_years()


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Generate a loggen profile once per session: fixture_dir("stale-servers-83")."""
    cache = {}

    def make(name, scale=1.0, seed=0):
        key = (name, scale, seed)
        if key not in cache:
            out = tmp_path_factory.mktemp(name.replace("-", "_"))
            loggen.generate(loggen.GenProfile(name, scale, seed), out)
            cache[key] = out
        return cache[key]

    return make


@pytest.fixture
def acceptance(request):
    """Record a criterion's outcome for the end-of-run summary."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    @contextmanager
    def criterion(number, title):
        notes = []
        try:
            yield notes
        except BaseException as exc:
            first = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            results[number] = (title, False, first[:160])
            raise
        results[number] = (title, True, "; ".join(notes))

    return criterion


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail = results[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
