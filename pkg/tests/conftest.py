import numpy as np
import pytest

from circulant_manifold.classifier import SamplePlan, sample_points
from circulant_manifold.corpus import NAMES, builtin
from circulant_manifold.manifold import PointJetBundle, bundle_at

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(criterion: str, passed: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus_specs():
    return {name: builtin(name) for name in NAMES}


@pytest.fixture(scope="session")
def corpus_bundles(corpus_specs):
    """100 admitted points per built-in metric, default seed."""
    return {name: [bundle_at(spec, p) for p in sample_points(spec, SamplePlan())]
            for name, spec in corpus_specs.items()}


def random_bundle(rng: np.random.Generator, partials=None) -> PointJetBundle:
    """Jets with A > C > B > 0 and (by default) random partial derivatives."""
    b = rng.uniform(0.2, 2.0)
    c = b + rng.uniform(0.1, 2.0)
    a = c + rng.uniform(0.1, 2.0)
    if partials is None:
        partials = rng.normal(size=(3, 4))
    return PointJetBundle.from_arrays([a, b, c], partials)
