import pytest

from marketrec.corpus import load_corpus
from marketrec.synth import SyntheticSpec, generate

# Fixture parameters used by the directional acceptance checks; the seeds are
# pinned so every run evaluates exactly the same planted dataset.
PLANTED_SPEC = SyntheticSpec(users=200, clusters=10, noise=0.1, seed=42)
PLANTED_SPLIT_SEED = 7


@pytest.fixture(scope="session")
def planted_dataset(tmp_path_factory):
    """Generated planted-cluster dataset: (directory, manifest)."""
    out = tmp_path_factory.mktemp("planted")
    manifest = generate(PLANTED_SPEC, out)
    return out, manifest


@pytest.fixture(scope="session")
def planted_corpus(planted_dataset):
    directory, _ = planted_dataset
    return load_corpus(directory)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """50 users, 5 clusters, exactly 200 purchase rows: (directory, manifest)."""
    spec = SyntheticSpec(users=50, clusters=5, noise=0.1, seed=5, purchases_per_user=4)
    out = tmp_path_factory.mktemp("small")
    manifest = generate(spec, out)
    return out, manifest


@pytest.fixture(scope="session")
def small_corpus(small_dataset):
    directory, _ = small_dataset
    return load_corpus(directory)


@pytest.fixture(scope="session")
def medium_dataset(tmp_path_factory):
    """60 users with default intensities, so most users are split-eligible."""
    spec = SyntheticSpec(users=60, clusters=5, noise=0.1, seed=11)
    out = tmp_path_factory.mktemp("medium")
    manifest = generate(spec, out)
    return out, manifest


@pytest.fixture(scope="session")
def medium_corpus(medium_dataset):
    directory, _ = medium_dataset
    return load_corpus(directory)


_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(_acceptance_outcomes):
        outcome = _acceptance_outcomes[nodeid]
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}: {nodeid.split('::')[-1]}")
