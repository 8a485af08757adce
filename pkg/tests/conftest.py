import numpy as np
import pytest


@pytest.fixture(scope="session")
def gt_cache(tmp_path_factory):
    """One ground-truth cache directory shared by the whole session."""
    return tmp_path_factory.mktemp("ground-truth")


@pytest.fixture(autouse=True)
def _isolated_cache(gt_cache, monkeypatch):
    monkeypatch.setenv("DISTPROP_CACHE_DIR", str(gt_cache))


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240611)


_VERDICTS_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Print and record one PASS/FAIL line, then assert it."""
    lines = request.config.stash.setdefault(_VERDICTS_KEY, [])

    def check(label: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
