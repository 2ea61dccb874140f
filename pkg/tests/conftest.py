import os
import time
from contextlib import contextmanager

import pytest

EXTENDED = os.environ.get("REGULUS_EXTENDED") == "1"


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(reason="extended tier; set REGULUS_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


class _Criterion:
    def __init__(self, key, title, limit):
        self.key, self.title, self.limit = key, title, limit
        self.failures = []
        self.notes = []
        self.start = time.perf_counter()

    def check(self, cond, msg):
        if not cond:
            self.failures.append(msg)
        return bool(cond)

    def note(self, msg):
        self.notes.append(msg)


@pytest.fixture
def criterion(request):
    store = request.config.__dict__.setdefault("_acceptance", {})

    @contextmanager
    def run(key, title, limit=None):
        c = _Criterion(key, title, limit)
        try:
            yield c
        except Exception as e:  # recorded, then re-raised
            c.failures.append(f"{type(e).__name__}: {e}")
            raise
        finally:
            elapsed = time.perf_counter() - c.start
            if c.limit is not None and elapsed > c.limit:
                c.failures.append(f"took {elapsed:.1f}s, limit {c.limit}s")
            store.setdefault(key, []).append((c.title, not c.failures, elapsed, c.failures, c.notes))
        if c.failures:
            pytest.fail("; ".join(c.failures), pytrace=False)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = dict(getattr(config, "_acceptance", {}))
    tr = terminalreporter
    for rep in tr.stats.get("skipped", []):
        name = rep.nodeid.rsplit("::", 1)[-1]
        if "test_acceptance" in rep.nodeid and name.startswith("test_criterion_"):
            key = name.split("_")[2].lstrip("0") + ("-full" if name.endswith("_full") else "")
            store.setdefault(key, []).append((name, None, 0.0, [], ["extended tier, set REGULUS_EXTENDED=1"]))
    if not store:
        return
    tr.section("acceptance criteria")
    for key in sorted(store, key=lambda k: (int(str(k).split("-")[0]), str(k))):
        for title, ok, elapsed, failures, notes in store[key]:
            status = "SKIPPED" if ok is None else ("PASS" if ok else "FAIL")
            line = f"criterion {key}: {status} ({elapsed:.2f}s) {title}"
            tr.write_line(line)
            for f in failures:
                tr.write_line(f"    failed: {f}")
            for n in notes:
                tr.write_line(f"    note: {n}")
