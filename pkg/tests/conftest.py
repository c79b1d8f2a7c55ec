import contextlib
import os
import sys
import time

sys.path.insert(0, os.path.dirname(__file__))

RESULTS = {}


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record PASS/FAIL and elapsed time for one acceptance criterion."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s)"
        RESULTS[number] = line
        print(line)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
