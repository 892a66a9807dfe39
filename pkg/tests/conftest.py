import random
import re
from fractions import Fraction

import pytest

from pclab.matrix import Mat
from pclab.scalar import Scalar


def rand_scalar(rnd: random.Random, complex_entries=True, lo=-6, hi=6) -> Scalar:
    re_ = Fraction(rnd.randint(lo, hi), rnd.randint(1, 5))
    im_ = Fraction(rnd.randint(lo, hi), rnd.randint(1, 5)) if complex_entries else 0
    return Scalar(re_, im_)


def rand_mat(rnd: random.Random, rows: int, cols: int | None = None, **kw) -> Mat:
    cols = rows if cols is None else cols
    return Mat(rows, cols, [rand_scalar(rnd, **kw) for _ in range(rows * cols)])


def cofactor_det(rows):
    """Laplace expansion along the first row; works for any ring with + - *."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


@pytest.fixture
def rnd():
    return random.Random(12345)


# -- one summary line per acceptance criterion ------------------------------

_CRITERIA: dict[int, list] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.failed:
        _CRITERIA.setdefault(int(m.group(1)), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok = all(_CRITERIA[k])
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
