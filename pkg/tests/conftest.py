import numpy as np
import pytest

from qcturbo.permutation import QcSpec, build_qc_permutation
from qcturbo.rsc import RscCode

FIG1_SIGMA = (3, 2, 0, 4, 1)
FIG1_SHIFTS = (0, 2, 1, 3, 4)
FIG1_PRINTED_SHIFTS = (0, 3, 4, 2, 1)
FIG1_TABLE = [3, 12, 5, 19, 21, 8, 17, 10, 24, 1, 13, 22, 15, 4, 6, 18, 2, 20, 9, 11, 23, 7, 0, 14, 16]


@pytest.fixture(scope="session")
def fig1_perm():
    return build_qc_permutation(QcSpec(5, 5, FIG1_SIGMA, FIG1_SHIFTS))


@pytest.fixture(scope="session")
def code75():
    return RscCode(0o7, 0o5)


@pytest.fixture(scope="session")
def code1315():
    return RscCode(0o13, 0o15)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting: one line per criterion --------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    status = "PASS" if rep.passed else "FAIL"
    _CRITERIA[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[number]
        line = f"criterion {number:2d}  {status}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
