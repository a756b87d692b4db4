import pytest

from monostream.core import STREAMING, Read, StreamLog, Write

# The worked annotation example: five reads, four writes, one sentence.
TABLE2_SOURCE = ["And", "this", "made", "me", "sad"]
TABLE2_TARGET = ["这", "使", "我", "难过"]
TABLE2_ACTIONS = [
    Read("And"),
    Read("this"),
    Write("这"),
    Read("made"),
    Write("使"),
    Read("me"),
    Write("我"),
    Read("sad"),
    Write("难过"),
]
TABLE2_LINE = (
    '{"id":"t2","mode":"streaming","actions":'
    '[["R","And"],["R","this"],["W","这"],["R","made"],["W","使"],'
    '["R","me"],["W","我"],["R","sad"],["W","难过"]]}'
)


@pytest.fixture
def table2_log() -> StreamLog:
    return StreamLog("t2", STREAMING, TABLE2_ACTIONS)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    print(f"\nACCEPTANCE {status}: {name}", flush=True)
