import pytest

from durrmeyer.operators import SequencePair

SEQUENCES = {
    "(1,-1)": SequencePair.constant(1, -1),
    "(0,1)": SequencePair.constant(0, 1),
    "(1/2,0)": SequencePair.parse("1/2", "0"),
}


@pytest.fixture(params=sorted(SEQUENCES))
def seq(request):
    return SEQUENCES[request.param]


# criterion number -> list of (check, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, check: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))
        print(f"criterion {criterion} [{check}]: {'PASS' if passed else 'FAIL'} {detail}")
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[k]
        failed = [c for c in checks if not c[1]]
        status = "PASS" if not failed else "FAIL"
        note = f"{len(checks) - len(failed)}/{len(checks)} checks"
        if failed:
            note += "; failing: " + ", ".join(c[0] for c in failed)
        terminalreporter.write_line(f"criterion {k}: {status} ({note})")
