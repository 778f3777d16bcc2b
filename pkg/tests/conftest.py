import pytest

_LINES: list = []


class _Recorder:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __call__(self, passed: bool, detail: str = "") -> bool:
        line = f"criterion {self.number:>2} {'PASS' if passed else 'FAIL'}  {self.title}"
        if detail:
            line += f"  [{detail}]"
        _LINES.append((self.number, line))
        print(line)
        if not passed:
            pytest.fail(line, pytrace=False)
        return True


@pytest.fixture
def criterion(request):
    mark = request.node.get_closest_marker("criterion")
    return _Recorder(*mark.args)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion under test")


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
