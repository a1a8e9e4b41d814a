ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail=""):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
