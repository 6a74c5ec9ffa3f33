acceptance_lines = []


def pytest_addoption(parser):
    parser.addoption(
        "--run-extended", action="store_true", default=False,
        help="run resource-capped extended checks (larger pump sectors)")


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
