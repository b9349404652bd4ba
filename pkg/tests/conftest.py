from hypothesis import settings

settings.register_profile("suite", max_examples=30, deadline=None)
settings.load_profile("suite")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULT_LINES

    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULT_LINES):
            terminalreporter.write_line(line)
