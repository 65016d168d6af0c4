import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = (sys.modules.get("test_acceptance")
              or sys.modules.get("tests.test_acceptance"))
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
