def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance scoreboard after the capture machinery shuts down."""
    try:
        from test_acceptance import SCOREBOARD
    except ImportError:
        return
    if SCOREBOARD:
        terminalreporter.section("acceptance scoreboard")
        for line in SCOREBOARD:
            terminalreporter.write_line(line)
