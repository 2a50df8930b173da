from hypothesis import settings

# fixed example generation so repeated runs produce identical output
settings.register_profile("repo", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line("criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail))
