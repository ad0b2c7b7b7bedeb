import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion (tests tagged via record_property)."""
    results: dict = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") != "call" and key != "error":
                continue
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" not in props:
                continue
            n, title = props["criterion"]
            results.setdefault((n, title), []).append((rep.nodeid.split("::")[-1], key == "passed"))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), checks in sorted(results.items()):
        bad = [name for name, ok in checks if not ok]
        status = "PASS" if not bad else "FAIL"
        line = f"criterion {n:>2} {status}  {title}  ({len(checks) - len(bad)}/{len(checks)} checks)"
        if bad:
            line += "  failing: " + ", ".join(bad)
        terminalreporter.write_line(line)
