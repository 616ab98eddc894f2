from fractions import Fraction

from hypothesis import settings, strategies as st

from hitlab.cf import ContinuedFraction

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def _canonical(qs):
    # a trailing 1 can be merged into its predecessor; keep the expansion unique
    if qs[-1] == 1:
        qs = qs[:-1] + [2]
    return ContinuedFraction(0, tuple(qs))


def cfs(min_depth=1, max_depth=12, max_quotient=10):
    return st.lists(st.integers(1, max_quotient), min_size=min_depth, max_size=max_depth).map(_canonical)


def unit_fractions(max_den=10**6):
    return st.builds(lambda d, n: Fraction(n % d, d), st.integers(1, max_den), st.integers(0, 10**9))


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
