"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in pytest's terminal summary.
"""
import pytest

from bellqec import verify

RESULTS: list[str] = []


def _report(number: int, title: str, result: verify.CheckResult):
    line = f"criterion {number:>2} {title}: {result.line()}"
    RESULTS.append(line)
    print(line)
    for note in result.detail:
        print("    " + note)
    assert result.passed, "\n".join(result.detail)


def test_01_table_golden():
    _report(1, "syndrome table golden rows", verify.check_table_golden())


def test_02_short_distance_correction():
    _report(2, "short-distance correction", verify.check_short_distance())


def test_03_single_closed_form():
    _report(3, "single-qubit closed form", verify.check_single_closed_form())


def test_04_bipartite_coefficients():
    result = verify.check_bipartite_coefficients()
    # the k=2 comparison must be reported, whatever it finds
    assert any(line.startswith("k=2 bell: published") for line in result.detail)
    _report(4, "bipartite coefficients", result)


def test_05_symmetry_ordering():
    _report(5, "symmetry and ordering", verify.check_symmetry_ordering())


def test_06_unencoded_baseline():
    _report(6, "unencoded baseline", verify.check_unencoded_baseline())


def test_07_phaseflip_equivalence():
    _report(7, "phase-flip equivalence", verify.check_phaseflip_equivalence())


def test_08_longdistance_protocol():
    _report(8, "long-distance protocol", verify.check_longdistance())


def test_09_entropy_suite():
    _report(9, "entropy suite", verify.check_entropy())


def test_10_montecarlo():
    _report(10, "Monte Carlo agreement", verify.check_montecarlo(samples=100_000))


def test_table_check_negative_control(tmp_path):
    rows = verify.default_golden_path().read_text().splitlines()
    rows[3] = rows[3].replace("X", "I", 1)
    bad = tmp_path / "corrupt.csv"
    bad.write_text("\n".join(rows) + "\n")
    assert not verify.check_table_golden(bad).passed


@pytest.mark.parametrize("alias,name", [("eq24", "bipartite_coefficients"), ("table1", "syndrome_table_golden"),
                                        ("8", "longdistance_protocol")])
def test_only_filter(alias, name):
    assert verify.resolve([alias]) == [name]
