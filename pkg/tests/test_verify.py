"""Formula adjudication: verdicts, corrected forms, report rendering."""

import math

import numpy as np
import pytest

from atomlaser.fock import SqueezedInput, Truncation
from atomlaser.observables import ScenarioConfig
from atomlaser.propagator import ModelParams, ResonanceError
from atomlaser.verify import CONFIRMED, TYPO_SUSPECT, discrepancy_report

DEFAULT_GRID = np.arange(200) * (2 * math.pi / 200)

EXPECTED_DEFAULT_VERDICTS = {
    "conversion-number-transfer": CONFIRMED,
    "light-number-mean": CONFIRMED,
    "atom-number-variance-at-conversion": CONFIRMED,
    "q-pair-vacuum": CONFIRMED,
    "atom-squeeze-pair": CONFIRMED,
    "atom-squeeze-aligned-phase": CONFIRMED,
    "atom-squeeze-crossed-phase": CONFIRMED,
    "atom-squared-amplitude-vacuum": CONFIRMED,
    "light-number-square-vacuum": TYPO_SUSPECT,
    "light-number-variance-vacuum": TYPO_SUSPECT,
    "atom-number-variance-vacuum": TYPO_SUSPECT,
    "atom-number-mean-vacuum": TYPO_SUSPECT,
    "q-pair-real-input": TYPO_SUSPECT,
}


@pytest.fixture(scope="module")
def default_report():
    scn = ScenarioConfig(
        ModelParams(4.0, 4.0, 1.0, 0.0), SqueezedInput(1.0), Truncation(64)
    )
    return discrepancy_report(scn, DEFAULT_GRID)


def test_default_scenario_verdicts(default_report):
    got = {check.name: check.verdict for check in default_report.checks}
    assert got == EXPECTED_DEFAULT_VERDICTS
    assert default_report.unresolved == 0


def test_typo_suspects_have_matching_corrections(default_report):
    for check in default_report.checks:
        if check.verdict == TYPO_SUSPECT:
            assert check.dev_corrected_oracle <= check.tolerance
            # the misprint gap is orders of magnitude above the tolerance
            assert check.dev_literal_oracle > 1e3 * check.tolerance


def test_confirmed_checks_also_match_moment_map(default_report):
    # where the transcription is right it matches the (exact) moment map to
    # algebraic accuracy, independent of the oracle's truncation error
    for check in default_report.checks:
        if check.verdict == CONFIRMED and not math.isnan(check.dev_literal_map):
            assert check.dev_literal_map < default_report.tol_algebraic


def test_scaled_tolerance_reflects_tail(default_report):
    assert default_report.tol_oracle_scaled > default_report.tol_oracle
    assert default_report.tol_oracle_scaled < 1e-3
    assert default_report.input_tail_mass > 0.0


def test_render_is_deterministic_and_complete(default_report):
    text = default_report.render()
    assert text == default_report.render()
    for name in EXPECTED_DEFAULT_VERDICTS:
        assert name in text
    assert "unresolved: 0" in text


def test_real_input_scenario_flags_q_numerator():
    scn = ScenarioConfig(
        ModelParams(4.0, 4.0, 1.0, 0.0),
        SqueezedInput(0.6, 0.0, 0.5),
        Truncation(96),
    )
    report = discrepancy_report(scn, np.linspace(0.0, math.pi, 60))
    verdicts = {check.name: check.verdict for check in report.checks}
    assert verdicts["q-pair-real-input"] == TYPO_SUSPECT
    assert verdicts["light-number-mean"] == CONFIRMED
    assert verdicts["atom-number-variance-at-conversion"] == CONFIRMED
    assert "atom-squeeze-pair" not in verdicts  # needs m = 0
    assert report.unresolved == 0


def test_report_requires_resonance():
    scn = ScenarioConfig(
        ModelParams(5.0, 4.0, 1.0, 0.0), SqueezedInput(1.0), Truncation(64)
    )
    with pytest.raises(ResonanceError):
        discrepancy_report(scn, DEFAULT_GRID)
