"""Shared pytest configuration.

After a run that included the acceptance suite, print one PASS/FAIL
line per release criterion so the verdicts are visible at a glance.
"""

ACCEPTANCE_FILE = "test_acceptance.py"

CRITERIA = [
    ("test_criterion_01_edit_distance_matches_brute_force",
     "criterion 1  edit distance equals brute-force script search"),
    ("test_criterion_02_per_wer_fixture_values",
     "criterion 2  PER/WER fixture values reproduce hand computation"),
    ("test_criterion_03_analytic_gradients_match_finite_differences",
     "criterion 3  analytic gradients match finite differences"),
    ("test_criterion_04_loss_analytics",
     "criterion 4  contrastive/diversity loss analytics"),
    ("test_criterion_05_toy_pretraining_converges_deterministically",
     "criterion 5  toy pretraining converges, uses codebook, reproduces"),
    ("test_criterion_06_classifier_reaches_training_accuracy",
     "criterion 6  tone classifier reaches 95% training accuracy"),
    ("test_criterion_07_vad_boundaries_silence_and_gain",
     "criterion 7  VAD boundaries, silence, gain invariance"),
    ("test_criterion_08_mfcc_basis_silence_and_tone_filter",
     "criterion 8  MFCC basis orthonormal, silence and tone behavior"),
    ("test_criterion_09_service_equivalence_replay_and_quarantine",
     "criterion 9  service equals library, replay and quarantine hold"),
]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if ACCEPTANCE_FILE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if status == "passed" and getattr(report, "when", "call") != "call":
                continue
            if outcomes.get(name) in ("failed", "error"):
                continue
            outcomes[name] = status
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for test_name, label in CRITERIA:
        if test_name not in outcomes:
            continue
        verdict = "PASS" if outcomes[test_name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}: {verdict}")
