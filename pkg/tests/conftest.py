import numpy as np
import pytest
from hypothesis import settings

from roi_ellipse.imgcore import GrayImage

settings.register_profile("ci", derandomize=True, deadline=None)
settings.load_profile("ci")

_CRITERION_LABELS = {
    "test_criterion_fast_oracle_equivalence": "Oracle equivalence - FAST segment test",
    "test_criterion_integral_oracle_equivalence": "Oracle equivalence - integral images",
    "test_criterion_svm_against_qp_reference": "SVM correctness vs dense-QP reference",
    "test_criterion_clustering_contracts": "Clustering contracts (FCM + k-means)",
    "test_criterion_dice_contracts": "Dice contracts",
    "test_criterion_end_to_end_phantom_loo": "End-to-end phantom LOO (SURF+SVM mean Dice >= 0.70)",
    "test_criterion_distance_augmentation_ablation": "Distance-augmentation ablation (gap >= 0.10)",
    "test_criterion_comparison_matrix_shape": "Comparison-matrix shape + bit-identical reports",
    "test_criterion_secondary_service_cli_parity": "[SECONDARY] UI/service ellipse parity",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance-criterion test")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            name = getattr(rep, "location", ("", 0, ""))[2].split("[")[0]
            if name in _CRITERION_LABELS:
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((list(_CRITERION_LABELS).index(name), status, name))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, status, name in sorted(lines):
            terminalreporter.write_line(f"{status}  {_CRITERION_LABELS[name]}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, width=64, height=64, low=0, high=256) -> GrayImage:
    return GrayImage(rng.integers(low, high, size=(height, width), dtype=np.int64))


def constant_image(value=100, width=64, height=64) -> GrayImage:
    return GrayImage(np.full((height, width), value, dtype=np.uint8))
