import logging

import pytest

from grandnorm.config import GrandnormConfig
from grandnorm.service import ReportService


@pytest.fixture
def service() -> ReportService:
    return ReportService(GrandnormConfig.from_mapping({"grid": {"count": 8, "dyadic_levels": 4}}))


def test_lebesgue_two_point(service, inputs_dir):
    report = service.lebesgue(
        str(inputs_dir / "two_point.space"),
        str(inputs_dir / "two_point.exponent"),
        str(inputs_dir / "two_point.function"),
    )
    assert report["p_minus"] == 2.0
    assert report["p_plus"] == 3.0
    assert report["space"] == {"label": "two-point", "n": 2, "total_measure": 1.0}


def test_grand_and_equivalent_agree_for_constant_data(service):
    args = ("uniform:6", "const:2.5", "const:0.3", "power:0.5", 1.0)
    grand = service.grand(*args)
    equivalent = service.grand(*args, equivalent=True)
    assert grand["command"] == "norm grand"
    assert equivalent["command"] == "norm equivalent"
    assert grand["norm"] == equivalent["norm"]


def test_density_on_shallow_family(service):
    report = service.density("dyadic", "3..4", "const:2", None, "const:1", 1.0)
    assert report["report"]["resolved"] is False
    assert report["report"]["tail_verdict"] == "VANISHES"
    assert len(report["report"]["levels"]) == 2


def test_script_l_uses_configured_dyadic_levels(service):
    report = service.script_l("graded:10", "const:2", "power:0.5", 1.0, 0.5)
    assert report["profile"]["shifts"] == [0.03125, 0.0625, 0.125, 0.25, 0.5]


def test_timings_are_logged(service, caplog):
    with caplog.at_level(logging.INFO, logger="grandnorm.service"):
        service.space("dyadic:3", with_triangle=False)
    assert any("diag space: done" in message for message in caplog.messages)
