"""The scenario files shipped in configs/ stay loadable and well-behaved."""

from pathlib import Path

import pytest

from wfdsim import Simulation, parse_config, seconds

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", [
    "scenario1_standard.ini",
    "scenario2_autonomous.ini",
    "scenario2_golden_offset.ini",
])
def test_config_parses(name):
    config = parse_config((CONFIG_DIR / name).read_text(encoding="utf-8"))
    assert config.host_count == 3


def test_standard_scenario_forms_group_with_pings():
    config = parse_config((CONFIG_DIR / "scenario1_standard.ini").read_text())
    result = Simulation(config, seed=1).run()
    assert sorted(result.final_states.values()) == \
        ["ClientAssociated", "ClientAssociated", "GoOperating"]
    assert any(a.replies > 0 for a in result.metrics.ping_apps)


def test_golden_offset_scenario_waits_for_the_owner():
    config = parse_config(
        (CONFIG_DIR / "scenario2_golden_offset.ini").read_text())
    result = Simulation(config, seed=5).run(until=seconds(12))
    # nobody negotiates during the five silent seconds
    assert result.history.negotiations == []
    assert result.history.go_events[0][1] == "host[0]"
    assert sorted(result.final_states.values()) == \
        ["ClientAssociated", "ClientAssociated", "GoOperating"]
    # the owner's radio stays silent until its configured announcement
    host0 = [r for r in result.trace if r.src == "host[0]"]
    assert host0[0].frame_name == "Beacon"
    assert host0[0].time >= seconds(5)
