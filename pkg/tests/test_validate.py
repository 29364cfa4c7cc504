"""The conformance checkers: they accept the simulator's own lossless output
and flag targeted corruptions."""

import pytest

from conftest import VERBATIM_AUTONOMOUS_CONFIG, run_standard
from wfdsim import Simulation, parse_config, seconds
from wfdsim.history import History
from wfdsim.validate import (
    check_intent_argmax,
    check_single_go_history,
    check_transition_legality,
    validate_history,
    validate_trace_text,
)


@pytest.fixture(scope="module")
def standard_result():
    return run_standard(hosts=3, seed=1, until=20)


@pytest.fixture(scope="module")
def autonomous_result():
    config = parse_config(VERBATIM_AUTONOMOUS_CONFIG)
    return Simulation(config, seed=15).run(until=seconds(10))


def test_accepts_own_standard_trace(standard_result):
    assert validate_trace_text(standard_result.trace_text()) == []


def test_accepts_own_autonomous_trace(autonomous_result):
    assert validate_trace_text(autonomous_result.trace_text()) == []


def test_accepts_own_histories(standard_result, autonomous_result):
    assert validate_history(standard_result.history) == []
    assert validate_history(autonomous_result.history) == []


def _lines(result):
    return result.trace_text().splitlines()


def test_flags_removed_ack(standard_result):
    lines = _lines(standard_result)
    ack_id = next(line.split("\t")[0] for line in lines if line.endswith("\tACK"))
    mutated = "\n".join(line for line in lines
                        if not line.startswith(ack_id + "\t")) + "\n"
    violations = validate_trace_text(mutated)
    assert any(v.code == "ack-pairing" for v in violations)


def test_flags_duplicated_owner(standard_result):
    lines = _lines(standard_result)
    beacon = next(line for line in lines if line.endswith("\tBeacon"))
    owner = beacon.split("\t")[2].split(" --> ")[0]
    imposter = "host[9]" if owner != "host[9]" else "host[8]"
    forged = beacon.replace(owner + " --> ", imposter + " --> ")
    # forge a beacon from a second device under a fresh event id
    forged = "#999999" + forged[forged.index("\t"):]
    mutated = "\n".join(lines + [forged]) + "\n"
    violations = validate_trace_text(mutated)
    assert any(v.code == "single-go" for v in violations)


def test_flags_direct_client_to_client_data(standard_result):
    lines = _lines(standard_result)
    owner = next(line for line in lines if line.endswith("\tBeacon")) \
        .split("\t")[2].split(" --> ")[0]
    clients = [h for h in ("host[0]", "host[1]", "host[2]") if h != owner]
    last_time = lines[-1].split("\t")[1]
    forged = [
        f"#999998\t{last_time}\t{clients[0]} --> {clients[1]}\tping99",
        f"#999999\t{last_time}\t{clients[1]} --> {clients[0]}\tACK",
    ]
    mutated = "\n".join(lines + forged) + "\n"
    violations = validate_trace_text(mutated)
    assert any(v.code == "relay-rule" for v in violations)


def test_flags_illegal_protocol_jump(standard_result):
    lines = _lines(standard_result)
    owner = next(line for line in lines if line.endswith("\tBeacon")) \
        .split("\t")[2].split(" --> ")[0]
    client = next(h for h in ("host[0]", "host[1]", "host[2]") if h != owner)
    last_time = lines[-1].split("\t")[1]
    # a client that already authenticated suddenly negotiates again
    forged = [
        f"#999998\t{last_time}\t{client} --> {owner}\tGO Negotiation Request Frame",
        f"#999999\t{last_time}\t{owner} --> {client}\tACK",
    ]
    mutated = "\n".join(lines + forged) + "\n"
    violations = validate_trace_text(mutated)
    assert any(v.code == "state-legality" for v in violations)


def test_flags_malformed_line():
    violations = validate_trace_text("once upon a time\n")
    assert violations and violations[0].code == "grammar"


def test_flags_unknown_frame_name(standard_result):
    lines = _lines(standard_result)
    last_time = lines[-1].split("\t")[1]
    mutated = "\n".join(lines + [
        f"#999999\t{last_time}\thost[0] --> host[1]\tFlux Capacitor Frame",
    ]) + "\n"
    violations = validate_trace_text(mutated)
    assert any(v.code == "grammar" for v in violations)


def test_history_checker_flags_illegal_transition():
    history = History()
    history.transition(0, "host[0]", "Idle", "Scan")
    history.transition(10, "host[0]", "Scan", "GoOperating")  # no such edge
    violations = check_transition_legality(history)
    assert len(violations) == 1
    assert "Scan -> GoOperating" in violations[0].message


def test_history_checker_flags_duplicate_owner():
    history = History()
    history.go_established(0, "host[0]", "g")
    history.go_established(5, "host[1]", "g")
    assert check_single_go_history(history)


def test_history_checker_accepts_two_groups_with_distinct_names():
    history = History()
    history.go_established(0, "host[0]", "alpha")
    history.go_established(5, "host[1]", "beta")
    assert check_single_go_history(history) == []


def test_history_checker_flags_wrong_winner():
    history = History()
    history.negotiation(0, "host[0]", 3, "host[1]", 9, winner="host[0]")
    assert check_intent_argmax(history)
    history2 = History()
    history2.negotiation(0, "host[0]", 3, "host[1]", 9, winner="host[1]")
    assert check_intent_argmax(history2) == []
