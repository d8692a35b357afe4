import random
from pathlib import Path

import pytest

from urllc_ec.scenario import scenario_from_dict

DATA = Path(__file__).resolve().parents[1] / "src" / "urllc_ec" / "data"
USECASES = DATA / "usecases"

CALIBRATION = {"service_rate_S": 3.0, "p1p2": 0.9994, "p3": 0.999}


def make_scenario(**fields):
    doc = {"p1": 0.99995, "d_max": 5.0, "n_max": 3, "calibration": dict(CALIBRATION)}
    calib = doc["calibration"]
    for key, value in fields.items():
        if key in calib or key == "rho":
            calib[key] = value
        else:
            doc[key] = value
    return scenario_from_dict(doc)


def perfect_scenario(**fields):
    doc = {"p1": 1.0, "p2": 1.0, "p3": 1.0, "d_max": 1.0, "service_rate_S": 3.0, "n_max": 3}
    doc.update(fields)
    return scenario_from_dict(doc)


def random_scenarios(count, seed, n_max=4):
    """Scenarios with probabilities and delays spread over their full ranges."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        doc = {
            "p1": rng.choice([rng.random(), 1 - 10 ** rng.uniform(-6, -1), 1.0]),
            "p2": rng.choice([rng.random(), 1 - 10 ** rng.uniform(-6, -1)]),
            "p3": rng.random(),
            "d_max": rng.uniform(0.6, 8.0),
            "d_gnb": rng.uniform(0.0, 0.4),
            "d_ue": rng.uniform(0.0, 0.2),
            "t_tx": rng.uniform(0.0, 0.1),
            "d_feed": rng.uniform(0.0, 1.5),
            "d_timeout": rng.uniform(0.0, 2.5),
            "service_rate_S": rng.uniform(0.5, 5.0),
            "n_max": n_max,
        }
        out.append(scenario_from_dict(doc))
    return out


def random_calibrated(count, seed):
    """Calibrated-style scenarios: perfect control channel, random data success, S and delay bound."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        out.append(make_scenario(
            p1=1.0,
            p1p2=1 - 10 ** rng.uniform(-6, -1),
            p3=rng.uniform(0.5, 1.0),
            service_rate_S=rng.uniform(0.5, 5.0),
            d_max=rng.uniform(1.0, 10.0),
            n_max=rng.randint(1, 4),
        ))
    return out


#: (criterion, passed, detail) verdicts collected by the acceptance suite
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def calibrated():
    return make_scenario()


@pytest.fixture
def perfect():
    return perfect_scenario()
