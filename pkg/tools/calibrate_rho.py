"""Pick rho for each shipped use-case file.

rho balances the two banded targets of a table row: theta_max within 25% of
the reference value and EC(theta_max) within 10% of the reference EC.  The
chosen theta minimises max(|theta/theta_pub - 1| / 0.25, |EC/EC_pub - 1| / 0.10);
rho is then M - EC(theta), rounded to 4 significant digits.

Usage: python tools/calibrate_rho.py [--write]
"""

import json
import math
import sys
from pathlib import Path

from urllc_ec.effective_capacity import ec
from urllc_ec.operating_region import ec_supremum
from urllc_ec.scenario import scenario_from_dict

USECASES = Path(__file__).resolve().parents[1] / "src" / "urllc_ec" / "data" / "usecases"

# use case -> (reference theta_max, reference EC in bpcu)
REFERENCE = {
    "telepresence": (2.30, 2.98),
    "discrete_automation": (2.30, 2.98),
    "electricity_distribution": (5.86, 1.48),
    "remote_control": (5.86, 1.48),
    "navigation_systems": (6.80, 1.01),
    "flight_control_systems": (8.65, 1.0),
}


def balanced_rho(doc, theta_pub, ec_pub):
    doc = dict(doc)
    doc.get("calibration", {}).pop("rho", None)
    s = scenario_from_dict(doc)
    n = s.n_max
    m = ec_supremum(s, n)

    def score(th):
        return max(abs(th / theta_pub - 1) / 0.25, abs(ec(s, th, n) / ec_pub - 1) / 0.10)

    grid = [theta_pub * (0.5 + i / 2000) for i in range(2001)]
    best = min(grid, key=score)
    rho = m - ec(s, best, n)
    return float(f"{rho:.4g}"), best, score(best)


def main(write=False):
    for path in sorted(USECASES.glob("*.json")):
        doc = json.loads(path.read_text())
        theta_pub, ec_pub = REFERENCE[path.stem]
        rho, theta, sc = balanced_rho(json.loads(path.read_text()), theta_pub, ec_pub)
        print(f"{path.stem:26s} rho={rho:<8g} theta_max~{theta:.3f} band-score={sc:.3f}")
        if write:
            doc["calibration"]["rho"] = rho
            path.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main("--write" in sys.argv)
