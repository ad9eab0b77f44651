import json

import pytest


@pytest.fixture
def spec_file(tmp_path):
    """Write a function-spec document to disk and return its path."""

    def write(doc, name="func.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc), encoding="utf-8")
        return str(p)

    return write


SPEC_TAKAGI2 = {"kind": "takagi", "r": 2}
SPEC_DISTANCE = {"kind": "distance"}
SPEC_U_THETA2 = {"kind": "useries", "r": 2, "psi": {"kind": "theta_splice", "r": 2}}
SPEC_WEIER_ETA = {"kind": "useries", "r": 2, "psi": {"kind": "sin2pi"}}
SPEC_PSI0 = {
    "kind": "sum",
    "terms": [
        {"kind": "distance"},
        {"kind": "scale", "a": "1", "child": {"kind": "distance_power", "p": 2}},
    ],
}
