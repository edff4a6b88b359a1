import os
from pathlib import Path

import pytest

import cscc

EXAMPLES = Path(os.environ.get("CSCC_EXAMPLES", Path(__file__).resolve().parents[1] / "data"))


def test_six_vertex_graph_matches_oracle():
    report = cscc.run_file(EXAMPLES / "fig2.edges", verify=True)
    assert report["verification"] == "equal"
    assert report["nontrivial_scc"] == {"min": 1, "max": 1}
    assert report["status"] == "complete"
    assert list(report)[:3] == ["model", "variables", "inputs"]


@pytest.mark.parametrize("saturation", [True, False])
@pytest.mark.parametrize("threads", [1, 3])
def test_generated_networks_verify(saturation, threads):
    for seed in range(5):
        report = cscc.run(cscc.generate(seed), saturation=saturation, threads=threads, verify=True)
        assert report["verification"] == "equal"


def test_expand_names_inputs_by_row():
    ex = cscc.expand("fun f/1\nx1, f(x1)\n")
    assert ex["variables"] == ["x1"]
    assert ex["inputs"] == ["f_0", "f_1"]
    assert len(ex["updates"]) == 1


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        cscc.run("x1, (x1 &\n")


def test_no_admissible_colours():
    report = cscc.run("fun f/1\nconstraint 0\nx1, f(x1)\n")
    assert report["colours"] == 0
    assert report["components"] == 0
