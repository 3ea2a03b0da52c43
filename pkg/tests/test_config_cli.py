import json

import numpy as np
import pytest

from relscatter import cli
from relscatter.config import RunConfig, reference_config
from relscatter.errors import ValidationError
from relscatter.kernel import SignChoice


def small_config(**over):
    d = {"grid": {"L": 6.0, "N": 24}, "potential": {"kind": "power", "sigma": 2.5, "coupling": 0.3},
         "k": [1.0, 0.0], "branch": "plus"}
    d.update(over)
    return d


def test_config_round_trip_and_digest():
    cfg = RunConfig.from_dict(small_config())
    again = RunConfig.from_json(cfg.to_json())
    assert again.to_dict() == cfg.to_dict()
    assert again.digest() == cfg.digest()
    assert RunConfig.from_dict(small_config(branch="minus")).digest() != cfg.digest()
    assert cfg.branch is SignChoice.PLUS and cfg.solver == {"method": "auto", "rule": "diagonal"}


def test_reference_config():
    cfg = reference_config()
    assert cfg.grid == {"L": 12.0, "N": 96}
    assert cfg.potential.sigma == 2.5


@pytest.mark.parametrize("bad", [
    {"extra": 1},
    {"grid": {"L": 6.0}},
    {"grid": {"L": -1.0, "N": 24}},
    {"solver": {"method": "lu"}},
    {"solver": {"rule": "trapezoid"}},
    {"fit": {"rmin": 0.5}},
    {"fit": {"points": 3}},
    {"verification": {"nope": 1}},
    {"verification": {"doubling_levels": [24, 36, 72]}},
    {"potential": {"kind": "power", "sigma": 1.2, "coupling": 0.3}},
    {"k": [0.0, 0.0]},
])
def test_config_validation(bad):
    with pytest.raises(ValidationError):
        RunConfig.from_dict(small_config(**bad))


def test_config_needs_potential_and_json():
    with pytest.raises(ValidationError):
        RunConfig.from_dict({"k": [1.0, 0.0]})
    with pytest.raises(ValidationError):
        RunConfig.from_json("{not json")


def test_specfun_table(tmp_path, capsys):
    out = tmp_path / "h0.csv"
    assert cli.main(["specfun-table", "--fn", "h0", "--min", "0.1", "--max", "50", "--points", "7",
                     "--out", str(out)]) == 0
    first = out.read_text().splitlines()[0]
    assert first.startswith("# provenance: ")
    prov = json.loads(first[len("# provenance: "):])
    assert set(prov["versions"]) == {"relscatter", "numpy", "scipy", "python"}
    rows = cli.read_csv(out)
    assert list(rows[0]) == ["rho", "value", "regime"] and len(rows) == 7
    assert float(rows[0]["rho"]) == pytest.approx(0.1)


def test_kernel_table(tmp_path):
    out = tmp_path / "g.csv"
    assert cli.main(["kernel-table", "--lambda", "1", "--sign", "minus", "--rmin", "0.01", "--rmax", "10",
                     "--points", "5", "--spacing", "linear", "--out", str(out)]) == 0
    rows = cli.read_csv(out)
    assert list(rows[0]) == ["r", "re", "im", "singular", "regime"]


def test_invalid_inputs_exit_one(tmp_path, capsys):
    assert cli.main(["specfun-table", "--fn", "j0", "--min", "0", "--max", "1", "--out",
                     str(tmp_path / "x.csv")]) == cli.EXIT_INVALID
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(small_config(potential={"kind": "power", "sigma": 1.2, "coupling": 0.3})))
    assert cli.main(["solve", "--config", str(cfg), "--out", str(tmp_path / "f.json")]) == cli.EXIT_INVALID
    assert "sigma" in capsys.readouterr().err
    assert cli.main(["solve", "--config", str(tmp_path / "missing.json"),
                     "--out", str(tmp_path / "f.json")]) == cli.EXIT_INVALID
    assert cli.main(["verify-all", "--only", "0,3"]) == cli.EXIT_INVALID
    assert cli.main(["verify-all", "--only", "x"]) == cli.EXIT_INVALID


def test_parse_only():
    assert cli._parse_only("4, 1,4") == [1, 4]
    assert cli._parse_only(None) is None


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    d = tmp_path_factory.mktemp("run")
    cfg = d / "run.json"
    cfg.write_text(json.dumps(small_config()))
    assert cli.main(["solve", "--config", str(cfg), "--out", str(d / "FIELD.json")]) == 0
    return d


def test_solve_deterministic(solved):
    again = solved / "FIELD2.json"
    assert cli.main(["solve", "--config", str(solved / "run.json"), "--out", str(again)]) == 0
    assert again.read_bytes() == (solved / "FIELD.json").read_bytes()


def test_field_round_trip(solved):
    field, raw = cli.load_field(solved / "FIELD.json")
    back = cli.field_to_dict(field, RunConfig.from_dict(small_config()))
    assert np.array_equal(back["values"]["re"], raw["values"]["re"])
    assert back["provenance"] == raw["provenance"]
    assert field.residual_norm < 1e-10


def test_farfield_and_scan(solved):
    f = solved / "FIELD.json"
    assert cli.main(["farfield", "--field", str(f), "--directions", "8", "--out", str(solved / "ff.csv")]) == 0
    rows = cli.read_csv(solved / "ff.csv")
    assert len(rows) == 8 and list(rows[0]) == ["theta", "re", "im"]
    for mode in ("diff", "remainder"):
        out = solved / f"{mode}.csv"
        assert cli.main(["scan", "--field", str(f), "--mode", mode, "--direction", "0.5",
                         "--rmin", "10", "--rmax", "100", "--points", "6", "--out", str(out)]) == 0
        rows = cli.read_csv(out)
        assert list(rows[0]) == ["r", "value"] and len(rows) == 6


def test_corrupt_field_file(tmp_path):
    bad = tmp_path / "f.json"
    bad.write_text("{}")
    assert cli.main(["farfield", "--field", str(bad), "--out", str(tmp_path / "o.csv")]) == cli.EXIT_INVALID


def test_verify_all_subset(tmp_path, capsys):
    report = tmp_path / "REPORT.json"
    assert cli.main(["verify-all", "--only", "4,6", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "PASS [ 4]" in out and "PASS [ 6]" in out
    data = json.loads(report.read_text())
    assert data["selection"] == [4, 6] and data["all_hard_pass"]
