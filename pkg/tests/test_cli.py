import csv
import json

import pytest

from fockforge.cli import CONVERGE_COLUMNS, LEVY_COLUMNS, main
from fockforge.config import default_config_dict


def write_config(tmp_path, **overrides):
    doc = default_config_dict()
    doc.update(overrides)
    doc["out"] = str(tmp_path / "out")
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def small_converge(tmp_path, **overrides):
    overrides.setdefault("grid", {"T_max": "1", "m": 16, "N": 3})
    overrides.setdefault("depths", [1, 2, 3, 4])
    return write_config(tmp_path, **overrides)


def test_selftest_passes():
    assert main(["selftest"]) == 0


def test_selftest_catches_injected_sign_flip(capsys):
    assert main(["selftest", "--inject-sign-flip"]) == 1
    assert "free-product oracle equivalence" in capsys.readouterr().err


def test_selftest_with_no_suites_warns(caplog):
    assert main(["selftest", "--suites", ""]) == 0
    assert "no suites" in caplog.text


def test_selftest_unknown_suite():
    assert main(["selftest", "--suites", "nonsense"]) == 2


def test_converge_columns_and_monotone_residual(tmp_path):
    cfg = small_converge(tmp_path)
    assert main(["converge", "--config", str(cfg)]) == 0
    rows = read_csv(tmp_path / "out" / "converge.csv")
    assert rows[0] == CONVERGE_COLUMNS
    residuals = [float(r[2]) for r in rows[1:]]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    assert all(float(r[5]) == 0 for r in rows[1:])
    report = json.loads((tmp_path / "out" / "converge.json").read_text())
    assert report["rate_exponent"] is not None
    assert b"\r\n" not in (tmp_path / "out" / "converge.csv").read_bytes()


def test_converge_zero_matrix_has_zero_defects(tmp_path):
    cfg = small_converge(tmp_path, L=[[["0", "0"]]])
    assert main(["converge", "--config", str(cfg)]) == 0
    for row in read_csv(tmp_path / "out" / "converge.csv")[1:]:
        assert [float(x) for x in row[2:]] == [0, 0, 0, 0]


def test_converge_plus_sign_unitarity_columns_do_not_decrease(tmp_path):
    # expected to fail: for d = 1, L = 1 the defect rises and then dips slightly at the finest depth
    cfg = small_converge(tmp_path, depths=[1, 2, 3, 4, 5], grid={"T_max": "1", "m": 32, "N": 3})
    assert main(["converge", "--config", str(cfg), "--psi-sign", "paper_plus"]) == 0
    rows = read_csv(tmp_path / "out" / "converge.csv")[1:]
    for col in (3, 4):
        values = [float(r[col]) for r in rows]
        assert values[-1] > values[0]
        assert all(b >= a for a, b in zip(values, values[1:])), values


def test_converge_depth_max(tmp_path):
    cfg = small_converge(tmp_path)
    assert main(["converge", "--config", str(cfg), "--depth-max", "2"]) == 0
    assert [r[0] for r in read_csv(tmp_path / "out" / "converge.csv")[1:]] == ["1", "2"]


def test_levy_default_passes_and_table_shape(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["levy", "--config", str(cfg)]) == 0
    rows = read_csv(tmp_path / "out" / "levy_moments.csv")
    assert rows[0] == LEVY_COLUMNS
    unit = [r for r in rows[1:] if r[0] == "1"]
    assert unit and all(float(r[2]) == 1 for r in unit)
    report = json.loads((tmp_path / "out" / "levy.json").read_text())
    assert all(r["passed"] for r in report["reports"])
    assert report["cyclicity"]["full"]


def test_levy_zero_tolerance_fails_freeness(tmp_path):
    cfg = write_config(tmp_path, tolerances={"freeness": 0}, levy_depths=[3, 4])
    assert main(["levy", "--config", str(cfg)]) == 1
    report = json.loads((tmp_path / "out" / "levy.json").read_text())
    freeness = next(r for r in report["reports"] if r["name"] == "freeness")
    assert not freeness["passed"]


def test_behii(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["behii", "--config", str(cfg)]) == 0
    report = json.loads((tmp_path / "out" / "behii.json").read_text())
    assert all(s["violations"] == 0 for s in report["suites"])


def test_example_commands(tmp_path):
    cfg = small_converge(tmp_path, depths=[1, 2, 3])
    assert main(["example1", "--config", str(cfg)]) == 0
    assert json.loads((tmp_path / "out" / "example1.json").read_text())["drift_sign"] == 1
    assert main(["example3", "--config", str(cfg)]) == 0
    assert json.loads((tmp_path / "out" / "example3.json").read_text())["strictly_decreasing"]


@pytest.mark.parametrize(
    "overrides,path",
    [
        ({"L": [[["1", "0"], ["0", "0"]]]}, "/L/0"),
        ({"d": 0}, "/d"),
        ({"L": [[[0.5, "0"]]]}, "/L/0/0/0"),
        ({"interval": ["0", "1/3"]}, "/interval"),
        ({"psi_sign": "plus"}, "/psi_sign"),
    ],
)
def test_config_errors_name_the_field(tmp_path, capsys, overrides, path):
    cfg = write_config(tmp_path, **overrides)
    assert main(["converge", "--config", str(cfg)]) == 2
    assert f"config error at {path}" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["converge", "--config", str(tmp_path / "absent.json")]) == 2
    assert "config error" in capsys.readouterr().err
