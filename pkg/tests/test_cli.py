import json

import pytest

from isacrelay import make_example5, spec_to_json
from isacrelay.cli import _parse_dgrid, main


def run(argv):
    return main(argv)


def test_version_flag(capsys):
    assert run(["--version"]) == 0


def test_parse_dgrid():
    assert _parse_dgrid("0:0.2:0.1") == pytest.approx([0.0, 0.1, 0.2])
    assert _parse_dgrid("0.1,0.3") == pytest.approx([0.1, 0.3])
    from isacrelay.cli import UsageError
    with pytest.raises(UsageError):
        _parse_dgrid("")
    with pytest.raises(UsageError):
        _parse_dgrid("0.5:0.1:0.1")
    with pytest.raises(UsageError):
        _parse_dgrid("0:1:0.1:7")


def test_tradeoff_csv_and_manifest(tmp_path):
    out = tmp_path / "curve.csv"
    code = run(["tradeoff", "--factory", "example5", "--ps", "0.5",
                "--pn", "0.2", "--kind", "c4", "--dgrid", "0,0.25,0.5",
                "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# manifest: ")
    manifest = json.loads(lines[0][len("# manifest: "):])
    assert manifest["command"] == "tradeoff"
    assert manifest["kinds"] == ["c4"]
    assert manifest["d_grid"] == [0.0, 0.25, 0.5]
    assert lines[1] == "D,rate,kind,feasible"
    assert len(lines) == 2 + 3
    for row in lines[2:]:
        d, rate, kind, feasible = row.split(",")
        assert kind == "c4" and feasible in ("true", "false")
    sidecar = out.with_suffix(".csv.manifest.json")
    assert json.loads(sidecar.read_text()) == manifest


def test_tradeoff_rerun_is_byte_identical(tmp_path):
    out = tmp_path / "curve.csv"
    argv = ["tradeoff", "--factory", "example5", "--ps", "0.5", "--pn", "0.2",
            "--kind", "c4", "--dgrid", "0.5", "--out", str(out)]
    assert run(argv) == 0
    first = out.read_bytes()
    assert run(argv) == 0
    assert out.read_bytes() == first


def test_channel_json_input(tmp_path):
    path = tmp_path / "chan.json"
    path.write_text(spec_to_json(make_example5(0.5, 0.2)))
    out = tmp_path / "c.csv"
    assert run(["tradeoff", "--channel-json", str(path), "--kind", "c4",
                "--dgrid", "0.5", "--out", str(out)]) == 0


def test_config_file_overrides_optimizer(tmp_path):
    cfgfile = tmp_path / "opt.toml"
    cfgfile.write_text("[optimizer]\nseeds = 2\nrng_seed = 99\n")
    out = tmp_path / "c.csv"
    assert run(["tradeoff", "--factory", "example5", "--ps", "0.5",
                "--pn", "0.2", "--kind", "c4", "--dgrid", "0.5",
                "--config", str(cfgfile), "--out", str(out)]) == 0
    manifest = json.loads(out.read_text().splitlines()[0][len("# manifest: "):])
    assert manifest["optimizer"]["seeds"] == 2
    assert manifest["rng_seed"] == 99


@pytest.mark.parametrize("argv", [
    ["tradeoff", "--factory", "example5", "--ps", "0.5", "--pn", "0.2",
     "--kind", "c4", "--dgrid", ""],                       # empty grid
    ["tradeoff", "--kind", "c4", "--dgrid", "0.5"],        # no channel
    ["tradeoff", "--factory", "example5", "--ps", "0.5",
     "--kind", "c4", "--dgrid", "0.5"],                    # missing --pn
])
def test_usage_errors_exit_2(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path / "x.csv")]) == 2


def test_dmin_gaussian(capsys):
    assert run(["dmin", "--gaussian", "example2", "--p1", "1",
                "--s1", "1", "--s2", "1"]) == 0
    out = capsys.readouterr().out
    assert "0.333333333333" in out
    assert run(["dmin", "--gaussian", "example2", "--p1", "1"]) == 2


def test_dmin_auto_dispatch(capsys):
    assert run(["dmin", "--factory", "example4", "--ps1", "0.4",
                "--ps2", "0.2", "--ps3", "0.6"]) == 0
    assert "deterministic inputs" in capsys.readouterr().out


def test_verify_identities_suite(capsys):
    assert run(["verify", "identities", "--fuzz", "50"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_estimator_dump(tmp_path):
    out = tmp_path / "est.json"
    assert run(["estimator-dump", "--factory", "example5", "--ps", "0.5",
                "--pn", "0.2", "--conditioning", "x,y1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["conditioning"] == ["x", "y1"]
    assert doc["shape"] == [2, 3]


def test_simulate(capsys):
    assert run(["simulate", "--factory", "example5", "--ps", "0.5",
                "--pn", "0.2", "--samples", "50000", "--batches", "10"]) == 0
    assert "empirical" in capsys.readouterr().out
