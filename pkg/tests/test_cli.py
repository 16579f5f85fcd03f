from mdlink import sim
from mdlink.cli import main


def test_complexity_row(capsys):
    assert main(["complexity", "--gen", "23,04", "--channel", "example:2"]) == 0
    out = capsys.readouterr().out
    rows = out.strip().splitlines()
    assert rows[-1].split() == ["4", "2", "4", "32", "256", "64", "4"]


def test_complexity_csv(tmp_path, capsys):
    path = tmp_path / "row.csv"
    assert main(["complexity", "--gen", "103,024", "--channel", "example:5",
                 "--csv", str(path)]) == 0
    lines = path.read_text().strip().splitlines()
    assert lines[1] == "6,5,4,1088,65536,2048,32"


def test_sweep_writes_csv(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    rc = main([
        "sweep", "--gen", "23,04", "--channel", "example:2", "--receiver",
        "md-rsse:2", "--ebn0", "6:1:7", "--block-len", "500", "--min-errors",
        "5", "--max-bits", "3000", "--seed", "3", "--out", str(path),
    ])
    assert rc == 0
    records = sim.read_csv(path)
    assert [r.ebn0_db for r in records] == [6.0, 7.0]
    assert all(r.receiver == "md-rsse:2" for r in records)


def test_sweep_target_ber(capsys):
    rc = main([
        "sweep", "--gen", "23,04", "--channel", "example:2", "--receiver", "md",
        "--ebn0", "4,6", "--block-len", "1000", "--min-errors", "20",
        "--max-bits", "20000", "--seed", "3", "--target-ber", "1e-2",
    ])
    assert rc == 0
    assert "required Eb/N0" in capsys.readouterr().out


def test_bad_config_exits_nonzero(capsys):
    assert main(["sweep", "--gen", "23,04", "--receiver", "nope",
                 "--ebn0", "4:1:6"]) == 1
    assert "error:" in capsys.readouterr().err


def test_grid_parsing_errors(capsys):
    assert main(["sweep", "--gen", "23,04", "--ebn0", "4:0:6"]) == 1


def test_io_error_exits_nonzero(capsys):
    rc = main([
        "sweep", "--gen", "23,04", "--channel", "example:2", "--receiver", "md",
        "--ebn0", "6", "--block-len", "500", "--min-errors", "1",
        "--max-bits", "500", "--out", "/nonexistent-dir/x.csv",
    ])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["verify", "--trials", "1"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out
