import pytest

from spectral_shapes import cli, experiments
from spectral_shapes.experiments import BoundAuditRow
from spectral_shapes.geometry import uniform_boundary_measure
from spectral_shapes.moebius import d, pushforward


@pytest.fixture
def domain(tmp_path):
    p = tmp_path / "quad.txt"
    p.write_text("name=quad\nkind=polymap\ncoeffs=0,0;1,0;0.25,0\n")
    return str(p)


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("map = disk: 0,0;1,0\nmap = quad: 0,0;1,0;0.25,0\npolygon = square h=0.1\n")
    return str(p)


def test_solve(domain, tmp_path, capsys):
    assert cli.main(["solve", "--domain", domain, "--out", str(tmp_path / "o"), "-k", "3"]) == 0
    out = capsys.readouterr().out
    assert "steklov" in out and "neumann" in out
    assert (tmp_path / "o" / "quad_spectrum.csv").exists()


def test_hersch(tmp_path, capsys):
    m = tmp_path / "m.csv"
    pushforward(d(0.3), uniform_boundary_measure(256)).to_csv(m)
    assert cli.main(["hersch", "--measure", str(m), "--psi", "bessel", "--out", str(tmp_path)]) == 0
    assert "xi = -0.3" in capsys.readouterr().out


def test_fold_demo_and_cap_search(domain, tmp_path, capsys):
    out = str(tmp_path / "o")
    assert cli.main(["fold-demo", "--domain", domain, "--cap", "2.0,0.5", "--out", out]) == 0
    assert cli.main(["cap-search", "--domain", domain, "--problem", "steklov", "--out", out]) == 0
    text = capsys.readouterr().out
    assert "margin" in text and "cap l =" in text
    assert (tmp_path / "o" / "rearranged.csv").exists()
    assert (tmp_path / "o" / "anisotropy_landscape.csv").exists()


def test_bounds_sweep_exit_status(config, tmp_path, monkeypatch):
    out = tmp_path / "b"
    assert cli.main(["bounds-sweep", "--config", config, "--out", str(out)]) == 0
    assert (out / "bounds.csv").exists() and (out / "bounds_density.md").exists()
    bad = BoundAuditRow("bad", "fake", "const:1", area_mass=1.0, mu=[100.0, 100.0])
    monkeypatch.setattr(experiments, "audit_map", lambda *a, **k: bad)
    assert cli.main(["bounds-sweep", "--config", config, "--out", str(out)]) == 1
    assert "Failures" in (out / "bounds.md").read_text()


def test_suite_exit_status(config, tmp_path, monkeypatch):
    failing = lambda cfg, rng: [experiments.Check("fake", "c", "q", 1.0, 0.0, False)]
    monkeypatch.setattr(experiments, "SUITES", {"fake": failing})
    assert cli.main(["suite", "--config", config, "--out", str(tmp_path), "--seed", "5"]) == 1
    assert (tmp_path / "failures").exists()


def test_missing_arguments(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["solve", "--out", str(tmp_path)])
    with pytest.raises(SystemExit):
        cli.main(["bogus"])
