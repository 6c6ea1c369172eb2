import csv
import subprocess
import sys

import numpy as np
import pytest

from procaqm.cli import ALPHA_KEYS, main, parse_config
from procaqm.errors import ParseError
from procaqm.fields import DiscreteModeField, write_field_file
from procaqm.inner_products import GENERAL, inner
from procaqm.localized import total_probability
from procaqm.mode_algebra import MetricParams, PhysicsConfig


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def field_file(tmp_path, rng):
    A = DiscreteModeField.random(PhysicsConfig(1.0, 1.0, 1.0), rng, 3)
    p = tmp_path / "a.field"
    write_field_file(A, p)
    return p, A


def test_parse_config_full():
    text = "# comment\nM = 2.0\ngamma=0.5\nkappa=3\nalpha_m_0 = 0.5,-0.25\nlattice_N=16\nseed=7\n\n"
    rc = parse_config(text)
    assert rc.cfg == PhysicsConfig(2.0, 0.5, 3.0)
    assert rc.params.alpha[1, 2] == 0.5 - 0.25j and rc.params.alpha[0, 0] == 1
    assert rc.lattice_n == 16 and rc.seed == 7 and rc.field is None
    assert len(ALPHA_KEYS) == 6


def test_parse_config_field_is_relative_to_base(tmp_path):
    assert parse_config("field=x.field", base=tmp_path).field == tmp_path / "x.field"


@pytest.mark.parametrize("text", ["M", "M=1\nM=2", "mass=1", "M=abc", "alpha_p_p1=1,2,3", "alpha_p_0=x",
                                  "lattice_N=7", "lattice_N=4", "M=-1", "seed=1.5"])
def test_parse_config_errors(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_verify_filtered_suites(capsys):
    assert main(["verify", "--suite", "gauge", "--suite", "specfun"]) == 0
    out = capsys.readouterr().out
    assert "gauge.probability_invariance: PASS" in out
    assert "mode_algebra" not in out
    assert out.strip().endswith("OVERALL: PASS")


def test_verify_with_config_and_field(tmp_path, field_file, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=3\nfield=a.field\nalpha_p_p1=1.2,0.3\n")
    assert main(["verify", "--config", str(cfg), "--suite", "gauge"]) == 0
    assert "norm_time_invariance" in capsys.readouterr().out


def test_verify_corrupted_field_file(tmp_path, capsys):
    (tmp_path / "bad.field").write_text("this is not a field\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("field=bad.field\n")
    assert main(["verify", "--config", str(cfg), "--suite", "gauge"]) == 2
    assert "parse error" in capsys.readouterr().err


def test_verify_bad_config_and_suite(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nonsense=1\n")
    assert main(["verify", "--config", str(cfg)]) == 2
    assert main(["verify", "--suite", "nope"]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["localized", "--mz-min", "0", "--mz-max", "1", "--out", "x.csv"]) == 2
    assert main(["localized", "--mz-min", "2", "--mz-max", "1", "--out", "x.csv"]) == 2
    assert main(["localized", "--mz-min", "1", "--mz-max", "2", "--points", "0", "--out", "x.csv"]) == 2
    assert main(["localized", "--epsilon", "2", "--mz-min", "1", "--mz-max", "2", "--out", "x.csv"]) == 2


def test_localized_csv(tmp_path):
    out = tmp_path / "prof.csv"
    assert main(["localized", "--mz-min", "0.5", "--mz-max", "2", "--points", "3", "--out", str(out)]) == 0
    head, rows = read_csv(out)
    assert head == ["Mz", "I1_closed", "I2_closed", "I3_closed", "I1_quad", "I2_quad", "I3_quad"]
    assert np.allclose(rows[:, 0], [0.5, 1.25, 2.0])
    assert np.all(np.abs(rows[:, 4:] / rows[:, 1:4] - 1) < 1e-3)


def test_localized_single_point_and_digits(tmp_path):
    out = tmp_path / "one.csv"
    assert main(["localized", "--mz-min", "1", "--mz-max", "3", "--points", "1", "--out", str(out),
                 "--epsilon", "-1", "--spin", "0"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert float(lines[1].split(",")[1]) == pytest.approx(0.0665214, rel=1e-5)
    mantissa = lines[1].split(",")[1].split("e")[0].lstrip("-").replace(".", "").lstrip("0")
    assert len(mantissa) <= 17


def test_localized_missing_directory(tmp_path, capsys):
    out = tmp_path / "nodir" / "x.csv"
    assert main(["localized", "--mz-min", "1", "--mz-max", "1", "--points", "1", "--out", str(out)]) == 2
    assert "nodir" in capsys.readouterr().err


def test_evolve_conserves_probability(tmp_path, field_file, capsys):
    path, A = field_file
    prefix = tmp_path / "snap"
    assert main(["evolve", str(path), "--steps", "4", "--dt", "0.5", "--density-grid", "3",
                 "--out-prefix", str(prefix)]) == 0
    lines = [l.split() for l in capsys.readouterr().out.splitlines()]
    probs = np.array([float(l[5]) for l in lines])
    assert len(lines) == 5
    assert np.allclose(probs, total_probability(A), rtol=1e-10, atol=0)
    head, rows = read_csv(f"{prefix}_0004.csv")
    assert head == ["x", "y", "z", "rho"] and rows.shape == (27, 4)
    assert np.all(rows[:, 3] >= 0)


def test_evolve_zero_step_is_static(tmp_path, field_file):
    path, _ = field_file
    prefix = tmp_path / "s"
    assert main(["evolve", str(path), "--steps", "2", "--dt", "0", "--density-grid", "2",
                 "--out-prefix", str(prefix)]) == 0
    assert (tmp_path / "s_0000.csv").read_bytes() == (tmp_path / "s_0002.csv").read_bytes()


def test_evolve_two_mode_interference(tmp_path, capsys):
    cfg = PhysicsConfig(1.0, 1.0, 1.0)
    A = DiscreteModeField(cfg, [[0.0, 0.0, 0.5], [0.0, 0.0, -0.5]], [[[0, 0, 1], [0, 0, 0]], [[0, 0, 1], [0, 0, 0]]])
    # longitudinal modes: the helicity vectors at +k and -k are not orthogonal, so they interfere
    write_field_file(A, tmp_path / "two.field")
    assert main(["evolve", str(tmp_path / "two.field"), "--steps", "3", "--dt", "0.7", "--density-grid", "5",
                 "--extent", "3", "--out-prefix", str(tmp_path / "t")]) == 0
    probs = [float(l.split()[5]) for l in capsys.readouterr().out.splitlines()]
    assert np.ptp(probs) < 1e-10 * probs[0]
    _, rows = read_csv(tmp_path / "t_0001.csv")
    assert np.ptp(rows[:, 3]) > 1e-3 * rows[:, 3].max()


def test_evolve_missing_file(tmp_path, capsys):
    assert main(["evolve", str(tmp_path / "nope.field"), "--out-prefix", str(tmp_path / "x")]) == 2
    assert "nope.field" in capsys.readouterr().err


def test_inner_command(tmp_path, field_file, rng, capsys):
    path, A = field_file
    cfg = tmp_path / "c.cfg"
    vals = rng.normal(size=6) + 1j * rng.normal(size=6)
    cfg.write_text("".join(f"{k}={float(v.real)!r},{float(v.imag)!r}\n" for k, v in zip(ALPHA_KEYS, vals)))
    assert main(["inner", str(path), str(path), "--config", str(cfg), "--x0", "0.3"]) == 0
    re, im = map(float, capsys.readouterr().out.strip().split(","))
    ref = inner(GENERAL(MetricParams.from_values(vals)), A, A, 0.3)
    assert re == pytest.approx(ref.real, rel=1e-14) and abs(im) < 1e-14 * abs(re)
    for kind in ("canonical", "sigma3"):
        assert main(["inner", str(path), str(path), "--kind", kind]) == 0


def test_determinism(tmp_path, field_file):
    path, _ = field_file
    outs = []
    for tag in ("a", "b"):
        r = subprocess.run([sys.executable, "-m", "procaqm", "verify", "--suite", "gauge", "--suite", "specfun"],
                           capture_output=True, text=True, check=True)
        outs.append(r.stdout)
        main(["evolve", str(path), "--steps", "1", "--density-grid", "2", "--out-prefix", str(tmp_path / tag)])
    assert outs[0] == outs[1] and "OVERALL: PASS" in outs[0]
    assert (tmp_path / "a_0001.csv").read_bytes() == (tmp_path / "b_0001.csv").read_bytes()
