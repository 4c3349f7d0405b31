import io
import json
import subprocess
import sys

import numpy as np
import pytest

from locwave import cli
from locwave.numerics import FieldGrid, GridSpec


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_mackinnon_ball_grid():
    code, text = run("exact", "--family", "mackinnon", "--a", "0", "--grid", "8,128,-8,8,256")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "rho,zeta,t,re,im,abs2"
    assert len(lines) == 1 + 128 * 256
    grid = cli.read_csv(io.StringIO(text), GridSpec(8.0, 128, -8.0, 8.0, 256))
    I = np.abs(grid.values[0]) ** 2
    assert np.allclose(I, I[:, ::-1], rtol=1e-12)
    assert I[0].argmax() in (127, 128)


def test_residual_on_beam():
    code, text = run("verify", "residual", "--family", "beam", "--E", "1", "--pz", "1")
    assert code == 0
    order = float(text.split("convergence_order = ")[1].split()[0])
    assert order == pytest.approx(2.0, abs=0.2)


def test_measure_widths():
    code, text = run("paraxial", "--family", "g1", "--alpha", "100", "--measure-widths", "--tol", "0.01")
    assert code == 0
    d_rho = float(text.split("delta_rho = ")[1].split()[0])
    assert d_rho == pytest.approx(14.1421, abs=1e-3)


def test_validation_exit_code(capsys):
    code, _ = run("beam", "--E", "0.1", "--pz", "1")
    assert code == 2
    assert "E >= p_z^2/(2m)" in capsys.readouterr().err
    assert run("potential-train", "--omega", "0.6", "--list-modes")[0] == 2
    assert run("beam", "--grid", "1,2,3")[0] == 2
    assert run("beam", "--threads", "0")[0] == 2
    assert run("paraxial", "--b", "0.5")[0] == 2


def test_tolerance_exit_code():
    # the paraxial field is not an exact solution: the order check fails numerically
    assert run("verify", "residual", "--family", "g1", "--alpha", "25")[0] == 3
    assert run("verify", "translate", "--family", "finite-energy", "--probes", "20")[0] == 3


def test_translate_pass():
    code, text = run("verify", "translate", "--family", "mackinnon", "--a", "0.4")
    assert code == 0 and "translation_deviation" in text


def test_propagate_finite_energy():
    code, text = run("verify", "propagate", "--family", "finite-energy", "--dt", "1",
                     "--grid", "60,96,-60,60,192")
    assert code == 0
    err = float(text.split("relative_l2_error = ")[1].split()[0])
    assert err < 1e-3


def test_list_modes():
    code, text = run("potential-train", "--list-modes")
    assert code == 0
    assert len(text.splitlines()) == 5


def test_terms_parsing():
    t = cli._terms_arg("0+:1,2-:0.5+0.5j, 1+")
    assert [(x.n, x.branch, x.f) for x in t] == [(0, "+", 1), (2, "-", 0.5 + 0.5j), (1, "+", 1.0)]
    with pytest.raises(Exception):
        cli._terms_arg("0:1")


@pytest.mark.parametrize("argv", [
    ("beam", "--E", "1.2", "--pz", "1", "--n", "1"),
    ("exact", "--family", "series", "--n-trunc", "3"),
    ("potential-train", "--terms", "0+:1,1-:0.3j", "--grid", "10,16,-10,10,32"),
])
def test_threads_identical(argv):
    _, a = run(*argv, "--threads", "1", "--t", "0,0.5")
    _, b = run(*argv, "--threads", "4", "--t", "0,0.5")
    assert a == b and len(a) > 0


def _random_grid(rng):
    spec = GridSpec(3.0, 8, -2.0, 2.0, 9, (0.0, 0.25))
    v = rng.standard_normal((2, 8, 9)) * 10.0 ** rng.integers(-150, 150, (2, 8, 9)) + 1j * rng.standard_normal((2, 8, 9))
    return FieldGrid(spec, v, spec.rho(), spec.zeta(), np.array(spec.t_samples), V=1.0)


def test_csv_round_trip(rng):
    g = _random_grid(rng)
    buf = io.StringIO()
    cli.write_csv(g, buf)
    back = cli.read_csv(io.StringIO(buf.getvalue()), g.spec)
    assert np.array_equal(back.values, g.values)
    assert np.array_equal(back.rho, g.rho) and np.array_equal(back.zeta, g.zeta)


def test_json_round_trip(rng):
    g = _random_grid(rng)
    meta = {"family": "test", "params": {"x": 1.5}}
    text = cli.grid_to_json(g, meta)
    back, m = cli.grid_from_json(text)
    assert np.array_equal(back.values, g.values)
    assert m["family"] == "test"
    assert cli.grid_to_json(back, m) == text


def test_json_metadata_reproduces(tmp_path):
    out = tmp_path / "f.json"
    assert run("exact", "--family", "mackinnon", "--a", "0.4", "--format", "json", "--out", str(out))[0] == 0
    doc = json.loads(out.read_text())
    for key in ("family", "params", "units", "code_version", "errata_flags"):
        assert key in doc["meta"]
    g, meta = cli.grid_from_json(out.read_text())
    assert meta["params"]["a"] == 0.4
    from locwave.core import PhysicalContext
    from locwave.exact import mackinnon_solution
    u = meta["units"]
    ctx = PhysicalContext(u["hbar"], u["mass"], u["V"], u["b"])
    again = mackinnon_solution(ctx, meta["params"]["a"], meta["params"]["s0"]).sample(g.spec)
    assert np.array_equal(again.values, g.values)


def test_config_file(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[global]\nV = 2.0\n\n[exact]\nfamily = mackinnon\na = 0.3\n")
    _, from_cfg = run("exact", "--config", str(cfg), "--grid", "4,8,-4,4,8")
    _, direct = run("exact", "--family", "mackinnon", "--a", "0.3", "--V", "2", "--grid", "4,8,-4,4,8")
    assert from_cfg == direct
    _, override = run("exact", "--config", str(cfg), "--a", "0.5", "--grid", "4,8,-4,4,8")
    _, direct5 = run("exact", "--family", "mackinnon", "--a", "0.5", "--V", "2", "--grid", "4,8,-4,4,8")
    assert override == direct5
    assert run("exact", "--config", str(tmp_path / "missing.ini"))[0] == 2


def test_errata_json():
    code, text = run("errata", "--format", "json")
    assert code == 0
    items = json.loads(text)
    topics = {i["topic"] for i in items}
    assert {"paraxial-phase-sign", "g1-exponent", "invp-regularization", "incomplete-gamma-definition",
            "finite-energy-closed-form"} <= topics
    ev = {i["topic"]: i["evidence"] for i in items}
    assert ev["g1-exponent"]["rel_dev_corrected_vs_quadrature"] < 1e-10
    assert ev["g1-exponent"]["rel_dev_reference_vs_quadrature"] > 1e-2
    assert ev["paraxial-phase-sign"]["rel_dev_from_exact_integral_sign_minus"] < 1e-2


def test_closed_form_report(capsys):
    code, _ = run("finite-energy", "--closed-form-report", "--grid", "10,8,-10,10,16", "--format", "json")
    assert code == 0
    assert '"status": "unvalidated"' in capsys.readouterr().err


def test_console_entry():
    r = subprocess.run([sys.executable, "-m", "locwave.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
