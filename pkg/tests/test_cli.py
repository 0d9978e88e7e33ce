import json
import os
import subprocess
import sys

import pytest

from ffls.cli import run, main, parse_config, UsageError


def ok(argv):
    code, text = run(argv)
    assert code == 0, text
    return json.loads(text)


def test_local_factor_with_z(tmp_path):
    source = tmp_path / "carlitz.json"
    source.write_text(json.dumps({"q": 3, "field": {"p": 3, "e": 1}, "order": "A", "d": 1,
                                "tau_coeffs": [[["t"]], [["1"]]]}))
    assert ok(["local-factor", "-m", str(source), "-Q", "t", "--z"]) == \
        {"Q": "t", "lie": "t", "mod": "t - z", "z": True}
    assert ok(["local-factor", "-m", "carlitz", "-Q", "t^2+1"])["mod"] == "t^2"


def test_unit_poly_vanishing_family():
    out = ok(["unit-poly", "-m", "vanishing-r1"])
    assert out["u"] == "1 - z" and out["order_at_1"] == 1


def test_lseries_outputs():
    out = ok(["lseries", "-m", "carlitz", "--deg-bound", "3"])
    assert out["place"] == "inf" and out["deg_bound"] == 3 and out["certified_prec"] == 4
    outz = ok(["lseries", "-m", "carlitz", "--deg-bound", "3", "--z"])
    assert outz["z_prec"] == 4
    outp = ok(["lseries", "-m", "carlitz", "-P", "t", "--prec", "8"])
    assert outp["prime"] == "t" and outp["mode"] == "product" and outp["stabilized"]
    outl = ok(["lseries", "-m", "carlitz", "-P", "t", "--prec", "8", "--mode", "log_formula"])
    assert outl["coeffs"] == outp["coeffs"]


def test_class_check_padic():
    out = ok(["class-check", "-m", "carlitz", "-P", "t", "--prec", "25"])
    assert all(c["agreement"] >= 25 for c in out["checks"][:3])


def test_newton_smb_torsion_and_vanishing():
    npg = ok(["newton", "-m", "theta-tau2", "--n-max", "6"])
    assert npg["edges"][0] == {"slope": [1, 1], "len": 8}
    smb = ok(["smb", "-m", "theta-tau2"])
    assert smb["ord_bound"] == 2 and smb["integral_count"] == 2
    tor = ok(["torsion-scan", "-m", "carlitz@2"])
    assert tor["torsion_free"] is False and tor["annihilator"] == "t^2 + t"
    van = ok(["vanishing-order", "-m", "vanishing-r2", "-P", "t", "--twists", "2", "--seed", "4"])
    assert van["order"] == 2 and van["padic_orders"] == {"t": 2}
    assert [row["order"] for row in van["twists"]] == [2, 2]


def test_exit_codes():
    assert run(["local-factor", "-m", "carlitz", "-Q", "t^2"])[0] == 2
    assert run(["frobnicate", "-m", "carlitz"])[0] == 1
    assert run(["local-factor", "-m", "carlitz"])[0] == 1
    assert run(["lseries", "-m", "carlitz", "--mode", "magic"])[0] == 1
    assert run([])[0] == 1
    assert run(["unit-poly", "-m", "/nonexistent/module.json"])[0] == 2
    assert run(["unit-poly", "-m", "carlitz-tensor2"])[0] == 2
    assert run(["unit-poly", "-m", '{"q": 3, "tau_coeffs": [["t + 1"], ["1"]]}'])[0] == 2


def test_precision_failure_exit_code(monkeypatch):
    from ffls.errors import PrecisionExhausted

    def boom(*a, **k):
        raise PrecisionExhausted("not stable")
    monkeypatch.setattr("ffls.cli.lseries_padic", boom)
    assert run(["lseries", "-m", "carlitz", "-P", "t"])[0] == 3


def test_config_defaults():
    cfg = parse_config(["lseries", "-m", "carlitz", "-P", "t + 1"])
    assert cfg.place == "t + 1" and cfg.prime == "t + 1" and cfg.mode == "product"
    cfg = parse_config(["vanishing-order", "-m", "carlitz", "-P", "t", "-P", "t + 1"])
    assert cfg.place == "inf" and cfg.primes == ["t", "t + 1"]
    with pytest.raises(UsageError):
        parse_config(["newton", "-m", "carlitz", "--n-max", "-1"])


def test_json_file_and_main(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert main(["torsion-scan", "-m", "carlitz", "--json", str(path)]) == 0
    assert json.loads(path.read_text())["torsion_free"] is True
    assert main(["local-factor", "-m", "carlitz", "-Q", "t"]) == 0
    assert capsys.readouterr().out == '{"Q":"t","lie":"t","mod":"t - 1","z":false}\n'


def test_byte_identical_across_thread_counts():
    argv = ["lseries", "-m", "theta-tau2", "--deg-bound", "4", "--z"]
    outs = []
    for n in ("1", "4"):
        env = dict(os.environ, FFLS_THREADS=n)
        outs.append(subprocess.run([sys.executable, "-m", "ffls.cli"] + argv, env=env,
                                   capture_output=True, check=True).stdout)
    assert outs[0] == outs[1] and outs[0]
