import io
import json
import math

import pytest

from poissondirac.cli import main
from poissondirac.config import ENV_CONFIG, Config, ConfigError
from poissondirac.multivec import Poly, PolyBivector, PolyThreeForm


def run(argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin_text), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


SIN_Y = {"terms": [{"k": [0, 1], "sin": 1.0}]}


def test_dirac_from_bivector_with_certificate(tmp_path):
    code, out, _ = run(["dirac", "from-bivector", write(tmp_path, "pi.json", {"matrix": [[0, "1/2"], ["-1/2", 0]]})])
    assert code == 0
    payload = json.loads(out)
    assert payload["certificate"]["maximal"] and payload["certificate"]["isotropic"]
    assert payload["dirac"]["v_dim"] == 2


def test_dirac_pair_roundtrip_through_cli(tmp_path):
    _, out, _ = run(["dirac", "from-two-form", write(tmp_path, "w.json", [[0, 1, 0], [-1, 0, 2], [0, -2, 0]])])
    dirac = json.loads(out)["dirac"]
    _, out, _ = run(["dirac", "to-pair", "-"], json.dumps(dirac))
    pair = json.loads(out)
    code, out, _ = run(["dirac", "from-pair", "-"], json.dumps(pair))
    assert code == 0 and json.loads(out)["dirac"] == dirac


def test_dirac_gauge_and_roundtrip(tmp_path):
    _, out, _ = run(["dirac", "from-bivector", "-"], json.dumps([[0, 1], [-1, 0]]))
    dirac = json.loads(out)["dirac"]
    code, out, _ = run(["dirac", "gauge", "-"], json.dumps({"dirac": dirac, "b": [[0, 2], [-2, 0]]}))
    assert code == 0
    code, out, _ = run(["dirac", "roundtrip", "-"], json.dumps({"f": [[1, 0], [0, 0]], "target": dirac}))
    assert code == 0
    assert json.loads(out) == {"push_pull_identity": False, "range_in_image": False}


def test_domain_rejection_exit_code():
    code, _, err = run(["dirac", "from-bivector", "-"], json.dumps([[0, 1], [2, 0]]))
    assert code == 2 and json.loads(err)["error"]["code"] == "domain_rejection"


def test_schema_error_carries_pointer():
    code, _, err = run(["dirac", "from-bivector", "-"], json.dumps({"matrix": [[0, 1.5], [-1, 0]]}))
    e = json.loads(err)["error"]
    assert code == 1 and e["code"] == "schema" and e["pointer"] == "/matrix/0/1" and e["message"]


def test_missing_key_pointer():
    code, _, err = run(["dirac", "gauge", "-"], json.dumps({"dirac": {"v_dim": 1, "basis": [[1, 0]]}}))
    assert code == 1 and json.loads(err)["error"]["pointer"] == "/b"


def test_malformed_json():
    code, _, err = run(["torus", "relation", "-"], "{not json")
    assert code == 1 and json.loads(err)["error"]["code"] == "json"


def test_unknown_subcommand_and_flag():
    assert run(["frobnicate"])[0] == 1
    code, _, err = run(["selftest", "--bogus"])
    assert code == 1 and json.loads(err)["error"]["code"] == "usage"


def test_poisson_check_and_lie(tmp_path):
    n = 3
    x = Poly.variables(n)
    pi = PolyBivector(n, {(0, 1): x[2], (1, 2): x[0], (0, 2): x[1] * -1})
    code, out, _ = run(["poisson", "check", "-"], json.dumps({"pi": pi.to_json()}))
    assert code == 0 and json.loads(out)["holds"]
    # rank-2 constant bivector in 3D: the phi term vanishes and the check holds
    const = PolyBivector(n, {(0, 1): Poly.const(n, 1), (1, 2): Poly.const(n, 1), (0, 2): Poly.const(n, 1)})
    phi = PolyThreeForm(n, {(0, 1, 2): Poly.const(n, 1)})
    code, out, _ = run(["poisson", "check", "-"], json.dumps({"pi": const.to_json(), "phi": phi.to_json()}))
    assert code == 0 and json.loads(out)["holds"]
    # symplectic in 4D: the phi term is nonzero while [pi, pi] = 0
    sym = PolyBivector(4, {(0, 1): Poly.const(4, 1), (2, 3): Poly.const(4, 1)})
    phi4 = PolyThreeForm(4, {(0, 1, 2): Poly.const(4, 1)})
    code, out, _ = run(["poisson", "check", "-"], json.dumps({"pi": sym.to_json(), "phi": phi4.to_json()}))
    assert code == 0 and not json.loads(out)["holds"]
    non_lie = {"n": 3, "brackets": [{"i": 0, "j": 1, "value": [1, 0, 0]}, {"i": 1, "j": 2, "value": [0, 1, 0]}]}
    code, out, _ = run(["poisson", "lie", "-"], json.dumps(non_lie))
    assert code == 0 and not json.loads(out)["jacobi"]


def test_poisson_bracket():
    n = 2
    pi = PolyBivector(n, {(0, 1): Poly.const(n, 1)})
    x = Poly.variables(n)
    code, out, _ = run(["poisson", "bracket", "-"], json.dumps({"pi": pi.to_json(), "f": x[0].to_json(), "g": x[1].to_json()}))
    assert code == 0 and Poly.from_json(json.loads(out)["bracket"]) == Poly.const(n, 1)


@pytest.mark.parametrize(
    "t1,t2,verdict",
    [("1/3", "0", "equivalent"), ("sqrt2", "1+sqrt2", "equivalent"), ("sqrt2", "sqrt3", "inequivalent")],
)
def test_torus_decide2(t1, t2, verdict):
    code, out, _ = run(["torus", "decide2", "--theta1", t1, "--theta2", t2])
    assert code == 0 and json.loads(out)["verdict"] == verdict


def test_torus_relation_and_orbit():
    code, out, _ = run(["torus", "relation", "-"], json.dumps({"n": 2, "entries": [[0, "1/3"], ["-1/3", 0]]}))
    assert code == 0 and json.loads(out)["passed"]
    orbit = {
        "pi1": {"n": 2, "entries": [[0, "sqrt2"], ["-sqrt2", 0]]},
        "pi2": {"n": 2, "entries": [[0, "1+sqrt2"], ["-1-sqrt2", 0]]},
        "depth": 3,
    }
    code, out, _ = run(["torus", "orbit", "-"], json.dumps(orbit))
    res = json.loads(out)
    assert code == 0 and res["status"] == "equivalent" and res["replay_matches"]


def test_tss_graph_json_and_dot(tmp_path):
    f = write(tmp_path, "f.json", SIN_Y)
    code, out, _ = run(["tss", "graph", f, "--grid", "128"])
    g = json.loads(out)["graph"]
    assert code == 0 and len(g["vertices"]) == 2
    assert all(abs(e["period"] - 1 / (2 * math.pi)) < 1e-6 for e in g["edges"])
    code, out, _ = run(["tss", "graph", f, "--grid", "128", "--format", "dot"])
    assert code == 0 and out.startswith("digraph") and "arrowhead" in out


def test_tss_compare(tmp_path):
    f = write(tmp_path, "f.json", SIN_Y)
    doubled = write(tmp_path, "g.json", {"terms": [{"k": [0, 1], "sin": 2.0}]})
    shifted = write(tmp_path, "h.json", {"terms": [{"k": [0, 1], "cos": 1.0}]})  # sin(2 pi (y + 1/4))
    code, out, _ = run(["tss", "compare", f, doubled, "--grid", "256"])
    assert code == 0 and not json.loads(out)["morita_equivalent"]
    code, out, _ = run(["tss", "compare", f, shifted, "--grid", "256"])
    res = json.loads(out)
    assert code == 0 and res["morita_equivalent"] and sorted(res["vertex_map"]) == [0, 1]


def test_tss_rejects_degenerate_input(tmp_path):
    sq = write(tmp_path, "sq.json", {"const": 0.5, "terms": [{"k": [0, 2], "cos": -0.5}]})
    code, _, err = run(["tss", "graph", sq, "--grid", "128"])
    assert code == 2 and json.loads(err)["error"]["code"] == "not_tss"


def test_tss_unknown_key(tmp_path):
    bad = write(tmp_path, "bad.json", {"terms": [], "colour": 1})
    code, _, err = run(["tss", "graph", bad])
    assert code == 1 and json.loads(err)["error"]["pointer"] == "/colour"


def test_finite_picard_and_cap(tmp_path):
    code, out, _ = run(["finite", "picard", "q8"])
    assert code == 0 and json.loads(out)["picard_order"] == 6
    code, _, err = run(["finite", "picard", "cyclic:30"])
    assert code == 2 and json.loads(err)["error"]["code"] == "cap_exceeded"
    cfg = write(tmp_path, "cfg.json", {"caps": {"group_order": 40}})
    code, out, _ = run(["--config", cfg, "finite", "picard", "cyclic:30"])
    assert code == 0 and json.loads(out)["picard_order"] == 8


def test_finite_table_input(tmp_path):
    table = write(tmp_path, "z3.json", {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]})
    code, out, _ = run(["finite", "picard", table])
    assert code == 0 and json.loads(out)["picard_order"] == 2


def test_selftest_deterministic_and_seed_independent():
    code1, out1, _ = run(["selftest"])
    code2, out2, _ = run(["selftest"])
    assert code1 == code2 == 0 and out1 == out2
    _, out3, _ = run(["selftest", "--seed", "7"])
    v1 = [s["passed"] for s in json.loads(out1)["suites"]]
    v3 = [s["passed"] for s in json.loads(out3)["suites"]]
    assert v1 == v3 and all(v1)


def test_negative_tolerance_rejected(tmp_path, monkeypatch):
    code, _, err = run(["selftest", "--tol", "period=-1e-6"])
    assert code == 1 and json.loads(err)["error"]["pointer"] == "/tolerances/period"
    monkeypatch.setenv(ENV_CONFIG, write(tmp_path, "bad.json", {"tolerances": {"curve": -1}}))
    code, _, err = run(["selftest"])
    assert code == 1 and json.loads(err)["error"]["code"] == "bad_config"


def test_config_defaults_and_validation():
    cfg = Config()
    assert cfg.tol("curve") == 1e-12 and cfg.cap("grid") == 512
    with pytest.raises(ConfigError):
        Config.from_json({"seeds": 1})
    with pytest.raises(ConfigError):
        Config(output_format="xml")
    assert cfg.with_overrides(tolerances={"period": 1e-3}).tol("period") == 1e-3
