import json

import pytest

from transversal.cli import main
from transversal.io import dump_json, instance_to_dict
from transversal.model import Digraph, DigraphCollection


def write(tmp_path, name, obj) -> str:
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else dump_json(obj))
    return str(p)


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_digon(tmp_path, capsys):
    inst = write(tmp_path, "d.json", instance_to_dict(DigraphCollection.uniform(Digraph.complete(2), 2)))
    code, out, _ = run(capsys, "solve", "thc", inst)
    res = json.loads(out)
    assert code == 0 and res["status"] == "found"
    assert res["certificate"]["kind"] == "hamilton-cycle" and sorted(res["certificate"]["colors"]) == [1, 2]


def test_oracle_refuses_large(tmp_path, capsys):
    inst = write(tmp_path, "k.json", instance_to_dict(DigraphCollection.uniform(Digraph.complete(10), 10)))
    code, _, err = run(capsys, "oracle", "thc", inst)
    assert code == 3 and "error" in err


def test_malformed_file(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{"schema": 1,\n "n": 2 "m": 1}')
    code, _, err = run(capsys, "solve", "thc", bad)
    assert code == 2 and "bad.json:2:9:" in err


def test_timeout_exit_code(tmp_path, capsys):
    inst = write(tmp_path, "t.json", instance_to_dict(DigraphCollection.uniform(Digraph.complete(9), 9)))
    code, out, _ = run(capsys, "solve", "thc", inst, "--time-budget", "1e-9")
    assert code in (0, 3)
    if code == 3:
        assert json.loads(out)["status"] == "timeout"


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "nope", "x.json"])
    assert info.value.code == 2


def test_gen_then_classify_and_stability(tmp_path, capsys):
    out = str(tmp_path / "ec1.json")
    assert run(capsys, "gen", "extremal", "--n", "8", "--kind", "EC1", "--m", "8", "--out", out)[0] == 0
    code, text, _ = run(capsys, "classify", out, "--eps", "1/10", "--colors", "1")
    assert code == 0 and json.loads(text)["results"][0]["partition"]["kind"] == "EC1"
    code, text, _ = run(capsys, "stability", out, "--gamma", "1/2", "--alpha", "1/10", "--eps", "1/10",
                        "--delta", "1/10")
    assert code == 0 and json.loads(text)["verdict"] == "unstable"


def test_absorb_and_regcheck(tmp_path, capsys):
    inst = write(tmp_path, "k.json", instance_to_dict(DigraphCollection.uniform(Digraph.complete(7), 7)))
    cyc = write(tmp_path, "c.json", {"kind": "cycle", "cycle": [0, 1, 2, 3, 4], "colors": [1, 2, 3, 4, 5]})
    code, text, _ = run(capsys, "absorb", inst, cyc, "--color", "6", "--v", "5", "--apply")
    res = json.loads(text)
    assert code == 0 and res["disjoint_count"] == 1 and len(res["cycle"]["cycle"]) == 6
    code, text, _ = run(capsys, "regcheck", inst, "--V1", "0,1,2", "--V2", "3,4,5", "--eps", "1/2", "--d", "1/2")
    assert code == 0 and json.loads(text)["regular"] is True
    code, _, _ = run(capsys, "regcheck", inst, "--V1", "0,1", "--V2", "1,2", "--eps", "1/2", "--d", "1/2")
    assert code == 2


def test_sweeps(tmp_path, capsys):
    code, text, _ = run(capsys, "sweep", "threshold", "--n", "4", "--trials", "10", "--seed", "2")
    assert code == 0 and json.loads(text)["summary"]["per_n"]["4"]["confirmed_counterexamples"] == 0
    code, text, _ = run(capsys, "sweep", "bradshaw", "--n", "3", "--trials", "10", "--threads", "2")
    assert code == 0 and json.loads(text)["summary"]["misses"] == 0


def test_gen_random_round_trip(tmp_path, capsys):
    out = str(tmp_path / "r.json")
    assert run(capsys, "gen", "random", "--n", "5", "--min-semidegree", "3", "--seed", "4", "--out", out)[0] == 0
    code, text, _ = run(capsys, "solve", "cover", out)
    assert code == 0 and json.loads(text)["status"] in ("found", "none")
