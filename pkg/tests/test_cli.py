import io
import json
import subprocess
import sys

import pytest

from bmquad.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line]


def test_obstruct_example():
    code, out, _ = call("obstruct", "--q", "17", "--a", "2", "--c", "1", "--d", "1", "--e", "1")
    assert code == 0
    (rec,) = records(out)
    assert rec["locally_solvable"] is True
    assert rec["obstructed"] is True
    assert rec["invariant_profile"] == {"17": "1/2"}


def test_obstruct_unobstructed_and_not_local():
    _, out, _ = call("obstruct", "--a", "13", "--c", "1", "--d", "1", "--e", "1")
    rec = records(out)[0]
    assert rec["obstructed"] is False and rec["invariant_profile"] == {}
    _, out, _ = call("obstruct", "--a", "3", "--c", "1", "--d", "1", "--e", "1")
    rec = records(out)[0]
    assert rec["locally_solvable"] is False and rec["obstructed"] is None


def test_count_example():
    code, out, _ = call("count", "--mode", "nbr-direct", "--B", "289", "--q", "17")
    assert code == 0
    rec = records(out)[0]
    assert rec["count"] == 0 and rec["route"] == "direct"


def test_count_all_routes_agree():
    code, out, _ = call("count", "--mode", "nbr-all", "--B", "10000")
    assert code == 0
    recs = records(out)
    assert [r["route"] for r in recs] == ["direct", "mobius", "characters"]
    assert len({r["count"] for r in recs}) == 1
    assert all(r["predicted"] > 0 for r in recs)


def _strip_elapsed(text):
    out = []
    for r in records(text):
        r.pop("elapsed", None)
        r.pop("threads", None)
        out.append(r)
    return out


def test_count_deterministic_across_threads(monkeypatch):
    outs = []
    for t in ("1", "4", "8"):
        code, out, _ = call("count", "--mode", "nbr-direct", "--B", "200000", "--threads", t)
        assert code == 0
        outs.append(_strip_elapsed(out))
    monkeypatch.setenv("BMQUAD_THREADS", "3")
    _, out, _ = call("count", "--mode", "nbr-direct", "--B", "200000")
    assert records(out)[0]["threads"] == 3
    outs.append(_strip_elapsed(out))
    assert all(o == outs[0] for o in outs)


def test_local_and_brauer():
    code, out, _ = call("local", "--a", "1", "--b", "1", "--c", "1", "--n", "7")
    assert code == 0 and records(out)[0]["failing_places"] == [2]
    code, out, _ = call("local", "--a", "1", "--b", "1", "--c", "1", "--n", "1", "--p", "5")
    rec = records(out)[0]
    assert rec["solvable"] and rec["place"] == 5
    code, out, _ = call("brauer", "--a", "578", "--b", "-2", "--c", "17", "--n", "1", "--point", "1,-17,0,0")
    assert code == 0
    rec = records(out)[0]
    assert rec["l1"] == [17, 1, 0, 0] and rec["d"] == 17


def test_brauer_split_class():
    code, _, err = call("brauer", "--a", "1", "--b", "1", "--c", "-1", "--n", "1")
    assert code == 2 and "square" in err
    code, out, _ = call("brauer", "--a", "1", "--b", "1", "--c", "-1", "--n", "1", "--allow-split",
                        "--point", "1,0,0,1")
    assert code == 0 and records(out)[0]["d"] == 1


def test_constants_and_tsv(tmp_path):
    path = tmp_path / "c.tsv"
    code, out, _ = call("constants", "--name", "Cf", "--q", "17", "--P", "1000", "--f", "6",
                        "--format", "tsv", "--out", str(path))
    assert code == 0 and out == ""
    header, row = path.read_text().splitlines()
    cols = dict(zip(header.split("\t"), row.split("\t")))
    assert cols["name"] == "Cf" and cols["f"] == "6" and float(cols["value"]) > 0


def test_verify_identities():
    code, out, _ = call("verify", "--suite", "identities")
    assert code == 0
    recs = records(out)
    assert len(recs) >= 5 and all(r["passed"] for r in recs)


@pytest.mark.parametrize("argv", [
    ("local", "--a", "0", "--b", "1", "--c", "1", "--n", "1"),
    ("local", "--a", "1", "--b", "1", "--c", "1", "--n", "1", "--p", "9"),
    ("obstruct", "--q", "13", "--a", "2", "--c", "1", "--d", "1", "--e", "1"),
    ("obstruct", "--a", "2", "--c", "2", "--d", "2", "--e", "1"),
    ("count", "--mode", "nbr-direct", "--B", "100", "--bogus", "1"),
    ("count", "--mode", "nonsense", "--B", "100"),
    ("constants", "--name", "D", "--q", "15"),
    ("brauer", "--a", "1", "--b", "1", "--c", "1", "--n", "3", "--point", "1,1"),
    ("brauer", "--a", "1", "--b", "1", "--c", "1", "--n", "3", "--point", "1,1,0,1"),
])
def test_invalid_input_exit_code(argv):
    code, _, _ = call(*argv)
    assert code == 2


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("BMQUAD_THREADS", "zero")
    assert call("count", "--mode", "nbr-direct", "--B", "100")[0] == 2


def test_inconsistency_exit_code(monkeypatch):
    import bmquad.cli as cli
    from bmquad.census import CountReport

    monkeypatch.setattr(cli, "count_nbr_mobius", lambda B, q, threads=1: CountReport(B, q, -1, "mobius"))
    code, out, err = call("count", "--mode", "nbr-all", "--B", "1000")
    assert code == 3 and "disagree" in err
    assert len(records(out)) == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bmquad", "count", "--mode", "nbr-direct", "--B", "578"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == records(call("count", "--mode", "nbr-direct", "--B", "578")[1])[0]["count"]
