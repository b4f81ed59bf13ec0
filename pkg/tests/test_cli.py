import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from qgverify.cache import cache_path, load_or_enumerate
from qgverify.cli import run
from qgverify.config import RunConfig, load_config, parse_k_range
from qgverify.errors import ParameterError
from qgverify.partitions import NC2, enumerate_family


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


# --- config

def test_config_defaults_and_digest():
    c = RunConfig()
    assert c.prime_count == 3 and c.bareiss_escalation and c.dense_limit == 4096
    assert c.digest() == RunConfig().digest() != RunConfig(seed=1).digest()


@pytest.mark.parametrize("kw", [{"prime_count": 1}, {"dense_limit": 8}, {"k_range": (3, 2)}, {"parallelism": 0}])
def test_config_invariants(kw):
    with pytest.raises(ParameterError):
        RunConfig(**kw)


def test_k_range_parsing():
    assert parse_k_range("4") == (4, 4)
    assert parse_k_range("2..6") == (2, 6)
    for bad in ("6..2", "x", "-1"):
        with pytest.raises(ParameterError):
            parse_k_range(bad)


def test_config_file_and_env(tmp_path):
    f = tmp_path / "qgv.conf"
    f.write_text("# comment\nprime_count = 4\nbareiss_escalation = false\nk_range = 1..3\nseed=9\n")
    c = load_config(str(f), env={"QGV_WORKERS": "2", "QGV_CACHE_DIR": str(tmp_path)})
    assert (c.prime_count, c.bareiss_escalation, c.k_range, c.seed) == (4, False, (1, 3), 9)
    assert c.parallelism == 2 and c.cache_dir == str(tmp_path)


def test_config_file_errors(tmp_path):
    f = tmp_path / "bad.conf"
    f.write_text("colour = blue\n")
    with pytest.raises(ParameterError):
        load_config(str(f), env={})
    f.write_text("prime_count\n")
    with pytest.raises(ParameterError):
        load_config(str(f), env={})


# --- cache

def test_cold_cache_writes_header(tmp_path):
    parts, info = load_or_enumerate(NC2, 4, tmp_path)
    assert info.status == "miss"
    lines = Path(info.path).read_text().splitlines()
    assert lines[0] == "qgv-partitions v1 NC2 4 2"
    assert lines[1:] == ["12|34", "14|23"]


def test_warm_cache_hit(tmp_path):
    a, _ = load_or_enumerate(NC2, 6, tmp_path)
    b, info = load_or_enumerate(NC2, 6, tmp_path)
    assert a == b == enumerate_family(NC2, 6)
    assert info.status == "hit" and info.warning is None


def test_tampered_cache_is_recomputed(tmp_path):
    load_or_enumerate(NC2, 4, tmp_path)
    path = cache_path(tmp_path, NC2, 4)
    text = path.read_text().replace("NC2 4 2", "NC2 4 3")
    path.write_text(text)
    parts, info = load_or_enumerate(NC2, 4, tmp_path)
    assert parts == enumerate_family(NC2, 4)
    assert info.status == "recomputed" and "count" in info.warning
    # the rewritten file is valid again
    assert load_or_enumerate(NC2, 4, tmp_path)[1].status == "hit"


@pytest.mark.parametrize("garbage", ["", "qgv-partitions v1 NC2 4 2\n12|34\n13|24\n", "hello\n",
                                     "qgv-partitions v1 NC2 4 2\n14|23\n12|34\n"])
def test_corrupt_cache_variants(tmp_path, garbage):
    path = cache_path(tmp_path, NC2, 4)
    path.write_text(garbage)
    parts, info = load_or_enumerate(NC2, 4, tmp_path)
    assert parts == enumerate_family(NC2, 4)
    assert info.warning


def test_cache_disabled():
    parts, info = load_or_enumerate("nc21", 3, None)
    assert len(parts) == 4 and info.status == "disabled"


def test_empty_partition_cached(tmp_path):
    load_or_enumerate(NC2, 0, tmp_path)
    parts, info = load_or_enumerate(NC2, 0, tmp_path)
    assert info.status == "hit" and len(parts) == 1 and parts[0].encode() == ""


# --- commands

def test_enumerate_command(capsys):
    code, rep = call(capsys, "enumerate", "--kind", "nc2", "--k", "6")
    assert code == 0
    assert rep["tool"] == "qgverify" and rep["command"] == "enumerate"
    assert rep["results"]["count"] == 5 and len(rep["results"]["items"]) == 5
    assert set(rep) == {"tool", "version", "command", "params", "config_digest", "results", "timing_ms", "arithmetic"}
    assert len(rep["arithmetic"]["primes"]) == 3


def test_enumerate_odd(capsys):
    code, rep = call(capsys, "enumerate", "--kind", "nc2", "--k", "3")
    assert code == 0 and rep["results"]["count"] == 0 and rep["results"]["items"] == []


def test_enumerate_with_cache_dir(capsys, tmp_path):
    call(capsys, "--cache-dir", str(tmp_path), "enumerate", "--kind", "p2", "--k", "4")
    assert cache_path(tmp_path, enumerate_family.__globals__["P2"], 4).exists()


def test_check_generation_command(capsys):
    code, rep = call(capsys, "check-generation", "--a", "on:N=4", "--b", "stab:N=4,xi=e1", "--k", "2..4")
    assert code == 0
    assert [r["verdict"] for r in rep["results"]["reports"]] == ["generated_at_k"] * 3
    assert rep["results"]["generated_up_to"] == 4


def test_obstructed_verdict_still_exits_zero(capsys):
    code, rep = call(capsys, "check-generation", "--a", "stab:N=4,xi=e1", "--b", "stab:N=4,xi=e1", "--k", "2")
    assert code == 0 and rep["results"]["reports"][0]["verdict"] == "obstructed_at_k"
    assert rep["results"]["generated_up_to"] is None


def test_gram_command(capsys, tmp_path):
    dump = tmp_path / "g.txt"
    code, rep = call(capsys, "gram", "--family", "on:N=2", "--k", "4", "--rank", "--dump", str(dump))
    assert code == 0
    assert rep["results"]["gram"] == [[4, 2, 2], [2, 4, 2], [2, 2, 4]]
    assert rep["results"]["rank"]["rank"] == 3
    assert dump.read_text().startswith("qgv-matrix v1 3 3")


def test_rank_report_commands(capsys):
    _, rep = call(capsys, "prop-diff", "--N", "4", "--k", "1..4")
    assert [r["computed_rank"] for r in rep["results"]["reports"]] == [1, 1, 4, 7]
    _, rep = call(capsys, "prop-diff", "--N", "4", "--k", "3", "--all-conditions")
    assert rep["results"]["reports"][0]["agree"]
    _, rep = call(capsys, "roland", "--N", "2", "--k", "1..5")
    assert [r["k"] for r in rep["results"]["reports"]] == [1, 3, 5]
    _, rep = call(capsys, "ygram", "--N", "4", "--k", "2")
    assert rep["results"]["reports"][0]["computed_rank"] == 5


def test_dynamics_command(capsys, tmp_path):
    csv = tmp_path / "d.csv"
    code, rep = call(capsys, "dynamics", "--a", "on:N=3", "--b", "stab:N=3,xi=e1", "--k", "2", "--csv", str(csv))
    assert code == 0 and rep["results"]["converged"]
    assert csv.read_text().startswith("m,distance\n")


def test_suite_command_subset(capsys):
    code, rep = call(capsys, "suite", "--profile", "ci", "--only", "1,13")
    assert code == 0 and rep["results"]["passed"]
    assert [c["number"] for c in rep["results"]["criteria"]] == [1, 13]


def test_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = run(["--out", str(out), "enumerate", "--kind", "nc2", "--k", "4"])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["results"]["count"] == 2


def test_reports_are_byte_stable(capsys, tmp_path):
    outs = []
    p = tmp_path / "r.json"
    for _ in range(2):
        run(["--no-timing", "--seed", "5", "--out", str(p), "check-generation", "--a", "sn:N=3",
             "--b", "fp:N=3,a=1,b=2", "--k", "0..4"])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_seed_changes_primes(capsys):
    _, a = call(capsys, "--seed", "1", "enumerate", "--kind", "nc2", "--k", "2")
    _, b = call(capsys, "--seed", "2", "enumerate", "--kind", "nc2", "--k", "2")
    assert a["arithmetic"]["primes"] != b["arithmetic"]["primes"]
    assert a["config_digest"] != b["config_digest"]


@pytest.mark.parametrize("argv", [
    ["enumerate", "--kind", "bogus", "--k", "2"],
    ["check-generation", "--a", "on:N=4"],
    ["check-generation", "--a", "on:N=4", "--b", "stab:N=4,xi=2,0,0,0", "--k", "2"],
    ["roland", "--N", "2", "--k", "4"],
    ["prop-diff", "--N", "2", "--k", "2"],
    ["--primes", "1", "enumerate", "--kind", "nc2", "--k", "2"],
    ["frobnicate"],
    [],
])
def test_errors_are_json(capsys, argv):
    code, rep = call(capsys, *argv)
    assert code != 0
    assert set(rep) == {"error", "detail"}


def test_resource_error(capsys):
    code, rep = call(capsys, "--dense-limit", "64", "dynamics", "--a", "on:N=4", "--b", "stab:N=4,xi=e1", "--k", "4")
    assert code != 0 and rep["error"] == "resource_error"


def test_worker_pool_matches_serial(capsys):
    _, a = call(capsys, "--no-timing", "ygram", "--N", "4", "--k", "0..3")
    _, b = call(capsys, "--no-timing", "--workers", "2", "ygram", "--N", "4", "--k", "0..3")
    assert a["results"] == b["results"]


def test_console_entry_point():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "qgverify.cli", "enumerate", "--kind", "nc21", "--k", "3"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["count"] == 4
