import json

from vermabranch.cli import (
    ENGINE_VERSION,
    ResultEnvelope,
    RunConfig,
    cache_lookup,
    cache_store,
    config_from_args,
    main,
    parse_envelope,
    run_command,
    serialize_envelope,
)


def run(argv):
    config = config_from_args(argv)
    return run_command(config)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def test_census_command_heisenberg():
    env, code = run(["census", "--pair", "sl_s_glgl:p=2,q=2", "--parabolic", "heisenberg"])
    assert code == 0
    assert env.payload["census"]["closed_count"] == 4


def test_census_command_resolves_nonstandard_translate():
    # an H= descriptor off the dominant chamber still censuses its type
    env, code = run(
        ["census", "--pair", "sl_s_glgl:p=2,q=2", "--parabolic", "H=0,1,-1,0"]
    )
    assert code == 0
    assert env.payload["census"]["closed_count"] == 4


def test_branch_command_bd_degree_two():
    env, code = run(["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel", "--degree", "2"])
    assert code == 0
    summands = env.payload["summands"]
    assert len(summands) == 6
    assert all(s["multiplicity"] == 1 for s in summands)


def test_verify_law_command():
    env, code = run(["verify", "--law", "AA", "--n", "2", "--l", "1", "--degree", "3"])
    assert code == 0
    assert env.payload["result"] == "identity holds"


def test_verify_identity_command():
    env, code = run(
        ["verify", "--pair", "sp_down_gl:n=2", "--parabolic", "siegel", "--level", "3"]
    )
    assert code == 0 and env.payload["closed"] is True


def test_analyze_command_reports_gk():
    env, code = run(
        ["analyze", "--pair", "sl_s_glgl:p=2,q=2", "--parabolic", "H=1,0,0,-1"]
    )
    assert code == 0
    assert env.payload["closed"] is True and env.payload["gk_dim"] == 2
    assert env.payload["spot_check_iii"] is True


def test_mf_scan_command():
    env, code = run(["mf-scan", "--rank-bound", "3"])
    assert code == 0
    ids = {row["pair"] for row in env.payload["scan"]}
    assert "so_down_so:m=4" in ids
    assert "sl_s_glgl:p=2,q=2" in env.payload["scan_failing"]


def test_pairs_command_lists_catalog():
    env, code = run(["pairs", "--rank-bound", "2"])
    assert code == 0
    assert "sl_s_glgl:p=1,q=1" in env.payload["catalog"]


def test_branch_numeric_lambda():
    env, code = run(
        [
            "branch",
            "--pair", "so_down_so:m=4",
            "--parabolic", "borel",
            "--lambda", "1/2,1/3",
            "--degree", "1",
        ]
    )
    assert code == 0
    assert env.payload["base_offset"] == ["1/2", "1/3"]
    assert env.payload["distinct_infchar"] is True


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_unknown_pair_exits_two_and_lists_catalog():
    env, code = run(["census", "--pair", "nope:x=1", "--parabolic", "borel"])
    assert code == 2
    assert "catalog" in env.payload["error"]


def test_incompatible_triple_exits_two():
    env, code = run(["branch", "--pair", "group_case:type=A1", "--parabolic", "1"])
    assert code == 2
    assert env.payload["summands"] is None  # no partial table


def test_bad_lambda_exits_two():
    env, code = run(
        ["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel", "--lambda", "1,2,3"]
    )
    assert code == 2


def test_degree_cap_exits_two():
    env, code = run(
        ["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel", "--degree", "40"]
    )
    assert code == 2


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_serialize_roundtrip():
    env, code = run(["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel", "--degree", "1"])
    assert len(env.payload["summands"]) == 3  # BD at n = 2, degree 1
    text = serialize_envelope(env, "json")
    again = parse_envelope(text)
    assert again == env
    assert serialize_envelope(again, "json") == text


def test_serialize_empty_summands():
    env = ResultEnvelope(payload={"schema": "vb-schema-1", "summands": []})
    data = json.loads(serialize_envelope(env, "json"))
    assert data["summands"] == []


def test_rationals_serialized_as_strings():
    env, _ = run(
        ["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel",
         "--lambda", "1/2,1/3", "--degree", "1"]
    )
    text = serialize_envelope(env, "json")
    assert '"1/2"' in text and "0.5" not in text


def test_determinism_byte_identical():
    argv = ["branch", "--pair", "sl_s_glgl:p=2,q=2", "--parabolic", "heisenberg", "--degree", "2"]
    env1, _ = run(argv)
    env2, _ = run(argv)
    assert serialize_envelope(env1, "json") == serialize_envelope(env2, "json")


def test_text_format_renders_offsets():
    env, _ = run(["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel", "--degree", "1"])
    text = serialize_envelope(env, "text")
    assert "delta = lambda + (-1, +0)" in text


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def test_cache_hit_is_byte_identical(tmp_path):
    argv = [
        "census", "--pair", "sp_down_gl:n=2", "--parabolic", "siegel",
        "--cache-dir", str(tmp_path),
    ]
    env1, _ = run(argv)
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    env2, _ = run(argv)
    assert serialize_envelope(env1, "json") == serialize_envelope(env2, "json")


def test_cache_miss_on_changed_degree(tmp_path):
    base = ["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel",
            "--cache-dir", str(tmp_path)]
    run(base + ["--degree", "1"])
    run(base + ["--degree", "2"])
    assert len(list(tmp_path.glob("*.json"))) == 2


def test_cache_ignores_other_engine_version(tmp_path):
    argv = ["census", "--pair", "sp_down_gl:n=2", "--parabolic", "siegel",
            "--cache-dir", str(tmp_path)]
    run(argv)
    path = next(tmp_path.glob("*.json"))
    payload = json.loads(path.read_text())
    payload["engine"] = "0.0.0"
    path.write_text(json.dumps(payload))
    config = config_from_args(argv)
    assert cache_lookup(config) is None


def test_cache_corruption_is_a_miss(tmp_path):
    argv = ["census", "--pair", "sp_down_gl:n=2", "--parabolic", "siegel",
            "--cache-dir", str(tmp_path)]
    run(argv)
    path = next(tmp_path.glob("*.json"))
    path.write_text("{not json")
    config = config_from_args(argv)
    assert cache_lookup(config) is None
    env, code = run(argv)  # recomputes cleanly
    assert code == 0


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("VERMABRANCH_CACHE_DIR", str(tmp_path))
    run(["census", "--pair", "sp_down_gl:n=2", "--parabolic", "siegel"])
    assert len(list(tmp_path.glob("*.json"))) == 1


# ---------------------------------------------------------------------------
# config file and entry point
# ---------------------------------------------------------------------------

def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("pair_id = so_down_so:m=4\nparabolic = borel\ndegree = 2\n")
    config = config_from_args(["branch", "--config", str(cfg)])
    assert config.pair_id == "so_down_so:m=4"
    assert config.degree == 2
    # explicit flags win over the config file
    config2 = config_from_args(["branch", "--config", str(cfg), "--degree", "1"])
    assert config2.degree == 1


def test_main_writes_json(capsys):
    code = main(["branch", "--pair", "so_down_so:m=4", "--parabolic", "borel",
                 "--degree", "1", "--format", "json"])
    out = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "vb-schema-1"
    assert payload["engine"] == ENGINE_VERSION
