import json

import pytest

from tanglekit.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("7") == [7]
    assert parse_range("3,5") == [3, 5]
    for bad in ("0..3", "5..2", "a", ""):
        with pytest.raises(Exception):
            parse_range(bad)


def test_count(capsys):
    code, out, _ = run(capsys, "count", "1..10", "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert [int(r[1]) for r in rows] == [1, 1, 2, 13, 114, 1509, 25595, 535753, 13305590,
                                         382728552]
    code, out, _ = run(capsys, "count", "4", "--format", "json")
    body = json.loads(out)
    assert body["rows"][0][1] == 13 and body["config"]["n"] == [4]


def test_count_200_is_exact(capsys):
    code, out, _ = run(capsys, "count", "200", "--format", "json", "--verify")
    assert code == 0
    from tanglekit.measures import t_closed_form
    assert int(json.loads(out)["rows"][0][1]) == t_closed_form(200)


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "((L,L),(L,L))", "--format", "csv")
    assert code == 0
    assert '"((L,L),(L,L))","2,2",3,8' in out
    code, out, _ = run(capsys, "spectrum", "--n", "6", "--verify")
    assert code == 0


def test_bad_tree_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "(L,L"])
    assert exc.value.code == 2


def test_tvd(capsys, tmp_path):
    code, out, _ = run(capsys, "tvd", "2..12", "--format", "csv", "--cache-dir", str(tmp_path))
    assert code == 0
    assert out.splitlines()[3].startswith("4,37/325,")
    code2, out2, _ = run(capsys, "tvd", "2..12", "--format", "csv", "--cache-dir", str(tmp_path))
    assert out2 == out
    assert any(p.name.startswith("tvd-") for p in tmp_path.iterdir())


def test_sample_determinism(capsys):
    _, a, _ = run(capsys, "sample", "6", "50", "--seed", "7")
    _, b, _ = run(capsys, "sample", "6", "50", "--seed", "7")
    assert a == b and len(a.splitlines()) == 50
    _, c, _ = run(capsys, "sample", "6", "50", "--seed", "8")
    assert c != a


def test_sample_table(capsys):
    code, out, _ = run(capsys, "sample", "4", "13000", "--seed", "7", "--table",
                       "--format", "json")
    body = json.loads(out)
    assert code == 0 and len(body["rows"]) == 13
    assert body["config"]["seed"] == 7


def test_sample_modes_and_caps(capsys):
    code, out, _ = run(capsys, "sample", "500", "3", "--mode", "approximate", "--seed", "1")
    assert code == 0 and len(out.splitlines()) == 3
    code, _, err = run(capsys, "sample", "21", "1", "--seed", "1")
    assert code == 2 and "cap" in err
    code, _, _ = run(capsys, "sample", "21", "1", "--seed", "1", "--cap-exact", "21")
    assert code == 0


def test_auto_seed_is_recorded(capsys):
    _, out, _ = run(capsys, "sample", "4", "2", "--format", "json")
    seed = json.loads(out)["config"]["seed"]
    assert isinstance(seed, int)
    _, out2, _ = run(capsys, "sample", "4", "2", "--format", "json", "--seed", str(seed))
    assert json.loads(out2)["rows"] == json.loads(out)["rows"]


def test_gamma(capsys):
    code, out, _ = run(capsys, "gamma", "--precision", "1e-10")
    assert code == 0 and "0.2710416936" in out


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "4")
    assert code == 0 and len(out.splitlines()) == 13
    code, out, _ = run(capsys, "oracle", "4", "--audit", "--format", "json")
    assert code == 0 and json.loads(out)["checks"]["triple_weight_equals_t_n"]
    code, _, _ = run(capsys, "oracle", "8")
    assert code == 2


def test_series(capsys):
    code, out, _ = run(capsys, "series", "(L,L)", "--order", "12", "--format", "json")
    body = json.loads(out)
    assert code == 0
    assert body["rows"][4][2] == "10/7"
    code, _, _ = run(capsys, "series", "(L,L)", "--order", "100")
    assert code == 2


def test_stats_commands(capsys):
    code, out, _ = run(capsys, "stats", "cherries", "8", "2000", "--seed", "3",
                       "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["report"]["statistic"] == "cherries"
    code, out, _ = run(capsys, "stats", "matched-cherries", "200", "3000", "--seed", "3",
                       "--mode", "approximate", "--format", "csv")
    assert code == 0 and out.startswith("x,empirical,reference")
    code, out, _ = run(capsys, "stats", "height", "300", "500", "--seed", "3",
                       "--format", "csv")
    assert out.startswith("x,empirical,reference")


def test_stats_reproducible_bytes(capsys):
    args = ("stats", "generators", "10", "500", "--seed", "11", "--format", "json")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_global_flags_after_command(capsys):
    code, out, _ = run(capsys, "--format", "csv", "count", "3")
    code2, out2, _ = run(capsys, "count", "3", "--format", "csv")
    assert out == out2 and code == code2 == 0
