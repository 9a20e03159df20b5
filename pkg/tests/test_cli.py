import io
import json

import pytest

from thetanorm import acceptance, cli
from thetanorm.cli import Cache, dumps, load_config, run


@pytest.fixture
def env(tmp_path, monkeypatch):
    monkeypatch.setenv("THETANORM_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("THETANORM_THREADS", raising=False)
    form = tmp_path / "threesq.json"
    form.write_text(json.dumps({"diag_q": [1, 1, 1]}))
    four = tmp_path / "four.json"
    four.write_text(json.dumps({"gram": [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]}))
    return tmp_path, str(form), str(four)


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], stdout=out)
    text = out.getvalue()
    try:
        return code, json.loads(text)
    except ValueError:
        return code, text


def test_form_info(env):
    _, f, _ = env
    code, out = call("form", "--form", f)
    assert code == 0
    assert (out["det"], out["level"], out["minimum"], out["local_primes"]) == (8, 4, 1, [2])


def test_density_examples(env):
    _, f, _ = env
    code, out = call("density", "--form", f, "--p", 3, "--n", 1, "--method", "yang_odd")
    assert code == 0 and out["beta"] == "2/3" and out["method"] == "yang_odd"
    code, out = call("density", "--form", f, "--p", 3, "--n", 1)
    assert code == 0 and out["beta"] == "2/3"
    code, _ = call("density", "--form", f, "--p", 4, "--n", 1)
    assert code == 1


def test_theta_and_out_file(env):
    tmp, f, _ = env
    target = tmp / "coeffs.json"
    code, out = call("theta", "--form", f, "--upto", 10, "--out", target)
    assert code == 0 and out == {"X": 10, "r": [6, 12, 8, 6, 24, 24, 0, 12, 30, 24]}
    assert json.loads(target.read_text())["r"][:3] == [6, 12, 8]


def test_genus_and_domain_error(env):
    tmp, f, four = env
    code, out = call("genus", "--form", four, "--n", 5, "--cutoff", 10000)
    assert code == 0 and out["value"] == pytest.approx(48, rel=1e-3)
    assert {"value", "prefactor", "convergence_flag"} <= set(out)
    two = tmp / "two.json"
    two.write_text(json.dumps({"diag_q": [1, 1]}))
    code, _ = call("genus", "--form", two, "--n", 5)
    assert code == 2


def test_budget_exit_code(env):
    _, f, _ = env
    code, _ = call("theta", "--form", f, "--upto", 1000, "--budget", 10)
    assert code == 3


def test_transform(env):
    _, f, _ = env
    code, out = call("transform", "--form", f, "--rho", "0,-1,1,0", "--nmax", 3)
    assert code == 0 and out["d_hat"] == 1
    assert out["magnitudes"] == pytest.approx([0.353553390593, 2.12132034356, 4.24264068712, 2.82842712475])
    code, _ = call("transform", "--form", f, "--rho", "1,0,4,1")
    assert code == 2


def test_bounds(env):
    _, f, four = env
    code, out = call("bounds", "--form", f, "--kind", "thm1", "--epsilon", 0, "--constant", 1)
    assert code == 0 and out["value"] == 2.0
    code, out = call("bounds", "--kind", "eq13_petersson", "--norm", 1, "--m", 4, "--n", 1, "--level", 4)
    assert code == 0 and out["value"] == 1.5
    code, out = call("bounds", "--form", four, "--kind", "lemma42_threshold")
    assert code == 0 and out["value"] == 576.0
    code, _ = call("bounds", "--form", f, "--kind", "thm1", "--epsilon", -1)
    assert code == 1


def test_sieve_commands(env):
    code, out = call("sieve", "omega", "--n", 27, "--l", "5,1,1")
    assert code == 0 and out["omega"] == "1"
    code, out = call("sieve", "identity", "--n", 27, "--dmax", 15)
    assert code == 0 and out["all_pass"]
    code, out = call("sieve", "optimize", "--tau", "3/58")
    assert code == 0 and out["r"] == 72 and out["m"] == pytest.approx(71.3785, abs=1e-3)
    code, out = call("sieve", "survey", "--from", 3, "--to", 60)
    assert code == 0 and out["max_min_Omega"] == 1
    code, out = call("sieve", "survey", "--to", 60, "--format", "tsv")
    assert code == 0 and out.splitlines()[0].split("\t")[:2] == ["n", "min_Omega"]
    code, _ = call("sieve")
    assert code == 1


def test_usage_errors(env):
    assert call()[0] == 1
    assert call("nonsense")[0] == 1
    assert call("form", "--form", "missing.json")[0] == 1
    assert call("--config", "missing.ini", "form", "--form", env[1])[0] == 1


def test_output_is_deterministic(env):
    _, f, _ = env
    args = ("genus", "--form", f, "--n", 3, "--cutoff", 1000)
    first = call(*args)
    assert call(*args) == first
    assert call(*args, "--no-cache") == first


def test_corrupt_cache_is_recomputed(env):
    tmp, f, _ = env
    args = ("density", "--form", f, "--n", 3, "--product", "--cutoff", 1000)
    first = call(*args)
    files = list((tmp / "cache").rglob("*.json"))
    assert files
    for path in files:
        path.write_text("{ not json")
    assert call(*args) == first


def test_cache_roundtrip(tmp_path):
    cache = Cache(str(tmp_path))
    key = Cache.key("op", {"gram": [[2]]}, {"x": 0.1})
    assert cache.get(key) is None
    assert cache.fetch("op", {"gram": [[2]]}, {"x": 0.1}, lambda: {"v": 1.0 / 3}) == {"v": 0.333333333333}
    assert cache.get(key) == {"v": 0.333333333333}
    assert Cache(str(tmp_path), enabled=False).get(key) is None


def test_config_precedence(tmp_path, monkeypatch):
    conf = tmp_path / "run.ini"
    conf.write_text("cutoff = 1000\nthreads = 2\ngrid = 8x8\n")
    monkeypatch.delenv("THETANORM_CACHE_DIR", raising=False)
    monkeypatch.delenv("THETANORM_THREADS", raising=False)
    cfg = load_config(str(conf))
    assert (cfg.cutoff, cfg.threads, cfg.grid) == (1000, 2, (8, 8))
    monkeypatch.setenv("THETANORM_THREADS", "3")
    assert load_config(str(conf)).threads == 3
    args = cli.build_parser().parse_args(["genus", "--form", "x", "--n", "1", "--cutoff", "500", "--threads", "4"])
    cfg = load_config(str(conf), args)
    assert (cfg.cutoff, cfg.threads) == (500, 4)
    conf.write_text("bogus = 1\n")
    with pytest.raises(cli.UsageError):
        load_config(str(conf))


def test_config_before_subcommand(env):
    tmp, f, _ = env
    conf = tmp / "run.ini"
    conf.write_text("cutoff = 1000\n")
    code, out = call("--config", conf, "genus", "--form", f, "--n", 3, "--no-cache")
    assert code == 0 and out["finite_part"]["cutoff"] == 1000


def test_json_normalisation():
    assert dumps({"b": 1 / 3, "a": [2.0, float("inf")]}) == '{"a": [2.0, "inf"], "b": 0.333333333333}'


def test_verify_exit_codes(env, monkeypatch):
    def fake(name, passed):
        return [acceptance.Result(1, "stub", passed, "measured")]

    monkeypatch.setattr(acceptance, "run_suite", lambda name: fake(name, True))
    code, out = call("verify", "local")
    assert code == 0 and out["all_pass"] and "seconds" not in out["results"][0]
    monkeypatch.setattr(acceptance, "run_suite", lambda name: fake(name, False))
    assert call("verify", "local")[0] == 4


def test_plots_are_written(env):
    tmp, f, _ = env
    for argv, name in [(("sieve", "optimize"), "m.png"), (("sieve", "survey", "--to", 200), "s.png"),
                       (("bounds", "--form", f, "--kind", "thm2_diagonal"), "b.png"),
                       (("theta", "--form", f, "--upto", 50), "t.png"),
                       (("genus", "--form", f, "--n", 3, "--cutoff", 1000, "--upto", 30), "g.png")]:
        target = tmp / name
        code, _ = call(*argv, "--plot", target)
        assert code == 0
        if target.exists():
            assert target.stat().st_size > 1000
    assert (tmp / "m.png").exists() and (tmp / "g.png").exists()
