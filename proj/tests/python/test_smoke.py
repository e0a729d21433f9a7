import math

import pytest

import onlinefwer as of

GAMMA1 = 6 / math.pi**2


def test_alpha_spending_levels():
    trace = of.run({"procedure": "alpha-spending", "series": {"kind": "q", "q": 2}}, [0.01, 0.5, 0.02])
    assert len(trace) == 3
    assert trace[0].level == pytest.approx(0.2 * GAMMA1, rel=1e-14)
    assert trace[0].rejected and not trace[1].rejected


def test_scheduler_matches_batch_run():
    p = [0.001, 0.3, 0.9, 0.02, 0.6, 0.0004]
    s = of.Scheduler("addis-spending")
    stepped = [s.step(x) for x in p]
    assert stepped == of.run("addis-spending", p)
    assert s.steps == len(p)
    assert s.config["procedure"] == "addis-spending"


def test_audit_passes_and_catches_inflation():
    cfg = {"procedure": "addis-spending"}
    trace = of.run(cfg, [0.5] * 50)
    assert of.audit(trace, cfg).passed
    trace[10].level = 0.4
    report = of.audit(trace, cfg)
    assert not report.passed
    assert report.first_violation == 11


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        of.run({"procedure": "addis", "lambda": 0.6, "tau": 0.5}, [0.1])
    assert of.validate({"procedure": "addis", "lambda": 0.6, "tau": 0.5})
    assert of.validate("addis") == []


def test_simulation_is_deterministic():
    a = of.estimate_metrics(["alpha-spending", "addis"], trials=50, T=200, seed=3)
    b = of.estimate_metrics(["alpha-spending", "addis"], trials=50, T=200, seed=3)
    assert [r.power for r in a] == [r.power for r in b]
    assert 0 <= a[0].fwer <= 1
    sim = of.SimConfig()
    sim.T = 100
    stream = of.gen_stream(sim, 0)
    assert len(stream.p) == 100


def test_solvers():
    assert of.cstar(0.3, 4, 0) == 1.0
    assert of.cstar(0.1, 4, -1) < of.cstar(0.3, 4, -1)
    q2, _ = of.optimal_q(2, 4)
    q10, _ = of.optimal_q(10, 4)
    assert q2 > q10 > 1
    value, bound = of.expected_discoveries(1, pi_A=1.0, mu_A=0.0)
    assert value == pytest.approx(0.2 * GAMMA1, rel=1e-12)
    weights, _ = of.optimal_gamma([0.3], [3.0], 0.2, 10)
    assert weights == pytest.approx([0.1] * 10, rel=1e-12)


def test_cli_in_process():
    code, out, _ = of.cli("solve", "cstar", "--pi-A", "0.3", "--mu-A", "4", "--mu-N", "0")
    assert code == 0
    assert out.splitlines()[1].endswith(",1")
    assert of.cli("solve", "bogus")[0] == 3
