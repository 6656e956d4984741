import json

import pytest

from percolab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


POISSON5 = '{"family": "poisson", "lambda": 5.0}'
PM3 = '{"family": "table", "weights": {"3": 1.0}}'


class TestUsageErrors:
    def test_missing_seed(self, capsys):
        code, _, err = run(capsys, "generate", "--dist", POISSON5, "--n", "100")
        assert code == 1 and "seed" in err

    def test_missing_dist(self, capsys):
        code, _, err = run(capsys, "giant", "--pi", "0.5")
        assert code == 1 and "dist" in err

    def test_missing_k(self, capsys):
        code, _, _ = run(capsys, "kcore", "--dist", POISSON5, "--pi", "0.5")
        assert code == 1

    def test_unknown_mode_rejected(self, capsys):
        code, _, err = run(capsys, "giant", "--dist", POISSON5, "--mode", "nope")
        assert code == 1 and "invalid choice" in err

    def test_bad_spec_json(self, capsys):
        code, _, err = run(capsys, "giant", "--dist", '{"family": "wat"}', "--pi", "0.5")
        assert code == 1


class TestGiant:
    def test_analytic_values(self, capsys):
        code, out, _ = run(capsys, "giant", "--dist", PM3, "--mode", "site", "--pi", "0.6")
        assert code == 0
        payload = json.loads(out)
        assert payload["v_frac"] == pytest.approx(19 / 45, abs=1e-9)
        assert payload["supercritical"] is True
        assert payload["pi_c"] == pytest.approx(0.5, abs=1e-12)

    def test_near_threshold_warning_strict(self, capsys):
        code, out, _ = run(
            capsys, "giant", "--dist", PM3, "--mode", "site", "--pi", "0.5", "--strict"
        )
        assert code == 3
        assert "warnings" in json.loads(out)

    def test_with_simulation(self, capsys):
        code, out, _ = run(
            capsys, "giant", "--dist", POISSON5, "--mode", "bond", "--pi", "0.5",
            "--n", "20000", "--seed", "4", "--reps", "2",
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["sim_v_frac"] - payload["v_frac"]) < 0.02


class TestReproducibility:
    def test_percolate_byte_identical(self, capsys):
        argv = ["percolate", "--dist", POISSON5, "--mode", "bond", "--pi", "0.5",
                "--n", "5000", "--seed", "12"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_seed_changes_output(self, capsys):
        base = ["percolate", "--dist", POISSON5, "--mode", "bond", "--pi", "0.5",
                "--n", "5000"]
        _, out1, _ = run(capsys, *base, "--seed", "12")
        _, out2, _ = run(capsys, *base, "--seed", "13")
        assert out1 != out2

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        path = tmp_path / "res.json"
        argv = ["giant", "--dist", PM3, "--mode", "site", "--pi", "0.6"]
        _, out, _ = run(capsys, *argv)
        assert main(argv + ["--out", str(path)]) == 0
        capsys.readouterr()
        assert path.read_text() == out


class TestKCore:
    def test_report(self, capsys):
        code, out, _ = run(
            capsys, "kcore", "--dist", POISSON5, "--k", "3", "--pi", "0.8"
        )
        assert code == 0
        payload = json.loads(out)
        assert not payload["empty"]
        assert 0 < payload["p_max"] < 1

    def test_curve_csv(self, capsys):
        code, out, _ = run(
            capsys, "kcore-curve", "--dist", PM3, "--k", "3", "--grid", "50"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "p,phi,h,h1"
        assert len(lines) == 1 + 200 + 50
        last = [float(v) for v in lines[-1].split(",")]
        assert last[0] == 1.0 and last[2] == pytest.approx(3.0, abs=1e-9)


class TestTransitions:
    def test_poisson_ten(self, capsys):
        code, out, _ = run(
            capsys, "transitions", "--dist", '{"family": "poisson", "lambda": 10.0}',
            "--k", "3",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 1
        assert payload["transitions"][0]["order"] == "first-order"


class TestBootstrap:
    def test_prediction_and_sim(self, capsys):
        code, out, _ = run(
            capsys, "bootstrap", "--d", "4", "--ell", "2", "--q", "0.05",
            "--n", "20000", "--seed", "3",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["q_c"] == pytest.approx(1 / 9, abs=1e-9)
        assert abs(payload["sim_frac"] - payload["predicted_frac"]) < 0.02


class TestBranching:
    def test_recursion_and_mc(self, capsys):
        code, out, _ = run(
            capsys, "branching", "--dist", POISSON5, "--k", "3",
            "--depth", "5", "--reps", "2000", "--seed", "6",
        )
        assert code == 0
        payload = json.loads(out)
        assert 0 < payload["p_max"] < 1
        assert abs(payload["mc_estimate"] - payload["p_max"]) < 0.1


class TestCompare:
    def test_pass_and_fail_codes(self, capsys):
        base = ["compare", "--dist", POISSON5, "--mode", "bond", "--pi", "0.5",
                "--n", "20000", "--seed", "8", "--reps", "2"]
        code, out, _ = run(capsys, *base)
        assert code == 0 and json.loads(out)["pass"] is True
        code, out, _ = run(capsys, *base, "--tol", "1e-6")
        assert code == 2 and json.loads(out)["pass"] is False
