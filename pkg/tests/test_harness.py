import json

import numpy as np
import pytest

from fairmatroid.cli import main
from fairmatroid.fairness import fav, upper_matroid
from fairmatroid.harness import (AlgoSpec, SweepSpec, parse_algos, parse_range, read_rows, rep_seed,
                                 run_once, summary_path, sweep, verify)
from fairmatroid.instances import (GenerationError, Instance, clustering_bounds, dumps, gen_instance,
                                   load_instance, load_solution, save_instance, save_solution,
                                   share_caps, share_lower)
from fairmatroid.matroids import MalformedInputError

SMALL = {"coverage": 300, "clustering": 200, "recommender": 300}


class TestBounds:
    def test_clustering_formulas(self):
        caps, lower, upper = clustering_bounds(30)
        assert caps == [6] * 5 and lower == [5] * 6 and upper == [12] * 6

    def test_equal_shares(self):
        assert share_caps([25, 25, 25, 25], 100, 10) == [3, 3, 3, 3]

    def test_exact_rounding(self):
        # 0.9 * 50/100 * 20 is 9 exactly; floating point would give 8.999...
        assert share_lower([50], 100, 20, 0.9) == [9]
        assert share_caps([50], 100, 20, 1.4) == [14]

    @pytest.mark.parametrize("kind", ["coverage", "clustering", "recommender"])
    def test_generated_bounds(self, kind):
        inst = gen_instance(kind, SMALL[kind], r=40, seed=2)
        sizes = inst.fairness.class_sizes()
        n = inst.n
        parts = np.bincount(inst.matroid.groups, minlength=len(inst.matroid.caps)).tolist()
        if kind == "coverage":
            assert list(inst.matroid.caps) == share_caps(parts, n, 40)
            assert list(inst.fairness.lower) == share_lower(sizes, n, 40, 0.9)
            assert list(inst.fairness.upper) == share_caps(sizes, n, 40, 1.5)
        elif kind == "recommender":
            assert list(inst.matroid.caps) == share_caps(parts, n, 40, 1.2)
            assert list(inst.fairness.lower) == share_lower(sizes, n, 40, 0.8)
            assert list(inst.fairness.upper) == share_caps(sizes, n, 40, 1.4)
            assert inst.objective.alpha == 0.85
        else:
            assert inst.objective.points.shape[1] == 7
            assert list(inst.fairness.lower) == [6] * 6 and list(inst.fairness.upper) == [16] * 6


class TestInstanceFiles:
    @pytest.mark.parametrize("kind", ["coverage", "clustering", "recommender"])
    def test_round_trip_bytes(self, kind, tmp_path):
        inst = gen_instance(kind, SMALL[kind], r=30, seed=1)
        a = tmp_path / "a.json"
        save_instance(inst, a)
        again = load_instance(a)
        assert dumps(again.to_dict()) == a.read_text()
        s = {0, 3}
        assert again.objective.value(s) == inst.objective.value(s)

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            save_instance(gen_instance("recommender", 200, r=20, seed=9), tmp_path / name)
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    def test_infeasible_parameters(self):
        with pytest.raises(GenerationError, match="lower bounds sum"):
            gen_instance("clustering", 200, r=10)

    def test_unknown_kind(self):
        with pytest.raises(GenerationError):
            gen_instance("wheel", 10)

    def test_size_mismatch(self):
        inst = gen_instance("coverage", 50, r=5)
        d = inst.to_dict()
        d["matroid"]["groups"] = d["matroid"]["groups"][:-1]
        with pytest.raises(MalformedInputError):
            Instance.from_dict(d)

    def test_parse_error_has_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"n": 3,\n "matroid": }')
        with pytest.raises(MalformedInputError, match="line 2"):
            load_instance(p)

    def test_solution_round_trip(self, tmp_path):
        p = tmp_path / "s.json"
        save_solution({3, 1}, p, "x")
        assert load_solution(p) == {1, 3}
        p.write_text('{"solution": [1, 1]}')
        with pytest.raises(MalformedInputError):
            load_solution(p)


@pytest.fixture(scope="module")
def cov():
    return gen_instance("coverage", 300, r=30, seed=4)


class TestRunOnce:
    @pytest.mark.parametrize("algo", ["our:0.5", "twopass", "lbmi", "ubmi", "random"])
    def test_recomputed_metrics(self, cov, algo):
        row = run_once(cov, algo, seed=2)
        assert row.fav == fav(row.solution, cov.fairness)
        assert row.f_value == cov.objective.value(row.solution)
        assert row.size == len(row.solution)
        assert cov.matroid.is_independent(row.solution)
        assert upper_matroid(cov.fairness).is_independent(row.solution)

    def test_lbmi_fair(self, cov):
        assert run_once(cov, "lbmi").fav == 0

    def test_algo_parsing(self):
        assert parse_algos("our:0.2,lbmi") == [AlgoSpec("our", 0.2), AlgoSpec("lbmi")]
        for bad in ("our", "lbmi:0.3", "magic", "our:1.0"):
            with pytest.raises(ValueError):
                parse_algos(bad)
        assert parse_range("10:30:10") == [10, 20, 30]
        assert parse_range("7") == [7]


class TestSweep:
    spec = SweepSpec("coverage", tuple(parse_algos("our:0.2,our:0.8,lbmi,random")), (10, 20), 3,
                     n=300, instance_seed=1)

    def test_rows_and_summary(self, tmp_path):
        out = tmp_path / "s.csv"
        rows, summary = sweep(SweepSpec(**{**self.spec.__dict__, "output": str(out)}))
        assert len(rows) == 4 * 2 * 3
        rows_csv = read_rows(out)
        assert [r["algo"] for r in rows_csv[:3]] == ["our:0.2"] * 3
        assert list(rows_csv[0]) == ["instance", "algo", "epsilon", "r", "rep", "seed", "f_value",
                                     "size", "fav", "runtime_ms"]
        saved = json.loads(summary_path(out).read_text())
        for g in saved["groups"]:
            vals = [float(r["f_value"]) for r in rows_csv if r["algo"] == g["algo"] and int(r["r"]) == g["r"]]
            favs = [float(r["fav"]) for r in rows_csv if r["algo"] == g["algo"] and int(r["r"]) == g["r"]]
            assert g["f_value_mean"] == pytest.approx(np.mean(vals))
            assert g["f_value_std"] == pytest.approx(np.std(vals, ddof=1))
            assert g["fav_mean"] == pytest.approx(np.mean(favs))
        assert rows_csv[0]["seed"] == str(rep_seed(0, 0, 10, 0))

    def test_deterministic_csv(self, tmp_path):
        def body(path):
            return [{k: v for k, v in r.items() if k != "runtime_ms"} for r in read_rows(path)]
        for name in ("a.csv", "b.csv"):
            sweep(SweepSpec(**{**self.spec.__dict__, "output": str(tmp_path / name)}))
        assert body(tmp_path / "a.csv") == body(tmp_path / "b.csv")

    def test_single_rep_std_zero(self):
        _, summary = sweep(SweepSpec(**{**self.spec.__dict__, "reps": 1, "r_values": (10,)}))
        assert all(g["f_value_std"] == 0.0 and g["fav_std"] == 0.0 for g in summary["groups"])

    def test_infeasible_rows(self):
        rows, _ = sweep(SweepSpec("clustering", (AlgoSpec("lbmi"),), (10, 30), 1))
        assert [r.status for r in rows] == ["infeasible", "ok"]

    def test_unwritable_output(self, tmp_path):
        with pytest.raises(OSError):
            sweep(SweepSpec(**{**self.spec.__dict__, "output": str(tmp_path / "missing" / "x.csv")}))

    def test_reps_validated(self):
        with pytest.raises(ValueError):
            SweepSpec(reps=0)


class TestVerify:
    def test_empty_solution(self, cov):
        rep = verify(cov, set())
        assert rep.ok and rep.fav == sum(cov.fairness.lower)

    def test_fair_set(self, cov):
        sol = run_once(cov, "lbmi").solution
        rep = verify(cov, sol)
        assert rep.ok and rep.fav == 0

    def test_oversized_colour(self, cov):
        c = max(range(cov.fairness.n_colors), key=lambda c: cov.fairness.class_sizes()[c])
        sol = [e for e in range(cov.n) if cov.fairness.color_of[e] == c][:cov.fairness.upper[c] + 1]
        assert not verify(cov, sol).ok


class TestCli:
    def test_gen_run_verify(self, tmp_path, capsys):
        inst, sol = tmp_path / "i.json", tmp_path / "s.json"
        assert main(["gen", "--kind", "coverage", "--n", "200", "--r", "20", "-o", str(inst)]) == 0
        assert main(["run", str(inst), "--algo", "our", "--epsilon", "0.5", "--debug-verify",
                     "-o", str(sol)]) == 0
        assert main(["verify", str(inst), str(sol)]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert json.loads(out[-1])["ok"] is True

    def test_verify_failure(self, tmp_path):
        inst, sol = tmp_path / "i.json", tmp_path / "s.json"
        main(["gen", "--kind", "coverage", "--n", "200", "--r", "20", "-o", str(inst)])
        save_solution(range(200), sol)
        assert main(["verify", str(inst), str(sol)]) == 1

    def test_infeasible_gen(self, tmp_path):
        assert main(["gen", "--kind", "clustering", "--n", "200", "--r", "10", "-o", str(tmp_path / "x")]) == 3

    def test_usage_errors(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--kind", "nope", "-o", "x"])
        assert exc.value.code == 2
        inst = tmp_path / "i.json"
        main(["gen", "--kind", "coverage", "--n", "100", "--r", "10", "-o", str(inst)])
        assert main(["run", str(inst), "--algo", "our"]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["verify", str(inst), str(bad)]) == 2

    def test_sweep(self, tmp_path):
        out = tmp_path / "o.csv"
        assert main(["sweep", "--n", "200", "--algos", "our:0.5,ubmi", "--r", "10:20:10", "--reps", "2",
                     "-o", str(out)]) == 0
        assert len(read_rows(out)) == 2 * 2 * 2
