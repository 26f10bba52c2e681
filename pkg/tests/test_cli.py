import json

import pytest

from rnp import cli

SMALL_SWEEP = [
    "sweep",
    "--p-l-points", "3",
    "--f-points", "2",
    "--f-min", "0.94",
    "--f-max", "0.97",
    "--p-l-min", "1e-6",
    "--p-l-max", "1e-4",
]


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestMeasure:
    def test_headline_point(self, capsys):
        code, out, _ = run_cli(capsys, ["measure", "--p-i", "0.05", "--p-m", "0.05", "--p-l", "1e-4", "--json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["m"] == 6
        assert 6.4e-4 <= payload["eps_m"] <= 9.6e-4

    def test_error_free(self, capsys):
        code, out, _ = run_cli(capsys, ["measure", "--p-i", "0", "--p-m", "0", "--p-l", "0", "--json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["m"] == 0
        assert payload["eps_m"] == 0.0

    def test_bad_flag_exits_2_and_names_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["measure", "--p-m", "1.5"])
        assert exc.value.code == 2
        assert "--p-m" in capsys.readouterr().err


class TestPump:
    def test_table_output(self, capsys):
        code, out, _ = run_cli(capsys, ["pump", "--n-b", "2", "--n-p", "1", "--f", "0.9"])
        assert code == 0
        assert "final infidelity" in out

    def test_json_lines(self, capsys):
        code, out, _ = run_cli(capsys, ["pump", "--n-b", "1", "--n-p", "1", "--json"])
        assert code == 0
        lines = [json.loads(line) for line in out.strip().splitlines()]
        assert len(lines) == 3  # two steps plus the summary
        assert lines[0]["kind"] == "bit"
        assert lines[1]["kind"] == "phase"
        assert "infidelity" in lines[-1]

    def test_standard_scheme(self, capsys):
        code, out, _ = run_cli(capsys, ["pump", "--standard-steps", "4", "--json"])
        assert code == 0
        lines = [json.loads(line) for line in out.strip().splitlines()]
        kinds = [l["kind"] for l in lines[:-1]]
        assert kinds == ["bit", "phase", "bit", "phase"]


class TestPlan:
    def test_json_fields_exact(self, capsys):
        code, out, _ = run_cli(capsys, ["plan", "--preset", "nv-dephasing"])
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {
            "schedule",
            "delta_min",
            "n_tot_budget",
            "expected_pairs",
            "eps_fail",
            "eps_E",
            "t_robust_ent",
            "t_C",
            "gamma",
            "p_cnot_raw",
        }
        assert set(payload["schedule"]) == {"n_b", "n_p"}

    def test_unpurifiable_exits_3(self, capsys):
        code, _, err = run_cli(capsys, ["plan", "--f", "0.4"])
        assert code == 3
        assert "unpurifiable fidelity" in err

    def test_plan_reproducible(self, capsys):
        code1, out1, _ = run_cli(capsys, ["plan", "--preset", "ion-depolarizing"])
        code2, out2, _ = run_cli(capsys, ["plan", "--preset", "ion-depolarizing"])
        assert code1 == code2 == 0
        assert out1 == out2


class TestSweep:
    def test_header_and_row_count(self, capsys):
        code, out, _ = run_cli(capsys, SMALL_SWEEP)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == (
            "p_L,F,noise,n_b,n_p,delta_min,eps_fail,eps_E,n_tot_budget,"
            "expected_pairs,t_C_s,gamma"
        )
        assert len(lines) == 1 + 3 * 2

    def test_rows_ordered_p_l_major(self, capsys):
        _, out, _ = run_cli(capsys, SMALL_SWEEP)
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        p_ls = [float(r[0]) for r in rows]
        assert p_ls == sorted(p_ls)
        f_first_block = [float(r[1]) for r in rows[:2]]
        assert f_first_block == sorted(f_first_block)

    def test_byte_identical_across_runs_and_threads(self, tmp_path, monkeypatch):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        monkeypatch.setenv("RNP_THREADS", "1")
        assert cli.main(SMALL_SWEEP + ["--out", str(out_a)]) == 0
        monkeypatch.setenv("RNP_THREADS", "4")
        assert cli.main(SMALL_SWEEP + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_unwritable_path_exits_4(self, capsys):
        code, _, err = run_cli(capsys, SMALL_SWEEP + ["--out", "/nonexistent-dir/x.csv"])
        assert code == 4
        assert "cannot write" in err


class TestVerify:
    def test_clean_build_passes(self, capsys):
        code, out, _ = run_cli(capsys, ["verify", "--trials", "4000", "--seed", "7"])
        assert code == 0
        assert "FAIL" not in out
        assert "checks passed" in out

    def test_seeded_reproducibility(self, capsys):
        code1, out1, _ = run_cli(capsys, ["verify", "--trials", "2000", "--seed", "9"])
        code2, out2, _ = run_cli(capsys, ["verify", "--trials", "2000", "--seed", "9"])
        assert code1 == code2 == 0
        assert out1 == out2

    def test_tampered_recurrence_exits_1(self, capsys, monkeypatch):
        import rnp.cli as cli_mod
        from rnp.model import BellDiagonalState

        real = cli_mod.pump_step

        def tampered(target, fresh, kind, p_l, eps_m, gate_noise=None):
            rec = real(target, fresh, kind, p_l, eps_m) if gate_noise is None else real(
                target, fresh, kind, p_l, eps_m, gate_noise
            )
            skewed = [c + 0.001 for c in rec.state_after_success.as_tuple()]
            total = sum(skewed)
            return type(rec)(
                kind=rec.kind,
                state_before=rec.state_before,
                success_prob=rec.success_prob,
                state_after_success=BellDiagonalState.from_vector([c / total for c in skewed]),
            )

        monkeypatch.setattr(cli_mod, "pump_step", tampered)
        code, out, err = run_cli(capsys, ["verify", "--trials", "500", "--seed", "7"])
        assert code == 1
        assert "FAIL" in out
        assert "oracle-equivalence" in err
