import json

import numpy as np
import pytest

from lioueps.cli import main, parse_config
from lioueps.errors import ConfigError
from lioueps.models import example1_closed_form


def write_config(tmp_path, payload, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_rows(path):
    header = None
    rows = []
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return header, rows


class TestParseConfig:
    def test_valid_ep_locate_config(self):
        cfg = parse_config(json.dumps({
            "command": "ep-locate",
            "model": {"name": "example2", "omega_x": 1.0},
            "sweep": {"param": "gamma_minus", "from": 3, "to": 5, "steps": 64},
        }))
        assert cfg.command == "ep-locate"
        assert cfg.model_name == "example2"
        assert cfg.sweep_param == "gamma_minus"
        assert cfg.sweep_steps == 64

    def test_all_errors_reported_at_once(self):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps({
                "command": "sweep",
                "model": {"name": "example2", "gamma_minus": -0.5, "junk": 1},
                "sweep": {"param": "gamma_minus", "from": 2.0, "to": 1.0, "steps": 1},
                "mystery": True,
            }))
        text = "\n".join(err.value.messages)
        assert "unknown key 'mystery'" in text
        assert "unknown key 'junk'" in text
        assert "gamma_minus" in text and ">= 0" in text
        assert "'to' must exceed 'from'" in text
        assert "steps" in text

    def test_unknown_model_lists_families(self):
        with pytest.raises(ConfigError, match="available families"):
            parse_config(json.dumps({
                "command": "spectrum", "model": {"name": "qubitron"}}))

    def test_unknown_command(self):
        with pytest.raises(ConfigError, match="expected one of"):
            parse_config(json.dumps({"command": "explode"}))

    def test_syntax_error_carries_position(self):
        with pytest.raises(ConfigError, match="line 1, column"):
            parse_config("{oops}")

    def test_levels_must_be_integer(self):
        with pytest.raises(ConfigError, match="levels"):
            parse_config(json.dumps({
                "command": "spectrum",
                "model": {"name": "example3", "levels": 2.5}}))

    def test_branch_pair_validation(self):
        with pytest.raises(ConfigError, match="branch_pair"):
            parse_config(json.dumps({
                "command": "ep-locate",
                "model": {"name": "example2"},
                "sweep": {"param": "gamma_minus", "from": 3, "to": 5, "steps": 9},
                "ep": {"branch_pair": [1, 1]}}))
        cfg = parse_config(json.dumps({
            "command": "ep-locate",
            "model": {"name": "example2"},
            "sweep": {"param": "gamma_minus", "from": 3, "to": 5, "steps": 9},
            "ep": {"branch_pair": [2, 3]}}))
        assert cfg.branch_pair == (2, 3)

    def test_verify_rejects_model_key(self):
        with pytest.raises(ConfigError, match="not allowed"):
            parse_config(json.dumps({
                "command": "verify", "model": {"name": "example2"}}))


class TestCliRuns:
    def test_sweep_reproduces_closed_form_branch_data(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "sweep",
            "model": {"name": "example1", "omega": 1.0, "gamma_y": 2.0,
                      "gamma_minus": 0.0},
            "sweep": {"param": "gamma_x", "from": 0.0, "to": 4.0, "steps": 21},
            "output": "ex1",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        header, rows = read_rows(tmp_path / "ex1_eigenvalues.csv")
        assert header == ["param", "index", "re_lambda", "im_lambda", "branch_id"]
        by_param = {}
        for row in rows:
            by_param.setdefault(float(row[0]), []).append(
                float(row[2]) + 1j * float(row[3]))
        assert len(by_param) == 21
        for gx, vals in by_param.items():
            expected = example1_closed_form(1.0, 0.0, gx, 2.0)["lambdas"]
            for want in expected:
                assert min(abs(v - want) for v in vals) <= 1e-8

    def test_byte_identical_reruns(self, tmp_path):
        payload = {
            "command": "sweep",
            "model": {"name": "example2", "omega_x": 1.0},
            "sweep": {"param": "gamma_minus", "from": 0.5, "to": 3.5, "steps": 11},
            "output": "rep",
        }
        cfg = write_config(tmp_path, payload)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert main([cfg, "--output-dir", str(out_a)]) == 0
        assert main([cfg, "--output-dir", str(out_b)]) == 0
        for suffix in ("rep_eigenvalues.csv", "rep_overlaps.csv"):
            assert (out_a / suffix).read_bytes() == (out_b / suffix).read_bytes()

    def test_ep_locate_example3_single_excitation(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "ep-locate",
            "operator": "nhh",
            "model": {"name": "example3", "omega": 1.0, "gamma_a": 1.0,
                      "gamma_b": 0.5, "levels": 2},
            "sweep": {"param": "g", "from": 0.05, "to": 0.25, "steps": 33},
            "output": "ex3",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "ex3_ep.json").read_text())
        assert payload["ep"]["param_value"] == pytest.approx(0.125, abs=1e-6)
        assert payload["ep"]["overlap_at_ep"] >= 1 - 1e-6
        assert payload["config"]["model"]["name"] == "example3"

    def test_ep_locate_liouvillian_example2(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "ep-locate",
            "model": {"name": "example2", "omega_x": 1.0},
            "sweep": {"param": "gamma_minus", "from": 3, "to": 5, "steps": 33},
            "output": "lep",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "lep_ep.json").read_text())
        assert payload["ep"]["param_value"] == pytest.approx(4.0, abs=1e-6)
        assert payload["ep"]["order_estimate"] == 2

    def test_dynamics_output_columns(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "dynamics",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "dynamics": {"rho0": "excited", "t_max": 2.0, "n_times": 9},
            "output": "dyn",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        header, rows = read_rows(tmp_path / "dyn_dynamics.csv")
        assert header == ["time", "trace_re", "purity", "p0", "p1",
                          "sigma_x", "sigma_y", "sigma_z"]
        assert len(rows) == 9
        assert float(rows[0][7]) == pytest.approx(-1.0)   # starts excited
        for row in rows:
            assert float(row[1]) == pytest.approx(1.0, abs=1e-10)

    def test_trajectories_roundtrip_and_seed_override(self, tmp_path):
        payload = {
            "command": "trajectories",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "trajectories": {"psi0": "excited", "n_traj": 40, "dt": 1e-3,
                             "t_max": 1.0, "seed": 7, "n_samples": 6},
            "output": "tr",
        }
        cfg = write_config(tmp_path, payload)
        out_a = tmp_path / "a"
        assert main([cfg, "--output-dir", str(out_a)]) == 0
        out_b = tmp_path / "b"
        assert main([cfg, "--output-dir", str(out_b)]) == 0
        assert ((out_a / "tr_dynamics.csv").read_bytes()
                == (out_b / "tr_dynamics.csv").read_bytes())
        out_c = tmp_path / "c"
        assert main([cfg, "--output-dir", str(out_c), "--seed", "8"]) == 0
        assert ((out_a / "tr_dynamics.csv").read_bytes()
                != (out_c / "tr_dynamics.csv").read_bytes())
        header, rows = read_rows(out_a / "tr_dynamics.csv")
        assert header[:2] == ["time", "survival"]
        surv = [float(r[1]) for r in rows]
        assert all(s1 >= s2 for s1, s2 in zip(surv, surv[1:]))

    def test_spectrum_command(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "spectrum",
            "model": {"name": "dephasing", "omega": 1.0, "gamma": 1.0, "levels": 3},
            "output": "spec",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        header, rows = read_rows(tmp_path / "spec_eigenvalues.csv")
        assert len(rows) == 9
        _, overlap_rows = read_rows(tmp_path / "spec_overlaps.csv")
        assert len(overlap_rows) == 9 * 8 // 2
        assert all(float(r[3]) <= 1e-8 for r in overlap_rows)

    def test_threads_env_and_flag_agree_with_serial_run(self, tmp_path, monkeypatch):
        payload = {
            "command": "sweep",
            "model": {"name": "example1", "omega": 1.0, "gamma_y": 2.0},
            "sweep": {"param": "gamma_x", "from": 0.0, "to": 2.0, "steps": 9},
            "output": "thr",
        }
        cfg = write_config(tmp_path, payload)
        out_serial = tmp_path / "serial"
        out_flag = tmp_path / "flag"
        out_env = tmp_path / "env"
        assert main([cfg, "--output-dir", str(out_serial)]) == 0
        assert main([cfg, "--output-dir", str(out_flag), "--threads", "4"]) == 0
        monkeypatch.setenv("LIOUEPS_THREADS", "3")
        assert main([cfg, "--output-dir", str(out_env)]) == 0
        ref = (out_serial / "thr_eigenvalues.csv").read_bytes()
        assert (out_flag / "thr_eigenvalues.csv").read_bytes() == ref
        assert (out_env / "thr_eigenvalues.csv").read_bytes() == ref

    def test_float_formatting_has_17_significant_digits(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "spectrum",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "output": "fmt",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        _, rows = read_rows(tmp_path / "fmt_eigenvalues.csv")
        values = {row[3] for row in rows}
        assert any(len(v.replace("-", "").replace(".", "").lstrip("0")) >= 16
                   for v in values)


class TestCliVariants:
    def test_dynamics_modes_method_from_steady_state(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "dynamics",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "dynamics": {"rho0": "steady", "t_max": 2.0, "n_times": 5,
                         "method": "modes"},
            "output": "st",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        _, rows = read_rows(tmp_path / "st_dynamics.csv")
        # stationary input stays put
        first = [float(x) for x in rows[0]]
        last = [float(x) for x in rows[-1]]
        assert np.allclose(first[1:], last[1:], atol=1e-9)

    def test_dynamics_no_jump_generator_loses_trace(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "dynamics",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "dynamics": {"rho0": "excited", "t_max": 4.0, "n_times": 9,
                         "generator": "no-jump"},
            "output": "nj",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        _, rows = read_rows(tmp_path / "nj_dynamics.csv")
        traces = [float(r[1]) for r in rows]
        assert traces[0] == pytest.approx(1.0, abs=1e-12)
        assert all(a >= b - 1e-12 for a, b in zip(traces, traces[1:]))
        assert traces[-1] < 0.9

    def test_modes_method_refuses_at_the_ep(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "dynamics",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 4.0},
            "dynamics": {"rho0": "excited", "t_max": 1.0, "n_times": 5,
                         "method": "modes"},
            "output": "epdyn",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 4

    def test_boson_model_trajectories_columns(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "trajectories",
            "model": {"name": "dephasing", "omega": 1.0, "gamma": 0.5, "levels": 3},
            "trajectories": {"psi0": "basis:2", "n_traj": 10, "dt": 1e-2,
                             "t_max": 0.5, "seed": 4, "n_samples": 4},
            "output": "bos",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        header, rows = read_rows(tmp_path / "bos_dynamics.csv")
        assert header == ["time", "survival", "p0_mean", "p1_mean", "p2_mean"]
        # number jumps keep the Fock state pinned
        assert float(rows[-1][4]) == pytest.approx(1.0, abs=1e-12)

    def test_tolerance_overrides_are_applied(self, tmp_path):
        # an absurdly loose zero tolerance swallows every eigenvalue into
        # the steady sector and must change the analysis outcome
        cfg = write_config(tmp_path, {
            "command": "spectrum",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "tolerances": {"zero_tol": 100.0},
            "output": "tol",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        header, rows = read_rows(tmp_path / "tol_overlaps.csv")
        # the whole zero sector was orthonormalized: all overlaps vanish
        assert all(float(r[3]) <= 1e-8 for r in rows)

    def test_explicit_matrix_rho0(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "dynamics",
            "model": {"name": "example2", "omega_x": 1.0, "gamma_minus": 1.0},
            "dynamics": {"rho0": [[[0.5, 0], [0, 0.2]], [[0, -0.2], [0.5, 0]]],
                         "t_max": 1.0, "n_times": 3},
            "output": "mat",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 0
        _, rows = read_rows(tmp_path / "mat_dynamics.csv")
        assert float(rows[0][3]) == pytest.approx(0.5)


class TestExitCodes:
    def test_config_error_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "spectrum",
                                      "model": {"name": "example2", "omega_x": -1}})
        assert main([cfg]) == 2
        err = capsys.readouterr().err
        assert "config error" in err and "omega_x" in err

    def test_missing_file_exit_2(self):
        assert main(["/nonexistent/path.json"]) == 2

    def test_analysis_error_exit_4(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "ep-locate",
            "model": {"name": "example2", "omega_x": 1.0},
            "sweep": {"param": "gamma_minus", "from": 0.1, "to": 1.0, "steps": 9},
            "operator": "nhh",
            "output": "none",
        })
        assert main([cfg, "--output-dir", str(tmp_path)]) == 4

    def test_verify_exit_0(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "verify"})
        assert main([cfg]) == 0
        out = capsys.readouterr().out
        assert "ALL CHECKS PASSED" in out
        assert "vacuum-column-identity" in out
        assert "kraus-richardson-ratio" in out
        assert "prefactor-reading" in out
        assert "coefficient-ordering" in out
