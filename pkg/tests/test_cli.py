import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bergvar.cli import (
    ROW_FIELDS,
    ConfigError,
    list_presets,
    main,
    run_config,
    validate_config,
)


def _cfg(*scenarios, seed=3):
    return {"schema_version": 1, "seed": seed, "defaults": {"N": 16, "n_radial": 32, "n_angular": 128},
            "scenarios": list(scenarios)}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


SCALED = {"id": "scaled", "suite": "first-variation", "family": "scaled_disk", "expected": -1 / np.pi}
KERNEL = {"id": "disk", "suite": "kernel", "family": "fixed_disk", "zeta": 0.2, "eta": "-0.1j"}


class TestPresets:
    def test_contains_catalog_entries(self):
        p = list_presets()
        fams = [f["id"] for f in p["families"]]
        assert "scaled_disk" in fams
        assert "motion:z+a(t)zbar:a=t2" in fams
        assert "motion:z+a(t)zbar:a=t2" in [m["id"] for m in p["motions"]]
        assert all("box" in f for f in p["families"])

    def test_stable(self):
        assert json.dumps(list_presets()) == json.dumps(list_presets())

    def test_every_preset_round_trips(self):
        p = list_presets()
        sc = []
        for f in p["families"]:
            params = [0.5] if f["id"].endswith("eps_t") else []
            sc.append({"id": "f/" + f["id"], "suite": "kernel", "family": f["id"], "params": params})
        for w in p["weights"]:
            params = [0.5] if w["id"] == "shifted_abs2" else []
            sc.append({"id": "w/" + w["id"], "suite": "kernel", "family": "fixed_disk", "weight": w["id"],
                       "weight_params": params})
        for m in p["motions"]:
            params = [0.5] if m["id"].endswith("eps_t") else []
            sc.append({"id": "m/" + m["id"], "suite": "motion", "motion": m["id"], "params": params})
        sc.append({"id": "i", "suite": "fiber-integral", "family": "fixed_disk",
                   "integrands": [i["id"] for i in p["integrands"]]})
        cfg = validate_config(_cfg(*sc))
        assert len(cfg.scenarios) == len(sc)

    def test_cli_prints_json(self, capsys):
        assert main(["presets"]) == 0
        fams = [f["id"] for f in json.loads(capsys.readouterr().out)["families"]]
        assert "scaled_disk" in fams


class TestValidation:
    def test_unknown_preset_named(self):
        with pytest.raises(ConfigError, match="annulus"):
            validate_config(_cfg({"id": "x", "suite": "kernel", "family": "annulus"}))

    @pytest.mark.parametrize("bad", [
        {"schema_version": 2, "scenarios": [KERNEL]},
        {"schema_version": 1, "scenarios": []},
        {"schema_version": 1, "scenarios": [{"suite": "kernel"}]},
        {"schema_version": 1, "scenarios": [KERNEL, KERNEL]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "suite": "spectral"}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "N": 0}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "h": -1}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "zeta": 0.98}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "family": "squeezed_disk", "t": [0.4]}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "t": [0.1, 0.1]}]},
        {"schema_version": 1, "scenarios": [{**KERNEL, "zeta": "one"}]},
    ])
    def test_rejected(self, bad):
        with pytest.raises(ConfigError):
            validate_config(bad)

    def test_scenarios_sorted_by_id(self):
        cfg = validate_config(_cfg({**KERNEL, "id": "b"}, {**KERNEL, "id": "a"}))
        assert [s.id for s in cfg.scenarios] == ["a", "b"]

    def test_seed_override(self):
        assert validate_config(_cfg(KERNEL), seed=11).seed == 11


class TestRun:
    def test_scaled_disk_first_variation_row(self):
        rep = run_config(validate_config(_cfg(SCALED, KERNEL)), ("kernel", "first-variation"))
        exact = [r for r in rep.rows if r["scenario"] == "scaled/exact"][0]
        assert exact["pass"] and abs(complex(exact["formula_value"]) + 1 / np.pi) <= 1e-4 / np.pi
        assert rep.passed

    def test_rows_carry_schema(self):
        rep = run_config(validate_config(_cfg(KERNEL)))
        for r in rep.rows:
            assert set(ROW_FIELDS) <= set(r)
        assert set(json.loads(rep.to_json())) == {"version", "config", "rows", "summary"}
        header = next(csv.reader(io.StringIO(rep.to_csv())))
        assert tuple(header) == ROW_FIELDS

    def test_motion_verdict(self):
        sc = {"id": "m", "suite": "motion", "motion": "motion:z+a(t)zbar:a=t2", "t_grid": [[0], [0.3], ["0.3j"]],
              "eta_grid": [0, 0.2], "expect_verdict": "nontrivial"}
        rep = run_config(validate_config(_cfg(sc)))
        row = rep.rows[0]
        assert row["details"]["verdict"] == "nontrivial" and row["pass"]
        assert abs(complex(row["details"]["argmax_t"])) == pytest.approx(0.3)

    def test_suite_selection(self):
        rep = run_config(validate_config(_cfg(SCALED, KERNEL)), ("kernel",))
        assert {r["suite"] for r in rep.rows} == {"kernel"}

    def test_threads_do_not_change_report(self):
        cfg = validate_config(_cfg(SCALED, KERNEL,
                                   {"id": "l2", "suite": "l2-identity", "family": "fixed_disk", "n_random": 3}))
        a = run_config(cfg, threads=1)
        b = run_config(cfg, threads=3)
        assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()

    def test_seed_changes_random_rows(self):
        sc = {"id": "l2", "suite": "l2-identity", "family": "fixed_disk", "n_random": 2}
        a = run_config(validate_config(_cfg(sc, seed=1)))
        b = run_config(validate_config(_cfg(sc, seed=2)))
        assert a.rows[0]["formula_value"] != b.rows[0]["formula_value"]


class TestMain:
    def test_exit_ok_and_files(self, tmp_path):
        out = tmp_path / "out"
        assert main(["first-variation", "--config", str(_write(tmp_path, _cfg(SCALED))), "--out", str(out)]) == 0
        assert (out / "report.json").exists() and (out / "report.csv").exists()

    def test_exit_fail_still_writes(self, tmp_path):
        out = tmp_path / "out"
        cfg = _cfg({**SCALED, "expected": 1.0})
        assert main(["first-variation", "--config", str(_write(tmp_path, cfg)), "--out", str(out)]) == 1
        rep = json.loads((out / "report.json").read_text())
        assert rep["summary"]["pass"] is False and rep["summary"]["n_failed"] == 1

    def test_exit_config_unknown_preset(self, tmp_path, capsys):
        cfg = _cfg({"id": "x", "suite": "kernel", "family": "annulus"})
        assert main(["kernel", "--config", str(_write(tmp_path, cfg)), "--out", str(tmp_path)]) == 2
        assert "annulus" in capsys.readouterr().err

    def test_exit_config_missing_file(self, tmp_path):
        assert main(["kernel", "--config", str(tmp_path / "none.json")]) == 2
        assert main(["kernel"]) == 2

    def test_byte_identical_runs(self, tmp_path):
        p = _write(tmp_path, _cfg(SCALED, KERNEL))
        for name, th in (("a", "1"), ("b", "4")):
            assert main(["all", "--config", str(p), "--out", str(tmp_path / name), "--threads", th]) == 0
        for f in ("report.json", "report.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_module_entry_point(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "bergvar", "presets"], capture_output=True, text=True)
        assert r.returncode == 0 and "scaled_disk" in r.stdout
