"""Batch runner: JSON scenario configs in, JSON/CSV verification reports out.

Exit codes: 0 all selected suites pass, 1 a numerical check failed,
2 the config is invalid, 3 an internal error occurred.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bergman import PolyField, WEIGHT_PRESETS, eval_kernel, weight_preset
from .deformation import boundary_density, quasi_ke_field
from .domains import (
    FAMILY_PRESETS,
    MOTION_COEFFICIENTS,
    MOTION_PREFIX,
    ParameterBoxError,
    evaluate_jet,
    family_preset,
    family_preset_ids,
)
from .motions import Bump, kf_functional, motion_preset, motion_preset_ids, motion_to_family, triviality_decision
from .variation import (
    INTEGRANDS,
    FDStencil,
    InteriorRegionError,
    Resolution,
    _check_interior,
    fiber_integral_derivative,
    fiber_quadrature,
    fiber_space,
    first_variation,
    l2_identity_check,
    nakano_form,
    psh_scan,
    second_variation_planar,
)

SCHEMA_VERSION = 1
ROW_FIELDS = ("suite", "scenario", "formula_value", "oracle_value", "abs_residual", "rel_residual",
              "tolerance", "pass")
SUITES = ("kernel", "fiber-integral", "first-variation", "second-variation", "l2-identity", "nakano",
          "motion", "psh-scan")
# subcommand -> scenario suites it runs
COMMAND_SUITES = {
    "kernel": ("kernel",),
    "first-variation": ("fiber-integral", "first-variation"),
    "second-variation": ("second-variation", "l2-identity"),
    "nakano": ("nakano",),
    "motion": ("motion",),
    "psh-scan": ("psh-scan",),
    "all": SUITES,
}

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# presets


def list_presets() -> dict:
    """Catalog of families, weights, motions and integrands, in a stable order."""
    fams = []
    for pid in family_preset_ids():
        if pid.startswith(MOTION_PREFIX):
            name = pid[len(MOTION_PREFIX):]
            box = (MOTION_COEFFICIENTS[name][2],)
            desc = "graph of the motion z + a(t) zbar" + (" (params: [eps])" if name == "eps_t" else "")
            m = 1
        else:
            desc, m, box, _ = FAMILY_PRESETS[pid]
        fams.append({"id": pid, "m": m, "box": list(box), "description": desc})
    return {
        "families": fams,
        "weights": [{"id": k, "description": v} for k, v in WEIGHT_PRESETS.items()],
        "motions": [{"id": k, "box": motion_preset(k, [0.5] if k.endswith("eps_t") else []).box}
                    for k in motion_preset_ids()],
        "integrands": [{"id": k, "description": v.description} for k, v in INTEGRANDS.items()],
    }


# ---------------------------------------------------------------------------
# config parsing


def _complex(x, what):
    if isinstance(x, bool):
        raise ConfigError(f"{what}: expected a complex number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{what}: expected a number or a string like '0.2+0.1j', got {x!r}")


def _clist(xs, what):
    if not isinstance(xs, list):
        xs = [xs]
    return [_complex(x, what) for x in xs]


@dataclass(frozen=True)
class Scenario:
    id: str
    suite: str
    raw: dict = field(compare=False)
    res: Resolution = Resolution()
    stencil: FDStencil = FDStencil()


@dataclass(frozen=True)
class ScenarioConfig:
    raw: dict
    scenarios: tuple
    seed: int


def validate_config(cfg: dict, seed: int | None = None) -> ScenarioConfig:
    """Check a parsed config; raises :class:`ConfigError` naming the offending entry."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    defaults = cfg.get("defaults", {})
    scen = cfg.get("scenarios")
    if not isinstance(scen, list) or not scen:
        raise ConfigError("config needs a non-empty 'scenarios' list")
    out = []
    seen = set()
    for s in scen:
        if not isinstance(s, dict) or "id" not in s or "suite" not in s:
            raise ConfigError(f"every scenario needs 'id' and 'suite': {s!r}")
        sid = str(s["id"])
        if sid in seen:
            raise ConfigError(f"duplicate scenario id {sid!r}")
        seen.add(sid)
        if s["suite"] not in SUITES:
            raise ConfigError(f"scenario {sid!r}: unknown suite {s['suite']!r}")
        merged = {**defaults, **s}
        try:
            res = Resolution(int(merged.get("N", 24)), int(merged.get("n_radial", 48)),
                             int(merged.get("n_angular", 256)))
            stencil = FDStencil(float(merged.get("h", 1e-3)), str(merged.get("scheme", "richardson")))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scenario {sid!r}: {exc}") from None
        if min(res.N, res.n_radial, res.n_angular) < 1:
            raise ConfigError(f"scenario {sid!r}: resolutions must be positive")
        if res.n_angular < 4 * res.N:
            raise ConfigError(f"scenario {sid!r}: n_angular must be >= 4N")
        sc = Scenario(sid, s["suite"], merged, res, stencil)
        _validate_scenario(sc)
        out.append(sc)
    out.sort(key=lambda x: x.id)
    seed = int(cfg.get("seed", 0)) if seed is None else int(seed)
    return ScenarioConfig(cfg, tuple(out), seed)


def _family(sc: Scenario):
    pid = sc.raw.get("family")
    if pid is None:
        raise ConfigError(f"scenario {sc.id!r}: missing 'family'")
    try:
        return family_preset(pid, sc.raw.get("params", []))
    except KeyError:
        raise ConfigError(f"scenario {sc.id!r}: unknown preset {pid!r}") from None
    except ValueError as exc:
        raise ConfigError(f"scenario {sc.id!r}: {exc}") from None


def _weight(sc: Scenario):
    wid = sc.raw.get("weight", "zero")
    try:
        return weight_preset(wid, sc.raw.get("weight_params", []))
    except KeyError:
        raise ConfigError(f"scenario {sc.id!r}: unknown preset {wid!r}") from None


def _motion(sc: Scenario):
    mid = sc.raw.get("motion")
    try:
        return motion_preset(mid, sc.raw.get("params", []))
    except KeyError:
        raise ConfigError(f"scenario {sc.id!r}: unknown preset {mid!r}") from None
    except ValueError as exc:
        raise ConfigError(f"scenario {sc.id!r}: {exc}") from None


def _t(sc, fam, value):
    t = _clist(value, f"scenario {sc.id!r}: t")
    if len(t) != fam.m:
        raise ConfigError(f"scenario {sc.id!r}: t needs {fam.m} entries")
    box = np.asarray(fam.box) - sc.stencil.h
    if np.any(np.abs(np.array(t)) > box + 1e-12):
        raise ConfigError(f"scenario {sc.id!r}: t={t} (with FD footprint h) outside the box {fam.box}")
    return t


def _t_grid(sc, fam):
    grid = sc.raw.get("t_grid", [sc.raw.get("t", [0] * fam.m)])
    if not isinstance(grid, list) or not grid:
        raise ConfigError(f"scenario {sc.id!r}: t_grid must be a non-empty list")
    return [_t(sc, fam, g) for g in grid]


def _validate_scenario(sc: Scenario):
    s = sc.suite
    if s == "motion":
        m = _motion(sc)
        fam = motion_to_family(m)
        grid = _t_grid(sc, fam)
        _clist(sc.raw.get("eta_grid", [0]), f"scenario {sc.id!r}: eta_grid")
        return
    if s == "psh-scan":
        if sc.raw.get("functional", "kernel") not in ("kernel", "kf"):
            raise ConfigError(f"scenario {sc.id!r}: functional must be 'kernel' or 'kf'")
    fam = _family(sc)
    _weight(sc)
    if s == "fiber-integral":
        ints = sc.raw.get("integrands", list(INTEGRANDS))
        for name in ints:
            if name not in INTEGRANDS:
                raise ConfigError(f"scenario {sc.id!r}: unknown preset {name!r}")
    grid = _t_grid(sc, fam) if s == "psh-scan" else [_t(sc, fam, sc.raw.get("t", [0] * fam.m))]
    pts = []
    for key in ("zeta", "eta", "points"):
        if key in sc.raw:
            pts += _clist(sc.raw[key], f"scenario {sc.id!r}: {key}")
    for t in grid:
        try:
            quad = fiber_quadrature(fam, t, sc.res)
            if pts:
                _check_interior(quad, pts)
        except InteriorRegionError as exc:
            raise ConfigError(f"scenario {sc.id!r}: {exc}") from None
        except ParameterBoxError as exc:
            raise ConfigError(f"scenario {sc.id!r}: {exc}") from None


# ---------------------------------------------------------------------------
# rows


def _num(z):
    z = complex(z)
    if z.imag == 0:
        return float(z.real)
    return f"{z.real!r}{z.imag:+.17g}j"


def _row(suite, scenario, formula, oracle, tol, details=None, abs_res=None, ok=None):
    f = complex(formula)
    o = complex(oracle)
    a = abs(f - o) if abs_res is None else float(abs_res)
    r = a / abs(o) if o != 0 else a
    ok = (a <= tol) if ok is None else bool(ok)
    row = {"suite": suite, "scenario": scenario, "formula_value": _num(f), "oracle_value": _num(o),
           "abs_residual": float(a), "rel_residual": float(r), "tolerance": float(tol), "pass": bool(ok)}
    if details:
        row["details"] = details
    return row


def _tol(sc, atol, rtol, value):
    atol = float(sc.raw.get("atol", atol))
    rtol = float(sc.raw.get("rtol", rtol))
    return max(atol, rtol * abs(value))


def _closed_form_kernel(fam, weight, t, zeta, eta):
    if not weight.is_zero:
        return None
    if fam.preset_id == "scaled_disk":
        R2 = abs(1 + t[0]) ** 2
    elif fam.preset_id == "fixed_disk" or fam.preset_id == MOTION_PREFIX + "0":
        R2 = 1.0
    else:
        return None
    return R2 / (np.pi * (R2 - zeta * np.conj(eta)) ** 2)


def _suite_kernel(sc: Scenario, rng):
    fam, w = _family(sc), _weight(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    sp = fiber_space(fam, w, t, sc.res)
    rows = [_row("kernel", sc.id + "/gram", sp.gram_residual(), 0.0, 1e-10, {"rank": sp.rank})]
    zeta = _complex(sc.raw.get("zeta", 0), "zeta")
    eta = _complex(sc.raw.get("eta", 0), "eta")
    K = eval_kernel(sp, zeta, eta)
    cf = _closed_form_kernel(fam, w, t, zeta, eta)
    if cf is not None:
        rows.append(_row("kernel", sc.id + "/closed-form", K, cf, _tol(sc, 0.0, 1e-8, cf)))
    rows.append(_row("kernel", sc.id + "/hermitian", K, np.conj(eval_kernel(sp, eta, zeta)), 1e-14 * abs(K)))
    # reproducing property at seeded interior points, every basis function
    quad = sp.quad
    n = int(sc.raw.get("n_samples", 50))
    th = rng.uniform(0, 2 * np.pi, n)
    rr = rng.uniform(0, 0.8, n)
    idx = np.floor(th / (2 * np.pi) * quad.radius.size).astype(int) % quad.radius.size
    pts = quad.center + rr * quad.radius[idx] * np.exp(1j * th)
    kmat = sp.kernel_matrix(pts, quad.interior_nodes)  # K(zeta_i, conj w)
    E = sp.node_basis
    repro = (kmat * sp.measure[None, :]) @ E
    err = float(np.max(np.abs(repro - sp.basis(pts))))
    rows.append(_row("kernel", sc.id + "/reproducing", err, 0.0, 1e-8, {"n_samples": n}))
    return rows


def _suite_fiber_integral(sc: Scenario, rng):
    fam = _family(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    rows = []
    for name in sc.raw.get("integrands", list(INTEGRANDS)):
        for j in range(fam.m):
            r = fiber_integral_derivative(fam, name, t, j, sc.res, sc.stencil)
            rows.append(_row("fiber-integral", f"{sc.id}/{name}/j={j}", r.formula, r.oracle,
                             _tol(sc, 1e-6, 1e-4, r.oracle)))
    if "expected" in sc.raw:
        exp = _complex(sc.raw["expected"], "expected")
        r = fiber_integral_derivative(fam, sc.raw.get("integrands", ["one"])[0], t, 0, sc.res, sc.stencil)
        rows.append(_row("fiber-integral", sc.id + "/exact", r.formula, exp, 1e-6))
    return rows


def _suite_first_variation(sc: Scenario, rng):
    fam, w = _family(sc), _weight(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    zeta = _complex(sc.raw.get("zeta", 0), "zeta")
    eta = _complex(sc.raw.get("eta", 0), "eta")
    rows = []
    for j in range(fam.m):
        r = first_variation(fam, w, t, zeta, eta, j, sc.res, sc.stencil)
        rows.append(_row("first-variation", f"{sc.id}/j={j}", r.formula, r.oracle,
                         _tol(sc, 1e-8, 1e-4, r.oracle)))
        if "expected" in sc.raw and j == 0:
            exp = _complex(sc.raw["expected"], "expected")
            rows.append(_row("first-variation", sc.id + "/exact", r.formula, exp, _tol(sc, 1e-8, 1e-4, exp)))
    return rows


def _suite_second_variation(sc: Scenario, rng):
    fam = _family(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    zeta = _complex(sc.raw.get("zeta", 0), "zeta")
    eta = _complex(sc.raw.get("eta", 0), "eta")
    rows = []
    pairs = [(j, k) for j in range(fam.m) for k in range(fam.m)]
    for j, k in pairs:
        r = second_variation_planar(fam, t, zeta, eta, j, k, sc.res, sc.stencil)
        terms = {key: _num(v) for key, v in r.terms.items()}
        rows.append(_row("second-variation", f"{sc.id}/j={j},k={k}", r.formula, r.oracle,
                         _tol(sc, 1e-5, 1e-3, r.oracle), terms))
        rows.append(_row("second-variation", f"{sc.id}/j={j},k={k}/membership",
                         r.terms["membership_residual"], 0.0, 1e-6))
        if "expected_terms" in sc.raw and (j, k) == (0, 0):
            exp = _clist(sc.raw["expected_terms"], "expected_terms")
            for name, val in zip(("boundary", "derivative_kernel", "harmonic"), exp):
                rows.append(_row("second-variation", f"{sc.id}/term/{name}", r.terms[name], val, 1e-6))
    return rows


def _suite_l2(sc: Scenario, rng):
    fam, w = _family(sc), _weight(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    sp = fiber_space(fam, w, t, sc.res)
    rows = []
    deg = int(sc.raw.get("degree", 5))
    for i in range(int(sc.raw.get("n_random", 20))):
        terms = {(p, q): complex(*rng.normal(size=2)) for p in range(deg + 1) for q in range(deg + 1 - p)}
        g = PolyField.from_monomials(terms, fam.center, 1.0)
        nb, na, nb1, resid = l2_identity_check(sp, g)
        rows.append(_row("l2-identity", f"{sc.id}/random{i:02d}", nb, na + nb1, 1e-6 * nb,
                         {"b2": nb, "a2": na, "b1_2": nb1}))
    return rows


def _suite_nakano(sc: Scenario, rng):
    fam, w = _family(sc), _weight(sc)
    t = _t(sc, fam, sc.raw.get("t", [0] * fam.m))
    pts = _clist(sc.raw.get("points", [0]), "points")
    rows = []
    for r in sc.raw.get("r_values", [len(pts)]):
        nf = nakano_form(fam, w, t, pts[: int(r)], sc.res, sc.stencil)
        mn = nf.min_eigenvalue
        tol = 1e-5 * nf.scale
        rows.append(_row("nakano", f"{sc.id}/r={r}/psd", mn, 0.0, tol,
                         {"max_eigenvalue": nf.max_eigenvalue, "scale": nf.scale},
                         abs_res=max(0.0, -mn)))
        if sc.raw.get("expect_zero"):
            big = float(np.max(np.abs(nf.eigenvalues)))
            rows.append(_row("nakano", f"{sc.id}/r={r}/zero", big, 0.0, 1e-6))
        if "expect_min_above" in sc.raw:
            thr = float(sc.raw["expect_min_above"])
            rows.append(_row("nakano", f"{sc.id}/r={r}/positive", mn, thr, 0.0,
                             abs_res=max(0.0, thr - mn), ok=mn > thr))
    return rows


def _suite_motion(sc: Scenario, rng):
    m = _motion(sc)
    fam = motion_to_family(m)
    grid = [g[0] for g in _t_grid(sc, fam)]
    etas = _clist(sc.raw.get("eta_grid", [0]), "eta_grid")
    rep = triviality_decision(m, grid, etas, sc.res)
    lo, hi = rep.thresholds
    details = {"verdict": rep.verdict, "argmax_t": _num(rep.argmax[0]), "argmax_eta": _num(rep.argmax[1]),
               "scale": rep.scale, "grid_relative": True}
    rows = []
    expect = sc.raw.get("expect_verdict")
    if expect == "nontrivial":
        rows.append(_row("motion", sc.id + "/verdict", rep.max_modulus, hi, hi, details,
                         abs_res=max(0.0, hi - rep.max_modulus), ok=rep.verdict == expect))
    elif expect == "trivial-consistent":
        rows.append(_row("motion", sc.id + "/verdict", rep.max_modulus, 0.0, lo, details,
                         ok=rep.verdict == expect))
    else:
        rows.append(_row("motion", sc.id + "/verdict", rep.max_modulus, 0.0, hi, details,
                         ok=rep.verdict != "inconclusive"))
    for ev in sc.raw.get("expect_values", []):
        tt = _complex(ev.get("t", 0), "t")
        ee = _complex(ev.get("eta", 0), "eta")
        i = int(np.argmin(np.abs(rep.t_grid - tt)))
        k = int(np.argmin(np.abs(rep.eta_grid - ee)))
        val = rep.values[i, k]
        exp = _complex(ev["value"], "value")
        rows.append(_row("motion", f"{sc.id}/value/t={_num(tt)},eta={_num(ee)}", val, exp,
                         float(ev.get("atol", 1e-6))))
    # Levi-flatness of the graph
    worst = 0.0
    for t in grid:
        q = fiber_quadrature(fam, [t], sc.res)
        worst = max(worst, float(np.max(np.abs(boundary_density(evaluate_jet(fam, [t], q.boundary_nodes))))))
    rows.append(_row("motion", sc.id + "/levi-flat", worst, 0.0, 1e-7))
    return rows


def _suite_psh(sc: Scenario, rng):
    fam, w = _family(sc), _weight(sc)
    grid = _t_grid(sc, fam)
    func = sc.raw.get("functional", "kernel")
    if func == "kernel":
        zeta = _complex(sc.raw.get("zeta", 0), "zeta")

        def F(s):
            return eval_kernel(fiber_space(fam, w, s, sc.res), zeta, zeta)
    else:
        b = sc.raw.get("bump", {})
        bump = Bump(_complex(b.get("z0", 0), "z0"), float(b.get("r0", 0.4)), int(b.get("power", 4)),
                    _complex(b.get("beta", 0.5), "beta"))

        def F(s):
            return kf_functional(fiber_space(fam, w, s, sc.res), bump)
    mn, arg, vals = psh_scan(F, grid, sc.stencil, fam.box)
    scale = float(sc.raw.get("scale", 1.0))
    rows = [_row("psh-scan", sc.id + "/min-levi", mn, 0.0, 1e-4 * scale,
                 {"argmin": [_num(x) for x in arg]}, abs_res=max(0.0, -mn))]
    if sc.raw.get("expect_zero"):
        rows.append(_row("psh-scan", sc.id + "/zero", float(np.max(np.abs(vals))), 0.0, 1e-6))
    return rows


SUITE_FUNCS = {
    "kernel": _suite_kernel,
    "fiber-integral": _suite_fiber_integral,
    "first-variation": _suite_first_variation,
    "second-variation": _suite_second_variation,
    "l2-identity": _suite_l2,
    "nakano": _suite_nakano,
    "motion": _suite_motion,
    "psh-scan": _suite_psh,
}


# ---------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class RunReport:
    version: str
    config: dict
    rows: list
    summary: dict

    def to_json(self) -> str:
        return json.dumps({"version": self.version, "config": self.config, "rows": self.rows,
                           "summary": self.summary}, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=ROW_FIELDS, extrasaction="ignore", lineterminator="\n")
        wr.writeheader()
        for r in self.rows:
            wr.writerow(r)
        return buf.getvalue()

    @property
    def passed(self) -> bool:
        return bool(self.summary["pass"])


def _scenario_seed(seed: int, sid: str) -> np.random.Generator:
    # per-scenario stream: independent of execution order and worker count
    return np.random.default_rng([seed, *sid.encode()])


def run_config(cfg: ScenarioConfig, suites=SUITES, threads: int = 1) -> RunReport:
    chosen = [s for s in cfg.scenarios if s.suite in suites]

    def one(sc):
        try:
            return sc.id, SUITE_FUNCS[sc.suite](sc, _scenario_seed(cfg.seed, sc.id)), None
        except Exception as exc:  # reported, then mapped to exit code 3
            return sc.id, [], f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, chosen))
    else:
        results = [one(sc) for sc in chosen]
    results.sort(key=lambda r: r[0])
    rows = [row for _, rr, _ in results for row in rr]
    errors = {sid: err for sid, _, err in results if err}
    per_suite = {}
    for r in rows:
        d = per_suite.setdefault(r["suite"], {"rows": 0, "failed": 0, "max_abs_residual": 0.0})
        d["rows"] += 1
        d["failed"] += 0 if r["pass"] else 1
        d["max_abs_residual"] = max(d["max_abs_residual"], r["abs_residual"])
    for d in per_suite.values():
        d["pass"] = d["failed"] == 0
    summary = {"pass": all(r["pass"] for r in rows) and not errors, "n_rows": len(rows),
               "n_failed": sum(not r["pass"] for r in rows), "suites": per_suite,
               "errors": errors, "seed": cfg.seed}
    return RunReport(__version__, cfg.raw, rows, summary)


def write_report(report: RunReport, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "report.csv").write_text(report.to_csv())


def _parser():
    p = argparse.ArgumentParser(prog="bergvar", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["presets", *COMMAND_SUITES])
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, default=Path("bergvar-report"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "presets":
        sys.stdout.write(json.dumps(list_presets(), indent=2) + "\n")
        return EXIT_OK
    if args.config is None:
        print("error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        raw = json.loads(args.config.read_text())
        cfg = validate_config(raw, args.seed)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_config(cfg, COMMAND_SUITES[args.command], max(1, args.threads))
        write_report(report, args.out)
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    for r in report.rows:
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['suite']:<16} {r['scenario']:<48} "
              f"residual={r['abs_residual']:.3e} tol={r['tolerance']:.3e}")
    s = report.summary
    print(f"{s['n_rows'] - s['n_failed']}/{s['n_rows']} rows pass; report in {args.out}")
    if s["errors"]:
        for sid, err in s["errors"].items():
            print(f"error in scenario {sid}: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
