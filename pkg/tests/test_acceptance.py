"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import json
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from dkglab import cli, dirac
from dkglab.dirac import BETA, ALPHA1, ALPHA2, SignPair
from dkglab.grid import GridSpec
from dkglab.harness import (
    RegionQuery,
    SampleConfig,
    admissible_region,
    bilinear_constant_11,
    fit_cone_exponents,
    modulated_gaussian,
    scaling_check,
    threshold_pair,
    verify_angle_bound_16,
    verify_angle_equivalences,
)
from dkglab.solver import (
    PhysicsParams,
    SolverConfig,
    charge,
    evolve,
    final_state,
    make_data,
    picard_iterate,
    reassemble,
    residual_original,
    split_data,
)


def _flat(state):
    return np.concatenate([a.ravel() for a in state.arrays()])


def test_criterion_01_algebraic_identities(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    xi = rng.standard_normal((10_000, 2)) * np.exp(rng.uniform(-5, 5, (10_000, 1)))
    I = np.eye(2)
    P = {s: dirac.projection(xi, s) for s in (1, -1)}
    r = np.hypot(xi[:, 0], xi[:, 1])[:, None, None]
    errs = {
        "beta^2": np.abs(BETA @ BETA - I).max(),
        "anticommutators": max(np.abs(a @ b + b @ a - 2 * (i == j) * I).max()
                               for i, a in enumerate((ALPHA1, ALPHA2, BETA))
                               for j, b in enumerate((ALPHA1, ALPHA2, BETA))),
        "idempotent": max(np.abs(P[s] @ P[s] - P[s]).max() for s in P),
        "complete": np.abs(P[1] + P[-1] - I).max(),
        "intertwine": max(np.abs(P[s] @ BETA - BETA @ P[-s]).max() for s in P),
        # relative to |xi| since xi spans 10 decades
        "symbol": (np.abs(dirac.dirac_symbol(xi) - r * (P[1] - P[-1])) / r).max(),
    }
    elapsed = time.perf_counter() - t0
    worst = max(errs.values())
    criterion(worst <= 1e-12 and elapsed < 1.0,
              f"max identity error {worst:.2e} (<= 1e-12) over 1e4 xi in {elapsed:.3f}s (< 1 s)")


def test_criterion_02_nullform_vanishing(criterion):
    # integer directions and multipliers times powers of two keep eta - xi exactly collinear in floats
    rng = np.random.default_rng(202)
    v = rng.integers(-1000, 1001, (1000, 2))
    v[np.all(v == 0, axis=1)] = (1, 0)
    a = rng.integers(1, 2 ** 20, (1000, 1))
    b = rng.integers(1, 2 ** 20, (1000, 1))
    scale = 2.0 ** rng.integers(-30, 30, (1000, 1))
    eta = (a * v) * scale
    xi = ((a - b) * v) * scale
    assert np.array_equal(eta - xi, (b * v) * scale)
    worst = dirac.opnorm(dirac.nullform_symbol(eta, xi, SignPair(1, 1))).max()
    criterion(worst <= 1e-14, f"max |Pi+(eta-xi) beta Pi+(eta)| = {worst:.2e} (<= 1e-14) over 1e3 collinear pairs")


def test_criterion_03_angle_estimates(criterion):
    t0 = time.perf_counter()
    cfg = SampleConfig(count=1_000_000, seed=3)
    eq = verify_angle_equivalences(cfg)
    bound = verify_angle_bound_16(cfg)
    elapsed = time.perf_counter() - t0
    c = eq.constants
    lo = min(c["hyperbolic_min_ratio"], c["elliptic_min_ratio"])
    hi = max(c["hyperbolic_max_ratio"], c["elliptic_max_ratio"])
    sup16 = bound.constants["max_ratio"]
    ok = (eq.passed and lo > 0.1 and hi < 10 and bound.passed and np.isfinite(sup16) and elapsed < 30)
    criterion(ok, f"equivalence ratios in [{lo:.4f}, {hi:.4f}] (c1 > 0.1, c2 < 10, stable: {eq.passed}); "
                  f"modulation bound sup {sup16:.4f} (stable: {bound.passed}); {elapsed:.1f}s (< 30 s)")


def test_criterion_04_cone_exponents(criterion):
    t0 = time.perf_counter()
    r = 1.01
    diff = fit_cone_exponents("difference", r, region="inner")
    summ = fit_cone_exponents("sum", r)
    elapsed = time.perf_counter() - t0
    targets = {"difference": (0.5 - r, -0.5), "sum": (0.5 - r / 2, -0.5)}
    errs = []
    for name, rep in (("difference", diff), ("sum", summ)):
        A0, B0 = targets[name]
        errs.append(max(abs(rep.constants["A"] - A0), abs(rep.constants["B"] - B0)))
    ok = max(errs) <= 0.05 and elapsed < 120
    criterion(ok, f"difference A={diff.constants['A']:.4f} B={diff.constants['B']:.4f} "
                  f"(target {0.5 - r:.3f}, -0.5); sum A={summ.constants['A']:.4f} B={summ.constants['B']:.4f} "
                  f"(target {0.5 - r / 2:.3f}, -0.5); max err {max(errs):.4f} (<= 0.05); {elapsed:.2f}s")


def test_criterion_05_region_formulas(criterion):
    F = Fraction
    checks = [
        threshold_pair(2, "minimal_s") == (F(-1, 5), F(7, 20)),
        threshold_pair(2, "minimal_l") == (F(0), F(1, 4)),
        threshold_pair(1, "minimal_s") == (F(5, 8), F(5, 4)),
        threshold_pair(1, "minimal_l") == (F(5, 8), F(5, 4)),
        F(33, 20) - F(41, 40) == F(5, 8) and F(9, 5) - F(11, 20) == F(5, 4),
        admissible_region(RegionQuery(2, "1/100", "minimal_l")) == (F(1, 100), F(26, 100)),
        all(isinstance(x, Fraction) for x in admissible_region(RegionQuery("1.0001", "1/1000", "minimal_s"))),
    ]
    criterion(all(checks), f"{sum(checks)}/{len(checks)} exact rational identities hold")


def test_criterion_06_scaling_law(criterion):
    field = modulated_gaussian(GridSpec(64), "spinor")
    out, ok = [], True
    for s, r in ((0.0, 2.0), (-0.5, 2.0), (0.625, 1.25)):
        e = scaling_check(s, r, "spinor", field).constants["exponent"]
        expect = 1.5 + s - 2 / r
        ok = ok and abs(e - expect) <= 1e-2
        out.append(f"({s:g},{r:g}): {e:.5f} vs {expect:.5f}")
    # scale-invariant regularity gives exponent zero
    for r in (2.0, 1.5, 1.1):
        e = scaling_check(2 / r - 1.5, r, "spinor", field).constants["exponent"]
        ok = ok and abs(e) <= 1e-2
        out.append(f"invariant r={r:g}: {e:.1e}")
    criterion(ok, "exponents " + "; ".join(out))


def test_criterion_07_bilinear_constants(criterion):
    t0 = time.perf_counter()
    cfg = SampleConfig(count=200, seed=7)
    parts, ok = [], True
    for s, l, r, b in ((0.0, 0.26, 2.0, 0.51), (0.635, 1.26, 1.01, 1.0)):
        rep = bilinear_constant_11(s, l, r, b, cfg=cfg, resolutions=(16, 32, 64), precision="single")
        trend = rep.constants["trend"]
        growth = trend[-1] / trend[0] - 1
        ok = ok and growth < 0.5
        parts.append(f"r={r:g}: C(16)={trend[0]:.3e} C(64)={trend[-1]:.3e} growth {growth:+.1%}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 600
    criterion(ok, "; ".join(parts) + f" (< +50%); {elapsed:.0f}s (< 600 s)")


def test_criterion_08_solver_correctness(criterion):
    notes, ok = [], True
    # free flow on single modes: exact phases
    g = GridSpec(16)
    psi0, phi0, phi1 = make_data(g, {"family": "single_mode", "mode": [2, -1], "amplitude": 1.0})
    st = split_data(psi0, phi0, phi1)
    free = PhysicsParams(M=0.0, m=-1.0, coupling=0.0)
    T = 0.37
    fin = final_state(st, free, SolverConfig(dt=T / 5, steps=5))
    ops_lam = (-1j * g.xi_abs, 1j * g.xi_abs, -1j * np.sqrt(1 + g.xi_abs ** 2), 1j * np.sqrt(1 + g.xi_abs ** 2))
    exact = np.concatenate([(a * np.exp(T * l)).ravel() for a, l in zip(st.arrays(), ops_lam)])
    phase_err = np.abs(_flat(fin) - exact).max() / np.abs(exact).max()
    ok = ok and phase_err <= 1e-12
    notes.append(f"free phase err {phase_err:.1e}")

    # convergence order in dt
    g = GridSpec(64)
    data = make_data(g, {"family": "gaussian", "amplitude": 0.1})
    st = split_data(*data)
    P = PhysicsParams(M=1.0, m=1.0)
    sols = [_flat(final_state(st, P, SolverConfig(dt=dt, steps=round(0.4 / dt)))) for dt in (0.04, 0.02, 0.01)]
    order = np.log2(np.linalg.norm(sols[0] - sols[1]) / np.linalg.norm(sols[1] - sols[2]))
    ok = ok and abs(order - 2.0) <= 0.2
    notes.append(f"order {order:.3f}")

    # charge drift over T = 1 at dt = 1e-3
    q = []
    evolve(st, P, SolverConfig(dt=1e-3, steps=1000, save_every=50),
           monitor=lambda s: q.append(charge(s.psi_plus, s.psi_minus)))
    drift = float(np.max(np.abs(np.asarray(q) - q[0])))
    ok = ok and drift < 1e-6
    notes.append(f"charge drift {drift:.1e}")

    # residual of the unsplit system under joint (dt, n_x) refinement
    res = []
    for n, dt in ((16, 0.02), (32, 0.01), (64, 0.005)):
        g = GridSpec(n)
        st = split_data(*make_data(g, {"family": "gaussian", "amplitude": 0.1}))
        traj = evolve(st, P, SolverConfig(dt=dt, steps=round(0.2 / dt)))
        res.append(sum(residual_original(traj, P)))
    mono = all(b < a for a, b in zip(res, res[1:]))
    ok = ok and mono
    notes.append("residuals " + " > ".join(f"{x:.2e}" for x in res))
    criterion(ok, "; ".join(notes))


def test_criterion_09_split_and_picard(criterion):
    g = GridSpec(64)
    rng = np.random.default_rng(9)
    psi0, phi0, phi1 = make_data(g, {"family": "random_spectrum", "amplitude": 1.0, "decay": 1.5}, rng)
    psi, phi, dtphi = reassemble(split_data(psi0, phi0, phi1))
    rt = max(np.abs(psi.values - psi0.values).max(), np.abs(phi.values - phi0.values).max(),
             np.abs(dtphi.values - phi1.values).max())

    st = split_data(*make_data(g, {"family": "gaussian", "amplitude": 0.1}))
    P = PhysicsParams(M=1.0, m=1.0)
    res = picard_iterate(st, P, 0.1, iters=30, tol=1e-12, n_t=64)
    worst_ratio = max(res.ratios)
    ref = final_state(st, P, SolverConfig(dt=1e-4, steps=1000))
    gap = np.abs(_flat(res.state_at(0.1)) - _flat(ref)).max()
    ok = rt <= 1e-12 and res.converged and worst_ratio < 0.9 and gap <= 1e-4
    criterion(ok, f"round trip {rt:.1e}; Picard converged={res.converged} in {res.iterations} iterations, "
                  f"max ratio {worst_ratio:.3f} (< 0.9); Picard vs stepping {gap:.1e} (<= 1e-4)")


def _write(path, doc):
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


def _snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(Path(root).rglob("*")) if p.is_file()}


def test_criterion_10_determinism(criterion, tmp_path):
    manifests = {
        "simulate": {"schema": 1, "command": "simulate", "seed": 11,
                     "parameters": {"grid": {"n_x": 16}, "physics": {"M": 1.0, "m": 1.0},
                                    "solver": {"dt": 0.01, "steps": 20},
                                    "data": {"family": "random_spectrum", "amplitude": 0.1}}},
        "verify": {"schema": 1, "command": "verify", "seed": 5,
                   "parameters": {"check": "angle16", "sampling": {"count": 20_000}}},
        "norms": {"schema": 1, "command": "norms", "seed": 4,
                  "parameters": {"grid": {"n_x": 16}, "data": {"family": "random_spectrum"},
                                 "norms": [{"field": "psi", "s": 0.5, "r": 1.5}]}},
        "region": {"schema": 1, "command": "region", "parameters": {"r": 1.5, "delta": 0.01,
                                                                     "variant": "minimal_s"}},
    }
    same, codes = [], []
    for name, m in manifests.items():
        path = _write(tmp_path / f"{name}.json", m)
        snaps = []
        for k in range(2):
            out = tmp_path / f"{name}_{k}"
            codes.append(cli.main(["run", "--manifest", path, "--out", str(out)]))
            snaps.append(_snapshot(out))
        same.append(snaps[0] == snaps[1] and len(snaps[0]) > 0)
    ok = all(same) and all(c == 0 for c in codes)
    criterion(ok, f"byte-identical outputs for {sum(same)}/{len(same)} commands run twice; exit codes {sorted(set(codes))}")
