"""Acceptance gate.

Each test covers one shipped claim end to end and prints a single
PASS/FAIL line (run with -s to see them); the wall-clock budget is part
of the claim.  Tolerances are stated inline next to each check.
"""
import math
import time

import numpy as np

from thomaslab import (
    Direction,
    IntegratorConfig,
    LatticePoint,
    bifurcation_sweep,
    circulant_eigenvalues,
    cyclic_permute,
    detect_limit_cycle,
    field,
    find_fixed_points,
    hopf_points,
    integrate,
    lattice_eigenvalues,
    lyapunov_function_check,
    lyapunov_spectrum,
    poincare_section,
    reflect,
    saddle_node_points,
    spectrum_scan,
    streamed_speed_stats,
)

from oracles import dense_scan_roots, diagonal_jacobian, lattice_jacobian, sorted_eigs


def report(num, ok, elapsed, budget, desc, detail=""):
    status = "PASS" if ok and elapsed <= budget else "FAIL"
    line = f"ACCEPTANCE {num:02d} {status} [{elapsed:6.1f}s / {budget:.0f}s] {desc}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    assert ok, f"criterion {num}: {desc}: {detail}"
    assert elapsed <= budget, (
        f"criterion {num} exceeded its {budget:.0f}s budget: {elapsed:.1f}s")


def test_01_fixed_point_census():
    t0 = time.perf_counter()
    expected = {1.1: 1, 0.9: 3, 0.35: 3, 0.128: 7, 0.07: 11}
    details = []
    ok = True
    for b, want in expected.items():
        got = len(find_fixed_points(b))
        oracle = dense_scan_roots(b, x_max=max(math.pi, 1.2 / b),
                                  n_grid=200001).size
        details.append(f"b={b}: {got}")
        ok = ok and got == want == oracle
    report(1, ok, time.perf_counter() - t0, 1.0,
           "fixed-point counts {1,3,3,7,11} vs dense-scan oracle",
           ", ".join(details))


def test_02_closed_form_eigenvalues():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260814)
    worst = 0.0
    for _ in range(1000):
        c = rng.uniform(-1.0, 1.0)
        b = rng.uniform(0.0, 2.0)
        ours = np.array(circulant_eigenvalues(c, b).as_complex())
        ours = ours[np.lexsort((ours.imag, ours.real))]
        ref = sorted_eigs(diagonal_jacobian(c, b))
        worst = max(worst, float(np.max(np.abs(ours - ref))))
    report(2, worst <= 1e-10, time.perf_counter() - t0, 1.0,
           "closed-form eigenvalues vs generic solver, 1000 draws",
           f"max dev {worst:.2e} <= 1e-10")


def test_03_hopf_locations():
    t0 = time.perf_counter()
    events = hopf_points(n_max=2)
    (x1, b1), (x2, b2) = [(e.x_star, e.b_critical) for e in events[:2]]
    ok = (abs(b1 - 0.329) <= 1e-3 and abs(x1 - 2.28) <= 1e-2
          and abs(b2 - 0.1198) <= 1e-3 and abs(x2 - 8.09) <= 1e-2)
    report(3, ok, time.perf_counter() - t0, 1.0,
           "first two Hopf points near (2.28, 0.329) and (8.09, 0.1198)",
           f"got ({x1:.4f}, {b1:.6f}) and ({x2:.4f}, {b2:.6f})")


def test_04_saddle_node_location():
    t0 = time.perf_counter()
    ev = saddle_node_points(n_max=1)[0]
    ok = (0.125 <= ev.b_critical <= 0.132
          and abs(ev.x_star - 7.7253) <= 1e-3
          and abs(math.tan(ev.x_star) - ev.x_star) < 1e-8)
    report(4, ok, time.perf_counter() - t0, 1.0,
           "first double saddle-node in [0.125, 0.132] at x* ~ 7.7253",
           f"got b={ev.b_critical:.6f}, x*={ev.x_star:.5f}")


def test_05_global_stability_audit():
    t0 = time.perf_counter()
    audit = lyapunov_function_check(1.2, n_samples=100000,
                                    box_half_width=10.0, rng_seed=20260814)
    rng = np.random.default_rng(20260814)
    cfg = IntegratorConfig(step_h=0.01, t_end=300.0, transient_skip=0.0)
    worst_final = 0.0
    for _ in range(50):
        s0 = rng.uniform(-10.0, 10.0, size=3)
        traj = integrate(s0, 1.2, cfg, rec_stride=cfg.n_steps)
        worst_final = max(worst_final, float(np.max(np.abs(traj.final_state))))
    ok = audit.violations == 0 and worst_final < 1e-6
    report(5, ok, time.perf_counter() - t0, 30.0,
           "decay audit clean at b=1.2; 50 trajectories reach origin",
           f"violations={audit.violations}, worst |s(300)|={worst_final:.2e}")


def test_06_lyapunov_trace_identity():
    t0 = time.perf_counter()
    cfg = IntegratorConfig(step_h=0.01, t_end=40000.0, transient_skip=1000.0)
    ok = True
    details = []
    for b in (0.30, 0.25, 0.19, 0.10, 0.05):
        rep = lyapunov_spectrum((0.1, 0.2, 0.3), b, cfg)
        dev = abs(sum(rep.exponents) + 3.0 * b)
        details.append(f"b={b}: dev {dev:.1e} conv {rep.converged}")
        ok = ok and dev <= 0.02 and rep.converged
    report(6, ok, time.perf_counter() - t0, 300.0,
           "spectrum sum matches -3b within 0.02, converged, five b values",
           "; ".join(details))


def test_07_limit_cycle_window():
    t0 = time.perf_counter()
    # start just off the outermost diagonal equilibrium so the run stays on
    # the attracting cycle whose first exponent sits at the zero knife edge
    r = 8.0986484574392106
    cfg = IntegratorConfig(step_h=0.01, t_end=40000.0, transient_skip=1000.0)
    rep = lyapunov_spectrum((r + 1e-4, r, r), 0.1198, cfg)
    traj = integrate((0.1, 0.2, 0.3), 0.1198,
                     IntegratorConfig(step_h=0.01, t_end=3000.0,
                                      transient_skip=1500.0))
    cyc = detect_limit_cycle(traj, 0.1198)
    ok = (abs(rep.exponents[0]) <= 0.01
          and abs(rep.d_ky - 1.0) <= 0.1
          and rep.converged
          and cyc.periodic)
    report(7, ok, time.perf_counter() - t0, 120.0,
           "b=0.1198: |lambda1| <= 0.01, D_KY = 1.0 +- 0.1, cycle detected",
           f"lambda1={rep.exponents[0]:+.2e}, D={rep.d_ky:.4f}, "
           f"period={cyc.period:.2f}")


def test_08_dimension_trend():
    t0 = time.perf_counter()
    cfg = IntegratorConfig(step_h=0.01, t_end=40000.0, transient_skip=1000.0)
    reports = spectrum_scan(np.linspace(0.45, 0.02, 15), cfg)
    high = [r for r in reports if r.b >= 0.35]
    low = [r for r in reports if r.b <= 0.03]
    ok = (len(high) >= 3 and len(low) >= 1
          and all(r.d_ky <= 1.1 for r in high)
          and all(r.d_ky >= 2.5 for r in low)
          and all(r.error is None for r in reports))
    report(8, ok, time.perf_counter() - t0, 1200.0,
           "descending scan: D_KY <= 1.1 for b >= 0.35, >= 2.5 for b <= 0.03",
           f"D(b>=0.35)={[round(r.d_ky, 3) for r in high]}, "
           f"D(b<=0.03)={[round(r.d_ky, 3) for r in low]}")


def test_09_zero_damping_speed():
    t0 = time.perf_counter()
    v, sin2 = streamed_speed_stats((2.0, 1.0, 0.5), t_end=50000.0)
    dev_v = abs(v / math.sqrt(1.5) - 1.0)
    dev_s = np.max(np.abs(sin2 / 0.5 - 1.0))
    ok = dev_v <= 0.02 and dev_s <= 0.02
    report(9, ok, time.perf_counter() - t0, 120.0,
           "b=0 RMS speed = sqrt(3/2) +- 2%, sin^2 means = 1/2 +- 2%",
           f"speed dev {dev_v:.2%}, worst sin^2 dev {dev_s:.2%}")


def test_10_lattice_spectrum():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (0, 1):
        for m in (0, 1):
            for k in (0, 1):
                p = LatticePoint(n, m, k)
                tri = lattice_eigenvalues(p)
                ours = np.sort_complex(np.array(tri.as_complex()))
                ref = np.sort_complex(sorted_eigs(lattice_jacobian(n, m, k)))
                worst = max(worst, float(np.max(np.abs(ours - ref))))
    even = lattice_eigenvalues(LatticePoint(0, 0, 0))
    odd = lattice_eigenvalues(LatticePoint(1, 0, 0))
    exact = (even.lambda0 == 1.0 and even.pair_re == -0.5
             and even.pair_im == math.sqrt(3.0) / 2.0
             and odd.lambda0 == -1.0 and odd.pair_re == 0.5)
    report(10, worst <= 1e-12 and exact, time.perf_counter() - t0, 1.0,
           "lattice eigenvalues {1, -1/2 +- sqrt(3)/2 i} and mirror, exact",
           f"max dev vs oracle {worst:.2e}")


def test_11_symmetry_commutation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260814)
    cfg = IntegratorConfig(step_h=0.01, t_end=100.0, transient_skip=0.0)
    worst_perm = 0.0
    worst_refl = 0.0
    worst_field = 0.0
    for _ in range(20):
        s0 = rng.uniform(-3.0, 3.0, size=3)
        b = rng.uniform(0.05, 1.5)
        worst_field = max(
            worst_field,
            float(np.max(np.abs(field(cyclic_permute(s0), b)
                                - cyclic_permute(field(s0, b))))),
            float(np.max(np.abs(field(reflect(s0), b)
                                - reflect(field(s0, b))))))
        base = integrate(s0, b, cfg).states
        perm = integrate(cyclic_permute(s0), b, cfg).states
        refl = integrate(reflect(s0), b, cfg).states
        worst_perm = max(worst_perm,
                         float(np.max(np.abs(perm - base[:, [1, 2, 0]]))))
        worst_refl = max(worst_refl, float(np.max(np.abs(refl + base))))
    ok = max(worst_perm, worst_refl, worst_field) <= 1e-12
    report(11, ok, time.perf_counter() - t0, 10.0,
           "integration commutes with cyclic shift and reflection, 20 draws",
           f"perm {worst_perm:.1e}, refl {worst_refl:.1e}, "
           f"field {worst_field:.1e}")


def _cardinality(values, gap=1e-4):
    if values.size == 0:
        return 0
    v = np.sort(values)
    return 1 + int(np.count_nonzero(np.diff(v) > gap))


def test_12_section_residual_and_periodic_window():
    t0 = time.perf_counter()
    sec_cfg = IntegratorConfig(step_h=0.01, t_end=2000.0,
                               transient_skip=500.0)
    worst_res = 0.0
    for b in (0.19, 0.1198):
        for h in poincare_section((0.1, 0.2, 0.3), b, sec_cfg):
            res = abs(math.sin(h.state[0]) - b * h.state[2])
            worst_res = max(worst_res, res)
    sweep_cfg = IntegratorConfig(step_h=0.01, t_end=4000.0,
                                 transient_skip=1000.0)
    rows = bifurcation_sweep(0.09, 0.14, n_b=101, cfg=sweep_cfg,
                             max_hits=200, direction=Direction.UP)
    in_window = [_cardinality(r.values) for r in rows
                 if abs(r.b - 0.1198) <= 0.002 and r.error is None]
    outside = [_cardinality(r.values) for r in rows
               if abs(r.b - 0.1198) > 0.002 and r.error is None]
    ok = (worst_res <= 1e-9
          and len(in_window) >= 1
          and min(in_window) * 10 <= max(outside))
    report(12, ok, time.perf_counter() - t0, 900.0,
           "hit residuals <= 1e-9; >= 10x cardinality drop near b=0.1198",
           f"worst residual {worst_res:.1e}, window min {min(in_window)}, "
           f"outside max {max(outside)}")
