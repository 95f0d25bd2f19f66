"""Acceptance suite: one test (and one printed pass/fail line) per criterion.

Run with -s (or read the captured output) for the per-criterion lines.
Criterion 5 documents a known red clause: the acausal probability has its
early peak at t ~ 0.75, so it is not monotone over the whole sampled tail
[0.5, 2]; the test states the measured curve rather than hiding it.
"""

import json

import numpy as np
import pytest

from relbohm import dirac, modes, nearnr, packets
from relbohm.cli import main
from relbohm.numerics import Grid2D
from relbohm.ode import integrate_trajectory


def _line(n, ok, msg):
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} - {msg}")


@pytest.fixture(scope="session")
def explode_dir(tmp_path_factory):
    """Full-resolution explode run on the bundled cos2 config."""
    out = tmp_path_factory.mktemp("explode_full")
    rc = main(["explode", "--config", "cos2.json", "--out", str(out)])
    assert rc == 0
    return out


@pytest.fixture(scope="session")
def thresholds(explode_dir):
    return json.loads((explode_dir / "thresholds.json").read_text())


def test_criterion_01_thresholds(thresholds):
    x_th, x0 = thresholds["x_th"], thresholds["x_0"]
    ok_a1 = abs(x_th - 0.57) <= 0.02 and abs(x0 - 0.72) <= 0.02
    # the alternative half-width reading a = 2 rescales both crossings by
    # 2 and cannot reproduce the quoted values; a = 1 is the winner
    alt = packets.Packet(packets.PacketSpec(shape="cos2", a=2.0),
                        k_cut=20.0, gl_order=8, x_scale=8.0)
    x_th2, x02 = packets.zero_crossings(alt)
    ok_a2 = abs(x_th2 - 0.57) <= 0.02 and abs(x02 - 0.72) <= 0.02
    ok = (ok_a1 or ok_a2) and thresholds["a"] == 1.0
    _line(1, ok, f"a=1: x_th={x_th:.4f}, x_0={x0:.4f} (target 0.57/0.72); "
                 f"a=2 gives {x_th2:.3f}/{x02:.3f} (rejected)")
    assert ok_a1, "a = 1 must reproduce the documented crossings"
    assert not ok_a2


def test_criterion_02_charge_balance(thresholds):
    q_in = thresholds["charge_inside"]
    q_tail = thresholds["charge_tail"]
    q_nw = thresholds["charge_nw_inside"]
    ok = (abs(q_tail) < 1e-4 * abs(q_in)
          and abs(q_in - 1.0) < 1e-3 and abs(q_nw - 1.0) < 1e-3)
    _line(2, ok, f"q_in={q_in:.6f}, q_tail={q_tail:.2e}, q_nw={q_nw:.6f}")
    assert abs(q_tail) < 1e-4 * abs(q_in)
    assert q_in == pytest.approx(1.0, abs=1e-3)
    assert q_nw == pytest.approx(1.0, abs=1e-3)


def test_criterion_03_integral_of_motion():
    rng = np.random.default_rng(2024)
    worst_df, worst_re = 0.0, 0.0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        k = rng.uniform(-2.0, 2.0, n)
        while np.unique(k).size != n:
            k = rng.uniform(-2.0, 2.0, n)
        phi = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        state = modes.ModeSet(k=k, phi=phi)
        re, im = modes.double_sum_parts(state, rng.uniform(-1, 1),
                                        rng.uniform(0, 1))
        worst_re = max(worst_re, abs(re) / (abs(im) + 1e-300))
        done = False
        for z0 in np.linspace(-1.0, 1.0, 9):
            if modes.velocity_discrete(state, z0, 0.0) is None:
                continue
            ts, zs = integrate_trajectory(
                lambda z, t: modes.velocity_discrete(state, z, t),
                z0=z0, t0=0.0, t1=1.0, dt=0.002)
            if ts[-1] < 1.0 - 1e-12:
                continue            # halted at a divergence flag; retry
            window = ts[-1] - ts[0] + abs(zs[-1] - zs[0])
            df = abs(modes.integral_F(state, zs[-1], ts[-1])
                     - modes.integral_F(state, z0, 0.0))
            worst_df = max(worst_df, df / max(window, 1.0))
            done = True
            break
        assert done, "no divergence-free trajectory found for a state"
    ok = worst_df < 1e-8 and worst_re < 1e-12 + 1e-14
    _line(3, ok, f"max |dF|/window = {worst_df:.2e} (< 1e-8), "
                 f"max Re/Im = {worst_re:.2e} (< 1e-12)")
    assert worst_df < 1e-8
    assert worst_re < 1e-12 + 1e-14


def test_criterion_04_pair_creation():
    grid = Grid2D(-0.005, 0.005, 161, 0.0, 0.01, 161)
    fig1 = modes.trajectories(modes.fig1_modeset(), grid, 30)
    mild_grid = Grid2D(-2.0, 2.0, 101, 0.0, 2.0, 101)
    mild = modes.trajectories(modes.ModeSet(k=[0.0, 0.1], phi=[1.0, 1.0]),
                              mild_grid, 20)
    ok = fig1.n_pair_events >= 1 and mild.n_pair_events == 0
    _line(4, ok, f"three-mode pair events = {fig1.n_pair_events} (>= 1), "
                 f"two-mode = {mild.n_pair_events} (== 0)")
    assert fig1.n_pair_events >= 1
    assert mild.n_pair_events == 0


def test_criterion_05_acausality(thresholds):
    p = {float(t): v for t, v in thresholds["acausal"].items()}
    ts = sorted(p)
    positives = all(p[t] > 0 for t in ts if 0 < t <= 2)
    small0 = p[0.0] < 1e-6
    tail = [t for t in ts if 0.5 <= t <= 2]
    decreasing = all(p[a] > p[b] for a, b in zip(tail, tail[1:]))
    ok = positives and small0 and decreasing
    curve = ", ".join(f"P({t:g})={p[t]:.3e}" for t in tail)
    _line(5, ok, f"P(0)={p[0.0]:.1e} (<1e-6): {small0}; P>0 on (0,2]: "
                 f"{positives}; decreasing on [0.5,2]: {decreasing} [{curve}]"
                 + ("" if decreasing else
                    " -- measured curve peaks at t~0.75, so the stated "
                    "monotone-tail clause is unattainable for this packet"))
    assert small0
    assert positives
    # known red: the probability peaks at t ~ 0.75 (verified against an
    # independent brute-force quadrature oracle), so monotonicity from
    # t = 0.5 fails while the decrease after the peak holds.
    assert decreasing, "P(t) is not monotone from t = 0.5 (peak at ~0.75)"


def test_criterion_06_exact_identity_and_moments():
    gauss = packets.Packet(packets.PacketSpec(
        shape="gaussian", k0=0.1, sigma_k=0.05, total_charge=1.0))
    cos2 = packets.Packet(packets.PacketSpec(shape="cos2", a=1.0),
                          k_cut=40.0, gl_order=8, x_scale=4.0)
    xg = np.linspace(-15.0, 15.0, 31)
    kern_g = nearnr.WKernel(gauss)
    res_g = np.max(np.abs(
        nearnr._d2w_dx2(gauss, xg, 0.3, kernel=kern_g, h=1e-2)
        - (gauss.rho(xg, 0.3) - gauss.rho_nw(xg, 0.3))))
    xc = np.linspace(-2.0, 2.0, 21)
    kern_c = nearnr.WKernel(cos2)
    res_c = np.max(np.abs(
        nearnr._d2w_dx2(cos2, xc, 0.0, kernel=kern_c)
        - (cos2.rho(xc, 0.0) - cos2.rho_nw(xc, 0.0))))
    m = [nearnr.moments(p, 0.0) for p in (gauss, cos2)]
    mom = max(abs(v) for pair in m for v in pair)
    ok = res_g < 1e-9 and res_c < 1e-8 and mom < 1e-6
    _line(6, ok, f"identity residual gauss={res_g:.2e}, cos2={res_c:.2e}; "
                 f"max |moment| = {mom:.2e} (< 1e-6)")
    assert res_g < 1e-9
    assert res_c < 1e-8
    assert mom < 1e-6


def test_criterion_07_near_nr_chain():
    gauss = packets.Packet(packets.PacketSpec(
        shape="gaussian", k0=0.1, sigma_k=0.05, total_charge=1.0))
    x = np.linspace(-10.0, 10.0, 41)
    lhs, _, r27b = nearnr.density_difference_timeform(gauss, x, 0.3)
    mask = np.abs(lhs) > 0.1 * np.max(np.abs(lhs))
    rel = float(np.max(np.abs((lhs - r27b)[mask] / lhs[mask])))
    raw, mapped = nearnr.pushforward_l1(gauss, 0.0)
    improvement = raw / mapped
    ok = rel < 0.10 and improvement >= 5.0
    _line(7, ok, f"timeform relative error = {rel:.3f} (< 0.10), "
                 f"pushforward improvement = {improvement:.1f}x (>= 5)")
    assert rel < 0.10
    assert improvement >= 5.0


def test_criterion_08_spinor_identities():
    field = dirac.DiracField.random(3, seed=7)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1.0, 1.0, (12, 4))
    m1, _ = dirac.verify_mass_identity(field, pts, h=2e-3)
    m2, _ = dirac.verify_mass_identity(field, pts, h=1e-3)
    e1, _ = dirac.verify_eom(field, pts[:8], h=2e-3)
    e2, _ = dirac.verify_eom(field, pts[:8], h=1e-3)
    ratios_ok = 3.0 < m1 / m2 < 5.0 and 3.0 < e1 / e2 < 5.0
    resid_ok = m2 < 1e-5 and e2 < 1e-5

    fw = dirac.fw_hedgehog_field()
    fpts = rng.uniform(-1.5, 1.5, (10, 3))
    bil, _ = dirac.verify_fw_spin_tensor(fw, fpts)
    s = dirac.eval_spinor(field, pts[0])
    T = dirac.spin_tensor(s)
    T2 = dirac.spin_tensor(dirac.gauge_transform(s, 0.8 - 0.6j,
                                                 np.zeros(4)))
    gauge = float(np.max(np.abs(T2 - T)))
    c1, _ = dirac.verify_curl_formula(fw, fpts, h=2e-4)
    c2, _ = dirac.verify_curl_formula(fw, fpts, h=1e-4)
    bal = dirac.verify_ensemble_balance(dirac.fw_rotating_field(),
                                        box_half=7.0)
    fw_ok = bil < 1e-10 and gauge < 1e-10 and c2 < c1 and bal < 1e-4
    ok = ratios_ok and resid_ok and fw_ok
    _line(8, ok, f"mass ratio {m1 / m2:.2f}, eom ratio {e1 / e2:.2f} "
                 f"(in [3,5]); residuals {m2:.1e}/{e2:.1e} (< 1e-5); "
                 f"bilinears {bil:.1e}, gauge {gauge:.1e} (< 1e-10); "
                 f"curl O(h^2); balance {bal:.1e} (< 1e-4)")
    assert ratios_ok
    assert resid_ok
    assert fw_ok


def test_criterion_09_lambert_local_model(thresholds):
    lam = thresholds["lambert"]
    ok = (lam is not None and lam["within_one_cell"]
          and lam["max_contour_distance"] is not None)
    _line(9, ok, "no annihilation vertex found" if lam is None else
          f"contour distance {lam['max_contour_distance']:.4f} <= cell "
          f"diagonal {lam['grid_cell_diagonal']:.4f}: "
          f"{lam['within_one_cell']}")
    assert lam is not None
    assert lam["within_one_cell"]


def test_criterion_10_determinism(tmp_path):
    runs = [("modes", "two_mode.json",
             ["f_grid.csv", "trajectories.csv", "summary.json"]),
            ("explode", "cos2.json",
             ["thresholds.json", "fronts.csv", "acausal.csv"]),
            ("nearnr", "gauss.json", ["correction.csv", "summary.json"]),
            ("spin", "dirac3.json", ["report.json"])]
    identical = True
    for cmd, cfg, files in runs:
        outs = []
        for n in ("1", "8"):
            out = tmp_path / f"{cmd}_{n}"
            assert main([cmd, "--config", cfg, "--out", str(out),
                         "--quick", "--threads", n]) == 0
            outs.append(out)
        for f in files:
            if (outs[0] / f).read_bytes() != (outs[1] / f).read_bytes():
                identical = False
    _line(10, identical,
          "quick runs of all four subcommands byte-identical for "
          "--threads 1 vs 8" if identical else "outputs differ")
    assert identical
