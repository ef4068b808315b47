import numpy as np
import pytest
from scipy.integrate import quad

from ssvortex.modes import KernelK1, LogGrid, ModeFunction, lq_norm
from ssvortex.params import VortexParams
from ssvortex.resolvent import (
    KernelK2,
    SolveConfig,
    SpectralPoint,
    apply_phi2,
    contraction_bound,
    k2_eval,
    ode_residual,
    resolvent_bound_check,
    solve_k0,
    solve_mode,
    verify_kernel_composition,
    verify_neat_identities,
)

P = VortexParams(alpha=0.5, beta=1.0, m=2, q=2.0)  # a0 = -1


def cquad(f, a, b, **kw):
    re = quad(lambda s: f(s).real, a, b, limit=400, **kw)[0]
    im = quad(lambda s: f(s).imag, a, b, limit=400, **kw)[0]
    return re + 1j * im


def gaussian(grid, k=1, rep="G"):
    return ModeFunction(k, rep, grid, np.exp(-grid.nodes**2))


def test_spectral_point():
    z = SpectralPoint.from_complex(0.25 - 1.5j)
    assert z.lambda1 == 0.25 and z.lambda2 == -1.5
    assert z.value == 0.25 - 1.5j


def test_kernel_k2_domain():
    KernelK2(P, 1, -0.9)  # just right of a0 = -1
    with pytest.raises(ValueError):
        KernelK2(P, 1, -1.0)  # on the line
    with pytest.raises(ValueError):
        KernelK2(P, 1, -1.5)


def test_k2_eval_values():
    ker = KernelK2(P, 1, 0.0)
    assert k2_eval(0.3, 0.3, ker) == 0.0
    # beta = 0: pure exponential
    p0 = VortexParams(alpha=0.5, beta=0.0, m=2, q=2.0)
    ker0 = KernelK2(p0, 1, 0.0)
    assert k2_eval(-1.0, 0.0, ker0) == pytest.approx(np.exp(-0.5), rel=1e-14)
    # modulus only sees Re B
    assert abs(k2_eval(-1.0, 0.0, ker)) == pytest.approx(np.exp(-0.5), rel=1e-12)


def test_phi2_closed_form_beta_zero():
    p0 = VortexParams(alpha=0.5, beta=0.0, m=2, q=2.0)
    g = LogGrid(-20.0, 20.0, 8001)
    s = ((g.nodes > 0) & (g.nodes < 1)).astype(complex)
    s[np.isclose(g.nodes, 0.0)] = 0.5
    s[np.isclose(g.nodes, 1.0)] = 0.5
    G = ModeFunction(1, "G", g, s)
    out = apply_phi2(G, KernelK2(p0, 1, 0.0))  # B = 0.5
    sel = g.nodes < -0.5
    expect = np.exp(0.5 * g.nodes[sel]) * (1 - np.exp(-0.5)) / 0.5
    np.testing.assert_allclose(out.samples[sel].real, expect, atol=5e-6)


def test_phi2_zero_and_oracle():
    g = LogGrid(-10.0, 10.0, 8001)
    z = ModeFunction(1, "G", g, np.zeros(g.n))
    ker = KernelK2(P, 1, 0.5)
    assert np.all(apply_phi2(z, ker).samples == 0)
    # independent oscillatory quadrature oracle at a few nodes
    G = gaussian(g)
    out = apply_phi2(G, ker)
    B = ker.B
    for t0 in (-1.0, 0.0, 1.5):
        i = int(np.argmin(np.abs(g.nodes - t0)))
        ti = g.nodes[i]
        oracle = cquad(
            lambda s: np.exp(-2j * np.exp(-0.5 * ti) + 2j * np.exp(-0.5 * s)
                             + (ti - s) * B - s**2), ti, 20.0)
        assert out.samples[i] == pytest.approx(oracle, rel=2e-5)


def test_phi2_young_bound_randomized():
    g = LogGrid(-30.0, 30.0, 4001)
    ker = KernelK2(P, 1, 0.0)  # Re B = 0.5, bound = 2
    rng = np.random.default_rng(5)
    for _ in range(200):
        fn = ModeFunction(1, "G", g, rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n))
        ratio = lq_norm(apply_phi2(fn, ker), 2.0) / lq_norm(fn, 2.0)
        assert ratio <= 2.0 * (1 + 1e-6)


def test_phi2_pointwise_majorant():
    from ssvortex.resolvent import _scan_backward
    g = LogGrid(-15.0, 15.0, 2001)
    rng = np.random.default_rng(6)
    fn = ModeFunction(1, "G", g, rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n))
    ker = KernelK2(P, 1, 0.25 + 0.7j)
    lhs = np.abs(apply_phi2(fn, ker).samples)
    rhs = _scan_backward(np.abs(fn.samples).astype(complex), g, P.alpha,
                         complex(ker.B.real), 0.0).real
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-14)


def test_solve_k0_closed_form():
    g = LogGrid(-20.0, 20.0, 16001)
    s = ((g.nodes > 0) & (g.nodes < 1)).astype(complex)
    s[np.isclose(g.nodes, 0.0)] = 0.5
    s[np.isclose(g.nodes, 1.0)] = 0.5
    G = ModeFunction(0, "G", g, s)
    sol = solve_k0(G, 0.0, P, SolveConfig(compute_residual=False))
    sel = g.nodes < -0.5
    expect = -np.exp(0.5 * g.nodes[sel]) * (1 - np.exp(-0.5))
    np.testing.assert_allclose(sol.U.samples[sel].real, expect, atol=5e-6)
    assert sol.c2 == 0 and sol.c3 == 0 and sol.psi is None


def test_solve_k0_zero_rhs_and_residual():
    g = LogGrid(-25.0, 25.0, 2**15 + 1)
    z = ModeFunction(0, "G", g, np.zeros(g.n))
    assert np.all(solve_k0(z, 0.5, P).U.samples == 0)
    sol = solve_k0(gaussian(g, k=0), -0.5, P)
    assert sol.residual < 1e-7
    # Young bound ||U|| <= alpha ||G|| / Re B, here alpha/ReB = 1
    rng = np.random.default_rng(7)
    for _ in range(20):
        G = ModeFunction(0, "G", g, rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n))
        sol = solve_k0(G, 0.0, P, SolveConfig(compute_residual=False))
        assert lq_norm(sol.U, 2.0) <= lq_norm(G, 2.0) * (1 + 1e-6)
    with pytest.raises(ValueError):
        solve_k0(z, -1.0, P)


def test_contraction_bound_value():
    assert contraction_bound(P, 1) == pytest.approx(0.375)
    assert contraction_bound(P, 0) == 0.0


def test_solve_mode_zero_rhs():
    g = LogGrid(-15.0, 15.0, 1025)
    z = ModeFunction(1, "G", g, np.zeros(g.n))
    sol = solve_mode(z, 0.5, 1, P, SolveConfig(compute_residual=False))
    assert np.all(sol.U.samples == 0)
    assert sol.c1 == 0 and sol.c2 == 0 and sol.c3 == 0


def test_solve_mode_requires_k_positive_and_lambda_right_of_a0():
    g = LogGrid(-5.0, 5.0, 65)
    G = gaussian(g)
    with pytest.raises(ValueError):
        solve_mode(G, 0.5, 0, P)
    with pytest.raises(ValueError):
        solve_mode(G, -1.2, 1, P)


def test_solve_mode_residual_and_bound():
    g = LogGrid(-25.0, 25.0, 2**16 + 1)
    G = gaussian(g)
    gamma = contraction_bound(P, 1)
    sol = solve_mode(G, -0.5, 1, P)
    assert sol.residual < 1e-6
    bound = (P.alpha / (2 / P.q + P.alpha * (-0.5 - 1))) / (1 - gamma)
    assert lq_norm(sol.U, P.q) <= bound * lq_norm(G, P.q)
    assert sol.method == "picard"
    assert sol.iterations <= int(np.ceil(np.log(1e-10) / np.log(gamma))) + 1


def test_solve_mode_unique_fixed_point():
    g = LogGrid(-20.0, 20.0, 4097)
    G = gaussian(g)
    tol = 1e-10
    a = solve_mode(G, 0.5, 1, P, SolveConfig(tol=tol, compute_residual=False))
    rng = np.random.default_rng(8)
    other = rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n)
    b = solve_mode(G, 0.5, 1, P, SolveConfig(tol=tol, compute_residual=False, initial=other))
    diff = lq_norm(a.U.with_samples(a.U.samples - b.U.samples), P.q) / lq_norm(a.U, P.q)
    assert diff < 10 * tol


def test_solve_mode_dense_matches_picard():
    g = LogGrid(-18.0, 18.0, 2049)
    G = gaussian(g)
    a = solve_mode(G, 0.5, 1, P, SolveConfig(compute_residual=False))
    b = solve_mode(G, 0.5, 1, P, SolveConfig(compute_residual=False, method="dense"))
    np.testing.assert_allclose(b.U.samples, a.U.samples, atol=1e-9 * np.abs(a.U.samples).max())


def test_solve_mode_reduced_map_leaves_ode_defect():
    # the K1-shortcut map converges fast but its fixed point does not satisfy
    # the mode ODE: the defect is the dropped phase-correction term, O(0.1)
    g = LogGrid(-25.0, 25.0, 2**15 + 1)
    G = gaussian(g)
    full = solve_mode(G, -0.5, 1, P)
    red = solve_mode(G, -0.5, 1, P, SolveConfig(map_kind="reduced"))
    assert full.residual < 1e-6
    assert red.residual > 1e-2


def test_solve_mode_beta_zero_reduces_to_phi2():
    p0 = VortexParams(alpha=0.5, beta=0.0, m=2, q=2.0)
    g = LogGrid(-15.0, 15.0, 2049)
    G = gaussian(g)
    sol = solve_mode(G, 0.5, 1, p0, SolveConfig(compute_residual=False))
    expect = -p0.alpha * apply_phi2(G, KernelK2(p0, 1, 0.5)).samples
    np.testing.assert_allclose(sol.U.samples, expect, rtol=0, atol=1e-12)


def test_neat_identity_report_oracle_values():
    # frozen oracle: at (k=1, beta=1, alpha=0.5, mu=1, t=0) the true integral is
    # 2*int_0^1 e^{2iw} w^2 dw = e^{2i}(1 - i/2) - i/2, while the shortcut claims
    # -i e^{2i}; their distance is 0.89374...
    rep = verify_neat_identities([0.0], [1.0], P, 1)
    assert not rep["skipped"]
    row = [r for r in rep["rows"] if r["identity"] == "half_line"][0]
    lhs_exact = np.exp(2j) * (1 - 0.5j) - 0.5j
    rhs_claim = -1j * np.exp(2j)
    assert row["lhs"] == pytest.approx(lhs_exact, abs=1e-9)
    assert row["rhs"] == pytest.approx(rhs_claim, abs=1e-14)
    assert row["abs_error"] == pytest.approx(abs(lhs_exact - rhs_claim), abs=1e-8)


def test_neat_identity_finite_interval_empty():
    rep = verify_neat_identities([0.5], [1.0], P, 1)
    # single t-sample: no (t, r) pairs, so no finite-interval rows
    assert all(r["identity"] == "half_line" for r in rep["rows"])


def test_neat_identity_skipped_for_beta_zero():
    p0 = VortexParams(alpha=0.5, beta=0.0, m=2, q=2.0)
    rep = verify_neat_identities([0.0], [1.0], p0, 1)
    assert rep["skipped"]


def test_quadrature_self_convergence():
    # composite Simpson approximations of the tail integral converge to the
    # adaptive-quadrature value at order >= 2
    from ssvortex.resolvent import _tail_integral
    t, mu, alpha, c = 0.0, 1.0, 0.5, 2.0
    ref = _tail_integral(t, mu, alpha, c)
    W = np.exp(-alpha * t)

    def simpson(n):
        w = np.linspace(0.0, W, n + 1)
        f = np.exp(1j * c * w) * w ** (mu / alpha)
        wts = np.ones(n + 1); wts[1:-1:2] = 4; wts[2:-1:2] = 2
        return (W / n / 3) * np.sum(wts * f) / alpha

    e1 = abs(simpson(16) - ref)
    e2 = abs(simpson(32) - ref)
    order = np.log2(e1 / e2)
    assert order >= 2.0


def test_composition_report_values():
    # w-substituted evaluation cross-checked against direct oscillatory quadrature
    lam = 0.5
    rep = verify_kernel_composition([1.0, -1.0], [-1.0, 1.0], P, 1, lam)
    ker = KernelK2(P, 1, lam)
    k1 = KernelK1(1, P.q, 2)

    def direct(t, r):
        def integrand(s):
            d = s - r
            k1v = np.exp(-k1.A_plus * d) if d >= 0 else np.exp(k1.A_minus * d)
            return k2_eval(t, s, ker) * np.exp(-P.alpha * s) * k1v
        return 2j * P.alpha * cquad(integrand, t, 60.0)

    for row in rep["rows"]:
        t, r = row["t"], row["r"]
        assert row["lhs"] == pytest.approx(direct(t, r), rel=1e-6, abs=1e-9)
        expect_k1 = np.exp(-3 * (t - r)) if t >= r else np.exp(1 * (t - r))
        assert row["k1"] == pytest.approx(expect_k1, rel=1e-12)
    # the collapse misses K1 by a sizable amount at these parameters
    assert rep["max_error"] > 1e-2


def test_composition_requires_beta_and_k():
    p0 = VortexParams(alpha=0.5, beta=0.0, m=2, q=2.0)
    assert verify_kernel_composition([0.0], [0.0], p0, 1, 0.5)["skipped"]
    with pytest.raises(ValueError):
        verify_kernel_composition([0.0], [0.0], P, 0, 0.5)


def test_resolvent_bound_check_report():
    rep = resolvent_bound_check([-0.5, 0.0], P, 1,
                                grid=LogGrid(-20.0, 20.0, 2049), batch=4, seed=0)
    assert rep["passed"]
    assert np.isfinite(rep["M_empirical"]) and rep["M_empirical"] > 0
    ks = {r["k"] for r in rep["rows"]}
    assert ks == {0, 1}


def test_resolvent_ratio_decays_like_inverse_lambda():
    # along the real axis the ratio falls off like 1/lambda1 (slope -1 on log-log)
    g = LogGrid(-20.0, 20.0, 2049)
    G = gaussian(g)
    lams = np.array([10.0, 20.0, 40.0, 80.0])
    ratios = []
    for lam in lams:
        sol = solve_mode(G, lam, 1, P, SolveConfig(compute_residual=False))
        ratios.append(lq_norm(sol.U, P.q) / lq_norm(G, P.q))
    slope = np.polyfit(np.log(lams), np.log(ratios), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_ode_residual_zone_reporting():
    g = LogGrid(-25.0, 25.0, 2**14 + 1)
    G = gaussian(g)
    sol = solve_mode(G, -0.5, 1, P)
    frac, tmin = sol.residual_zone
    assert 0.0 < frac <= 1.0
    assert tmin > g.t_min


def test_iteration_budget_exhaustion_raises_with_history():
    from ssvortex.resolvent import ConvergenceError
    g = LogGrid(-15.0, 15.0, 1025)
    G = gaussian(g)
    with pytest.raises(ConvergenceError) as exc:
        solve_mode(G, -0.5, 1, P, SolveConfig(method="picard", max_iter=2,
                                              compute_residual=False))
    assert len(exc.value.history) == 2
    assert exc.value.gamma == pytest.approx(contraction_bound(P, 1))


def test_auto_method_falls_back_to_krylov():
    g = LogGrid(-20.0, 20.0, 2**13 + 1)
    G = gaussian(g)
    ref = solve_mode(G, -0.5, 1, P, SolveConfig(compute_residual=False))
    sol = solve_mode(G, -0.5, 1, P, SolveConfig(method="auto", max_iter=2))
    assert sol.method == "krylov"
    assert sol.residual < 1e-5
    np.testing.assert_allclose(sol.U.samples, ref.U.samples, atol=1e-8 * np.abs(ref.U.samples).max())
