"""Named invariant suite behind the `validate` CLI command.

Each check returns (name, passed, detail).  The CLI prints one line per
check and exits nonzero if any fail; the quick mode shrinks trial counts
but runs the same invariants.
"""

from __future__ import annotations

import math

import numpy as np

from . import analysis, mcsim, specfun
from .schemes import NetworkParams, SchemeSpec, gamma_params, registry_code

_REGISTRY_NAMES = ("alamouti", "g4_rate34", "g3_rate34", "d4_rate12", "cyclic4")


def _check_stirling_row_sums():
    for n in range(13):
        unsigned = sum(abs(specfun.stirling_first_signed(n, k)) for k in range(n + 1))
        if unsigned != math.factorial(n):
            return False, f"sum |s({n},k)| != {n}!"
        for x in range(1, 6):
            total = 0
            for k in range(n + 1):
                falling = 1
                for j in range(k):
                    falling *= x - j
                total += specfun.stirling_second(n, k) * falling
            if total != x ** n:
                return False, f"sum S({n},k) x_(k) != x^n at x={x}"
    return True, "exact through n=12"


def _check_kummer_vs_series():
    worst = 0.0
    for a in range(0, -11, -1):
        for z in np.linspace(-20, 20, 9):
            b = 1.7
            exact = specfun.kummer_1f1_polynomial(a, b, float(z))
            term, acc = 1.0, 1.0
            for j in range(200):
                term *= (a + j) * z / ((b + j) * (j + 1))
                acc += term
            if abs(exact) > 1e-12 and abs(exact - acc) / abs(exact) > 1e-10:
                worst = max(worst, abs(exact - acc) / abs(exact))
    return worst <= 1e-10, f"worst rel dev {worst:.2e}"


def _check_gauss_2f1():
    worst = 0.0
    for z in np.linspace(-0.95, -0.05, 10):
        direct = specfun._hyp2f1_series(0.4, 1.0, 1.4, float(z))
        pfaff = specfun._hyp2f1_pfaff(0.4, 1.0, 1.4, float(z))
        worst = max(worst, abs(direct - pfaff) / abs(direct))
    ok = worst <= 1e-9
    ident = abs(specfun.gauss_2f1(0.5, 1.0, 1.5, -1.0) - math.pi / 4.0)
    return ok and ident < 1e-10, f"pfaff dev {worst:.2e}, arctan dev {ident:.2e}"


def _check_gamma_cdf_dkw(quick: bool):
    n = 10 ** 5 if quick else 10 ** 6
    rng = np.random.default_rng(123)
    draws = np.sort(rng.standard_gamma(2.5, n) * 1.3)
    grid = draws[:: max(1, n // 2000)]
    cdf = np.array([specfun.gamma_cdf(float(x), 2.5, 1.3) for x in grid])
    emp = np.searchsorted(draws, grid, side="right") / n
    band = math.sqrt(math.log(2.0 / 0.01) / (2.0 * n))
    dev = float(np.max(np.abs(cdf - emp)))
    return dev <= band, f"max dev {dev:.2e} vs band {band:.2e}"


def _check_code_registry():
    rng = np.random.default_rng(5)
    for name in _REGISTRY_NAMES:
        code = registry_code(name)  # construction re-runs the numeric checks
        n_i = {code.n_interf(k) for k in range(1, code.n_symbols + 1)}
        if len(n_i) != 1:
            return False, f"{name}: interference count varies with the symbol"
        h0 = (rng.standard_normal((code.M + 1, code.M))
              + 1j * rng.standard_normal((code.M + 1, code.M))) / math.sqrt(2)
        x = rng.standard_normal(code.n_symbols) + 1j * rng.standard_normal(code.n_symbols)
        clean = h0 @ code.codeword(x)
        frob2 = float(np.sum(np.abs(h0) ** 2))
        for k in range(1, code.n_symbols + 1):
            est = code.decode(h0, clean, k)
            if abs(est - frob2 * x[k - 1]) > 1e-11 * frob2 * max(1.0, abs(x[k - 1])):
                return False, f"{name}: decode identity violated at k={k}"
    return True, f"{len(_REGISTRY_NAMES)} codes"


def _check_outage_reductions():
    net = NetworkParams(intensity=0.02, p=0.7, alpha=3.1, r_tr=2.0, rho=300.0, beta=2.0)
    glp = gamma_params(SchemeSpec.sm_zf(4, 4), net)
    q = analysis.OutageQuery(glp, net)
    a = analysis.outage_cdf(q)
    b = analysis.outage_cdf_simple(q)
    if abs(a - b) > 1e-12:
        return False, f"m=1 reduction off by {abs(a - b):.2e}"
    for spec in (SchemeSpec.sm_mrc(2, 4), SchemeSpec.sm_zf(2, 4)):
        glp = gamma_params(spec, net)
        zero = net.replace(intensity=0.0)
        f_zero = analysis.outage_cdf(analysis.OutageQuery(glp, zero))
        f_su = analysis.single_user_outage(glp, net.beta)
        if abs(f_zero - f_su) > 1e-12:
            return False, f"{spec.label()}: no-interference limit off by {abs(f_zero - f_su):.2e}"
    return True, "reductions at 1e-12"


def _check_outage_monotone(quick: bool):
    rng = np.random.default_rng(99)
    n_draws = 150 if quick else 600
    for _ in range(n_draws):
        m_tx = int(rng.integers(1, 5))
        n_rx = int(rng.integers(m_tx, 5))
        variant = rng.choice(["sm-mrc", "sm-zf"])
        spec = SchemeSpec(variant, m_tx, n_rx)
        net = NetworkParams(
            intensity=float(10 ** rng.uniform(-4, -0.5)),
            p=float(rng.uniform(0.1, 1.0)),
            alpha=float(rng.uniform(2.2, 5.5)),
            r_tr=float(rng.uniform(0.5, 6.0)),
            rho=float(10 ** rng.uniform(0, 3)),
            beta=float(10 ** rng.uniform(-2, 1)),
        )
        glp = gamma_params(spec, net)
        f0 = analysis.outage_cdf(analysis.OutageQuery(glp, net))
        f_beta = analysis.outage_cdf(analysis.OutageQuery(glp, net.replace(beta=net.beta * 1.3)))
        f_lam = analysis.outage_cdf(
            analysis.OutageQuery(glp, net.replace(intensity=net.intensity * 1.3))
        )
        if f_beta < f0 - 1e-11 or f_lam < f0 - 1e-11:
            return False, f"monotonicity violated at {spec.label()} {net}"
    return True, f"{n_draws} random draws"


def _check_capacity_consistency():
    net = NetworkParams(intensity=1.0, p=1.0, alpha=3.4, r_tr=2.0, rho=10 ** 4.0, beta=1.6)
    for eps in (0.05, 0.2):
        for n_rx in (2, 4):
            glp = gamma_params(SchemeSpec.sm_zf(n_rx, n_rx), net)
            exact = analysis.tc_exact_zf_full(n_rx, eps, net)
            dens = analysis.invert_outage_for_density(glp, net.beta, eps, net.alpha)
            via_inv = glp.zeta * dens * (1.0 - eps)
            if abs(exact - via_inv) > 1e-9 * max(exact, 1e-30):
                return False, f"N={n_rx} eps={eps}: {exact} vs {via_inv}"
    return True, "exact capacity equals inverted-density capacity"


def _check_lambda_opt():
    net = NetworkParams(intensity=1e-3, p=1.0, alpha=3.1, r_tr=2.0, rho=10 ** 2.5, beta=2.0)
    n_rx = 4
    lam_opt = analysis.lambda_opt_zf(n_rx, net)
    spec = SchemeSpec.sm_zf(n_rx, n_rx)

    def objective(lam):
        return analysis.throughput(spec, net.replace(intensity=lam))

    best = max(np.geomspace(lam_opt / 10, lam_opt * 10, 401), key=objective)
    ok = abs(best - lam_opt) / lam_opt < 2e-2
    return ok, f"formula {lam_opt:.4g}, grid argmax {best:.4g}"


def _check_mc_against_analytic(quick: bool):
    trials = 4000 if quick else 20000
    net = NetworkParams(intensity=0.005, p=1.0, alpha=3.1, r_tr=2.0, rho=10 ** 2.5, beta=2.0)
    worst = 0.0
    for spec in (SchemeSpec.sm_mrc(2, 4), SchemeSpec.sm_zf(4, 4), SchemeSpec.sm_mrc(1, 3)):
        glp = gamma_params(spec, net)
        f = analysis.outage_cdf(analysis.OutageQuery(glp, net))
        est = mcsim.simulate_outage(
            spec, net, mcsim.SimConfig(trials=trials, seed=2024, truncation_tol=0.01)
        )
        z = abs(est.value - f) / max(est.std_error, 1e-12)
        worst = max(worst, z)
        if z > 3.5:
            return False, f"{spec.label()}: z = {z:.2f}"
    return True, f"worst z = {worst:.2f} over 3 schemes"


def _check_ostbc_mc(quick: bool):
    trials = 4000 if quick else 20000
    code = registry_code("g3_rate34")
    spec = SchemeSpec.ostbc(code, 3)
    net = NetworkParams(intensity=0.05, p=1.0, alpha=3.5, r_tr=5.0, rho=10.0, beta=10 ** -1.5)
    glp = gamma_params(spec, net)
    f = analysis.outage_cdf(analysis.OutageQuery(glp, net))
    est = mcsim.simulate_outage(
        spec, net, mcsim.SimConfig(trials=trials, seed=77, truncation_tol=0.05)
    )
    gap = abs(est.value - f)
    return gap <= 0.02, f"approximation gap {gap:.4f}"


def _check_ca_bound(quick: bool):
    trials = 3000 if quick else 10000
    net = NetworkParams(intensity=1.0, p=1.0, alpha=4.0, r_tr=1.5, rho=10.0, beta=10 ** 0.5)
    lam = 0.1
    r_star = analysis.ca_optimal_guard(lam, net)
    bound = analysis.ca_throughput_bound(lam, r_star, net)
    est = mcsim.simulate_ca(lam, r_star, net, mcsim.SimConfig(trials=trials, seed=31))
    ok = est.value <= bound + 3.0 * est.std_error
    return ok, f"sim {est.value:.5f} vs bound {bound:.5f}"


def _check_determinism():
    net = NetworkParams(intensity=0.01, p=1.0, alpha=3.5, r_tr=2.0, rho=100.0, beta=1.0)
    spec = SchemeSpec.sm_mrc(2, 3)
    cfg = mcsim.SimConfig(trials=2000, seed=404, truncation_tol=0.02)
    a = mcsim.simulate_outage(spec, net, cfg)
    b = mcsim.simulate_outage(spec, net, cfg)
    return a.value == b.value, f"{a.value} vs {b.value}"


def run_validation(quick: bool = False):
    """Run every invariant; returns a list of (name, passed, detail)."""
    checks = [
        ("stirling-row-sums", _check_stirling_row_sums),
        ("kummer-polynomial-vs-series", _check_kummer_vs_series),
        ("gauss-2f1-pfaff-and-identities", _check_gauss_2f1),
        ("gamma-cdf-dkw-band", lambda: _check_gamma_cdf_dkw(quick)),
        ("code-registry-orthogonality-decode", _check_code_registry),
        ("outage-closed-form-reductions", _check_outage_reductions),
        ("outage-monotonicity", lambda: _check_outage_monotone(quick)),
        ("capacity-inversion-consistency", _check_capacity_consistency),
        ("intensity-optimizer-argmax", _check_lambda_opt),
        ("mc-vs-analytic-outage", lambda: _check_mc_against_analytic(quick)),
        ("mc-vs-analytic-ostbc", lambda: _check_ostbc_mc(quick)),
        ("ca-bound-dominates-simulation", lambda: _check_ca_bound(quick)),
        ("seeded-determinism", _check_determinism),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
