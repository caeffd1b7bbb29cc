import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2torsion import globalformula as gf
from su2torsion import su2
from su2torsion.chain import build_chain_maps, pseudo_det
from su2torsion.errors import FitFailure, InputError, NoPathForTubeSampler
from su2torsion.presentation import builtin
from su2torsion.repvariety import RepresentationPoint, TrefoilPath
from su2torsion.torsion import ONE, PeripheralFunction

TREFOIL, PATH = builtin("trefoil"), TrefoilPath()
TOTAL = 4 * np.pi / 3
A_GEN = PeripheralFunction.parse("1:1:0,1:0:6")


# -- phi ---------------------------------------------------------------------------

def test_phi_vanishes_on_r():
    for t in (0.3, 1.2, 2.8):
        v = gf.phi(TREFOIL, PATH.images(t), 0.0)
        assert v.defined and v.value == pytest.approx(0, abs=1e-25)


def test_phi_undefined_sets():
    z = su2.exp_map(np.array([0.3, 0.2, 0.0]))
    assert not gf.phi(TREFOIL, np.array([su2.qpow(z, 3), su2.qpow(z, 2)]), 0.1).defined
    # x = i, y = 1 gives r = x^2 y^-3 = -1
    assert not gf.phi(TREFOIL, np.array([su2.QI, su2.IDENTITY]), 0.0).defined


def test_phi_t_term():
    t = 0.7
    v_norm = build_chain_maps(TREFOIL, RepresentationPoint(PATH.images(1.0), 0.0)).v_norm
    assert gf.phi(TREFOIL, PATH.images(1.0), t).value == pytest.approx(t * t / v_norm ** 2 / 4)


def test_hessian_formula_20_points(rng):
    k = TREFOIL.k
    for t in np.linspace(0.15, np.pi - 0.15, 20):
        images = su2.conjugate_by(su2.haar_sample(rng), PATH.images(t))
        hess = gf.phi_normal_hessian(TREFOIL, images)
        cm = build_chain_maps(TREFOIL, RepresentationPoint(images, 0.0))
        expected = pseudo_det(cm.delta2, 3 * k - 4) / cm.v_norm / 2 ** ((3 * k - 3) / 2)
        assert np.sqrt(np.linalg.det(hess)) == pytest.approx(expected, rel=1e-4)


# -- integrand ------------------------------------------------------------------------

@settings(max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_integrand_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    images = su2.haar_sample(rng, 2)
    a = su2.haar_sample(rng)
    params = su2.KernelParams(5.0)
    f = PeripheralFunction.parse("1:1:0,0.5:0:1,2:1:3")
    base = gf.integrand(TREFOIL, f, images, params, gf.KERNELS)
    moved = gf.integrand(TREFOIL, f, su2.conjugate_by(a, images), params, gf.KERNELS)
    assert np.allclose(moved, base, rtol=1e-10, atol=1e-10 * np.max(np.abs(base)))


def test_tube_jacobian_conjugation_block(rng):
    jac, x = gf.tube_jacobian(TREFOIL, PATH, np.array([1.0]), np.zeros((1, 2)))
    assert jac.shape == (1,) and jac[0] > 0
    assert np.allclose(x, PATH.images(1.0))


# -- estimators ------------------------------------------------------------------------

def test_input_validation():
    p = su2.KernelParams(100.0)
    with pytest.raises(InputError):
        gf.global_estimate(TREFOIL, ONE, p, "haar", n=999)
    with pytest.raises(NoPathForTubeSampler):
        gf.global_estimate(TREFOIL, ONE, p, "tube", n=1000)
    with pytest.raises(InputError):
        gf.global_estimate(TREFOIL, ONE, p, "grid", n=1000)
    with pytest.raises(InputError):
        gf.global_estimate(TREFOIL, ONE, p, "haar", n=1000, kernel="box")
    with pytest.raises(InputError):
        gf.lambda_sweep(TREFOIL, ONE, [100, 200], "haar", n=1000)
    with pytest.raises(InputError):
        gf.lambda_sweep(TREFOIL, ONE, [100, 300, 200], "haar", n=1000)


def test_estimate_reproducible_and_well_formed():
    p = su2.KernelParams(50.0)
    a = gf.global_estimate(TREFOIL, ONE, p, "tube", 4000, seed=3, path=PATH, workers=1)
    b = gf.global_estimate(TREFOIL, ONE, p, "tube", 4000, seed=3, path=PATH, workers=1)
    assert a == b
    assert np.isfinite(a.value) and a.std_error >= 0
    assert a.representation_value == pytest.approx(a.value * np.pi ** 2)


def test_parallel_workers_reproducible():
    p = su2.KernelParams(50.0)
    runs = [gf.global_estimate(TREFOIL, ONE, p, "haar", 6000, seed=9, workers=2) for _ in range(2)]
    assert runs[0] == runs[1]
    single = gf.global_estimate(TREFOIL, ONE, p, "haar", 6000, seed=9, workers=1)
    diff = abs(single.value - runs[0].value)
    assert diff < 5 * np.hypot(single.std_error, runs[0].std_error)


def test_std_error_scales_with_sqrt_n():
    p = su2.KernelParams(100.0)
    ratios = []
    for rep in range(10):
        small = gf.global_estimate(TREFOIL, ONE, p, "tube", 2000, seed=100 + rep, path=PATH, workers=1)
        large = gf.global_estimate(TREFOIL, ONE, p, "tube", 4000, seed=200 + rep, path=PATH, workers=1)
        ratios.append(small.std_error / large.std_error)
    assert np.mean(ratios) == pytest.approx(np.sqrt(2), rel=0.2)


def test_haar_and_tube_agree():
    p = su2.KernelParams(30.0)
    haar = gf.global_estimate(TREFOIL, ONE, p, "haar", 400000, seed=1, workers=1)
    tube = gf.global_estimate(TREFOIL, ONE, p, "tube", 100000, seed=2, path=PATH, workers=1)
    assert abs(haar.value - tube.value) <= 3 * np.hypot(haar.std_error, tube.std_error)


def test_a_ideal_generator_estimate_tends_to_zero():
    # the finite-lambda bias is deterministic, roughly 40/lambda, so check the decay instead
    lams = (1600.0, 6400.0, 25600.0)
    ests = [gf.global_estimate(TREFOIL, A_GEN, su2.KernelParams(lam), "tube", 100000,
                               seed=4, path=PATH, workers=1) for lam in lams]
    vals = np.array([e.value for e in ests])
    assert np.all(np.diff(vals) < 0)
    assert np.all(np.diff(vals * np.sqrt(lams)) < 0)
    assert vals[-1] <= 0.15 * vals[0]
    assert vals[-1] <= 3e-3 * TOTAL


def test_heat_and_parametrix_agree_at_lambda_1000():
    par, heat = gf.compare_kernels(TREFOIL, ONE, su2.KernelParams(1000.0), "tube", 200000,
                                   seed=0, path=PATH, workers=1)
    assert abs(par.value - heat.value) <= 3 * np.hypot(par.std_error, heat.std_error)
    assert par.value == pytest.approx(TOTAL, rel=0.02)


# -- extrapolation -----------------------------------------------------------------------

def test_fit_recovers_exact_model():
    lams = np.array([100.0, 200.0, 400.0, 800.0])
    a, se, b, residuals, chi2 = gf.fit_inverse_lambda(lams, 4.0 - 3.0 / lams, np.full(4, 0.01))
    assert a == pytest.approx(4.0) and b == pytest.approx(-3.0)
    assert np.allclose(residuals, 0, atol=1e-12) and chi2 < 1e-20
    assert se > 0


def test_fit_failure_detected(monkeypatch):
    fake = iter([1.0, 2.0, 1.0])

    def estimates(pres, f, params, kernels, sampler, n, seed, path, workers):
        return [gf.GlobalEstimate(params.lam, k, sampler, n, next(fake), 1e-3) for k in kernels]

    monkeypatch.setattr(gf, "_estimates", estimates)
    with pytest.raises(FitFailure):
        gf.lambda_sweep(TREFOIL, ONE, [100.0, 200.0, 400.0], "haar", 1000)


def test_normalization_verdict_keys():
    v = gf.normalization_verdict(TOTAL, TOTAL, 2)
    assert v["orbit_normalized (shipped)"] == pytest.approx(1)
    assert v["no_orbit_division"] == pytest.approx(np.pi ** 2)
    assert v["2^((3k-3)/2)"] == pytest.approx(2 ** 1.5 * np.pi ** 2)


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv(gf.WORKERS_ENV, "3")
    assert gf.default_workers() == 3
    monkeypatch.delenv(gf.WORKERS_ENV)
    assert gf.default_workers() >= 1
