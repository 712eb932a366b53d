import math

import numpy as np
import pytest

from gnwlab.errors import InvalidInputError
from gnwlab.model import (
    BoundedUniformNoise,
    ConstantFunction,
    CuspFunction,
    GaussianDensity,
    GaussianNoise,
    HalfPlateauKernel,
    IndicatorKernel,
    KernelSpec,
    LinearFunction,
    MixtureDensity,
    NoNoise,
    RademacherNoise,
    SinusoidFunction,
    TriangleKernel,
    UniformBall,
    UniformCube,
    assumption_audit,
    density_eval,
    density_sample,
    kernel_base_eval,
    kernel_scaled_eval,
    noise_sample,
    regression_eval,
    unit_ball_volume,
)
from gnwlab.quadrature import integrate_box

ALL_KERNELS = [IndicatorKernel(), TriangleKernel(), HalfPlateauKernel()]


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def test_indicator_base_values():
    spec = KernelSpec(IndicatorKernel(), alpha=1.0, h=1.0)
    assert kernel_base_eval(spec, [0.5]) == 1.0
    assert kernel_base_eval(spec, [1.5]) == 0.0


def test_half_plateau_midband():
    spec = KernelSpec(HalfPlateauKernel(), alpha=1.0, h=1.0)
    assert kernel_base_eval(spec, [0.75]) == 0.5


def test_scaled_eval_examples():
    spec = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1)
    assert kernel_scaled_eval(spec, [0.5], [0.55]) == 1.0
    assert kernel_scaled_eval(spec, [0.5], [0.7]) == 0.0
    half = KernelSpec(IndicatorKernel(), alpha=0.5, h=0.1)
    assert kernel_scaled_eval(half, [0.5], [0.55]) == 0.5


def test_scaled_eval_dimension_mismatch():
    spec = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1)
    with pytest.raises(InvalidInputError):
        kernel_scaled_eval(spec, [0.5], [0.5, 0.5])


@pytest.mark.parametrize("base", ALL_KERNELS, ids=lambda k: k.name)
def test_kernel_envelope_invariant(base, rng):
    # 1/2 * [r <= m1] <= K <= [r <= m2] on 10^4 random radii
    spec = KernelSpec(base, alpha=1.0, h=1.0)
    r = rng.random(10_000) * 2.0 * spec.m2
    vals = base.profile(r)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
    assert np.all(vals[r <= spec.m1] >= 0.5)
    assert np.all(vals[r > spec.m2] == 0.0)


@pytest.mark.parametrize("base", ALL_KERNELS, ids=lambda k: k.name)
def test_kernel_symmetry_exact(base, rng):
    spec = KernelSpec(base, alpha=0.7, h=0.3)
    for _ in range(200):
        x = rng.random(2)
        z = rng.random(2)
        assert kernel_scaled_eval(spec, x, z) == kernel_scaled_eval(spec, z, x)


def test_kernel_spec_validation():
    with pytest.raises(InvalidInputError):
        KernelSpec(IndicatorKernel(), alpha=1.5, h=0.1)
    with pytest.raises(InvalidInputError):
        KernelSpec(IndicatorKernel(), alpha=0.0, h=0.1)
    with pytest.raises(InvalidInputError):
        KernelSpec(IndicatorKernel(), alpha=0.5, h=-1.0)
    with pytest.raises(InvalidInputError):
        KernelSpec(IndicatorKernel(), alpha=0.5, h=0.1, m1=2.0, m2=1.0)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


DENSITIES = [
    UniformCube(lo=(0.0,), hi=(1.0,)),
    UniformCube(lo=(-1.0, 0.0), hi=(1.0, 2.0)),
    UniformBall(center=(0.0, 0.0), radius=1.0),
    GaussianDensity(mean=(0.0,), stddev=1.0),
    MixtureDensity(components=(
        (0.5, UniformCube(lo=(0.0,), hi=(1.0,))),
        (0.5, UniformCube(lo=(2.0,), hi=(3.0,))),
    )),
]


@pytest.mark.parametrize("dens", DENSITIES, ids=lambda d: type(d).__name__ + str(d.dim))
def test_density_integrates_to_one(dens):
    lo, hi = dens.bounding_box()
    res = integrate_box(
        dens.pdf, lo, hi, rel_tol=1e-9,
        planes=dens.breakpoint_planes(), spheres=dens.breakpoint_spheres(),
    )
    assert res.value == pytest.approx(1.0, rel=1e-6)


def test_density_eval_examples():
    cube = UniformCube(lo=(0.0,), hi=(1.0,))
    assert density_eval(cube, [0.5]) == 1.0
    assert density_eval(cube, [1.5]) == 0.0
    ball = UniformBall(center=(0.0, 0.0), radius=1.0)
    assert density_eval(ball, [0.0, 0.0]) == pytest.approx(1.0 / math.pi, rel=1e-12)


def test_density_sample_support(rng):
    cube = UniformCube(lo=(0.0,), hi=(1.0,))
    pt = density_sample(cube, rng)
    assert 0.0 <= pt[0] <= 1.0


def test_gaussian_sample_mean_clt(rng):
    # CLT gate: |mean| <= 4 / sqrt(10^6)
    dens = GaussianDensity(mean=(0.0,), stddev=1.0)
    draws = dens.sample(rng, (1_000_000,))
    assert abs(float(np.mean(draws))) <= 4e-3


def test_mixture_component_fractions(rng):
    mix = MixtureDensity(components=(
        (0.5, UniformCube(lo=(0.0,), hi=(1.0,))),
        (0.5, UniformCube(lo=(2.0,), hi=(3.0,))),
    ))
    draws = mix.sample(rng, (1_000_000,))
    frac = float(np.mean(draws[:, 0] <= 1.0))
    assert abs(frac - 0.5) <= 0.002


def test_cube_requires_ordered_bounds():
    with pytest.raises(InvalidInputError):
        UniformCube(lo=(1.0,), hi=(0.0,))


def test_mixture_weights_validated():
    with pytest.raises(InvalidInputError):
        MixtureDensity(components=((0.7, UniformCube(lo=(0.0,), hi=(1.0,))),))


def test_density_eval_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        density_eval(UniformCube(lo=(0.0,), hi=(1.0,)), [0.5, 0.5])


# ---------------------------------------------------------------------------
# regression functions
# ---------------------------------------------------------------------------


def test_regression_examples():
    assert regression_eval(ConstantFunction(1.0), [0.3]) == 1.0
    ident = LinearFunction(slope=(1.0,), intercept=0.0, bound=1.0)
    assert regression_eval(ident, [0.25]) == 0.25
    cusp = CuspFunction(scale=1.0, exponent=0.5, anchor=(0.0,), bound=1.0)
    assert regression_eval(cusp, [0.04]) == pytest.approx(0.2, abs=1e-15)


def test_regression_bounded_on_support(rng):
    dens = UniformCube(lo=(0.0,), hi=(1.0,))
    funcs = [
        ConstantFunction(1.0),
        LinearFunction(slope=(1.0,), intercept=0.0, bound=1.0),
        SinusoidFunction(amplitude=0.8, frequency=2.0),
        CuspFunction(scale=1.0, exponent=0.5, anchor=(0.3,), bound=0.9),
    ]
    pts = dens.sample(rng, (10_000,))
    for f in funcs:
        vals = f.evaluate(pts)
        assert np.all(np.abs(vals) <= f.bound * (1.0 + 1e-12))


def test_cusp_clamps_at_bound():
    cusp = CuspFunction(scale=2.0, exponent=1.0, anchor=(0.0,), bound=0.5)
    assert regression_eval(cusp, [10.0]) == 0.5


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------


def test_noise_examples(rng):
    assert noise_sample(NoNoise(), rng) == 0.0
    val = noise_sample(RademacherNoise(sigma_b=1.0), rng)
    assert val in (-1.0, 1.0)
    assert BoundedUniformNoise(sigma_b=3.0).variance == pytest.approx(3.0)
    assert RademacherNoise(sigma_b=0.5).variance == 0.25
    assert GaussianNoise(stddev=2.0).variance == 4.0
    assert GaussianNoise(stddev=1.0).bound is None


@pytest.mark.parametrize("noise", [
    BoundedUniformNoise(sigma_b=1.0),
    RademacherNoise(sigma_b=0.7),
    GaussianNoise(stddev=1.3),
], ids=lambda n: type(n).__name__)
def test_noise_moments_empirical(noise, rng):
    draws = noise.sample(rng, (1_000_000,))
    stddev = math.sqrt(noise.variance)
    # mean gate 4 sd / 1000; variance gate 5 standard errors of the second
    # moment (the noise is centered by construction)
    assert abs(float(np.mean(draws))) <= 4.0 * stddev / 1000.0
    second_moment = float(np.mean(draws**2))
    se_var = float(np.std(draws**2, ddof=1)) / 1000.0
    assert abs(second_moment - noise.variance) <= 5.0 * se_var + 1e-12


def test_bounded_noise_respects_bound(rng):
    noise = BoundedUniformNoise(sigma_b=0.5)
    draws = noise.sample(rng, (100_000,))
    assert np.all(np.abs(draws) <= noise.bound)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def test_audit_accepts_exact_declarations():
    kernel = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1)
    report = assumption_audit(kernel, ConstantFunction(1.0), grid_size=64)
    assert report.ok


def test_audit_flags_overdeclared_m1():
    kernel = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1, m1=2.0, m2=2.0)
    report = assumption_audit(kernel, ConstantFunction(1.0), grid_size=64)
    assert any(v.assumption == "K1" for v in report.violations)
    witness_radii = [v.witness[0] for v in report.violations if v.assumption == "K1"]
    assert any(1.0 < r <= 2.0 for r in witness_radii)


def test_audit_flags_understated_holder_constant():
    kernel = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1)
    f = LinearFunction(slope=(1.0,), intercept=0.0, bound=1.0, holder=(1.0, 0.5))
    report = assumption_audit(
        kernel, f, grid_size=32, density=UniformCube(lo=(0.0,), hi=(1.0,)),
    )
    assert any(v.assumption == "F1" for v in report.violations)


def test_audit_grid_size_validated():
    kernel = KernelSpec(IndicatorKernel(), alpha=1.0, h=0.1)
    with pytest.raises(InvalidInputError):
        assumption_audit(kernel, ConstantFunction(1.0), grid_size=1)


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-14)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)
