"""Shared scenario builders for the test suite."""

import numpy as np
import pytest

from gnwlab.model import (
    ConstantFunction,
    IndicatorKernel,
    KernelSpec,
    LinearFunction,
    NoNoise,
    UniformCube,
)
from gnwlab.scenario import QuerySpec, ScenarioConfig, ScenarioConstants


def unit_interval_scenario(
    n=10,
    h=0.1,
    alpha=1.0,
    base=None,
    regression=None,
    noise=None,
    points=((0.5,),),
    integrated=None,
    replications=1000,
    master_seed=20260808,
    deltas=(0.25, 0.5, 1.0),
):
    """Uniform[0, 1] scenario with an indicator kernel, overridable per test."""
    query = QuerySpec(points=points) if integrated is None else QuerySpec(
        outer=integrated[0], inner=integrated[1]
    )
    return ScenarioConfig(
        dimension=1,
        n=n,
        density=UniformCube(lo=(0.0,), hi=(1.0,)),
        kernel=KernelSpec(base or IndicatorKernel(), alpha=alpha, h=h),
        regression=regression or ConstantFunction(1.0),
        noise=noise or NoNoise(),
        constants=ScenarioConstants(r0=1.0, c0=0.5, p0=1.0),
        query=query,
        replications=replications,
        master_seed=master_seed,
        deltas=tuple(deltas),
    )


IDENTITY = LinearFunction(slope=(1.0,), intercept=0.0, bound=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
