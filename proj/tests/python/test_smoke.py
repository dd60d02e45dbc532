import math

import numpy as np
import pytest

import spheremix as sm


def test_special_functions():
    assert sm.surface_measure(2) == pytest.approx(4 * math.pi, rel=1e-14)
    assert sm.log_bessel_i(0.5, 1.0) == pytest.approx(math.log(math.sqrt(2 / math.pi) * math.sinh(1.0)), rel=1e-13)
    assert sm.harmonic_dimension(2, 3) == 7
    assert sm.gegenbauer_normalized(2, 3, 1.0) == pytest.approx(7.0)
    assert sm.log_norm_const(2, 3.0) == pytest.approx(math.log(3 / (4 * math.pi * math.sinh(3.0))), rel=1e-13)


def test_mixture_roundtrip_and_density():
    mix = sm.VmfMixture([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], [5.0, 2.0], [0.7, 0.3])
    assert len(mix) == 2 and mix.m == 2
    back = sm.VmfMixture.from_json(mix.to_json())
    pts = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.6, 0.0, 0.8]])
    assert np.array_equal(mix.densities(pts), back.densities(pts))
    assert mix.density([0.0, 0.0, 1.0]) == mix.densities(pts)[0]


def test_sampling():
    mix = sm.VmfMixture([[0.0, 1.0]], [50.0], [1.0])
    x = np.asarray(mix.sample(5000, seed=3))
    assert x.shape == (5000, 2)
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)
    assert x[:, 1].mean() > 0.97
    assert np.array_equal(x, np.asarray(mix.sample(5000, seed=3)))


def test_invalid_mixture():
    with pytest.raises(ValueError):
        sm.VmfMixture([[0.0, 1.0]], [-1.0], [1.0])
    with pytest.raises(ValueError):
        sm.VmfMixture([[0.0, 1.0]], [1.0], [0.5])


def test_spectral():
    a = sm.funk_hecke_coefficients(2, 10.0, 4)
    assert a[0] == pytest.approx(1.0, abs=1e-8)
    assert a[1] == pytest.approx(1 / math.tanh(10.0) - 0.1, rel=1e-9)
    assert all(a[k + 1] < a[k] for k in range(4))
    assert sm.condition2_tail(2, 10.0, 0.0) <= sm.tail_bound(2, 10.0, 0.0, 0.5)
    csv = sm.lemma1_csv(2, [1.0, 10.0], [0.0], 4)
    assert csv.startswith("m,n,a_0,rho,tail,bound")


def test_partition_measures():
    meas = sm.partition_measures(2, [2, 4], "uniform")
    assert len(meas) == 8
    assert meas == pytest.approx([math.pi / 2] * 8, rel=1e-13)
    assert sum(sm.partition_measures(3, [3, 4, 5], "graded")) == pytest.approx(sm.surface_measure(3), rel=1e-12)


def test_approximate():
    assert "mix2" in sm.standard_target_names()
    rep = sm.approximate("vmf2", 0.05 * 0.52, m=1)
    assert rep["converged"]
    assert abs(rep["weight_sum"] - 1.0) <= 1e-12
    mix = sm.VmfMixture([[0.0, 1.0], [1.0, 0.0]], [5.0, 5.0], [0.5, 0.5])
    rep = sm.approximate(mix, 0.05)
    assert rep["converged"] and rep["m"] == 1
