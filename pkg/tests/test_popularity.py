import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgecache import Popularity, miss_mass, zipf_popularity

# Frozen from direct summation of i^-0.8 over ranks 1..10.
ZIPF_10_08_P1 = 0.2804957430143902
ZIPF_10_08_TAIL5 = 0.2719969352541229


def test_uniform_when_rho_zero():
    pop = zipf_popularity(4, 0.0)
    assert np.allclose(pop.probs, 0.25, atol=1e-15)


def test_single_file_library():
    pop = zipf_popularity(1, 2.3)
    assert pop.probs.tolist() == [1.0]


def test_reference_zipf_head():
    pop = zipf_popularity(10, 0.8)
    assert pop.probs[0] == pytest.approx(ZIPF_10_08_P1, rel=1e-14)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        zipf_popularity(0, 0.8)
    with pytest.raises(ValueError):
        zipf_popularity(10, float("nan"))
    with pytest.raises(ValueError):
        zipf_popularity(10, float("inf"))
    with pytest.raises(ValueError):
        zipf_popularity(10, -0.1)


def test_popularity_validation():
    with pytest.raises(ValueError):
        Popularity(probs=np.array([0.6, 0.6]), rho=0.0, n_files=2)
    with pytest.raises(ValueError):
        Popularity(probs=np.array([0.4, 0.6]), rho=0.0, n_files=2)  # increasing
    with pytest.raises(ValueError):
        Popularity(probs=np.array([1.0, 0.0]), rho=0.0, n_files=2)  # zero entry


def test_miss_mass_uniform_tail():
    pop = zipf_popularity(4, 0.0)
    assert miss_mass(pop, 2) == pytest.approx(0.5, abs=1e-15)


def test_miss_mass_boundaries():
    pop = zipf_popularity(7, 1.3)
    assert miss_mass(pop, 7) == 0.0
    assert miss_mass(pop, 0) == 1.0
    with pytest.raises(ValueError):
        miss_mass(pop, 8)
    with pytest.raises(ValueError):
        miss_mass(pop, -1)


def test_miss_mass_reference_value():
    pop = zipf_popularity(10, 0.8)
    assert miss_mass(pop, 5) == pytest.approx(ZIPF_10_08_TAIL5, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 200), rho=st.floats(0.0, 5.0, allow_nan=False))
def test_zipf_invariants(n, rho):
    pop = zipf_popularity(n, rho)
    assert abs(float(pop.probs.sum()) - 1.0) <= 1e-12
    assert np.all(np.diff(pop.probs) <= 0.0)
    assert np.all(pop.probs > 0.0) and np.all(pop.probs <= 1.0)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 100), rho=st.floats(0.0, 4.0, allow_nan=False),
       data=st.data())
def test_miss_mass_complement_and_monotone(n, rho, data):
    pop = zipf_popularity(n, rho)
    n0 = data.draw(st.integers(0, n))
    assert miss_mass(pop, n0) == pytest.approx(
        1.0 - float(pop.probs[:n0].sum()), abs=1e-12)
    if n0 < n:
        assert miss_mass(pop, n0 + 1) <= miss_mass(pop, n0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 100),
       rho_low=st.floats(0.0, 3.0, allow_nan=False),
       bump=st.floats(0.01, 2.0, allow_nan=False))
def test_skew_concentrates_head(n, rho_low, bump):
    low = zipf_popularity(n, rho_low)
    high = zipf_popularity(n, rho_low + bump)
    assert high.probs[0] >= low.probs[0] - 1e-15
    assert high.probs[-1] <= low.probs[-1] + 1e-15
