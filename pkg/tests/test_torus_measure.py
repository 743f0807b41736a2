"""Torus measures as moment oracles: representations, maps, positivity."""

from __future__ import annotations

import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import toruskms as tk

from conftest import random_atomic


def test_atomic_moments_match_direct_sum():
    rng = np.random.default_rng(0)
    mu = random_atomic(rng, 2, atoms=4)
    n = np.array([2, -1])
    direct = sum(
        w * np.exp(2j * np.pi * (x @ n)) for x, w in zip(mu.points, mu.weights)
    )
    assert abs(mu.moment(n) - direct) < 1e-14


def test_atomic_points_reduced_mod_one():
    mu = tk.AtomicMeasure(np.array([[1.25], [-0.5]]), np.array([0.5, 0.5]))
    assert np.allclose(sorted(mu.points[:, 0]), [0.25, 0.5])
    # moments only see the reduced points
    shifted = tk.AtomicMeasure(np.array([[0.25], [0.5]]), np.array([0.5, 0.5]))
    assert abs(mu.moment([3]) - shifted.moment([3])) < 1e-14


def test_uniform_measure_kills_nonzero_moments():
    mu = tk.UniformMeasure(3)
    assert mu.moment([0, 0, 0]) == 1.0
    assert mu.moment([1, 0, -2]) == 0.0
    assert mu.total_mass() == 1.0


def test_moment_zero_is_total_mass():
    rng = np.random.default_rng(1)
    mu = random_atomic(rng, 1, atoms=5, mass=2.5)
    assert abs(mu.moment([0]) - 2.5) < 1e-12
    assert abs(mu.total_mass() - 2.5) < 1e-12


def test_hermitian_symmetry_of_real_measures():
    rng = np.random.default_rng(2)
    mu = random_atomic(rng, 2)
    for n in ([1, 2], [0, 3], [-2, 1]):
        n = np.array(n)
        assert abs(mu.moment(n) - np.conj(mu.moment(-n))) < 1e-14


def test_index_vector_rejects_non_integers():
    mu = tk.UniformMeasure(2)
    with pytest.raises(ValueError):
        mu.moment([0.5, 0.0])
    with pytest.raises(ValueError):
        mu.moment([1])  # wrong dimension


def test_fourier_table_round_trip():
    rng = np.random.default_rng(3)
    mu = random_atomic(rng, 2)
    table = tk.FourierTableMeasure.from_measure(mu, radius=3)
    for n in ([0, 0], [3, -3], [-1, 2]):
        assert abs(table.moment(n) - mu.moment(n)) < 1e-14
    with pytest.raises(tk.OutOfBox):
        table.moment([4, 0])


def test_fourier_table_rejects_non_hermitian():
    bad = np.full((3,), 0.5 + 0.5j)  # bad[1] != conj(bad[-1]) pattern
    bad[1] = 1.0 + 1.0j
    with pytest.raises(ValueError):
        tk.FourierTableMeasure(bad, radius=1)


def test_translate_shifts_moments_by_phase():
    rng = np.random.default_rng(4)
    mu = random_atomic(rng, 2)
    y = np.array([0.2, 0.7])
    shifted = tk.translate(mu, y)
    for n in ([1, 0], [2, -3]):
        n = np.array(n)
        expected = np.exp(2j * np.pi * (y @ n)) * mu.moment(n)
        assert abs(shifted.moment(n) - expected) < 1e-13
    # atomic translate stays atomic
    assert isinstance(shifted, tk.AtomicMeasure)


def test_translate_non_atomic_uses_multiplier():
    mu = tk.UniformMeasure(1)
    shifted = tk.translate(mu, [0.3])
    assert shifted.moment([0]) == 1.0
    assert shifted.moment([2]) == 0.0


def test_pushforward_dual_atomic_matches_index_map():
    rng = np.random.default_rng(5)
    mu = random_atomic(rng, 2)
    E = np.array([[2, 1], [0, 1]])
    pushed = tk.pushforward_dual(mu, E)
    for n in ([1, 0], [0, 1], [2, -1]):
        n = np.array(n)
        assert abs(pushed.moment(n) - mu.moment(E @ n)) < 1e-13


def test_pushforward_dual_uniform_stays_uniform():
    mu = tk.UniformMeasure(2)
    pushed = tk.pushforward_dual(mu, np.array([[2, 0], [1, 3]]))
    assert pushed.moment([0, 0]) == 1.0
    assert pushed.moment([1, 1]) == 0.0


def test_pushforward_dual_rejects_singular_matrix():
    mu = tk.UniformMeasure(2)
    with pytest.raises(tk.SingularMatrix):
        tk.pushforward_dual(mu, np.array([[1, 1], [1, 1]]))


@settings(max_examples=40, deadline=None)
@given(
    n1=st.integers(min_value=-4, max_value=4),
    n2=st.integers(min_value=-4, max_value=4),
    y=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
)
def test_point_mass_moment_is_unit_phase(n1, n2, y):
    mu = tk.AtomicMeasure(np.array([[y, 0.25]]), np.array([1.0]))
    value = mu.moment([n1, n2])
    expected = np.exp(2j * np.pi * (y * n1 + 0.25 * n2))
    assert abs(value - expected) < 1e-12
    assert abs(abs(value) - 1.0) < 1e-12


def test_positivity_accepts_probability_measures():
    rng = np.random.default_rng(6)
    mu = random_atomic(rng, 1, atoms=4)
    verdict = tk.positivity_test(mu)
    assert verdict.is_positive
    assert verdict.min_eigenvalue > -1e-10
    assert verdict.min_density > -1e-10


def test_positivity_flags_signed_measures_with_witness():
    mu = tk.AtomicMeasure(np.array([[0.1], [0.6]]), np.array([1.0, -0.5]))
    verdict = tk.positivity_test(mu)
    assert not verdict.is_positive
    assert verdict.kind == "not_positive"
    # at least one certificate carries a witness
    assert verdict.min_density < -1e-8 or verdict.min_eigenvalue < -1e-8
    text = verdict.describe()
    assert "not positive" in text


def test_positivity_two_dimensional():
    rng = np.random.default_rng(7)
    mu = random_atomic(rng, 2, atoms=3)
    assert tk.positivity_test(mu).is_positive
    signed = tk.AtomicMeasure(rng.random((2, 2)), np.array([0.8, -0.3]))
    assert not tk.positivity_test(signed).is_positive


def test_positivity_rejects_non_hermitian_moments():
    # a multiplier that breaks Hermitian symmetry cannot come from a real
    # measure, and the certificate refuses to classify it
    base = tk.UniformMeasure(1)
    broken = tk.MultipliedMeasure(base, lambda n: 1.0 + 0.5j, tag="broken")
    with pytest.raises(ValueError):
        tk.positivity_test(broken)


def test_moment_table_shape_and_center():
    rng = np.random.default_rng(8)
    mu = random_atomic(rng, 2)
    table = tk.moment_table(mu, radius=2)
    assert table.shape == (5, 5)
    assert abs(table[2, 2] - mu.total_mass()) < 1e-13


def test_atomic_json_round_trip():
    rng = np.random.default_rng(9)
    mu = random_atomic(rng, 2, atoms=3)
    obj = tk.atomic_to_json(mu)
    back = tk.atomic_from_json(json.loads(json.dumps(obj)))
    assert np.allclose(back.points, mu.points)
    assert np.allclose(back.weights, mu.weights)


def test_moment_csv_columns_and_determinism():
    rng = np.random.default_rng(10)
    mu = random_atomic(rng, 2)
    text1 = tk.write_moment_csv(mu, radius=1)
    text2 = tk.write_moment_csv(mu, radius=1)
    assert text1 == text2
    lines = text1.strip().splitlines()
    assert lines[0] == "n_1,n_2,Re,Im"
    assert len(lines) == 1 + 9
    buf = io.StringIO()
    tk.write_moment_csv(mu, radius=1, fileobj=buf)
    assert buf.getvalue() == text1
