"""Independent numerical routes against the closed forms."""

from __future__ import annotations

import numpy as np
import pytest

import toruskms as tk

from conftest import random_atomic, random_block


def test_quadrature_matches_frozen_laplace_value():
    params = tk.BlockParams(theta=np.array([[1.0]]), r=np.array([1.0]), beta=1.0)
    point = tk.AtomicMeasure(np.array([[0.0]]), np.array([1.0]))
    numeric = tk.laplace_quadrature(point, params, np.array([1]))
    assert abs(numeric - (0.024704523031857644 + 0.15522309613464763j)) < 1e-10


def test_quadrature_matches_closed_form_randomized():
    rng = np.random.default_rng(0)
    for _ in range(6):
        d, k = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        params = random_block(rng, d, k)
        mu = random_atomic(rng, d)
        nu = tk.nu_from_mu(mu, params)
        for _ in range(5):
            n = rng.integers(-4, 5, size=d)
            gap = abs(nu.moment(n) - tk.laplace_quadrature(mu, params, n))
            assert gap < 1e-6


def test_quadrature_doubling_converged():
    # doubling the panel count moves the answer by far less than the
    # agreement tolerance, so the rule is resolved rather than lucky
    rng = np.random.default_rng(1)
    params = random_block(rng, 1, 2)
    mu = random_atomic(rng, 1)
    n = np.array([3])
    spec = tk.QuadratureSpec.for_params(params, n)
    one = tk.laplace_quadrature(mu, params, n, spec)
    two = tk.laplace_quadrature(mu, params, n, spec.doubled())
    assert abs(one - two) < 1e-10


def test_fock_truncation_tail_decreases():
    params = tk.BlockParams(theta=np.array([[1.0]]), r=np.array([1.0]), beta=1.0)
    t1 = tk.FockTruncation(10).tail_weight(params)
    t2 = tk.FockTruncation(20).tail_weight(params)
    assert t2 < t1
    auto = tk.FockTruncation.for_params(params, tail=1e-10)
    assert auto.tail_weight(params) <= 1e-10


def test_fock_sum_matches_frozen_geometric_value():
    params = tk.BlockParams(theta=np.array([[1.0]]), r=np.array([1.0]), beta=1.0)
    kappa = tk.AtomicMeasure(np.array([[0.25]]), np.array([1.0]))
    nu = tk.nu_from_kappa(kappa, params)
    assert abs(nu.moment([0]) - 1.5819767068693265) < 1e-15
    word = tk.AlgebraElement.from_word(tk.Word(p=(0,), n=(0,), q=(0,), level=1))
    trunc = tk.FockTruncation.for_params(params)
    numeric = tk.fock_state_eval(kappa, params, word, trunc)
    bound = tk.fock_tail_bound(params, 1.0, trunc)
    assert abs(numeric - 1.5819767068693265) <= bound * (1 + 1e-9) + 1e-14


def test_fock_state_matches_closed_form():
    rng = np.random.default_rng(2)
    for _ in range(4):
        d, k = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        params = random_block(rng, d, k)
        kappa = random_atomic(rng, d, mass=1.0 / params.partition_value())
        nu = tk.nu_from_kappa(kappa, params)
        trunc = tk.FockTruncation.for_params(params)
        bound = tk.fock_tail_bound(params, abs(kappa.total_mass()), trunc)
        for _ in range(6):
            p = tuple(rng.integers(0, 3, k))
            w = tk.Word(p=p, n=tuple(rng.integers(-3, 4, d)), q=p, level=1)
            a = tk.AlgebraElement.from_word(w)
            closed = tk.state_eval(nu, params, a)
            numeric = tk.fock_state_eval(kappa, params, a, trunc)
            assert abs(closed - numeric) <= bound * (1 + 1e-9) + 1e-14


def test_fock_state_off_diagonal_is_exact_zero():
    params = tk.BlockParams(theta=np.array([[0.3]]), r=np.array([1.0]), beta=1.0)
    kappa = tk.AtomicMeasure(np.array([[0.1]]), np.array([1.0]))
    w = tk.Word(p=(2,), n=(1,), q=(1,), level=1)
    assert tk.fock_state_eval(kappa, params, tk.AlgebraElement.from_word(w)) == 0j


def test_truncated_inverse_recovers_nu_within_tail():
    rng = np.random.default_rng(3)
    params = random_block(rng, 2, 2)
    nu = tk.nu_from_mu(random_atomic(rng, 2), params)
    kappa = tk.kappa_from_nu(nu, params)
    box = tk.FockTruncation.for_params(params).box
    bound = tk.geometric_tail_fraction(params, box) * abs(nu.total_mass())
    for n in ([0, 0], [2, -1], [-3, 3]):
        n = np.array(n)
        recovered = tk.truncated_inverse_moment(kappa, params, n, box)
        assert abs(recovered - nu.moment(n)) <= bound * (1 + 1e-9) + 1e-14


def test_geometric_tail_fraction_exact_complement():
    # the complement weight of the box sum: 1 - prod_j (1 - t_j^(B+1));
    # cross-checked against a brute-force double sum in one dimension
    params = tk.BlockParams(theta=np.array([[0.3]]), r=np.array([1.2]), beta=0.9)
    B = 8
    t = np.exp(-0.9 * 1.2)
    brute = sum(t**p for p in range(B + 1, 2000)) * (1 - t)
    assert abs(tk.geometric_tail_fraction(params, B) - brute) < 1e-12


def test_bhs_reconciliation_routes_agree():
    rng = np.random.default_rng(4)
    for _ in range(20):
        y = float(rng.random())
        theta = float(rng.uniform(0.05, 2.0))
        r = float(rng.uniform(0.3, 2.0))
        beta = float(rng.uniform(0.3, 2.0))
        n = int(rng.integers(-5, 6))
        a_value, b_value = tk.bhs_reconciliation(y, theta, r, beta, n)
        assert abs(a_value - b_value) < 1e-10


def test_bhs_rejects_nonpositive_theta():
    with pytest.raises(tk.ThetaZero):
        tk.bhs_reconciliation(0.2, 0.0, 1.0, 1.0, 1)


def test_dense_matrices_multiply_like_the_engine():
    rng = np.random.default_rng(5)
    d = k = 2
    box = 3
    params = random_block(rng, d, k)
    kappa = random_atomic(rng, d, atoms=3)
    n_atoms = 3
    occupancy = list(np.ndindex((box + 1,) * k))
    safe = [
        f * n_atoms + a
        for f, occ in enumerate(occupancy)
        if max(occ) <= 1
        for a in range(n_atoms)
    ]
    for _ in range(10):
        wa = tk.Word(
            p=tuple(rng.integers(0, 2, k)),
            n=tuple(rng.integers(-2, 3, d)),
            q=tuple(rng.integers(0, 2, k)),
            level=1,
        )
        wb = tk.Word(
            p=tuple(rng.integers(0, 2, k)),
            n=tuple(rng.integers(-2, 3, d)),
            q=tuple(rng.integers(0, 2, k)),
            level=1,
        )
        a = tk.AlgebraElement.from_word(wa, complex(rng.normal(), rng.normal()))
        b = tk.AlgebraElement.from_word(wb, complex(rng.normal(), rng.normal()))
        mat = tk.fock_element_matrix(tk.multiply(a, b, params.theta), params, kappa, box)
        two_step = tk.fock_element_matrix(a, params, kappa, box) @ tk.fock_element_matrix(
            b, params, kappa, box
        )
        assert np.max(np.abs((two_step - mat)[:, safe])) < 1e-12


def test_dense_adjoint_is_weighted_conjugate_transpose():
    rng = np.random.default_rng(6)
    params = random_block(rng, 2, 2)
    kappa = random_atomic(rng, 2, atoms=3)
    box = 3
    w = tk.Word(p=(1, 0), n=(1, -2), q=(0, 1), level=1)
    A = tk.fock_word_matrix(w, params, kappa, box)
    Astar = tk.fock_word_matrix(
        tk.Word(p=w.q, n=tuple(-x for x in w.n), q=w.p, level=1), params, kappa, box
    )
    weights = np.kron(np.ones((box + 1) ** 2), kappa.weights.real)
    conj_form = (A.conj().T * weights[None, :]) / weights[:, None]
    assert np.max(np.abs(Astar - conj_form)) < 1e-12


def test_dense_state_matches_closed_form():
    rng = np.random.default_rng(7)
    params = random_block(rng, 1, 1)
    kappa = random_atomic(rng, 1, mass=1.0 / params.partition_value())
    nu = tk.nu_from_kappa(kappa, params)
    trunc = tk.FockTruncation.for_params(params)
    box = trunc.box + 2
    for w in (
        tk.Word(p=(0,), n=(2,), q=(0,), level=1),
        tk.Word(p=(1,), n=(-1,), q=(1,), level=1),
        tk.Word(p=(2,), n=(1,), q=(1,), level=1),
    ):
        dense = tk.fock_dense_state(tk.AlgebraElement.from_word(w), params, kappa, box)
        closed = tk.state_eval(nu, params, tk.AlgebraElement.from_word(w))
        assert abs(dense - closed) < 1e-9
