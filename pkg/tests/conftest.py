"""Shared fixtures: the two canonical towers and their measure threads."""

from __future__ import annotations

import numpy as np
import pytest

import toruskms as tk


@pytest.fixture(scope="session")
def line_scenario() -> tk.Scenario:
    """d = k = 1 tower: theta_1 = 1, r_1 = 1, doubling at every level, M = 4."""
    levels = tk.derive_levels(
        theta1=np.array([[1.0]]),
        r1=np.array([1.0]),
        D_seq=[np.array([2])] * 4,
        E_seq=[np.array([[2]])] * 4,
    )
    return tk.Scenario(dims=tk.Dimensions(d=1, k=1), beta=1.0, levels=levels)


@pytest.fixture(scope="session")
def planar_scenario() -> tk.Scenario:
    """d = k = 2 tower of depth 3, built top-down so every theta_m >= 0."""
    theta3 = np.array([[0.31, 0.07], [0.11, 0.23]])
    r3 = np.array([0.35, 0.6])
    D = [np.array([2, 3]), np.array([2, 2]), np.array([3, 2])]
    E = [
        np.array([[2, 1], [0, 1]]),
        np.array([[1, 1], [1, 3]]),
        np.array([[2, 0], [1, 1]]),
    ]
    theta2 = (D[1][:, None] * theta3) @ E[1]
    theta1 = (D[0][:, None] * theta2) @ E[0]
    levels = (
        tk.LevelData(theta=theta1, D=D[0], E=E[0], r=D[0] * (D[1] * r3)),
        tk.LevelData(theta=theta2, D=D[1], E=E[1], r=D[1] * r3),
        tk.LevelData(theta=theta3, D=D[2], E=E[2], r=r3),
    )
    return tk.Scenario(dims=tk.Dimensions(d=2, k=2), beta=0.8, levels=levels)


@pytest.fixture(scope="session")
def line_point_thread(line_scenario) -> tk.SolenoidMeasureThread:
    return tk.build_thread(line_scenario, kind="point", y1=np.array([0.3]))


@pytest.fixture(scope="session")
def line_uniform_thread(line_scenario) -> tk.SolenoidMeasureThread:
    return tk.build_thread(line_scenario, kind="uniform")


@pytest.fixture(scope="session")
def planar_point_thread(planar_scenario) -> tk.SolenoidMeasureThread:
    return tk.build_thread(planar_scenario, kind="point", y1=np.array([0.3, 0.55]))


@pytest.fixture(scope="session")
def planar_uniform_thread(planar_scenario) -> tk.SolenoidMeasureThread:
    return tk.build_thread(planar_scenario, kind="uniform")


def random_block(rng, d: int, k: int) -> tk.BlockParams:
    return tk.BlockParams(
        theta=rng.uniform(0.0, 1.5, size=(k, d)),
        r=rng.uniform(0.5, 2.0, size=k),
        beta=float(rng.uniform(0.5, 2.0)),
    )


def random_atomic(rng, d: int, atoms: int = 3, mass: float = 1.0) -> tk.AtomicMeasure:
    points = rng.random((atoms, d))
    weights = rng.dirichlet(np.ones(atoms)) * mass
    return tk.AtomicMeasure(points, weights)
