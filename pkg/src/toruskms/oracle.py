"""Independent numerical oracles for the closed-form machinery.

Everything here recomputes a quantity the library produces in closed form, by
a route that shares no algebra with the closed form:

* ``laplace_quadrature`` integrates the Laplace-weighted character integral
  over a truncated box with composite Gauss-Legendre panels, checking the
  reciprocal-linear-factor multiplier of ``nu_from_mu``.
* ``fock_state_eval`` sums the diagonal expectation of a word over the
  truncated occupation box [0, P]^k, checking ``state_eval`` with
  ``nu_from_kappa`` inputs; the truncation error carries an exact geometric
  tail bound, computed in closed form.
* ``truncated_inverse_moment`` applies the finite geometric series of
  weighted translations, checking that ``kappa_from_nu`` really inverts the
  resolvent sum within the complement tail weight.
* ``bhs_reconciliation`` compares, in the d = k = 1 case, the resolvent
  moment of a point mass against an independously parametrized density
  formula: a wrapped exponential density on [0, 1) whose finite integral is
  evaluated analytically.  The two routes agree identically.
* the dense Fock-matrix mode realizes words as matrices on the truncated
  occupation box tensored with L2 of an atomic measure, giving an
  operator-level check of the multiplication engine.

Oracles are for tests and cross-validation; the library itself never calls
them to produce a value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .subinvariance import BlockParams, nu_from_mu
from .toeplitz_algebra import AlgebraElement, Word
from .torus_measure import AtomicMeasure, TorusMeasure

__all__ = [
    "ThetaZero",
    "QuadratureSpec",
    "FockTruncation",
    "laplace_quadrature",
    "fock_state_eval",
    "fock_tail_bound",
    "truncated_inverse_moment",
    "geometric_tail_fraction",
    "bhs_reconciliation",
    "fock_word_matrix",
    "fock_element_matrix",
    "fock_dense_state",
]

TWO_PI = 2.0 * np.pi

# e^(-beta W_j r_j) <= TRUNC_EPS for the default quadrature window.
_TRUNC_EPS = 1e-13
# Phase-plus-decay budget per Gauss-Legendre panel; 16 nodes resolve it to
# well below 1e-15 relative.
_PANEL_BUDGET = 6.0


class ThetaZero(Exception):
    """The density-route reconciliation needs theta > 0."""


@lru_cache(maxsize=16)
def _leggauss(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule for the Laplace window [0, W_j] per axis.

    widths[j] truncates axis j so that e^(-beta W_j r_j) <= 1e-12; panels and
    nodes fix the composite rule shared by all axes.
    """

    widths: Tuple[float, ...]
    panels: int
    nodes: int

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(float(w) for w in self.widths))
        if any(w <= 0 for w in self.widths) or self.panels < 1 or self.nodes < 2:
            raise ValueError("need positive widths, >= 1 panel, >= 2 nodes")

    @classmethod
    def for_params(cls, params: BlockParams, n) -> "QuadratureSpec":
        """A spec adequate for the index n: window beats 1e-12 decay, panels
        resolve the oscillation 2 pi (theta n)_j against 16-node panels."""
        decay = params.beta * params.r
        widths = np.log(1.0 / _TRUNC_EPS) / decay
        t = np.abs(params.theta_dot(n))
        speed = np.hypot(decay, TWO_PI * t)
        panels = int(max(4, np.max(np.ceil(widths * speed / _PANEL_BUDGET))))
        return cls(widths=tuple(widths), panels=panels, nodes=16)

    def doubled(self) -> "QuadratureSpec":
        return replace(self, panels=2 * self.panels)


def _axis_integral(z: complex, width: float, panels: int, nodes: int) -> complex:
    """integral of e^(z w) dw over [0, width] by composite Gauss-Legendre."""
    x, w = _leggauss(nodes)
    edges = np.linspace(0.0, width, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return complex(np.sum(weights * np.exp(z * pts)))


def laplace_quadrature(
    mu: TorusMeasure, params: BlockParams, n, spec: Optional[QuadratureSpec] = None
) -> complex:
    """Quadrature value of the Laplace-averaged moment of mu at index n.

    Computes prod_j integral over [0, W_j] of e^((-beta r_j + 2 pi i
    (theta n)_j) w) dw, times moment(mu, n); the integrand factorizes across
    axes, so the tensor rule reduces to the product of one-dimensional
    composite rules.  Agrees with the closed form of nu_from_mu to the
    truncation tail (about 1e-12) plus quadrature error.
    """
    if spec is None:
        spec = QuadratureSpec.for_params(params, n)
    t = params.theta_dot(n)
    value = 1.0 + 0j
    for j in range(params.k):
        z = complex(-params.beta * params.r[j], TWO_PI * t[j])
        value *= _axis_integral(z, spec.widths[j], spec.panels, spec.nodes)
    return value * mu.moment(n)


@dataclass(frozen=True)
class FockTruncation:
    """Occupation box [0, box]^k for the truncated diagonal sum."""

    box: int

    def __post_init__(self):
        if int(self.box) < 0:
            raise ValueError("box bound must be >= 0")
        object.__setattr__(self, "box", int(self.box))

    @classmethod
    def for_params(cls, params: BlockParams, tail: float = 1e-10) -> "FockTruncation":
        """Smallest box whose closed-form tail weight is <= tail."""
        box = 0
        while cls(box).tail_weight(params) > tail:
            box += 1
            if box > 200000:
                raise ValueError("tail target unreachable at sane box sizes")
        return cls(box)

    def tail_weight(self, params: BlockParams) -> float:
        """sum of e^(-beta p.r) over p outside [0, box]^k, in closed form.

        Geometric series: full sum prod_j (1-t_j)^(-1) minus box sum
        prod_j (1-t_j^(box+1)) / (1-t_j), with t_j = e^(-beta r_j).
        """
        t = np.exp(-params.beta * params.r)
        full = float(np.prod(1.0 / (1.0 - t)))
        inside = float(np.prod((1.0 - t ** (self.box + 1)) / (1.0 - t)))
        return full - inside


def fock_tail_bound(params: BlockParams, kappa_mass: float, trunc: FockTruncation) -> float:
    """Bound on |full - truncated| diagonal sums: tail weight times ||kappa||."""
    return trunc.tail_weight(params) * abs(kappa_mass)


def fock_state_eval(
    kappa: TorusMeasure,
    params: BlockParams,
    a: AlgebraElement,
    trunc: Optional[FockTruncation] = None,
) -> complex:
    """Truncated diagonal expectation of an element against kappa.

    For a word with p = q the diagonal sum is

        sum over b in [0, P]^k of e^(-beta (b+p).r) e^(2 pi i b.(theta n))
            * moment(kappa, n),

    summed numerically (the summand factorizes across axes, so the box sum is
    computed as a product of per-axis partial sums, term by term).  Words with
    p != q contribute exactly 0.  The truncation error obeys
    ``fock_tail_bound``; the default box pushes the tail weight below 1e-10.
    """
    if trunc is None:
        trunc = FockTruncation.for_params(params)
    b = np.arange(trunc.box + 1, dtype=float)
    total = 0j
    for w, c in a.terms.items():
        if w.p != w.q:
            continue
        n = np.asarray(w.n, dtype=np.int64)
        t = params.theta_dot(n)
        value = 1.0 + 0j
        for j in range(params.k):
            terms = np.exp((-params.beta * params.r[j] + 2j * np.pi * t[j]) * b)
            value *= complex(np.sum(terms))
        gap = float(np.asarray(w.p, dtype=np.int64) @ params.r)
        total += c * np.exp(-params.beta * gap) * value * kappa.moment(n)
    return complex(total)


def truncated_inverse_moment(
    kappa: TorusMeasure, params: BlockParams, n, box: int
) -> complex:
    """Moment at n of the finite resolvent series applied to kappa.

    sum over p in [0, box]^k of e^(-beta p.r) e^(2 pi i p.(theta n)) *
    moment(kappa, n), summed numerically per axis.  Approaches the
    nu_from_kappa closed form as box grows; the remainder, relative to the
    recovered measure's mass, is geometric_tail_fraction.
    """
    n = np.asarray(n, dtype=np.int64)
    t = params.theta_dot(n)
    b = np.arange(int(box) + 1, dtype=float)
    value = 1.0 + 0j
    for j in range(params.k):
        terms = np.exp((-params.beta * params.r[j] + 2j * np.pi * t[j]) * b)
        value *= complex(np.sum(terms))
    return value * kappa.moment(n)


def geometric_tail_fraction(params: BlockParams, box: int) -> float:
    """Exact complement weight of [0, box]^k relative to the full resolvent sum.

    Reapplying the truncated series after kappa_from_nu recovers each moment
    of a positive nu to within this fraction of ||nu||:

        1 - prod_j (1 - e^(-beta (box+1) r_j)).

    At k = 1 this sharpens the single-axis tail e^(-beta (box+1) r) /
    (1 - e^(-beta r)) by the factor (1 - e^(-beta r)).
    """
    t_pow = np.exp(-params.beta * (int(box) + 1) * params.r)
    return float(1.0 - np.prod(1.0 - t_pow))


def bhs_reconciliation(
    y: float, theta: float, r: float, beta: float, n: int
) -> Tuple[complex, complex]:
    """Two routes to the same d = k = 1 resolvent moment; returns (A, B).

    A is the package route: the moment at n of nu_from_mu applied to the
    point mass at y.  B parametrizes the same measure as a density: the
    Laplace average of a point mass wraps to the density proportional to
    e^(-beta r (v - y)/theta) on one fundamental domain, normalized by
    theta (1 - e^(-beta r / theta)); its n-th Fourier coefficient is the
    analytic finite integral

        (1 - e^(-c + 2 pi i n)) / (c - 2 pi i n),   c = beta r / theta,

    times the normalization and the phase e^(2 pi i n y).  A = B exactly;
    the routes share no code.
    """
    if not theta > 0:
        raise ThetaZero("density route needs theta > 0")
    params = BlockParams(theta=np.array([[theta]]), r=np.array([r]), beta=beta)
    nu = nu_from_mu(AtomicMeasure.point_mass([y]), params, check=False)
    a_value = nu.moment(np.array([n]))

    c = beta * r / theta
    finite_integral = (1.0 - np.exp(-c + 2j * np.pi * n)) / (c - 2j * np.pi * n)
    b_value = (
        np.exp(2j * np.pi * n * y) / (theta * (1.0 - np.exp(-c))) * finite_integral
    )
    return complex(a_value), complex(b_value)


def _shift_power_matrix(p_j: int, box: int) -> np.ndarray:
    """Truncation of the p_j-th power of the unilateral shift to [0, box]."""
    size = box + 1
    mat = np.zeros((size, size))
    for b in range(size - p_j):
        mat[b + p_j, b] = 1.0
    return mat


def _occupation_indices(k: int, box: int) -> np.ndarray:
    return np.asarray(list(np.ndindex((box + 1,) * k)), dtype=np.int64)


def fock_word_matrix(
    w: Word, params: BlockParams, kappa: AtomicMeasure, box: int
) -> np.ndarray:
    """Dense matrix of a word on the truncated occupation box tensor L2(kappa).

    The occupation factor carries the truncated shifts and the diagonal
    rotation phases e^(2 pi i b.(theta n)); the measure factor acts by the
    multiplication operator with eigenvalues e^(2 pi i x_a.n) at the atoms
    (multiplication operators are exact on atomic L2, no quadrature error).
    Row index = occupation multi-index (C order) times atom index.
    """
    if kappa.d != params.d:
        raise ValueError("kappa dimension does not match the block")
    k = params.k
    n = np.asarray(w.n, dtype=np.int64)
    shift_up = np.eye(1)
    shift_dn = np.eye(1)
    for j in range(k):
        shift_up = np.kron(shift_up, _shift_power_matrix(w.p[j], box))
        shift_dn = np.kron(shift_dn, _shift_power_matrix(w.q[j], box))
    occ = _occupation_indices(k, box)
    t = params.theta_dot(n)
    rot = np.exp(2j * np.pi * (occ.astype(float) @ t))
    occupation_part = shift_up @ (rot[:, None] * shift_dn.T)
    atom_part = np.diag(np.exp(2j * np.pi * (kappa.points @ n)))
    return np.kron(occupation_part, atom_part)


def fock_element_matrix(
    a: AlgebraElement, params: BlockParams, kappa: AtomicMeasure, box: int
) -> np.ndarray:
    size = (box + 1) ** params.k * len(kappa.weights)
    total = np.zeros((size, size), dtype=complex)
    for w, c in a.terms.items():
        total += c * fock_word_matrix(w, params, kappa, box)
    return total


def fock_dense_state(
    a: AlgebraElement, params: BlockParams, kappa: AtomicMeasure, box: int
) -> complex:
    """Diagonal expectation of the dense matrix against the occupation weights.

    sum over b in the box of e^(-beta b.r) <M (delta_b x 1), delta_b x 1> with
    the kappa-weighted inner product on the atomic L2 factor.  Agrees with
    ``fock_state_eval`` up to edge effects of the truncated shifts (the
    formula's sum runs to the box edge even where shifted vectors fall out),
    so comparisons should leave headroom of the word's V-degree.
    """
    mat = fock_element_matrix(a, params, kappa, box)
    occ = _occupation_indices(params.k, box)
    n_atoms = len(kappa.weights)
    weights = kappa.weights
    total = 0j
    for fock_idx in range(occ.shape[0]):
        vec = np.zeros(mat.shape[0], dtype=complex)
        vec[fock_idx * n_atoms : (fock_idx + 1) * n_atoms] = 1.0
        image = mat @ vec
        seg = image[fock_idx * n_atoms : (fock_idx + 1) * n_atoms]
        inner = complex(np.sum(weights * seg))
        gap = float(occ[fock_idx].astype(float) @ params.r)
        total += np.exp(-params.beta * gap) * inner
    return complex(total)
