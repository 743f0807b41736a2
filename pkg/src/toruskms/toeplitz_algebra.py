"""Finite linear combinations of spanning words V_p U_n V*_q and their calculus.

A word is a triple (p, n, q) with p, q in N^k and n in Z^d, tagged with the
level it lives at.  The defining relations are

    U_n V_p = e^(2 pi i p.theta n) V_p U_n        (rotation relation),
    V*_p V_q = V_(j-p) V*_(j-q),  j = p v q       (join relation),

where (p v q)_j = max(p_j, q_j).  They collapse any product of two words to a
single word with an explicit phase:

  (V_p U_n V*_q)(V_p' U_n' V*_q')
      = e^(2 pi i [ (j-q).theta n + (j-p').theta n' ]) V_(p+j-q) U_(n+n') V*_(q'+j-p')

with j = q v p'.  Elements are dictionaries word -> coefficient kept in this
normal form; coefficients with modulus below 1e-15 are pruned.

The gauge dynamics acts diagonally, alpha_t(V_p U_n V*_q) =
e^(i t (p-q).r) V_p U_n V*_q, for real or complex t.  Given a measure nu on
the torus, the associated equilibrium functional is

    phi(V_p U_n V*_q) = [p == q] e^(-beta p.r) moment(nu, n),

and kms_residual measures |phi(ab) - phi(b alpha_{i beta}(a))|, which vanishes
identically for this functional whatever nu is.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from .subinvariance import BlockParams
from .torus_measure import AtomicMeasure, TorusMeasure

__all__ = [
    "LevelMismatch",
    "WordParseError",
    "Word",
    "AlgebraElement",
    "join",
    "multiply",
    "adjoint",
    "apply_dynamics",
    "state_eval",
    "kms_residual",
    "parse_word",
]

PRUNE_TOL = 1e-15

TWO_PI_I = 2j * np.pi


class LevelMismatch(Exception):
    """Two elements at different levels cannot be combined."""


class WordParseError(Exception):
    """A word literal does not match V[p] U[n] V*[q] @ m."""


def _nat_tuple(values, what: str) -> Tuple[int, ...]:
    out = tuple(int(v) for v in np.atleast_1d(np.asarray(values)))
    if any(v < 0 for v in out):
        raise ValueError(f"{what} must be entrywise nonnegative, got {out}")
    return out


def _int_tuple(values) -> Tuple[int, ...]:
    return tuple(int(v) for v in np.atleast_1d(np.asarray(values)))


@dataclass(frozen=True)
class Word:
    """Spanning word V_p U_n V*_q at a level; p, q in N^k, n in Z^d."""

    p: Tuple[int, ...]
    n: Tuple[int, ...]
    q: Tuple[int, ...]
    level: int

    def __post_init__(self):
        object.__setattr__(self, "p", _nat_tuple(self.p, "p"))
        object.__setattr__(self, "q", _nat_tuple(self.q, "q"))
        object.__setattr__(self, "n", _int_tuple(self.n))
        object.__setattr__(self, "level", int(self.level))
        if len(self.p) != len(self.q):
            raise ValueError("p and q must have the same length")
        if self.level < 1:
            raise ValueError("levels are 1-based")

    @classmethod
    def identity(cls, k: int, d: int, level: int = 1) -> "Word":
        return cls(p=(0,) * k, n=(0,) * d, q=(0,) * k, level=level)

    def __str__(self):
        fmt = lambda t: ",".join(str(v) for v in t)
        return f"V[{fmt(self.p)}] U[{fmt(self.n)}] V*[{fmt(self.q)}] @ {self.level}"


class AlgebraElement:
    """Finite linear combination of words at one level, in normal form.

    Terms with |coefficient| < 1e-15 are pruned on construction, so the zero
    element has no terms.  Elements are immutable; arithmetic returns new
    instances.  Addition and scalar multiplication are provided as operators,
    while the word product lives in ``multiply`` because it needs theta.
    """

    __slots__ = ("level", "terms")

    def __init__(self, level: int, terms: Mapping[Word, complex]):
        level = int(level)
        cleaned: Dict[Word, complex] = {}
        for word, coeff in terms.items():
            if word.level != level:
                raise LevelMismatch(f"term at level {word.level} in element at level {level}")
            c = complex(coeff)
            if abs(c) >= PRUNE_TOL:
                cleaned[word] = c
        self.level = level
        self.terms = cleaned

    @classmethod
    def from_word(cls, word: Word, coeff: complex = 1.0) -> "AlgebraElement":
        return cls(word.level, {word: coeff})

    def sorted_terms(self):
        """Terms in a deterministic order (lexicographic in (p, n, q))."""
        return sorted(self.terms.items(), key=lambda kv: (kv[0].p, kv[0].n, kv[0].q))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.level != other.level:
            raise LevelMismatch("cannot add elements at different levels")
        merged = dict(self.terms)
        for word, coeff in other.terms.items():
            merged[word] = merged.get(word, 0j) + coeff
        return AlgebraElement(self.level, merged)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "AlgebraElement":
        scalar = complex(scalar)
        return AlgebraElement(self.level, {w: scalar * c for w, c in self.terms.items()})

    __rmul__ = __mul__

    def coefficient(self, word: Word) -> complex:
        return self.terms.get(word, 0j)

    def sup_coefficient_distance(self, other: "AlgebraElement") -> float:
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return max(abs(self.terms.get(w, 0j) - other.terms.get(w, 0j)) for w in keys)

    def __repr__(self):
        if not self.terms:
            return f"AlgebraElement(level={self.level}, 0)"
        body = " + ".join(f"({c:.6g})*{w}" for w, c in self.sorted_terms())
        return f"AlgebraElement({body})"


def join(p, q) -> Tuple[int, ...]:
    """Componentwise maximum p v q of two points of N^k."""
    p = np.atleast_1d(np.asarray(p, dtype=np.int64))
    q = np.atleast_1d(np.asarray(q, dtype=np.int64))
    if p.shape != q.shape:
        raise ValueError("join needs vectors of equal length")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("join is defined on N^k")
    return tuple(int(v) for v in np.maximum(p, q))


def _word_product(w1: Word, c1: complex, w2: Word, c2: complex, theta: np.ndarray):
    q1 = np.asarray(w1.q, dtype=np.int64)
    p2 = np.asarray(w2.p, dtype=np.int64)
    j = np.maximum(q1, p2)
    tn1 = theta @ np.asarray(w1.n, dtype=float)
    tn2 = theta @ np.asarray(w2.n, dtype=float)
    phase = float((j - q1) @ tn1) + float((j - p2) @ tn2)
    word = Word(
        p=np.asarray(w1.p, dtype=np.int64) + j - q1,
        n=np.asarray(w1.n, dtype=np.int64) + np.asarray(w2.n, dtype=np.int64),
        q=np.asarray(w2.q, dtype=np.int64) + j - p2,
        level=w1.level,
    )
    return word, c1 * c2 * complex(np.exp(TWO_PI_I * phase))


def multiply(a: AlgebraElement, b: AlgebraElement, theta) -> AlgebraElement:
    """Product of two elements at the same level, in normal form.

    theta is the level's k x d rotation matrix; each pair of words collapses
    to a single word via the join relation, with phase
    e^(2 pi i [(j - q).theta n + (j - p').theta n']) where j = q v p'.
    """
    if a.level != b.level:
        raise LevelMismatch(f"levels {a.level} and {b.level} differ")
    # every phase exponent pairs theta with integer vectors on both sides, so
    # shifting entries by integers never changes a coefficient; reducing mod 1
    # here keeps the exponents O(1) and the rounding error off the phases
    theta = np.mod(np.atleast_2d(np.asarray(theta, dtype=float)), 1.0)
    out: Dict[Word, complex] = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            word, coeff = _word_product(w1, c1, w2, c2, theta)
            out[word] = out.get(word, 0j) + coeff
    return AlgebraElement(a.level, out)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """Adjoint: (V_p U_n V*_q)* = V_q U_(-n) V*_p with conjugated coefficients."""
    out = {
        Word(p=w.q, n=tuple(-v for v in w.n), q=w.p, level=w.level): np.conj(c)
        for w, c in a.terms.items()
    }
    return AlgebraElement(a.level, out)


def apply_dynamics(a: AlgebraElement, t, r) -> AlgebraElement:
    """Gauge dynamics alpha_t, scaling each word by e^(i t (p-q).r).

    t may be complex; t = i*beta yields the KMS twist e^(-beta (p-q).r).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = complex(t)
    out = {}
    for w, c in a.terms.items():
        gap = float((np.asarray(w.p, dtype=np.int64) - np.asarray(w.q, dtype=np.int64)) @ r)
        out[w] = c * complex(np.exp(1j * t * gap))
    return AlgebraElement(a.level, out)


def state_eval(
    nu: TorusMeasure, params: BlockParams, a: AlgebraElement, check_state: bool = True
) -> complex:
    """Evaluate the equilibrium functional of nu on an element.

    phi(V_p U_n V*_q) = [p == q] e^(-beta p.r) moment(nu, n), extended
    linearly.  A bona fide state needs nu positive with mass 1; check_state
    enforces the cheap part (mass within 1e-8 of 1, nonnegative weights when
    atomic) and can be disabled for functional identities that hold for
    arbitrary nu.  Full positivity certification is positivity_test's job.
    """
    if check_state:
        mass = nu.total_mass()
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"state requires mass 1, got {mass:.12g}")
        if isinstance(nu, AtomicMeasure) and (
            np.max(np.abs(nu.weights.imag)) > 1e-10 or np.min(nu.weights.real) < -1e-10
        ):
            raise ValueError("state requires a nonnegative measure")
    total = 0j
    for w, c in a.terms.items():
        if w.p != w.q:
            continue
        gap = float(np.asarray(w.p, dtype=np.int64) @ params.r)
        total += c * np.exp(-params.beta * gap) * nu.moment(np.asarray(w.n, dtype=np.int64))
    return complex(total)


def kms_residual(
    nu: TorusMeasure, params: BlockParams, a: AlgebraElement, b: AlgebraElement
) -> float:
    """|phi(ab) - phi(b alpha_{i beta}(a))| for the functional of nu.

    Zero (up to rounding) for every nu, because the equilibrium functional's
    diagonal form makes the twisted trace property an algebraic identity.
    """
    phi_ab = state_eval(nu, params, multiply(a, b, params.theta), check_state=False)
    twisted = multiply(b, apply_dynamics(a, 1j * params.beta, params.r), params.theta)
    phi_ba = state_eval(nu, params, twisted, check_state=False)
    return abs(phi_ab - phi_ba)


_WORD_RE = re.compile(
    r"^\s*V\[(?P<p>[^\]]*)\]\s*U\[(?P<n>[^\]]*)\]\s*V\*\[(?P<q>[^\]]*)\]\s*@\s*(?P<m>\d+)\s*$"
)


def _parse_int_list(text: str, what: str) -> Tuple[int, ...]:
    parts = [s.strip() for s in text.split(",")] if text.strip() else []
    try:
        return tuple(int(s) for s in parts)
    except ValueError as exc:
        raise WordParseError(f"{what} must be a comma-separated integer list: {text!r}") from exc


def parse_word(text: str, k: int, d: int) -> Word:
    """Parse the literal syntax "V[p1,..,pk] U[n1,..,nd] V*[q1,..,qk] @ m"."""
    match = _WORD_RE.match(text)
    if not match:
        raise WordParseError(f"cannot parse word literal: {text!r}")
    p = _parse_int_list(match.group("p"), "p")
    n = _parse_int_list(match.group("n"), "n")
    q = _parse_int_list(match.group("q"), "q")
    if len(p) != k or len(q) != k:
        raise WordParseError(f"V exponents must have length k={k}, got {len(p)} and {len(q)}")
    if len(n) != d:
        raise WordParseError(f"U exponent must have length d={d}, got {len(n)}")
    if any(v < 0 for v in p) or any(v < 0 for v in q):
        raise WordParseError("V exponents must be nonnegative")
    return Word(p=p, n=n, q=q, level=int(match.group("m")))
