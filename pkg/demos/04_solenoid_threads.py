"""Measure threads and the limit state across tower levels.

A thread assigns each level m a probability measure mu_m with the exact
compatibility E^T_* mu_{m+1} = mu_m.  Point threads start from y_1 and climb
by picking preimages; the uniform thread is compatible for free.  The limit
state psi evaluates any word at any level, and its defining property is that
embedding a word one level up never changes its value.
"""

from __future__ import annotations

import numpy as np

import toruskms as tk

M = 4
levels = tk.derive_levels(
    theta1=np.array([[1.0]]),
    r1=np.array([1.0]),
    D_seq=[np.array([2])] * M,
    E_seq=[np.array([[2]])] * M,
)
scenario = tk.Scenario(dims=tk.Dimensions(d=1, k=1), beta=1.0, levels=levels)
thread = tk.build_thread(scenario, kind="point", y1=np.array([0.3]))

print("doubling tower, depth 4, point thread from y_1 = 0.3")
print()
print("a point thread picks one E-preimage per level, so E^T maps each atom down:")
for m in range(1, M + 1):
    mu_m = thread.measures[m - 1]
    pts = np.sort(mu_m.points.ravel())
    print(f"  level {m}: atom at", np.array2string(pts, precision=4))

pre = tk.preimage_points(np.array([0.3]), np.array([[2]]))
print()
print("all |det E| = 2 preimages of y = 0.3 under E = 2:", np.sort(pre.ravel()))

print()
print("the limit state psi and its level consistency:")
w1 = tk.parse_word("V[1] U[2] V*[1] @ 1", k=1, d=1)
value = tk.psi_eval(thread, w1)
print(f"  psi({w1}) = {value:.10f}")
w = w1
for m in range(1, M):
    lifted = tk.embed_word(w, scenario)
    res = tk.consistency_residual(thread, w)
    print(f"  lift to level {m + 1}: {lifted},  |psi(lift) - psi(w)| = {res:.2e}")
    w = lifted

print()
print("off-diagonal words vanish, and psi is normalized:")
off = tk.parse_word("V[1] U[0] V*[0] @ 2", k=1, d=1)
one = tk.parse_word("V[0] U[0] V*[0] @ 1", k=1, d=1)
print(f"  psi({off}) = {tk.psi_eval(thread, off):.1f}")
print(f"  psi(identity) = {tk.psi_eval(thread, one):.10f}")

print()
print("level constants telescope: d_m c_{m+1} = c_m")
consts = tk.level_constants(scenario)
for m in range(1, M):
    lhs = consts.dets[m - 1] * consts.c[m]
    print(f"  m={m}: d_m c_(m+1) = {lhs:.10f}, c_m = {consts.c[m - 1]:.10f}")

print()
print("a corrupted thread is caught by validation and by the state itself:")
bad_measures = list(thread.measures)
bad_measures[1] = tk.AtomicMeasure(points=np.array([[0.77]]), weights=np.array([1.0]))
bad = tk.SolenoidMeasureThread(scenario, tuple(bad_measures))
msgs = tk.validate_thread(bad)
print("  validate_thread:", msgs[0] if msgs else "no violation found")
simple = tk.parse_word("V[0] U[1] V*[0] @ 1", k=1, d=1)
print(f"  consistency residual jumps to {tk.consistency_residual(bad, simple):.3e}")
