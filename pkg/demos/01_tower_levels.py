"""Build a refinement tower and inspect the level data.

A tower is a finite list of levels m = 1..M.  Each level carries a rotation
matrix theta_m (d x d), a rate vector r^m (k entries), and integer refinement
maps D_m (diagonal, given by its diagonal) and E_m (invertible) tying the
level to the next one:

    D_m theta_{m+1} E_m = theta_m        D_m r^{m+1} = r^m

Both relations are exact statements about real matrices, not congruences mod
1.  The demo builds the doubling tower from theta_1 = 1, r_1 = 1 and shows why
reducing theta mod 1 before deriving the next level would destroy it.
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

print("doubling tower, theta_1 = 1, r_1 = 1, D = E = 2, depth", scenario.depth)
print()
print(f"{'level':>5} {'theta':>12} {'r':>10}")
for m in range(1, M + 1):
    lv = scenario.level(m)
    print(f"{m:>5} {lv.theta[0, 0]:>12.6f} {lv.r[0]:>10.6f}")

print()
print("exact refinement relations (residuals should be 0):")
for m in range(1, M):
    a, b = scenario.level(m), scenario.level(m + 1)
    theta_gap = np.max(np.abs(a.D[:, None] * b.theta @ a.E - a.theta))
    rate_gap = np.max(np.abs(a.D * b.r - a.r))
    print(f"  m={m}:  |D theta' E - theta| = {theta_gap:.1e},  |D r' - r| = {rate_gap:.1e}")

# theta_1 = 1 is an integer, so every level-1 commutation phase e^{2 pi i p theta n}
# is trivial.  theta_2 = 1/4 is not.  Reducing theta_1 mod 1 before dividing
# would force theta_2 = 0 and flatten the whole tower.
print()
print("real arithmetic matters: theta_1 = 1 but theta_2 =", scenario.level(2).theta[0, 0])
print("  (mod-1 reduction before deriving levels would have given theta_2 = 0)")

print()
print("validation catches broken towers:")
bad_levels = list(levels)
bad_levels[1] = tk.LevelData(
    theta=np.array([[0.3]]),  # no longer satisfies D theta_2 E = theta_1
    D=bad_levels[1].D,
    E=bad_levels[1].E,
    r=bad_levels[1].r,
)
bad = tk.Scenario(dims=tk.Dimensions(d=1, k=1), beta=1.0, levels=tuple(bad_levels))
for msg in tk.validate_scenario(bad):
    print("  violation:", msg)

print()
blob = tk.scenario_to_json(scenario)
again = tk.scenario_from_json(blob)
same = all(
    np.array_equal(again.level(m).theta, scenario.level(m).theta) for m in range(1, M + 1)
)
print("JSON round trip preserves every level:", same)
