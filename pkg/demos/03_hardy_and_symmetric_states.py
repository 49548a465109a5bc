"""Hardy's paradox on two qubits, then its use on symmetric three-qubit states."""
import math

import numpy as np

from bellforge import canonical_three_qubit_state, hardy_measurements, symmetric_hardy_construction

c = hardy_measurements(theta=math.pi / 6, alpha=math.pi / 3)
print("Hardy measurements on cos(pi/6)|00> + sin(pi/6)|11>:")
print(f"  P(01|01) = {c.p_01_01:.1e}, P(10|10) = {c.p_10_10:.1e}, P(00|11) = {c.p_00_11:.1e}")
print(f"  yet P(00|00) = {c.p_00_00:.4f} > 0, which no local model allows")

print("\nSymmetric states h0|000> + h1 e^{i phi}|100> + h2(|101> + |110>) + h4|111>:")
rng = np.random.default_rng(7)
for _ in range(5):
    h0, h1, h2, h4 = rng.uniform(0.2, 1, 4)
    norm = math.sqrt(h0**2 + h1**2 + 2 * h2**2 + h4**2)
    state = canonical_three_qubit_state(h0 / norm, h1 / norm, h2 / norm, h2 / norm, h4 / norm, rng.uniform(0, math.pi))
    r = symmetric_hardy_construction(state)
    best = symmetric_hardy_construction(state, alpha="scan")
    print(f"  value {r.value:.3e} at alpha=pi/4, {best.value:.3e} at best grid alpha, "
          f"zeros <= {r.zero_residual:.0e}")
