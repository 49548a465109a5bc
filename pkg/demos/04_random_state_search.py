"""Numerical search for violations on Haar-random states."""
from bellforge import build_symmetric, chsh_variant, scan_random_states
from bellforge.optimize import optimize, product_state
from bellforge.quantum import PureState

f = build_symmetric(chsh_variant(), 3)
summary = scan_random_states(f, count=8, restarts=10, rng_seed=1)
print(f"{summary.fraction_violating:.0%} of 8 random three-qubit states violate I_sym(3)")
for k, r in enumerate(summary.results):
    print(f"  state {k}: best {r.value:.4f}, first violating restart {r.first_violation}")

bell = PureState([1, 0, 0, 1], normalize=True)
r = optimize(f, product_state([bell, PureState([1, 0])]), restarts=10, rng_seed=0)
print(f"\nA Bell pair times a qubit is biseparable and stays at {r.value:.1e} <= 0")
