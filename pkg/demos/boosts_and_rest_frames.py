"""Boosts, orbits and rest frames for the five families.

Each family carries a one-parameter group Y(v).  A rest state W0 (zero
velocity) sweeps out an orbit Y(v) W0 whose velocity is exactly -v, and the
rest projection brings every orbit point back to W0.
"""
import numpy as np

from galileo_laws import group
from galileo_laws.systems import make_system

PARAMS = {"hyp2": (1.0, 1.0), "ell2": (1.0, 1.0), "hyp3": (2.0, 0.5),
          "ell3": (2.0, 0.5), "nil3": (1.0, 1.0)}

for name, (a, b) in PARAMS.items():
    s = make_system(name, a=a, b=b)
    W0 = s.rest_state(2.0, 1.5) if s.m == 3 else s.rest_state(2.0)
    print(f"\n{name}  (a={a}, b={b})  generator:\n{s.rep.generator}")
    print("      v   u(Y(v) W0)   |Pi(Y(v) W0) - W0|   eta drift")
    for v in (-0.9, -0.3, 0.0, 0.4, 0.9):
        W, ok = s.boost_state(W0, v)
        if not ok or not s.cone_contains(W):
            print(f"  {v:5.2f}   off-branch")
            continue
        back = np.max(np.abs(s.rest_projection(W) - W0))
        drift = abs(s.entropy(W) - s.entropy(W0))
        print(f"  {v:5.2f}   {s.velocity(W): .12f}   {back:.2e}             {drift:.2e}")

# the axioms: Y(0)=I, Y(v)Y(w)=Y(v+w), Y(v)^-1 = Y(-v)
rep = group.group_rep("Ell3", 2.0, 0.5)
print("\naxiom residuals for Ell3 at v=1.1, w=0.4:", group.check_group_axioms(rep, 1.1, 0.4))
print("series vs closed form for Nil3 at v=5:", group.generator_exp_check(group.group_rep("Nil3"), 5.0, 20))
