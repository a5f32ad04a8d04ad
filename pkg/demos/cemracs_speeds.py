"""Characteristic speeds of the Cemracs system.

Writing y for the pressure over the rest radius, the sound speeds about the
flow velocity are +-sqrt(y - 2y^2 + gamma/(gamma-1) y^3).  The cubic is
positive for every y > 0, so the system stays hyperbolic as long as the
pressure is.  Here the closed form is compared with eigenvalues of a
finite-difference Jacobian along a boosted family of states.
"""
import numpy as np

from galileo_laws.systems import make_system

cem = make_system("cemracs", gamma=1.4)
W0 = np.array([1.0, 0.0, 2.5])
print("rest state", W0, " pressure", cem.pressure(W0), " (2/7 =", 2 / 7, ")")
print("closed-form speeds ", cem.char_speeds(W0))
print("Jacobian eigenvalues", cem.char_speeds(W0, numeric=True))

print("\n     v    u(W)        closed form                       numeric gap")
for v in np.linspace(-1.2, 1.2, 7):
    W, ok = cem.boost_state(W0, v)
    lam, num = cem.char_speeds(W), cem.char_speeds(W, numeric=True)
    print(f"  {v:5.2f}  {cem.velocity(W): .6f}   {lam[0]: .6f} {lam[1]: .6f} {lam[2]: .6f}   "
          f"{np.max(np.abs(lam - num)):.1e}")

# the sound speed as a function of y alone
y = np.linspace(0.01, 1.0, 6)
k = 1.4 / 0.4
print("\n y        c(y)")
for yi in y:
    print(f" {yi:.2f}   {np.sqrt(yi - 2 * yi ** 2 + k * yi ** 3):.6f}")
