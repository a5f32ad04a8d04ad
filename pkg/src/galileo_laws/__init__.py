"""Galilean invariant systems of conservation laws in one space dimension."""
from .group import FAMILIES, GroupRep, apply, boost, check_group_axioms, generator_exp_check, group_rep
from .systems import (Cemracs, EulerGas, GalileanSystem, NilpotentSystem, RadialSystem,
                      cemracs_quasilinear, make_system, registered_systems)
from .thermo import (DualPoint, EntropyClosure, builtin_closure, conjugate_at_gradient,
                     conjugate_general, entropy, entropy_dual, entropy_variables, gas_thermo_map,
                     mech_pressure)

__version__ = "0.1.0"
