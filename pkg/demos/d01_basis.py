"""
Local orthonormal bases on a window
===================================

Each cell of [a, b] split into m pieces carries J + 1 functions.
"""

import numpy as np
from levymaxdev.basis import make_system, verify_orthonormality, boundedness_constants

# three families on the same window
for name, J in (("trig", 2), ("legendre", 3), ("haar", None)):
    s = make_system(name, J, 0.5, 1.5, 8)
    # dim = (J + 1) m, Gram deviation should sit at rounding level
    print(name, "dim", s.dim, "gram error %.1e" % verify_orthonormality(s))
    print("   C1, C2 =", boundedness_constants(s))

# the trig order J counts functions per cell minus one: J=2 means 1, sqrt2 cos, sqrt2 sin
s = make_system("trig", 2, 0.0, 1.0, 4)
print("cell width", s.delta, "cells", s.m)
