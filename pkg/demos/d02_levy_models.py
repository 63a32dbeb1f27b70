"""
Levy models and their increments
================================

Compound Poisson with exponential jumps and the Gamma process.
"""

import numpy as np
from levymaxdev.levy import (CompoundPoissonExp, GammaProcess, levy_density, transition_density,
                             transition_atom, sample_increments, small_time_check, fitted_q)
from levymaxdev.basis import Window

cp = CompoundPoissonExp(lam=1.0, eta=1.0)
gp = GammaProcess(1.0, 1.0)
x = np.array([0.5, 1.0, 2.0])
print("nu(x), CP:", levy_density(cp, x))
print("nu(x), Gamma:", levy_density(gp, x))

# the CP transition law has an atom at zero
print("P(X_delta = 0) for delta=0.1:", transition_atom(cp, 0.1))
print("p_delta(1) for delta=0.1:", transition_density(cp, 0.1, 1.0))

# increments are reproducible from the seed, whatever the worker count
a = sample_increments(gp, 10**5, 0.01, seed=1)
b = sample_increments(gp, 10**5, 0.01, seed=1, workers=2)
print("same draws:", np.array_equal(a.values, b.values), "mean", a.values.mean())

# p_delta / delta approaches nu on the window; the rate gives q
w = Window(0.5, 1.5)
for d in (1e-2, 1e-3, 1e-4):
    print("delta %g  sup |p/delta - nu| = %.3e" % (d, small_time_check(gp, w, d)))
print("fitted q:", fitted_q(gp, w))
