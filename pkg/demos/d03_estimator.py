"""
Projection estimator of the Levy density
========================================
"""

import numpy as np
from levymaxdev.basis import make_system
from levymaxdev.levy import GammaProcess, levy_density, sample_increments
from levymaxdev.estimator import (projection_estimate, projection_truth, evaluate_estimate,
                                  deviation_from_truth)

gp = GammaProcess(1.0, 1.0)
s = make_system("legendre", 2, 0.5, 1.5, 4)

# T = n delta is the observation horizon
for n in (10**4, 10**5, 10**6):
    sample = sample_increments(gp, n, 0.01, seed=3)
    est = projection_estimate(sample, s)
    rep = deviation_from_truth(est, gp)
    print("T = %6g  weighted sup deviation %.3f at x=%.3f" % (n * 0.01, rep.statistic, rep.argmax_x))

# the projection of nu itself, next to nu on a few points
truth = projection_truth(gp, s)
x = np.linspace(0.5, 1.5, 5)
print(np.c_[x, evaluate_estimate(truth, x), levy_density(gp, x)])
