"""
Confidence bands and their coverage
===================================
"""

import warnings
import numpy as np
from levymaxdev.basis import haar, make_system
from levymaxdev.levy import GammaProcess, sample_increments
from levymaxdev.estimator import projection_estimate
from levymaxdev.bands import confidence_band, coverage_experiment

gp = GammaProcess(1.0, 1.0)
n, kappa = 10**4, 0.6
T = n**kappa
s = make_system("haar", None, 0.5, 1.5, 6)
est = projection_estimate(sample_increments(gp, n, T / n, seed=4), s)
band = confidence_band(est, level=0.9)
print("half-width scale", band.half_width_scale)
print(np.c_[band.x, band.lower, band.estimate, band.upper][::len(band.x) // 6])

# repeated experiment; Lambda_n above 0.5 triggers a warning at this n
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    r = coverage_experiment(gp, haar(), kappa, n, 0.9, 100, seed=12345)
print("coverage %.3f over %d reps (m=%d, q=%.3f)" % (r.coverage, r.reps, r.m, r.q))
