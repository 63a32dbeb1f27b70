"""
Suprema of the limiting Gaussian field
======================================

Monte Carlo tails against exact laws and tail asymptotics.
"""

import numpy as np
from levymaxdev.basis import haar, trig, legendre
from levymaxdev.gausssup import (SupSampleConfig, sample_sup, empirical_tail, haar_exact_signed_tail,
                                 trig_J3_exact_tail, asymptotic_tail, unit_variance_delta)

# Haar: closed form through the normal cdf
d = sample_sup(SupSampleConfig(haar(), 1.0, 10**6, seed=1, mode="signed"))
p, se = empirical_tail(d, 2.0)
print("Haar  P(sup > 2): MC %.5f +- %.5f, exact %.5f" % (p[0], se[0], haar_exact_signed_tail(1.0, 2.0)))

# single-frequency trig: the sup has an exact rotation form, no grid needed
d = sample_sup(SupSampleConfig(trig(2), 3.0, 10**6, seed=2, grid=None, mode="signed"))
p, se = empirical_tail(d, 2.0)
print("trig  P(sup > 2): MC %.5f +- %.5f, exact %.5f" % (p[0], se[0], trig_J3_exact_tail(3.0, 2.0)))

# deep tail: asymptotic formula per family
for fam in (haar(), trig(2), legendre(2)):
    delta = unit_variance_delta(fam)
    print(fam.tag, "asymptotic tail at u=5:", float(asymptotic_tail(fam, delta, 5.0)))
