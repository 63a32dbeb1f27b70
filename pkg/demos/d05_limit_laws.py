"""
Gumbel limit and the accompanying law
=====================================
"""

import numpy as np
from levymaxdev.basis import Window, trig
from levymaxdev.limits import (normalization, gumbel_cdf, accompanying_cdf, sample_cell_maxima,
                               compare_laws, optimal_m, lambda_n)

w = Window(0.0, 1.0)
p = normalization(trig(2), w, 100)
print("m=100: h1 %.4f h2 %.4f b_m %.4f a_m %.4f" % (p.h1, p.h2, p.b_m, p.a_m))

# standardized cell maxima drift toward exp(-2 exp(-y))
for m in (10, 100, 1000):
    w_m = sample_cell_maxima(trig(2), w, m, 20000, seed=7)
    c = compare_laws(w_m, trig(2), w, m)
    print("m=%5d  KS Gumbel %.4f  KS A_m %.4f" % (m, c.ks_gumbel, c.ks_accompanying))

y = np.linspace(-2, 4, 4)
print(np.c_[y, gumbel_cdf(y), accompanying_cdf(2, w, 100, y)])

# resolution choice for n observations at horizon n^kappa
print("optimal m:", optimal_m(1e5, 0.6), " Lambda_n:", lambda_n(1e5, optimal_m(1e5, 0.6), 0.6))
