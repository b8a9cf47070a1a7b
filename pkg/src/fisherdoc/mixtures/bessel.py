"""Log-domain evaluation of the von Mises-Fisher normalizing constant.

log C_d(kappa) = (d/2 - 1) log kappa - (d/2) log 2pi - log I_{d/2-1}(kappa)

scipy's exponentially-scaled Bessel ``ive`` covers most of the domain; it
underflows to zero when the order is large relative to the argument, where
the uniform asymptotic expansion for large order takes over.  The combination
stays finite for kappa in (0, 1e5] and d up to 1024."""

import numpy as np
from scipy import special


def log_bessel_i(nu, x):
    """log I_nu(x) for nu >= 0, x > 0, safe against ive underflow."""
    scaled = special.ive(nu, x)
    if scaled > 0.0:
        return float(np.log(scaled) + x)
    # uniform large-order expansion, leading term (Abramowitz & Stegun 9.7.7)
    z = x / nu
    t = np.hypot(1.0, z)
    eta = t + np.log(z) - np.log1p(t)
    return float(nu * eta - 0.5 * np.log(2.0 * np.pi * nu) - 0.5 * np.log(t))


def log_vmf_normalizer(d, kappa):
    """log C_d(kappa) of the d-dimensional VMF density."""
    nu = d / 2.0 - 1.0
    return (nu * np.log(kappa)
            - (d / 2.0) * np.log(2.0 * np.pi)
            - log_bessel_i(nu, kappa))
