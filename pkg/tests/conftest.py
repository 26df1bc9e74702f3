"""Shared oracles for the test suite.

The brute-force Mellin oracle integrates x^(c-1+it) h(x) dx in log
coordinates with scipy's adaptive quadrature: only the plain x-domain
density formulas enter, so it is independent of the closed forms and of the
package's own grid quadrature.
"""

import numpy as np
import pytest
from scipy.integrate import quad

# log-coordinate density values: id -> (u_lo, u_hi, w) with w(u) = h(e^u),
# so that M_c[h](t) = int w(u) e^(c u) (cos(t u) + i sin(t u)) du
_LOG_DENSITIES = {
    "beta25": (-40.0, 0.0, lambda u: 30.0 * np.exp(u) * (1.0 - np.exp(u)) ** 4),
    "loggamma": (1e-12, 60.0, lambda u: (3125.0 / 24.0) * u**4 * np.exp(-6.0 * u)),
    "gamma5": (-40.0, 10.0, lambda u: np.exp(4.0 * u - np.exp(u)) / 24.0),
    "lognormal": (
        -8.0,
        8.0,
        lambda u: np.exp(-u * u / 0.08 - u) / np.sqrt(0.08 * np.pi),
    ),
    "noise_uniform": (np.log(0.5), np.log(1.5), lambda u: np.ones_like(np.asarray(u, dtype=float))),
    "noise_beta": (-40.0, 0.0, lambda u: 2.0 * np.exp(u)),
}


def mellin_quad_oracle(name: str, c: float, t: float) -> complex:
    """Brute-force Mellin transform of a catalog density by quadrature."""
    u_lo, u_hi, w = _LOG_DENSITIES[name]

    def re_part(u):
        return w(u) * np.exp(c * u) * np.cos(t * u)

    def im_part(u):
        return w(u) * np.exp(c * u) * np.sin(t * u)

    re, _ = quad(re_part, u_lo, u_hi, limit=800, epsabs=1e-10, epsrel=1e-10)
    im, _ = quad(im_part, u_lo, u_hi, limit=800, epsabs=1e-10, epsrel=1e-10)
    return complex(re, im)


def norm_sq_quad_oracle(name: str, c: float) -> float:
    """Brute-force weighted squared norm int h(x)^2 x^(2c-1) dx.

    In log coordinates the integrand is w(u)^2 e^(2cu) with w(u) = h(e^u).
    """
    u_lo, u_hi, w = _LOG_DENSITIES[name]

    def integrand(u):
        return w(u) ** 2 * np.exp(2.0 * c * u)

    val, _ = quad(integrand, u_lo, u_hi, limit=800, epsabs=1e-12, epsrel=1e-10)
    return val


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
