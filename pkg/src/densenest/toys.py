"""Analytic 2-D validation targets with known evidences under a box prior.

Both targets are normalised densities; with the uniform prior of half-width
``bound`` the evidence is exactly the in-box probability mass divided by the
box area, which is -log((2*bound)^2) to machine precision for the narrow
kernels used here.
"""

import math

import numpy as np

GAUSS_SIGMA = 0.1
BIMODAL_CENTERS = ((-2.0, -2.0), (2.0, 2.0))
BIMODAL_WEIGHTS = (0.7, 0.3)


def log_gaussian_2d(theta, center, sigma):
    d = np.asarray(theta, float) - np.asarray(center, float)
    return -0.5 * float(d @ d) / sigma**2 - math.log(2.0 * math.pi * sigma**2)


def unimodal_loglike(theta):
    """Normalised N(0, GAUSS_SIGMA^2 I2) density in log space."""
    return log_gaussian_2d(theta, (0.0, 0.0), GAUSS_SIGMA)


def unimodal_log_z(bound: float = 5.0) -> float:
    """Analytic log-evidence of the unimodal target under the box prior."""
    return -2.0 * math.log(2.0 * bound)


def bimodal_loglike(theta):
    """0.7/0.3 mixture of two narrow Gaussians on the box diagonal."""
    parts = [math.log(w) + log_gaussian_2d(theta, c, GAUSS_SIGMA)
             for w, c in zip(BIMODAL_WEIGHTS, BIMODAL_CENTERS)]
    return float(np.logaddexp(*parts))


def bimodal_log_z(bound: float = 5.0) -> float:
    return -2.0 * math.log(2.0 * bound)


def bimodal_local_log_z(bound: float = 5.0):
    """Analytic per-mode evidences, ordered like BIMODAL_CENTERS."""
    base = -2.0 * math.log(2.0 * bound)
    return tuple(base + math.log(w) for w in BIMODAL_WEIGHTS)
