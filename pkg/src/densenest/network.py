"""The minimal dense feedforward classifier and its exact weight symmetries.

A single hidden layer of two sigmoid nodes followed by a sigmoid output node,
nine free parameters in total.  Parameter points are flat float64 vectors in
the frozen layout

    [w11, w12, w21, w22, b1, b2, v1, v2, c]

where ``w[i][j]`` connects input j to hidden node i, ``b`` are the hidden
biases, ``v`` the hidden-to-output weights and ``c`` the output bias.  All
file formats and chain columns follow this ordering.
"""

import warnings
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np
from scipy.special import expit

PARAM_NAMES = ("w11", "w12", "w21", "w22", "b1", "b2", "v1", "v2", "c")
N_PARAMS = len(PARAM_NAMES)

# clamp applied to predicted probabilities inside the log-likelihood only;
# keeps saturated sigmoids at the prior extremes away from log(0)
PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class Architecture:
    """Layer sizes of the classifier (fixed sigmoid activations)."""

    input_dim: int = 2
    hidden_dim: int = 2
    depth: int = 2

    @property
    def n_params(self) -> int:
        return (self.input_dim * self.hidden_dim + self.hidden_dim
                + self.hidden_dim + 1)


def unpack(theta):
    """Split a flat parameter vector into (W, b, v, c)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameters, got shape {theta.shape}")
    w = theta[:4].reshape(2, 2)
    return w, theta[4:6], theta[6:8], theta[8]


def pack(w, b, v, c) -> np.ndarray:
    """Flatten (W, b, v, c) back into the canonical parameter layout."""
    return np.concatenate([np.asarray(w, float).ravel(),
                           np.asarray(b, float).ravel(),
                           np.asarray(v, float).ravel(),
                           [float(c)]])


def forward(theta, x):
    """Class-1 probability of the network at input(s) ``x``.

    ``x`` may be a single 2-vector or an (n, 2) batch; the return value is a
    float or an (n,) array accordingly, always inside (0, 1).
    """
    w, b, v, c = unpack(theta)
    x = np.asarray(x, dtype=float)
    hidden = expit(x @ w.T + b)
    out = expit(hidden @ v + c)
    if x.ndim == 1:
        return float(out)
    return out


def log_likelihood(theta, data) -> float:
    """Bernoulli (two-class categorical) log-likelihood of a labelled set.

    ``data`` is anything with ``points`` (n, 2) and ``labels`` (n,) in {0, 1},
    or a plain ``(points, labels)`` pair.  Predicted probabilities are clamped
    to ``[PROB_CLAMP, 1 - PROB_CLAMP]`` so the result is finite; it is always
    <= 0.  An empty dataset yields 0.0 with a warning.
    """
    if hasattr(data, "points"):
        x, y = data.points, data.labels
    else:
        x, y = data
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if len(y) == 0:
        warnings.warn("log_likelihood evaluated on an empty dataset")
        return 0.0
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    p = np.clip(forward(theta, x), PROB_CLAMP, 1.0 - PROB_CLAMP)
    y = y.astype(float)
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


try:
    from numba import njit as _njit
except ImportError:            # pragma: no cover - numba is optional
    _njit = None

if _njit is not None:
    @_njit(cache=True)
    def _bce_kernel(theta, x, y):   # pragma: no cover - exercised via make_loglike
        total = 0.0
        for i in range(x.shape[0]):
            z1 = theta[0] * x[i, 0] + theta[1] * x[i, 1] + theta[4]
            z2 = theta[2] * x[i, 0] + theta[3] * x[i, 1] + theta[5]
            h1 = 1.0 / (1.0 + np.exp(-z1))
            h2 = 1.0 / (1.0 + np.exp(-z2))
            p = 1.0 / (1.0 + np.exp(-(theta[6] * h1 + theta[7] * h2 + theta[8])))
            if p < PROB_CLAMP:
                p = PROB_CLAMP
            elif p > 1.0 - PROB_CLAMP:
                p = 1.0 - PROB_CLAMP
            if y[i]:
                total += np.log(p)
            else:
                total += np.log1p(-p)
        return total


def make_loglike(data, compiled: bool = True):
    """Likelihood closure over a fixed dataset for the sampler's inner loop.

    Numerically equivalent to ``log_likelihood`` (property-tested); uses a
    compiled kernel when numba is available, a plain vectorised path
    otherwise.
    """
    if hasattr(data, "points"):
        x, y = data.points, data.labels
    else:
        x, y = data
    x = np.ascontiguousarray(x, dtype=float)
    y_bool = np.ascontiguousarray(np.asarray(y) == 1)
    if not np.all((np.asarray(y) == 0) | (np.asarray(y) == 1)):
        raise ValueError("labels must be 0 or 1")
    if len(y_bool) == 0:
        raise ValueError("cannot build a likelihood over an empty dataset")

    if compiled and _njit is not None:
        def loglike(theta):
            return float(_bce_kernel(theta, x, y_bool))
        return loglike

    y_float = y_bool.astype(float)

    def loglike(theta):
        w = theta[:4].reshape(2, 2)
        h = expit(x @ w.T + theta[4:6])
        p = np.clip(expit(h @ theta[6:8] + theta[8]), PROB_CLAMP, 1.0 - PROB_CLAMP)
        return float(np.sum(y_float * np.log(p) + (1.0 - y_float) * np.log1p(-p)))
    return loglike


@dataclass(frozen=True)
class SymmetryElement:
    """One element of the hidden-node symmetry group.

    ``permutation[i]`` is the original index of the node placed at position i;
    ``sign_flips[i]`` is +1 or -1 for the node at (new) position i.
    """

    permutation: tuple
    sign_flips: tuple

    def __post_init__(self):
        n = len(self.permutation)
        if sorted(self.permutation) != list(range(n)):
            raise ValueError("permutation must be a bijection on 0..n-1")
        if len(self.sign_flips) != n or any(s not in (-1, 1) for s in self.sign_flips):
            raise ValueError("sign_flips must be +/-1 per node")


def symmetry_group(n_hidden: int = 2):
    """All 2^N N! symmetry elements, identity first."""
    elements = []
    for perm in permutations(range(n_hidden)):
        for signs in product((1, -1), repeat=n_hidden):
            elements.append(SymmetryElement(perm, signs))
    return elements


def symmetry_transform(theta, g: SymmetryElement):
    """Apply a hidden-node permutation and sign flips to a parameter vector.

    Rows of W and the entries of b and v are reordered by the permutation;
    each flipped node has its W row, bias and output weight negated while the
    output bias absorbs the pre-flip output weight (sigma(-z) = 1 - sigma(z)).
    The transformed network computes exactly the same function.
    """
    w, b, v, c = unpack(theta)
    perm = list(g.permutation)
    signs = np.asarray(g.sign_flips, dtype=float)
    w2 = w[perm, :] * signs[:, None]
    b2 = b[perm] * signs
    v_perm = v[perm]
    c2 = c + float(np.sum(v_perm[signs < 0]))
    v2 = v_perm * signs
    return pack(w2, b2, v2, c2)
