"""Priors over the network parameters.

Three kinds share one uniform box (-bound, bound) per coordinate:

* ``full``: the plain box.
* ``constrained-rejection``: the box restricted to weight matrices whose
  symmetric part is positive definite and whose skew part is consistently
  oriented; the support is enforced by ``in_support``, not by the transform.
* ``constrained-constructive``: the same admissible set reached directly by
  parameterising W = L L^T + (U - U^T) with a positive-diagonal lower
  triangle L and a non-negative upper triangle U.

The sampler sees all of them through ``unit_to_physical`` on the unit
hypercube.  Constrained kinds act on the 2x2 input-to-hidden block only
(the first four coordinates); biases and output weights stay plain box.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import is_consistently_oriented, is_positive_definite, sym_skew_split

KINDS = ("full", "constrained-rejection", "constrained-constructive")


@dataclass(frozen=True)
class PriorSpec:
    """Box half-width and support kind for the parameter prior."""

    bound: float = 5.0
    kind: str = "full"

    def __post_init__(self):
        if not self.bound > 0:
            raise ValueError("bound must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def constrained(self) -> bool:
        return self.kind != "full"


def unit_to_physical(u, spec: PriorSpec) -> np.ndarray:
    """Map a unit-hypercube point to a physical parameter vector.

    ``full`` and ``constrained-rejection`` kinds scale each coordinate to the
    box.  The constructive kind maps the first four coordinates to
    (l11, l21, l22, u12) with l11, l22 in (0, bound], l21 in [-bound, bound]
    and u12 in [0, bound], then forms the weight block W = L L^T + (U - U^T);
    the remaining coordinates map as in the full kind.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError("unit-cube coordinates must lie in [0, 1]")
    b = spec.bound
    theta = b * (2.0 * u - 1.0)
    if spec.kind == "constrained-constructive":
        if u.shape[0] < 4:
            raise ValueError("constructive prior needs a weight block of 4 coordinates")
        l11 = b * u[0]
        l21 = b * (2.0 * u[1] - 1.0)
        l22 = b * u[2]
        u12 = b * u[3]
        theta[0] = l11 * l11
        theta[1] = l11 * l21 + u12
        theta[2] = l11 * l21 - u12
        theta[3] = l21 * l21 + l22 * l22
    return theta


def physical_to_unit(theta, spec: PriorSpec) -> np.ndarray:
    """Inverse of ``unit_to_physical`` for the box kinds (used in round trips)."""
    if spec.kind == "constrained-constructive":
        raise ValueError("constructive transform is not inverted")
    theta = np.asarray(theta, dtype=float)
    return (theta / spec.bound + 1.0) / 2.0


def weight_block(theta) -> np.ndarray:
    """The 2x2 input-to-hidden weight matrix from a flat parameter vector."""
    theta = np.asarray(theta, dtype=float)
    return theta[:4].reshape(2, 2)


def in_support(theta, spec: PriorSpec) -> bool:
    """Whether a parameter point lies in the prior support.

    All kinds require every coordinate inside the closed box.  Constrained
    kinds additionally require the symmetric part of the weight block to be
    positive definite and the skew part consistently oriented.
    """
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameters must be finite")
    if not np.all(np.abs(theta) <= spec.bound):
        return False
    if not spec.constrained:
        return True
    if theta.shape[0] < 4:
        raise ValueError("constrained support needs a weight block of 4 coordinates")
    sym, skew = sym_skew_split(weight_block(theta))
    return is_positive_definite(sym) and is_consistently_oriented(skew)


def make_transform_fn(spec: PriorSpec):
    """Fast unit-cube transform for the sampler's inner loop.

    Equivalent to ``unit_to_physical`` for in-cube input but without the
    range validation (the sampler checks the cube itself); the equivalence
    is property-tested.
    """
    b = spec.bound
    if spec.kind != "constrained-constructive":
        def transform(u):
            return b * (2.0 * u - 1.0)
        return transform

    def transform(u):
        theta = b * (2.0 * u - 1.0)
        l11 = b * u[0]
        l21 = theta[1]
        l22 = b * u[2]
        u12 = b * u[3]
        theta[0] = l11 * l11
        theta[1] = l11 * l21 + u12
        theta[2] = l11 * l21 - u12
        theta[3] = l21 * l21 + l22 * l22
        return theta
    return transform


def make_support_fn(spec: PriorSpec):
    """Fast support predicate for the sampler's inner loop.

    Scalar arithmetic specialised to the 2x2 weight block, equivalent to
    ``in_support`` (property-tested): box membership, strictly positive
    factorisation pivots of the symmetric part, non-negative upper entry of
    the skew part.
    """
    bound = spec.bound
    if not spec.constrained:
        def support(theta):
            return bool(np.max(np.abs(theta)) <= bound)
        return support

    def support(theta):
        if np.max(np.abs(theta)) > bound:
            return False
        w11 = theta[0]
        w22 = theta[3]
        if theta[1] < theta[2]:          # skew upper entry (w12 - w21)/2 < 0
            return False
        if w11 <= 0.0:                   # first pivot
            return False
        off = 0.5 * (theta[1] + theta[2])
        l21 = off / math.sqrt(w11)
        return w22 - l21 * l21 > 0.0     # second pivot
    return support


def acceptance_fraction(spec: PriorSpec, n_samples: int, seed: int,
                        dim: int = 9) -> float:
    """Monte-Carlo estimate of the support mass inside the full box.

    Draws ``n_samples`` box-uniform points and reports the fraction passing
    ``in_support``; exactly 1.0 for the full kind.
    """
    if n_samples < 1000:
        raise ValueError("need at least 1e3 samples for a stable estimate")
    rng = np.random.default_rng(seed)
    if not spec.constrained:
        # every box point is in support by construction
        return 1.0
    box = PriorSpec(bound=spec.bound, kind="full")
    hits = 0
    for _ in range(n_samples):
        theta = unit_to_physical(rng.random(dim), box)
        if in_support(theta, spec):
            hits += 1
    return hits / n_samples
