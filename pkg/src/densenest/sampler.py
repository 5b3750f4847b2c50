"""Nested-sampling engine with multimodal cluster tracking.

The engine compresses a likelihood-ordered live-point population through
rising likelihood shells, accumulating the evidence integral with
deterministic prior-volume bookkeeping and attributing each shell to the
cluster its dead point belonged to, which yields per-mode (local) evidences
alongside the total.

Geometry lives in unit-hypercube coordinates; the prior module supplies the
physical transform and, for the rejection-constrained prior, the support
indicator (points outside the support count as log-likelihood -inf, which
plain slice shrinkage handles).

Volume bookkeeping uses the deterministic mean log-compression -1/m per
death, where m is the population of the cluster the death occurred in; the
total volume is the sum over active clusters, which in a single-cluster run
reduces to the familiar log X_i = -i/n_live (plus the offset from the boosted
initial population of ``n_prior`` points, which is reduced to ``n_live`` by
killing worst points without replacement, one compression step each).
Replacements spawn in a cluster chosen proportionally to its current volume
share, which keeps the per-cluster point density balanced; without that
feedback, frozen per-cluster populations are known to bias local evidences
of unequal modes.  Each dead point receives the trapezoidal shell weight
(X_{i-1} - X_{i+1})/2 of the total volume, which requires a one-death lag
before a death can be committed to the accumulators.

Likelihood ties are broken by birth order: the effective ordering is
lexicographic in (log L, birth index), so plateaus (e.g. a constant
likelihood) compress and terminate like any other problem.
"""

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .prior import PriorSpec, make_support_fn, make_transform_fn

__all__ = [
    "SamplerConfig", "SamplerError", "NestedSampler", "NSRun",
    "run_nested_sampling", "posterior_samples", "load_run",
]

_LOG_HALF = math.log(0.5)


class SamplerError(RuntimeError):
    """Raised when the sampler cannot honour its contracts (with a category)."""

    def __init__(self, message, category="sampler-error"):
        super().__init__(message)
        self.category = category


@dataclass(frozen=True)
class SamplerConfig:
    """Run-defining knobs; unset optional fields resolve from n_live and dim."""

    n_live: int = 1000
    n_prior: int | None = None            # default 10 * n_live
    num_repeats: int | None = None        # default 5 * dim
    termination_tol: float = 1e-3
    seed: int = 0
    cluster_check_interval: int | None = None  # default n_live // 2
    stochastic_volumes: bool = False
    max_iterations: int = 1_000_000

    def __post_init__(self):
        if self.n_live < 2:
            raise ValueError("n_live must be at least 2")
        if not (0.0 < self.termination_tol < 1.0):
            raise ValueError("termination_tol must lie in (0, 1)")
        if self.n_prior is not None and self.n_prior < self.n_live:
            raise ValueError("n_prior must be at least n_live")

    def resolved_n_prior(self) -> int:
        return self.n_prior if self.n_prior is not None else 10 * self.n_live

    def resolved_num_repeats(self, dim: int) -> int:
        return self.num_repeats if self.num_repeats is not None else 5 * dim

    def resolved_check_interval(self) -> int:
        if self.cluster_check_interval is not None:
            return self.cluster_check_interval
        return max(1, self.n_live // 2)


@dataclass
class _Cluster:
    id: int
    parent: int | None
    log_z_local: float = -np.inf
    h_local: float = 0.0
    log_x: float = -np.inf       # current prior-volume estimate of this cluster
    n_members: int = 0
    n_dead: int = 0
    n_live_ref: int = 0          # population scale for the local error estimate
    is_leaf: bool = True
    active: bool = True          # still holds volume (leaf with live members)


@dataclass(frozen=True)
class ClusterInfo:
    """Summary of one cluster-tree node as reported in a finished run."""

    id: int
    parent: int | None
    log_z_local: float
    log_z_local_err: float
    n_dead: int
    n_live_final: int
    is_leaf: bool


@dataclass
class NSRun:
    """A finished run: the dead-point chain plus evidence bookkeeping."""

    dead_theta: np.ndarray
    dead_logl: np.ndarray
    dead_logx: np.ndarray
    dead_logw: np.ndarray
    dead_cluster: np.ndarray
    dead_iteration: np.ndarray
    log_z: float
    log_z_err: float
    h: float
    clusters: list
    config: SamplerConfig
    prior: PriorSpec
    dim: int
    n_iterations: int
    n_like_evals: int
    run_id: str

    def leaf_clusters(self):
        return [c for c in self.clusters if c.is_leaf]

    def posterior_log_weights(self) -> np.ndarray:
        """log(L_i w_i / Z) per dead point; logsumexp is ~0 by construction."""
        return self.dead_logw + self.dead_logl - self.log_z

    def save_chain(self, path) -> None:
        """CSV chain: weight,log_l,cluster,theta_0..theta_{dim-1} in death order."""
        cols = ",".join(f"theta_{i}" for i in range(self.dim))
        weights = np.exp(self.posterior_log_weights())
        with open(path, "w") as fh:
            fh.write(f"weight,log_l,cluster,{cols}\n")
            for w, logl, cid, theta in zip(weights, self.dead_logl,
                                           self.dead_cluster, self.dead_theta):
                tvals = ",".join(f"{t:.17g}" for t in theta)
                fh.write(f"{w:.17g},{logl:.17g},{int(cid)},{tvals}\n")

    def summary_dict(self, extra: dict | None = None) -> dict:
        out = {
            "run_id": self.run_id,
            "log_z": self.log_z,
            "log_z_err": self.log_z_err,
            "h": self.h,
            "dim": self.dim,
            "n_iterations": self.n_iterations,
            "n_like_evals": self.n_like_evals,
            "clusters": [_json_safe(dataclasses.asdict(c)) for c in self.clusters],
            "config": {
                "n_live": self.config.n_live,
                "n_prior": self.config.resolved_n_prior(),
                "num_repeats": self.config.resolved_num_repeats(self.dim),
                "termination_tol": self.config.termination_tol,
                "seed": self.config.seed,
                "cluster_check_interval": self.config.resolved_check_interval(),
                "stochastic_volumes": self.config.stochastic_volumes,
                "max_iterations": self.config.max_iterations,
            },
            "prior": {"bound": self.prior.bound, "kind": self.prior.kind},
            "seeds": {"sampler": self.config.seed},
        }
        if extra:
            out.update(extra)
        return out

    def save_summary(self, path, extra: dict | None = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary_dict(extra), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _json_safe(d: dict) -> dict:
    """Replace non-finite floats with None so summaries stay strict JSON."""
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
            for k, v in d.items()}


def _update_log_z_h(log_z, h, logwt, logl):
    """One evidence/information update (log-space, Skilling recursion)."""
    if logwt == -np.inf:
        return log_z, h
    if log_z == -np.inf:
        log_z_new = logwt
        h_new = logl - log_z_new
    else:
        log_z_new = np.logaddexp(log_z, logwt)
        h_new = (math.exp(logwt - log_z_new) * logl
                 + math.exp(log_z - log_z_new) * (h + log_z)
                 - log_z_new)
    return float(log_z_new), float(h_new)


def _log_trapezoid(log_x_before, log_x_after):
    """log((X_before - X_after) / 2) computed stably in log space."""
    return log_x_before + math.log1p(-math.exp(log_x_after - log_x_before)) + _LOG_HALF


class NestedSampler:
    """Stateful engine; ``run()`` drives initialise/step/recluster to an NSRun."""

    def __init__(self, loglikelihood, prior: PriorSpec, config: SamplerConfig,
                 dim: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        if config.n_live < 2 * dim:
            raise ValueError("n_live must be at least 2 * dim")
        if prior.kind != "full" and dim < 4:
            raise ValueError("constrained priors need the 4-coordinate weight block")
        self.loglikelihood = loglikelihood
        self.prior = prior
        self.config = config
        self.dim = dim
        self.rng = np.random.default_rng(config.seed)
        self.n_live = config.n_live
        self.n_prior = config.resolved_n_prior()
        self.num_repeats = config.resolved_num_repeats(dim)
        self.check_interval = config.resolved_check_interval()
        self._transform = make_transform_fn(prior)
        self._support = (make_support_fn(prior)
                         if prior.kind == "constrained-rejection" else None)

        # live population
        self.live_u = None
        self.live_theta = None
        self.live_logl = None
        self.live_cluster = None
        self.live_birth = None

        # bookkeeping
        self.log_x = 0.0
        self.log_z = -np.inf
        self.h = 0.0
        self.iteration = 0
        self.steady_iteration = 0
        self.n_like_evals = 0
        self.clusters = {}
        self._next_cluster_id = 0
        self._birth_counter = 0
        self._pending = None
        self._dead = []              # committed rows [theta, logl, logx, logw, cluster, iteration]
        self.initialised = False

    # ------------------------------------------------------------------
    # point evaluation

    def _evaluate(self, u):
        """(theta, logl) for a cube point, or (None, -inf) outside the support."""
        if u.min() < 0.0 or u.max() > 1.0:
            return None, -np.inf
        theta = self._transform(u)
        if self._support is not None and not self._support(theta):
            return None, -np.inf
        self.n_like_evals += 1
        return theta, float(self.loglikelihood(theta))

    # ------------------------------------------------------------------
    # volume / evidence bookkeeping

    def _log_shrink(self, m):
        if self.config.stochastic_volumes:
            return math.log(self.rng.random()) / m
        return -1.0 / m

    def _refresh_total(self):
        parts = [node.log_x for node in self.clusters.values() if node.active]
        if len(parts) == 1:
            self.log_x = parts[0]
        else:
            self.log_x = float(np.logaddexp.reduce(np.array(parts)))

    def _kill(self, theta, logl, cluster_id, u):
        """Shrink the dying point's cluster volume and queue the death."""
        node = self.clusters[cluster_id]
        log_x_prev = self.log_x
        node.log_x += self._log_shrink(node.n_members)
        node.n_members -= 1
        if node.n_members == 0:
            # exhausted: the basin keeps its accumulated evidence but its
            # residual volume leaves the pool
            node.active = False
        self._refresh_total()
        self._record_death(theta, logl, cluster_id, log_x_prev, u)

    def _commit(self, record, log_x_after):
        """Close a pending death now that the following volume is known."""
        theta, logl, cluster_id, log_x_prev, log_x_here, iteration, _u = record
        logw = _log_trapezoid(log_x_prev, log_x_after)
        logwt = logw + logl
        self.log_z, self.h = _update_log_z_h(self.log_z, self.h, logwt, logl)
        node = self.clusters[cluster_id]
        node.log_z_local, node.h_local = _update_log_z_h(
            node.log_z_local, node.h_local, logwt, logl)
        node.n_dead += 1
        self._dead.append((theta, logl, log_x_here, logw, cluster_id, iteration))

    def _record_death(self, theta, logl, cluster_id, log_x_prev, u):
        if self._pending is not None:
            self._commit(self._pending, self.log_x)
        self._pending = (theta, logl, cluster_id, log_x_prev, self.log_x,
                         self.iteration, u)
        self.iteration += 1

    # ------------------------------------------------------------------
    # phases

    def initialise(self):
        """Draw the boosted prior population and reduce it to the live set.

        ``n_prior`` valid prior draws are evaluated; the worst
        ``n_prior - n_live`` die immediately (without replacement, with the
        population-size compression accounted per death) and the n_live
        highest-likelihood points become the initial live set.
        """
        n_prior, n_live, dim = self.n_prior, self.n_live, self.dim
        budget = 1000 * n_prior
        u_rows = np.empty((n_prior, dim))
        theta_rows = np.empty((n_prior, dim))
        logl_rows = np.empty(n_prior)
        got = 0
        attempts = 0
        while got < n_prior:
            if attempts >= budget:
                raise SamplerError(
                    f"prior acceptance too low: {got}/{n_prior} valid points "
                    f"after {attempts} draws", category="prior-acceptance")
            attempts += 1
            u = self.rng.random(dim)
            theta, logl = self._evaluate(u)
            if theta is None:
                continue
            u_rows[got] = u
            theta_rows[got] = theta
            logl_rows[got] = logl
            got += 1
        births = np.arange(n_prior)
        self._birth_counter = n_prior

        root = _Cluster(id=0, parent=None, log_x=0.0, n_members=n_prior,
                        n_live_ref=n_live)
        self.clusters = {0: root}
        self._next_cluster_id = 1
        self.log_x = 0.0

        order = np.lexsort((births, logl_rows))
        for k in range(n_prior - n_live):
            i = order[k]
            self._kill(theta_rows[i].copy(), float(logl_rows[i]), 0,
                       u_rows[i].copy())

        keep = order[n_prior - n_live:]
        self.live_u = u_rows[keep].copy()
        self.live_theta = theta_rows[keep].copy()
        self.live_logl = logl_rows[keep].copy()
        self.live_birth = births[keep].copy()
        self.live_cluster = np.zeros(n_live, dtype=int)
        self.initialised = True
        return self

    def _worst_index(self) -> int:
        lo = self.live_logl.min()
        tied = np.flatnonzero(self.live_logl == lo)
        if len(tied) == 1:
            return int(tied[0])
        return int(tied[np.argmin(self.live_birth[tied])])

    def step(self):
        """Kill the worst live point and grow a replacement above its level."""
        if not self.initialised:
            raise SamplerError("step() before initialise()")
        worst = self._worst_index()
        loglstar = float(self.live_logl[worst])
        rank_dead = int(self.live_birth[worst])
        cluster_id = int(self.live_cluster[worst])

        self._kill(self.live_theta[worst].copy(), loglstar, cluster_id,
                   self.live_u[worst].copy())

        home = self._choose_spawn_cluster()
        start = self._choose_start(home, exclude=worst)
        frame = self._whitening_frame(home, exclude=worst)
        u_new, theta_new, logl_new = self._slice_sample(
            self.live_u[start].copy(), loglstar, rank_dead, frame)

        self.live_u[worst] = u_new
        self.live_theta[worst] = theta_new
        self.live_logl[worst] = logl_new
        self.live_cluster[worst] = home
        self.live_birth[worst] = self._birth_counter
        self._birth_counter += 1
        self.clusters[home].n_members += 1
        self.steady_iteration += 1
        return self

    def _choose_spawn_cluster(self) -> int:
        """Pick the cluster for the replacement, proportional to volume share.

        Keeps the per-cluster live-point density balanced, so death rates
        track volume shares and local evidences of unequal modes stay
        unbiased.
        """
        ids = [cid for cid in sorted(self.clusters) if self.clusters[cid].active]
        if len(ids) == 1:
            return ids[0]
        log_x = np.array([self.clusters[cid].log_x for cid in ids])
        w = np.exp(log_x - log_x.max())
        w /= w.sum()
        pick = int(np.searchsorted(np.cumsum(w), self.rng.random()))
        return ids[min(pick, len(ids) - 1)]

    def _choose_start(self, cluster_id, exclude=None) -> int:
        """A uniformly chosen live member of the spawn cluster."""
        members = np.flatnonzero(self.live_cluster == cluster_id)
        if exclude is not None:
            members = members[members != exclude]
        return int(members[self.rng.integers(len(members))])

    def _whitening_frame(self, cluster_id, exclude=None):
        """Cholesky factor of the live-point covariance of one cluster.

        Falls back to the whole population when the cluster is too small to
        support a stable covariance estimate.
        """
        members = np.flatnonzero(self.live_cluster == cluster_id)
        if exclude is not None:
            members = members[members != exclude]
        if len(members) < self.dim + 2:
            members = np.flatnonzero(np.arange(self.n_live) != exclude)
        pts = self.live_u[members]
        cov = np.cov(pts, rowvar=False)
        cov = np.atleast_2d(cov)
        scale = max(1e-12, float(np.trace(cov)) / self.dim)
        cov = cov + (1e-10 * scale) * np.eye(self.dim)
        return np.linalg.cholesky(cov)

    def _slice_sample(self, u, loglstar, rank_dead, frame):
        """num_repeats chained 1-D slices in the whitened frame.

        Acceptance is lexicographic: a candidate passes when its likelihood
        exceeds the threshold, or equals it (its birth index is always newer
        than the dead point's), which keeps plateaus moving.
        """
        budget = max(10_000, 400 * self.num_repeats)
        evals = 0
        ties_seen = 0
        theta_keep, logl_keep = None, None

        def passes(cand):
            nonlocal evals, ties_seen
            evals += 1
            theta, logl = self._evaluate(cand)
            if logl == loglstar:
                ties_seen += 1
            return theta, logl, (theta is not None and logl >= loglstar)

        for _ in range(self.num_repeats):
            if evals > budget:
                raise SamplerError(
                    f"replacement search exceeded {budget} evaluations at "
                    f"threshold {loglstar:.6g} "
                    f"({ties_seen} candidates tied with the threshold"
                    f"{'; likelihood plateau suspected' if ties_seen else ''})",
                    category="replacement-budget")
            direction = self.rng.normal(size=self.dim)
            direction /= np.linalg.norm(direction)
            step_vec = frame @ direction

            r = self.rng.random()
            lo, hi = -r, 1.0 - r
            for _ in range(100):
                _, _, ok = passes(u + lo * step_vec)
                if not ok:
                    break
                lo -= 1.0
            for _ in range(100):
                _, _, ok = passes(u + hi * step_vec)
                if not ok:
                    break
                hi += 1.0

            while True:
                t = self.rng.uniform(lo, hi)
                cand = u + t * step_vec
                theta, logl, ok = passes(cand)
                if ok:
                    u = cand
                    theta_keep, logl_keep = theta, logl
                    break
                if t < 0.0:
                    lo = t
                else:
                    hi = t
                if hi - lo < 1e-14:
                    raise SamplerError(
                        "slice interval collapsed without an acceptable point; "
                        "the start point may violate the likelihood constraint",
                        category="replacement-budget")
        return u, theta_keep, logl_keep

    # ------------------------------------------------------------------
    # clustering

    def recluster(self):
        """Partition each active cluster into spatially separated parts.

        Two acceptance routes on whitened member coordinates, applied to a
        fixpoint so nested structure resolves within one pass: connected
        components of the kNN graph, and a recursive 2-means split accepted
        only when the centre separation clearly exceeds the within-part
        spread (clouds without real substructure stay below the threshold).
        Every accepted part must exceed 2*dim members; no-split is a valid
        outcome.
        """
        min_part = 2 * self.dim
        changed = True
        while changed:
            changed = False
            for cid in sorted(self.clusters):
                node = self.clusters[cid]
                if not node.is_leaf or node.n_members < 2 * (min_part + 1):
                    continue
                members = np.flatnonzero(self.live_cluster == cid)
                parts = self._split_members(members, min_part)
                if parts is None:
                    continue
                self._apply_split(node, members, parts)
                changed = True
        self._refresh_total()
        return self

    def _apply_split(self, node, members, parts):
        n_tot = len(members)
        for part in parts:
            share = len(part) / n_tot
            child = _Cluster(
                id=self._next_cluster_id, parent=node.id,
                log_z_local=(node.log_z_local + math.log(share)
                             if node.log_z_local > -np.inf else -np.inf),
                h_local=(node.h_local - math.log(share)
                         if node.log_z_local > -np.inf else 0.0),
                log_x=node.log_x + math.log(share),
                n_members=len(part), n_live_ref=len(part))
            self.clusters[child.id] = child
            self.live_cluster[part] = child.id
            self._next_cluster_id += 1
        node.is_leaf = False
        node.active = False
        node.log_x = -np.inf
        node.n_members = 0
        if self._pending is not None and self._pending[2] == node.id:
            self._reassign_pending(parts)

    def _split_members(self, members, min_part):
        """Return member-index parts if the cluster separates, else None."""
        pts = self._whiten_points(self.live_u[members])
        parts = self._knn_parts(pts, min_part)
        if parts is None:
            parts = self._two_means_parts(pts, min_part)
        if parts is None:
            return None
        return [members[np.sort(part)] for part in parts]

    def _knn_parts(self, pts, min_part):
        n = len(pts)
        k = min(10, n - 1)
        if k < 1:
            return None
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        neigh = np.argpartition(d2, k - 1, axis=1)[:, :k]
        rows = np.repeat(np.arange(n), k)
        cols = neigh.ravel()
        ones = np.ones(len(rows), dtype=np.int8)
        adj = coo_matrix((ones, (rows, cols)), shape=(n, n))
        n_comp, labels = connected_components(adj, directed=False)
        if n_comp < 2:
            return None
        comps = [np.flatnonzero(labels == c) for c in range(n_comp)]
        big = [c for c in comps if len(c) > min_part]
        if len(big) < 2:
            return None
        small = [c for c in comps if len(c) <= min_part]
        assigned = [list(c) for c in big]
        for c in small:
            # attach to the nearest accepted part (single linkage)
            best, best_d = 0, np.inf
            for bi, b in enumerate(big):
                d = d2[np.ix_(c, b)].min()
                if d < best_d:
                    best, best_d = bi, d
            assigned[best].extend(c.tolist())
        return [np.asarray(part) for part in assigned]

    # a 2-means split is accepted when the centre distance exceeds this many
    # times the summed within-part projected spreads (unimodal clouds --
    # gaussian, uniform ball or box, 2-D or 9-D -- calibrate below ~1.85)
    # AND the central band between the centres is essentially empty
    # (halving a single blob puts its densest region right there)
    SPLIT_RATIO = 2.0
    SPLIT_MID_FRACTION = 0.02

    def _two_means_parts(self, pts, min_part):
        """Deterministic 2-means with a separation acceptance test.

        Splits bridged blob pairs that stay connected in any neighbour
        graph; the acceptance criteria keep single blobs intact.  The
        separation statistic is noisy on small parts, so this route demands
        twice the usual part size.
        """
        min_part = 2 * min_part
        n = pts.shape[0]
        centred = pts - pts.mean(axis=0)
        # initialise at the extremes of the principal axis
        _, _, vt = np.linalg.svd(centred, full_matrices=False)
        proj = centred @ vt[0]
        centers = np.stack([pts[int(np.argmin(proj))], pts[int(np.argmax(proj))]])
        labels = np.zeros(n, dtype=bool)
        for it in range(100):
            d0 = np.sum((pts - centers[0]) ** 2, axis=1)
            d1 = np.sum((pts - centers[1]) ** 2, axis=1)
            new = d1 < d0
            if it > 0 and np.array_equal(new, labels):
                break
            labels = new
            if labels.all() or not labels.any():
                return None
            centers = np.stack([pts[~labels].mean(axis=0), pts[labels].mean(axis=0)])
        sizes = (int((~labels).sum()), int(labels.sum()))
        if min(sizes) <= min_part:
            return None
        axis = centers[1] - centers[0]
        gap = np.linalg.norm(axis)
        if gap == 0.0:
            return None
        axis /= gap
        spread0 = float(((pts[~labels] - centers[0]) @ axis).std())
        spread1 = float(((pts[labels] - centers[1]) @ axis).std())
        if gap < self.SPLIT_RATIO * (spread0 + spread1):
            return None
        t = ((pts - centers[0]) @ axis) / gap
        mid_fraction = float(np.mean(np.abs(t - 0.5) < 0.1))
        if mid_fraction > self.SPLIT_MID_FRACTION:
            return None
        return [np.flatnonzero(~labels), np.flatnonzero(labels)]

    def _whiten_points(self, pts):
        mu = pts.mean(axis=0)
        cov = np.atleast_2d(np.cov(pts, rowvar=False))
        scale = max(1e-12, float(np.trace(cov)) / self.dim)
        cov = cov + (1e-10 * scale) * np.eye(self.dim)
        chol = np.linalg.cholesky(cov)
        return np.linalg.solve(chol, (pts - mu).T).T

    def _reassign_pending(self, parts):
        """Move an uncommitted death from a split cluster to its nearest child."""
        u_dead = self._pending[6]
        best_id, best_d = None, np.inf
        for part in parts:
            cid = int(self.live_cluster[part[0]])
            d = np.min(np.sum((self.live_u[part] - u_dead) ** 2, axis=1))
            if d < best_d:
                best_id, best_d = cid, d
        self._pending = self._pending[:2] + (best_id,) + self._pending[3:]

    # ------------------------------------------------------------------
    # full run

    def _should_terminate(self) -> bool:
        if self.log_z == -np.inf:
            return False
        ceiling = float(self.live_logl.max()) + self.log_x
        return ceiling < math.log(self.config.termination_tol) + self.log_z

    def run(self) -> NSRun:
        self.initialise()
        while True:
            if self.iteration >= self.config.max_iterations:
                raise SamplerError(
                    f"no convergence within {self.config.max_iterations} iterations",
                    category="iteration-budget")
            if (self.steady_iteration > 0
                    and self.steady_iteration % self.check_interval == 0):
                self.recluster()
            self.step()
            if self._should_terminate():
                break
        return self._finalise()

    def _finalise(self) -> NSRun:
        # close the lagged trapezoid with the hypothetical next volume
        if self._pending is not None:
            self._commit(self._pending, self.log_x + self._log_shrink(self.n_live))
            self._pending = None

        # remaining live points become dead points with equal residual volume
        order = np.lexsort((self.live_birth, self.live_logl))
        n_rem = len(order)
        logw = self.log_x - math.log(n_rem)
        for idx in order:
            logl = float(self.live_logl[idx])
            cid = int(self.live_cluster[idx])
            logwt = logw + logl
            self.log_z, self.h = _update_log_z_h(self.log_z, self.h, logwt, logl)
            node = self.clusters[cid]
            node.log_z_local, node.h_local = _update_log_z_h(
                node.log_z_local, node.h_local, logwt, logl)
            node.n_dead += 1
            self._dead.append((self.live_theta[idx].copy(), logl, self.log_x,
                               logw, cid, self.iteration))
            self.iteration += 1

        k = len(self._dead)
        dead_theta = np.array([d[0] for d in self._dead])
        dead_logl = np.array([d[1] for d in self._dead])
        dead_logx = np.array([d[2] for d in self._dead])
        dead_logw = np.array([d[3] for d in self._dead])
        dead_cluster = np.array([d[4] for d in self._dead], dtype=int)
        dead_iteration = np.array([d[5] for d in self._dead], dtype=int)

        h = max(0.0, self.h)
        infos = []
        for cid in sorted(self.clusters):
            node = self.clusters[cid]
            err = math.sqrt(max(0.0, node.h_local) / max(1, node.n_live_ref))
            infos.append(ClusterInfo(
                id=node.id, parent=node.parent,
                log_z_local=float(node.log_z_local),
                log_z_local_err=err, n_dead=node.n_dead,
                n_live_final=node.n_members, is_leaf=node.is_leaf))

        from .seeds import child_seed
        fingerprint = (f"{self.prior.kind}/{self.prior.bound}/{self.dim}/"
                       f"{self.config.n_live}/{self.n_prior}/{self.num_repeats}/"
                       f"{self.config.termination_tol}/{self.config.seed}")
        run_id = f"{child_seed(0, fingerprint):016x}"

        return NSRun(
            dead_theta=dead_theta, dead_logl=dead_logl, dead_logx=dead_logx,
            dead_logw=dead_logw, dead_cluster=dead_cluster,
            dead_iteration=dead_iteration,
            log_z=float(self.log_z), log_z_err=math.sqrt(h / self.n_live),
            h=h, clusters=infos, config=self.config, prior=self.prior,
            dim=self.dim, n_iterations=int(self.iteration),
            n_like_evals=int(self.n_like_evals), run_id=run_id)


def run_nested_sampling(loglikelihood, prior: PriorSpec, config: SamplerConfig,
                        dim: int) -> NSRun:
    """Convenience wrapper: build a sampler and run it to completion."""
    return NestedSampler(loglikelihood, prior, config, dim).run()


def posterior_samples(run: NSRun, n: int = 1000, seed: int = 0):
    """Equal-weight posterior draws via systematic resampling of the chain.

    Each sample carries the leaf-cluster label of the dead point it came
    from.  Deterministic for a fixed seed.
    """
    from .analysis import PosteriorSampleSet
    logp = run.posterior_log_weights()
    p = np.exp(logp)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    positions = (rng.random() + np.arange(n)) / n
    idx = np.searchsorted(np.cumsum(p), positions)
    idx = np.clip(idx, 0, len(p) - 1)
    return PosteriorSampleSet(theta=run.dead_theta[idx].copy(),
                              mode_labels=run.dead_cluster[idx].copy(),
                              run_id=run.run_id)


def load_run(chain_path, summary_path) -> NSRun:
    """Rebuild an NSRun from its chain CSV and summary JSON artifacts."""
    with open(summary_path) as fh:
        summary = json.load(fh)
    dim = int(summary["dim"])
    rows = np.loadtxt(chain_path, delimiter=",", skiprows=1, ndmin=2)
    if rows.shape[1] != 3 + dim:
        raise ValueError(f"chain has {rows.shape[1]} columns, expected {3 + dim}")
    weight = rows[:, 0]
    dead_logl = rows[:, 1]
    dead_cluster = rows[:, 2].astype(int)
    dead_theta = rows[:, 3:]
    log_z = float(summary["log_z"])
    with np.errstate(divide="ignore"):
        dead_logw = np.log(weight) + log_z - dead_logl

    cfg = summary["config"]
    config = SamplerConfig(
        n_live=int(cfg["n_live"]), n_prior=int(cfg["n_prior"]),
        num_repeats=int(cfg["num_repeats"]),
        termination_tol=float(cfg["termination_tol"]), seed=int(cfg["seed"]),
        cluster_check_interval=int(cfg["cluster_check_interval"]),
        stochastic_volumes=bool(cfg["stochastic_volumes"]),
        max_iterations=int(cfg["max_iterations"]))
    prior = PriorSpec(bound=float(summary["prior"]["bound"]),
                      kind=summary["prior"]["kind"])
    clusters = [ClusterInfo(
        id=int(c["id"]),
        parent=None if c["parent"] is None else int(c["parent"]),
        log_z_local=(-np.inf if c["log_z_local"] is None
                     else float(c["log_z_local"])),
        log_z_local_err=float(c["log_z_local_err"]),
        n_dead=int(c["n_dead"]), n_live_final=int(c["n_live_final"]),
        is_leaf=bool(c["is_leaf"])) for c in summary["clusters"]]

    return NSRun(
        dead_theta=dead_theta, dead_logl=dead_logl,
        dead_logx=np.full(len(dead_logl), np.nan), dead_logw=dead_logw,
        dead_cluster=dead_cluster,
        dead_iteration=np.arange(len(dead_logl)),
        log_z=log_z, log_z_err=float(summary["log_z_err"]),
        h=float(summary["h"]), clusters=clusters, config=config, prior=prior,
        dim=dim, n_iterations=int(summary["n_iterations"]),
        n_like_evals=int(summary["n_like_evals"]), run_id=summary["run_id"])
