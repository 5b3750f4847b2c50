"""Post-run science on posterior samples and cluster evidences.

Prominent-mode selection by local-evidence ratio, per-mode and full-posterior
prediction grids, and per-point mean log-likelihood diagnostics on training
and test data.  Everything here reads finished run artifacts; nothing calls
back into the sampler.
"""

import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset, GridSpec, bounding_grid, DEFAULT_GRID_SPACING
from .network import forward, log_likelihood

# a mode is prominent when its local evidence is within this factor of the
# largest local evidence; at 1e-3 it contributes >= 1 expected draw per 1000
PROMINENCE_RATIO = 1e-3


@dataclass
class PosteriorSampleSet:
    """Equal-weight posterior draws with the leaf-cluster label per draw."""

    theta: np.ndarray
    mode_labels: np.ndarray
    run_id: str = ""

    def __len__(self) -> int:
        return len(self.mode_labels)

    def select(self, mode: int | None) -> np.ndarray:
        if mode is None:
            return self.theta
        picked = self.theta[self.mode_labels == mode]
        if len(picked) == 0:
            raise ValueError(f"no posterior samples carry mode label {mode}")
        return picked


@dataclass
class LogLikSummary:
    """Per-sample per-point mean log-likelihoods with mean and extremes."""

    values: np.ndarray
    mean: float
    min: float
    max: float

    @classmethod
    def from_values(cls, values) -> "LogLikSummary":
        values = np.asarray(values, dtype=float)
        return cls(values=values, mean=float(values.mean()),
                   min=float(values.min()), max=float(values.max()))

    def to_dict(self) -> dict:
        return {"mean": self.mean, "min": self.min, "max": self.max,
                "values": self.values.tolist()}


@dataclass
class PredictionGrid:
    """Mean class-1 probability over a regular input grid."""

    grid: GridSpec
    values: np.ndarray   # (n1, n2)

    def save_csv(self, path) -> None:
        """Rows x1,x2,mean_y in row-major grid order (x1 the slow axis)."""
        cells = self.grid.cells()
        flat = self.values.ravel()
        with open(path, "w") as fh:
            fh.write("x1,x2,mean_y\n")
            for (x1, x2), v in zip(cells, flat):
                fh.write(f"{x1:.17g},{x2:.17g},{v:.17g}\n")


@dataclass
class ModeReport:
    """Diagnostics for one mode (or the full posterior when mode_id is None)."""

    mode_id: int | None
    log_z_local: float
    weight_share: float
    prominent: bool
    n_samples: int
    train: LogLikSummary
    test_pooled: LogLikSummary
    test_per_set: list
    grid: PredictionGrid


def leaf_log_z(run) -> dict:
    """Leaf-cluster id -> local log-evidence for a finished run."""
    return {c.id: c.log_z_local for c in run.leaf_clusters()}


def prominent_modes(run) -> list:
    """Leaves within PROMINENCE_RATIO of the strongest local evidence.

    Returned in decreasing local-evidence order.  The criterion is a ratio,
    so it is invariant under any common shift of the local log-evidences.
    """
    locals_ = leaf_log_z(run)
    if not locals_:
        raise ValueError("run has no leaf clusters")
    top = max(locals_.values())
    cut = top + np.log(PROMINENCE_RATIO)
    keep = [cid for cid, lz in locals_.items() if lz >= cut]
    return sorted(keep, key=lambda cid: -locals_[cid])


def prediction_grid(samples: PosteriorSampleSet, grid: GridSpec,
                    mode: int | None = None) -> PredictionGrid:
    """Mean forward probability per grid cell over the (filtered) samples."""
    thetas = samples.select(mode)
    cells = grid.cells()
    acc = np.zeros(len(cells))
    for theta in thetas:
        acc += forward(theta, cells)
    acc /= len(thetas)
    return PredictionGrid(grid=grid, values=acc.reshape(grid.n1, grid.n2))


def loglik_diagnostic(samples: PosteriorSampleSet, data: Dataset,
                      mode: int | None = None) -> LogLikSummary:
    """Per-point mean log-likelihood of each (filtered) posterior sample."""
    thetas = samples.select(mode)
    if len(data) == 0:
        raise ValueError("cannot evaluate diagnostics on an empty dataset")
    vals = np.array([log_likelihood(theta, data) / len(data) for theta in thetas])
    return LogLikSummary.from_values(vals)


def weight_shares(run) -> dict:
    """Leaf id -> exp(log_z_local - log_z); shares over leaves sum to one."""
    return {cid: float(np.exp(lz - run.log_z))
            for cid, lz in leaf_log_z(run).items()}


def mode_report(run, samples: PosteriorSampleSet, train: Dataset,
                test_suite, spacing: float = DEFAULT_GRID_SPACING,
                modes: list | None = None) -> list:
    """One report per prominent mode plus one for the full posterior.

    ``modes`` overrides the prominent selection (e.g. every populated leaf).
    The test diagnostic pools all test sets into one evaluation; a per-set
    breakdown is attached as well.
    """
    if modes is None:
        modes = prominent_modes(run)
    grid = bounding_grid(train, spacing)
    pooled = Dataset(
        points=np.concatenate([d.points for d in test_suite]),
        labels=np.concatenate([d.labels for d in test_suite]),
        provenance="test-pooled")
    shares = weight_shares(run)
    locals_ = leaf_log_z(run)
    prominent = set(prominent_modes(run))

    reports = []
    for mode in [*modes, None]:
        reports.append(ModeReport(
            mode_id=mode,
            log_z_local=(run.log_z if mode is None else locals_[mode]),
            weight_share=(1.0 if mode is None else shares[mode]),
            prominent=(True if mode is None else mode in prominent),
            n_samples=int(len(samples.select(mode))),
            train=loglik_diagnostic(samples, train, mode),
            test_pooled=loglik_diagnostic(samples, pooled, mode),
            test_per_set=[loglik_diagnostic(samples, d, mode) for d in test_suite],
            grid=prediction_grid(samples, grid, mode)))
    return reports


def save_reports(reports, path, run_id: str, seeds: dict,
                 leaf_table: list | None = None,
                 grid_files: dict | None = None) -> None:
    """Write mode reports as one JSON document (grids referenced by file)."""
    doc = {
        "run_id": run_id,
        "seeds": seeds,
        "prominence_ratio": PROMINENCE_RATIO,
        "modes": [],
    }
    if leaf_table is not None:
        doc["leaves"] = leaf_table
    for rep in reports:
        entry = {
            "mode_id": rep.mode_id,
            "log_z_local": rep.log_z_local,
            "weight_share": rep.weight_share,
            "prominent": rep.prominent,
            "n_samples": rep.n_samples,
            "train": rep.train.to_dict(),
            "test_pooled": rep.test_pooled.to_dict(),
            "test_per_set": [s.to_dict() for s in rep.test_per_set],
            "grid_spec": rep.grid.grid.to_dict(),
        }
        if grid_files is not None:
            entry["grid_file"] = grid_files.get(rep.mode_id)
        doc["modes"].append(entry)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
