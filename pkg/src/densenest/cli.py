"""Config-driven command line for reproducible experiment runs.

Subcommands: ``defaults``, ``gen-data``, ``run``, ``analyze``, ``grid``.
Configuration is a plain-text key-value file with dotted sections; every key
can be overridden one-to-one with ``--set key=value``.  One master seed
deterministically derives the data, sampler and resampling child seeds, so a
whole pipeline is reproducible from the config file alone.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, toys
from .data import (XorRecipe, bounding_grid, generate, generate_test_suite,
                   read_dataset, write_dataset)
from .network import N_PARAMS, log_likelihood
from .prior import PriorSpec
from .sampler import NestedSampler, SamplerConfig, SamplerError, load_run, posterior_samples
from .seeds import child_seed

EXIT_CODES = {
    "config-error": 2,
    "data-error": 3,
    "sampler-error": 4,
    "prior-acceptance": 4,
    "replacement-budget": 4,
    "iteration-budget": 4,
    "io-error": 5,
}

PROBLEMS = ("xor", "gaussian", "bimodal")


class CliError(Exception):
    def __init__(self, message, category="config-error"):
        super().__init__(message)
        self.category = category


@dataclass
class RunConfig:
    """Everything a pipeline run depends on, seeds included."""

    seed: int = 42
    output_dir: str = "runs/default"
    problem: str = "xor"
    data_counts: tuple = (30, 100, 10, 80)
    data_noise_variance: float = 0.5
    prior_kind: str = "constrained-rejection"
    prior_bound: float = 5.0
    sampler_n_live: int = 1000
    sampler_n_prior: int | None = None
    sampler_num_repeats: int | None = None
    sampler_termination_tol: float = 1e-3
    sampler_cluster_check_interval: int | None = None
    sampler_stochastic_volumes: bool = False
    analysis_n_posterior_samples: int = 1000
    analysis_grid_spacing: float = 0.1
    analysis_n_test_sets: int = 10

    @property
    def dim(self) -> int:
        return N_PARAMS if self.problem == "xor" else 2

    def seeds(self) -> dict:
        return {
            "master": self.seed,
            "data": child_seed(self.seed, "data"),
            "sampler": child_seed(self.seed, "sampler"),
            "resample": child_seed(self.seed, "resample"),
        }

    def recipe(self) -> XorRecipe:
        return XorRecipe(counts=self.data_counts,
                         noise_variance=self.data_noise_variance)

    def prior(self) -> PriorSpec:
        kind = self.prior_kind
        if self.problem != "xor":
            kind = "full"   # toy targets are 2-D; constrained kinds need the weight block
        return PriorSpec(bound=self.prior_bound, kind=kind)

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(
            n_live=self.sampler_n_live,
            n_prior=self.sampler_n_prior,
            num_repeats=self.sampler_num_repeats,
            termination_tol=self.sampler_termination_tol,
            seed=self.seeds()["sampler"],
            cluster_check_interval=self.sampler_cluster_check_interval,
            stochastic_volumes=self.sampler_stochastic_volumes)


# mapping: config-file key -> (attribute, parser, formatter)
def _parse_counts(text):
    return tuple(int(x) for x in text.split(","))


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_optional_int(text):
    return None if text.strip().lower() == "auto" else int(text)


def _fmt_counts(v):
    return ",".join(str(int(x)) for x in v)


def _fmt_optional(v):
    return "auto" if v is None else str(v)


def _fmt_bool(v):
    return "true" if v else "false"


_KEYS = {
    "seed": ("seed", int, str),
    "output_dir": ("output_dir", str, str),
    "problem": ("problem", str, str),
    "data.counts": ("data_counts", _parse_counts, _fmt_counts),
    "data.noise_variance": ("data_noise_variance", float, repr),
    "prior.kind": ("prior_kind", str, str),
    "prior.bound": ("prior_bound", float, repr),
    "sampler.n_live": ("sampler_n_live", int, str),
    "sampler.n_prior": ("sampler_n_prior", _parse_optional_int, _fmt_optional),
    "sampler.num_repeats": ("sampler_num_repeats", _parse_optional_int, _fmt_optional),
    "sampler.termination_tol": ("sampler_termination_tol", float, repr),
    "sampler.cluster_check_interval": ("sampler_cluster_check_interval",
                                       _parse_optional_int, _fmt_optional),
    "sampler.stochastic_volumes": ("sampler_stochastic_volumes", _parse_bool, _fmt_bool),
    "analysis.n_posterior_samples": ("analysis_n_posterior_samples", int, str),
    "analysis.grid_spacing": ("analysis_grid_spacing", float, repr),
    "analysis.n_test_sets": ("analysis_n_test_sets", int, str),
}


def config_to_text(config: RunConfig, materialised: bool = False) -> str:
    """Serialise a config as sorted ``key = value`` lines.

    With ``materialised=True`` the auto fields are resolved and the derived
    child seeds are spelled out, so the echo carries no implicit entropy.
    """
    values = {}
    for key, (attr, _parse, fmt) in _KEYS.items():
        values[key] = fmt(getattr(config, attr))
    if materialised:
        sampler = config.sampler_config()
        values["sampler.n_prior"] = str(sampler.resolved_n_prior())
        values["sampler.num_repeats"] = str(sampler.resolved_num_repeats(config.dim))
        values["sampler.cluster_check_interval"] = str(sampler.resolved_check_interval())
        values["prior.kind"] = config.prior().kind
        for name, value in config.seeds().items():
            if name != "master":
                values[f"seed.{name}"] = str(value)
    lines = ["# densenest configuration"]
    lines += [f"{k} = {values[k]}" for k in sorted(values)]
    return "\n".join(lines) + "\n"


def parse_config_text(text, config: RunConfig | None = None) -> RunConfig:
    config = config or RunConfig()
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("seed."):
            continue   # derived seeds in materialised echoes are informative only
        if key not in _KEYS:
            raise CliError(f"line {lineno}: unknown config key {key!r}")
        attr, parse, _fmt = _KEYS[key]
        try:
            updates[attr] = parse(value)
        except ValueError as exc:
            raise CliError(f"line {lineno}: bad value for {key}: {exc}")
    return dataclasses.replace(config, **updates)


def load_config(path=None, overrides=()) -> RunConfig:
    config = RunConfig()
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read config {path}: {exc}", "io-error")
        config = parse_config_text(text, config)
    for item in overrides:
        if "=" not in item:
            raise CliError(f"--set expects key=value, got {item!r}")
        config = parse_config_text(item, config)
    if config.problem not in PROBLEMS:
        raise CliError(f"problem must be one of {PROBLEMS}, got {config.problem!r}")
    try:
        config.recipe()
        config.prior()
        config.sampler_config()
    except ValueError as exc:
        raise CliError(str(exc))
    return config


# ----------------------------------------------------------------------
# subcommands

def _dataset_paths(config: RunConfig):
    out = config.output_dir
    train = os.path.join(out, "train.csv")
    tests = [os.path.join(out, f"test-{k}.csv")
             for k in range(1, config.analysis_n_test_sets + 1)]
    return train, tests


def cmd_gen_data(config: RunConfig) -> int:
    recipe = config.recipe()
    seeds = config.seeds()
    os.makedirs(config.output_dir, exist_ok=True)
    train, tests = _dataset_paths(config)
    try:
        write_dataset(generate(recipe, seeds["data"], provenance="train"), train)
        suite = generate_test_suite(recipe, seeds["data"],
                                    n_sets=config.analysis_n_test_sets)
        for path, ds in zip(tests, suite):
            write_dataset(ds, path)
    except OSError as exc:
        raise CliError(f"cannot write dataset files under {config.output_dir}: {exc}",
                       "io-error")
    print(f"wrote {train}")
    for path in tests:
        print(f"wrote {path}")
    return 0


def _load_or_generate_data(config: RunConfig):
    train_path, test_paths = _dataset_paths(config)
    missing = [p for p in [train_path, *test_paths] if not os.path.exists(p)]
    if missing:
        cmd_gen_data(config)
    train = read_dataset(train_path, provenance="train")
    suite = [read_dataset(p, provenance=f"test-{k}")
             for k, p in enumerate(test_paths, start=1)]
    return train, suite


def _build_likelihood(config: RunConfig):
    if config.problem == "gaussian":
        return toys.unimodal_loglike, None
    if config.problem == "bimodal":
        return toys.bimodal_loglike, None
    train, suite = _load_or_generate_data(config)
    return (lambda theta: log_likelihood(theta, train)), (train, suite)


def cmd_run(config: RunConfig) -> int:
    os.makedirs(config.output_dir, exist_ok=True)
    loglike, datasets = _build_likelihood(config)
    sampler = NestedSampler(loglike, config.prior(), config.sampler_config(),
                            config.dim)
    try:
        run = sampler.run()
    except SamplerError as exc:
        raise CliError(str(exc), exc.category)

    extra = {
        "problem": config.problem,
        "seeds": config.seeds(),
        "config_text": config_to_text(config, materialised=True),
    }
    if datasets is not None:
        train, _suite = datasets
        extra["grid"] = bounding_grid(train, config.analysis_grid_spacing).to_dict()
        extra["n_test_sets"] = config.analysis_n_test_sets

    chain = os.path.join(config.output_dir, "chain.csv")
    summary = os.path.join(config.output_dir, "run.json")
    try:
        with open(os.path.join(config.output_dir, "config.txt"), "w") as fh:
            fh.write(config_to_text(config, materialised=True))
        run.save_chain(chain)
        run.save_summary(summary, extra=extra)
    except OSError as exc:
        raise CliError(f"cannot write run artifacts: {exc}", "io-error")

    leaves = run.leaf_clusters()
    prominent = analysis.prominent_modes(run)
    print(f"log_z = {run.log_z:.6f} +/- {run.log_z_err:.6f}  (H = {run.h:.3f})")
    print(f"iterations = {run.n_iterations}, likelihood evaluations = {run.n_like_evals}")
    print(f"leaf clusters = {len(leaves)}, prominent modes = {len(prominent)}")
    print(f"wrote {chain}")
    print(f"wrote {summary}")
    return 0


def _require(path):
    if not os.path.exists(path):
        raise CliError(f"missing required artifact: {path}", "data-error")
    return path


def cmd_analyze(run_dir, modes_all: bool = False) -> int:
    summary_path = _require(os.path.join(run_dir, "run.json"))
    chain_path = _require(os.path.join(run_dir, "chain.csv"))
    run = load_run(chain_path, summary_path)
    with open(summary_path) as fh:
        summary = json.load(fh)
    config = parse_config_text(summary["config_text"])
    seeds = summary["seeds"]

    out_dir = os.path.join(run_dir, "analysis")
    os.makedirs(out_dir, exist_ok=True)
    samples = posterior_samples(run, n=config.analysis_n_posterior_samples,
                                seed=seeds["resample"])

    leaf_table = [{
        "id": c.id, "log_z_local": (None if not math.isfinite(c.log_z_local)
                                    else c.log_z_local),
        "weight_share": analysis.weight_shares(run).get(c.id),
        "prominent": c.id in analysis.prominent_modes(run),
        "n_dead": c.n_dead,
    } for c in run.leaf_clusters()]

    if summary.get("problem") != "xor":
        # toy runs carry no datasets: emit the posterior draws and leaf table
        sample_path = os.path.join(out_dir, "posterior.csv")
        with open(sample_path, "w") as fh:
            cols = ",".join(f"theta_{i}" for i in range(run.dim))
            fh.write(f"mode,{cols}\n")
            for label, theta in zip(samples.mode_labels, samples.theta):
                fh.write(f"{int(label)}," + ",".join(f"{t:.17g}" for t in theta) + "\n")
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            json.dump({"run_id": run.run_id, "seeds": seeds, "leaves": leaf_table},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {sample_path}")
        print(f"wrote {os.path.join(out_dir, 'report.json')}")
        return 0

    train_path, test_paths = _dataset_paths(dataclasses.replace(config, output_dir=run_dir))
    train = read_dataset(_require(train_path), provenance="train")
    suite = [read_dataset(_require(p), provenance=f"test-{k}")
             for k, p in enumerate(test_paths, start=1)]

    mode_ids = analysis.prominent_modes(run)
    if modes_all:
        populated = sorted(set(samples.mode_labels.tolist()))
        mode_ids = sorted(set(mode_ids) | set(populated),
                          key=lambda cid: -analysis.leaf_log_z(run).get(cid, -np.inf))
    reports = analysis.mode_report(run, samples, train, suite,
                                   spacing=config.analysis_grid_spacing,
                                   modes=mode_ids)

    grid_files = {}
    for rep in reports:
        name = "grid_full.csv" if rep.mode_id is None else f"grid_mode_{rep.mode_id}.csv"
        rep.grid.save_csv(os.path.join(out_dir, name))
        grid_files[rep.mode_id] = name
    report_path = os.path.join(out_dir, "report.json")
    analysis.save_reports(reports, report_path, run_id=run.run_id, seeds=seeds,
                          leaf_table=leaf_table, grid_files=grid_files)

    print(f"prominent modes: {analysis.prominent_modes(run)}")
    for rep in reports:
        tag = "full" if rep.mode_id is None else f"mode {rep.mode_id}"
        print(f"  {tag}: share={rep.weight_share:.4f} "
              f"train<logL>={rep.train.mean:.4f} test<logL>={rep.test_pooled.mean:.4f}")
    print(f"wrote {report_path}")
    return 0


def cmd_grid(data_path, spacing, out=None) -> int:
    ds = read_dataset(_require(data_path))
    spec = bounding_grid(ds, spacing)
    text = json.dumps(spec.to_dict(), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {out}")
    else:
        print(text)
    return 0


# ----------------------------------------------------------------------
# argument plumbing

def _add_config_args(p):
    p.add_argument("--config", help="config file (key = value lines)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--out", help="shorthand for output_dir")
    p.add_argument("--seed", type=int, help="shorthand for seed")
    p.add_argument("--prior", help="shorthand for prior.kind")
    p.add_argument("--problem", help="shorthand for problem")


def _config_from_args(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.out:
        overrides.append(f"output_dir = {args.out}")
    if args.seed is not None:
        overrides.append(f"seed = {args.seed}")
    if args.prior:
        overrides.append(f"prior.kind = {args.prior}")
    if args.problem:
        overrides.append(f"problem = {args.problem}")
    return load_config(args.config, overrides)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="densenest",
        description="Nested-sampling marginalisation of a minimal dense classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("defaults", help="print the default configuration")

    p = sub.add_parser("gen-data", help="write the training and test CSV files")
    _add_config_args(p)

    p = sub.add_parser("run", help="run the sampler and write chain + summary")
    _add_config_args(p)

    p = sub.add_parser("analyze", help="mode reports and prediction grids for a run")
    p.add_argument("run_dir", help="directory containing chain.csv and run.json")
    p.add_argument("--modes", choices=["prominent", "all"], default="prominent",
                   help="which leaves get per-mode reports")

    p = sub.add_parser("grid", help="bounding grid of a dataset file")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--spacing", type=float, default=0.1)
    p.add_argument("--out", help="write the grid spec JSON here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "defaults":
            sys.stdout.write(config_to_text(RunConfig()))
            return 0
        if args.command == "gen-data":
            return cmd_gen_data(_config_from_args(args))
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        if args.command == "analyze":
            return cmd_analyze(args.run_dir, modes_all=(args.modes == "all"))
        if args.command == "grid":
            return cmd_grid(args.data, args.spacing, args.out)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        payload = {"category": exc.category, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)


if __name__ == "__main__":
    sys.exit(main())
