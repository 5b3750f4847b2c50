"""Full nested-sampling marginalisation of a minimal dense Bayesian classifier.

The package provides the 2-2-1 sigmoid network and its exact weight
symmetries, uniform and degeneracy-removing constrained priors, a
multimodality-aware nested sampler with local evidences, dataset generation
for the noisy-XOR task, and post-run diagnostics, all tied together by a
config-driven command line (`densenest --help`).
"""

from .data import Dataset, GridSpec, XorRecipe, bounding_grid, generate, generate_test_suite
from .network import (Architecture, SymmetryElement, forward, log_likelihood,
                      symmetry_group, symmetry_transform)
from .prior import PriorSpec, acceptance_fraction, in_support, unit_to_physical
from .sampler import (NSRun, NestedSampler, SamplerConfig, SamplerError,
                      load_run, posterior_samples, run_nested_sampling)
from .analysis import (LogLikSummary, ModeReport, PosteriorSampleSet,
                       PredictionGrid, loglik_diagnostic, mode_report,
                       prediction_grid, prominent_modes, weight_shares)

__version__ = "0.1.0"
