# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Monte Carlo Harness

File : simulation.py

Brief : This file contains the stratified finite-population Monte Carlo study
        that compares the empirical size of the debiased (DB) Wald tests with
        the survey t-test at the unpenalized MLE, for a coefficient and for an
        average marginal effect
"""

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.special import expit

from svylasso import results
from svylasso.debias import REPORT, debias_functional, debias_theta, svy_mle_ttest, wald_test
from svylasso.errors import ConfigError, SvyLassoError
from svylasso.glm import Dataset
from svylasso.lasso import PenaltySpec, cv_select_lambda, fit_penalized, theory_lambda
from svylasso.marginal import ame_functional, population_ame
from svylasso.validation import SIMULATION_SCHEMA, load_json_document

THETA = "theta"
AME = "ame"
DB = "DB"
T_SVY = "t_svy"
HYPOTHESES = (THETA, AME)
TESTS = (DB, T_SVY)
REPORT_COLUMNS = ("n", "p", "hypothesis", "test", "rejections", "reps", "failures", "nonconverged", "frequency",
                  "seed", "reliable", "canonical")
# Outcome key suffix marking a test computed from a non-converged or separated MLE
NONCONVERGED = "nonconverged"
# A cell whose failed share exceeds this is marked unreliable
_FAILURE_SHARE = 0.10
# Word separating the population stream from the (n, p) replication streams
_POPULATION_STREAM = 0


def _tuple(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(_tuple(v) if isinstance(v, (list, tuple)) else v for v in value)
    return value


@dataclass(frozen=True)
class SimulationConfig:
    population_size: int = 10000
    theta0: Optional[tuple] = None
    strata_sizes: tuple = (1000, 2000, 3000, 4000)
    sample_designs: tuple = ((50, 50, 50, 50), (100, 100, 100, 100))
    weights_per_stratum: tuple = (0.1, 0.2, 0.3, 0.4)
    p_over_n: tuple = (0.01, 0.025, 0.05, 0.1, 0.25, 0.5)
    p_values: Optional[tuple] = None
    replications: int = 1000
    nominal_level: float = 0.05
    null_theta: float = 1.0
    theta_index: int = 1
    null_ame: float = 0.11
    ame_index: int = 1
    success_probability: float = 0.5
    seed: Optional[int] = None
    n_folds: int = 10
    grid_size: int = 100
    fixed_lambda_constant: Optional[float] = None
    max_sweeps: int = 20000

    def __post_init__(self):
        for name in ("theta0", "strata_sizes", "sample_designs", "weights_per_stratum", "p_over_n", "p_values"):
            object.__setattr__(self, name, _tuple(getattr(self, name)))
        if sum(self.strata_sizes) != self.population_size:
            raise ConfigError("strata sizes sum to {}, population size is {}".format(sum(self.strata_sizes),
                                                                                  self.population_size))
        strata = len(self.strata_sizes)
        if len(self.weights_per_stratum) != strata:
            raise ConfigError("expected {} stratum weights, got {}".format(strata, len(self.weights_per_stratum)))
        if any(w <= 0.0 for w in self.weights_per_stratum):
            raise ConfigError("stratum weights must be positive")
        if not self.sample_designs:
            raise ConfigError("at least one sample design is required")
        for design in self.sample_designs:
            if len(design) != strata:
                raise ConfigError("sample design {} needs one draw count per stratum".format(design))
            if any(d < 1 for d in design):
                raise ConfigError("sample design {} has a stratum with no draws".format(design))
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if not 0.0 < self.nominal_level < 1.0:
            raise ConfigError("nominal level must lie in (0, 1)")
        if not 0.0 < self.success_probability < 1.0:
            raise ConfigError("success probability must lie in (0, 1)")
        if self.theta_index < 1 or self.ame_index < 1:
            raise ConfigError("tested regressor positions start at 1")
        if self.fixed_lambda_constant is not None and self.fixed_lambda_constant <= 0.0:
            raise ConfigError("fixed lambda constant must be positive")
        for design in self.sample_designs:
            n = sum(design)
            for p in self.p_for(n):
                self.theta0_for(p)
        if not self.weights_match_designs():
            logging.warning("SimulationConfig: stratum weights are not proportional to N_h / n_h")

    @classmethod
    def from_json(cls, path, **overrides):
        document = load_json_document(path, SIMULATION_SCHEMA, "simulation config")
        document.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**document)

    def to_dict(self):
        return {key: results.plain(value) for key, value in dataclasses.asdict(self).items()}

    def p_for(self, n):
        """Regressor counts studied at sample size n"""
        if self.p_values is not None:
            values = list(self.p_values)
        else:
            values = []
            for ratio in self.p_over_n:
                p = int(round(ratio * n))
                if p < 1 or abs(ratio * n - p) > 1e-6:
                    raise ConfigError("p/n ratio {} does not give a positive integer p at n={}".format(ratio, n))
                values.append(p)
        for p in values:
            if p < max(self.theta_index, self.ame_index):
                raise ConfigError("p={} is smaller than the tested regressor position".format(p))
        return values

    def theta0_for(self, p):
        """True parameter of length p + 1: theta0 padded with zeros, or (1, 1, 1, 0, ...)"""
        if self.theta0 is None:
            base = [1.0] * min(p + 1, 3)
        else:
            base = [float(v) for v in self.theta0]
        if len(base) > p + 1:
            if any(v != 0.0 for v in base[p + 1:]):
                raise ConfigError("theta0 has nonzero entries beyond p={}".format(p))
            base = base[:p + 1]
        return np.array(base + [0.0] * (p + 1 - len(base)))

    def weights_match_designs(self):
        """Whether every design's N_h / n_h ratios are proportional to the stratum weights"""
        weights = np.asarray(self.weights_per_stratum, dtype=float)
        weights = weights / weights.sum()
        for design in self.sample_designs:
            ratios = np.asarray(self.strata_sizes, dtype=float) / np.asarray(design, dtype=float)
            if not np.allclose(ratios / ratios.sum(), weights, rtol=0.0, atol=1e-9):
                return False
        return True


@dataclass(frozen=True, eq=False)
class Population:
    X: np.ndarray
    y: np.ndarray
    strata: np.ndarray
    theta0: np.ndarray

    @property
    def p(self):
        return self.X.shape[1] - 1

    def stratum_bounds(self):
        edges = np.concatenate(([0], np.cumsum(np.bincount(self.strata))))
        return list(zip(edges[:-1], edges[1:]))


def population_seed(config, p):
    if config.seed is None:
        raise ConfigError("the simulation population requires a seed")
    return np.random.SeedSequence([config.seed, _POPULATION_STREAM, p])


def generate_population(config, p, seed=None):
    """
    Finite population of N i.i.d. rows: Bernoulli regressors, logit outcome,
    strata as contiguous blocks of the configured sizes

    Args:
        config: A SimulationConfig
        p: Number of regressors
        seed: Seed or SeedSequence (default derived from config.seed and p)

    Returns:
        A Population
    """
    rng = np.random.default_rng(population_seed(config, p) if seed is None else seed)
    theta0 = config.theta0_for(p)
    regressors = (rng.random((config.population_size, p)) < config.success_probability).astype(float)
    X = np.column_stack((np.ones(config.population_size), regressors))
    y = (rng.random(config.population_size) < expit(X @ theta0)).astype(float)
    strata = np.repeat(np.arange(len(config.strata_sizes)), config.strata_sizes)
    for array in (X, y, strata):
        array.setflags(write=False)
    return Population(X, y, strata, theta0)


def draw_stratified_sample(pop, config, replication_seed, draws=None):
    """
    Stratified simple random sample with replacement; every sampled row carries its stratum's weight

    Args:
        pop: The Population
        config: The SimulationConfig
        replication_seed: Seed or SeedSequence of this replication
        draws: Per-stratum draw counts (default the first sample design)

    Returns:
        A Dataset with strata labels
    """
    draws = config.sample_designs[0] if draws is None else tuple(draws)
    rng = np.random.default_rng(replication_seed)
    rows = []
    weights = []
    for (start, stop), count, weight in zip(pop.stratum_bounds(), draws, config.weights_per_stratum):
        rows.append(rng.integers(start, stop, size=count))
        weights.append(np.full(count, float(weight)))
    rows = np.concatenate(rows)
    names = tuple("x{}".format(j) for j in range(1, pop.p + 1))
    return Dataset(pop.y[rows], pop.X[rows], np.concatenate(weights), names, strata=pop.strata[rows])


@dataclass(frozen=True)
class _CellTask:
    config: SimulationConfig
    draws: tuple


# Population and task of the current cell inside a worker process
_WORKER_STATE = {}


def _init_worker(pop, task):
    _WORKER_STATE["pop"] = pop
    _WORKER_STATE["task"] = task


def _pool_replication(seq):
    return run_replication(_WORKER_STATE["pop"], _WORKER_STATE["task"].config, _WORKER_STATE["task"].draws, seq)


def _attempt(label, outcomes, key, level, compute):
    try:
        result = compute()
        _, p_value = result
        outcomes[key] = bool(p_value < level)
        if getattr(result, "nonconverged", False):
            outcomes[key + (NONCONVERGED,)] = True
    except (SvyLassoError, linalg.LinAlgError) as e:
        logging.debug("run_replication: {} failed: {}: {}".format(label, e.__class__.__name__, e))
        outcomes[key] = None


def run_replication(pop, config, draws, seq):
    """
    One replication: draw a sample, tune and fit the svy LLasso, run the DB
    and t_svy tests of both hypotheses on that same sample

    Returns:
        A dict keyed by (hypothesis, test) with True (reject), False or None (failed);
        t_svy tests run on a non-converged or separated MLE also set
        (hypothesis, test, NONCONVERGED) to True
    """
    sample_seq, cv_seq = seq.spawn(2)
    data = draw_stratified_sample(pop, config, sample_seq, draws)
    level = config.nominal_level
    outcomes = {}
    fit = None
    try:
        if config.fixed_lambda_constant is not None:
            lam = theory_lambda(data.n, data.p, config.fixed_lambda_constant)
        else:
            cv_seed = int(cv_seq.generate_state(1)[0])
            lam = cv_select_lambda(data, config.n_folds, config.grid_size, seed=cv_seed,
                                   max_iter=config.max_sweeps).selected_lambda
        fit = fit_penalized(data, PenaltySpec(lam), max_iter=config.max_sweeps, log_level=logging.DEBUG)
    except (SvyLassoError, linalg.LinAlgError) as e:
        logging.debug("run_replication: svy LLasso fit failed: {}: {}".format(e.__class__.__name__, e))
    if fit is None:
        outcomes[(THETA, DB)] = None
        outcomes[(AME, DB)] = None
    else:
        _attempt("DB theta", outcomes, (THETA, DB), level,
                 lambda: wald_test(debias_theta(data, fit), config.null_theta, index=config.theta_index))
        _attempt("DB AME", outcomes, (AME, DB), level,
                 lambda: wald_test(debias_functional(data, fit, ame_functional(data, config.ame_index)),
                                   config.null_ame))
    _attempt("t_svy theta", outcomes, (THETA, T_SVY), level,
             lambda: svy_mle_ttest(data, config.null_theta, coefficient_index=config.theta_index,
                                   nonconverged=REPORT))
    _attempt("t_svy AME", outcomes, (AME, T_SVY), level,
             lambda: svy_mle_ttest(data, config.null_ame, ame_index=config.ame_index, nonconverged=REPORT))
    return outcomes


@dataclass(frozen=True)
class ReportRow:
    n: int
    p: int
    hypothesis: str
    test: str
    rejections: int
    reps: int
    failures: int
    nonconverged: int
    frequency: float
    seed: Optional[int]
    reliable: bool
    canonical: bool

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class SimulationReport:
    config: SimulationConfig
    rows: tuple
    population_ames: dict = field(default_factory=dict)

    @property
    def canonical(self):
        return self.config.fixed_lambda_constant is None

    def row(self, n, p, hypothesis, test):
        for row in self.rows:
            if (row.n, row.p, row.hypothesis, row.test) == (n, p, hypothesis, test):
                return row
        raise KeyError((n, p, hypothesis, test))

    def provenance(self):
        if self.canonical:
            policy = "cv-auc ({} folds, {} grid points) per replication".format(self.config.n_folds,
                                                                               self.config.grid_size)
        else:
            policy = "fixed {} * sqrt(log p / n) (non-canonical fast mode)".format(self.config.fixed_lambda_constant)
        return results.provenance(seed=self.config.seed, lam=policy,
                                  nominal_level=self.config.nominal_level,
                                  replications=self.config.replications,
                                  population_ames={str(p): value for p, value in sorted(self.population_ames.items())})

    def write_csv(self, path):
        return results.write_table([row.as_dict() for row in self.rows], REPORT_COLUMNS, path, results.CSV,
                                   self.provenance())

    def write_json(self, path):
        header = self.provenance()
        header["config"] = self.config.to_dict()
        return results.write_table([row.as_dict() for row in self.rows], REPORT_COLUMNS, path, results.JSON,
                                   header)

    def table(self):
        """
        Rejection frequencies in percent laid out with one row per
        (hypothesis, n, test) and one column per p
        """
        frame = pd.DataFrame([row.as_dict() for row in self.rows])
        if frame.empty:
            return frame
        frame["percent"] = (100.0 * frame["frequency"]).round(1)
        return frame.pivot_table(index=["hypothesis", "n", "test"], columns="p", values="percent", aggfunc="first")


def _cell_rows(config, n, p, outcomes):
    rows = []
    for hypothesis in HYPOTHESES:
        for test in TESTS:
            values = [outcome[(hypothesis, test)] for outcome in outcomes]
            failures = sum(value is None for value in values)
            rejections = sum(value is True for value in values)
            nonconverged = sum(bool(outcome.get((hypothesis, test, NONCONVERGED))) for outcome in outcomes)
            completed = len(values) - failures
            frequency = rejections / completed if completed else float("nan")
            reliable = failures <= _FAILURE_SHARE * len(values)
            if not reliable:
                logging.warning("run_study: cell n={}, p={}, {} {}: {} of {} replications failed; marked unreliable"
                                .format(n, p, hypothesis, test, failures, len(values)))
            elif failures:
                logging.info("run_study: cell n={}, p={}, {} {}: {} failed replications excluded"
                             .format(n, p, hypothesis, test, failures))
            rows.append(ReportRow(n, p, hypothesis, test, rejections, len(values), failures, nonconverged, frequency,
                                  config.seed, reliable, config.fixed_lambda_constant is None))
    return rows


def run_study(config, workers=1, progress=None):
    """
    Runs every (n, p) cell of the study

    Args:
        config: A SimulationConfig with a seed
        workers: Worker processes; results do not depend on it
        progress: Optional callable receiving one progress line per finished cell

    Returns:
        A SimulationReport
    """
    if config.seed is None:
        raise ConfigError("the simulation study requires a seed")
    rows = []
    population_ames = {}
    for draws in config.sample_designs:
        n = sum(draws)
        for p in config.p_for(n):
            pop = generate_population(config, p)
            population_ames[p] = population_ame(pop.theta0, config.ame_index, config.success_probability)
            seeds = np.random.SeedSequence([config.seed, n, p]).spawn(config.replications)
            task = _CellTask(config, tuple(draws))
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(pop, task)) as pool:
                    outcomes = list(pool.map(_pool_replication, seeds, chunksize=max(1, len(seeds) // (4 * workers))))
            else:
                outcomes = [run_replication(pop, config, task.draws, seq) for seq in seeds]
            cell = _cell_rows(config, n, p, outcomes)
            rows.extend(cell)
            if progress is not None:
                progress("n={} p={}: ".format(n, p) + ", ".join(
                    "{} {} {:.3f}".format(row.hypothesis, row.test, row.frequency) for row in cell))
    return SimulationReport(config, tuple(rows), population_ames)
