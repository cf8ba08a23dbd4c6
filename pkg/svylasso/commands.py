# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Tool Commands

File : commands.py

Brief : This file contains the operations behind the svy_llasso tool: fit,
        cv, ame, simulate and expand. Each reads its inputs, calls the library
        and writes its tables into the output directory
"""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from svylasso import results as tables
from svylasso.debias import debias_functional, debias_theta
from svylasso.errors import ConfigError, SvyLassoError, UsageError
from svylasso.features import ColumnSpec, compare_expansion_degrees, expand_interactions, load_csv, write_csv
from svylasso.lasso import PenaltySpec, cv_select_lambda, fit_adaptive, fit_penalized
from svylasso.marginal import ame_functional
from svylasso.simulation import SimulationConfig, run_study

COMMANDS = ("fit", "cv", "ame", "simulate", "expand")
WORKERS_ENV = "SVY_LLASSO_WORKERS"
COEFFICIENT_COLUMNS = ("name", "lasso_estimate", "debiased_estimate", "std_error", "p_value")
AME_COLUMNS = ("name", "ame_estimate", "debiased_ame", "std_error", "p_value")
COMPARISON_COLUMNS = ("degree", "p", "lambda_cv", "cv_error", "preferred")
CV_LOSS_NOTE = ("CV error is 1 - weighted out-of-fold AUC on identical folds; "
                "mean-squared CV error from other adaptive-Lasso tools is a different loss")


def file_logger(file_name, log_format, log_level=logging.DEBUG):
    """
    Sends library logging to a file

    Args:
        file_name: The log file
        log_format: The logging format string
        log_level: The level recorded

    Returns:
        The configured root logger
    """
    handler = logging.FileHandler(file_name)
    handler.setFormatter(logging.Formatter(log_format))
    logger = logging.getLogger()
    logger.addHandler(handler)
    logger.setLevel(log_level)
    return logger


def resolve_workers(value=None):
    """Worker count from the flag, else from SVY_LLASSO_WORKERS, else 1"""
    if value is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError("{} must be an integer, got {!r}".format(WORKERS_ENV, raw))
    if value < 1:
        raise ConfigError("worker count must be at least 1, got {}".format(value))
    return value


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[str] = None
    mapping: Optional[str] = None
    lam: Optional[float] = None
    cv: bool = False
    cv_folds: Optional[int] = None
    grid_size: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    fmt: str = tables.CSV
    reps: Optional[int] = None
    n: Optional[tuple] = None
    p_over_n: Optional[tuple] = None
    degree: int = 2
    config: Optional[str] = None
    workers: Optional[int] = None
    ridge: bool = False
    fast_lambda: Optional[float] = None
    ame: tuple = ()
    adaptive: bool = False

    def __post_init__(self):
        for name in ("n", "p_over_n"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "ame", tuple(self.ame or ()))
        if self.command not in COMMANDS:
            raise UsageError("unknown command '{}'; choose one of {}".format(self.command, ", ".join(COMMANDS)))
        if self.fmt not in tables.FORMATS:
            raise UsageError("unknown output format '{}'".format(self.fmt))
        if self.lam is not None and self.cv:
            raise UsageError("--lambda and --cv are mutually exclusive")
        if self.command in ("fit", "ame") and self.lam is None and not self.cv:
            raise UsageError("{} needs --lambda or --cv".format(self.command))
        if self.command in ("fit", "cv", "ame", "expand") and (self.input is None or self.mapping is None):
            raise UsageError("{} needs --input and --mapping".format(self.command))
        if self.command == "cv" and self.seed is None:
            raise UsageError("cv requires --seed")
        if self.command == "simulate" and self.seed is None:
            raise UsageError("simulate requires --seed")
        if self.cv and self.seed is None:
            raise UsageError("--cv requires --seed")

    @property
    def n_folds(self):
        return 10 if self.cv_folds is None else self.cv_folds

    @property
    def grid_points(self):
        return 100 if self.grid_size is None else self.grid_size

    @classmethod
    def from_args(cls, args):
        return cls(command=args.command, input=args.input, mapping=args.mapping, lam=args.lam, cv=args.cv,
                   cv_folds=args.cv_folds, grid_size=args.grid_size, seed=args.seed, out=args.directory,
                   fmt=args.format, reps=args.reps, n=args.n, p_over_n=args.p_over_n, degree=args.degree,
                   config=args.config, workers=args.workers, ridge=args.ridge, fast_lambda=args.fast_lambda,
                   ame=args.ame, adaptive=args.adaptive)


def _load(config):
    spec = ColumnSpec.from_json(config.mapping)
    return spec, load_csv(config.input, spec)


def _tuned_fit(config, data):
    """
    Fits the svy LLasso at the user's lambda or at the cross-validated one

    Returns:
        (fit, provenance fields)
    """
    if config.lam is not None:
        fit = fit_penalized(data, PenaltySpec(config.lam))
        return fit, {"lambda_policy": "user"}
    workers = resolve_workers(config.workers)
    if config.adaptive:
        fit, path, _ = fit_adaptive(data, config.n_folds, config.grid_points, seed=config.seed, workers=workers)
        policy = "adaptive cv-auc"
    else:
        path = cv_select_lambda(data, config.n_folds, config.grid_points, seed=config.seed, workers=workers)
        fit = fit_penalized(data, PenaltySpec(path.selected_lambda))
        policy = "cv-auc"
    return fit, {"lambda_policy": policy, "cv_folds": config.n_folds, "cv_error": path.cv_error,
                 "lambda_1se": path.one_se_lambda}


def _fit_header(config, fit, fields, diagnostics):
    return tables.provenance(seed=config.seed, lam=fit.lam, converged=fit.converged, m0_hat=fit.m0_hat,
                             solver=fit.solver, separation=fit.separation, **fields,
                             diagnostics=diagnostics)


def _write(config, results, stem, rows, columns, header, step):
    path = results.output_path("{}.{}".format(stem, config.fmt))
    tables.write_table(rows, columns, path, config.fmt, header)
    results.add_output_file(path)
    results.update_step_results(step, 0, None)
    return path


def cmd_fit(config, results):
    """Writes the coefficient table: lasso estimate, debiased estimate, std error and p-value"""
    _, data = _load(config)
    fit, fields = _tuned_fit(config, data)
    est = debias_theta(data, fit, ridge=config.ridge)
    lasso = fit.theta_vector
    rows = [{"name": name, "lasso_estimate": lasso[k], "debiased_estimate": est.estimate[k],
             "std_error": est.std_errors[k], "p_value": est.p_values[k]} for k, name in enumerate(est.names)]
    header = _fit_header(config, fit, fields, est.diagnostics)
    return [_write(config, results, "coefficients", rows, COEFFICIENT_COLUMNS, header, "Coefficient Table")]


def cmd_cv(config, results):
    """Writes the lambda path with mean, standard error and per-fold weighted AUC"""
    _, data = _load(config)
    workers = resolve_workers(config.workers)
    path = cv_select_lambda(data, config.n_folds, config.grid_points, seed=config.seed, workers=workers)
    rows = []
    for k, lam in enumerate(path.grid):
        row = {"lambda": lam, "mean_auc": path.mean_scores[k], "auc_se": path.se_scores[k]}
        row.update({"fold_{}".format(f + 1): path.cv_scores[f, k] for f in range(path.n_folds)})
        rows.append(row)
    columns = ("lambda", "mean_auc", "auc_se") + tuple("fold_{}".format(f + 1) for f in range(path.n_folds))
    header = tables.provenance(seed=config.seed, lam=path.selected_lambda, lambda_min=path.selected_lambda,
                               lambda_1se=path.one_se_lambda, lambda_max=path.lambda_max, cv_folds=path.n_folds,
                               cv_error=path.cv_error)
    return [_write(config, results, "lambda_path", rows, columns, header, "Lambda Path")]


def cmd_ame(config, results):
    """Writes plug-in and debiased AMEs with std errors and p-values for the requested dummies"""
    spec, data = _load(config)
    names = config.ame or spec.ame_columns
    if not names:
        raise UsageError("ame needs --ame names or ame_columns in the mapping")
    positions = [data.column_index(name) for name in names]
    functionals = [ame_functional(data, j) for j in positions]
    fit, fields = _tuned_fit(config, data)
    rows = []
    diagnostics = {}
    for name, rho in zip(names, functionals):
        est = debias_functional(data, fit, rho, ridge=config.ridge)
        diagnostics = est.diagnostics
        rows.append({"name": name, "ame_estimate": est.plug_in[0], "debiased_ame": est.estimate[0],
                     "std_error": est.std_errors[0], "p_value": est.p_values[0]})
    header = _fit_header(config, fit, fields, diagnostics)
    return [_write(config, results, "ame", rows, AME_COLUMNS, header, "AME Table")]


def simulation_config(config):
    """SimulationConfig from the optional JSON file with command-line overrides"""
    overrides = {"seed": config.seed, "replications": config.reps, "fixed_lambda_constant": config.fast_lambda}
    if config.n is not None:
        designs = []
        for n in config.n:
            if n % 4:
                raise UsageError("--n {} cannot be split evenly over the four strata".format(n))
            designs.append((n // 4,) * 4)
        overrides["sample_designs"] = tuple(designs)
    if config.p_over_n is not None:
        overrides["p_over_n"] = config.p_over_n
    overrides["grid_size"] = config.grid_size
    overrides["n_folds"] = config.cv_folds
    if config.config is not None:
        return SimulationConfig.from_json(config.config, **overrides)
    return SimulationConfig(**{key: value for key, value in overrides.items() if value is not None})


def cmd_simulate(config, results, progress=None):
    """Runs the Monte Carlo study and writes the rejection-frequency report"""
    study = simulation_config(config)
    workers = resolve_workers(config.workers)
    if progress is None:
        def progress(line):
            print(line, file=sys.stderr)
    report = run_study(study, workers=workers, progress=progress)
    path = results.output_path("simulation.{}".format(config.fmt))
    if config.fmt == tables.JSON:
        report.write_json(path)
    else:
        report.write_csv(path)
    results.add_output_file(path)
    results.update_step_results("Simulation Report", 0, None)
    # Unreliable cells count as skipped
    for row in report.rows:
        results.update_step_results("Reliable Cells", 0, None, skipped=not row.reliable)
    return [path], report


def cmd_expand(config, results):
    """
    Writes the expanded CSV and its ExpansionMap; with a seed, also the
    degree-1 vs degree-2 cross-validation comparison
    """
    if config.degree != 2:
        raise UsageError("only --degree 2 is supported, got {}".format(config.degree))
    spec, data = _load(config)
    expanded, expansion = expand_interactions(data, config.degree, spec.numeric_columns)
    header = tables.provenance(seed=config.seed, degree=config.degree)
    written = []
    csv_path = results.output_path("expanded.csv")
    write_csv(expanded, csv_path, spec.outcome_column, spec.weight_column or "weight", header)
    written.append(csv_path)
    map_path = results.output_path("expansion_map.json")
    expansion.write_json(map_path, header)
    written.append(map_path)
    for path in written:
        results.add_output_file(path)
    results.update_step_results("Interaction Expansion", 0, None)
    if config.seed is None:
        results.update_step_results("Degree Comparison", 0, None, skipped=True)
        return written
    rows = compare_expansion_degrees(data, config.n_folds, config.grid_points, seed=config.seed,
                                     adaptive=config.adaptive, numeric_columns=spec.numeric_columns,
                                     workers=resolve_workers(config.workers))
    preferred = [row["lambda_cv"] for row in rows if row["preferred"]][0]
    header = tables.provenance(seed=config.seed, lam=preferred, cv_folds=config.n_folds,
                               adaptive=config.adaptive, note=CV_LOSS_NOTE)
    written.append(_write(config, results, "degree_comparison", rows, COMPARISON_COLUMNS, header, "Degree Comparison"))
    return written


def run(config, results):
    """
    Dispatches one command; library errors become a failed step with the error's return code

    Returns:
        The tool return code
    """
    handlers = {"fit": cmd_fit, "cv": cmd_cv, "ame": cmd_ame, "expand": cmd_expand,
                "simulate": lambda c, r: cmd_simulate(c, r)[0]}
    try:
        written = handlers[config.command](config, results)
        logging.info("run: {} wrote {}".format(config.command, ", ".join(written)))
    except SvyLassoError as e:
        results.update_step_results(config.command, e.return_code, "{}: {}".format(e.__class__.__name__, e))
    except OSError as e:
        results.update_step_results(config.command, 5, "{}: {}".format(e.__class__.__name__, e))
    except np.linalg.LinAlgError as e:
        results.update_step_results(config.command, 4, "{}: {}".format(e.__class__.__name__, e))
    return results.get_return_code()
