# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Feature Construction

File : features.py

Brief : This file contains CSV ingestion into a Dataset (outcome and weight
        column mapping, Yes/No coding, one-hot categorical regressors), the
        BDUS summation index, binary incidence indicators, and the degree-2
        interaction expansion with its cross-validated comparison
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from svylasso.errors import ConfigError, DimensionError, DomainError, InputError, UsageError
from svylasso.glm import Dataset
from svylasso.lasso import cv_select_lambda, fit_adaptive
from svylasso.results import header_line_count, plain
from svylasso.validation import MAPPING_SCHEMA, SchemaValidation, load_json_document

# Case-insensitive coding of answer strings
YES_NO = {"yes": 1.0, "no": 0.0, "y": 1.0, "n": 0.0, "true": 1.0, "false": 0.0}
BDUS_QUESTIONS = 10


@dataclass(frozen=True)
class ColumnSpec:
    """
    Mapping from CSV columns to the outcome, the survey weight and the regressors.

    Attributes
    ----------
    outcome_column : binary outcome
    regressor_columns : ordered regressor names (derived BDUS / incidence columns allowed)
    weight_column : survey weight; None gives every row weight 1
    reference_levels : categorical column -> reference level left out of the one-hot coding
    numeric_columns : columns that get a squared term in the interaction expansion
    ame_columns : dummy regressors whose AMEs are reported
    bdus_questions, bdus_column : ten Yes/No questions summed into the BDUS index
    incidence_questions, incidence_column : Yes/No incident types OR-ed into an indicator
    min_bdus : drop rows with BDUS below this value
    listwise_deletion : drop rows with missing cells instead of failing
    """

    outcome_column: str
    regressor_columns: tuple
    weight_column: Optional[str] = None
    reference_levels: dict = field(default_factory=dict, hash=False)
    numeric_columns: tuple = ()
    ame_columns: tuple = ()
    bdus_questions: tuple = ()
    bdus_column: str = "BDUS"
    incidence_questions: tuple = ()
    incidence_column: str = "incidence"
    min_bdus: Optional[int] = None
    listwise_deletion: bool = False

    def __post_init__(self):
        for name in ("regressor_columns", "numeric_columns", "ame_columns", "bdus_questions", "incidence_questions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "reference_levels", dict(self.reference_levels))
        if not self.regressor_columns:
            raise DomainError("at least one regressor column is required")
        if len(set(self.regressor_columns)) != len(self.regressor_columns):
            raise DomainError("regressor column names must be unique")
        if self.outcome_column in self.regressor_columns:
            raise DomainError("outcome column '{}' is also listed as a regressor".format(self.outcome_column))
        if self.weight_column is not None and self.weight_column in self.regressor_columns:
            raise DomainError("weight column '{}' is also listed as a regressor".format(self.weight_column))
        if self.weight_column is not None and self.weight_column == self.outcome_column:
            raise DomainError("outcome and weight columns must differ")
        if self.bdus_questions and len(self.bdus_questions) != BDUS_QUESTIONS:
            raise DomainError("BDUS needs exactly {} question columns".format(BDUS_QUESTIONS))
        if self.min_bdus is not None and not self.bdus_questions:
            raise DomainError("min_bdus needs bdus_questions")
        if self.bdus_questions and self.incidence_questions and self.bdus_column == self.incidence_column:
            raise DomainError("BDUS and incidence columns need different names")
        unknown = set(self.reference_levels) - set(self.regressor_columns)
        if unknown:
            raise DomainError("reference levels given for non-regressor columns: {}".format(", ".join(sorted(unknown))))

    @classmethod
    def from_dict(cls, document):
        rc, msg = SchemaValidation.validate_json(document, MAPPING_SCHEMA)
        if rc != 0:
            raise ConfigError("column mapping rejected: {}".format(msg))
        return cls(**document)

    @classmethod
    def from_json(cls, path):
        return cls(**load_json_document(path, MAPPING_SCHEMA, "column mapping"))

    def derived_columns(self):
        """Derived column name -> (question columns, builder)"""
        derived = {}
        if self.bdus_questions:
            derived[self.bdus_column] = (self.bdus_questions, build_bdus)
        if self.incidence_questions:
            derived[self.incidence_column] = (self.incidence_questions, build_incidence)
        return derived


def _missing(series):
    return series.str.strip() == ""


def _to_numbers(frame, column, allow_answers=True):
    """
    Parses a string column to floats, coding Yes/No answers

    Raises:
        InputError naming the first unparseable row (1-based data row) and the column
    """
    text = frame[column].str.strip()
    values = text.str.lower().map(YES_NO) if allow_answers else pd.Series(np.nan, index=text.index)
    numeric = pd.to_numeric(text.where(values.isna()), errors="coerce")
    values = values.fillna(numeric)
    bad = values.isna() | ~np.isfinite(values.astype(float))
    if bad.any():
        index = bad.idxmax()
        raise InputError("cannot parse {!r} as a number".format(frame.at[index, column]), row=int(index) + 1,
                         column=column)
    return values.astype(float)


def _check_binary(values, column):
    bad = ~values.isin((0.0, 1.0))
    if bad.any():
        index = bad.idxmax()
        raise InputError("expected a 0/1 (or Yes/No) value, found {!r}".format(values.at[index]), row=int(index) + 1,
                         column=column)


def _answers(frame, columns):
    matrix = []
    for column in columns:
        values = _to_numbers(frame, column)
        _check_binary(values, column)
        matrix.append(values.to_numpy())
    return np.column_stack(matrix)


def _one_hot(frame, column, reference):
    levels = sorted(frame[column].str.strip().unique())
    if reference not in levels:
        raise InputError("reference level {!r} does not occur; levels are {}".format(reference, levels),
                         column=column)
    categories = pd.Categorical(frame[column].str.strip(), categories=levels)
    dummies = pd.get_dummies(categories, prefix=column, prefix_sep="_", dtype=float)
    dummies.index = frame.index
    return dummies.drop(columns="{}_{}".format(column, reference))


def load_csv(path, spec):
    """
    Reads a CSV file with a header row into a Dataset

    Args:
        path: The CSV file
        spec: A ColumnSpec

    Returns:
        A Dataset whose first design column is the intercept; rows in error
        messages count data rows from 1
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8",
                            skiprows=header_line_count(path))
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputError("cannot read CSV file {}: {}".format(path, e))
    derived = spec.derived_columns()
    needed = [spec.outcome_column]
    if spec.weight_column is not None:
        needed.append(spec.weight_column)
    needed.extend(column for column in spec.regressor_columns if column not in derived)
    for questions, _ in derived.values():
        needed.extend(questions)
    needed = list(dict.fromkeys(needed))
    for column in needed:
        if column not in frame.columns:
            raise InputError("missing column in {}".format(path), column=column)

    missing = pd.concat([_missing(frame[column]) for column in needed], axis=1)
    missing.columns = needed
    if missing.to_numpy().any():
        if not spec.listwise_deletion:
            index = missing.any(axis=1).idxmax()
            column = missing.columns[missing.loc[index].to_numpy()][0]
            raise InputError("missing value", row=int(index) + 1, column=column)
        dropped = int(missing.any(axis=1).sum())
        logging.warning("load_csv: listwise deletion dropped {} of {} rows with missing cells".format(dropped, len(frame)))
        frame = frame.loc[~missing.any(axis=1)]

    numbers = {}
    for column, (questions, builder) in derived.items():
        numbers[column] = pd.Series(builder(_answers(frame, questions)).astype(float), index=frame.index)
    if spec.min_bdus is not None:
        keep = numbers[spec.bdus_column] >= spec.min_bdus
        logging.info("load_csv: {} rows with BDUS below {} removed".format(int((~keep).sum()), spec.min_bdus))
        frame = frame.loc[keep]
        numbers = {column: values.loc[keep] for column, values in numbers.items()}
    if frame.empty:
        raise InputError("no usable rows in {}".format(path))

    y = _to_numbers(frame, spec.outcome_column)
    _check_binary(y, spec.outcome_column)
    if spec.weight_column is None:
        w = pd.Series(1.0, index=frame.index)
    else:
        w = _to_numbers(frame, spec.weight_column, allow_answers=False)
        bad = w <= 0.0
        if bad.any():
            index = bad.idxmax()
            raise InputError("survey weight must be positive, found {!r}".format(frame.at[index, spec.weight_column]),
                             row=int(index) + 1, column=spec.weight_column)

    blocks = []
    for column in spec.regressor_columns:
        if column in numbers:
            blocks.append(numbers[column].rename(column).to_frame())
        elif column in spec.reference_levels:
            blocks.append(_one_hot(frame, column, spec.reference_levels[column]))
        else:
            blocks.append(_to_numbers(frame, column).rename(column).to_frame())
    regressors = pd.concat(blocks, axis=1)
    X = np.column_stack((np.ones(len(frame)), regressors.to_numpy(dtype=float)))
    logging.info("load_csv: read {} rows and {} regressors from {}".format(len(frame), regressors.shape[1], path))
    return Dataset(y.to_numpy(), X, w.to_numpy(), tuple(regressors.columns))


def write_csv(data, path, outcome_column="y", weight_column="w", header=None):
    """
    Writes a Dataset as the canonical CSV read back exactly by load_csv

    Args:
        data: The Dataset
        path: The output file
        outcome_column: Header of the outcome column
        weight_column: Header of the weight column
        header: Optional provenance mapping written as leading '#' lines

    Returns:
        The ColumnSpec that reads the file back
    """
    if outcome_column == weight_column:
        raise DomainError("outcome and weight columns need different names")
    for name in (outcome_column, weight_column):
        if name in data.column_names:
            raise DomainError("column name '{}' is taken by a regressor".format(name))
    frame = pd.DataFrame(data.X[:, 1:], columns=list(data.column_names))
    frame.insert(0, weight_column, data.w)
    frame.insert(0, outcome_column, data.y)
    with open(path, "w", newline="", encoding="utf-8") as outfile:
        for key, value in (header or {}).items():
            outfile.write("# {}: {}\n".format(key, json.dumps(plain(value))))
        frame.to_csv(outfile, index=False, lineterminator="\n")
    return ColumnSpec(outcome_column, data.column_names, weight_column)


def _binary_matrix(responses, what):
    matrix = np.asarray(responses, dtype=float)
    if matrix.ndim != 2:
        raise DimensionError("{} responses must be a two-dimensional matrix".format(what))
    bad = ~np.isin(matrix, (0.0, 1.0))
    if np.any(bad):
        row, column = np.argwhere(bad)[0]
        raise DomainError("{} response at row {}, column {} is {!r}, not 0/1".format(what, row + 1, column + 1,
                                                                                  float(matrix[row, column])))
    return matrix


def build_bdus(responses):
    """
    BDUS index: number of Yes answers over the ten data-use questions

    Args:
        responses: An n x 10 binary matrix

    Returns:
        Integer vector with values in 0..10
    """
    matrix = _binary_matrix(responses, "BDUS")
    if matrix.shape[1] != BDUS_QUESTIONS:
        raise DimensionError("BDUS needs {} question columns, got {}".format(BDUS_QUESTIONS, matrix.shape[1]))
    return matrix.sum(axis=1).astype(int)


def build_incidence(responses):
    """Indicator of at least one reported incident type (row-wise OR)"""
    matrix = _binary_matrix(responses, "incidence")
    if matrix.shape[1] < 1:
        raise DimensionError("incidence needs at least one column")
    return matrix.any(axis=1).astype(int)


@dataclass(frozen=True, eq=False)
class ExpansionMap:
    """
    output_columns : names of all regressors after expansion
    parentage : theta position of each generated column -> theta positions of its two factors
    """

    output_columns: tuple
    parentage: dict

    def to_dict(self):
        names = self.output_columns
        return {"output_columns": list(names),
                "parentage": {names[target - 1]: [names[left - 1], names[right - 1]]
                              for target, (left, right) in sorted(self.parentage.items())}}

    def write_json(self, path, header=None):
        document = self.to_dict()
        if header is not None:
            document = dict(provenance=plain(header), **document)
        with open(path, "w", encoding="utf-8") as outfile:
            json.dump(document, outfile, indent=4)
            outfile.write("\n")
        return path


def _is_binary(column):
    return bool(np.all(np.isin(column, (0.0, 1.0))))


def expand_interactions(data, degree=2, numeric_columns=()):
    """
    Appends all pairwise products of the regressors, plus squares of numeric ones

    Args:
        data: The Dataset
        degree: Must be 2
        numeric_columns: Columns that get a squared term even when they look binary

    Returns:
        (expanded Dataset, ExpansionMap); generated columns follow lexicographic (i, j), i <= j order
    """
    if degree != 2:
        raise UsageError("only degree-2 interaction expansion is supported, got degree {}".format(degree))
    if data.expansion is not None:
        raise DomainError("dataset already carries an interaction expansion")
    unknown = set(numeric_columns) - set(data.column_names)
    if unknown:
        raise DomainError("unknown numeric columns: {}".format(", ".join(sorted(unknown))))
    names = list(data.column_names)
    columns = [data.X]
    parentage = {}
    position = data.p
    for i in range(1, data.p + 1):
        for j in range(i, data.p + 1):
            if i == j:
                name = names[i - 1]
                if name not in numeric_columns and _is_binary(data.X[:, i]):
                    continue
                generated = "{}^2".format(name)
            else:
                generated = "{}:{}".format(names[i - 1], names[j - 1])
            position += 1
            columns.append((data.X[:, i] * data.X[:, j])[:, None])
            names.append(generated)
            parentage[position] = (i, j)
    expansion = ExpansionMap(tuple(names), parentage)
    expanded = Dataset(data.y, np.hstack(columns), data.w, tuple(names), data.family, data.strata, expansion)
    logging.info("expand_interactions: {} regressors expanded to {}".format(data.p, expanded.p))
    return expanded, expansion


def compare_expansion_degrees(data, n_folds=10, grid_size=100, *, seed, adaptive=False, numeric_columns=(),
                              workers=1):
    """
    Cross-validated comparison of the linear model and the second-order model on identical folds

    Returns:
        A list of rows with degree, p, lambda_cv, cv_error (1 - weighted AUC) and a preferred flag
    """
    candidates = [(1, data), (2, expand_interactions(data, 2, numeric_columns)[0])]
    rows = []
    for degree, candidate in candidates:
        if adaptive:
            _, path, _ = fit_adaptive(candidate, n_folds, grid_size, seed=seed, workers=workers)
        else:
            path = cv_select_lambda(candidate, n_folds, grid_size, seed=seed, workers=workers)
        rows.append({"degree": degree, "p": candidate.p, "lambda_cv": path.selected_lambda,
                     "cv_error": path.cv_error, "preferred": False})
    best = min(range(len(rows)), key=lambda k: rows[k]["cv_error"])
    rows[best]["preferred"] = True
    return rows
