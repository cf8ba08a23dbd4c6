# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import json
import os
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from svylasso.errors import ConfigError, DimensionError, DomainError, InputError, UsageError
from svylasso.features import (ColumnSpec, build_bdus, build_incidence, compare_expansion_degrees, expand_interactions,
                               load_csv, write_csv)
from svylasso.glm import Dataset
from tests.synthetic import logit_dataset


class CsvTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text, name="data.csv"):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as outfile:
            outfile.write(text)
        return path


class LoadCsvTest(CsvTestCase):

    def test_without_weight_column(self):
        data = load_csv(self.write("y,a\n1,0\n0,1\n"), ColumnSpec("y", ("a",)))
        assert_array_equal(data.w, [1.0, 1.0])
        assert_array_equal(data.X, [[1.0, 0.0], [1.0, 1.0]])
        self.assertEqual(data.column_names, ("a",))

    def test_weight_must_be_positive(self):
        path = self.write("y,w,a\n1,2.5,0\n0,0,1\n")
        with self.assertRaises(InputError) as caught:
            load_csv(path, ColumnSpec("y", ("a",), "w"))
        self.assertEqual(caught.exception.row, 2)
        self.assertEqual(caught.exception.column, "w")

    def test_one_hot_drops_reference(self):
        data = load_csv(self.write("y,g\n1,A\n0,B\n1,C\n0,A\n"), ColumnSpec("y", ("g",), reference_levels={"g": "A"}))
        self.assertEqual(data.column_names, ("g_B", "g_C"))
        assert_array_equal(data.X[:, 1:], [[0, 0], [1, 0], [0, 1], [0, 0]])

    def test_unknown_reference_level(self):
        with self.assertRaises(InputError):
            load_csv(self.write("y,g\n1,A\n0,B\n"), ColumnSpec("y", ("g",), reference_levels={"g": "Z"}))

    def test_yes_no_answers(self):
        data = load_csv(self.write("y,a\nYes,no\nNo,YES\n"), ColumnSpec("y", ("a",)))
        assert_array_equal(data.y, [1.0, 0.0])
        assert_array_equal(data.X[:, 1], [0.0, 1.0])

    def test_missing_value_is_located(self):
        with self.assertRaises(InputError) as caught:
            load_csv(self.write("y,a\n1,\n0,1\n"), ColumnSpec("y", ("a",)))
        self.assertEqual((caught.exception.row, caught.exception.column), (1, "a"))

    def test_listwise_deletion(self):
        spec = ColumnSpec("y", ("a",), listwise_deletion=True)
        with self.assertLogs(level="WARNING"):
            data = load_csv(self.write("y,a\n1,\n0,1\n1,0\n"), spec)
        self.assertEqual(data.n, 2)

    def test_unparseable_value(self):
        with self.assertRaises(InputError) as caught:
            load_csv(self.write("y,a\n1,0.5\n0,abc\n"), ColumnSpec("y", ("a",)))
        self.assertEqual(caught.exception.row, 2)

    def test_outcome_must_be_binary(self):
        with self.assertRaises(InputError):
            load_csv(self.write("y,a\n2,0\n0,1\n"), ColumnSpec("y", ("a",)))

    def test_missing_column(self):
        with self.assertRaises(InputError) as caught:
            load_csv(self.write("y,a\n1,0\n"), ColumnSpec("y", ("b",)))
        self.assertEqual(caught.exception.column, "b")

    def test_derived_bdus_and_filter(self):
        questions = tuple("q{}".format(k) for k in range(1, 11))
        lines = ["y," + ",".join(questions) + ",i1,i2"]
        lines.append("1," + ",".join(["Yes"] * 10) + ",No,No")
        lines.append("0," + ",".join(["Yes"] * 2 + ["No"] * 8) + ",Yes,No")
        lines.append("1," + ",".join(["Yes"] * 5 + ["No"] * 5) + ",No,Yes")
        spec = ColumnSpec("y", ("BDUS", "incidence"), bdus_questions=questions, incidence_questions=("i1", "i2"),
                          min_bdus=3)
        data = load_csv(self.write("\n".join(lines) + "\n"), spec)
        self.assertEqual(data.n, 2)
        assert_array_equal(data.X[:, 1], [10.0, 5.0])
        assert_array_equal(data.X[:, 2], [0.0, 1.0])

    def test_round_trip_through_write_csv(self):
        rng = np.random.default_rng(41)
        data = logit_dataset(rng, 30, [0.2, 1.0, -0.5], binary=False, names=("a", "b"))
        path = os.path.join(self.tmp.name, "out.csv")
        spec = write_csv(data, path, header={"seed": 41})
        with open(path) as infile:
            self.assertEqual(infile.readline(), "# seed: 41\n")
        again = load_csv(path, spec)
        assert_allclose(again.X, data.X, rtol=1e-12)
        assert_allclose(again.w, data.w, rtol=1e-12)
        assert_array_equal(again.y, data.y)
        self.assertEqual(again.column_names, ("a", "b"))


class ColumnSpecTest(CsvTestCase):

    def test_invalid_specs(self):
        with self.assertRaises(DomainError):
            ColumnSpec("y", ())
        with self.assertRaises(DomainError):
            ColumnSpec("y", ("y", "a"))
        with self.assertRaises(DomainError):
            ColumnSpec("y", ("a",), bdus_questions=("q1", "q2"))
        with self.assertRaises(DomainError):
            ColumnSpec("y", ("a",), reference_levels={"b": "x"})

    def test_from_dict_applies_schema(self):
        spec = ColumnSpec.from_dict({"outcome_column": "y", "regressor_columns": ["a", "b"], "weight_column": "w"})
        self.assertEqual(spec.regressor_columns, ("a", "b"))
        with self.assertRaises(ConfigError):
            ColumnSpec.from_dict({"outcome_column": "y", "regressor_columns": ["a"], "colour": "red"})
        with self.assertRaises(ConfigError):
            ColumnSpec.from_dict({"regressor_columns": ["a"]})

    def test_from_json(self):
        path = self.write(json.dumps({"outcome_column": "y", "regressor_columns": ["a"], "ame_columns": ["a"]}),
                          "mapping.json")
        self.assertEqual(ColumnSpec.from_json(path).ame_columns, ("a",))
        with self.assertRaises(ConfigError):
            ColumnSpec.from_json(self.write("{not json", "broken.json"))


class DerivedColumnTest(unittest.TestCase):

    def test_bdus_counts_yes_answers(self):
        responses = [[1] * 10, [0] * 10, [1, 0] * 5]
        assert_array_equal(build_bdus(responses), [10, 0, 5])

    def test_bdus_shape_and_values(self):
        with self.assertRaises(DimensionError):
            build_bdus([[1] * 9])
        with self.assertRaises(DomainError):
            build_bdus([[2] + [0] * 9])

    def test_incidence_is_any_yes(self):
        assert_array_equal(build_incidence([[0, 0], [1, 0], [0, 1], [1, 1]]), [0, 1, 1, 1])


class InteractionExpansionTest(unittest.TestCase):

    def test_binary_regressors_get_products_only(self):
        rng = np.random.default_rng(42)
        data = logit_dataset(rng, 50, [0.0, 1.0, 1.0, 1.0], names=("a", "b", "c"))
        expanded, expansion = expand_interactions(data)
        self.assertEqual(expanded.p, 6)
        self.assertEqual(expanded.column_names, ("a", "b", "c", "a:b", "a:c", "b:c"))
        assert_array_equal(expanded.X[:, 5], data.X[:, 2] * data.X[:, 3])
        self.assertEqual(expansion.parentage, {4: (1, 2), 5: (1, 3), 6: (2, 3)})

    def test_numeric_regressors_get_squares(self):
        X = np.column_stack((np.ones(4), [0, 1, 0, 1], [0.5, 1.5, 2.0, -1.0]))
        data = Dataset([1, 0, 1, 0], X, np.ones(4), ("a", "z"))
        expanded, expansion = expand_interactions(data, numeric_columns=("a",))
        self.assertEqual(expanded.column_names, ("a", "z", "a^2", "a:z", "z^2"))
        assert_array_equal(expanded.X[:, 5], X[:, 2] ** 2)
        self.assertEqual(expansion.to_dict()["parentage"]["a:z"], ["a", "z"])

    def test_identical_parents(self):
        column = [0.0, 1.0, 1.0, 0.0]
        data = Dataset([1, 0, 1, 0], np.column_stack((np.ones(4), column, column)), np.ones(4), ("a", "b"))
        expanded, _ = expand_interactions(data)
        assert_array_equal(expanded.X[:, 3], column)

    def test_rejects_other_degrees_and_reexpansion(self):
        data = Dataset([1, 0], [[1, 0, 1], [1, 1, 0]], [1.0, 1.0], ("a", "b"))
        with self.assertRaises(UsageError):
            expand_interactions(data, degree=3)
        with self.assertRaises(DomainError):
            expand_interactions(expand_interactions(data)[0])
        with self.assertRaises(DomainError):
            expand_interactions(data, numeric_columns=("nope",))

    def test_degree_comparison(self):
        rng = np.random.default_rng(43)
        data = logit_dataset(rng, 200, [0.0, 1.0, -1.0])
        rows = compare_expansion_degrees(data, 3, 5, seed=1)
        self.assertEqual([row["degree"] for row in rows], [1, 2])
        self.assertEqual([row["p"] for row in rows], [2, 3])
        self.assertEqual(sum(row["preferred"] for row in rows), 1)
        for row in rows:
            self.assertTrue(0.0 <= row["cv_error"] <= 1.0)


if __name__ == '__main__':
    unittest.main()
