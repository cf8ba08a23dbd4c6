# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr

import numpy as np

from svylasso import __version__
from svylasso.errors import ConfigError
from svylasso.results import JSON, Results, header_line_count, plain, provenance, read_table, write_table
from svylasso.validation import MAPPING_SCHEMA, SchemaValidation, load_json_document


class ResultsTest(unittest.TestCase):

    def test_step_tallies(self):
        results = Results("svy LLasso", "fit")
        results.update_step_results("Coefficient Table", 0, None)
        results.update_step_results("Coefficient Table", 0, None, skipped=True)
        with redirect_stderr(io.StringIO()) as err:
            results.update_step_results("Coefficient Table", 3, "InputError: missing value")
        self.assertIn("ERROR: InputError: missing value", err.getvalue())
        self.assertEqual(results.results["StepResults"]["Coefficient Table"], {"pass": 1, "fail": 1, "skip": 1})
        self.assertEqual(results.results["StepResults"]["ErrorMessages"],
                         ["Coefficient Table: InputError: missing value"])
        self.assertEqual(results.get_return_code(), 3)

    def test_write_results(self):
        with tempfile.TemporaryDirectory() as tmp:
            results = Results("svy LLasso", "cv")
            results.set_output_dir(os.path.join(tmp, "nested", "out"))
            results.add_cmd_line_args({"seed": 1})
            results.add_output_file(results.output_path("lambda_path.csv"))
            results.write_results()
            with open(os.path.join(tmp, "nested", "out", "results.json")) as infile:
                document = json.load(infile)
        self.assertEqual(document["ReturnCode"], 0)
        self.assertEqual(document["Version"], __version__)
        self.assertEqual(document["Command"], "cv")
        self.assertEqual(document["CommandLineArgs"], {"seed": 1})
        self.assertTrue(document["OutputFiles"][0].endswith("lambda_path.csv"))


class TableTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_csv_header_and_rows(self):
        path = os.path.join(self.tmp.name, "t.csv")
        rows = [{"name": "a", "value": 1.5}, {"name": "b", "value": np.float64(-2.0)}]
        write_table(rows, ("name", "value"), path, header=provenance(seed=9, lam=0.25, note="x"))
        self.assertEqual(header_line_count(path), 4)
        header, frame = read_table(path)
        self.assertEqual(header, {"version": __version__, "seed": 9, "lambda": 0.25, "note": "x"})
        self.assertEqual(list(frame["value"]), [1.5, -2.0])

    def test_json_turns_nan_into_null(self):
        path = os.path.join(self.tmp.name, "t.json")
        write_table([{"name": "a", "value": float("nan")}], ("name", "value"), path, JSON, provenance())
        with open(path) as infile:
            document = json.load(infile)
        self.assertIsNone(document["rows"][0]["value"])
        self.assertIsNone(document["provenance"]["seed"])

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            write_table([], ("a",), os.path.join(self.tmp.name, "t.xml"), "xml")

    def test_plain_values(self):
        self.assertEqual(plain(np.int64(3)), 3)
        self.assertIsInstance(plain(np.int64(3)), int)
        self.assertIsNone(plain(np.float64("inf")))
        self.assertEqual(plain({1: (np.float64(0.5), float("nan"))}), {"1": [0.5, None]})


class SchemaValidationTest(unittest.TestCase):

    def test_return_codes(self):
        self.assertEqual(SchemaValidation.validate_json({"outcome_column": "y", "regressor_columns": ["a"]},
                                                        MAPPING_SCHEMA), (0, None))
        rc, msg = SchemaValidation.validate_json({"outcome_column": "y", "regressor_columns": "a"}, MAPPING_SCHEMA)
        self.assertEqual(rc, 4)
        self.assertIn("regressor_columns", msg)
        rc, _ = SchemaValidation.validate_json({}, {"type": "nonsense"})
        self.assertEqual(rc, 8)
        self.assertEqual(SchemaValidation.validate_json(None, MAPPING_SCHEMA), (0, None))

    def test_missing_document(self):
        with self.assertRaises(ConfigError):
            load_json_document("/nonexistent/mapping.json", MAPPING_SCHEMA, "column mapping")


if __name__ == '__main__':
    unittest.main()
