# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import datetime
import json
import math
import os
import sys

import numpy as np
import pandas as pd

from svylasso import __version__

CSV = "csv"
JSON = "json"
FORMATS = (CSV, JSON)


class Results(object):

    def __init__(self, tool_name, command):
        self.output_dir = os.getcwd()
        self.results_filename = "results.json"
        self.tool_name = tool_name
        self.return_code = 0
        self.results = {"ToolName": tool_name, "Version": __version__, "Command": command}
        self.results.update({"Timestamp": {"DateTime":
                            "{:%Y-%m-%dT%H:%M:%SZ}".format(datetime.datetime.now(datetime.timezone.utc))}})
        self.results.update({"OutputFiles": []})

    def update_step_results(self, step_name, rc, msg, skipped=False):
        if "StepResults" not in self.results:
            self.results.update({"StepResults": {}})
        if step_name not in self.results["StepResults"]:
            self.results["StepResults"].update({step_name: {"pass": 0, "fail": 0, "skip": 0}})
        if skipped:
            self.results["StepResults"][step_name]["skip"] += 1
        elif rc == 0:
            self.results["StepResults"][step_name]["pass"] += 1
        else:
            print("ERROR: {}".format(msg), file=sys.stderr)
            self.results["StepResults"][step_name]["fail"] += 1
            if "ErrorMessages" not in self.results["StepResults"]:
                self.results["StepResults"].update({"ErrorMessages": []})
            if msg is not None:
                self.results["StepResults"]["ErrorMessages"].append(step_name + ": " + msg)
            self.return_code = rc

    def add_cmd_line_args(self, args):
        self.results.update({"CommandLineArgs": args})

    def add_output_file(self, path):
        self.results["OutputFiles"].append(os.path.abspath(path))

    def set_output_dir(self, output_dir):
        self.output_dir = os.path.abspath(output_dir)
        try:
            if not os.path.isdir(self.output_dir):
                os.makedirs(self.output_dir)
        except OSError as e:
            print("Error creating output directory {}, error: {}".format(self.output_dir, e), file=sys.stderr)
            print("Will write output files to current working directory instead.", file=sys.stderr)
            self.output_dir = os.getcwd()

    def output_path(self, filename):
        return os.path.join(self.output_dir, filename)

    def write_results(self):
        self.results.update({"ReturnCode": self.return_code})
        path = os.path.join(self.output_dir, self.results_filename)
        try:
            with open(path, 'w') as outfile:
                json.dump(self.results, outfile, indent=4)
        except OSError as e:
            print("Error writing results file to {}, error: {}".format(path, e), file=sys.stderr)
            print("Printing results to STDOUT instead.", file=sys.stderr)
            print(json.dumps(self.results, indent=4))

    def get_return_code(self):
        return self.return_code


def provenance(seed=None, lam=None, **extra):
    """
    Header fields embedded in every table file; no timestamps so reruns are byte-identical
    """
    header = {"version": __version__, "seed": seed, "lambda": lam}
    header.update(extra)
    return header


def plain(value):
    """Converts numpy scalars and NaN to JSON-friendly Python values"""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    return value


def write_table(rows, columns, path, fmt=CSV, header=None):
    """
    Writes a table as CSV with '#' provenance lines, or as a JSON document

    Args:
        rows: A list of dicts keyed by column name
        columns: Column order
        path: The output file
        fmt: "csv" or "json"
        header: The provenance mapping

    Returns:
        The path written
    """
    header = header if header is not None else provenance()
    if fmt == CSV:
        frame = pd.DataFrame([[row.get(column) for column in columns] for row in rows], columns=list(columns))
        with open(path, "w", newline="", encoding="utf-8") as outfile:
            for key, value in header.items():
                outfile.write("# {}: {}\n".format(key, json.dumps(plain(value))))
            frame.to_csv(outfile, index=False, lineterminator="\n")
    elif fmt == JSON:
        document = {"provenance": {key: plain(value) for key, value in header.items()},
                    "rows": [{column: plain(row.get(column)) for column in columns} for row in rows]}
        with open(path, "w", encoding="utf-8") as outfile:
            json.dump(document, outfile, indent=4)
            outfile.write("\n")
    else:
        raise ValueError("unknown table format '{}'".format(fmt))
    return path


def read_table(path):
    """
    Reads a table written by write_table

    Returns:
        (provenance dict, pandas DataFrame)
    """
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as infile:
            document = json.load(infile)
        return document["provenance"], pd.DataFrame(document["rows"])
    header = {}
    with open(path, encoding="utf-8") as infile:
        for line in infile:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            header[key] = json.loads(value)
    return header, pd.read_csv(path, skiprows=len(header))


def header_line_count(path):
    """Number of leading '#' provenance lines of a CSV file"""
    count = 0
    with open(path, encoding="utf-8") as infile:
        for line in infile:
            if not line.startswith("#"):
                break
            count += 1
    return count
