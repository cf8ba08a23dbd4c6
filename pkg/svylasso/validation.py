# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import json
import logging

import jsonschema

from svylasso.errors import ConfigError

_NAME = {"type": "string", "minLength": 1}
_NAMES = {"type": "array", "items": _NAME, "uniqueItems": True}
_POSITIVE_INTS = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

MAPPING_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "ColumnSpec mapping",
    "type": "object",
    "required": ["outcome_column", "regressor_columns"],
    "additionalProperties": False,
    "properties": {
        "outcome_column": _NAME,
        "weight_column": {"type": ["string", "null"], "minLength": 1},
        "regressor_columns": _NAMES,
        "reference_levels": {"type": "object", "additionalProperties": {"type": "string"}},
        "numeric_columns": _NAMES,
        "ame_columns": _NAMES,
        "bdus_questions": {"type": "array", "items": _NAME, "minItems": 10, "maxItems": 10, "uniqueItems": True},
        "bdus_column": _NAME,
        "incidence_questions": {"type": "array", "items": _NAME, "minItems": 1, "uniqueItems": True},
        "incidence_column": _NAME,
        "min_bdus": {"type": "integer", "minimum": 0, "maximum": 10},
        "listwise_deletion": {"type": "boolean"}
    }
}

SIMULATION_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Simulation study configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "population_size": {"type": "integer", "minimum": 1},
        "theta0": {"type": ["array", "null"], "items": {"type": "number"}, "minItems": 1},
        "strata_sizes": _POSITIVE_INTS,
        "sample_designs": {"type": "array", "items": _POSITIVE_INTS, "minItems": 1},
        "weights_per_stratum": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "p_over_n": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "p_values": {"type": ["array", "null"], "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "replications": {"type": "integer", "minimum": 1},
        "nominal_level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "null_theta": {"type": "number"},
        "theta_index": {"type": "integer", "minimum": 1},
        "null_ame": {"type": "number"},
        "ame_index": {"type": "integer", "minimum": 1},
        "success_probability": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "n_folds": {"type": "integer", "minimum": 2},
        "grid_size": {"type": "integer", "minimum": 1},
        "fixed_lambda_constant": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "max_sweeps": {"type": "integer", "minimum": 1}
    }
}


class SchemaValidation(object):

    @staticmethod
    def validate_json(json_data, schema):
        """
        Validate a JSON document against a schema

        Returns:
            (rc, message); rc is 0 when valid, 4 for a validation error and 8 for a broken schema
        """
        if json_data is None:
            logging.info("SchemaValidation:validate_json: No JSON document to validate")
            return 0, None
        try:
            logging.debug("SchemaValidation:validate_json: JSON to be validated: {}".format(json_data))
            jsonschema.validate(json_data, schema)
        except jsonschema.ValidationError as e:
            location = "/".join(str(part) for part in e.absolute_path)
            message = "{}: {}".format(location, e.message) if location else e.message
            logging.error("SchemaValidation:validate_json: JSON schema validation error: {}".format(message))
            return 4, message
        except jsonschema.SchemaError as e:
            logging.error("SchemaValidation:validate_json: JSON schema error: {}".format(e.message))
            return 8, e.message
        else:
            logging.info("SchemaValidation:validate_json: JSON schema validation successful")
            return 0, None


def load_json_document(path, schema, label):
    """
    Reads a JSON file and validates it

    Args:
        path: The file to read
        schema: The JSON Schema it must satisfy
        label: What the document is, for messages

    Returns:
        The parsed document
    """
    try:
        with open(path) as infile:
            document = json.load(infile)
    except OSError as e:
        raise ConfigError("cannot read {} file {}: {}".format(label, path, e))
    except ValueError as e:
        raise ConfigError("{} file {} is not valid JSON: {}".format(label, path, e))
    rc, msg = SchemaValidation.validate_json(document, schema)
    if rc != 0:
        raise ConfigError("{} file {} rejected: {}".format(label, path, msg))
    return document
