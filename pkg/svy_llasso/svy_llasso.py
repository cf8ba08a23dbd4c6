# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Survey-Weighted Logistic Lasso Tool

File : svy_llasso.py

Brief : This file contains the command-line front end for fitting the svy
        LLasso with debiased inference, cross-validating lambda, debiased
        average marginal effects, interaction expansion and the Monte Carlo
        size study
"""

import argparse
import datetime
import logging
import sys

import toolspath
from svylasso.commands import COMMANDS, RunConfig, file_logger, run
from svylasso.errors import SvyLassoError
from svylasso.results import FORMATS, Results

if __name__ == '__main__':

    # Get the input arguments
    argget = argparse.ArgumentParser( description = "Survey-weighted logistic Lasso with debiased inference" )
    argget.add_argument( "command", type = str, choices = COMMANDS, help = "The operation to perform" )
    argget.add_argument( "--input", "-i", type = str, default = None, help = "The input CSV file" )
    argget.add_argument( "--mapping", "-m", type = str, default = None, help = "The JSON column mapping for the input CSV" )
    argget.add_argument( "--lambda", "-l", dest = "lam", type = float, default = None, help = "Fixed penalty level" )
    argget.add_argument( "--cv", action = "store_true", help = "Select lambda by cross-validated weighted AUC" )
    argget.add_argument( "--cv-folds", type = int, default = None, help = "Number of cross-validation folds (default 10)" )
    argget.add_argument( "--grid-size", type = int, default = None, help = "Number of lambda values on the path (default 100)" )
    argget.add_argument( "--seed", "-s", type = int, default = None, help = "Random seed; required for cv, --cv and simulate" )
    argget.add_argument( "--directory", "--out", "-d", dest = "directory", type = str, default = None, help = "Output directory for tables and results.json" )
    argget.add_argument( "--format", "-f", type = str, choices = FORMATS, default = "csv", help = "Table format" )
    argget.add_argument( "--reps", type = int, default = None, help = "Monte Carlo replications per cell" )
    argget.add_argument( "--n", type = int, nargs = "+", default = None, help = "Simulation sample sizes (split evenly over the four strata)" )
    argget.add_argument( "--p-over-n", type = float, nargs = "+", default = None, help = "Simulation p/n ratios" )
    argget.add_argument( "--degree", type = int, default = 2, help = "Interaction expansion degree (only 2 is supported)" )
    argget.add_argument( "--config", "-c", type = str, default = None, help = "Simulation configuration JSON file" )
    argget.add_argument( "--workers", "-w", type = int, default = None, help = "Parallel workers (default from SVY_LLASSO_WORKERS, else 1)" )
    argget.add_argument( "--ridge", action = "store_true", help = "Add a small ridge to a near-singular Hessian instead of failing" )
    argget.add_argument( "--fast-lambda", type = float, default = None, help = "Simulation fast mode: fixed lambda C * sqrt(log p / n) with this C" )
    argget.add_argument( "--ame", type = str, nargs = "+", default = None, help = "Dummy regressors whose AMEs are reported" )
    argget.add_argument( "--adaptive", action = "store_true", help = "Use the two-stage adaptive Lasso with --cv and in the expand comparison" )
    argget.add_argument( "--debug", action = "store_true", help = "Creates debug file showing solver traces and exceptions" )
    args = argget.parse_args()

    logging.basicConfig( level = logging.WARNING, format = "%(levelname)s: %(message)s" )
    for handler in logging.getLogger().handlers:
        handler.setLevel( logging.WARNING )
    if args.debug:
        log_file = "svy_llasso-{}.log".format( datetime.datetime.now().strftime( "%Y-%m-%d-%H%M%S" ) )
        log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        logger = file_logger( log_file, log_format, logging.DEBUG )
        logger.info( "svy_llasso Trace" )

    # Create the results object
    results = Results( "svy LLasso", args.command )
    if args.directory is not None:
        results.set_output_dir( args.directory )
    results.add_cmd_line_args( vars( args ) )

    try:
        config = RunConfig.from_args( args )
    except SvyLassoError as err:
        results.update_step_results( args.command, err.return_code, "{}: {}".format( err.__class__.__name__, err ) )
    else:
        run( config, results )

    # Save the results
    results.write_results()

    sys.exit( results.get_return_code() )
