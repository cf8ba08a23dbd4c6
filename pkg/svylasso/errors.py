# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Exception hierarchy

Every error raised by the library derives from SvyLassoError and carries the
return code the command-line tool exits with.
"""


class SvyLassoError(Exception):
    return_code = 1


class UsageError(SvyLassoError):
    return_code = 2


class ConfigError(SvyLassoError):
    return_code = 2


class InputError(SvyLassoError):
    """
    Raised for unreadable or invalid input files; names the row and column
    """
    return_code = 3

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append("row {}".format(row))
        if column is not None:
            location.append("column '{}'".format(column))
        if location:
            message = "{} ({})".format(message, ", ".join(location))
        super(InputError, self).__init__(message)


class DomainError(SvyLassoError):
    return_code = 3


class DimensionError(SvyLassoError):
    return_code = 3


class FoldConstructionError(SvyLassoError):
    return_code = 4


class SeparationError(SvyLassoError):
    return_code = 4


class SingularHessianError(SvyLassoError):
    return_code = 4

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super(SingularHessianError, self).__init__(
            "negative Hessian is not invertible (minimum eigenvalue {:.3e})".format(eigenvalue))


class RankDeficientError(SvyLassoError):
    return_code = 4

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super(RankDeficientError, self).__init__(
            "functional Jacobian is rank deficient: minimum eigenvalue of the Jacobian cross-product is "
            "{:.3e}, the asymptotic validity condition requires it to be bounded away from zero".format(eigenvalue))
