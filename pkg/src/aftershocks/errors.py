"""Shared exception types."""


class DataError(Exception):
    """Input data violates a contract: bad rows, duplicate timestamps,
    too few events for an estimator, and the like.

    The CLI maps this to exit code 2; genuine usage errors (bad flag
    values) and internal faults use different codes.
    """
