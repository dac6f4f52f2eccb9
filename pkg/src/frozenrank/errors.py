"""Shared exception types."""


class ResourceCapError(RuntimeError):
    """An operation refused to run because a configured size cap was exceeded.

    The message always names the cap so callers can raise it deliberately.
    """
