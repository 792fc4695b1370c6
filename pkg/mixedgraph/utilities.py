"""
A module of small helpers shared by the library entry points and the command line.
"""
import hashlib
import logging
import os
import pathlib

log = logging.getLogger(__name__)

THREADS_ENV = "MIXEDGRAPH_THREADS"
SIGNIFICANT_DIGITS = 6


def fmt(value: float) -> str:
    """
    Formats a number with 6 significant digits, the precision of every reported value.
    """
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def rounded(value):
    """
    Recursively rounds the floats inside a JSON-like value to 6 significant digits.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {key: rounded(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [rounded(item) for item in value]
    return value


def file_digest(path: pathlib.Path) -> str:
    digest = hashlib.sha256()
    with pathlib.Path(path).open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def resolve_jobs(requested: int) -> int:
    """
    The worker count for a pool: the requested number, capped by MIXEDGRAPH_THREADS when that
    variable is set.
    """
    if requested < 1:
        raise ValueError(f"The number of jobs must be at least 1, got {requested}")
    cap = os.environ.get(THREADS_ENV)
    if cap is None:
        return requested
    try:
        cap = int(cap)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    if cap < 1:
        raise ValueError(f"{THREADS_ENV} must be at least 1, got {cap}")
    if requested > cap:
        log.info("Capping the worker pool at %d (%s)", cap, THREADS_ENV)
    return min(requested, cap)
