"""Exception types shared across the package.

The CLI maps these onto process exit codes (input error -> 2,
capability error -> 3), so library code should raise the most
specific one that applies.
"""


class InputError(ValueError):
    """Malformed or inconsistent caller-supplied data."""


class CapabilityError(RuntimeError):
    """Request exceeds a hard capability guard (e.g. enumeration size)."""
