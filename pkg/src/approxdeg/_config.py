import os

DEFAULT_SIZE_LIMIT = 1_000_000


class SizeError(ValueError):
    """Raised when an enumeration or LP would exceed the configured size guard."""


def size_limit() -> int:
    raw = os.environ.get("APPROXDEG_SIZE_LIMIT")
    if raw is None or raw == "":
        return DEFAULT_SIZE_LIMIT
    return int(raw)


def check_size(count: int, what: str) -> None:
    limit = size_limit()
    if count > limit:
        raise SizeError(
            f"{what} has size {count}, above the limit {limit} "
            "(set APPROXDEG_SIZE_LIMIT to override)"
        )
