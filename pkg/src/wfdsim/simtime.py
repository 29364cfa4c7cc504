"""Fixed-point simulation time.

All times are integer picoseconds so that event ordering, trace output and
metrics are bit-identical across platforms.  Trace timestamps are printed as
decimal seconds with 12 fractional digits.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation

PS_PER_SECOND = 10**12

SECOND = PS_PER_SECOND
MILLISECOND = PS_PER_SECOND // 10**3
MICROSECOND = PS_PER_SECOND // 10**6
NANOSECOND = PS_PER_SECOND // 10**9

_UNIT_PS = {
    "s": SECOND,
    "ms": MILLISECOND,
    "us": MICROSECOND,
    "ns": NANOSECOND,
    "ps": 1,
}


def seconds(value: float | int | str) -> int:
    """Convert a duration in seconds to integer picoseconds (exactly)."""
    dec = Decimal(str(value)) * PS_PER_SECOND
    if dec != dec.to_integral_value():
        raise ValueError(f"duration {value!r} has sub-picosecond precision")
    return int(dec)


def parse_duration(text: str) -> int:
    """Parse a duration like ``1s``, ``100ms``, ``314us`` or a bare number
    of seconds into picoseconds."""
    text = text.strip()
    unit = "s"
    for suffix in ("ms", "us", "ns", "ps", "s"):
        if text.endswith(suffix):
            unit = suffix
            text = text[: -len(suffix)].strip()
            break
    try:
        dec = Decimal(text) * _UNIT_PS[unit]
    except InvalidOperation:
        raise ValueError(f"unparsable duration {text!r}") from None
    if dec != dec.to_integral_value():
        raise ValueError(f"duration {text!r}{unit} has sub-picosecond precision")
    return int(dec)


def format_time(t_ps: int) -> str:
    """Render picoseconds as decimal seconds with 12 fractional digits."""
    if t_ps < 0:
        raise ValueError("negative simulation time")
    return f"{t_ps // PS_PER_SECOND}.{t_ps % PS_PER_SECOND:012d}"


def format_duration(t_ps: int) -> str:
    """Render picoseconds as a compact seconds string, e.g. ``0.1s``."""
    whole, frac = divmod(t_ps, PS_PER_SECOND)
    if frac == 0:
        return f"{whole}s"
    return f"{whole}.{frac:012d}".rstrip("0") + "s"


def parse_time(text: str) -> int:
    """Parse a trace timestamp (decimal seconds) back into picoseconds."""
    dec = Decimal(text) * PS_PER_SECOND
    if dec != dec.to_integral_value():
        raise ValueError(f"timestamp {text!r} finer than a picosecond")
    return int(dec)
