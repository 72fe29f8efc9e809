import math
from typing import List


def str_to_bool(check: str) -> bool:
    """
    Converts a string to a boolean value.

    Parameters
    ----------
    check : str
        The string to be converted to a boolean value.

    Returns
    -------
    bool
        The boolean value of the string.
    """
    try:
        return check.strip().lower() in ("yes", "true", "t", "1")
    except AttributeError:
        return False


def str_to_int_list(text: str) -> List[int]:
    """
    Converts a comma separated string such as ``"50,80"`` into a list of integers.

    Parameters
    ----------
    text : str
        The comma separated values.

    Returns
    -------
    List[int]
        The parsed integers, in input order.

    Raises
    ------
    TypeError
        If the input is not a string.
    ValueError
        If the string is empty or an item is not an integer.
    """
    if not isinstance(text, str):
        raise TypeError("Input must be a string")

    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("Expected at least one integer")

    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValueError("Invalid integer list: %r" % text)


def str_to_float_list(text: str) -> List[float]:
    """
    Converts a comma separated string such as ``"0.1,0.2"`` into a list of floats.

    Parameters
    ----------
    text : str
        The comma separated values.

    Returns
    -------
    List[float]
        The parsed floats, in input order.

    Raises
    ------
    TypeError
        If the input is not a string.
    ValueError
        If the string is empty or an item is not a number.
    """
    if not isinstance(text, str):
        raise TypeError("Input must be a string")

    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("Expected at least one number")

    try:
        return [float(item) for item in items]
    except ValueError:
        raise ValueError("Invalid number list: %r" % text)


def check_probability(p: float, name: str = "p") -> float:
    """
    Validates a probability.

    Raises
    ------
    ValueError
        If ``p`` lies outside ``[0, 1]``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("%s must lie in [0, 1], got %r" % (name, p))
    return float(p)


def log_threshold_probability(factor: float, n: int) -> float:
    """
    Returns ``factor * ln(n) / n`` clipped to ``[0, 1]``.

    Parameters
    ----------
    factor : float
        Multiplier of the connectivity threshold ``ln(n) / n``.
    n : int
        Number of vertices.

    Returns
    -------
    float
        The edge / face probability.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    return min(1.0, max(0.0, factor * math.log(n) / n))


def binomial(n: int, r: int) -> int:
    # math.comb already returns 0 for r > n; negative r is the empty-face edge case
    if r < 0 or n < 0:
        return 0
    return math.comb(n, r)
