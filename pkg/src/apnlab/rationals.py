"""Exact-rational display and parsing.

Spectral moments always have power-of-two denominators, so they admit
exact terminating decimals (1.75, 2.3125, ...); anything else falls back
to the p/q form. Parsing accepts both spellings.
"""

from fractions import Fraction


def parse_rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse rational {text!r}") from None


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


def frac_str(value):
    """Canonical exact string: terminating decimal when the reduced
    denominator is a power of two, else 'p/q'."""
    fr = Fraction(value)
    if fr.denominator == 1:
        return str(fr.numerator)
    if not _is_pow2(fr.denominator):
        return f"{fr.numerator}/{fr.denominator}"
    k = fr.denominator.bit_length() - 1
    scaled = fr.numerator * 5 ** k  # p / 2^k == p * 5^k / 10^k
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    whole, frac = digits[:-k], digits[-k:]
    return f"{sign}{whole}.{frac}"


def frac_pair_str(value):
    """Reduced fraction plus its decimal, e.g. '7/4 (1.75)'."""
    fr = Fraction(value)
    if fr.denominator == 1:
        return str(fr.numerator)
    return f"{fr.numerator}/{fr.denominator} ({frac_str(fr)})"
