"""Exception hierarchy shared across the package.

Exit-code mapping for the command line lives in cli.py; library code only
raises these types.
"""


class BkclabError(Exception):
    """Base class for all library errors."""


class UnsupportedGroup(BkclabError):
    """Group kind or rank outside the supported tables."""


class CapExceeded(BkclabError):
    """A configured size cap (dimension, Weyl group order, degree) was hit."""


class NonIntegral(BkclabError):
    """A rational matrix entry has denominator divisible by p.

    Carries the entry position and the offending denominator; downstream this
    means a divided power is not defined at this prime.
    """

    def __init__(self, row: int, col: int, denominator: int):
        self.row = row
        self.col = col
        self.denominator = denominator
        super().__init__(
            f"entry ({row},{col}) has denominator {denominator} not invertible mod p"
        )


class DividedPowerUndefined(BkclabError):
    """E^j/j! does not reduce mod p; expected exactly when p < Coxeter number."""

    def __init__(self, p: int, power: int):
        self.p = p
        self.power = power
        super().__init__(f"divided power at exponent {power} undefined mod {p}")


class RegimeViolation(BkclabError):
    """Requested construction is outside its validity regime."""


class InternalCheckError(BkclabError):
    """A runtime self-check failed; indicates an implementation bug."""
