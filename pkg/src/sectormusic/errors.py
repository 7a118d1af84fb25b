"""Exception types raised for numerical (as opposed to input) failures."""


class NumericalError(ArithmeticError):
    """An eigensolver or closed-form evaluation could not produce a result."""


class DegenerateSpectrumError(NumericalError):
    """Eigenvalues that must be distinct coincide within tolerance."""
