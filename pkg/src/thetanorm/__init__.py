"""Theta series of positive definite quadratic forms: local densities, genus
coefficients, transformation data, Petersson norm estimates, explicit bounds
and sieve applications to sums of three squares."""

__version__ = "0.1.0"

from .errors import (BudgetError, BudgetExceeded, DomainError, ThetaNormError)  # noqa: E402,F401
from .forms import QuadForm, diagonal_form, load_form, validate_form  # noqa: E402,F401
