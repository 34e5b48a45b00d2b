"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain where the formula is defined."""


class OutOfRegimeError(DomainError):
    """Feedback level beyond the validity boundary of the asymptotic fixed point."""


class CapacityError(RuntimeError):
    """A resource cap (codebook memory, trial budget) would be exceeded."""
