"""Exception types shared across the package."""


class PrecisionError(ValueError):
    """Not enough working precision to honour the requested computation.

    ``required_digits``, when known, is the smallest request that would be
    accepted.
    """

    def __init__(self, message, required_digits=None):
        super().__init__(message)
        self.required_digits = required_digits


class UnknownConstantError(LookupError):
    """Constant name not present in the registry."""

    def __init__(self, name, suggestions=()):
        self.name = name
        self.suggestions = tuple(suggestions)
        hint = f" (did you mean: {', '.join(self.suggestions)}?)" if self.suggestions else ""
        super().__init__(f"unknown constant {name!r}{hint}")


class SumSpecParseError(ValueError):
    """A sum spec-string did not match the grammar."""


class ConfigurationError(RuntimeError):
    """An identity references a constant that is not registered."""
