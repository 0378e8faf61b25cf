"""Exception types shared across the package."""


class SwarmlinkError(Exception):
    """Base class for all package-specific failures."""


class ParameterError(SwarmlinkError, ValueError):
    """A physical or configuration parameter is out of its valid range."""


class NumericError(SwarmlinkError, ArithmeticError):
    """A state or input stopped being finite."""


class InputError(SwarmlinkError, ValueError):
    """A runtime input stream violated its contract (e.g. time going backwards)."""


class ScenarioError(SwarmlinkError, ValueError):
    """A scenario document failed to parse or validate.

    `field` carries the offending key path when known; `line` the source
    line for syntax errors.
    """

    def __init__(self, message, field=None, line=None):
        parts = [message]
        if field is not None:
            parts.append(f"(field: {field})")
        if line is not None:
            parts.append(f"(line {line})")
        super().__init__(" ".join(parts))
        self.field = field
        self.line = line


class ProtocolError(SwarmlinkError, ValueError):
    """A live-session message violated the wire contract."""
