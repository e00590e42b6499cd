"""Exception types raised across the package."""


class MomentMatchError(Exception):
    """Base class for every error raised by this package."""


class SpecError(MomentMatchError, ValueError):
    """Invalid family specification or clamp."""


class RowSchemaError(MomentMatchError, ValueError):
    """A data row does not assign exactly the conditioning and observed variables."""


class EmptyDatasetError(MomentMatchError, ValueError):
    pass


class DegenerateClampError(MomentMatchError, ArithmeticError):
    """Every configuration compatible with a clamp is forbidden (log h = -inf)."""


class NoInteriorMaximumError(MomentMatchError, ArithmeticError):
    """The likelihood gradient never changes sign on the search grid."""


class ParseError(MomentMatchError, ValueError):
    """Syntactically malformed input document."""


class SchemaError(MomentMatchError, ValueError):
    """Well-formed input that violates the file schema.

    Messages always name a location: a key path for model files or a line
    number for dataset files.
    """
