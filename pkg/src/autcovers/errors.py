"""Exception hierarchy.

Every domain error carries a stable ``code`` string that the CLI reports and
maps to exit status 2.
"""


class AutCoversError(Exception):
    code = "DOMAIN_ERROR"


class IndexOutOfRange(AutCoversError, IndexError):
    code = "INDEX_OUT_OF_RANGE"


class RankMismatch(AutCoversError, ValueError):
    code = "RANK_MISMATCH"


class AmbientMismatch(AutCoversError, ValueError):
    code = "AMBIENT_MISMATCH"


class InfiniteGroup(AutCoversError, ValueError):
    code = "INFINITE_GROUP"


class NotSurjective(AutCoversError, ValueError):
    code = "NOT_SURJECTIVE"


class NotCompatible(AutCoversError, ValueError):
    code = "NOT_COMPATIBLE"


class NotTorelli(AutCoversError, ValueError):
    code = "NOT_TORELLI"


class NotInKernel(AutCoversError, ValueError):
    code = "NOT_IN_KERNEL"


class NotSquare(AutCoversError, ValueError):
    code = "NOT_SQUARE"


class Singular(AutCoversError, ValueError):
    code = "SINGULAR"


class InvalidBound(AutCoversError, ValueError):
    code = "INVALID_BOUND"


class InvalidParams(AutCoversError, ValueError):
    code = "INVALID_PARAMS"


class NoWitness(AutCoversError):
    code = "NO_WITNESS"


class DepthMismatch(AutCoversError, ValueError):
    code = "DEPTH_MISMATCH"


class BadDegree(AutCoversError, ValueError):
    code = "BAD_DEGREE"


class NotPGroup(AutCoversError, ValueError):
    code = "NOT_P_GROUP"


class InvalidTower(AutCoversError, ValueError):
    code = "INVALID_TOWER"


class Disconnected(AutCoversError, ValueError):
    code = "DISCONNECTED"


class Degenerate(AutCoversError, ValueError):
    code = "DEGENERATE"


class ParseError(AutCoversError, ValueError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None, field=None):
        self.line, self.column, self.field = line, column, field
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class ValidationError(AutCoversError, ValueError):
    code = "VALIDATION_ERROR"

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
