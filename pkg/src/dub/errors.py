"""Exception hierarchy shared by the engine and the command line."""


class DubError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 2


class ValidationError(DubError):
    """Input data violates a documented contract (bad file, unknown name...)."""


class RuleSyntaxError(ValidationError):
    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class UnknownRelationError(ValidationError):
    pass


class UnsafeRuleError(ValidationError):
    pass


class DuplicateRuleError(ValidationError):
    pass


class NotInKnowledgeBaseError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class GenerationError(ValidationError):
    """The synthetic generator could not satisfy its configured targets."""


class ResourceLimitError(DubError):
    """Forward chaining derived more facts than the configured cap."""

    exit_code = 3


class UsageError(DubError):
    exit_code = 1
