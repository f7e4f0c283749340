class SpecializationError(Exception):
    """Base class; ``where`` names the generic location when known."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class NonConstContext(SpecializationError):
    pass


class AssertConstFailed(SpecializationError):
    pass


class FixpointLimitExceeded(SpecializationError):
    pass
