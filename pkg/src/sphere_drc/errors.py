class ConstructionError(RuntimeError):
    """A construction could not satisfy its own preconditions (e.g. zero inner products)."""


class ResourceError(ValueError):
    """Requested object is too large for an in-memory build."""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class ArtifactError(ValueError):
    pass


class UnsupportedVersion(ArtifactError):
    pass


class CorruptArtifact(ArtifactError):
    pass
