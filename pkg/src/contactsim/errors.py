"""Package exception types."""


class ContactSimError(Exception):
    pass


class MeshValidationError(ContactSimError, ValueError):
    pass


class ObjParseError(MeshValidationError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}" if lineno else message)
        self.lineno = lineno


class SceneConfigError(ContactSimError, ValueError):
    """Config parse/validation failure; message carries the offending key path."""


class NonFiniteStateError(ContactSimError, RuntimeError):
    """A body reached a non-finite pose or velocity; the scene must halt."""


class SingularOrientationError(ContactSimError, ValueError):
    """Axis-angle parametrization queried at or near its rotation-pi singularity."""
