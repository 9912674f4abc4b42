"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed external input or a violated operation precondition."""


class GeometryError(RuntimeError):
    """Raised when a construction needs the origin inside the relative
    interior of a node's support and it is not there.

    Carries the offending node id and the separating certificate so
    callers can report or serialize it.
    """

    def __init__(self, node: int, certificate, message: str | None = None):
        self.node = node
        self.certificate = certificate
        super().__init__(
            message
            or f"origin outside the relative interior of the support at node {node}"
        )


class InternalError(RuntimeError):
    """An exact self-verification failed.

    Every solver outcome and every constructed witness is re-checked
    before being returned; this error firing means a bug, never bad
    input. The CLI maps it to the alarm exit code.
    """
