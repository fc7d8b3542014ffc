"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class MonoBorelError(Exception):
    exit_code = 1


class InputError(MonoBorelError, ValueError):
    """Malformed input, shape mismatch or violated precondition."""

    exit_code = 1


class ExactModeError(InputError):
    """Exact mode cannot represent the requested quantity."""


class SingularB0Error(MonoBorelError):
    """The linear part B0 = dG/dy(0, 0, 0) is not invertible."""

    exit_code = 2


class SingularDirectionError(MonoBorelError):
    """The Laplace ray meets (or nearly meets) a Borel-plane singularity."""

    exit_code = 3


class NonConvergenceError(MonoBorelError):
    """An iterative numeric stage failed to reach its tolerance."""

    exit_code = 4
