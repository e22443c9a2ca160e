"""Exception hierarchy shared by the library and the CLI."""


class QuquatError(Exception):
    pass


class ArityError(QuquatError, ValueError):
    """Mode counts or mode indices do not fit the state."""


class DomainError(QuquatError, ValueError):
    """A parameter lies outside the region where the construction is defined."""


class SingularityError(DomainError):
    """A normalizer diverges or a coefficient becomes imaginary."""


class UnsupportedSupportError(QuquatError, ValueError):
    """A kept mode carries an amplitude outside {+-alpha, +-i alpha}."""


class DegenerateInputError(QuquatError, ValueError):
    pass


class ResourceError(QuquatError, RuntimeError):
    """The Fock oracle would need a cutoff beyond its hard limit."""

    def __init__(self, message: str, required_cutoff: int):
        super().__init__(message)
        self.required_cutoff = required_cutoff
