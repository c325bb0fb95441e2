"""Exception hierarchy shared by every mixlab module."""


class MixlabError(Exception):
    pass


class OutOfRange(MixlabError, ValueError):
    pass


class SelfLoop(MixlabError, ValueError):
    pass


class DuplicateEdge(MixlabError, ValueError):
    pass


class Disconnected(MixlabError, ValueError):
    pass


class EmptyGraph(MixlabError, ValueError):
    pass


class Unreachable(MixlabError, ValueError):
    pass


class EdgeListFormatError(MixlabError, ValueError):
    pass


class BadParams(MixlabError, ValueError):
    pass


class OddDegreeSum(BadParams):
    pass


class SizeCapExceeded(MixlabError, RuntimeError):
    pass


class RejectionBudgetExceeded(MixlabError, RuntimeError):
    pass


class DegenerateKernel(MixlabError, RuntimeError):
    pass


class TooLarge(MixlabError, ValueError):
    pass


class DimensionMismatch(MixlabError, ValueError):
    pass


class NoConvergence(MixlabError, RuntimeError):
    pass


class BadBoundary(MixlabError, ValueError):
    pass


class NotCentered(MixlabError, ValueError):
    pass


class NotATree(MixlabError, ValueError):
    pass


class TooFewPoints(MixlabError, ValueError):
    pass


class ConfigError(MixlabError, ValueError):
    pass
