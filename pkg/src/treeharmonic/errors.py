"""Exception types raised by treeharmonic."""


class TreeHarmonicError(Exception):
    """Base class for all package errors."""


class PrefixTooShort(TreeHarmonicError, ValueError):
    pass


class NearPole(TreeHarmonicError, ValueError):
    pass


class DegenerateAxis(TreeHarmonicError, ValueError):
    pass


class NoSolution(TreeHarmonicError, ValueError):
    pass


class EmptyInterior(TreeHarmonicError, ValueError):
    pass


class DepthTooShallow(TreeHarmonicError, ValueError):
    pass


class Undersampled(TreeHarmonicError, ValueError):
    pass


class DegenerateZ(TreeHarmonicError, ValueError):
    pass


class ConfigError(TreeHarmonicError, ValueError):
    """Invalid experiment configuration (CLI exit code 1)."""
