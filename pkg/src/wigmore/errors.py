"""Exception hierarchy shared across the package.

Structural problems found by the chart validator are *data* (violations in a
report), not exceptions; everything here signals a request the library cannot
honor at all.
"""


class WigmoreError(Exception):
    """Base class for all package errors."""


class ChartParseError(WigmoreError):
    """A case file is malformed: bad JSON, unknown labels, unresolvable ids."""


class ModelParseError(WigmoreError):
    """A network model file is malformed."""


class SpecParseError(WigmoreError):
    """A compilation or sweep spec file is malformed."""


class InvalidNetworkError(WigmoreError):
    """A network violates its own invariants (bad CPT rows, cycles, ...)."""


class CapacityError(WigmoreError):
    """The joint state space exceeds the enumeration guard."""


class ImpossibleEvidenceError(WigmoreError):
    """The observed assignment has probability zero under the model."""


class AmbiguousRoleError(WigmoreError):
    """An evidence node is both directly relevant and ancillary."""


class CompileError(WigmoreError):
    """A chart cannot be compiled into a network."""


class CompletenessError(CompileError):
    """The compilation spec is missing a required likelihood or credibility."""


class UndefinedForceError(WigmoreError):
    """A likelihood ratio is 0/0: the evidence is impossible on both branches."""


class ConditioningError(WigmoreError):
    """A conditional term degenerated: the conditioning event has probability zero."""


class SweepError(WigmoreError):
    """A sweep spec is inconsistent or exceeds its size caps."""


class EmptyTableError(WigmoreError):
    """A story table was requested for an empty scenario list."""
