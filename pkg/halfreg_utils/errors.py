class HalfRegError(Exception):
    """
    Base class for errors raised by halfreg_utils.
    """
    def suggest(self, *args):
        """
        regenerate the exception with additional arguments
        :param args: addition arguments
        :return: a new exception of the same type with the additional arguments
        """
        return self.__class__(*(self.args + args))


# instance and realization errors

class InvalidMatrix(HalfRegError):
    """
    Degree matrix fails one of the existence conditions.
    """

class DimensionMismatch(HalfRegError):
    """
    Realization shape does not match the degree matrix.
    """

class NotNearRealization(HalfRegError):
    """
    A row deviates from the degree matrix by more than one +1/-1 pair.
    """

class DifferentInstances(HalfRegError):
    """
    Two realizations do not realize the same degree matrix.
    """


# construction

class Infeasible(HalfRegError):
    """
    Single factor degree sequence is not graphical.
    """

class AlreadySimple(HalfRegError):
    """
    Multi union has exceed number zero.
    """

class CoverNotFound(HalfRegError):
    """
    No subset of columns covers the colour multiset of a case search step.
    """


# auxiliary multigraphs and trails

class SameRow(HalfRegError):
    """
    Auxiliary multigraph requested for a row paired with itself.
    """

class PreconditionViolated(HalfRegError):
    """
    Trail precondition does not hold.
    """

class NoNonLoopEdge(PreconditionViolated):
    """
    Start colour has no non-loop outgoing edge.
    """

class InvalidTrail(HalfRegError):
    """
    Edge sequence is not a trail of the multigraph.
    """

class NotBalanced(HalfRegError):
    """
    Multigraph has a colour with out-degree different from in-degree.
    """


# perturbations

class BadDefectShape(HalfRegError):
    """
    Deficiency records do not have the shape a repair expects.
    """

class NotACyclicPermutation(HalfRegError):
    """
    Columns and target colours do not describe a cyclic permutation.
    """

class NotReversible(HalfRegError):
    """
    Proposal has no paired reverse proposal.
    """


# oracle and statistics

class TooLarge(HalfRegError):
    """
    Instance exceeds the enumeration size guard.
    """

class InsufficientSamples(HalfRegError):
    """
    Too few samples for a goodness of fit test.
    """

class StateSpaceMismatch(HalfRegError):
    """
    Samples contain more distinct states than the stated state space.
    """


# files

class IoError(HalfRegError):
    """
    File is missing or unreadable.
    """

class SchemaError(HalfRegError):
    """
    File contents or constructor arguments do not follow the expected schema.
    """
