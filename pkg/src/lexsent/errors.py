"""Exception hierarchy shared by every lexsent module."""


class LexsentError(Exception):
    """Base class for all lexsent errors."""


# model / trees
class ModelNotLoaded(LexsentError):
    pass


class NeutralDonorMissing(LexsentError):
    pass


class DimensionMismatch(LexsentError, ValueError):
    pass


class EmptyTree(LexsentError, ValueError):
    pass


class UnsupportedVersion(LexsentError):
    pass


class CorruptModel(LexsentError):
    pass


class ParseError(LexsentError, ValueError):
    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class NonBinaryNode(LexsentError, ValueError):
    pass


class EmptyPhrase(LexsentError, ValueError):
    pass


# trainer
class UnlabeledNode(LexsentError, ValueError):
    pass


class EmptyTreebank(LexsentError, ValueError):
    pass


class TrainingDiverged(LexsentError, FloatingPointError):
    pass


# vocab
class StoplistMissing(LexsentError, FileNotFoundError):
    pass


class EmptyTable(LexsentError, ValueError):
    pass


# annotate
class WrongJudgeCount(LexsentError, ValueError):
    pass


class DuplicateWord(LexsentError, ValueError):
    pass


# adapt
class MissingGold(LexsentError, KeyError):
    def __str__(self):
        return f"no gold annotation for {self.args[0]!r}"


class MissingTag(LexsentError, KeyError):
    def __str__(self):
        return f"no POS tag for {self.args[0]!r}"


class NoDonorForTag(LexsentError, KeyError):
    def __str__(self):
        return f"no donor word for tag {self.args[0]!r}"


class DonorMissing(LexsentError, KeyError):
    def __str__(self):
        return f"donor word {self.args[0]!r} not in model vocabulary"


class DuplicateDeviation(LexsentError, ValueError):
    pass


# classify / eval
class InvalidDistribution(LexsentError, ValueError):
    pass


class LengthMismatch(LexsentError, ValueError):
    pass


class EmptyInput(LexsentError, ValueError):
    pass
