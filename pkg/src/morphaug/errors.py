"""Exception types shared across the toolkit."""


class MorphaugError(Exception):
    """Base class for all toolkit errors."""


class MalformedLine(MorphaugError):
    def __init__(self, line_no, detail=""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: expected 3 tab-separated fields{': ' + detail if detail else ''}")


class EmptyField(MorphaugError):
    def __init__(self, line_no, field):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}: empty {field}")


class EmptyDataset(MorphaugError):
    pass


class EmptyInput(MorphaugError):
    pass


class NoStem(MorphaugError):
    """No aligned run reaches the minimum stem length; triple cannot be corrupted."""


class AlphabetTooSmall(MorphaugError):
    pass


class NoAlignableTriples(MorphaugError):
    pass


class KTooLarge(MorphaugError):
    def __init__(self, k, pool_size):
        super().__init__(f"requested k={k} exceeds pool size {pool_size}")


class UnscoredPool(MorphaugError):
    pass


class MissingId(MorphaugError):
    def __init__(self, ids):
        self.ids = sorted(ids)
        super().__init__(f"score file missing ids: {', '.join(self.ids[:5])}"
                         + ("..." if len(self.ids) > 5 else ""))


class DuplicateId(MorphaugError):
    def __init__(self, example_id, line_no):
        super().__init__(f"line {line_no}: duplicate id {example_id!r}")


class UnknownId(MorphaugError):
    def __init__(self, example_id, line_no):
        super().__init__(f"line {line_no}: id {example_id!r} not in pool")


class NonNumericScore(MorphaugError):
    def __init__(self, line_no, value):
        super().__init__(f"line {line_no}: non-numeric score {value!r}")


class ZeroVariance(MorphaugError):
    def __init__(self, variable):
        self.variable = variable
        super().__init__(f"zero variance in {variable}; correlation undefined")


class EmptySelection(MorphaugError):
    pass


class NoVowelsConfigured(MorphaugError):
    pass


class TooFewSamples(MorphaugError):
    pass
