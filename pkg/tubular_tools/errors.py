class TubularError(Exception):
    pass


class InputError(TubularError, ValueError):
    """A document, parameter or object reference is malformed."""
    pass


class CoverageError(InputError):
    pass


class NotATreeError(InputError):
    def __init__(self, detail: str = ""):
        msg = "underlying graph is not a tree"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NotLatticeMemberError(InputError):
    pass


class DegenerateSublatticeError(InputError):
    pass


class WitnessUnavailableError(InputError):
    pass


class MaterializationLimitError(TubularError):
    def __init__(self, required: int, limit: int):
        self.required = required
        self.limit = limit
        super().__init__(f"expansion needs {required} wall vertices and edges, limit is {limit}")


class CertificationError(TubularError):
    """An independent checker disagreed with the construction. Always a bug."""
    pass
