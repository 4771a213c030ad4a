class RowSparseError(Exception):
    pass


class ParameterDomainError(RowSparseError, ValueError):
    pass


class DimensionMismatchError(RowSparseError, ValueError):
    pass


class CapacityError(RowSparseError):
    pass


class DegenerateGridError(RowSparseError, ValueError):
    pass


class InvalidConfigError(RowSparseError, ValueError):
    pass


class EmitError(RowSparseError, IOError):

    def __init__(self, path, reason):

        super(EmitError, self).__init__("Unable to write '%s': %s" % (path, reason))
        self.path = path
        self.reason = reason
