"""Exception hierarchy shared by every module."""


class HyperSystolicError(Exception):
    pass


class ShapeError(HyperSystolicError, ValueError):
    pass


class RegistryError(HyperSystolicError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class LayoutError(HyperSystolicError, ValueError):
    pass


class BasisError(HyperSystolicError, ValueError):
    pass


class SearchExhaustedError(BasisError):
    pass


class DomainError(HyperSystolicError, ValueError):
    pass


class MappingError(HyperSystolicError, ValueError):
    pass
