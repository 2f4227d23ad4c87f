class GeometryError(ValueError):
    pass


class NotIsotropic(GeometryError):
    pass


class AmbiguousClassification(GeometryError):
    pass


class NotOpposite(GeometryError):
    pass


class NotInGroup(GeometryError):
    """Matrix fails an orthogonality or stabilizer membership test."""


class NotRegular(GeometryError):
    """Top two eigenvalue moduli are too close to pick an attracting line."""


class EmptySample(GeometryError):
    pass


class PingPongFailure(ValueError):
    """A Schottky certificate could not be established.

    Carries the offending generator index, the ball (or ball pair) involved,
    and the margin that was achieved.
    """

    def __init__(self, message, generator=None, ball=None, margin=None):
        super().__init__(message)
        self.generator = generator
        self.ball = ball
        self.margin = margin


class SearchFailed(RuntimeError):
    def __init__(self, message, best_point=None, best_margin=None, densest_direction=None):
        super().__init__(message)
        self.best_point = best_point
        self.best_margin = best_margin
        self.densest_direction = densest_direction
