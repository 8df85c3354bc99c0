"""Exception hierarchy shared by the library and the command-line front end."""


class CirclePatternError(Exception):
    """Base class for all library errors."""


class ParseError(CirclePatternError, ValueError):
    """Syntax error in a triangulation, voltage or data file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantError(CirclePatternError, ValueError):
    """A Delta-complex invariant does not hold.

    ``invariant`` names the failed check and ``cell`` is a ``(kind, id)`` pair
    such as ``("triangle", 3)``.
    """

    def __init__(self, invariant, message, cell=None):
        self.invariant = invariant
        self.cell = cell
        super().__init__(f"[{invariant}] {message}")


class NonOrientableError(CirclePatternError):
    def __init__(self, message, edge_cycle):
        self.edge_cycle = list(edge_cycle)
        super().__init__(message)


class DisconnectedError(CirclePatternError):
    pass


class DegenerateTriangleError(CirclePatternError):
    def __init__(self, triangle, lengths, detail=""):
        self.triangle = int(triangle)
        self.lengths = tuple(float(x) for x in lengths)
        msg = f"triangle {self.triangle} is degenerate with side lengths {self.lengths}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class VoltageError(CirclePatternError, ValueError):
    """Voltage assignment violates a triangle relator or is malformed."""


class CoverNotFoundError(CirclePatternError):
    """No tried prime gave a simplicial homology cover.

    ``attempts`` maps each tried prime to its simplicial-check witnesses.
    """

    def __init__(self, attempts, p_max):
        self.attempts = attempts
        self.p_max = p_max
        tried = ", ".join(str(p) for p in attempts) or "none"
        super().__init__(
            f"no mod-p homology cover with p <= {p_max} is simplicial (tried: {tried}); "
            "supply explicit voltages for a cover outside this family"
        )


class NotSimplicialError(CirclePatternError, ValueError):
    pass


class EnumerationCapError(CirclePatternError):
    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(
            f"subset enumeration needs {required} vertices but the cap is {cap}"
        )
