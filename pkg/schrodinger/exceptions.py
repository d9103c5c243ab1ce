"""Errors raised by the numerical modules of the schrodinger app"""


class CGOLabError(Exception):
    """Base class for every error the toolkit raises on purpose"""


class GridError(CGOLabError, ValueError):
    """Invalid grid arguments, or a grid too small for the requested operation"""


class FieldError(CGOLabError, ValueError):
    """Field shape/grid mismatch or an unreadable field file"""


class PotentialError(CGOLabError, ValueError):
    """Unknown catalog potential or malformed potential samples"""


class ParameterError(CGOLabError, ValueError):
    """A numerical parameter outside its admissible range"""


class SupportError(CGOLabError, ValueError):
    """A field whose support reaches a point it must avoid"""


class NonContractive(CGOLabError, ArithmeticError):
    """The fixed-point operator failed the empirical contraction probe"""

    def __init__(self, factor, n, message=None):
        self.factor = factor
        self.n = n
        super().__init__(message or (
            f'operator is not contractive at n={n:g}: measured factor {factor:.4f} >= 1'
        ))


class NoConvergence(CGOLabError, ArithmeticError):
    """Fixed-point iteration hit its iteration cap"""

    def __init__(self, iterations, last_step):
        self.iterations = iterations
        self.last_step = last_step
        super().__init__(
            f'no convergence after {iterations} iterations (last step {last_step:.3e})'
        )


class SingularSystem(CGOLabError, ArithmeticError):
    """The discrete Schrödinger operator is (numerically) not invertible"""

    def __init__(self, pivot_ratio):
        self.pivot_ratio = pivot_ratio
        super().__init__(
            f'discrete operator is singular (pivot ratio {pivot_ratio:.2e}); '
            'the potential is close to a Dirichlet eigenvalue'
        )
