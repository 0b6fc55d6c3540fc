import pytest

from maxpoly import build_program, solve, SolverConfig

# reported coordinate sets used as test inputs (8 significant digits)
OCTAGON_X = (0.26214172, 0.67123417, 0.67123381, 0.90909242, 0.90909213)
DECAGON_X_FULL = (0.21101191, 0.54864468, 0.54864311, 0.78292524, 0.78292347,
                  0.94529290, 0.94529183)
DECAGON_X_SYM = (0.21101121, 0.54864181, 0.78292327, 0.94529267)
DODECAGON_X_FULL = (0.17616131, 0.46150224, 0.46150519, 0.67623091, 0.67623301,
                    0.85320300, 0.85320328, 0.96231370, 0.96231344)
DODECAGON_X_SYM = (0.17616079, 0.46150096, 0.67622897, 0.85319926, 0.96231045)
TETRADECAGON_X_SYM = (0.15100047, 0.39733106, 0.59117050, 0.76441599,
                      0.89237421, 0.97279813)
HEXADECAGON_X_SYM = (0.13204787, 0.34840959, 0.52343183, 0.68719098,
                     0.81912908, 0.91836386, 0.97935563)


@pytest.fixture(scope="session")
def solved():
    """One moderate-effort solve per instance, shared across the suite."""
    cache = {}

    def get(n, symmetric, starts=32):
        key = (n, symmetric)
        if key not in cache:
            program = build_program(n, symmetric=symmetric)
            cache[key] = (program, solve(program, SolverConfig(starts=starts)))
        return cache[key]

    return get
