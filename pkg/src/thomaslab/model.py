"""The cyclically symmetric Thomas flow and its closed-form linear algebra.

The vector field is

    dx/dt = sin(y) - b x
    dy/dt = sin(z) - b y
    dz/dt = sin(x) - b z

with a single damping parameter b >= 0.  Everything in this module is exact
(no integration): field evaluation, the Jacobian, its closed-form circulant
eigenvalues, and the symmetry operations of the flow.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

SQRT3_2 = math.sqrt(3.0) / 2.0


def as_state(s) -> np.ndarray:
    """Coerce to a finite float vector of shape (3,), else DomainError."""
    arr = np.asarray(s, dtype=float)
    if arr.shape != (3,):
        raise DomainError(f"state must have exactly 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"state components must be finite, got {arr}")
    return arr


def check_damping(b: float, positive: bool = False) -> float:
    """Validate the damping parameter. b must be finite and >= 0 (> 0 when
    positive=True)."""
    b = float(b)
    if not math.isfinite(b) or b < 0.0:
        raise DomainError(f"damping b must be finite and >= 0, got {b}")
    if positive and b == 0.0:
        raise DomainError("damping b must be > 0 for this operation")
    return b


def field(s, b: float) -> np.ndarray:
    """Right-hand side of the flow at state s."""
    x, y, z = as_state(s)
    b = check_damping(b)
    return np.array([math.sin(y) - b * x,
                     math.sin(z) - b * y,
                     math.sin(x) - b * z])


def jacobian(s, b: float) -> np.ndarray:
    """Jacobian matrix of the field at state s.

    Only the cyclic off-diagonal cosines and the constant -b diagonal appear:

        [[-b,      cos(y),  0     ],
         [ 0,     -b,       cos(z)],
         [ cos(x), 0,      -b     ]]
    """
    x, y, z = as_state(s)
    b = check_damping(b)
    return np.array([[-b, math.cos(y), 0.0],
                     [0.0, -b, math.cos(z)],
                     [math.cos(x), 0.0, -b]])


def divergence(b: float) -> float:
    """Divergence of the field, constant in space: -3b."""
    return -3.0 * check_damping(b)


class EigenTriple(NamedTuple):
    """Eigenvalues of the Jacobian at an on-diagonal point x = y = z.

    There the three cosines are equal (c = cos x) and the Jacobian is
    circulant, so the spectrum is available in closed form:

        lambda0   = c - b                       (real)
        lambda1,2 = -(b + c/2) +- i (sqrt(3)/2) |c|

    pair_im stores the non-negative imaginary part.  The sum of real parts
    equals the trace -3b identically.
    """
    lambda0: float
    pair_re: float
    pair_im: float

    def as_complex(self) -> np.ndarray:
        """All three eigenvalues as a complex array."""
        return np.array([self.lambda0 + 0.0j,
                         complex(self.pair_re, self.pair_im),
                         complex(self.pair_re, -self.pair_im)])

    @property
    def real_parts(self) -> np.ndarray:
        return np.array([self.lambda0, self.pair_re, self.pair_re])

    @property
    def max_real(self) -> float:
        return max(self.lambda0, self.pair_re)


def circulant_eigenvalues(c: float, b: float) -> EigenTriple:
    """Closed-form Jacobian eigenvalues on the diagonal, c = cos(x*).

    The complex pair is -(b + c/2) +- i (sqrt(3)/2) c; the imaginary part is
    stored as a magnitude.
    """
    c = float(c)
    if not math.isfinite(c) or abs(c) > 1.0:
        raise DomainError(f"c must be a cosine value in [-1, 1], got {c}")
    b = check_damping(b)
    return EigenTriple(lambda0=c - b,
                       pair_re=-(b + 0.5 * c),
                       pair_im=SQRT3_2 * abs(c))


def cyclic_permute(s) -> np.ndarray:
    """P: (x, y, z) -> (y, z, x). The field is equivariant under P."""
    x, y, z = as_state(s)
    return np.array([y, z, x])


def reflect(s) -> np.ndarray:
    """R: s -> -s. The field is odd, so it is equivariant under R too."""
    return -as_state(s)
