"""Angular-momentum matrices on direct sums of spin-j blocks (ħ = 1).

Basis order: blocks follow ``j_list``; inside a block ``m`` runs from ``j``
down to ``-j``.  So for ``j_list = [0, 1]`` the rows are
``|0,0⟩, |1,1⟩, |1,0⟩, |1,-1⟩``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError
from .operator_core import DensityMatrix, HermitianOperator


def _as_half_integer(j) -> Fraction:
    try:
        twice = Fraction(j) * 2
    except (TypeError, ValueError) as exc:
        raise InputError(f"j must be a number, got {j!r}") from exc
    if twice.denominator != 1 or twice < 0:
        raise InputError(f"j must be a non-negative half-integer, got {j!r}")
    return twice / 2


@dataclass(frozen=True)
class SpinSpace:
    j_list: tuple[Fraction, ...]

    def __init__(self, j_list):
        js = tuple(_as_half_integer(j) for j in j_list)
        if not js:
            raise InputError("j_list must not be empty")
        if len(set(js)) != len(js):
            raise InputError("j_list must not repeat a value; (j, m) labels have to be unique")
        object.__setattr__(self, "j_list", js)

    @property
    def dim(self) -> int:
        return sum(int(2 * j + 1) for j in self.j_list)

    @property
    def labels(self) -> list[tuple[Fraction, Fraction]]:
        """``(j, m)`` for every row, in basis order."""
        out = []
        for j in self.j_list:
            out.extend((j, j - k) for k in range(int(2 * j + 1)))
        return out

    def index(self, j, m) -> int:
        """Row index of ``|j, m⟩``."""
        j, m = Fraction(j), Fraction(m)
        offset = 0
        for jj in self.j_list:
            size = int(2 * jj + 1)
            if jj == j:
                k = j - m
                if k.denominator != 1 or not 0 <= k < size:
                    raise InputError(f"m={m} is not in the j={j} multiplet")
                return offset + int(k)
            offset += size
        raise InputError(f"no block with j={j}")

    def ket(self, j, m) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.complex128)
        v[self.index(j, m)] = 1.0
        return v

    def label_table(self) -> list[dict]:
        """Row index to ``(j, m)`` mapping, for the JSON sidecar file."""
        return [
            {"index": i, "j": str(j), "m": str(m)} for i, (j, m) in enumerate(self.labels)
        ]


def raising_operator(space: SpinSpace) -> np.ndarray:
    """``J₊`` with ``⟨j,m+1|J₊|j,m⟩ = sqrt(j(j+1) - m(m+1))``."""
    jp = np.zeros((space.dim, space.dim), dtype=np.complex128)
    offset = 0
    for j in space.j_list:
        size = int(2 * j + 1)
        for k in range(1, size):
            # column k holds m = j - k, row k-1 holds m + 1
            m = j - k
            jp[offset + k - 1, offset + k] = np.sqrt(float(j * (j + 1) - m * (m + 1)))
        offset += size
    return jp


def angular_momentum_ops(space: SpinSpace) -> tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
    """Cartesian components ``(Jx, Jy, Jz)``."""
    jp = raising_operator(space)
    jm = jp.conj().T
    jz = np.diag([float(m) for _, m in space.labels]).astype(np.complex128)
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return HermitianOperator(jx), HermitianOperator(jy), HermitianOperator(jz)


def total_angular_momentum(space: SpinSpace) -> np.ndarray:
    jx, jy, jz = angular_momentum_ops(space)
    return jx.matrix @ jx.matrix + jy.matrix @ jy.matrix + jz.matrix @ jz.matrix


def spin_pair_example() -> tuple[HermitianOperator, HermitianOperator, DensityMatrix]:
    """``(Jx, Jy, ½(|0,0⟩⟨0,0| + |1,1⟩⟨1,1|))`` on the ``j = 0 ⊕ 1`` space."""
    space = SpinSpace([0, 1])
    jx, jy, _ = angular_momentum_ops(space)
    rho = DensityMatrix.from_mixture([space.ket(0, 0), space.ket(1, 1)])
    return jx, jy, rho
