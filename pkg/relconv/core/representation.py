"""Left regular representation and the reduced norm of an honest groupoid.

λ_x(f) acts on functions on the source fiber G_x by h ↦ f⋆h. Its operator
norm is taken for the inner product weighted by μ_x, so on the points of
positive weight it equals the spectral norm of D^{1/2} M D^{-1/2}. This is
the only floating-point layer of the package.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from relconv.core.convolution import AlgebraElement
from relconv.core.exceptions import ConvergenceError, UnknownObjectError
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import RightHaarSystem
from relconv.core.scalars import to_complex
from relconv.core.settings import get_settings

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class RepMatrix:
    """λ_x(f) as a matrix over the morphisms of G_x, with the weights μ_x."""

    obj: int
    morphisms: tuple[int, ...]
    matrix: ComplexMatrix
    weights: npt.NDArray[np.float64]

    @property
    def dimension(self) -> int:
        return len(self.morphisms)

    def apply(self, h: npt.ArrayLike) -> ComplexMatrix:
        return self.matrix @ np.asarray(h, dtype=np.complex128)

    def symmetrized(self) -> ComplexMatrix:
        """D^{1/2} M D^{-1/2} restricted to points of positive weight."""
        keep = self.weights > 0
        root = np.sqrt(self.weights[keep])
        block = self.matrix[np.ix_(keep, keep)]
        return np.asarray(root[:, None] * block / root[None, :], dtype=np.complex128)


def _object_index(table: GroupoidTable, x: Union[int, str]) -> int:
    if isinstance(x, str):
        if x not in table.objects:
            raise UnknownObjectError(f"unknown object {x!r}")
        return table.objects.index(x)
    if not 0 <= x < len(table.objects):
        raise UnknownObjectError(f"unknown object index {x}")
    return x


def left_regular(table: GroupoidTable, haar: RightHaarSystem, f: AlgebraElement, x: Union[int, str]) -> RepMatrix:
    """M[γ, η] = f(γ∘η⁻¹)·μ_x(η) for γ, η ∈ G_x."""
    obj = _object_index(table, x)
    fiber = table.s_fiber(obj)
    mu = haar.measure(obj)
    weights = np.array([float(mu.weight(eta)) for eta in fiber], dtype=np.float64)
    matrix = np.zeros((len(fiber), len(fiber)), dtype=np.complex128)
    for i, gamma in enumerate(fiber):
        for j, eta in enumerate(fiber):
            composite = table.compose(gamma, table.inverse[eta])
            if composite is not None:
                matrix[i, j] = to_complex(f[composite]) * weights[j]
    return RepMatrix(obj=obj, morphisms=fiber, matrix=matrix, weights=weights)


def operator_norm(
    rep: RepMatrix,
    tolerance: Optional[float] = None,
    max_iterations: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Largest singular value by power iteration on B^H B.

    Stops when the relative change of the estimate drops below the
    tolerance; raises ConvergenceError with the last iterate otherwise.
    """
    settings = get_settings()
    tol = settings.power_tolerance if tolerance is None else tolerance
    limit = settings.power_max_iterations if max_iterations is None else max_iterations

    b = rep.symmetrized()
    if b.size == 0 or not np.any(b):
        return 0.0
    gram = b.conj().T @ b

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(b.shape[1]) + 1j * rng.standard_normal(b.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for iteration in range(limit):
        w = gram @ v
        value = float(np.linalg.norm(w))
        if value == 0.0:
            return 0.0
        if estimate > 0.0 and abs(value - estimate) / estimate < tol:
            logger.debug("Power iteration converged after %d steps", iteration + 1)
            return float(np.sqrt(value))
        estimate = value
        v = w / value
    raise ConvergenceError(
        f"power iteration did not converge in {limit} steps",
        last_iterate=v,
        estimate=float(np.sqrt(estimate)),
    )


def dense_norm(rep: RepMatrix) -> float:
    """The same operator norm through a full singular value decomposition."""
    b = rep.symmetrized()
    if b.size == 0:
        return 0.0
    return float(np.linalg.svd(b, compute_uv=False)[0])


def reduced_norm(table: GroupoidTable, haar: RightHaarSystem, f: AlgebraElement) -> float:
    """sup over objects x of ||λ_x(f)||."""
    return max((operator_norm(left_regular(table, haar, f, x)) for x in table.objects), default=0.0)
