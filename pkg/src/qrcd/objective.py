"""Least-squares objective with exactly computed smoothness and convexity constants.

For f(x) = 1/2 * ||A x - y||^2 the gradient is A^T (A x - y), the gradient
Lipschitz constant L is the largest eigenvalue of A^T A and the strong
convexity constant m is the smallest. Both are computed by a dense
symmetric eigensolver so the downstream theory quantities are exact rather
than estimated.
"""

from dataclasses import dataclass

import numpy as np


class SingularProblem(ValueError):
    """A^T A is (numerically) singular: the objective is not strongly convex."""


class NotSymmetric(ValueError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class NoConvergence(RuntimeError):
    """Jacobi sweeps exceeded the iteration cap without converging."""


_MAX_DIM = 64


def symmetric_extreme_eigenvalues(matrix) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a small dense symmetric matrix.

    Uses cyclic Jacobi rotations, sweeping until the off-diagonal mass is
    at machine-precision level relative to the matrix norm. Intended for
    desk-scale matrices (d <= 64).

    Raises:
        NotSymmetric: asymmetry above 1e-10 relative to the matrix scale.
        NoConvergence: more than 100*d^2 sweeps (does not happen for
            symmetric input; kept as a hard stop).
    """
    M = np.array(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    d = M.shape[0]
    if d > _MAX_DIM:
        raise ValueError(f"dimension {d} exceeds supported desk scale {_MAX_DIM}")
    scale = max(1.0, float(np.abs(M).max()))
    if not np.isfinite(M).all():
        raise ValueError("matrix entries must be finite")
    if float(np.abs(M - M.T).max()) > 1e-10 * scale:
        raise NotSymmetric("asymmetry exceeds 1e-10 relative tolerance")
    B = (M + M.T) / 2.0
    if d == 1:
        return float(B[0, 0]), float(B[0, 0])

    fro = float(np.linalg.norm(B))
    stop = 1e-15 * max(1.0, fro)
    max_sweeps = 100 * d * d
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.tril(B, -1) ** 2) * 2.0))
        if off <= stop:
            eigs = np.diag(B)
            return float(eigs.min()), float(eigs.max())
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = B[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (B[q, q] - B[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0.0 \
                    else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rot_p = c * B[:, p] - s * B[:, q]
                rot_q = s * B[:, p] + c * B[:, q]
                B[:, p], B[:, q] = rot_p, rot_q
                rot_p = c * B[p, :] - s * B[q, :]
                rot_q = s * B[p, :] + c * B[q, :]
                B[p, :], B[q, :] = rot_p, rot_q
                B[p, q] = B[q, p] = 0.0
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


@dataclass(frozen=True)
class QuadraticObjective:
    """Immutable least-squares instance: design matrix, targets and constants.

    Invariants enforced at construction: lipschitz_L >= strong_convexity_m > 0,
    condition_g = L/m, and the normal-equations residual at the minimizer is
    negligible. Arrays are read-only so instances can be shared between
    concurrent runs.
    """

    design_matrix: np.ndarray
    targets: np.ndarray
    lipschitz_L: float
    strong_convexity_m: float
    condition_g: float
    minimizer_x_star: np.ndarray

    def __post_init__(self):
        if not self.lipschitz_L >= self.strong_convexity_m > 0.0:
            raise SingularProblem(
                f"need L >= m > 0, got L={self.lipschitz_L}, m={self.strong_convexity_m}"
            )
        rel = self.lipschitz_L / self.strong_convexity_m
        if abs(self.condition_g - rel) > 1e-9 * rel:
            raise ValueError("condition_g does not equal L/m")
        for name in ("design_matrix", "targets", "minimizer_x_star"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        grad_at_star = self.design_matrix.T @ (
            self.design_matrix @ self.minimizer_x_star - self.targets
        )
        bound = 1e-8 * (1.0 + float(np.linalg.norm(self.design_matrix.T @ self.targets)))
        if float(np.linalg.norm(grad_at_star)) > bound:
            raise SingularProblem("normal-equations residual check failed at x*")

    @property
    def n_observations(self) -> int:
        return self.design_matrix.shape[0]

    @property
    def dimension(self) -> int:
        return self.design_matrix.shape[1]


def build_least_squares(design_matrix, targets) -> QuadraticObjective:
    """Construct the objective for f(x) = 1/2 * ||A x - y||^2.

    L and m are the extreme eigenvalues of A^T A; the minimizer solves the
    normal equations by LU factorization with partial pivoting.

    Raises:
        SingularProblem: smallest eigenvalue of A^T A is <= 1e-12 times the
            largest (convergence theory inapplicable).
    """
    A = np.array(design_matrix, dtype=float)
    y = np.array(targets, dtype=float).reshape(-1)
    if A.ndim != 2:
        raise ValueError(f"design matrix must be 2-D, got shape {A.shape}")
    n, d = A.shape
    if not n >= d >= 1:
        raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
    if y.shape != (n,):
        raise ValueError(f"targets must have length {n}, got {y.shape}")
    if not (np.isfinite(A).all() and np.isfinite(y).all()):
        raise ValueError("design matrix and targets must be finite")

    gram = A.T @ A
    gram = (gram + gram.T) / 2.0
    smallest, largest = symmetric_extreme_eigenvalues(gram)
    if smallest <= 1e-12 * largest:
        raise SingularProblem(
            f"A^T A numerically singular: min eigenvalue {smallest:.3e} vs max {largest:.3e}"
        )
    x_star = np.linalg.solve(gram, A.T @ y)
    return QuadraticObjective(
        design_matrix=A,
        targets=y,
        lipschitz_L=largest,
        strong_convexity_m=smallest,
        condition_g=largest / smallest,
        minimizer_x_star=x_star,
    )


def gradient(obj: QuadraticObjective, x) -> np.ndarray:
    """Full gradient A^T (A x - y)."""
    x = np.asarray(x, dtype=float)
    return obj.design_matrix.T @ (obj.design_matrix @ x - obj.targets)


def partial_derivative(obj: QuadraticObjective, x, index: int) -> float:
    """Single gradient coordinate, as the node owning it would compute it.

    Computed as one column-times-residual reduction rather than by forming
    the full gradient, matching the distributed cost model (0-based index).
    """
    if not 0 <= index < obj.dimension:
        raise IndexError(f"coordinate index {index} out of range for dimension {obj.dimension}")
    x = np.asarray(x, dtype=float)
    residual = obj.design_matrix @ x - obj.targets
    return float(obj.design_matrix[:, index] @ residual)
