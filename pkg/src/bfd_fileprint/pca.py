"""Linear PCA stage: scatter matrix, Jacobi eigensolver, projection.

The scatter matrix uses the 1/N normalization. Eigenpairs come from
cyclic Jacobi sweeps over a fixed round-robin pair schedule, so the same
matrix always yields bit-identical eigenvectors.
"""

from dataclasses import dataclass

import numpy as np

from bfd_fileprint.errors import (
    DimensionMismatch,
    InsufficientSamples,
    NotConverged,
    NotSymmetric,
    OutOfRange,
)

DEFAULT_OFF_DIAG_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column i of `eigenvectors` pairs with value i."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # (d,)
    basis: np.ndarray         # (k, d), rows orthonormal
    eigenvalues: np.ndarray   # (d,), descending

    def __post_init__(self):
        for name in ("mean", "basis", "eigenvalues"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        d = self.mean.shape[0]
        if self.basis.ndim != 2 or self.basis.shape[1] != d:
            raise DimensionMismatch(f"Basis shape {self.basis.shape} does not match mean of dimension {d}")
        if self.eigenvalues.shape != (d,):
            raise DimensionMismatch(f"Expected {d} eigenvalues, got {self.eigenvalues.shape[0]}")
        if not 1 <= self.basis.shape[0] <= d:
            raise OutOfRange(f"Retained dimension {self.basis.shape[0]} outside [1, {d}]")

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.mean.shape[0]


def as_data_matrix(rows) -> np.ndarray:
    """Coerce rows into an (N, d) float matrix, rejecting ragged input."""
    if isinstance(rows, np.ndarray):
        data = rows.astype(np.float64, copy=False)
    else:
        rows = list(rows)
        lengths = {len(r) for r in rows}
        if len(lengths) > 1:
            raise DimensionMismatch(f"Rows have differing lengths: {sorted(lengths)}")
        data = np.array(rows, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionMismatch(f"Data matrix must be 2-D, got {data.ndim}-D")
    if data.shape[0] < 1:
        raise InsufficientSamples("Data matrix has no rows")
    return data


def scatter_matrix(data) -> np.ndarray:
    """S = (1/N) sum (x_n - mean)(x_n - mean)^T over all rows."""
    x = as_data_matrix(data)
    centered = x - x.mean(axis=0)
    s = centered.T @ centered / x.shape[0]
    # exact symmetry despite summation order
    return (s + s.T) / 2.0


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _round_robin_schedule(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split all index pairs of an n x n matrix into rounds of disjoint pairs.

    Circle-method tournament: index 0 stays fixed while the others rotate.
    With odd n a dummy index pads the table and its pairs are dropped.
    """
    m = n + (n % 2)
    others = list(range(1, m))
    rounds = []
    for _ in range(m - 1):
        seats = [0] + others
        pairs = [
            (min(seats[i], seats[m - 1 - i]), max(seats[i], seats[m - 1 - i]))
            for i in range(m // 2)
            if max(seats[i], seats[m - 1 - i]) < n
        ]
        pairs.sort()
        rounds.append((np.array([p for p, _ in pairs], dtype=np.intp), np.array([q for _, q in pairs], dtype=np.intp)))
        others = others[-1:] + others[:-1]
    return rounds


def _rotation_tangents(app: np.ndarray, aqq: np.ndarray, apq: np.ndarray) -> np.ndarray:
    """tan of the angle that zeroes each a[p, q]; 0 where a[p, q] already is."""
    active = apq != 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
        t = np.where(
            np.abs(theta) > 1e150,
            1.0 / (2.0 * theta),
            np.copysign(1.0, theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)),
        )
    return np.where(active, t, 0.0)


def jacobi_eigendecompose(
    s,
    off_diag_tol: float = DEFAULT_OFF_DIAG_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EigenDecomposition:
    """Diagonalize a symmetric matrix with cyclic Jacobi rotations.

    A sweep visits every (p, q) pair once, in a fixed round-robin order;
    the pairs of one round are disjoint, so their rotations commute and
    are applied together. Convergence is reached when the off-diagonal
    Frobenius norm drops to off_diag_tol * max(||S||_F, 1). Each
    eigenvector is signed so its largest-magnitude component is positive.

    Raises:
        NotSymmetric: if S deviates from its transpose by more than 1e-12
            (relative to its largest entry when that exceeds 1).
        NotConverged: if the tolerance is not met within max_sweeps.
    """
    a = np.array(s, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"Expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)
    if a.size and float(np.max(np.abs(a - a.T))) > SYMMETRY_TOL * scale:
        raise NotSymmetric("Matrix is not symmetric")
    a = (a + a.T) / 2.0
    v = np.eye(n)

    threshold = off_diag_tol * max(float(np.linalg.norm(a)), 1.0)
    schedule = _round_robin_schedule(n) if n > 1 else []
    sweeps = 0
    while _off_diagonal_norm(a) > threshold:
        if sweeps >= max_sweeps:
            raise NotConverged(
                f"Off-diagonal norm {_off_diagonal_norm(a):.3e} above {threshold:.3e} after {max_sweeps} sweeps"
            )
        sweeps += 1
        for p, q in schedule:
            apq = a[p, q]
            if not apq.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            t = _rotation_tangents(app, aqq, apq)
            c = 1.0 / np.sqrt(t * t + 1.0)
            sn = t * c

            cols_p = a[:, p]
            cols_q = a[:, q]
            a[:, p] = c * cols_p - sn * cols_q
            a[:, q] = sn * cols_p + c * cols_q
            rows_p = a[p, :]
            rows_q = a[q, :]
            a[p, :] = c[:, None] * rows_p - sn[:, None] * rows_q
            a[q, :] = sn[:, None] * rows_p + c[:, None] * rows_q
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vecs_p = v[:, p]
            vecs_q = v[:, q]
            v[:, p] = c * vecs_p - sn * vecs_q
            v[:, q] = sn * vecs_p + c * vecs_q

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for i in range(n):
        pivot = int(np.argmax(np.abs(vectors[:, i])))
        if vectors[pivot, i] < 0:
            vectors[:, i] = -vectors[:, i]
    return EigenDecomposition(values, vectors, sweeps)


def truncation_error(eigenvalues, k: int) -> float:
    """E_k = 1/2 * sum of the eigenvalues beyond the first k."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if not 0 <= k <= lam.shape[0]:
        raise OutOfRange(f"k={k} outside [0, {lam.shape[0]}]")
    return 0.5 * float(np.sum(lam[k:]))


def truncation_curve(eigenvalues) -> np.ndarray:
    """E_0..E_d in one pass; entry k is truncation_error(eigenvalues, k)."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    tails = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])
    return 0.5 * tails


def select_k(eigenvalues, budget: float) -> int:
    """Smallest k >= 1 whose truncation error is within `budget`."""
    if budget < 0:
        raise OutOfRange(f"Error budget must be non-negative, got {budget}")
    curve = truncation_curve(eigenvalues)
    for k in range(1, curve.shape[0]):
        if curve[k] <= budget:
            return k
    return curve.shape[0] - 1


def fit(
    data,
    k: int,
    off_diag_tol: float = DEFAULT_OFF_DIAG_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> PcaModel:
    """Fit PCA keeping the eigenvectors of the k largest eigenvalues."""
    x = as_data_matrix(data)
    n, d = x.shape
    if n < 2:
        raise InsufficientSamples(f"PCA needs at least 2 samples, got {n}")
    if not 1 <= k <= d:
        raise OutOfRange(f"k={k} outside [1, {d}]")
    decomposition = jacobi_eigendecompose(scatter_matrix(x), off_diag_tol, max_sweeps)
    # round-off can leave tiny negatives on a PSD matrix
    eigenvalues = np.clip(decomposition.eigenvalues, 0.0, None)
    return PcaModel(
        mean=x.mean(axis=0),
        basis=decomposition.eigenvectors[:, :k].T,
        eigenvalues=eigenvalues,
    )


def project(model: PcaModel, x) -> np.ndarray:
    """z = basis . (x - mean); accepts one vector or a matrix of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.d or x.ndim > 2:
        raise DimensionMismatch(f"Expected vectors of dimension {model.d}, got shape {x.shape}")
    return (x - model.mean) @ model.basis.T


def reconstruct(model: PcaModel, z) -> np.ndarray:
    """x_hat = mean + basis^T . z; accepts one vector or a matrix of rows."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != model.k or z.ndim > 2:
        raise DimensionMismatch(f"Expected coefficient vectors of dimension {model.k}, got shape {z.shape}")
    return model.mean + z @ model.basis
