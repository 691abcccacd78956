"""Flat-torus discretization: fields, the discrete complex Hessian, and integrals.

A torus of complex dimension ``n`` is sampled on a uniform periodic grid
with ``N`` points per real axis, axes ordered (x_1, y_1, ..., x_n, y_n).
Scalar fields are float arrays over the grid; Hermitian fields carry an
(n, n) complex matrix per point, symmetrized on construction.

Centered second-order finite differences are the working derivative scheme.
A spectral route is provided as well; it is exact on trigonometric
polynomials and serves as the test oracle and the manufactured-data
generator, never as the solver's operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMetricError
from .symfunc import pencil_eigh

DEFAULT_POINT_BUDGET = 2_000_000


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on a flat torus of complex dimension ``n``.

    ``points_per_axis`` applies to each of the 2n real axes and the period
    is the same for all axes, so the spacing is ``period / points_per_axis``.
    """

    n: int
    points_per_axis: int
    period: float = 1.0
    point_budget: int = DEFAULT_POINT_BUDGET

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("complex dimension must be >= 1")
        if self.points_per_axis < 2 or self.points_per_axis % 2:
            raise DomainError("points_per_axis must be even and >= 2")
        if self.period <= 0:
            raise DomainError("period must be positive")
        if self.points_per_axis ** (2 * self.n) > self.point_budget:
            raise DomainError(
                f"{self.points_per_axis}^{2 * self.n} points exceed the budget "
                f"{self.point_budget}"
            )

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * (2 * self.n)

    @property
    def num_points(self) -> int:
        return self.points_per_axis ** (2 * self.n)

    def axis_coords(self, axis: int) -> np.ndarray:
        """Coordinates along one real axis, shaped to broadcast over the grid."""
        c = np.arange(self.points_per_axis) * self.spacing
        shape = [1] * (2 * self.n)
        shape[axis] = self.points_per_axis
        return c.reshape(shape)


@dataclass(eq=False)
class ScalarField:
    """Real scalar values on a torus grid."""

    grid: TorusGrid
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != self.grid.shape:
            raise DomainError(
                f"scalar data shape {self.data.shape} != grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.data)):
            raise DomainError("scalar field contains non-finite values")

    @classmethod
    def constant(cls, grid: TorusGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy())


@dataclass(eq=False)
class HermitianField:
    """An (n, n) Hermitian matrix per grid point; symmetrized on write."""

    grid: TorusGrid
    data: np.ndarray

    def __post_init__(self):
        n = self.grid.n
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != self.grid.shape + (n, n):
            raise DomainError(
                f"matrix data shape {self.data.shape} != {self.grid.shape + (n, n)}"
            )
        self.data = 0.5 * (self.data + np.conj(np.swapaxes(self.data, -1, -2)))

    @classmethod
    def constant(cls, grid: TorusGrid, matrix) -> "HermitianField":
        mat = np.asarray(matrix, dtype=complex)
        data = np.broadcast_to(mat, grid.shape + mat.shape).copy()
        return cls(grid, data)

    @classmethod
    def identity(cls, grid: TorusGrid, scale: float = 1.0) -> "HermitianField":
        return cls.constant(grid, scale * np.eye(grid.n))

    def copy(self) -> "HermitianField":
        return HermitianField(self.grid, self.data.copy())


def _same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise DomainError("fields live on different grids")
    return g


# ---------------------------------------------------------------------------
# finite differences


def diff1(data: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(data, -1, axis) - np.roll(data, 1, axis)) / (2.0 * h)


def diff2(data: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(data, -1, axis) - 2.0 * data + np.roll(data, 1, axis)) / (h * h)


def complex_hessian(phi: ScalarField) -> HermitianField:
    """Discrete complex Hessian of a scalar potential.

    Entry (i, j) realizes
    (1/4)(d_{x_i x_j} + d_{y_i y_j}) + (i/4)(d_{x_i y_j} - d_{y_i x_j})
    with centered periodic differences.  The i = j imaginary part vanishes
    identically and entries below the diagonal are conjugated copies, so the
    output is Hermitian by construction.
    """
    grid = phi.grid
    n, h = grid.n, grid.spacing
    f = phi.data
    out = np.zeros(grid.shape + (n, n), dtype=complex)
    for i in range(n):
        xi, yi = 2 * i, 2 * i + 1
        out[..., i, i] = 0.25 * (diff2(f, xi, h) + diff2(f, yi, h))
        for j in range(i + 1, n):
            xj, yj = 2 * j, 2 * j + 1
            dxi = diff1(f, xi, h)
            dyi = diff1(f, yi, h)
            re = 0.25 * (diff1(dxi, xj, h) + diff1(dyi, yj, h))
            im = 0.25 * (diff1(dxi, yj, h) - diff1(dyi, xj, h))
            out[..., i, j] = re + 1j * im
            out[..., j, i] = re - 1j * im
    return HermitianField(grid, out)


def complex_gradient(phi: ScalarField) -> np.ndarray:
    """Holomorphic gradient (d/dz_i) phi = (d_x - i d_y)/2, shape grid + (n,)."""
    grid = phi.grid
    n, h = grid.n, grid.spacing
    out = np.zeros(grid.shape + (n,), dtype=complex)
    for i in range(n):
        out[..., i] = 0.5 * (diff1(phi.data, 2 * i, h) - 1j * diff1(phi.data, 2 * i + 1, h))
    return out


# ---------------------------------------------------------------------------
# spectral route (oracle / manufactured data only)


def _wavenumbers(grid: TorusGrid) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(grid.points_per_axis, d=grid.spacing)


def spectral_derivative(data: np.ndarray, axis: int, grid: TorusGrid, order: int = 1) -> np.ndarray:
    k = _wavenumbers(grid)
    shape = [1] * data.ndim
    shape[axis] = grid.points_per_axis
    mult = (1j * k.reshape(shape)) ** order
    if order % 2 == 0:
        mult = mult.real
    return np.fft.ifftn(np.fft.fftn(data) * mult).real


def complex_hessian_spectral(phi: ScalarField) -> HermitianField:
    """Complex Hessian via Fourier differentiation; exact on resolved modes."""
    grid = phi.grid
    n = grid.n
    f = phi.data
    out = np.zeros(grid.shape + (n, n), dtype=complex)
    d1 = {a: spectral_derivative(f, a, grid) for a in range(2 * n)}
    for i in range(n):
        xi, yi = 2 * i, 2 * i + 1
        out[..., i, i] = 0.25 * (
            spectral_derivative(f, xi, grid, order=2)
            + spectral_derivative(f, yi, grid, order=2)
        )
        for j in range(i + 1, n):
            xj, yj = 2 * j, 2 * j + 1
            re = 0.25 * (
                spectral_derivative(d1[xi], xj, grid)
                + spectral_derivative(d1[yi], yj, grid)
            )
            im = 0.25 * (
                spectral_derivative(d1[xi], yj, grid)
                - spectral_derivative(d1[yi], xj, grid)
            )
            out[..., i, j] = re + 1j * im
            out[..., j, i] = re - 1j * im
    return HermitianField(grid, out)


def fd_laplacian_symbol(grid: TorusGrid) -> np.ndarray:
    """Fourier symbol of the centered 2n-dimensional finite-difference Laplacian."""
    N, h = grid.points_per_axis, grid.spacing
    one_axis = (2.0 * np.cos(2.0 * np.pi * np.arange(N) / N) - 2.0) / (h * h)
    sym = np.zeros(grid.shape)
    for a in range(2 * grid.n):
        shape = [1] * (2 * grid.n)
        shape[a] = N
        sym = sym + one_axis.reshape(shape)
    return sym


# ---------------------------------------------------------------------------
# eigen fields, reductions, norms


def eigen_field(A: HermitianField, G: HermitianField) -> np.ndarray:
    """Pointwise generalized eigenvalues of A with respect to G, descending.

    Shape grid + (n,).  A singular metric aborts with the grid coordinates
    of the failing point.
    """
    _same_grid(A, G)
    try:
        lam, _, _ = pencil_eigh(A.data, G.data)
    except SingularMetricError as err:
        raise SingularMetricError(
            f"metric singular at grid point {err.point}", point=err.point
        ) from err
    return lam.real


def tree_sum(values: np.ndarray) -> float:
    """Pairwise (tree) sum with a fixed combination order.

    The reduction order depends only on the flattened length, so repeated
    runs on identical data are bit-identical.
    """
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            tail = a[-1:]
            a = a[:-1]
        else:
            tail = None
        a = a[0::2] + a[1::2]
        if tail is not None:
            a = np.concatenate([a, tail])
    return float(a[0])


def integrate(g: ScalarField, volume: ScalarField | None = None) -> float:
    """Integral of g against a volume density, h^(2n) * sum in tree order."""
    if volume is None:
        values = g.data
    else:
        _same_grid(g, volume)
        values = g.data * volume.data
    return g.grid.spacing ** (2 * g.grid.n) * tree_sum(values)


def grid_mean(g: ScalarField) -> float:
    return tree_sum(g.data) / g.grid.num_points


def lp_norm(g: ScalarField, p: float, volume: ScalarField | None = None) -> float:
    """L^p norm against the volume density; p = inf returns the grid max."""
    if np.isinf(p):
        return float(np.abs(g.data).max())
    if p < 1:
        raise DomainError("p must be >= 1 (or inf)")
    absg = ScalarField(g.grid, np.abs(g.data) ** p)
    return integrate(absg, volume) ** (1.0 / p)


def entropy_functional(f: ScalarField, p: float, volume: ScalarField | None = None) -> float:
    """The weighted mass integral of exp(n f) (1 + n |f|)^p.

    Evaluated in log space, exp(n f + p log1p(n |f|)), so large nf does not
    overflow prematurely.
    """
    if p <= 0:
        raise DomainError("entropy exponent p must be positive")
    n = f.grid.n
    vals = np.exp(n * f.data + p * np.log1p(n * np.abs(f.data)))
    return integrate(ScalarField(f.grid, vals), volume)


def mollify(g: ScalarField, sigma: float) -> ScalarField:
    """Periodic Gaussian smoothing with standard deviation ``sigma``.

    Convolution with a separable wrapped-Gaussian kernel sampled on the
    grid and normalized to unit sum per axis, applied as one circular FFT
    convolution.  Because the kernel is nonnegative with exact unit mass,
    the output is a convex combination of input samples: positivity is
    preserved and the integral survives to roundoff.  sigma = 0 is the
    identity.
    """
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    if sigma == 0.0:
        return g.copy()
    grid = g.grid
    N, L = grid.points_per_axis, grid.period
    x = np.arange(N) * grid.spacing
    dist = np.minimum(x, L - x)
    kernel = np.exp(-0.5 * (dist / sigma) ** 2)
    kernel /= kernel.sum()
    multiplier = np.fft.fft(kernel)
    spectrum = np.fft.fftn(g.data).astype(complex)
    for a in range(2 * grid.n):
        shape = [1] * (2 * grid.n)
        shape[a] = N
        spectrum *= multiplier.reshape(shape)
    out = np.fft.ifftn(spectrum).real
    if np.all(g.data >= 0.0):
        out = np.maximum(out, 0.0)
    return ScalarField(grid, out)


def laplacian_with_metric(v: ScalarField, omega: HermitianField) -> ScalarField:
    """Trace of omega^{-1} times the complex Hessian of v."""
    _same_grid(v, omega)
    hess = complex_hessian(v)
    inv = np.linalg.inv(omega.data)
    vals = np.einsum("...ij,...ji->...", inv, hess.data).real
    return ScalarField(v.grid, vals)
