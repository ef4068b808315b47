"""Log-radius grids, weighted mode functions, and the per-mode inverse Laplacian.

Working variable is t = log r.  A mode with angular factor exp(i*m*k*theta) is
represented by complex samples on a uniform t-grid in one of the weighted
representations

    psi(t) = f(e^t) * e^{(2/q-2)t},   U(t) = u(e^t) * e^{2t/q},   G(t) = g(e^t) * e^{2t/q},

chosen so that L^q(r dr) norms of the radial functions equal L^q(dt) norms of
the weighted ones.  The second-order relation

    U = psi'' + (4 - 4/q) psi' + ((2 - 2/q)^2 - (mk)^2) psi

is inverted by convolution with the two-sided exponential kernel K1, realizing
the mode-k inverse Laplacian with the unique integrable tail constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import fftconvolve

from .params import VortexParams

REPS = ("f", "u", "psi", "U", "G")

# target = source * exp(weight * t); the G representation has no unweighted
# partner in REPS, so it has no conversions
_REWEIGHT = {
    ("f", "psi"): lambda q: 2.0 / q - 2.0,
    ("psi", "f"): lambda q: 2.0 - 2.0 / q,
    ("u", "U"): lambda q: 2.0 / q,
    ("U", "u"): lambda q: -2.0 / q,
}


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in t = log r covering r in [e^t_min, e^t_max]."""

    t_min: float = -40.0
    t_max: float = 40.0
    n: int = 4096

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be < t_max")
        if int(self.n) != self.n or self.n < 16:
            raise ValueError("grid needs an integer n >= 16")

    @property
    def h(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.linspace(self.t_min, self.t_max, self.n)
        t.setflags(write=False)
        return t


@dataclass(frozen=True, eq=False)
class ModeFunction:
    """Complex samples of one azimuthal mode on a LogGrid.

    ``k`` is the mode index (angular factor exp(i*m*k*theta)); ``rep`` names the
    weighting convention of the samples.
    """

    k: int
    rep: str
    grid: LogGrid
    samples: np.ndarray

    def __post_init__(self):
        if self.rep not in REPS:
            raise ValueError(f"rep must be one of {REPS}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        s = np.array(self.samples, dtype=complex)
        if s.shape != (self.grid.n,):
            raise ValueError(f"samples must have shape ({self.grid.n},)")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def with_samples(self, samples, rep=None) -> "ModeFunction":
        return ModeFunction(self.k, rep or self.rep, self.grid, samples)

    @classmethod
    def from_callable(cls, k: int, rep: str, grid: LogGrid, fn) -> "ModeFunction":
        return cls(k, rep, grid, np.asarray(fn(grid.nodes), dtype=complex))

    def to_csv(self, path, q: float, m: int) -> None:
        t = self.grid.nodes
        with open(path, "w") as fh:
            fh.write(f"# k={self.k} rep={self.rep} q={float(q)!r} m={m}\n")
            fh.write("t,re,im\n")
            for ti, v in zip(t, self.samples):
                fh.write(f"{float(ti)!r},{float(v.real)!r},{float(v.imag)!r}\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("#"):
                raise ValueError("missing metadata header line")
            meta = dict(item.split("=") for item in header[1:].split())
            fh.readline()  # column header
            rows = [line.strip().split(",") for line in fh if line.strip()]
        t = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
        grid = LogGrid(t[0], t[-1], t.size)
        fn = cls(int(meta["k"]), meta["rep"], grid, vals)
        return fn, float(meta["q"]), int(meta["m"])


def reweight(fn: ModeFunction, target_rep: str, q: float) -> ModeFunction:
    """Convert between weighted representations by an exact exponential factor."""
    key = (fn.rep, target_rep)
    if key not in _REWEIGHT:
        raise ValueError(f"no reweighting defined for {fn.rep} -> {target_rep}")
    w = _REWEIGHT[key](q)
    return fn.with_samples(fn.samples * np.exp(w * fn.grid.nodes), rep=target_rep)


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def lq_norm_samples(samples: np.ndarray, h: float, q: float) -> float:
    if q < 1.0:
        raise ValueError("q must be >= 1")
    w = _trapezoid_weights(samples.shape[0])
    return float((h * np.sum(w * np.abs(samples) ** q)) ** (1.0 / q))


def lq_norm(fn: ModeFunction, q: float) -> float:
    """Composite-trapezoid L^q(dt) norm of the samples."""
    return lq_norm_samples(fn.samples, fn.grid.h, q)


def second_order_relation(psi: ModeFunction, params: VortexParams, k: int | None = None) -> ModeFunction:
    """Apply psi'' + (4-4/q) psi' + ((2-2/q)^2 - (mk)^2) psi by finite differences.

    Interior points use 4th-order centered stencils; the two points at each end
    fall back to 2nd order and should be excluded from residual metrics.
    """
    if psi.rep != "psi":
        raise ValueError("input must be in the psi representation")
    k = psi.k if k is None else k
    q, m = params.q, params.m
    h = psi.grid.h
    y = psi.samples
    n = y.size
    d1 = np.empty(n, dtype=complex)
    d2 = np.empty(n, dtype=complex)
    d1[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d2[2:-2] = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    # one-sided 2nd order at the ends, centered 2nd order one point in
    d1[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
    d1[-1] = (3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h)
    d1[1] = (y[2] - y[0]) / (2 * h)
    d1[-2] = (y[-1] - y[-3]) / (2 * h)
    d2[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / (h * h)
    d2[-1] = (2 * y[-1] - 5 * y[-2] + 4 * y[-3] - y[-4]) / (h * h)
    d2[1] = (y[0] - 2 * y[1] + y[2]) / (h * h)
    d2[-2] = (y[-3] - 2 * y[-2] + y[-1]) / (h * h)
    c1 = 4.0 - 4.0 / q
    c0 = (2.0 - 2.0 / q) ** 2 - float(m * k) ** 2
    return psi.with_samples(d2 + c1 * d1 + c0 * y, rep="U")


@dataclass(frozen=True)
class KernelK1:
    """Two-sided exponential kernel with decay A+ = mk+2-2/q forward, A- = mk-2+2/q backward."""

    k: int
    q: float
    m: int = 2

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K1 is defined for modes k >= 1")
        if self.A_plus <= 0 or self.A_minus <= 0:
            raise ValueError("kernel decay exponents must be positive")

    @property
    def A_plus(self) -> float:
        return self.m * self.k + 2.0 - 2.0 / self.q

    @property
    def A_minus(self) -> float:
        return self.m * self.k - 2.0 + 2.0 / self.q


def k1_eval(t, s, kernel: KernelK1):
    """Evaluate K1(t, s); the value at t == s is the common branch limit 1."""
    d = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
    expo = np.where(d >= 0.0, -kernel.A_plus * d, kernel.A_minus * d)
    out = np.exp(expo)
    return out if out.ndim else float(out)


def phi1_matrix(grid: LogGrid, kernel: KernelK1) -> np.ndarray:
    """Dense trapezoid quadrature matrix of the K1 convolution."""
    t = grid.nodes
    K = k1_eval(t[:, None], t[None, :], kernel)
    return grid.h * K * _trapezoid_weights(grid.n)[None, :]


def _phi1_samples(samples: np.ndarray, grid: LogGrid, kernel: KernelK1) -> np.ndarray:
    n = grid.n
    lags = np.arange(-(n - 1), n) * grid.h
    ker = np.exp(np.where(lags >= 0.0, -kernel.A_plus * lags, kernel.A_minus * lags))
    full = fftconvolve(samples * _trapezoid_weights(n), ker)
    return grid.h * full[n - 1 : 2 * n - 1]


def apply_phi1(fn: ModeFunction, kernel: KernelK1, method: str = "fft") -> ModeFunction:
    """Convolve with K1 using trapezoid weights (fast or direct path)."""
    if method == "fft":
        out = _phi1_samples(fn.samples, fn.grid, kernel)
    elif method == "direct":
        out = phi1_matrix(fn.grid, kernel) @ fn.samples
    else:
        raise ValueError("method must be 'fft' or 'direct'")
    return fn.with_samples(out)


def _trapz_half_line(t: np.ndarray, vals: np.ndarray, h: float, upper: bool) -> complex:
    """Trapezoid integral of vals over t >= 0 (upper) or t <= 0, splitting the
    panel containing zero by linear interpolation."""
    if upper:
        mask = t >= 0.0
    else:
        mask = t <= 0.0
    if not mask.any():
        return 0.0 + 0.0j
    idx = np.nonzero(mask)[0]
    ts = t[idx]
    vs = vals[idx]
    total = np.trapezoid(vs, ts) if hasattr(np, "trapezoid") else np.trapz(vs, ts)
    # partial panel between the grid node nearest zero and zero itself
    if upper and idx[0] > 0:
        t0, t1 = t[idx[0] - 1], ts[0]
        v0, v1 = vals[idx[0] - 1], vs[0]
        vz = v0 + (v1 - v0) * (0.0 - t0) / (t1 - t0)
        total = total + 0.5 * (vz + v1) * (t1 - 0.0)
    elif not upper and idx[-1] < t.size - 1:
        t0, t1 = ts[-1], t[idx[-1] + 1]
        v0, v1 = vs[-1], vals[idx[-1] + 1]
        vz = v0 + (v1 - v0) * (0.0 - t0) / (t1 - t0)
        total = total + 0.5 * (v0 + vz) * (0.0 - t0)
    return complex(total)


def psi_from_U(fn: ModeFunction, params: VortexParams, k: int | None = None):
    """Reconstruct psi = -(1/(2mk)) * K1-convolution of U, with the tail functionals.

    Returns (psi, c2, c3) where c2 and c3 are the unique constants that make the
    reconstruction integrable, truncated to the grid:
        c2 = -(1/(2mk)) * int_{-inf}^0 e^{A+ s} U(s) ds
        c3 = -(1/(2mk)) * int_0^inf  e^{-A- s} U(s) ds
    """
    k = fn.k if k is None else k
    if k < 1:
        raise ValueError("psi_from_U requires k >= 1 (no stream-function coupling at k = 0)")
    kernel = KernelK1(k, params.q, params.m)
    scale = -1.0 / (2.0 * params.m * k)
    psi = fn.with_samples(scale * _phi1_samples(fn.samples, fn.grid, kernel), rep="psi")
    t = fn.grid.nodes
    c2 = scale * _trapz_half_line(t, np.exp(kernel.A_plus * t) * fn.samples, fn.grid.h, upper=False)
    c3 = scale * _trapz_half_line(t, np.exp(-kernel.A_minus * t) * fn.samples, fn.grid.h, upper=True)
    return psi, c2, c3
