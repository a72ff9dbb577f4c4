"""Zero-energy two-body scattering for radial, positive, compactly supported
potentials in two and three dimensions.

Units follow hbar^2/2m = 1, so the scattering equation reads
``-Δφ + v φ / 2 = 0``.  In 3D the solution is normalized by φ(∞) = 1, in 2D
by φ(R̃) = 1 at a chosen radius R̃ > R.
"""
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, linalg, special

from .errors import AccuracyError, ConditioningWarning, DomainError, MeshError
from .quadrature import gauss_legendre, panel_nodes

EULER_GAMMA = float(np.euler_gamma)


def sphere_area(d):
    """Surface area of the unit sphere in R^d (2π for d = 2, 4π for d = 3)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _check_dim(d):
    if d not in (2, 3):
        raise DomainError(f"dimension must be 2 or 3, got {d!r}")


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Sampled radial potential v(r) >= 0 vanishing beyond ``support_radius``.

    With ``piecewise_constant`` False, v is linear between grid points and
    ``values`` has one entry per grid point.  With it True, ``values[i]`` is
    the level on [r_grid[i], r_grid[i+1]) and has one entry fewer.
    Below r_grid[0] the first value is continued as a constant.
    """
    d: int
    r_grid: np.ndarray
    values: np.ndarray
    support_radius: float
    piecewise_constant: bool = False

    def __post_init__(self):
        _check_dim(self.d)
        r = np.array(self.r_grid, dtype=float)
        v = np.array(self.values, dtype=float)
        object.__setattr__(self, "r_grid", r)
        object.__setattr__(self, "values", v)
        R = float(self.support_radius)
        object.__setattr__(self, "support_radius", R)
        expected = r.size - 1 if self.piecewise_constant else r.size
        if r.ndim != 1 or v.shape != (expected,) or expected < 1:
            raise DomainError("grid and values have inconsistent shapes")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DomainError("potential samples must be finite")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise DomainError("r_grid must be non-negative and strictly increasing")
        if not R > 0 or r[-1] < R:
            raise DomainError("support radius must be positive and inside the grid")
        if np.any(v < 0):
            raise DomainError("potential values must be non-negative")
        outside = r[:-1] >= R if self.piecewise_constant else r > R
        if np.any(v[outside] != 0):
            raise DomainError("potential must vanish beyond its support radius")
        r.setflags(write=False)
        v.setflags(write=False)

    @classmethod
    def square_barrier(cls, V0, R, d=3):
        return cls(d, [0.0, R], [V0], R, piecewise_constant=True)

    @classmethod
    def steps(cls, edges, levels, d=3):
        """Piecewise-constant potential with ``levels[i]`` on [edges[i], edges[i+1])."""
        return cls(d, edges, levels, edges[-1], piecewise_constant=True)

    @classmethod
    def from_samples(cls, d, r, v, support_radius=None):
        r = np.asarray(r, dtype=float)
        return cls(d, r, v, r[-1] if support_radius is None else support_radius)

    @classmethod
    def zero(cls, d=3, R=1.0):
        return cls(d, [0.0, R], [0.0], R, piecewise_constant=True)

    @property
    def is_zero(self):
        return not np.any(self.values)

    def scaled(self, factor):
        return RadialPotential(self.d, self.r_grid, factor * self.values,
                               self.support_radius, self.piecewise_constant)

    @cached_property
    def breakpoints(self):
        """0, interior grid points, and R: the edges of the smooth pieces."""
        R = self.support_radius
        inner = self.r_grid[(self.r_grid > 0) & (self.r_grid < R)]
        return np.concatenate([[0.0], inner, [R]])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        R = self.support_radius
        if self.piecewise_constant:
            idx = np.clip(np.searchsorted(self.r_grid, r, side="right") - 1,
                          0, self.values.size - 1)
            out = self.values[idx]
        else:
            out = np.interp(r, self.r_grid, self.values)
        return np.where(r <= R, out, 0.0)

    def l1_norm(self):
        """∫ v over R^d."""
        nodes, weights = panel_nodes(self.breakpoints, self.support_radius / 8, 12)
        return sphere_area(self.d) * float(np.dot(weights, nodes ** (self.d - 1) * self(nodes)))

    def segment_levels(self):
        """Constant level on each breakpoint segment (piecewise-constant only)."""
        mids = 0.5 * (self.breakpoints[1:] + self.breakpoints[:-1])
        return self(mids)

    def to_json(self):
        if self.piecewise_constant and self.values.size == 1 and self.r_grid[0] == 0:
            return {"kind": "square_barrier", "d": self.d, "V0": float(self.values[0]),
                    "R": self.support_radius}
        if self.piecewise_constant:
            return {"kind": "steps", "d": self.d, "edges": self.r_grid.tolist(),
                    "levels": self.values.tolist()}
        return {"d": self.d, "R": self.support_radius,
                "grid": np.column_stack([self.r_grid, self.values]).tolist()}


def potential_from_json(obj, d=None):
    """Build a potential from the JSON forms

    ``{"kind": "square_barrier", "V0", "R"}``, ``{"kind": "steps", "edges",
    "levels"}`` or ``{"R", "grid": [[r, v], ...]}``, each with optional "d".
    """
    if not isinstance(obj, dict):
        raise DomainError("potential description must be a JSON object")
    dim = obj.get("d", d if d is not None else 3)
    if d is not None and dim != d:
        raise DomainError(f"potential dimension {dim} does not match requested {d}")
    kind = obj.get("kind", "grid")
    try:
        if kind == "square_barrier":
            return RadialPotential.square_barrier(float(obj["V0"]), float(obj["R"]), dim)
        if kind == "steps":
            return RadialPotential.steps(obj["edges"], obj["levels"], dim)
        if kind == "grid":
            grid = np.asarray(obj["grid"], dtype=float)
            if grid.ndim != 2 or grid.shape[1] != 2:
                raise DomainError("grid must be a list of [r, v] pairs")
            return RadialPotential.from_samples(dim, grid[:, 0], grid[:, 1], obj.get("R"))
    except KeyError as exc:
        raise DomainError(f"potential description is missing key {exc.args[0]!r}") from None
    raise DomainError(f"unknown potential kind {kind!r}")


def load_potential(path, d=None):
    with open(path) as fh:
        return potential_from_json(json.load(fh), d)


# --- interior solutions -----------------------------------------------------
#
# The interior state is carried as a mantissa pair times exp(log_scale) so that
# strong barriers (exponential growth) do not overflow.  In 3D the state is
# (u, u') with u = rφ; in 2D it is (φ, rφ').

def _renormalize(y, log_scale):
    s = max(abs(y[0]), abs(y[1]))
    if s == 0 or not np.isfinite(s):
        return y, log_scale
    return y / s, log_scale + math.log(s)


class _ConstantSegment:
    """Analytic propagation through a segment with constant level."""

    def __init__(self, d, r0, r1, level, y0, log0):
        self.d, self.r0, self.r1 = d, r0, r1
        self.kappa = math.sqrt(0.5 * level)
        self.y0, self.log0 = np.asarray(y0, dtype=float), log0

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        k = self.kappa
        u0, p0 = self.y0
        if self.d == 3:
            s = r - self.r0
            if k == 0:
                return np.stack([u0 + p0 * s, p0 + 0 * s]), self.log0 + 0 * s
            e = np.exp(-2 * k * s)
            ch = 0.5 * (1 + e)
            sh = -0.5 * np.expm1(-2 * k * s)
            return np.stack([u0 * ch + p0 * sh / k, u0 * k * sh + p0 * ch]), self.log0 + k * s
        if self.r0 == 0:
            # regular solution I0(κr) with φ(0) = 1
            x = k * r
            return np.stack([special.ive(0, x), x * special.ive(1, x)]), self.log0 + x
        if k == 0:
            return np.stack([u0 + p0 * np.log(r / self.r0), p0 + 0 * r]), self.log0 + 0 * r
        x, xi = k * r, k * self.r0
        dlt = x - xi
        e = np.exp(-2 * dlt)
        i0, i1 = special.ive(0, x), special.ive(1, x)
        k0, k1 = special.kve(0, x), special.kve(1, x)
        i0i, i1i = special.ive(0, xi), special.ive(1, xi)
        k0i, k1i = special.kve(0, xi), special.kve(1, xi)
        phi = u0 * xi * (i0 * k1i + k0 * i1i * e) + p0 * (i0 * k0i - k0 * i0i * e)
        psi = u0 * x * xi * (i1 * k1i - k1 * i1i * e) + p0 * x * (i1 * k0i + k1 * i0i * e)
        return np.stack([phi, psi]), self.log0 + dlt


class _OdeSegment:
    """Numerical propagation through a segment with linear potential."""

    def __init__(self, d, r0, r1, v0, v1, y0, log0, rtol):
        self.d, self.r0, self.r1 = d, r0, r1
        self.log0 = log0
        slope = (v1 - v0) / (r1 - r0)
        self.v0, self.slope = v0, slope
        start = r0
        y0 = np.asarray(y0, dtype=float)
        if d == 2 and r0 == 0:
            # series start for the regular 2D solution φ = 1 + v0 r²/8 + v' r³/18
            start = 1e-6 * r1
            y0 = self._series(start)
        self.start = start

        def rhs(r, y):
            v = v0 + slope * (r - r0)
            if d == 3:
                return [y[1], 0.5 * v * y[0]]
            return [y[1] / r, 0.5 * r * v * y[0]]

        sol = integrate.solve_ivp(rhs, (start, r1), y0, method="DOP853", rtol=rtol,
                                  atol=rtol * 1e-3, dense_output=True)
        if not sol.success:
            raise AccuracyError(f"radial ODE integration failed: {sol.message}")
        self.sol = sol.sol

    def _series(self, r):
        r = np.asarray(r, dtype=float)
        return np.stack([1 + self.v0 * r ** 2 / 8 + self.slope * r ** 3 / 18,
                         self.v0 * r ** 2 / 4 + self.slope * r ** 3 / 6])

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        inside = np.clip(r, self.start, self.r1)
        y = self.sol(inside)
        if self.start > self.r0:
            y = np.where(r < self.start, self._series(r), y)
        return y, self.log0 + 0 * r


class _Interior:
    def __init__(self, v, method, rtol):
        d = v.d
        b = v.breakpoints
        constant = v.piecewise_constant if method == "auto" else method == "analytic"
        if constant and not v.piecewise_constant:
            raise DomainError("analytic path requires a piecewise-constant potential")
        y = np.array([0.0, 1.0]) if d == 3 else np.array([1.0, 0.0])
        log_scale = 0.0
        self.segments = []
        levels = v.segment_levels() if constant else None
        for i, (r0, r1) in enumerate(zip(b[:-1], b[1:])):
            if constant:
                seg = _ConstantSegment(d, r0, r1, levels[i], y, log_scale)
            else:
                seg = _OdeSegment(d, r0, r1, float(v(r0)), float(v(r1)), y, log_scale, rtol)
            self.segments.append(seg)
            yy, ll = seg.evaluate(np.array([r1]))
            y, log_scale = _renormalize(yy[:, 0], float(ll[0]))
        self.starts = b[:-1]
        self.end_state, self.end_log = y, log_scale

    def evaluate(self, r):
        """Return (mantissas [2, n], log scales [n]) at radii inside [0, R]."""
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(self.starts, r, side="right") - 1, 0, len(self.segments) - 1)
        y = np.empty((2, r.size))
        ls = np.empty(r.size)
        for i in np.unique(idx):
            sel = idx == i
            yy, ll = self.segments[i].evaluate(r[sel])
            y[:, sel] = yy
            ls[sel] = ll
        return y, ls


@dataclass(frozen=True)
class DeltaParameters:
    delta: float
    R_tilde: float
    ell_delta: float
    log_R_tilde: float


def delta_from_log_density(log_x):
    """δ as a function of log(ρa²); valid for log(ρa²) < -1."""
    if not log_x < -1:
        raise DomainError(f"need ρa² < 1/e for the logarithmic parameter, got log(ρa²) = {log_x}")
    return 1.0 / (-log_x + math.log(-log_x))


def delta_parameter(rho, a):
    """Small logarithmic parameter of the dilute 2D gas and its length scales.

    δ = 1/|log(ρa²/|log ρa²|)|, R̃ = a e^{1/(2δ)}, ℓ_δ = R̃ e^Γ / 2.
    """
    if not (rho > 0 and a > 0):
        raise DomainError("density and scattering length must be positive")
    log_x = math.log(rho) + 2 * math.log(a)
    if not log_x < -1:
        raise DomainError(
            f"ρa² = {math.exp(log_x):.6g} is not below 1/e; the gas is not dilute enough "
            "for the nested logarithm to be defined")
    delta = delta_from_log_density(log_x)
    log_rt = math.log(a) + 0.5 / delta
    return DeltaParameters(delta, math.exp(log_rt), 0.5 * math.exp(log_rt + EULER_GAMMA), log_rt)


@dataclass(frozen=True, eq=False)
class ScatteringSolution:
    """Zero-energy scattering solution; φ, ω = 1 - φ and g = vφ as callables."""
    potential: RadialPotential
    a: float
    d: int
    log_a: float
    delta: float | None = None
    R_tilde: float | None = None
    ell_delta: float | None = None
    conditioning: float = 1.0
    _interior: _Interior = field(default=None, repr=False)

    @property
    def support_radius(self):
        return self.potential.support_radius

    @property
    def two_d_extras(self):
        if self.d != 2:
            return None
        return {"delta": self.delta, "R_tilde": self.R_tilde, "ell_delta": self.ell_delta}

    @property
    def g_hat_zero(self):
        """Exact value of ∫g: 8πa in 3D, 8πδ in 2D."""
        return 8 * math.pi * (self.a if self.d == 3 else self.delta)

    def with_R_tilde(self, R_tilde):
        """Same 2D solution renormalized to φ(R̃) = 1 at a new radius."""
        if self.d != 2:
            raise DomainError("R̃ normalization only applies in 2D")
        delta, ell = _two_d_scales(self.log_a, R_tilde, self.support_radius)
        return ScatteringSolution(self.potential, self.a, 2, self.log_a, delta, R_tilde, ell,
                                  self.conditioning, self._interior)

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        R = self.support_radius
        out = np.empty(r.shape)
        outside = r >= R
        inside = ~outside
        if self.d == 3:
            out[outside] = 1 - self.a / r[outside]
        elif self.a == 0:
            out[outside] = 1.0
        else:
            out[outside] = 2 * self.delta * (np.log(r[outside]) - self.log_a)
        if np.any(inside):
            out[inside] = self._interior_phi(r[inside])
        return out

    def _interior_phi(self, r):
        it = self._interior
        y, ls = it.evaluate(r)
        scale = np.exp(ls - it.end_log)
        if self.d == 3:
            tiny = r < 1e-9 * self.support_radius
            ratio = np.where(tiny, y[1], y[0] / np.where(tiny, 1.0, r))
            return ratio * scale / it.end_state[1]
        if self.a == 0:
            return np.ones_like(r)
        return 2 * self.delta * y[0] * scale / it.end_state[1]

    def omega(self, r):
        return 1.0 - self.phi(r)

    def g(self, r):
        return self.potential(r) * self.phi(r)


def _two_d_scales(log_a, R_tilde, R):
    if R_tilde is None:
        raise DomainError("2D scattering needs R̃ (or use solve_for_density)")
    if not R_tilde > R:
        raise DomainError(f"R̃ = {R_tilde} must exceed the support radius {R}")
    if log_a == -math.inf:
        return 0.0, 0.5 * R_tilde * math.exp(EULER_GAMMA)
    if math.log(R_tilde) <= log_a:
        raise DomainError("R̃ must exceed the scattering length")
    delta = 0.5 / (math.log(R_tilde) - log_a)
    return delta, 0.5 * R_tilde * math.exp(EULER_GAMMA)


def solve_scattering(v, d=None, R_tilde=None, method="auto", rtol=1e-12):
    """Solve -Δφ + vφ/2 = 0 and extract the scattering length.

    ``method`` is "auto" (analytic for piecewise-constant potentials, ODE
    otherwise), "analytic" or "ode".  In 2D the normalization radius R̃ is
    required.
    """
    d = v.d if d is None else d
    _check_dim(d)
    if d != v.d:
        raise DomainError(f"potential is {v.d}-dimensional, requested d = {d}")
    if method not in ("auto", "analytic", "ode"):
        raise DomainError(f"unknown method {method!r}")
    R = v.support_radius
    if d == 2:
        if R_tilde is None:
            raise DomainError("standalone 2D solves must supply R̃")
        if not R_tilde > R:
            raise DomainError(f"R̃ = {R_tilde} must exceed the support radius {R}")
    interior = _Interior(v, method, rtol)
    y1, y2 = interior.end_state
    if d == 3:
        a = R - y1 / y2
        log_a = math.log(a) if a > 0 else -math.inf
        # φ(0)/φ(R) = R e^{-log scale}/u(R)
        cond = R / y1 * math.exp(-interior.end_log) if y1 > 0 else 1.0
    else:
        if y2 == 0:
            a, log_a = 0.0, -math.inf
        else:
            log_a = math.log(R) - y1 / y2
            a = math.exp(log_a)
        cond = math.exp(-interior.end_log) / y1
    if cond < 1e-12:
        warnings.warn(f"interior solution is nearly zero (φ(0)/φ(R) = {cond:.2e}); "
                      "potential behaves like a hard core", ConditioningWarning, stacklevel=2)
    if d == 3:
        return ScatteringSolution(v, a, 3, log_a, conditioning=cond, _interior=interior)
    delta, ell = _two_d_scales(log_a, R_tilde, R)
    return ScatteringSolution(v, a, 2, log_a, delta, R_tilde, ell, cond, interior)


def solve_for_density(v, rho, method="auto", rtol=1e-12):
    """2D solve with R̃ fixed by the density through the logarithmic parameter."""
    if v.d != 2:
        return solve_scattering(v, method=method, rtol=rtol)
    # a does not depend on R̃, so any admissible value works for the first pass
    probe = solve_scattering(v, 2, 2 * v.support_radius, method, rtol)
    scales = delta_parameter(rho, probe.a)
    return probe.with_R_tilde(scales.R_tilde)


# --- radial Fourier transforms ---------------------------------------------

def _kernel(d, kr):
    return np.sinc(kr / np.pi) if d == 3 else special.j0(kr)


class FourierProfile:
    """Radial Fourier transform f̂(k) = ∫ f(x) e^{-ikx} dx of a radial function.

    ``evaluate`` maps an array of k >= 0 to values.  ``value_at_zero`` is
    ∫ f and ``second_moment`` is ∫ |x|² f, used for small-k expansions.
    """

    def __init__(self, d, evaluate, value_at_zero, second_moment=0.0,
                 support_radius=math.inf, nonnegative=False, name=""):
        _check_dim(d)
        self.d = d
        self._evaluate = evaluate
        self.value_at_zero = float(value_at_zero)
        self.second_moment = float(second_moment)
        self.support_radius = support_radius
        self.nonnegative = nonnegative
        self.name = name

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        if np.any(k < 0):
            raise DomainError("wavenumbers must be non-negative")
        return self._evaluate(k)

    def evaluate(self, k):
        return self(k)

    @property
    def is_zero(self):
        return self.value_at_zero == 0 and self.second_moment == 0 and self.name == "zero"

    def small_k_difference(self, k):
        """f̂(k) - f̂(0) with the leading Taylor term below kR = 1e-3."""
        k = np.asarray(k, dtype=float)
        direct = self(k) - self.value_at_zero
        taylor = -k ** 2 * self.second_moment / (2 * self.d)
        if math.isinf(self.support_radius):
            return direct
        return np.where(k * self.support_radius < 1e-3, taylor, direct)

    @classmethod
    def zero(cls, d):
        return cls(d, lambda k: np.zeros_like(k), 0.0, 0.0, 0.0, True, "zero")

    @classmethod
    def constant(cls, d, value):
        return cls(d, lambda k: np.full_like(k, value), value, 0.0, math.inf,
                   value >= 0, "constant")

    @classmethod
    def from_radial_function(cls, f, d, breaks, nonnegative=False, name="", order=16):
        """Numerical transform of ``f`` supported on [breaks[0], breaks[-1]]."""
        breaks = np.asarray(breaks, dtype=float)
        R = float(breaks[-1])
        measure = sphere_area(d)
        base_width = R / 4
        cache = {}

        def nodes_for(level):
            if level not in cache:
                nodes, weights = panel_nodes(breaks, base_width / 2 ** level, order)
                cache[level] = (nodes, measure * weights * nodes ** (d - 1) * f(nodes))
            return cache[level]

        def evaluate(k):
            flat = k.ravel()
            out = np.empty(flat.size)
            # each level resolves kR up to ~ 3·4·2^level radians per panel width
            levels = np.maximum(0, np.ceil(np.log2(np.maximum(flat * base_width, 1e-300) / 3.0)))
            levels = levels.astype(int)
            for lev in np.unique(levels):
                sel = np.flatnonzero(levels == lev)
                nodes, wf = nodes_for(int(lev))
                step = max(1, int(4e6 // nodes.size))
                for s in range(0, sel.size, step):
                    part = sel[s:s + step]
                    out[part] = _kernel(d, np.outer(flat[part], nodes)) @ wf
            return out.reshape(k.shape)

        nodes, wf = nodes_for(0)
        f0 = float(np.sum(wf))
        m2 = float(np.sum(wf * nodes ** 2))
        return cls(d, evaluate, f0, m2, R, nonnegative, name)


def radial_fourier(f, d, k, support_radius, breaks=None, tol=1e-10):
    """Radial Fourier transform of a compactly supported radial function.

    3D: 4π∫ r² f(r) sin(kr)/(kr) dr;  2D: 2π∫ r f(r) J0(kr) dr.
    The composite rule is refined until two successive levels agree.
    """
    _check_dim(d)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if breaks is None:
        breaks = [0.0, support_radius]
    breaks = np.asarray(breaks, dtype=float)
    measure = sphere_area(d)
    width = min(support_radius / 4, 3.0 / max(float(np.max(k)), 1e-300))
    previous = None
    for _ in range(8):
        nodes, weights = panel_nodes(breaks, width, 16)
        wf = measure * weights * nodes ** (d - 1) * f(nodes)
        value = _kernel(d, np.outer(k, nodes)) @ wf
        if previous is not None:
            err = float(np.max(np.abs(value - previous)))
            if err <= tol * max(1.0, float(np.max(np.abs(value)))):
                return value if value.size > 1 else float(value[0])
        previous = value
        width /= 2
    raise AccuracyError(f"radial transform did not converge (last change {err:.3e})", achieved=err)


def _line_integral(f, R):
    nodes, weights = panel_nodes([0.0, R], R / 16, 24)
    return float(np.dot(weights, f(nodes)))


def _square_barrier_transform(sol):
    """Closed-form ĝ for a single square barrier, matching the solved normalization."""
    v = sol.potential
    V0, R, d = float(v.values[0]), v.support_radius, sol.d
    kap = math.sqrt(V0 / 2)
    if d == 3:
        t = math.tanh(kap * R)

        def evaluate(k):
            k = np.asarray(k, dtype=float)
            small = k * R < 1e-4
            ks = np.where(small, 1.0, k)
            val = 8 * math.pi * kap * (kap * np.sin(ks * R) - ks * t * np.cos(ks * R)) / (
                ks * (kap ** 2 + ks ** 2))
            # series: ĝ(k) = ĝ(0) - k² m2/6 with m2 = ∫|x|² g
            return np.where(small, sol.g_hat_zero - k ** 2 * m2 / 6, val)

        # ∫|x|²g = 4π V0 ∫ r^4 sinh(κr)/(κ r cosh κR) dr
        m2 = 4 * math.pi * V0 / (kap * math.cosh(kap * R)) * _line_integral(
            lambda r: r ** 3 * np.sinh(kap * r), R)
        return FourierProfile(3, evaluate, sol.g_hat_zero, m2, R, True, "square_barrier")
    x = kap * R
    # interior φ = C·I0(κr) with φ(R) = 2δ log(R/a)
    amp = 2 * sol.delta * (math.log(R) - sol.log_a) / special.ive(0, x)

    def evaluate(k):
        k = np.asarray(k, dtype=float)
        kR = k * R
        num = kap * special.ive(1, x) * special.j0(kR) + k * special.ive(0, x) * special.j1(kR)
        return 2 * math.pi * V0 * amp * R * num / (kap ** 2 + k ** 2)

    m2 = 2 * math.pi * V0 * amp * _line_integral(
        lambda r: r ** 3 * special.ive(0, kap * r) * np.exp(kap * (r - R)), R)
    return FourierProfile(2, evaluate, sol.g_hat_zero, m2, R, True, "square_barrier")


def _is_single_barrier(v):
    return v.piecewise_constant and v.values.size == 1 and v.r_grid[0] == 0 and v.values[0] > 0


def g_hat_profile(sol, analytic=True):
    """FourierProfile of g = vφ for a solved potential."""
    v = sol.potential
    if v.is_zero:
        return FourierProfile.zero(sol.d)
    if analytic and _is_single_barrier(v):
        return _square_barrier_transform(sol)
    return FourierProfile.from_radial_function(sol.g, sol.d, v.breakpoints, True, "g")


def real_space_integral(f, d, breaks, order=24):
    """∫ f over R^d for a radial f supported on [breaks[0], breaks[-1]]."""
    nodes, weights = panel_nodes(breaks, (breaks[-1] - breaks[0]) / 16, order)
    return sphere_area(d) * float(np.dot(weights, nodes ** (d - 1) * f(nodes)))


@dataclass(frozen=True)
class PairTransforms:
    """Transforms of v, vω and vω² on a shared rule.

    Every other interaction function is a fixed linear combination of these
    three, so derived transforms satisfy the linear identities exactly:
    g = v - vω, gω = vω - vω², g + gω = v - vω².
    """
    v: FourierProfile
    v_omega: FourierProfile
    v_omega2: FourierProfile

    def at(self, k):
        """Dictionary of all transforms at wavenumbers ``k``."""
        v, vw, vww = self.v(k), self.v_omega(k), self.v_omega2(k)
        return {"v": v, "v_omega": vw, "v_omega2": vww, "g": v - vw,
                "g_omega": vw - vww, "g_plus_g_omega": v - vww}


def pair_transforms(sol):
    v = sol.potential
    d = sol.d
    if v.is_zero:
        z = FourierProfile.zero(d)
        return PairTransforms(z, z, z)
    b = v.breakpoints
    make = FourierProfile.from_radial_function
    return PairTransforms(
        make(v, d, b, True, "v"),
        make(lambda r: v(r) * sol.omega(r), d, b, True, "v_omega"),
        make(lambda r: v(r) * sol.omega(r) ** 2, d, b, True, "v_omega2"))


# --- variational energy -------------------------------------------------------

def _lobatto(p):
    inner = np.polynomial.legendre.Legendre.basis(p).deriv().roots()
    return np.concatenate([[-1.0], np.sort(inner.real), [1.0]])


def _lagrange_tables(p, xq):
    nodes = _lobatto(p)
    V = np.polynomial.legendre.legvander(nodes, p)
    C = np.linalg.inv(V)
    vals = np.polynomial.legendre.legvander(xq, p) @ C
    dV = np.stack([np.polynomial.legendre.legval(xq, np.polynomial.legendre.legder(np.eye(p + 1)[j]))
                   for j in range(p + 1)], axis=1)
    return vals, dV @ C


def variational_scattering_energy(v, d=None, R_tilde=10.0, mesh=200, degree=4):
    """Minimum of ∫(|∇φ|² + vφ²/2) over radial φ with φ(R̃) = 1.

    Lagrange finite elements of the given degree; ``mesh`` is the number of
    elements, split evenly between [0, R] and [R, R̃].
    """
    d = v.d if d is None else d
    _check_dim(d)
    R = v.support_radius
    if not R_tilde > R:
        raise DomainError(f"R̃ = {R_tilde} must exceed the support radius {R}")
    mesh = int(mesh)
    if mesh < 2:
        raise MeshError("need at least two elements")
    b = v.breakpoints
    n_in = max(mesh // 2, b.size - 1)
    lengths = np.diff(b)
    counts = np.maximum(1, np.round(n_in * lengths / R).astype(int))
    edges = [np.linspace(lo, hi, c + 1)[:-1] for lo, hi, c in zip(b[:-1], b[1:], counts)]
    n_out = max(1, mesh - int(counts.sum()))
    # geometric grading outside the support: the exterior solution varies on scale r
    edges.append(np.geomspace(R, R_tilde, n_out + 1))
    edges = np.concatenate(edges)
    ne = edges.size - 1
    p = int(degree)
    xq, wq = gauss_legendre(p + 3)
    vals, ders = _lagrange_tables(p, np.asarray(xq))
    h = np.diff(edges)
    rq = 0.5 * (edges[:-1] + edges[1:])[:, None] + 0.5 * h[:, None] * xq
    jac = 0.5 * h[:, None]
    meas = sphere_area(d) * rq ** (d - 1) * wq * jac
    vq = v(rq)
    dphys = ders[None, :, :] / jac[:, :, None]
    local = (np.einsum("eq,eqi,eqj->eij", meas, dphys, dphys)
             + 0.5 * np.einsum("eq,qi,qj->eij", meas * vq, vals, vals))
    n = ne * p + 1
    K = np.zeros((n, n))
    for e in range(ne):
        sl = slice(e * p, e * p + p + 1)
        K[sl, sl] += local[e]
    free = slice(0, n - 1)
    try:
        x = linalg.solve(K[free, free], -K[free, n - 1], assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise MeshError(f"stiffness system could not be solved: {exc}") from None
    coef = np.append(x, 1.0)
    energy = float(coef @ K @ coef)
    if not np.isfinite(energy):
        raise MeshError("stiffness system is singular on this mesh")
    return energy


def exterior_energy(a, d, R_tilde):
    """Closed-form minimum energy: 4πa/(1 - a/R̃) in 3D, 2π/log(R̃/a) in 2D."""
    if a == 0:
        return 0.0
    if d == 3:
        return 4 * math.pi * a / (1 - a / R_tilde)
    return 2 * math.pi / math.log(R_tilde / a)
