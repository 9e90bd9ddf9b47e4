"""Level-set geometry: frames, radial charts, the metric formulas, cone metric.

A :class:`ChartFrame` fixes an affine hyperplane slice E of the positivity
cone of a homogeneous function and parametrizes the unit level set as the
radial graph over B = E intersected with the cone.  Tangent frames (E tangent
to the level set at a base point on it) are the default; general transversal
slices are supported for closed-form examples whose natural chart is not a
tangent plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sampling
from .errors import ConsistencyError, DegenerateFrameError, DomainError, UnboundedRayError
from .forms import SymmetricForm
from .homogeneous import HomogeneousPolynomial

METHODS = ("pullback", "psi_formula", "u_formula")


def positive_root(value: float, k: float) -> float:
    """k-th root of a positive number via exp(log/k), guarding positivity."""
    if value <= 0.0:
        raise DomainError(f"expected a positive value, got {value}")
    return math.exp(math.log(value) / k)


def _polish_polynomial_zero(coeffs, t0: float, width: float = 1e-3) -> float:
    """Refine a polynomial zero of any multiplicity by bisection.

    Eigenvalue-based roots of an m-fold zero carry errors of order eps^(1/m),
    and sign-based refinement of p itself is noise-limited at the same scale.
    The (m-1)-th derivative has a simple zero at the same point, so the
    multiplicity is estimated from which derivatives vanish at t0 and the
    last vanishing derivative is bisected at full precision.
    """
    pv = np.polynomial.polynomial.polyval
    chain = [np.asarray(coeffs, dtype=float)]
    while len(chain[-1]) > 1:
        chain.append(np.polynomial.polynomial.polyder(chain[-1]))
    mult = len(chain) - 1
    for m in range(1, len(chain)):
        scale = float(np.abs(chain[m]).max()) * (1.0 + abs(t0)) ** max(0, len(chain[m]) - 1)
        if abs(pv(t0, chain[m])) > 1e-4 * max(scale, 1e-300):
            mult = m
            break
    target = chain[mult - 1]
    w = max(width * abs(t0), 1e-9)
    lo, hi = t0 - w, t0 + w
    vlo, vhi = pv(lo, target), pv(hi, target)
    if vlo == 0.0 or vhi == 0.0 or (vlo < 0.0) == (vhi < 0.0):
        return t0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if (pv(mid, target) < 0.0) == (vlo < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def radial_projection(func, x) -> np.ndarray:
    """Project a cone point onto the unit level set along its ray."""
    x = np.asarray(x, dtype=float)
    hx = func(x)
    if hx <= 0.0:
        raise DomainError(f"cannot project: function value {hx} is not positive")
    return x / positive_root(hx, func.degree)


def tangent_basis_at(func, q, tol: float = 1e-12) -> np.ndarray:
    """Deterministic orthonormal basis of ker(dh) at q, built by Gram-Schmidt
    of the standard basis against the Euclidean gradient."""
    q = np.asarray(q, dtype=float)
    grad = func.gradient(q)
    gnorm = np.linalg.norm(grad)
    if gnorm <= tol:
        raise DegenerateFrameError(f"gradient vanishes at {q.tolist()}")
    unit_normal = grad / gnorm
    dim = q.size
    basis = []
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        v = v - (v @ unit_normal) * unit_normal
        for b in basis:
            v = v - (v @ b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == dim - 1:
            break
    if len(basis) != dim - 1:
        raise DegenerateFrameError("could not complete a tangent basis")
    return np.array(basis)


@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray
    ambient: np.ndarray
    hval: float


class ChartFrame:
    """Affine slice of the cone with a fixed direction basis.

    Attributes
    ----------
    func : the homogeneous polynomial or map.
    origin : base point of the slice (on the unit level set for tangent frames).
    basis : (n, d) array of direction vectors spanning the slice.
    tangent : True when the slice is the tangent hyperplane at ``origin``.
    """

    def __init__(self, func, origin, basis, tangent: bool, tol: float = 1e-10):
        origin = np.asarray(origin, dtype=float)
        basis = np.atleast_2d(np.asarray(basis, dtype=float))
        d = origin.size
        if basis.shape != (d - 1, d):
            raise DegenerateFrameError(
                f"basis must be ({d - 1}, {d}) for ambient dimension {d}, got {basis.shape}"
            )
        full = np.vstack([basis, origin])
        if np.linalg.matrix_rank(full, tol=1e-10 * max(1.0, np.abs(full).max())) != d:
            raise DegenerateFrameError("slice through the origin: rays are not transversal")
        hval = func(origin)
        if hval <= 0.0:
            raise DomainError(f"slice origin has nonpositive value {hval}")
        grad = func.gradient(origin)
        k = float(func.degree)
        if tangent:
            if abs(hval - 1.0) > 1e-12 * max(1.0, abs(hval)):
                raise DegenerateFrameError(f"tangent frame origin not on the unit level set: {hval}")
            gnorm = np.linalg.norm(grad)
            if gnorm == 0.0:
                raise DegenerateFrameError("gradient vanishes at the frame origin")
            if np.abs(basis @ grad).max() > 1e-10 * gnorm:
                raise DegenerateFrameError("basis is not tangent to the level set")
            if abs(grad @ origin - k * hval) > 1e-10 * max(1.0, k * abs(hval)):
                raise DegenerateFrameError("homogeneity identity fails at the frame origin")
        self.func = func
        self.origin = origin
        self.basis = basis
        self.normal = grad
        self.tangent = tangent
        self.degree = k
        self.dimension = d
        self.chart_dim = d - 1
        self._pinv = np.linalg.pinv(basis.T)
        self._diameter: float | None = None

    # -- basic chart maps ---------------------------------------------------

    def point(self, coords) -> np.ndarray:
        coords = np.atleast_1d(np.asarray(coords, dtype=float))
        return self.origin + coords @ self.basis

    def coords_of(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._pinv @ (x - self.origin)

    def hval(self, coords) -> float:
        return self.func(self.point(coords))

    def chart_point(self, coords) -> ChartPoint:
        coords = np.atleast_1d(np.asarray(coords, dtype=float))
        x = self.point(coords)
        return ChartPoint(coords=coords, ambient=x, hval=self.func(x))

    def embed(self, coords) -> np.ndarray:
        """Radial-graph parametrization of the unit level set over the slice."""
        return radial_projection(self.func, self.point(coords))

    def embed_jacobian(self, coords) -> np.ndarray:
        """(d, n) Jacobian of the embedding, columns are images of the basis."""
        x = self.point(coords)
        hx = self.func(x)
        if hx <= 0.0:
            raise DomainError(f"chart point left the cone (value {hx})")
        k = self.degree
        grad = self.func.gradient(x)
        a = hx ** (-1.0 / k)
        b = -(1.0 / k) * hx ** (-1.0 / k - 1.0)
        cols = [a * v + b * (grad @ v) * x for v in self.basis]
        return np.column_stack(cols)

    def embed_second(self, coords) -> np.ndarray:
        """(n, n, d) array of second derivatives of the embedding."""
        x = self.point(coords)
        hx = self.func(x)
        if hx <= 0.0:
            raise DomainError(f"chart point left the cone (value {hx})")
        k = self.degree
        grad = self.func.gradient(x)
        hess = self.func.hessian(x)
        c1 = -(1.0 / k) * hx ** (-1.0 / k - 1.0)
        c2 = (1.0 / k) * (1.0 / k + 1.0) * hx ** (-1.0 / k - 2.0)
        n = self.chart_dim
        out = np.empty((n, n, self.dimension))
        dh = self.basis @ grad
        hb = self.basis @ hess @ self.basis.T
        for i in range(n):
            for j in range(i, n):
                u, v = self.basis[i], self.basis[j]
                val = c1 * (dh[j] * u + dh[i] * v + hb[i, j] * x) + c2 * dh[i] * dh[j] * x
                out[i, j] = val
                out[j, i] = val
        return out

    # -- geometry of the slice -----------------------------------------------

    def boundary_distance(
        self,
        coords,
        direction,
        max_factor: float = 1e6,
        iterations: int = 80,
    ) -> float:
        """Distance (in chart coordinates) to the first zero of the function
        along the ray coords + t * direction.

        Polynomial restrictions are solved exactly through their univariate
        coefficients, which also locates zeros of even order (where the
        function touches zero without a sign change, as happens on
        non-regular boundary faces).  Maps are bracketed by bisection on the
        predicate "inside the domain with positive value".
        """
        coords = np.atleast_1d(np.asarray(coords, dtype=float))
        direction = np.atleast_1d(np.asarray(direction, dtype=float))
        if not np.any(direction != 0.0):
            raise ValueError("direction must be nonzero")
        h0 = self.hval(coords)
        if h0 <= 0.0:
            raise DomainError("ray origin is outside the positivity region")
        limit = max_factor * max(1.0, float(np.linalg.norm(self.origin)))
        if isinstance(self.func, HomogeneousPolynomial):
            from .homogeneous import restrict_to_line, univariate_zeros

            x0 = self.point(coords)
            v = direction @ self.basis
            cf = restrict_to_line(self.func, x0, v).coefficients
            zeros = univariate_zeros(cf)
            positive = zeros[zeros > 0.0]
            if len(positive) == 0:
                raise UnboundedRayError(coords, direction, limit)
            return _polish_polynomial_zero(cf, float(positive.min()))

        def inside(t):
            x = self.point(coords + t * direction)
            if not self.func.contains(x):
                return False
            val = self.func(x)
            return math.isfinite(val) and val > 0.0

        scale = 1.0 + float(np.linalg.norm(coords))
        t_lo, t_hi = 0.0, 1e-2 * scale
        while inside(t_hi):
            t_lo = t_hi
            t_hi *= 2.0
            if t_hi > limit:
                raise UnboundedRayError(coords, direction, t_hi)
        for _ in range(iterations):
            mid = 0.5 * (t_lo + t_hi)
            if mid == t_lo or mid == t_hi:
                break
            if inside(mid):
                t_lo = mid
            else:
                t_hi = mid
            if t_hi - t_lo < 1e-14 * max(1.0, t_hi):
                break
        return 0.5 * (t_lo + t_hi)

    def diameter(self, n_directions: int = 16, seed: int = 0) -> float:
        if self._diameter is None:
            dirs = sampling.unit_directions(self.chart_dim, max(2, n_directions), seed)
            cap = 5.0 * (1.0 + float(np.linalg.norm(self.origin)))
            best = 0.0
            origin = np.zeros(self.chart_dim)
            for d in dirs:
                try:
                    best = max(best, self.boundary_distance(origin, d))
                except UnboundedRayError:
                    best = max(best, cap)
            self._diameter = 2.0 * best
        return self._diameter

    def sample_coords(self, count: int, max_frac: float = 0.9, seed: int = 0) -> np.ndarray:
        """Low-discrepancy points of B: radial grid scaled per-ray by the
        boundary distance; the outermost sample sits exactly at max_frac."""
        n = self.chart_dim
        per_ray = max(3, int(math.sqrt(count)))
        n_dirs = max(2 * n, math.ceil(count / per_ray))
        dirs = sampling.unit_directions(n, n_dirs, seed)
        fracs = sampling.radial_fractions(per_ray)
        fracs = fracs * (max_frac / fracs.max())
        origin = np.zeros(n)
        cap = 5.0 * (1.0 + float(np.linalg.norm(self.origin)))
        out = []
        for d in dirs:
            try:
                dist = self.boundary_distance(origin, d)
            except UnboundedRayError:
                dist = cap  # non-compact slice: sample a capped segment
            for f in fracs:
                out.append(f * dist * d)
                if len(out) == count:
                    return np.array(out)
        return np.array(out)

    def __repr__(self):
        kind = "tangent" if self.tangent else "slice"
        return f"ChartFrame({kind}, origin={self.origin.tolist()})"


def make_chart(func, seed, tol: float = 1e-10) -> ChartFrame:
    """Chart at the normalization of ``seed`` onto the unit level set.

    The tangent basis is orthonormalized against the Euclidean gradient in
    standard-basis order, so frames are reproducible across runs.
    """
    seed = np.asarray(seed, dtype=float)
    hs = func(seed)
    if hs <= 0.0:
        raise DomainError(f"seed value must be positive, got {hs}")
    p = seed / positive_root(hs, func.degree)
    basis = tangent_basis_at(func, p)
    return ChartFrame(func, p, basis, tangent=True, tol=tol)


def slice_chart(func, origin, basis) -> ChartFrame:
    """Chart over a general transversal hyperplane slice (origin not required
    to lie on the unit level set)."""
    return ChartFrame(func, origin, basis, tangent=False)


# -- metric formulas ----------------------------------------------------------


def centroaffine_metric_ambient(frame_or_func, q, basis=None, tol: float = 1e-10):
    """Gram matrix of -(1/k) * Hessian on tangent vectors at a level-set point.

    Returns (form, basis).  ``basis`` defaults to the deterministic tangent
    basis at q; pass explicit vectors to evaluate the form on them instead.
    """
    func = frame_or_func.func if isinstance(frame_or_func, ChartFrame) else frame_or_func
    q = np.asarray(q, dtype=float)
    hq = func(q)
    if abs(hq - 1.0) > tol * max(1.0, abs(hq)):
        raise DomainError(f"point is not on the unit level set (value {hq})")
    if basis is None:
        basis = tangent_basis_at(func, q)
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    hess = func.hessian(q)
    gram = -(basis @ hess @ basis.T) / func.degree
    return SymmetricForm(gram), basis


def chart_metric(frame: ChartFrame, coords, method: str = "psi_formula") -> SymmetricForm:
    """Metric of the radial-graph parametrization in chart coordinates.

    Three equivalent routes are implemented; they differ in evaluation point
    and algebraic arrangement and are cross-checked by
    :func:`chart_metric_consistency`:

    - ``pullback``: Hessian at the projected level-set point, pulled back
      through the differential of the projection;
    - ``psi_formula``: Hessian and differential at the slice point itself;
    - ``u_formula``: Hessian of the k-th root of the slice restriction.
    """
    coords = np.atleast_1d(np.asarray(coords, dtype=float))
    if hasattr(coords, "coords"):
        coords = coords.coords
    x = frame.point(coords)
    func = frame.func
    k = frame.degree
    hx = func(x)
    if hx <= 0.0:
        raise DomainError(f"chart point outside the positivity region (value {hx})")
    if method == "pullback":
        jac = frame.embed_jacobian(coords)
        q = frame.embed(coords)
        hess_q = func.hessian(q)
        gram = -(jac.T @ hess_q @ jac) / k
        return SymmetricForm(gram)
    grad = func.gradient(x)
    dh = frame.basis @ grad
    hb = frame.basis @ func.hessian(x) @ frame.basis.T
    if method == "psi_formula":
        gram = -hb / (k * hx) + ((k - 1.0) / (k * hx) ** 2) * np.outer(dh, dh)
        return SymmetricForm(gram)
    if method == "u_formula":
        u = hx ** (1.0 / k)
        hess_u = (1.0 / k) * hx ** (1.0 / k - 1.0) * hb + (1.0 / k) * (
            1.0 / k - 1.0
        ) * hx ** (1.0 / k - 2.0) * np.outer(dh, dh)
        return SymmetricForm(-hess_u / u)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def chart_metric_with_derivative(frame: ChartFrame, coords):
    """Chart metric and its coordinate derivative, both in closed form.

    Returns (g, dg) with dg[i, j, k] the i-derivative of g_jk; requires third
    derivatives of the underlying function.  Used for the metric (Levi-Civita)
    connection, whose geodesics preserve speed.
    """
    coords = np.atleast_1d(np.asarray(coords, dtype=float))
    x = frame.point(coords)
    func = frame.func
    k = frame.degree
    hx = func(x)
    if hx <= 0.0:
        raise DomainError(f"chart point outside the positivity region (value {hx})")
    bas = frame.basis
    d = bas @ func.gradient(x)
    b = bas @ func.hessian(x) @ bas.T
    t = func.third_tensor(x)
    t = np.tensordot(t, bas, axes=([0], [1]))
    t = np.tensordot(t, bas, axes=([0], [1]))
    t = np.tensordot(t, bas, axes=([0], [1]))
    g = -b / (k * hx) + ((k - 1.0) / (k * hx) ** 2) * np.outer(d, d)
    dd = d[:, None, None] * d[None, :, None] * d[None, None, :]
    sym_bd = b[:, :, None] * d[None, None, :] + b[:, None, :] * d[None, :, None]
    dg = (
        -t / (k * hx)
        + d[:, None, None] * b[None, :, :] / (k * hx * hx)
        + ((k - 1.0) / (k * k)) * (sym_bd / hx**2 - 2.0 * dd / hx**3)
    )
    return g, dg


def levi_civita_gamma(frame: ChartFrame, coords):
    """Connection coefficients of the chart metric (upper index first)."""
    g, dg = chart_metric_with_derivative(frame, coords)
    n = g.shape[0]
    # bracket[m, i, j] = dg[i, m, j] + dg[j, m, i] - dg[m, i, j]
    bracket = np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    gamma = 0.5 * np.linalg.solve(g, bracket.reshape(n, n * n)).reshape(n, n, n)
    return gamma, g


def chart_metric_consistency(frame: ChartFrame, coords, tol: float = 1e-6) -> float:
    """Max relative disagreement of the three metric routes; raises beyond tol."""
    grams = [chart_metric(frame, coords, m).matrix for m in METHODS]
    scale = max(1e-300, max(float(np.abs(g).max()) for g in grams))
    worst = 0.0
    for i in range(len(grams)):
        for j in range(i + 1, len(grams)):
            worst = max(worst, float(np.abs(grams[i] - grams[j]).max()) / scale)
    if worst > tol:
        raise ConsistencyError(
            f"chart metric routes disagree: relative deviation {worst:.3e} > {tol:g}"
        )
    return worst


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    aggregate: str
    counts: dict
    witnesses: list


def classify(
    frame: ChartFrame,
    sample_size: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
) -> Classification:
    """Signature of the level-set metric at projected chart samples.

    The aggregate verdict is unanimous or ``indefinite`` (with per-point
    witnesses for the disagreeing samples).
    """
    coords = frame.sample_coords(sample_size, max_frac=0.8, seed=seed)
    counts = {"hyperbolic": 0, "elliptic": 0, "indefinite": 0}
    witnesses = []
    first_of: dict = {}
    for c in coords:
        q = frame.embed(c)
        form, _ = centroaffine_metric_ambient(frame.func, q)
        if form.is_definite(1, tol):
            kind = "hyperbolic"
        elif form.is_definite(-1, tol):
            kind = "elliptic"
        else:
            kind = "indefinite"
            witnesses.append((c.tolist(), form.signature(tol)))
        counts[kind] += 1
        first_of.setdefault(kind, (c.tolist(), form.signature(tol)))
    if counts["hyperbolic"] == len(coords):
        aggregate = "hyperbolic"
    elif counts["elliptic"] == len(coords):
        aggregate = "elliptic"
    else:
        aggregate = "indefinite"
        # a mixed sample is itself the witness even if every point is definite
        witnesses.extend(v for k, v in first_of.items() if k != "indefinite")
    return Classification(aggregate=aggregate, counts=counts, witnesses=witnesses)


# -- cone metric ---------------------------------------------------------------


def lorentz_metric(func, x, tol: float = 1e-9, validate: bool = True) -> SymmetricForm:
    """The form -(1/k) * Hessian at a cone point, as a metric on the cone.

    On a hyperbolic cone this has signature (d-1, 1, 0); with ``validate`` a
    different signature raises with the eigenvalues in the message.
    """
    x = np.asarray(x, dtype=float)
    form = SymmetricForm(-func.hessian(x) / func.degree)
    if validate:
        sig = form.signature(tol)
        if not (sig.n_pos == func.dimension - 1 and sig.n_neg == 1):
            raise ValueError(
                f"form is not Lorentzian at {x.tolist()}: signature {sig}, "
                f"eigenvalues {form.eigenvalues().tolist()}"
            )
    return form


def lorentz_identity_residuals(func, x) -> dict:
    """Absolute residuals of the homogeneity identities of the cone metric:
    radial: |g_L(x, x) + (k-1) h|; gradient: max |g_L(x, .) + ((k-1)/k) dh|."""
    x = np.asarray(x, dtype=float)
    k = func.degree
    form = lorentz_metric(func, x, validate=False)
    radial = abs(form.value(x, x) + (k - 1.0) * func(x))
    grad = func.gradient(x)
    gradient = float(np.abs(form.matrix @ x + ((k - 1.0) / k) * grad).max())
    return {"radial": radial, "gradient": gradient}


def cone_identity_residual(frame: ChartFrame, x, fd_step: float | None = None) -> float:
    """Residual of the warped-product splitting of the cone metric.

    With s = s0 * sqrt(h), s0 = 2 sqrt(k-1) / k, the cone metric equals
    -ds^2 + (s/s0)^2 * (projected level-set metric), the exact radius
    normalization of the metric-cone structure.  The radial differential ds
    is taken by central differences (step ``fd_step``), the level-set metric
    at the projected point, so both sides are computed along distinct routes.
    """
    func = frame.func
    x = np.asarray(x, dtype=float)
    k = frame.degree
    hx = func(x)
    if hx <= 0.0:
        raise DomainError(f"cone point has nonpositive value {hx}")
    if fd_step is None:
        fd_step = 1e-5 * (1.0 + float(np.linalg.norm(x)))
    s0 = 2.0 * math.sqrt(k - 1.0) / k

    def radius(p):
        return s0 * math.sqrt(func(p))

    tangent = tangent_basis_at(func, x)
    vectors = [x] + [v for v in tangent]
    ds = np.array(
        [(radius(x + fd_step * w) - radius(x - fd_step * w)) / (2.0 * fd_step) for w in vectors]
    )
    q = radial_projection(func, x)
    hess_q = func.hessian(q)
    grad = func.gradient(x)
    a = hx ** (-1.0 / k)
    b = -(1.0 / k) * hx ** (-1.0 / k - 1.0)
    images = [a * w + b * (grad @ w) * x for w in vectors]
    m = len(vectors)
    lhs = np.empty((m, m))
    rhs = np.empty((m, m))
    hess_x = func.hessian(x)
    for i in range(m):
        for j in range(i, m):
            lhs[i, j] = lhs[j, i] = -(vectors[i] @ hess_x @ vectors[j]) / k
            cross = -(images[i] @ hess_q @ images[j]) / k
            rhs[i, j] = rhs[j, i] = -ds[i] * ds[j] + hx * cross
    return float(np.abs(lhs - rhs).max())
