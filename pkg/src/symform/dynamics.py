"""Gradient-flow dynamics toward symmetry-compatible formations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .laplacian import Spectrum, SymmetryLaplacian, WeightedEdge, spectrum
from .symgroup import PointGroupAssignment
from .topology import InteractionGraph, weighted_edges

# error magnitudes below this are float noise; rate fits stop here
UNDERFLOW_FLOOR = 1e-14

DEFAULT_STEP_FACTOR = 0.5     # dt = 0.5 / lambda_max
DEFAULT_HORIZON_FACTOR = 40.0  # T = 40 / lambda_min_pos
STABILITY_LIMIT = 2.0          # RK4 real-axis stability edge is ~2.785; stay under 2


@dataclass(frozen=True)
class Configuration:
    """A stacked configuration of n agents in R^d (agent-major layout)."""

    dim: int
    n: int
    vector: NDArray[np.float64]

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.vector, dtype=float)
        if v.shape != (self.dim * self.n,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.dim * self.n},)")
        if not np.all(np.isfinite(v)):
            raise ValueError("configuration contains non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @classmethod
    def from_points(cls, points: NDArray[np.float64]) -> Configuration:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        return cls(dim=pts.shape[1], n=pts.shape[0], vector=pts.ravel())

    def points(self) -> NDArray[np.float64]:
        return self.vector.reshape(self.n, self.dim)


def edge_residual_norms(
    p: NDArray[np.float64], wedges: list[WeightedEdge] | tuple[WeightedEdge, ...], dim: int
) -> NDArray[np.float64]:
    """Constraint violation per edge, computed directly from the edge list."""
    p = np.asarray(p, dtype=float)
    out = np.empty(len(wedges))
    for e, (u, v, w) in enumerate(wedges):
        r = p[dim * (u - 1):dim * u] - w.T @ p[dim * (v - 1):dim * v]
        out[e] = math.sqrt(float(r @ r))
    return out


def edge_errors(
    p: NDArray[np.float64], graph: InteractionGraph, tau: PointGroupAssignment
) -> NDArray[np.float64]:
    """Per-edge constraint violations of a planar tree."""
    return edge_residual_norms(p, weighted_edges(graph, tau), 2)


def potential(
    p: NDArray[np.float64], graph: InteractionGraph, tau: PointGroupAssignment
) -> float:
    """Half the summed squared edge residuals (the flow's Lyapunov function)."""
    errs = edge_errors(p, graph, tau)
    return 0.5 * float(errs @ errs)


def control(p: NDArray[np.float64], q_matrix: NDArray[np.float64] | SymmetryLaplacian) -> NDArray[np.float64]:
    """Gradient-descent velocity -Q p."""
    q = np.asarray(getattr(q_matrix, "matrix", q_matrix), dtype=float)
    return -(q @ np.asarray(p, dtype=float))


def control_per_agent(
    p: NDArray[np.float64], graph: InteractionGraph, tau: PointGroupAssignment
) -> NDArray[np.float64]:
    """Neighbor-sum form of the gradient velocity.

    Agent i moves by the sum over incident edges of (rotated neighbor - self),
    with the edge rotation applied forward or inverted by traversal direction.
    Independent route kept for cross-checking against :func:`control`.
    """
    p = np.asarray(p, dtype=float)
    n, d = graph.n, 2
    pts = p.reshape(n, d)
    out = np.zeros_like(pts)
    for (u, v, w) in weighted_edges(graph, tau):
        out[u - 1] += w.T @ pts[v - 1] - pts[u - 1]
        out[v - 1] += w @ pts[u - 1] - pts[v - 1]
    return out.ravel()


@dataclass(eq=False)
class SimulationTrace:
    """Sampled gradient-flow run: states, per-edge errors, and the potential."""

    times: NDArray[np.float64]
    states: NDArray[np.float64]
    edge_errors: NDArray[np.float64]
    potentials: NDArray[np.float64]
    n: int
    dim: int
    edge_index: tuple[tuple[int, int], ...]
    metadata: dict = field(default_factory=dict)

    @property
    def total_errors(self) -> NDArray[np.float64]:
        """Norm of the stacked residual vector per step."""
        return np.sqrt((self.edge_errors ** 2).sum(axis=1))

    @property
    def final_state(self) -> NDArray[np.float64]:
        return self.states[-1]


def rk4_step(
    f: Callable[[float, NDArray[np.float64]], NDArray[np.float64]],
    t: float,
    y: NDArray[np.float64],
    h: float,
) -> NDArray[np.float64]:
    """One classical fixed-step RK4 update (shared by every integrator here)."""
    k1 = f(t, y)
    k2 = f(t + h / 2, y + (h / 2) * k1)
    k3 = f(t + h / 2, y + (h / 2) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def resolve_grid(
    spec: Spectrum, dt: float | None, horizon: float | None
) -> tuple[float, float, int]:
    """Default/validated (dt, horizon, steps) for a flow with this spectrum."""
    lam_max = spec.lambda_max
    if dt is None:
        dt = DEFAULT_STEP_FACTOR / lam_max if lam_max > 0 else 0.1
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"step size must be positive and finite, got {dt}")
    if lam_max > 0 and dt * lam_max >= STABILITY_LIMIT:
        raise ValueError(
            f"step size {dt:g} is unstable for the stiffest mode {lam_max:g} "
            f"(need dt < {STABILITY_LIMIT / lam_max:g}; try dt = {DEFAULT_STEP_FACTOR / lam_max:g})"
        )
    if horizon is None:
        rate = spec.lambda_min_pos
        horizon = DEFAULT_HORIZON_FACTOR / rate if rate else 10.0
    if not (horizon > 0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be positive and finite, got {horizon}")
    steps = max(1, int(math.ceil(horizon / dt - 1e-12)))
    return dt, horizon, steps


def integrate(
    lap: SymmetryLaplacian,
    p0: NDArray[np.float64],
    dt: float | None = None,
    horizon: float | None = None,
    method: str = "rk4",
    field_fn: Callable[[float, NDArray[np.float64]], NDArray[np.float64]] | None = None,
    metadata: dict | None = None,
) -> SimulationTrace:
    """Fixed-step RK4 integration of dp/dt = -Q p (or a supplied field).

    Defaults: dt = 0.5/λ_max, horizon = 40/λ⁺_min. Step sizes at or beyond
    the stability limit raise ValueError with a suggested dt.
    """
    if method != "rk4":
        raise ValueError(f"unknown method {method!r}; only 'rk4' is implemented")
    q = lap.matrix
    p = np.array(p0, dtype=float)
    if p.shape != (q.shape[0],):
        raise ValueError(f"initial state has shape {p.shape}, expected ({q.shape[0]},)")
    spec = spectrum(q)
    dt, horizon, steps = resolve_grid(spec, dt, horizon)

    if field_fn is None:
        def field_fn(t: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
            return -(q @ y)

    states = np.empty((steps + 1, p.size))
    states[0] = p
    for k in range(steps):
        p = rk4_step(field_fn, k * dt, p, dt)
        states[k + 1] = p
    times = np.arange(steps + 1) * dt

    E = lap.incidence.matrix
    m, d = lap.incidence.edge_count, lap.dim
    residuals = states @ E
    errors = np.sqrt((residuals.reshape(steps + 1, m, d) ** 2).sum(axis=2))
    potentials = 0.5 * (errors ** 2).sum(axis=1)

    meta = {"dt": dt, "horizon": horizon, "steps": steps, "method": method,
            "lambda_max": spec.lambda_max, "lambda_min_pos": spec.lambda_min_pos}
    if metadata:
        meta.update(metadata)
    return SimulationTrace(
        times=times, states=states, edge_errors=errors, potentials=potentials,
        n=lap.n, dim=lap.dim, edge_index=lap.incidence.edge_index, metadata=meta,
    )


def fit_rate(trace: SimulationTrace) -> float:
    """Least-squares slope of log total error over the tail of a trace.

    The fit window is the final third of the pre-underflow region (total
    error above 1e-14); with no underflow that is the final third of the
    trace. Raises ValueError when the error never rises above float noise
    (e.g. a start already inside the constraint set).
    """
    total = trace.total_errors
    valid = np.nonzero(total > UNDERFLOW_FLOOR)[0]
    if valid.size < 2:
        raise ValueError("total error is below the underflow floor; nothing to fit")
    last = valid[-1]
    lo = (2 * last) // 3
    window = np.arange(lo, last + 1)
    window = window[total[window] > UNDERFLOW_FLOOR]
    if window.size < 2:
        raise ValueError("fewer than two points above the underflow floor in the fit window")
    slope = np.polyfit(trace.times[window], np.log(total[window]), 1)[0]
    return float(slope)
