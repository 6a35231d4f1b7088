"""Formation maneuvering: tracking a translating, rotating, scaling reference."""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .dynamics import SimulationTrace, resolve_grid, rk4_step
from .laplacian import SymmetryLaplacian, spectrum
from .symgroup import PointGroupAssignment, Rotation, identity, rotation2
from .topology import InteractionGraph, weighted_edges

Segment = tuple[float, NDArray[np.float64]]
ScalarSegment = tuple[float, float]


def _check_segments(name: str, segs: tuple, width: int | None) -> tuple:
    if not segs:
        raise ValueError(f"{name}: at least one segment is required")
    out = []
    prev = -math.inf
    for (t, value) in segs:
        if not math.isfinite(t):
            raise ValueError(f"{name}: non-finite segment start {t}")
        if t <= prev:
            raise ValueError(f"{name}: segment starts must be strictly increasing")
        prev = t
        if width is None:
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{name}: non-finite value at t={t}")
        else:
            value = np.asarray(value, dtype=float)
            if value.shape != (width,):
                raise ValueError(f"{name}: value at t={t} has shape {value.shape}, expected ({width},)")
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{name}: non-finite value at t={t}")
            value.flags.writeable = False
        out.append((float(t), value))
    if out[0][0] > 0:
        raise ValueError(f"{name}: first segment starts at {out[0][0]}, leaving a gap before t=0")
    return tuple(out)


def _segment_value(segs: tuple, t: float):
    idx = bisect_right([s[0] for s in segs], t) - 1
    return segs[max(idx, 0)][1]


@dataclass(frozen=True)
class ReferenceInputs:
    """Piecewise-constant maneuver inputs: linear velocity, angular velocity, scaling rate.

    Each series is a tuple of (start_time, value) segments covering [0, ∞);
    a segment holds until the next one starts. Angular velocity is a scalar
    for d=2 and a 3-vector for d=3.
    """

    dim: int
    velocity: tuple[Segment, ...]
    angular: tuple
    scale_rate: tuple[ScalarSegment, ...]

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        object.__setattr__(self, "velocity", _check_segments("velocity", tuple(self.velocity), self.dim))
        omega_width = None if self.dim == 2 else 3
        object.__setattr__(self, "angular", _check_segments("angular", tuple(self.angular), omega_width))
        object.__setattr__(self, "scale_rate", _check_segments("scale_rate", tuple(self.scale_rate), None))

    @classmethod
    def constant(cls, velocity, omega, scale_rate: float, dim: int = 2) -> ReferenceInputs:
        return cls(dim=dim, velocity=((0.0, np.asarray(velocity, dtype=float)),),
                   angular=((0.0, omega),), scale_rate=((0.0, float(scale_rate)),))

    @classmethod
    def stationary(cls, dim: int = 2) -> ReferenceInputs:
        omega = 0.0 if dim == 2 else np.zeros(3)
        return cls.constant(np.zeros(dim), omega, 0.0, dim=dim)

    def velocity_at(self, t: float) -> NDArray[np.float64]:
        return _segment_value(self.velocity, t)

    def omega_at(self, t: float):
        return _segment_value(self.angular, t)

    def scale_rate_at(self, t: float) -> float:
        return _segment_value(self.scale_rate, t)


@dataclass(frozen=True, eq=False)
class ReferenceState:
    """Reference frame at one instant: origin, attitude, and positive scale."""

    position: NDArray[np.float64]
    rotation: Rotation
    scale: float
    time: float = 0.0

    def __post_init__(self) -> None:
        pos = np.ascontiguousarray(self.position, dtype=float)
        if pos.shape != (self.rotation.dimension,):
            raise ValueError(f"position shape {pos.shape} does not match rotation dimension {self.rotation.dimension}")
        pos.flags.writeable = False
        object.__setattr__(self, "position", pos)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")

    @classmethod
    def at_origin(cls, dim: int = 2) -> ReferenceState:
        return cls(position=np.zeros(dim), rotation=identity(dim), scale=1.0)

    @property
    def dim(self) -> int:
        return self.rotation.dimension


def omega_matrix(omega, dim: int) -> NDArray[np.float64]:
    """Skew generator of the attitude dynamics (scalar for d=2, 3-vector for d=3)."""
    if dim == 2:
        w = float(omega)
        return np.array([[0.0, -w], [w, 0.0]])
    wx, wy, wz = np.asarray(omega, dtype=float)
    return np.array([[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]])


def _rotation_step(omega, dim: int, dt: float) -> NDArray[np.float64]:
    """Exact attitude increment exp(Ω dt) for one step of constant omega."""
    if dim == 2:
        return rotation2(float(omega) * dt).matrix
    w = np.asarray(omega, dtype=float)
    angle = float(np.linalg.norm(w)) * dt
    if angle == 0.0:
        return np.eye(3)
    from .spatial3d import rotation3  # local import; spatial3d depends on laplacian only

    return rotation3(w / np.linalg.norm(w), angle).matrix


@dataclass(eq=False)
class ReferencePath:
    """Reference trajectory sampled on the integration grid.

    Inputs are sampled once per step at the left node and held constant, so
    positions are exact piecewise-linear, attitudes exact rotation products,
    and scales exact exponentials of the sampled rates.
    """

    times: NDArray[np.float64]
    positions: NDArray[np.float64]
    rotations: NDArray[np.float64]
    scales: NDArray[np.float64]
    step_velocities: NDArray[np.float64]
    step_omegas: NDArray[np.float64]
    step_scale_rates: NDArray[np.float64]
    dim: int
    dt: float

    def state_at(self, k: int) -> ReferenceState:
        return ReferenceState(
            position=self.positions[k],
            rotation=Rotation(self.rotations[k]),
            scale=float(self.scales[k]),
            time=float(self.times[k]),
        )


def propagate_reference(
    inputs: ReferenceInputs, start: ReferenceState, dt: float, horizon: float
) -> ReferencePath:
    """March the reference frame over a fixed grid of ceil(horizon/dt) steps."""
    if start.dim != inputs.dim:
        raise ValueError(f"start state dimension {start.dim} != inputs dimension {inputs.dim}")
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"step size must be positive and finite, got {dt}")
    if not (horizon > 0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be positive and finite, got {horizon}")
    d = inputs.dim
    steps = max(1, int(math.ceil(horizon / dt - 1e-12)))
    times = np.arange(steps + 1) * dt
    positions = np.empty((steps + 1, d))
    rotations = np.empty((steps + 1, d, d))
    scales = np.empty(steps + 1)
    vks = np.empty((steps, d))
    wks = np.empty((steps,) if d == 2 else (steps, 3))
    aks = np.empty(steps)
    positions[0] = start.position
    rotations[0] = start.rotation.matrix
    scales[0] = start.scale
    for k in range(steps):
        t = float(times[k])
        v = inputs.velocity_at(t)
        w = inputs.omega_at(t)
        a = inputs.scale_rate_at(t)
        vks[k], wks[k], aks[k] = v, w, a
        positions[k + 1] = positions[k] + dt * v
        rotations[k + 1] = _rotation_step(w, d, dt) @ rotations[k]
        scales[k + 1] = scales[k] * math.exp(a * dt)
    return ReferencePath(
        times=times, positions=positions, rotations=rotations, scales=scales,
        step_velocities=vks, step_omegas=wks, step_scale_rates=aks, dim=d, dt=dt,
    )


def moving_frame(p: NDArray[np.float64], ref: ReferenceState) -> NDArray[np.float64]:
    """Express a configuration in the reference frame: unscale, unrotate, recenter."""
    p = np.asarray(p, dtype=float)
    d = ref.dim
    n = p.size // d
    pts = p.reshape(n, d) - ref.position
    return ((pts @ ref.rotation.matrix) / ref.scale).ravel()


def frame_to_world(zeta: NDArray[np.float64], ref: ReferenceState) -> NDArray[np.float64]:
    """Inverse of :func:`moving_frame`."""
    zeta = np.asarray(zeta, dtype=float)
    d = ref.dim
    n = zeta.size // d
    pts = (zeta.reshape(n, d) * ref.scale) @ ref.rotation.matrix.T + ref.position
    return pts.ravel()


def _maneuver_field(
    q: NDArray[np.float64],
    p: NDArray[np.float64],
    r_vec: NDArray[np.float64],
    v_tile: NDArray[np.float64],
    omega_mat: NDArray[np.float64],
    scale_rate: float,
    n: int,
    d: int,
) -> NDArray[np.float64]:
    # single arithmetic path shared by maneuver_control and the integrator;
    # operation order is fixed so zero inputs reduce bitwise to -Q p
    c = p - np.tile(r_vec, n)
    blocks = c.reshape(n, d)
    return -(q @ c) + v_tile + (blocks @ omega_mat.T).ravel() + scale_rate * c


def maneuver_control(
    p: NDArray[np.float64],
    q_matrix: NDArray[np.float64] | SymmetryLaplacian,
    ref: ReferenceState,
    velocity,
    omega,
    scale_rate: float,
) -> NDArray[np.float64]:
    """Tracking control: gradient descent on the shifted state plus feed-forward.

    u = -Q(p - 1⊗r) + 1⊗v + (I⊗Ω + α I)(p - 1⊗r); with zero inputs this is
    the stationary gradient flow.
    """
    q = np.asarray(getattr(q_matrix, "matrix", q_matrix), dtype=float)
    p = np.asarray(p, dtype=float)
    d = ref.dim
    n = p.size // d
    v = np.asarray(velocity, dtype=float)
    return _maneuver_field(q, p, ref.position, np.tile(v, n), omega_matrix(omega, d),
                           float(scale_rate), n, d)


@dataclass(eq=False)
class ManeuverTrace(SimulationTrace):
    """Maneuver run: world states plus the reference and the frame coordinates.

    ``edge_errors`` and ``potentials`` are computed on the shifted state
    p - 1⊗r, so they measure formation-shape error, not tracking offset.
    """

    ref_positions: NDArray[np.float64] = None
    ref_rotations: NDArray[np.float64] = None
    ref_scales: NDArray[np.float64] = None
    zeta: NDArray[np.float64] = None


def simulate_maneuver(
    lap: SymmetryLaplacian,
    p0: NDArray[np.float64],
    inputs: ReferenceInputs,
    start: ReferenceState | None = None,
    dt: float | None = None,
    horizon: float | None = None,
    metadata: dict | None = None,
) -> ManeuverTrace:
    """Integrate the maneuver control law alongside its reference trajectory.

    The reference and the agents share one grid; each RK4 step holds the
    inputs sampled at its left node, evaluating the reference exactly at the
    sub-stage times. The returned trace carries the frame coordinates ζ,
    which for planar formations follow the stationary flow dζ/dt = -Q ζ.
    """
    q = lap.matrix
    d = lap.dim
    n = lap.n
    if start is None:
        start = ReferenceState.at_origin(d)
    if start.dim != d or inputs.dim != d:
        raise ValueError(f"reference dimension does not match the {d}-dimensional formation")
    p = np.array(p0, dtype=float)
    if p.shape != (q.shape[0],):
        raise ValueError(f"initial state has shape {p.shape}, expected ({q.shape[0]},)")
    spec = spectrum(q)
    dt, horizon, steps = resolve_grid(spec, dt, horizon)
    path = propagate_reference(inputs, start, dt, horizon)

    states = np.empty((steps + 1, p.size))
    states[0] = p
    for k in range(steps):
        r_k = path.positions[k]
        v_k = path.step_velocities[k]
        om = omega_matrix(path.step_omegas[k], d)
        a_k = float(path.step_scale_rates[k])
        v_tile = np.tile(v_k, n)

        def field_fn(t_rel: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
            return _maneuver_field(q, y, r_k + v_k * t_rel, v_tile, om, a_k, n, d)

        p = rk4_step(field_fn, 0.0, p, dt)
        states[k + 1] = p

    shifted = states - np.tile(path.positions, (1, n))
    E = lap.incidence.matrix
    m = lap.incidence.edge_count
    residuals = shifted @ E
    errors = np.sqrt((residuals.reshape(steps + 1, m, d) ** 2).sum(axis=2))
    potentials = 0.5 * (errors ** 2).sum(axis=1)

    zeta = np.empty_like(states)
    for k in range(steps + 1):
        zeta[k] = ((shifted[k].reshape(n, d) @ path.rotations[k]) / path.scales[k]).ravel()

    meta = {"dt": dt, "horizon": horizon, "steps": steps, "method": "rk4",
            "lambda_max": spec.lambda_max, "lambda_min_pos": spec.lambda_min_pos}
    if metadata:
        meta.update(metadata)
    return ManeuverTrace(
        times=path.times, states=states, edge_errors=errors, potentials=potentials,
        n=n, dim=d, edge_index=lap.incidence.edge_index, metadata=meta,
        ref_positions=path.positions, ref_rotations=path.rotations,
        ref_scales=path.scales, zeta=zeta,
    )


def shifted_errors(
    p: NDArray[np.float64],
    ref: ReferenceState,
    graph: InteractionGraph,
    tau: PointGroupAssignment,
) -> NDArray[np.float64]:
    """Per-edge constraint violations of the recentered configuration."""
    from .dynamics import edge_residual_norms

    p = np.asarray(p, dtype=float)
    n = graph.n
    shifted = p - np.tile(ref.position, n)
    return edge_residual_norms(shifted, weighted_edges(graph, tau), 2)


def zeta_consistency_residual(trace: ManeuverTrace, q_matrix: NDArray[np.float64]) -> float:
    """Central-difference residual of dζ/dt = -Q ζ along a maneuver trace.

    Returns max_k ||(ζ_{k+1} - ζ_{k-1})/(2 dt) + Q ζ_k||. Small (O(dt²)) when
    the frame reduction holds; O(inputs) when it does not, e.g. for spatial
    formations whose edge rotations do not commute with the reference
    attitude. Reported as a diagnostic, never asserted to vanish.
    """
    z = trace.zeta
    if z.shape[0] < 3:
        raise ValueError("need at least three samples for a central difference")
    dt = float(trace.times[1] - trace.times[0])
    dz = (z[2:] - z[:-2]) / (2.0 * dt)
    resid = dz + z[1:-1] @ q_matrix.T
    return float(np.sqrt((resid ** 2).sum(axis=1)).max())


def from_waypoints(
    points: NDArray[np.float64],
    segment_duration: float,
    scales: NDArray[np.float64] | None = None,
) -> tuple[ReferenceInputs, ReferenceState]:
    """Build planar piecewise inputs steering the frame through waypoints.

    Velocities come from consecutive differences, headings from their
    directions, angular velocity from the heading rate, and scale rates from
    log-ratios of the optional per-waypoint scales. The returned start state
    is aligned with the first leg's heading.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("waypoints must be an (k >= 2, 2) array")
    if not (segment_duration > 0 and math.isfinite(segment_duration)):
        raise ValueError(f"segment duration must be positive and finite, got {segment_duration}")
    legs = np.diff(pts, axis=0)
    if np.any(np.sqrt((legs ** 2).sum(axis=1)) == 0.0):
        raise ValueError("consecutive waypoints must be distinct")
    headings = np.arctan2(legs[:, 1], legs[:, 0])
    k = legs.shape[0]
    velocity = tuple((i * segment_duration, legs[i] / segment_duration) for i in range(k))
    omegas = []
    for i in range(k):
        if i < k - 1:
            turn = math.remainder(headings[i + 1] - headings[i], math.tau)
            omegas.append((i * segment_duration, turn / segment_duration))
        else:
            omegas.append((i * segment_duration, 0.0))
    if scales is None:
        rates = tuple(((i * segment_duration), 0.0) for i in range(k))
        s0 = 1.0
    else:
        s = np.asarray(scales, dtype=float)
        if s.shape != (pts.shape[0],) or np.any(s <= 0):
            raise ValueError("scales must be positive, one per waypoint")
        rates = tuple((i * segment_duration, math.log(s[i + 1] / s[i]) / segment_duration) for i in range(k))
        s0 = float(s[0])
    inputs = ReferenceInputs(dim=2, velocity=velocity, angular=tuple(omegas), scale_rate=rates)
    start = ReferenceState(position=pts[0], rotation=rotation2(float(headings[0])), scale=s0)
    return inputs, start
