"""Fixed-step simulation of linear and sector-nonlinear agreement dynamics.

Linear runs integrate xdot = -L x + v(t) with classical RK4; when v is zero
the exact RK4 step map Phi = I - hL + (hL)^2/2 - (hL)^3/6 + (hL)^4/24 is
precomputed and applied iteratively (identical arithmetic order per step,
so runs are reproducible).  Nonlinear runs add edgewise couplings
phi(y) = a y + b sin(c y) on selected edges:

    xdot = -L x - E_delta phi(E_delta^T x) + v(t).

A run is flagged divergent the first time ||x|| exceeds 1e9 (1 + ||x(0)||)
and integration stops there.  All randomness (initial states, geometric
graphs) comes from an explicit 64-bit splitmix stream, so equal seeds give
bit-equal results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import graph as gr
from .errors import GenerationError, GraphConstructionError, InputError, StepSizeError

__all__ = [
    "SplitMix64",
    "SimulationConfig",
    "Trajectory",
    "NonlinearCoupling",
    "burst_input",
    "table_input",
    "simulate_linear",
    "simulate_nonlinear",
    "detect_clusters",
    "generate_rgg",
    "write_trajectory_csv",
]

DIVERGENCE_FACTOR = 1e9
CLUSTER_TOL = 1e-4

_MASK = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit splitmix generator (platform independent)."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def next_int(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53 uniform bits in [0, 1)
        return (self.next_int() >> 11) * (1.0 / 9007199254740992.0)

    def next_symmetric(self) -> float:
        """Uniform in [-1, 1)."""
        return 2.0 * self.next_float() - 1.0


@dataclass(frozen=True)
class SimulationConfig:
    """Run parameters shared by the linear and nonlinear integrators.

    ``initial_state`` is either an explicit node-value vector or None, in
    which case nodes start uniform in [-1, 1) drawn from a splitmix stream
    seeded with ``state_seed``.  ``exogenous_input`` is None (zero input) or
    a callable t -> length-n vector; see :func:`burst_input` and
    :func:`table_input`.  ``output_edges`` lists (u, v) node pairs measured
    as z = x_u - x_v (defaults to the graph's own edges).  ``store_every``
    thins the stored trajectory (divergence is still checked every step, and
    the final step is always stored).
    """

    duration: float
    dt: float
    initial_state: Sequence[float] | np.ndarray | None = None
    state_seed: int = 0
    exogenous_input: Callable[[float], np.ndarray] | None = None
    output_edges: tuple[tuple[int, int], ...] | None = None
    store_every: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InputError(f"duration must be positive, got {self.duration!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InputError(f"dt must be positive, got {self.dt!r}")
        if not (isinstance(self.store_every, int) and self.store_every >= 1):
            raise InputError(f"store_every must be a positive integer, got {self.store_every!r}")


@dataclass(frozen=True)
class Trajectory:
    """Stored samples of one run.

    ``states`` has one row per stored time; ``outputs`` holds the relative
    states over the configured output pairs.  When ``diverged`` is set,
    ``diverged_at`` is the first time ||x|| crossed the divergence threshold
    and the trajectory ends at that sample.
    """

    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    diverged: bool
    diverged_at: float | None


@dataclass(frozen=True)
class NonlinearCoupling:
    """Edgewise couplings phi_i(y) = a_i y + b_i sin(c_i y).

    Parameter triples align positionally with the sorted uncertain edge
    list they are applied to.  Each coupling's implied sector is
    [a - |bc|, a + |bc|] (width zero when b = 0); c must be nonzero.
    """

    params: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        cleaned = []
        for i, triple in enumerate(self.params):
            a, b, c = (float(x) for x in triple)
            if not all(map(math.isfinite, (a, b, c))):
                raise InputError(f"coupling {i}: parameters must be finite")
            if c == 0.0:
                raise InputError(f"coupling {i}: frequency c must be nonzero")
            cleaned.append((a, b, c))
        if not cleaned:
            raise InputError("NonlinearCoupling needs at least one (a, b, c) triple")
        object.__setattr__(self, "params", tuple(cleaned))

    def sectors(self) -> tuple[tuple[float, float], ...]:
        return tuple((a - abs(b * c), a + abs(b * c)) for a, b, c in self.params)

    def slope_bound(self) -> float:
        return max(abs(a) + abs(b * c) for a, b, c in self.params)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        a = np.array([p[0] for p in self.params])
        b = np.array([p[1] for p in self.params])
        c = np.array([p[2] for p in self.params])
        return a * y + b * np.sin(c * y)


def burst_input(
    n: int, nodes: Sequence[int], amplitude: float, t_start: float, t_end: float
) -> Callable[[float], np.ndarray]:
    """Impulse-like input: ``amplitude`` on ``nodes`` for t in [t_start, t_end)."""
    v = np.zeros(n)
    for node in nodes:
        if not (0 <= node < n):
            raise InputError(f"burst node {node} out of range for {n} nodes")
        v[node] = amplitude
    zero = np.zeros(n)

    def signal(t: float) -> np.ndarray:
        return v if t_start <= t < t_end else zero

    return signal


def table_input(times: Sequence[float], values: np.ndarray) -> Callable[[float], np.ndarray]:
    """Zero-order-hold input table: row i applies from times[i] to times[i+1]."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or values.ndim != 2 or len(times) != len(values):
        raise InputError("table input needs matching 1-D times and 2-D values")
    if np.any(np.diff(times) <= 0):
        raise InputError("table input times must be strictly increasing")
    zero = np.zeros(values.shape[1])

    def signal(t: float) -> np.ndarray:
        idx = int(np.searchsorted(times, t, side="right")) - 1
        return values[idx] if idx >= 0 else zero

    return signal


def _resolve_initial_state(g: gr.WeightedGraph, config: SimulationConfig) -> np.ndarray:
    if config.initial_state is not None:
        x0 = np.asarray(config.initial_state, dtype=float)
        if x0.shape != (g.node_count,):
            raise InputError(
                f"initial_state has shape {x0.shape}, expected ({g.node_count},)"
            )
        if not np.all(np.isfinite(x0)):
            raise InputError("initial_state has non-finite entries")
        return x0.copy()
    rng = SplitMix64(config.state_seed)
    return np.array([rng.next_symmetric() for _ in range(g.node_count)])


def _output_incidence(g: gr.WeightedGraph, config: SimulationConfig) -> np.ndarray:
    pairs = config.output_edges
    if pairs is None:
        pairs = tuple((tail, head) for tail, head, _ in g.edges)
    Eo = np.zeros((g.node_count, len(pairs)))
    for j, (u, v) in enumerate(pairs):
        if not (0 <= u < g.node_count) or not (0 <= v < g.node_count) or u == v:
            raise InputError(f"output pair ({u}, {v}) is not a valid node pair")
        Eo[u, j] = 1.0
        Eo[v, j] = -1.0
    return Eo


def _check_step(dt: float, rate: float) -> None:
    if rate > 0 and dt >= 2.0 / rate:
        raise StepSizeError(
            f"dt={dt:g} violates the step guard: need dt < {2.0 / rate:.6g} "
            f"(2 / {rate:.6g})"
        )


def _perturbed_weights(g: gr.WeightedGraph, delta) -> np.ndarray:
    w = g.weights.copy()
    if delta is None:
        return w
    if isinstance(delta, dict):
        for k, d in delta.items():
            k = int(k)
            if not (0 <= k < g.edge_count):
                raise GraphConstructionError(
                    f"perturbed edge index {k} out of range for {g.edge_count} edges"
                )
            w[k] += float(d)
        return w
    d = np.asarray(delta, dtype=float)
    if d.shape != (g.edge_count,):
        raise GraphConstructionError(
            f"perturbation vector has shape {d.shape}, expected ({g.edge_count},)"
        )
    return w + d


def _run(
    deriv: Callable[[float, np.ndarray], np.ndarray] | None,
    step_map: np.ndarray | None,
    x0: np.ndarray,
    Eo: np.ndarray,
    config: SimulationConfig,
) -> Trajectory:
    """Shared fixed-step loop: either apply step_map or do RK4 on deriv."""
    dt = config.dt
    steps = int(math.ceil(config.duration / dt - 1e-9))
    threshold = DIVERGENCE_FACTOR * (1.0 + float(np.linalg.norm(x0)))
    keep: list[int] = [0]
    rows: list[np.ndarray] = [x0.copy()]
    x = x0.copy()
    diverged = False
    diverged_at = None
    for k in range(1, steps + 1):
        if step_map is not None:
            x = step_map @ x
        else:
            t = (k - 1) * dt
            k1 = deriv(t, x)
            k2 = deriv(t + 0.5 * dt, x + 0.5 * dt * k1)
            k3 = deriv(t + 0.5 * dt, x + 0.5 * dt * k2)
            k4 = deriv(t + dt, x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        blown = not np.all(np.isfinite(x)) or float(np.linalg.norm(x)) > threshold
        if blown or k == steps or k % config.store_every == 0:
            keep.append(k)
            rows.append(x.copy())
        if blown:
            diverged = True
            diverged_at = k * dt
            break
    times = np.array(keep, dtype=float) * dt
    states = np.vstack(rows)
    outputs = states @ Eo
    return Trajectory(times, states, outputs, diverged, diverged_at)


def simulate_linear(g: gr.WeightedGraph, delta, config: SimulationConfig) -> Trajectory:
    """Integrate xdot = -L(w + delta) x + v(t) with fixed-step RK4.

    ``delta`` is None, a dict {edge index: additive perturbation}, or a full
    length-m vector; perturbed weights may pass through zero (the edge
    simply drops out of the dynamics).  Raises StepSizeError when
    dt >= 2/lambda_max(L).
    """
    w = _perturbed_weights(g, delta)
    E = gr.incidence_matrix(g)
    L = (E * w) @ E.T
    lam_max = float(np.linalg.eigvalsh(L)[-1]) if g.node_count else 0.0
    _check_step(config.dt, lam_max)
    x0 = _resolve_initial_state(g, config)
    Eo = _output_incidence(g, config)
    if config.exogenous_input is None:
        h = config.dt
        A = -h * L
        Phi = np.eye(g.node_count)
        term = np.eye(g.node_count)
        for j in (1.0, 2.0, 3.0, 4.0):
            term = term @ A / j
            Phi = Phi + term
        return _run(None, Phi, x0, Eo, config)

    v = config.exogenous_input

    def deriv(t: float, x: np.ndarray) -> np.ndarray:
        return -(L @ x) + v(t)

    return _run(deriv, None, x0, Eo, config)


def simulate_nonlinear(
    g: gr.WeightedGraph,
    uncertain_edges: Sequence[int],
    coupling: NonlinearCoupling,
    config: SimulationConfig,
) -> Trajectory:
    """Integrate xdot = -L x - E_delta phi(E_delta^T x) + v(t).

    ``uncertain_edges`` are distinct edge indices (sorted internally);
    coupling triples align with the sorted order.  The step guard adds the
    couplings' maximum sector slope to lambda_max(L).
    """
    edges = sorted(set(int(k) for k in uncertain_edges))
    if len(edges) != len(uncertain_edges):
        raise GraphConstructionError("uncertain_edges must be distinct")
    for k in edges:
        if not (0 <= k < g.edge_count):
            raise GraphConstructionError(
                f"uncertain edge index {k} out of range for {g.edge_count} edges"
            )
    if len(coupling.params) != len(edges):
        raise GraphConstructionError(
            f"need one coupling per uncertain edge: got {len(coupling.params)} "
            f"couplings for {len(edges)} edges"
        )
    E = gr.incidence_matrix(g)
    L = (E * g.weights) @ E.T
    Ed = E[:, edges]
    lam_max = float(np.linalg.eigvalsh(L)[-1])
    _check_step(config.dt, lam_max + coupling.slope_bound())
    x0 = _resolve_initial_state(g, config)
    Eo = _output_incidence(g, config)
    v = config.exogenous_input

    if v is None:
        def deriv(t: float, x: np.ndarray) -> np.ndarray:
            return -(L @ x) - Ed @ coupling(Ed.T @ x)
    else:
        def deriv(t: float, x: np.ndarray) -> np.ndarray:
            return -(L @ x) - Ed @ coupling(Ed.T @ x) + v(t)

    return _run(deriv, None, x0, Eo, config)


def detect_clusters(values: Sequence[float] | np.ndarray, tol: float = CLUSTER_TOL) -> tuple[tuple[int, ...], ...]:
    """Group nodes whose values agree within ``tol`` (absolute, gap-based).

    Values are sorted and split wherever consecutive sorted values differ by
    more than ``tol``; each cluster lists its node ids ascending and clusters
    are ordered by their smallest member.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InputError(f"expected a 1-D value vector, got shape {values.shape}")
    if values.size == 0:
        return ()
    order = np.argsort(values, kind="stable")
    groups: list[list[int]] = [[int(order[0])]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] > tol:
            groups.append([])
        groups[-1].append(int(cur))
    clusters = [tuple(sorted(grp)) for grp in groups]
    clusters.sort(key=lambda c: c[0])
    return tuple(clusters)


def generate_rgg(n: int, radius: float, seed: int, max_retries: int = 100) -> gr.WeightedGraph:
    """Connected random geometric graph with inverse-distance weights.

    Draws n points uniform in the unit square from a splitmix stream seeded
    with ``seed`` (x then y per node), joins pairs at Euclidean distance at
    most ``radius`` (in lexicographic pair order) with weight 1/distance,
    and retries with fresh draws from the same stream until the graph is
    connected.  Raises GenerationError after ``max_retries`` attempts.
    """
    if n < 1:
        raise GraphConstructionError(f"node count must be positive, got {n}")
    if not (math.isfinite(radius) and radius > 0):
        raise GraphConstructionError(f"radius must be positive, got {radius!r}")
    rng = SplitMix64(seed)
    for _ in range(max_retries):
        pts = [(rng.next_float(), rng.next_float()) for _ in range(n)]
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                d = math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])
                if 0.0 < d <= radius:
                    edges.append((i, j, 1.0 / d))
        g = gr.build_graph(n, edges)
        count, _ = gr.connected_components(g)
        if count == 1:
            return g
    raise GenerationError(
        f"no connected geometric graph in {max_retries} attempts "
        f"(n={n}, radius={radius}); increase the radius"
    )


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write ``t,x0,...,x{n-1}[,z0,...,z{m-1}]`` rows at 17 significant digits."""
    n = traj.states.shape[1]
    p = traj.outputs.shape[1]
    header = ["t"] + [f"x{i}" for i in range(n)] + [f"z{j}" for j in range(p)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(traj.times)):
            row = [traj.times[i], *traj.states[i], *traj.outputs[i]]
            fh.write(",".join(format(val, ".17g") for val in row) + "\n")
