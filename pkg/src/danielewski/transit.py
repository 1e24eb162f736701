"""Moving one point of the smooth surface ``xy = p(z)`` while fixing finitely many others.

Each path segment is covered by the two-parameter map

    (t, s) -> psi_{f(x) s} o phi_{g(y) t} (mover)

where ``g`` vanishes at the ``y``-coordinates of the fixed points and ``f`` at
their ``x``-coordinates.  Both multipliers are kept in factored form so that
the effective flow time at a fixed point is exactly zero, which leaves it
bitwise unchanged on replay.  Points in special position are first moved by
plain ``V``/``W`` flows and the result is conjugated back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from danielewski.errors import (
    DegeneratePoints,
    Exhausted,
    NewtonStalled,
    PlanningFailed,
)
from danielewski.flows import (
    AutomorphismProgram,
    FlowStep,
    InterpPoly,
    SurfacePoint,
    apply_flow,
    p_value,
    run_program,
    taylor_coeffs,
)

DEFAULT_TOL = 1e-6
DEFAULT_CLEARANCE = 1e-3
MAX_RADIUS_DOUBLINGS = 6
COND_LIMIT = 1e6
SAMPLES_PER_SEGMENT = 32
MAX_STEP = 0.5


def _dp_value(p, z):
    qs = taylor_coeffs(p, (z,), 1)
    return qs[0] if qs else 0j


def _sample_disk(rng, radius):
    r = radius * np.sqrt(rng.random())
    theta = 2 * np.pi * rng.random()
    return complex(r * np.cos(theta), r * np.sin(theta))


def _radius(attempt):
    return float(2 ** min(attempt, MAX_RADIUS_DOUBLINGS))


@dataclass
class TransportTask:
    p: object
    points: list
    mover: int
    target: SurfacePoint
    tolerance: float = DEFAULT_TOL
    seed: int = 0

    def __post_init__(self):
        if self.p.nvars != 1:
            raise ValueError("transport is implemented for N = 1 only")
        if not 0 <= self.mover < len(self.points):
            raise ValueError(f"mover index {self.mover} out of range")
        for i, a in enumerate(self.points):
            for b in self.points[:i]:
                if a.distance(b) <= self.tolerance:
                    raise DegeneratePoints("task points are not pairwise distinct")

    @property
    def fixed(self):
        return [q for i, q in enumerate(self.points) if i != self.mover]

    @classmethod
    def from_json(cls, data, p=None, tol_surface=1e-9):
        from danielewski.ring import DefiningPoly

        if p is None:
            p = DefiningPoly.parse(data["p"])
        pts = [SurfacePoint.from_json(p, q, tol_surface) for q in data["points"]]
        target = SurfacePoint.from_json(p, data["target"], tol_surface)
        return cls(p, pts, int(data.get("mover", len(pts) - 1)), target,
                   float(data.get("tol", DEFAULT_TOL)), int(data.get("seed", 0)))


@dataclass
class PathPlan:
    waypoints: list
    clearance: float


@dataclass
class TransportResult:
    program: AutomorphismProgram
    plan: Optional[PathPlan]
    general_position_times: tuple
    condition_numbers: list = field(default_factory=list)
    endpoint: Optional[SurfacePoint] = None


# ---------------------------------------------------------------------------
# general position


def _margin(p, pts):
    """Smallest of the general-position quantities over ``pts``."""
    vals = []
    for i, a in enumerate(pts):
        vals += [abs(_dp_value(p, a.z[0])), abs(a.x), abs(a.y)]
        for b in pts[:i]:
            vals += [abs(a.x - b.x), abs(a.y - b.y)]
    return min(vals)


def _vw(t, s):
    return [FlowStep("V", time=t), FlowStep("W", time=s)]


def general_position(points, p, rng, tol=DEFAULT_CLEARANCE, max_tries=200):
    """Flow times ``(t, s)`` of ``psi_s o phi_t`` putting ``points`` in general position."""
    t = s = 0j
    for attempt in range(max_tries):
        if attempt:
            radius = _radius(attempt // 10)
            t, s = _sample_disk(rng, radius), _sample_disk(rng, radius)
        try:
            moved, _ = run_program(AutomorphismProgram(_vw(t, s)), points, p)
        except ArithmeticError:
            continue
        if _margin(p, moved) >= tol:
            return (t, s), moved
    raise Exhausted(f"no general position found in {max_tries} tries")


# ---------------------------------------------------------------------------
# interpolation multipliers


def shear_degree(d):
    return max(1, d - 2)


def interpolation_poly(roots, unit_point, r, var="y"):
    """``c * w^r * prod(w - a_i)`` with ``f(unit_point) = 1``."""
    roots = tuple(complex(a) for a in roots)
    a_m = complex(unit_point)
    for i, a in enumerate(roots):
        if a == 0:
            raise DegeneratePoints("interpolation roots must be nonzero")
        if a == a_m or any(a == b for b in roots[:i]):
            raise DegeneratePoints("interpolation points must be pairwise distinct")
    if a_m == 0:
        raise DegeneratePoints("unit point must be nonzero")
    val = a_m ** r
    for a in roots:
        val *= a_m - a
    return InterpPoly(var, 1 / val, r, roots)


# ---------------------------------------------------------------------------
# path planning (chart x != 0, coordinates (x, z))


def _lift(p, x, z):
    x, z = complex(x), complex(z)
    return SurfacePoint.make(p, x, p_value(p, (z,)) / x, (z,))


def _point_margin(p, x, z, fixed):
    y = p_value(p, (z,)) / x
    vals = [abs(_dp_value(p, z)), abs(x), abs(y)]
    for q in fixed:
        vals += [abs(x - q.x), abs(y - q.y)]
    return min(vals)


def _dist_to_segment(c, a, b):
    """Distance from ``c`` to the complex segment ``[a, b]``."""
    d = b - a
    if d == 0:
        return abs(c - a)
    u = min(1.0, max(0.0, ((c - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(a + u * d - c)


def _segment_margin(p, a, b, fixed):
    # x is linear along the segment, so its constraints are exact
    out = min([_dist_to_segment(0j, a[0], b[0])]
              + [_dist_to_segment(q.x, a[0], b[0]) for q in fixed])
    if out == 0:
        return 0.0
    for i in range(SAMPLES_PER_SEGMENT + 1):
        u = i / SAMPLES_PER_SEGMENT
        x = a[0] + u * (b[0] - a[0])
        z = a[1] + u * (b[1] - a[1])
        out = min(out, _point_margin(p, x, z, fixed))
    return out


def plan_path(task, clearance=DEFAULT_CLEARANCE, rng=None, max_retries=200):
    """Polyline in the chart from the mover to the target avoiding the bad locus."""
    rng = rng if rng is not None else np.random.default_rng(task.seed)
    p, fixed = task.p, task.fixed
    start = task.points[task.mover]
    goal = task.target
    for q in (start, goal):
        if q.x == 0 or _point_margin(p, q.x, q.z[0], fixed) < clearance:
            raise PlanningFailed(clearance)
    a, b = (start.x, start.z[0]), (goal.x, goal.z[0])
    if start.distance(goal) <= task.tolerance:
        return PathPlan([start], _point_margin(p, start.x, start.z[0], fixed))
    chart = [a, b]
    i = 0
    retries = 0
    while i < len(chart) - 1:
        u, v = chart[i], chart[i + 1]
        if _segment_margin(p, u, v, fixed) >= clearance:
            i += 1
            continue
        if retries >= max_retries:
            raise PlanningFailed(clearance)
        radius = _radius(retries // 10)
        mid = ((u[0] + v[0]) / 2 + _sample_disk(rng, radius),
               (u[1] + v[1]) / 2 + _sample_disk(rng, radius))
        retries += 1
        if mid[0] != 0 and _point_margin(p, mid[0], mid[1], fixed) >= clearance:
            chart.insert(i + 1, mid)
    chart = _densify(chart, MAX_STEP)
    margin = min(_segment_margin(p, u, v, fixed) for u, v in zip(chart, chart[1:]))
    waypoints = [start] + [_lift(p, x, z) for x, z in chart[1:-1]] + [goal]
    return PathPlan(waypoints, margin)


def _densify(chart, max_step):
    out = [chart[0]]
    for u, v in zip(chart, chart[1:]):
        n = max(1, int(np.ceil(max(abs(v[0] - u[0]), abs(v[1] - u[1])) / max_step)))
        for k in range(1, n + 1):
            out.append((u[0] + k * (v[0] - u[0]) / n, u[1] + k * (v[1] - u[1]) / n))
        out[-1] = v
    return out


# ---------------------------------------------------------------------------
# per-segment Newton solve


@dataclass
class _Segment:
    steps: list
    end: SurfacePoint
    cond: float


def _segment_steps(fixed, r, mover, goal, t, s):
    g = interpolation_poly([q.y for q in fixed], mover.y, r, "y")
    f = interpolation_poly([q.x for q in fixed], goal.x, r, "x")
    return [FlowStep("V", multiplier=g, time=t), FlowStep("W", multiplier=f, time=s)]


def _endpoint(p, steps, mover):
    pt = mover
    for st in steps:
        pt = apply_flow(st, pt, p)
    return pt


def _residual_vec(pt, goal):
    return np.array([pt.x - goal.x, pt.z[0] - goal.z[0]], dtype=complex)


def _solve_segment(p, fixed, r, mover, goal, tol, max_iter=60):
    """Damped Newton for ``(t, s)``; returns a :class:`_Segment` or ``None``."""
    fd = 1e-7
    ts = np.zeros(2, dtype=complex)

    def F(v):
        steps = _segment_steps(fixed, r, mover, goal, v[0], v[1])
        return steps, _endpoint(p, steps, mover)

    def jac(v, f0):
        J = np.empty((2, 2), dtype=complex)
        for col in range(2):
            dv = v.copy()
            dv[col] += fd
            _, pt = F(dv)
            J[:, col] = (_residual_vec(pt, goal) - f0) / fd
        return J

    try:
        steps, pt = F(ts)
    except ArithmeticError:
        return None
    res = _residual_vec(pt, goal)
    scale = 1.0 + max(abs(goal.x), abs(goal.z[0]))
    for _ in range(max_iter):
        if np.max(np.abs(res)) <= tol * 1e-3 * scale:
            J = jac(ts, res)
            return _Segment(steps, pt, float(np.linalg.cond(J)))
        try:
            J = jac(ts, res)
            delta = np.linalg.solve(J, -res)
        except (ArithmeticError, np.linalg.LinAlgError):
            return None
        lam = 1.0
        for _ in range(30):
            cand = ts + lam * delta
            try:
                c_steps, c_pt = F(cand)
                c_res = _residual_vec(c_pt, goal)
            except ArithmeticError:
                lam /= 2
                continue
            if np.linalg.norm(c_res) < np.linalg.norm(res):
                ts, steps, pt, res = cand, c_steps, c_pt, c_res
                break
            lam /= 2
        else:
            return None
    return None


def _follow(p, fixed, r, start, waypoints, tol, max_depth=8):
    """Chain segment solves through ``waypoints``; subdivide on Newton failure."""
    steps, conds = [], []
    cur = start
    for idx, wp in enumerate(waypoints):
        is_last = idx == len(waypoints) - 1
        seg = _solve_to(p, fixed, r, cur, wp, tol, max_depth, idx, is_last)
        for s in seg:
            steps += s.steps
            conds.append(s.cond)
            cur = s.end
    return steps, conds, cur


def _solve_to(p, fixed, r, cur, wp, tol, depth, idx, is_last):
    seg = _solve_segment(p, fixed, r, cur, wp, tol)
    if seg is not None and seg.cond < COND_LIMIT:
        return [seg]
    if depth == 0:
        raise NewtonStalled(f"segment {idx} did not converge", segment=idx)
    mid = _lift(p, (cur.x + wp.x) / 2, (cur.z[0] + wp.z[0]) / 2)
    first = _solve_to(p, fixed, r, cur, mid, tol, depth - 1, idx, False)
    rest = _solve_to(p, fixed, r, first[-1].end, wp, tol, depth - 1, idx, is_last)
    return first + rest


# ---------------------------------------------------------------------------
# drivers


def solve_task(task, clearance=DEFAULT_CLEARANCE):
    """Program moving the mover to the target while fixing every other point."""
    p = task.p
    rng = np.random.default_rng(task.seed)
    mover = task.points[task.mover]
    if mover.distance(task.target) <= task.tolerance:
        return TransportResult(AutomorphismProgram([]), PathPlan([mover], 0.0), (0j, 0j), [], mover)
    for q in task.fixed:
        if q.distance(task.target) <= task.tolerance:
            raise PlanningFailed(clearance)
    (t, s), moved = general_position(task.points + [task.target], p, rng, clearance)
    inner = TransportTask(p, moved[:-1], task.mover, moved[-1], task.tolerance, task.seed)
    plan = plan_path(inner, clearance, rng)
    r = shear_degree(p.degree)
    steps, conds, _ = _follow(p, inner.fixed, r, inner.points[inner.mover], plan.waypoints[1:],
                              task.tolerance)
    if t == 0 and s == 0:
        prog = AutomorphismProgram(steps)
    else:
        pre = _vw(t, s)
        post = [st.inverse() for st in reversed(pre)]
        prog = AutomorphismProgram(pre + steps + post)
    end, _ = run_program(prog, [mover], p)
    if end[0].distance(task.target) > task.tolerance:
        raise PlanningFailed(clearance)
    return TransportResult(prog, plan, (t, s), conds, end[0])


def move_point(task, clearance=DEFAULT_CLEARANCE):
    return solve_task(task, clearance).program


def _random_parking(p, avoid, rng, clearance, max_tries=200):
    for attempt in range(max_tries):
        radius = _radius(attempt // 10)
        x = _sample_disk(rng, radius)
        z = _sample_disk(rng, radius)
        if x == 0:
            continue
        cand = _lift(p, x, z)
        if _point_margin(p, cand.x, cand.z[0], avoid) >= clearance:
            return cand
    raise Exhausted("no parking location found")


def m_transitive(src, dst, p, tol=DEFAULT_TOL, seed=0, clearance=DEFAULT_CLEARANCE):
    """Program mapping the tuple ``src`` onto ``dst`` by successive one-point moves.

    A point still waiting to move that occupies the next destination is first
    parked at a random location away from everything else.
    """
    if len(src) != len(dst):
        raise ValueError("src and dst must have the same length")
    for pts in (src, dst):
        for i, a in enumerate(pts):
            if any(a.distance(b) <= tol for b in pts[:i]):
                raise DegeneratePoints("points must be pairwise distinct")
    rng = np.random.default_rng(seed)
    cur = list(src)
    prog = AutomorphismProgram([])

    def move(i, target, stage):
        nonlocal cur, prog
        task = TransportTask(p, cur, i, target, tol, int(rng.integers(2 ** 31)))
        try:
            step = move_point(task, clearance)
        except (PlanningFailed, NewtonStalled, Exhausted) as exc:
            raise type(exc)(f"stage {stage}: {exc}") from None
        prog = prog + step
        cur, _ = run_program(step, cur, p)

    for j in range(len(src)):
        for k in range(j + 1, len(src)):
            if cur[k].distance(dst[j]) <= tol:
                park = _random_parking(p, cur + list(dst), rng, clearance)
                move(k, park, j)
        move(j, dst[j], j)
    return prog


def replay_check(prog, points, p):
    """Replay ``prog``; returns ``(images, ReplayLog)``."""
    return run_program(prog, points, p)


def multiplier_degrees(prog):
    out = set()
    for st in prog.steps:
        m = st.multiplier
        if isinstance(m, InterpPoly):
            out.update(d for d, c in enumerate(m.expanded()) if c != 0)
        elif m is not None:
            out.update(mono.degree for mono, _ in m.monomials())
        else:
            out.add(0)
    return out

