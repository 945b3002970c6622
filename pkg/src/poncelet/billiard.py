"""Billiard inside the ellipse x^2/a + y^2/b = 1.

The simulator is the geometric check for every algebraic condition: it
reflects with the gradient normal, re-projects each vertex onto the boundary,
counts reflections (m0) and crossings of the y-axis (m1), and detects closure
on the joint state (vertex, direction).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .conics import CausticKind, CausticParam, ConfocalFamily, DegenerateCaustic, caustic_of_line, elliptic_coords

BOUNDARY_TOL = 1e-10
CLOSURE_TOL = 1e-8
PROJECTION_LIMIT = 1e-11


class PointNotOnBoundary(ValueError):
    pass


class TangentRay(ValueError):
    pass


class NoIntersection(ValueError):
    pass


@dataclass
class Trajectory:
    vertices: np.ndarray
    directions: np.ndarray
    segment_caustics: np.ndarray
    m0: int
    m1: int
    closure_residual: float
    closed: bool
    cumulative_m1: np.ndarray
    max_projection: float = 0.0
    family: Optional[ConfocalFamily] = field(default=None, repr=False)

    @property
    def winding(self) -> tuple[int, int]:
        return self.m0, self.m1


def boundary_value(family: ConfocalFamily, point) -> float:
    return point[0] ** 2 / family.a + point[1] ** 2 / family.b - 1.0


def unit_normal(family: ConfocalFamily, point) -> np.ndarray:
    n = np.array([point[0] / family.a, point[1] / family.b])
    return n / np.linalg.norm(n)


def reflect(family: ConfocalFamily, point, incoming) -> np.ndarray:
    """Mirror the incoming direction in the tangent line at a boundary point."""
    point = np.asarray(point, dtype=float)
    incoming = np.asarray(incoming, dtype=float)
    if abs(boundary_value(family, point)) > BOUNDARY_TOL:
        raise PointNotOnBoundary(f"{point} is not on the boundary")
    n = unit_normal(family, point)
    return incoming - 2.0 * np.dot(incoming, n) * n


def _chord_parameters(family: ConfocalFamily, point, direction):
    """Roots of |point + t direction| on the boundary, as (A, B, C, disc)."""
    px, py = point
    dx, dy = direction
    A = dx * dx / family.a + dy * dy / family.b
    B = 2.0 * (px * dx / family.a + py * dy / family.b)
    C = px * px / family.a + py * py / family.b - 1.0
    return A, B, C, B * B - 4.0 * A * C


def _project(family: ConfocalFamily, q: np.ndarray) -> tuple[np.ndarray, float]:
    """One Newton step along the gradient onto the boundary."""
    g = np.array([2.0 * q[0] / family.a, 2.0 * q[1] / family.b])
    delta = boundary_value(family, q) * g / np.dot(g, g)
    return q - delta, float(np.linalg.norm(delta))


def _next_point(family: ConfocalFamily, point, direction) -> tuple[np.ndarray, float]:
    A, B, C, disc = _chord_parameters(family, point, direction)
    scale = max(abs(B), 1e-300)
    if disc <= (1e-14 * scale) ** 2 or abs(B) < 1e-14:
        raise TangentRay("ray is tangent to the boundary")
    root = math.sqrt(disc)
    q = -0.5 * (B + math.copysign(root, B))
    t = max(q / A, C / q)
    if t <= 1e-12:
        raise TangentRay("no forward intersection")
    return _project(family, np.asarray(point, dtype=float) + t * np.asarray(direction, dtype=float))


def step(family: ConfocalFamily, point, direction) -> tuple[np.ndarray, np.ndarray]:
    """Travel to the next boundary point and reflect there."""
    nxt, _ = _next_point(family, point, direction)
    return nxt, reflect(family, nxt, direction)


def _sign(x: float, tol: float) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def simulate(family: ConfocalFamily, start, direction, max_bounces: int,
             stop_at_closure: bool = True) -> Trajectory:
    """Iterate the billiard map from a boundary point moving into the ellipse."""
    if max_bounces < 1:
        raise ValueError("max_bounces must be at least 1")
    p0 = np.asarray(start, dtype=float)
    if abs(boundary_value(family, p0)) > BOUNDARY_TOL:
        raise PointNotOnBoundary(f"{p0} is not on the boundary")
    d0 = np.asarray(direction, dtype=float)
    d0 = d0 / np.linalg.norm(d0)

    xtol = 1e-9 * math.sqrt(family.a)
    vertices = [p0]
    directions = [d0]
    caustics = []
    cumulative = [0]
    last_sign = _sign(p0[0], xtol)
    m1 = 0
    p, d = p0, d0
    residual = math.inf
    closed = False
    max_proj = 0.0
    for _ in range(max_bounces):
        caustics.append(caustic_of_line(family, p, d).lambda0)
        q, moved = _next_point(family, p, d)
        max_proj = max(max_proj, moved)
        d = reflect(family, q, d)
        p = q
        s = _sign(p[0], xtol)
        if s != 0:
            if last_sign != 0 and s != last_sign:
                m1 += 1
            last_sign = s
        vertices.append(p)
        directions.append(d)
        cumulative.append(m1)
        residual = float(np.linalg.norm(p - p0) + np.linalg.norm(d - d0))
        if residual < CLOSURE_TOL:
            closed = True
            if stop_at_closure:
                break
    return Trajectory(
        vertices=np.array(vertices),
        directions=np.array(directions),
        segment_caustics=np.array(caustics),
        m0=len(vertices) - 1,
        m1=m1,
        closure_residual=residual,
        closed=closed,
        cumulative_m1=np.array(cumulative),
        max_projection=max_proj,
        family=family,
    )


def hyperbola_phase_limit(family: ConfocalFamily, lambda0: float) -> float:
    """Hyperbolic parameter where the caustic branch meets the boundary."""
    return math.asinh(math.sqrt(family.b / (family.a - family.b)))


def launch_tangent(family: ConfocalFamily, caustic: CausticParam, phase: float) -> tuple[np.ndarray, np.ndarray]:
    """Boundary point and direction along the tangent to the caustic at ``phase``.

    Ellipse caustics use (A cos t, B sin t); hyperbola caustics use the branch
    with positive x, (A cosh t, B sinh t).  The start is the boundary point
    behind the tangency point, so the direction is the tangent vector.
    """
    a, b, lam = family.a, family.b, caustic.lambda0
    if caustic.kind is CausticKind.ELLIPSE:
        A, B = math.sqrt(a - lam), math.sqrt(b - lam)
        P = np.array([A * math.cos(phase), B * math.sin(phase)])
        T = np.array([-A * math.sin(phase), B * math.cos(phase)])
    elif caustic.kind is CausticKind.HYPERBOLA:
        A, B = math.sqrt(a - lam), math.sqrt(lam - b)
        P = np.array([A * math.cosh(phase), B * math.sinh(phase)])
        T = np.array([A * math.sinh(phase), B * math.cosh(phase)])
    else:
        raise DegenerateCaustic(f"cannot launch along a {caustic.kind.value} caustic")
    T = T / np.linalg.norm(T)
    qa, qb, qc, disc = _chord_parameters(family, P, T)
    if disc <= 0:
        raise NoIntersection("tangent line misses the boundary")
    t1 = (-qb - math.sqrt(disc)) / (2.0 * qa)
    start, _ = _project(family, P + t1 * T)
    return start, T


def default_phases(family: ConfocalFamily, caustic: CausticParam, count: int = 8) -> np.ndarray:
    """Equispaced phases: a full turn for ellipses, the inner arc for hyperbolas."""
    if caustic.kind is CausticKind.ELLIPSE:
        return 2.0 * math.pi * (np.arange(count) + 0.25) / count
    lim = hyperbola_phase_limit(family, caustic.lambda0)
    return lim * (2.0 * (np.arange(count) + 0.5) / count - 1.0)


def validate_solution(family: ConfocalFamily, solution, phase: Optional[float] = None) -> bool:
    """Simulate one trajectory of a caustic solution and compare period and winding."""
    caustic = solution.caustic
    if phase is None:
        phase = float(default_phases(family, caustic, 8)[1])
    start, direction = launch_tangent(family, caustic, phase)
    traj = simulate(family, start, direction, max_bounces=solution.n + 1)
    return bool(traj.closed and traj.m0 == solution.n and traj.winding == tuple(solution.winding))


_SYMMETRIES = {
    "origin": np.array([-1.0, -1.0]),
    "x-axis": np.array([1.0, -1.0]),
    "y-axis": np.array([-1.0, 1.0]),
}


def symmetries(traj: Trajectory, tol: float = 1e-7) -> set[str]:
    """Reflections/rotation of the plane that map the closed polygon's vertex set to itself."""
    pts = traj.vertices[:-1] if traj.closed else traj.vertices
    found = set()
    for name, flip in _SYMMETRIES.items():
        image = pts * flip
        dist = np.linalg.norm(image[:, None, :] - pts[None, :, :], axis=-1)
        if np.all(dist.min(axis=1) < tol):
            found.add(name)
    return found


def elliptic_return(traj: Trajectory, k: int, tol: float = 1e-8) -> bool:
    """Whether the state after k bounces has the initial elliptic coordinates.

    Equal elliptic coordinates means the vertex is the image of the initial
    vertex under an axis reflection; the direction must follow the same map.
    """
    p0, d0 = traj.vertices[0], traj.directions[0]
    pk, dk = traj.vertices[k], traj.directions[k]
    family = traj.family
    if family is not None:
        e0 = elliptic_coords(family, p0)
        ek = elliptic_coords(family, pk)
        if abs(e0.lambda1 - ek.lambda1) > tol or abs(e0.lambda2 - ek.lambda2) > tol:
            return False
    for flip in ([1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]):
        flip = np.array(flip)
        if np.linalg.norm(pk - flip * p0) < tol and np.linalg.norm(dk - flip * d0) < tol:
            return True
    return False


def first_elliptic_return(traj: Trajectory, tol: float = 1e-8) -> Optional[int]:
    for k in range(1, len(traj.vertices)):
        if elliptic_return(traj, k, tol):
            return k
    return None


def to_csv(traj: Trajectory) -> str:
    """CSV with columns index, x, y, segment_caustic, cumulative_m1."""
    buf = io.StringIO()
    buf.write("index,x,y,segment_caustic,cumulative_m1\n")
    for i, (x, y) in enumerate(traj.vertices):
        lam = traj.segment_caustics[i] if i < len(traj.segment_caustics) else float("nan")
        buf.write(f"{i},{x:.17g},{y:.17g},{lam:.17g},{traj.cumulative_m1[i]}\n")
    return buf.getvalue()


def _conic_path(points: np.ndarray, scale: float, closed: bool) -> str:
    coords = " ".join(f"{x * scale:.6f},{-y * scale:.6f}" for x, y in points)
    return f"M {coords}" + (" Z" if closed else "")


def to_svg(traj: Trajectory, family: ConfocalFamily, caustic: Optional[CausticParam] = None,
           size: int = 480) -> str:
    """SVG drawing of the boundary, the caustic and the trajectory polygon."""
    ra, rb = math.sqrt(family.a), math.sqrt(family.b)
    scale = 0.45 * size / ra
    t = np.linspace(0.0, 2.0 * math.pi, 361)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{-size / 2} {-size / 2} {size} {size}">',
        f'<path d="{_conic_path(np.c_[ra * np.cos(t), rb * np.sin(t)], scale, True)}" '
        'fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    if caustic is not None and caustic.kind is CausticKind.ELLIPSE:
        ca, cb = math.sqrt(family.a - caustic.lambda0), math.sqrt(family.b - caustic.lambda0)
        parts.append(f'<path d="{_conic_path(np.c_[ca * np.cos(t), cb * np.sin(t)], scale, True)}" '
                     'fill="none" stroke="steelblue" stroke-dasharray="4 3"/>')
    elif caustic is not None and caustic.kind is CausticKind.HYPERBOLA:
        ca, cb = math.sqrt(family.a - caustic.lambda0), math.sqrt(caustic.lambda0 - family.b)
        lim = hyperbola_phase_limit(family, caustic.lambda0)
        u = np.linspace(-lim, lim, 121)
        for sgn in (1.0, -1.0):
            branch = np.c_[sgn * ca * np.cosh(u), cb * np.sinh(u)]
            parts.append(f'<path d="{_conic_path(branch, scale, False)}" '
                         'fill="none" stroke="steelblue" stroke-dasharray="4 3"/>')
    parts.append(f'<path d="{_conic_path(traj.vertices, scale, traj.closed)}" '
                 'fill="none" stroke="firebrick" stroke-width="1"/>')
    for x, y in traj.vertices:
        parts.append(f'<circle cx="{x * scale:.6f}" cy="{-y * scale:.6f}" r="2.5" fill="firebrick"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
