"""Numerical realization of a template with unit edges."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.sparse.csgraph import shortest_path
from scipy.sparse import coo_matrix

from ..errors import DidNotConverge, DomeError
from ..geom import DEFAULT_TOL, Tolerances
from ..mesh import Mesh, make_mesh
from ..polygon import PolygonSpec
from ..verifier import verify_full
from .templates import DomeTemplate, boundary_layout

__all__ = ["EmbeddingResult", "embed_template", "template_mesh"]


@dataclass
class EmbeddingResult:
    mesh: Mesh | None
    residual: float
    restarts_used: int
    coordinates: np.ndarray | None  # interior vertex positions of the best attempt


def _depths(template: DomeTemplate) -> np.ndarray:
    """Graph distance of every interior vertex from the boundary."""
    B, n = template.n_boundary, template.n_boundary + template.n_interior
    edges = np.array(template.edges())
    g = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    dist = shortest_path(g, directed=False, unweighted=True, indices=list(range(B)))
    return dist.min(axis=0)[B:]


def _tutte_cap(template: DomeTemplate, base: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric planar layout of the interior, plus a normalized cap height."""
    B, m = template.n_boundary, template.n_interior
    L = np.zeros((m, m))
    rhs = np.zeros((m, 2))
    for a, b in template.edges():
        for u, v in ((a, b), (b, a)):
            if u < B:
                continue
            L[u - B, u - B] += 1.0
            if v >= B:
                L[u - B, v - B] -= 1.0
            else:
                rhs[u - B] += base[v, :2]
    xy = np.linalg.solve(L, rhs)
    centroid = base[:, :2].mean(axis=0)
    R = float(np.max(np.linalg.norm(base[:, :2] - centroid, axis=1)))
    r = np.linalg.norm(xy - centroid, axis=1) / R
    return xy, np.sqrt(np.clip(1.0 - r * r, 0.05, 1.0))


def _near_flat_pairs(template: DomeTemplate, p: np.ndarray, cutoff_deg: float):
    """Adjacent triangle pairs (a, b, c, d) whose fold is within cutoff of flat."""
    owner = {}
    for t in template.triangles:
        for k in range(3):
            owner[(t[k], t[(k + 1) % 3])] = t[(k + 2) % 3]
    out = []
    for (a, b), c in owner.items():
        d = owner.get((b, a))
        if d is None or a > b:
            continue
        n1 = np.cross(p[b] - p[a], p[c] - p[a])
        n2 = np.cross(p[a] - p[b], p[d] - p[b])
        ang = np.degrees(np.arctan2(np.linalg.norm(np.cross(n1, n2)), n1 @ n2))
        if ang < cutoff_deg:
            out.append((a, b, c, d))
    return np.array(out, dtype=int).reshape(-1, 4)


def _snap_flat(template, base, x, edges, cutoff_deg=1e-3):
    """Second solve with exact coplanarity for nearly flat folds.

    Degree-6 flat vertices are infinitesimally flexible, so a unit-edge
    solution can carry tiny spurious folds; pinning them removes the flex.
    """
    m = template.n_interior
    p0 = np.vstack([base, x])
    quads = _near_flat_pairs(template, p0, cutoff_deg)
    if len(quads) == 0:
        return x

    def resid(z):
        p = np.vstack([base, z.reshape(m, 3)])
        r1 = np.linalg.norm(p[edges[:, 0]] - p[edges[:, 1]], axis=1) - 1.0
        a, b, c, d = (p[quads[:, k]] for k in range(4))
        r2 = np.einsum("ij,ij->i", np.cross(b - a, c - a), d - a)
        return np.concatenate([r1, r2])

    sol = least_squares(resid, x.reshape(-1), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=500 * (3 * m + 1))
    return sol.x.reshape(m, 3)


def template_mesh(template: DomeTemplate, base_points: np.ndarray, interior: np.ndarray,
                  tol: Tolerances = DEFAULT_TOL) -> Mesh:
    """Mesh with merged coplanar faces from a realized template."""
    verts = np.vstack([base_points, interior])
    base = tuple(reversed(range(template.n_boundary)))
    faces = [base] + [tuple(t) for t in template.triangles]
    return make_mesh(verts, faces, 0, orient=False, merge=True, tol=tol)


def embed_template(
    template: DomeTemplate,
    spec: PolygonSpec,
    *,
    restarts: int = 50,
    seed: int = 0,
    eps_embed: float = 1e-10,
    initial: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOL,
    raise_on_failure: bool = False,
) -> EmbeddingResult:
    """Solve for interior positions with every template edge of unit length.

    Runs Levenberg-Marquardt from ``initial`` (if given) and then from random
    starts above the base. A solution counts only when its largest residual is
    below ``eps_embed`` and the merged mesh passes the full verifier.
    """
    layout = boundary_layout(spec)
    base = layout.points
    B, m = template.n_boundary, template.n_interior
    edges = np.array([e for e in template.edges() if max(e) >= B], dtype=int)
    rng = np.random.default_rng([seed, template.index])

    if m == 0:
        return EmbeddingResult(None, float("inf"), 0, None)

    def positions(x):
        return np.vstack([base, x.reshape(m, 3)])

    def resid(x):
        p = positions(x)
        return np.linalg.norm(p[edges[:, 0]] - p[edges[:, 1]], axis=1) - 1.0

    rows = np.arange(len(edges))

    def jac(x):
        p = positions(x)
        d = p[edges[:, 0]] - p[edges[:, 1]]
        d /= np.maximum(np.linalg.norm(d, axis=1), 1e-300)[:, None]
        J = np.zeros((len(edges), 3 * m))
        for side, sign in ((0, 1.0), (1, -1.0)):
            v = edges[:, side]
            mask = v >= B
            for k in range(3):
                J[rows[mask], 3 * (v[mask] - B) + k] = sign * d[mask, k]
        return J

    method = "lm" if len(edges) >= 3 * m else "trf"
    centroid = base.mean(axis=0)
    spread = float(np.max(np.linalg.norm(base - centroid, axis=1)))
    depth = _depths(template)
    xy, cap = _tutte_cap(template, base)

    best_res, best_x = float("inf"), None
    starts = ([initial.reshape(-1)] if initial is not None else [])
    used = 0
    for attempt in range(restarts + len(starts)):
        if attempt < len(starts):
            x0 = starts[attempt]
        else:
            # convex-ish start: barycentric layout lifted onto a cap, jittered
            k = attempt - len(starts)
            x0 = np.empty((m, 3))
            jitter = 0.0 if k == 0 else 0.15 * min(1.0, k / 10.0) * spread
            x0[:, :2] = xy + rng.normal(0.0, jitter + 1e-3, (m, 2))
            height = rng.uniform(0.4, 1.2) * spread if k else 0.8 * spread
            x0[:, 2] = height * cap * rng.uniform(0.8, 1.2, m) + 0.05 * depth
            x0 = x0.reshape(-1)
        used += 1
        try:
            sol = least_squares(resid, x0, jac=jac, method=method, xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=2000)
        except (ValueError, np.linalg.LinAlgError):
            continue
        res = float(np.max(np.abs(sol.fun))) if len(sol.fun) else 0.0
        if res < best_res:
            best_res, best_x = res, sol.x.copy()
        if res >= eps_embed:
            continue
        x = sol.x.reshape(m, 3)
        if template.flat_count:
            x = _snap_flat(template, base, x, edges)
            res = float(np.max(np.abs(resid(x.reshape(-1)))))
            if res >= eps_embed:
                continue
        if np.any(x[:, 2] <= tol.eps_verify):
            continue
        try:
            mesh = template_mesh(template, base, x, tol)
        except DomeError:
            continue
        if verify_full(mesh, spec, tol).passed:
            return EmbeddingResult(mesh, res, used, x)
    if raise_on_failure:
        raise DidNotConverge(best_res)
    coords = None if best_x is None else best_x.reshape(m, 3)
    return EmbeddingResult(None, best_res, used, coords)
