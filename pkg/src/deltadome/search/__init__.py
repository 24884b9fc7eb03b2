"""Template search: an empirical, one-sided oracle for dome existence.

A found dome is verified; not finding one is evidence only, never a proof.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import BudgetExceeded
from ..geom import DEFAULT_TOL, Tolerances
from ..mesh import Mesh, triangulate_units
from ..polygon import PolygonSpec
from ..verifier import AuditReport, verify_full
from .embed import EmbeddingResult, embed_template, template_mesh
from .templates import BoundaryLayout, DomeTemplate, boundary_layout, enumerate_templates

__all__ = [
    "DomeTemplate",
    "BoundaryLayout",
    "boundary_layout",
    "enumerate_templates",
    "embed_template",
    "template_mesh",
    "EmbeddingResult",
    "SearchBudget",
    "SearchOutcome",
    "search_dome",
    "template_from_mesh",
]


@dataclass(frozen=True)
class SearchBudget:
    max_dome_vertices: int = 6
    max_flat: int = 6
    max_templates: int = 10**7
    restarts: int = 50
    seed: int = 0
    relaxed: bool | None = None
    time_limit: float = 1800.0
    eps_embed: float = 1e-10


@dataclass
class SearchOutcome:
    found: Mesh | None
    templates_tried: int
    embeddings_tried: int = 0
    template: DomeTemplate | None = None
    best_residual: float = float("inf")
    budget_exceeded: bool = False
    timed_out: bool = False
    elapsed: float = 0.0
    certified: bool = False
    note: str = "empirical: a negative outcome is not a nonexistence proof"

    def to_json(self) -> dict:
        return {
            "found": self.found is not None,
            "mesh": self.found.to_json() if self.found is not None else None,
            "template": self.template.to_json() if self.template is not None else None,
            "templates_tried": self.templates_tried,
            "embeddings_tried": self.embeddings_tried,
            "best_residual": None if not np.isfinite(self.best_residual) else self.best_residual,
            "budget_exceeded": self.budget_exceeded,
            "timed_out": self.timed_out,
            "elapsed_s": round(self.elapsed, 3),
            "certified": self.certified,
            "note": self.note,
        }


def search_dome(
    spec: PolygonSpec,
    budget: SearchBudget = SearchBudget(),
    tol: Tolerances = DEFAULT_TOL,
    accept: Callable[[AuditReport], bool] | None = None,
) -> SearchOutcome:
    """Try templates in enumeration order; return the first verified dome.

    ``accept`` narrows what counts as a hit (for instance a required
    V3/V4/V5 profile); rejected domes are skipped and the search goes on.
    """
    start = time.monotonic()
    out = SearchOutcome(None, 0)
    stream = enumerate_templates(
        spec,
        budget.max_dome_vertices,
        max_flat=budget.max_flat,
        relaxed=budget.relaxed,
        max_templates=budget.max_templates,
    )
    try:
        for template in stream:
            if time.monotonic() - start > budget.time_limit:
                out.timed_out = True
                break
            out.templates_tried += 1
            res = embed_template(template, spec, restarts=budget.restarts, seed=budget.seed,
                                 eps_embed=budget.eps_embed, tol=tol)
            out.embeddings_tried += res.restarts_used
            out.best_residual = min(out.best_residual, res.residual)
            if res.mesh is not None:
                if accept is not None and not accept(verify_full(res.mesh, spec, tol)):
                    continue
                out.found, out.template = res.mesh, template
                break
    except BudgetExceeded:
        out.budget_exceeded = True
    out.elapsed = time.monotonic() - start
    return out


def template_from_mesh(mesh: Mesh, tol: Tolerances = DEFAULT_TOL) -> tuple[DomeTemplate, np.ndarray]:
    """Unit-triangle template of an existing dome plus its interior coordinates.

    The base loop is re-ordered counter-clockwise from +z and rotated so its
    first point is base vertex 0 of the mesh, matching ``boundary_layout``.
    """
    tri = triangulate_units(mesh, tol)
    loop = list(reversed(tri.faces[tri.base_face]))
    first = int(np.argmin(np.linalg.norm(tri.vertices[loop], axis=1)))
    loop = loop[first:] + loop[:first]
    interior = [v for v in range(tri.n_vertices) if v not in set(loop)]
    used = {v for fi, f in enumerate(tri.faces) if fi != tri.base_face for v in f}
    interior = [v for v in interior if v in used]
    remap = {v: k for k, v in enumerate(loop + interior)}
    tris = []
    for fi, f in enumerate(tri.faces):
        if fi == tri.base_face:
            continue
        tris.append(tuple(remap[v] for v in f))
    template = DomeTemplate(len(loop), len(interior), tuple(tris))
    return template, tri.vertices[interior]
