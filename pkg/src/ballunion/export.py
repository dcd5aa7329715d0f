"""File artifacts: family JSON, traced-curve polylines and clipped boundary meshes."""

from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .balls import BallLike, center_floats
from .claims import GammaTrace
from .construction import BallFamily


def family_json(fam: BallFamily) -> str:
    return fam.to_json()


def trace_obj(trace: GammaTrace) -> str:
    return trace.to_obj()


def _uv_sphere(center, radius: float, rings: int, segments: int):
    theta = np.linspace(0.0, np.pi, rings + 1)
    phi = np.linspace(0.0, 2 * np.pi, segments, endpoint=False)
    t, p = np.meshgrid(theta[1:-1], phi, indexing="ij")
    body = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1).reshape(-1, 3)
    verts = np.vstack([[0.0, 0.0, 1.0], body, [0.0, 0.0, -1.0]]) * radius + np.asarray(center)
    top, bottom = 0, len(verts) - 1

    def ring(r, s):
        return 1 + r * segments + s % segments

    tris = []
    for s in range(segments):
        tris.append((top, ring(0, s), ring(0, s + 1)))
        tris.append((bottom, ring(rings - 2, s + 1), ring(rings - 2, s)))
    for r in range(rings - 2):
        for s in range(segments):
            a, b = ring(r, s), ring(r, s + 1)
            c, d = ring(r + 1, s), ring(r + 1, s + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    return verts, np.array(tris)


def boundary_mesh(balls: Sequence[BallLike], rings: int = 48, segments: int = 96):
    """Triangulated sphere patches whose centroids lie outside every other ball.

    Clipping is per triangle in float64, so patch borders are jagged at the
    tessellation scale; the mesh is for viewing, not for counting.
    """
    centers = np.array([center_floats(b) for b in balls], dtype=float)
    radii = np.array([float(b.radius) for b in balls], dtype=float)
    all_v, all_t = [], []
    offset = 0
    for i in range(len(balls)):
        v, t = _uv_sphere(centers[i], radii[i], rings, segments)
        cent = v[t].mean(axis=1)
        keep = np.ones(len(t), dtype=bool)
        for j in range(len(balls)):
            if j != i:
                d = cent - centers[j]
                keep &= np.einsum("ij,ij->i", d, d) >= radii[j] ** 2
        t = t[keep]
        used = np.unique(t)
        remap = np.full(len(v), -1)
        remap[used] = np.arange(len(used)) + offset
        all_v.append(v[used])
        all_t.append(remap[t])
        offset += len(used)
    verts = np.vstack(all_v) if all_v else np.zeros((0, 3))
    tris = np.vstack(all_t) if all_t else np.zeros((0, 3), dtype=int)
    return verts, tris


def mesh_obj(verts, tris) -> str:
    buf = io.StringIO()
    buf.write("# union boundary patches\n")
    for x, y, z in verts:
        buf.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
    for a, b, c in tris:
        buf.write(f"f {a + 1} {b + 1} {c + 1}\n")
    return buf.getvalue()
