"""Discretization of profile curves and swept tori, plus bit-exact exporters.

Meshes keep the (s, t) grid structure as quads and identify both seams by
index wraparound, so every emitted torus has Euler characteristic 0.
Exports are deterministic: 17-significant-digit OBJ, comma/LF CSV, and
insertion-ordered JSON.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import immersion as im
from . import spherical_family as sf
from .errors import DomainError, IoError, RicciLabError, SeamMismatch
from .immersion import ClosureResult, ProfileCurve
from .spherical_family import Classification, SphericalParams

__all__ = [
    "SurfaceMesh",
    "build_profile",
    "build_surface_mesh",
    "euler_characteristic",
    "export_obj",
    "export_csv",
    "export_json",
    "scan_theta",
    "SCAN_CSV_FIELDS",
]

SEAM_TOL = 1e-6


def _profile_span(params: SphericalParams, closure: ClosureResult) -> float:
    """s-extent of one closed circuit of the profile curve.

    For the constant (Clifford-like) solutions f has no fundamental period;
    the circuit is the circle theta in [0, 2 pi p), traversed at the constant
    rate theta'.
    """
    if params.classification is Classification.BOUNDARY_CONSTANT:
        rate = float(im.theta_rate(params, 0.0))
        return 2.0 * math.pi * closure.p / rate
    return closure.q * params.period


def build_profile(params: SphericalParams, closure: ClosureResult,
                  Ns: int) -> ProfileCurve:
    """Uniform-s discretization of the closed profile curve.

    Raises SeamMismatch when the endpoint fails to wrap back onto the start
    (the signature of an ell that does not actually close the curve).
    """
    if closure is None:
        raise DomainError("build_profile needs a closure result")
    if Ns < 16 * closure.q:
        raise DomainError(f"Ns={Ns} too coarse; need at least {16 * closure.q}")
    s_total = _profile_span(params, closure)
    s = np.linspace(0.0, s_total, Ns, endpoint=False)
    thetas = im.theta_grid(params, s)
    f = sf.f_closed(params, s)[0]
    r = np.sqrt(np.maximum(1.0 / params.c - f * f, 0.0))
    points = np.stack(
        [r * np.cos(thetas), r * np.sin(thetas), f, np.zeros_like(f)], axis=1
    )

    theta_end = im.theta(params, s_total)
    end_point = im.profile_point(params, s_total, theta_value=theta_end)
    gap = float(np.linalg.norm(end_point - points[0]))
    if gap > SEAM_TOL:
        raise SeamMismatch(
            f"profile endpoint misses its start by {gap:.3e} "
            f"(theta advance {theta_end} vs 2*pi*{closure.p})"
        )
    winding = {"p": closure.p, "q": closure.q, "gap": gap,
               "theta_total": theta_end, "s_total": s_total}
    return ProfileCurve(s=s, theta=thetas, points=points,
                        closure=closure, winding=winding)


@dataclass
class SurfaceMesh:
    """Quad mesh of the swept surface, seam-wrapped in both directions."""

    vertices: np.ndarray  # (Ns*Nt, 3) projected or (Ns*Nt, 4) ambient
    faces: np.ndarray     # (Ns*Nt, 4) 0-based quad indices
    ns: int
    nt: int
    provenance: dict = field(default_factory=dict)


def build_surface_mesh(params: SphericalParams, closure: ClosureResult,
                       Ns: int, Nt: int, projection: str | None = None
                       ) -> SurfaceMesh:
    """Sweep the profile curve through t in [0, 2 pi) on an Ns x Nt grid.

    projection=None keeps ambient R^4 coordinates; "stereographic" maps to R^3.
    """
    if Nt < 4:
        raise DomainError(f"Nt={Nt} too coarse; quads need Nt >= 4")
    prof = build_profile(params, closure, Ns)
    t = np.linspace(0.0, 2.0 * math.pi, Nt, endpoint=False)
    x, y, z = prof.points[:, 0], prof.points[:, 1], prof.points[:, 2]
    verts = np.empty((Ns * Nt, 4))
    ct, st = np.cos(t), np.sin(t)
    for i in range(Ns):
        base = i * Nt
        verts[base:base + Nt, 0] = x[i]
        verts[base:base + Nt, 1] = y[i]
        verts[base:base + Nt, 2] = z[i] * ct
        verts[base:base + Nt, 3] = z[i] * st

    if projection == "stereographic":
        verts = np.array([im.stereographic(v, params.c) for v in verts])
    elif projection is not None:
        raise DomainError(f"unknown projection {projection!r}")

    faces = np.empty((Ns * Nt, 4), dtype=np.int64)
    k = 0
    for i in range(Ns):
        i2 = (i + 1) % Ns
        for j in range(Nt):
            j2 = (j + 1) % Nt
            faces[k] = (i * Nt + j, i2 * Nt + j, i2 * Nt + j2, i * Nt + j2)
            k += 1

    prov = {"c": params.c, "m": params.m, "ell": params.ell,
            "p": closure.p, "q": closure.q,
            "projection": projection, "ns": Ns, "nt": Nt}
    return SurfaceMesh(vertices=verts, faces=faces, ns=Ns, nt=Nt,
                       provenance=prov)


def euler_characteristic(mesh: SurfaceMesh) -> int:
    """V - E + F with edges deduplicated across faces."""
    edges = set()
    for face in mesh.faces:
        n = len(face)
        for k in range(n):
            a, b = int(face[k]), int(face[(k + 1) % n])
            edges.add((a, b) if a < b else (b, a))
    return mesh.vertices.shape[0] - len(edges) + mesh.faces.shape[0]


def _open_sink(sink, mode="w"):
    if hasattr(sink, "write"):
        return sink, False
    try:
        return open(sink, mode, newline=""), True
    except OSError as exc:
        raise IoError(str(exc)) from exc


def export_obj(mesh: SurfaceMesh, sink) -> None:
    """Wavefront OBJ: 17-significant-digit vertices, 1-indexed quad faces."""
    fh, own = _open_sink(sink)
    try:
        for v in mesh.vertices:
            fh.write("v " + " ".join(f"{x:.17g}" for x in v) + "\n")
        for face in mesh.faces:
            fh.write("f " + " ".join(str(int(i) + 1) for i in face) + "\n")
    finally:
        if own:
            fh.close()


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def export_csv(rows, fieldnames, sink) -> None:
    """Comma-separated, '.' decimals, LF line endings, shortest float repr."""
    fh, own = _open_sink(sink)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_csv_cell(row.get(k)) for k in fieldnames])
    finally:
        if own:
            fh.close()


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def export_json(record, sink) -> None:
    """Insertion-ordered JSON with shortest round-trip number rendering."""
    fh, own = _open_sink(sink)
    try:
        json.dump(record, fh, indent=2, default=_json_default)
        fh.write("\n")
    finally:
        if own:
            fh.close()


SCAN_CSV_FIELDS = ("m", "ell", "Theta", "closed", "p", "q", "embedded")


def _scan_cell(c, m, ell, closure_tol, q_max):
    row = {"m": m, "ell": ell, "Theta": None, "closed": False,
           "p": None, "q": None, "embedded": False,
           "status": "ok", "near_lower": False, "near_upper": False}
    cls = sf.classify(c, m, ell)
    if cls is Classification.OUTSIDE:
        row["status"] = "outside"
        return row
    if cls is Classification.INTERIOR_LAMBDA:
        row["status"] = "not_immersible"
        return row
    lower = math.sqrt(c * m)
    upper = (c * m + 1.0) / 2.0
    width = upper - lower
    row["near_lower"] = (ell - lower) < 0.05 * width
    row["near_upper"] = (upper - ell) < 0.05 * width
    try:
        theta_total = im.big_theta(SphericalParams(c=c, m=m, ell=ell))
    except RicciLabError as exc:
        row["status"] = type(exc).__name__
        return row
    row["Theta"] = theta_total
    closure = im.detect_closure(theta_total, q_max=q_max, tol=closure_tol)
    if closure is not None:
        row.update(closed=True, p=closure.p, q=closure.q,
                   embedded=closure.embedded)
    return row


def scan_theta(c, m_range, ell_range, resolution, closure_tol=1e-8,
               q_max=50):
    """Theta/closure table over an (m, ell) grid; failures become row codes.

    Grid cells outside the immersible set are kept with a reason code rather
    than aborting the scan.  Parallelism is capped by RICCI_LAB_THREADS.
    """
    if isinstance(resolution, int):
        nm = nell = resolution
    else:
        nm, nell = resolution
    ms = np.linspace(m_range[0], m_range[1], nm)
    ells = np.linspace(ell_range[0], ell_range[1], nell)
    cells = [(float(m), float(ell)) for m in ms for ell in ells]

    threads = int(os.environ.get("RICCI_LAB_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(
                lambda me: _scan_cell(c, me[0], me[1], closure_tol, q_max),
                cells))
    else:
        rows = [_scan_cell(c, m, ell, closure_tol, q_max) for m, ell in cells]
    return rows
