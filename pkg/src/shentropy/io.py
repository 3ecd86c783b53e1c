"""File formats: field CSV + JSON sidecar, coefficient JSON, spectrum and SHE CSVs.

Floats are written with ``repr`` (shortest round-trip form, at most 17
significant digits), so every writer/reader pair is lossless at 64 bits.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .basis import lm_pairs, n_coefficients
from .entropy import SheCurve
from .errors import DomainError, FileFormatError
from .grid import SphereGrid
from .transform import CoefficientPyramid, SampledSphericalField, real_pairs

__all__ = [
    "FORMAT_VERSION",
    "read_field",
    "read_input",
    "read_pyramid",
    "sidecar_path",
    "write_bench",
    "write_field",
    "write_json",
    "write_pyramid",
    "write_she_curve",
    "write_spectrum",
]

FORMAT_VERSION = 1
CONVENTION = "complex-CS"
ORDERING = "l-major"


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def write_field(path, field: SampledSphericalField) -> None:
    path = Path(path)
    grid = field.grid
    header = ["theta", "phi", "weight"] + [f"v{c}" for c in range(field.channels)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, p, wt, vals in zip(grid.node_thetas, grid.node_phis, grid.node_weights, field.values):
            w.writerow([repr(float(t)), repr(float(p)), repr(float(wt))] + [repr(float(v)) for v in vals])
    write_json(sidecar_path(path), {
        "format_version": FORMAT_VERSION,
        "kind": grid.kind,
        "params": grid.params,
        "n_theta": grid.shape[0],
        "n_phi": grid.shape[1],
        "channels": field.channels,
    })


def _load_sidecar(path: Path) -> dict | None:
    side = sidecar_path(path)
    if not side.exists():
        return None
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc.msg}", side, exc.lineno) from exc
    if meta.get("format_version") != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format_version {meta.get('format_version')!r}", side)
    return meta


def read_field(path) -> SampledSphericalField:
    path = Path(path)
    meta = _load_sidecar(path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError("empty file", path, 1) from None
        head = [h.strip() for h in header]
        if head[:3] != ["theta", "phi", "weight"] or len(head) not in (4, 6) or head[3:] != [
            f"v{c}" for c in range(len(head) - 3)
        ]:
            raise FileFormatError(f"bad header {header!r}; expected theta,phi,weight,v0[,v1,v2]", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(head):
                raise FileFormatError(f"row has {len(row)} fields, expected {len(head)}", path, lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise FileFormatError(f"non-numeric value: {exc}", path, lineno) from None
    if not rows:
        raise FileFormatError("no data rows", path)
    data = np.array(rows)
    if meta is not None:
        n_theta, n_phi = int(meta["n_theta"]), int(meta["n_phi"])
        kind, params = meta["kind"], meta.get("params", {})
    else:
        n_phi = int(np.argmax(data[:, 0] != data[0, 0])) or len(data)
        n_theta = len(data) // n_phi
        kind, params = "external", {}
    if n_theta * n_phi != len(data):
        raise FileFormatError(f"{len(data)} data rows do not form a {n_theta}x{n_phi} grid", path)
    thetas = data[::n_phi, 0]
    phis = data[:n_phi, 1]
    for k in range(len(data)):
        i, j = divmod(k, n_phi)
        if data[k, 0] != thetas[i] or data[k, 1] != phis[j]:
            raise FileFormatError("node is not on the theta-major product grid", path, k + 2)
    try:
        grid = SphereGrid(kind, thetas, phis, data[:, 2].reshape(n_theta, n_phi), params)
        grid.check_weight_sum()
    except DomainError as exc:
        raise FileFormatError(f"grid validation failed: {exc}", path) from None
    return SampledSphericalField(grid, data[:, 3:])


def write_pyramid(path, pyramid: CoefficientPyramid, include_real_pairs: bool = False) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "L": pyramid.L,
        "channels": pyramid.channels,
        "convention": CONVENTION,
        "ordering": ORDERING,
        "coeffs": [[float(c.real), float(c.imag)] for c in pyramid.coeffs.ravel()],
    }
    if include_real_pairs:
        doc["real_pairs"] = [
            [c, l, m, a, b] for c in range(pyramid.channels) for l, m, a, b in real_pairs(pyramid, c)
        ]
    write_json(path, doc)


def read_pyramid(path) -> CoefficientPyramid:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from exc
    for key in ("format_version", "L", "channels", "convention", "ordering", "coeffs"):
        if key not in doc:
            raise FileFormatError(f"missing field {key!r}", path)
    if doc["format_version"] != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format_version {doc['format_version']!r}", path)
    if doc["convention"] != CONVENTION or doc["ordering"] != ORDERING:
        raise FileFormatError(
            f"unsupported convention/ordering {doc['convention']!r}/{doc['ordering']!r}", path)
    L, channels = int(doc["L"]), int(doc["channels"])
    coeffs = np.array(doc["coeffs"], dtype=float)
    if coeffs.shape != (channels * n_coefficients(L), 2):
        raise FileFormatError(
            f"expected {channels * n_coefficients(L)} [re, im] pairs, got array of shape {coeffs.shape}", path)
    try:
        return CoefficientPyramid(L, (coeffs[:, 0] + 1j * coeffs[:, 1]).reshape(channels, -1))
    except DomainError as exc:
        raise FileFormatError(str(exc), path) from None


def read_input(path):
    """A coefficient pyramid for ``.json`` paths, a field otherwise."""
    path = Path(path)
    if path.suffix == ".json":
        return read_pyramid(path)
    return read_field(path)


def write_spectrum(path, pyramid: CoefficientPyramid) -> int:
    """CSV ``l,m,channel,re,im,energy`` in canonical order; returns rows written."""
    n = 0
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["l", "m", "channel", "re", "im", "energy"])
        for c in range(pyramid.channels):
            for (l, m), s in zip(lm_pairs(pyramid.L), pyramid.coeffs[c]):
                w.writerow([l, m, c, repr(float(s.real)), repr(float(s.imag)), repr(float(abs(s) ** 2))])
                n += 1
    return n


def write_she_curve(path, curve: SheCurve) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["J", "SHE", "cumulative_energy_fraction"])
        for J, (v, f) in enumerate(zip(curve.values, curve.cumulative_energy_fraction)):
            w.writerow([J, repr(float(v)), repr(float(f))])


def write_bench(path, rows) -> None:
    rows = [r.as_dict() for r in rows]
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["strategy"])
        w.writeheader()
        w.writerows(rows)
