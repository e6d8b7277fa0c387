"""Enrollment store and the end-to-end verification pipeline.

Enrollment runs minutiae -> core-relative k-means -> centroid distance
matrix -> nearest-neighbor graph -> four-parameter index, and persists one
text record per template plus a manifest line ``id<TAB>index_key<TAB>file``.
The manifest alone answers bucket queries, so identification scans it
without parsing every record.

Verification walks three gates in order and records each in a trace:

1. index bucket  - the probe's canonical index string must match,
2. isomorphism   - the cluster graphs must be isomorphic,
3. MHD threshold - the Modified Hausdorff distance, after aligning the
                   probe to the template by the best candidate rotation
                   about the core, must not exceed tau.

Gates 1 and 2 are implied by a tight gate 3, but running them separately
keeps the trace diagnostic and mirrors the layered coarse-to-fine design.
The candidate rotations in gate 3 come from angle differences of
similar-radius point pairs, so a probe that is a pure rotation of its
template aligns exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .cluster import kmeans_fing
from .core import (
    CorePoint,
    MinutiaeSet,
    fmt_real,
    parse_minutiae,
    serialize_minutiae,
    to_core_relative,
)
from .errors import DuplicateId, FingerprintError, UnknownId
from .graph import (
    GraphIndex,
    MinutiaeGraph,
    build_nn_graph,
    compute_index,
    dist_matrix,
    fingerprint_distance,
    index_string,
)
from .matching import DEFAULT_TAU, Decision, MatchScore, score_point_sets
from .orientation import FingerClass

DEFAULT_K = 5
ALIGN_RADIUS_BAND = 10.0

_MANIFEST = "manifest.txt"


@dataclass(frozen=True)
class Signature:
    """Everything the pipeline derives from one impression."""

    graph: MinutiaeGraph
    index: GraphIndex
    index_key: str
    centroids: np.ndarray  # (k, 2) core-relative
    relative: MinutiaeSet  # core at (0, 0)


def compute_signature(mset: MinutiaeSet, k: int = DEFAULT_K, core: CorePoint | None = None) -> Signature:
    """Run the fine-level pipeline on one impression.

    A caller-supplied core overrides the set's own CORE entry.
    """
    if core is not None:
        mset = MinutiaeSet(minutiae=mset.minutiae, core=core, source_id=mset.source_id)
    clusters = kmeans_fing(mset, k)
    graph = build_nn_graph(dist_matrix(clusters.centroids))
    idx = compute_index(graph)
    return Signature(
        graph=graph,
        index=idx,
        index_key=index_string(idx),
        centroids=clusters.centroids,
        relative=to_core_relative(mset),
    )


@dataclass(frozen=True)
class TemplateRecord:
    id: str
    class_label: FingerClass | None
    index_key: str
    graph: MinutiaeGraph
    centroids: np.ndarray
    minutiae: MinutiaeSet  # core-relative
    enrolled_at: str  # ISO-8601 UTC


@dataclass(frozen=True)
class GateCheck:
    name: str
    passed: bool


@dataclass(frozen=True)
class VerifyResult:
    record_id: str
    accepted: bool
    gates: tuple[GateCheck, ...]
    score: MatchScore
    rotation: float  # probe-to-template alignment angle used in gate 3

    @property
    def first_failed(self) -> str | None:
        for gate in self.gates:
            if not gate.passed:
                return gate.name
        return None


def _rotate(points: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    out = np.empty_like(points)
    out[:, 0] = points[:, 0] * c - points[:, 1] * s
    out[:, 1] = points[:, 0] * s + points[:, 1] * c
    return out


def best_rotation_alignment(
    probe: np.ndarray, template: np.ndarray, radius_band: float = ALIGN_RADIUS_BAND
) -> tuple[float, float]:
    """(angle, mhd) minimizing MHD over candidate rotations about the origin.

    Candidates are the angle differences of (probe, template) point pairs
    whose core distances differ by at most radius_band, plus the identity.
    """
    pr = np.sqrt(probe[:, 0] ** 2 + probe[:, 1] ** 2)
    tr = np.sqrt(template[:, 0] ** 2 + template[:, 1] ** 2)
    pa = np.arctan2(probe[:, 1], probe[:, 0])
    ta = np.arctan2(template[:, 1], template[:, 0])

    close = np.abs(pr[:, None] - tr[None, :]) <= radius_band
    diffs = (ta[None, :] - pa[:, None])[close]
    candidates = np.concatenate(([0.0], diffs))

    best_angle, best_mhd = 0.0, math.inf
    for angle in candidates.tolist():
        rotated = _rotate(probe, angle)
        dx = rotated[:, 0][:, None] - template[:, 0][None, :]
        dy = rotated[:, 1][:, None] - template[:, 1][None, :]
        table = np.sqrt(dx * dx + dy * dy)
        mhd = max(float(table.min(axis=1).mean()), float(table.min(axis=0).mean()))
        if mhd < best_mhd:
            best_mhd, best_angle = mhd, angle
    return best_angle, best_mhd


def gate_trace(
    probe_sig: Signature, template_sig_or_record, tau: float
) -> tuple[tuple[GateCheck, ...], MatchScore, float]:
    """Evaluate the three verification gates for a probe/template pair."""
    t = template_sig_or_record
    index_ok = probe_sig.index_key == t.index_key
    iso_ok = fingerprint_distance(probe_sig.graph, t.graph) == 0

    probe_pts = probe_sig.relative.coords()
    template_pts = (t.relative if isinstance(t, Signature) else t.minutiae).coords()
    angle, _ = best_rotation_alignment(probe_pts, template_pts)
    score = score_point_sets(_rotate(probe_pts, angle), template_pts, tau)
    gates = (
        GateCheck("index", index_ok),
        GateCheck("isomorphism", iso_ok),
        GateCheck("mhd", score.decision is Decision.ACCEPT),
    )
    return gates, score, angle


class TemplateStore:
    """Directory-backed template database. Single writer, shareable reads."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._index: dict[str, tuple[str, str]] = {}  # id -> (index_key, filename)
        manifest = self.directory / _MANIFEST
        if manifest.exists():
            for line in manifest.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                rec_id, key, fname = line.split("\t")
                self._index[rec_id] = (key, fname)

    def __len__(self) -> int:
        return len(self._index)

    def ids(self) -> list[str]:
        return list(self._index)

    def bucket(self, index_key: str) -> list[str]:
        """Ids sharing an index key, straight from the manifest."""
        return [rid for rid, (key, _) in self._index.items() if key == index_key]

    def enroll(
        self,
        mset: MinutiaeSet,
        record_id: str,
        k: int = DEFAULT_K,
        class_label: FingerClass | None = None,
        core: CorePoint | None = None,
    ) -> TemplateRecord:
        """Run the pipeline on an impression and persist the template."""
        if record_id in self._index:
            raise DuplicateId(f"id {record_id!r} already enrolled")
        if not record_id or any(ch in record_id for ch in "\t\n/\\"):
            raise FingerprintError(f"record id {record_id!r} not storable")
        sig = compute_signature(mset, k=k, core=core)
        relative = MinutiaeSet(
            minutiae=sig.relative.minutiae, core=sig.relative.core, source_id=record_id
        )
        record = TemplateRecord(
            id=record_id,
            class_label=class_label,
            index_key=sig.index_key,
            graph=sig.graph,
            centroids=sig.centroids,
            minutiae=relative,
            enrolled_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        fname = f"{record_id}.rec"
        (self.directory / fname).write_text(_record_text(record), encoding="utf-8")
        with (self.directory / _MANIFEST).open("a", encoding="utf-8") as fh:
            fh.write(f"{record_id}\t{record.index_key}\t{fname}\n")
        self._index[record_id] = (record.index_key, fname)
        return record

    def get(self, record_id: str) -> TemplateRecord:
        if record_id not in self._index:
            raise UnknownId(f"no enrolled record {record_id!r}")
        _, fname = self._index[record_id]
        return _parse_record((self.directory / fname).read_text(encoding="utf-8"))

    def verify(
        self,
        probe: MinutiaeSet,
        claimed_id: str,
        tau: float = DEFAULT_TAU,
        k: int | None = None,
        core: CorePoint | None = None,
    ) -> VerifyResult:
        """Check the probe against one enrolled template through all gates."""
        record = self.get(claimed_id)
        probe_sig = compute_signature(probe, k=k if k is not None else len(record.centroids), core=core)
        gates, score, angle = gate_trace(probe_sig, record, tau)
        return VerifyResult(
            record_id=claimed_id,
            accepted=all(g.passed for g in gates),
            gates=gates,
            score=score,
            rotation=angle,
        )

    def identify(
        self,
        probe: MinutiaeSet,
        tau: float = DEFAULT_TAU,
        k: int = DEFAULT_K,
        core: CorePoint | None = None,
    ) -> list[tuple[str, MatchScore]]:
        """Score the probe against its index bucket, best (lowest MHD) first.

        An empty list is a valid result: nothing shares the probe's bucket.
        """
        probe_sig = compute_signature(probe, k=k, core=core)
        results: list[tuple[str, MatchScore]] = []
        for rid in self.bucket(probe_sig.index_key):
            record = self.get(rid)
            _, score, _ = gate_trace(probe_sig, record, tau)
            results.append((rid, score))
        results.sort(key=lambda pair: (pair[1].mhd, pair[0]))
        return results


# --- record file format -------------------------------------------------------


def _record_text(rec: TemplateRecord) -> str:
    # Records keep full float precision (17 significant digits) so a
    # verified probe sees exactly the coordinates that were enrolled; the
    # 9-digit default stays reserved for the external MIN1 interchange.
    lines = ["FPREC1"]
    lines.append(f"ID {rec.id}")
    lines.append(f"CLASS {rec.class_label.value if rec.class_label else '-'}")
    lines.append(f"INDEX {rec.index_key}")
    lines.append(f"ENROLLED {rec.enrolled_at}")
    lines.append(f"CENTROIDS {len(rec.centroids)}")
    for x, y in rec.centroids:
        lines.append(f"{fmt_real(x, 17)} {fmt_real(y, 17)}")
    edges = sorted(rec.graph.edges)
    lines.append(f"EDGES {len(edges)}")
    for a, b in edges:
        lines.append(f"{a} {b}")
    min_block = serialize_minutiae(rec.minutiae, sig_digits=17).decode("utf-8")
    lines.append(f"MINUTIAE {len(min_block.splitlines())}")
    lines.append(min_block.rstrip("\n"))
    return "\n".join(lines) + "\n"


def _parse_record(text: str) -> TemplateRecord:
    lines = text.splitlines()
    if not lines or lines[0] != "FPREC1":
        raise FingerprintError("not a template record file")

    def take(tag: str, line: str) -> str:
        if not line.startswith(tag + " "):
            raise FingerprintError(f"expected {tag} line in record")
        return line[len(tag) + 1 :]

    rec_id = take("ID", lines[1])
    cls_text = take("CLASS", lines[2])
    class_label = None if cls_text == "-" else FingerClass(cls_text)
    index_key = take("INDEX", lines[3])
    enrolled_at = take("ENROLLED", lines[4])

    pos = 5
    n_centroids = int(take("CENTROIDS", lines[pos]))
    pos += 1
    centroids = np.array(
        [[float(v) for v in lines[pos + i].split()] for i in range(n_centroids)]
    ).reshape(n_centroids, 2)
    pos += n_centroids

    n_edges = int(take("EDGES", lines[pos]))
    pos += 1
    edges = frozenset(
        tuple(int(v) for v in lines[pos + i].split())[:2] for i in range(n_edges)
    )
    pos += n_edges
    graph = MinutiaeGraph(vertices=tuple(range(n_centroids)), edges=edges)

    n_min_lines = int(take("MINUTIAE", lines[pos]))
    pos += 1
    min_block = "\n".join(lines[pos : pos + n_min_lines]) + "\n"
    minutiae = parse_minutiae(min_block, source_id=rec_id)

    return TemplateRecord(
        id=rec_id,
        class_label=class_label,
        index_key=index_key,
        graph=graph,
        centroids=centroids,
        minutiae=minutiae,
        enrolled_at=enrolled_at,
    )
