"""Inter-frame change masks built from averaged edge maps.

Pipeline for a frame pair (j, j+1):

1. binarize each averaged edge map at half its maximum magnitude;
2. close small gaps morphologically and cluster the surviving pixels into
   single-object boundary sets;
3. order each cluster's points by angle about its centroid and fill the
   resulting polygon;
4. compare filled objects across the pair; objects that match are deemed
   unchanged, everything else is marked as change.

The change mask gates a masked-difference coupling operator: unchanged
pixels are tied together across neighboring frames, changed pixels are
left free.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from skimage.measure import label as _sk_label
from skimage.morphology import binary_closing, disk

DEFAULT_TAU_DIFF = 1e-3
DEFAULT_CLOSING_RADIUS = 3
_CEIL_FUZZ = 1e-12


@dataclass
class BinaryEdgeMask:
    mask: np.ndarray
    tau: float

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)


@dataclass
class SingleObjectMask:
    """Pixel coordinates (k, l) of one connected edge cluster."""

    points: np.ndarray
    object_id: int

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=int)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")


@dataclass
class FilledObjectMask:
    mask: np.ndarray
    object_id: int

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)

    @property
    def area(self) -> int:
        return int(self.mask.sum())


@dataclass
class ChangeMask:
    """Diagonal coupling gate for one frame pair.

    ``unchanged`` is True where the pair may be tied together; the flat
    0/1 diagonal is ``vec`` (1 = couple, 0 = leave free).
    """

    unchanged: np.ndarray
    pair_index: int = 1

    def __post_init__(self):
        self.unchanged = np.asarray(self.unchanged, dtype=bool)

    @property
    def vec(self) -> np.ndarray:
        return self.unchanged.ravel().astype(float)


def binarize(gbar: np.ndarray, tau: float | None = None) -> BinaryEdgeMask:
    """Threshold an averaged edge map at half its maximum magnitude.

    The comparison is strict, so the map's own maximum is always excluded
    when ``tau`` is left at the default half-max.
    """
    a = np.abs(np.asarray(gbar, dtype=float))
    if tau is None:
        tau = 0.5 * a.max()
    if a.max() == 0.0:
        warnings.warn("all-zero edge map: no edge pixels", RuntimeWarning)
        return BinaryEdgeMask(mask=np.zeros_like(a, dtype=bool), tau=tau)
    return BinaryEdgeMask(mask=a > tau, tau=tau)


def bridge_and_cluster(binary: BinaryEdgeMask | np.ndarray,
                       d: int = DEFAULT_CLOSING_RADIUS
                       ) -> list[SingleObjectMask]:
    """Close gaps up to ~d pixels, then split into 8-connected clusters.

    Clusters with d or fewer pixels are discarded as noise.
    """
    mask = binary.mask if isinstance(binary, BinaryEdgeMask) else np.asarray(
        binary, dtype=bool)
    if d < 1:
        raise ValueError("closing radius must be >= 1")
    closed = binary_closing(mask, disk(d))
    labels = _sk_label(closed, connectivity=2)
    out = []
    for obj_id in range(1, labels.max() + 1):
        pts = np.argwhere(labels == obj_id)
        if pts.shape[0] <= d:
            continue
        out.append(SingleObjectMask(points=pts, object_id=len(out) + 1))
    return out


def order_edge_points(points: np.ndarray) -> np.ndarray:
    """Order cluster points counterclockwise about their centroid.

    Angles are measured in [0, 2 pi) from the centroid; among points that
    share an angle only the one furthest from the centroid is kept, so the
    result traces the outer boundary once, strictly increasing in angle.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (k, l) points")
    centroid = pts.mean(axis=0)
    delta = pts - centroid
    radius = np.hypot(delta[:, 0], delta[:, 1])
    if radius.max() == 0.0:
        raise ValueError("degenerate cluster: all points coincide")
    phi = np.mod(np.arctan2(delta[:, 1], delta[:, 0]), 2.0 * np.pi)
    # group near-identical angles so collinear grid points tie reliably
    phi = np.round(phi, 12)
    order = np.lexsort((-radius, phi))
    phi_sorted = phi[order]
    keep = np.ones(order.size, dtype=bool)
    keep[1:] = phi_sorted[1:] != phi_sorted[:-1]
    return np.asarray(points)[order[keep]]


def _on_segment(k, l, p, q) -> np.ndarray:
    # exact for integer vertices: zero cross product and inside the bbox
    cross = (q[0] - p[0]) * (l - p[1]) - (q[1] - p[1]) * (k - p[0])
    within = ((k >= min(p[0], q[0])) & (k <= max(p[0], q[0]))
              & (l >= min(p[1], q[1])) & (l <= max(p[1], q[1])))
    return (np.abs(cross) < 1e-9) & within


def _segments_intersect(a0, a1, b0, b1) -> bool:
    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return int(v > 0) - int(v < 0)

    o1, o2 = orient(a0, a1, b0), orient(a0, a1, b1)
    o3, o4 = orient(b0, b1, a0), orient(b0, b1, a1)
    return o1 != o2 and o3 != o4


def fill_polygon(ordered: np.ndarray, side: int,
                 object_id: int = 1) -> FilledObjectMask:
    """Rasterize the polygon through the ordered points, boundary included.

    Interior membership uses the even-odd rule along a horizontal ray;
    grid points exactly on a polygon edge count as inside.  A
    self-intersecting outline is still filled (even-odd) but flagged.
    """
    verts = np.asarray(ordered, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
        raise ValueError("need at least three ordered points")
    n = verts.shape[0]
    segs = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_intersect(*segs[i], *segs[j]):
                warnings.warn("self-intersecting outline; filling even-odd",
                              RuntimeWarning)
                break
        else:
            continue
        break

    kk, ll = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    kk = kk.astype(float)
    ll = ll.astype(float)
    inside = np.zeros((side, side), dtype=bool)
    boundary = np.zeros((side, side), dtype=bool)
    for p, q in segs:
        boundary |= _on_segment(kk, ll, p, q)
        # horizontal ray toward +k; half-open rule on l avoids double counts
        straddles = (p[1] > ll) != (q[1] > ll)
        if not straddles.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            kcross = p[0] + (ll - p[1]) * (q[0] - p[0]) / (q[1] - p[1])
        inside ^= straddles & (kk < kcross)
    return FilledObjectMask(mask=inside | boundary, object_id=object_id)


def diff_measure(A: FilledObjectMask | np.ndarray,
                 B: FilledObjectMask | np.ndarray) -> float:
    """Normalized squared difference of two binary masks, in [0, 1].

    0 exactly when the masks agree, 1 exactly when they are nonempty and
    disjoint.  Two empty masks compare as 0 (flagged: there is nothing to
    compare).
    """
    a = (A.mask if isinstance(A, FilledObjectMask) else np.asarray(A)).astype(int)
    b = (B.mask if isinstance(B, FilledObjectMask) else np.asarray(B)).astype(int)
    if a.shape != b.shape:
        raise ValueError("masks must share a shape")
    denom = int(a.sum() + b.sum())
    if denom == 0:
        warnings.warn("comparing two empty masks", RuntimeWarning)
        return 0.0
    return float(np.sum((a - b) ** 2) / denom)


def change_index_sets(objects_j: list[FilledObjectMask],
                      objects_k: list[FilledObjectMask],
                      tau_diff: float = DEFAULT_TAU_DIFF
                      ) -> tuple[list[int], list[int]]:
    """Indices (0-based) of objects in each frame that found no match.

    Every cross-frame pair is compared; a pair with difference below
    ``tau_diff`` removes both members from their index sets.
    """
    left = set(range(len(objects_j)))
    right = set(range(len(objects_k)))
    for i, A in enumerate(objects_j):
        for ip, B in enumerate(objects_k):
            if diff_measure(A, B) < tau_diff:
                left.discard(i)
                right.discard(ip)
    return sorted(left), sorted(right)


def _ceil_binary_average(objects: list[FilledObjectMask], idx: list[int],
                         side: int) -> np.ndarray:
    if not idx:
        return np.zeros((side, side))
    stack = np.stack([objects[i].mask.astype(float) for i in idx])
    avg = stack.mean(axis=0)
    avg[np.abs(avg) <= _CEIL_FUZZ] = 0.0
    return np.ceil(avg)


def assemble_change_mask(objects_j: list[FilledObjectMask], idx_j: list[int],
                         objects_k: list[FilledObjectMask], idx_k: list[int],
                         side: int, pair_index: int = 1) -> ChangeMask:
    """Combine the unmatched objects of a frame pair into one change region.

    Each frame's unmatched objects are averaged and ceiled entrywise (for
    binary masks this is their union), the two results are averaged and
    ceiled again, and the complement becomes the coupling gate.  Values
    within 1e-12 of zero are clamped before each ceiling.
    """
    inner_j = _ceil_binary_average(objects_j, idx_j, side)
    inner_k = _ceil_binary_average(objects_k, idx_k, side)
    combined = 0.5 * (inner_j + inner_k)
    combined[np.abs(combined) <= _CEIL_FUZZ] = 0.0
    changed = np.ceil(combined)
    return ChangeMask(unchanged=changed == 0.0, pair_index=pair_index)


def objects_for_map(gbar: np.ndarray, d: int = DEFAULT_CLOSING_RADIUS,
                    tau: float | None = None,
                    extract_enclosing: bool = False,
                    extract_level: float = 0.5) -> list[FilledObjectMask]:
    """Run steps 1-3 for one averaged edge map: binarize, cluster, fill.

    With ``extract_enclosing`` set, a cluster whose filled region contains
    the centroid of every other cluster (an enclosing outline, e.g. a
    skull) is removed before filling, provided its mean edge magnitude is
    at least ``extract_level`` times the map maximum.
    """
    binary = binarize(gbar, tau=tau)
    clusters = bridge_and_cluster(binary, d=d)
    side = np.asarray(gbar).shape[0]
    filled = []
    for cluster in clusters:
        ordered = order_edge_points(cluster.points)
        filled.append(fill_polygon(ordered, side, object_id=cluster.object_id))
    if extract_enclosing and len(filled) > 1:
        a = np.abs(np.asarray(gbar, dtype=float))
        centroids = [c.points.mean(axis=0).round().astype(int) for c in clusters]
        for i, F in enumerate(filled):
            others = [centroids[j] for j in range(len(filled)) if j != i]
            if not all(F.mask[tuple(c)] for c in others):
                continue
            strength = a[clusters[i].points[:, 0], clusters[i].points[:, 1]].mean()
            if strength >= extract_level * a.max():
                filled = [f for j, f in enumerate(filled) if j != i]
                break
    return filled


def change_masks_for_frames(gbars: list[np.ndarray],
                            d: int = DEFAULT_CLOSING_RADIUS,
                            tau_diff: float = DEFAULT_TAU_DIFF,
                            extract_enclosing: bool = False
                            ) -> list[ChangeMask]:
    """Change masks for every adjacent pair of a sequence of edge maps."""
    if len(gbars) < 2:
        raise ValueError("need at least two frames")
    side = np.asarray(gbars[0]).shape[0]
    objects = [objects_for_map(g, d=d, extract_enclosing=extract_enclosing)
               for g in gbars]
    masks = []
    for j in range(len(gbars) - 1):
        idx_j, idx_k = change_index_sets(objects[j], objects[j + 1], tau_diff)
        masks.append(assemble_change_mask(objects[j], idx_j,
                                          objects[j + 1], idx_k,
                                          side, pair_index=j + 1))
    return masks


@dataclass
class CouplingOperator:
    """Masked first differences across frames.

    Applied to a stack s of J frames, block j of the output is
    C_j * (s_j - s_{j+1}) for j = 1..J-1, with C_j the (diagonal) change
    gate of pair j.  Never materialized as a dense matrix.
    """

    masks: list[ChangeMask]
    side: int

    def __post_init__(self):
        for cm in self.masks:
            if cm.unchanged.shape != (self.side, self.side):
                raise ValueError("change mask shape mismatch")
        self._gates = np.stack([cm.unchanged.astype(float)
                                for cm in self.masks])

    @property
    def J(self) -> int:
        return len(self.masks) + 1

    def apply(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s)
        if s.shape[0] != self.J:
            raise ValueError(f"expected {self.J} frames, got {s.shape[0]}")
        return self._gates * (s[:-1] - s[1:])

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        if y.shape[0] != self.J - 1:
            raise ValueError(f"expected {self.J - 1} blocks, got {y.shape[0]}")
        gy = self._gates * y
        out = np.zeros((self.J,) + y.shape[1:], dtype=y.dtype)
        out[:-1] += gy
        out[1:] -= gy
        return out

    def normal_apply(self, s: np.ndarray) -> np.ndarray:
        return self.adjoint(self.apply(s))

    def diagonal(self) -> np.ndarray:
        """Diagonal of Phi^T Phi, frame-blocked (for preconditioning)."""
        diag = np.zeros((self.J, self.side, self.side))
        diag[:-1] += self._gates
        diag[1:] += self._gates
        return diag


def build_phi(masks: list[ChangeMask], J: int | None = None
              ) -> CouplingOperator:
    """Coupling operator from J-1 pairwise change masks."""
    if J is not None and len(masks) != J - 1:
        raise ValueError(f"need {J - 1} masks for {J} frames, got {len(masks)}")
    if not masks:
        raise ValueError("need at least one change mask")
    side = masks[0].unchanged.shape[0]
    return CouplingOperator(masks=list(masks), side=side)
