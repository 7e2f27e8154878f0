"""Deterministic preprocessing of raw tracklets and frame counts.

Turns tracker output into action-token candidates (length filtering and
splitting, spatial union of boxes) and picks uniformly spaced scene frames.
"""

from dataclasses import dataclass

from .errors import EmptyTracklet, InvalidCount

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class Tracklet:
    """A temporally contiguous tracked region: (frame_index, bbox) pairs."""

    id: str
    frames: tuple[tuple[int, Box], ...]

    def __post_init__(self):
        frames = tuple((int(i), tuple(float(v) for v in box)) for i, box in self.frames)
        object.__setattr__(self, "frames", frames)
        indices = [i for i, _ in frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"tracklet {self.id!r}: frame indices must be strictly increasing")

    @property
    def length(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class TrackletRules:
    """Minimum kept length and maximum chunk length."""

    l_min: int
    l_max: int

    def __post_init__(self):
        if self.l_min < 1 or self.l_max < 1:
            raise ValueError("l_min and l_max must be positive")
        if self.l_min > self.l_max:
            raise ValueError("l_min must not exceed l_max")


def filter_split_tracklets(tracklets: list[Tracklet], rules: TrackletRules) -> list[Tracklet]:
    """Drop tracklets shorter than l_min; split longer than l_max into
    consecutive l_max chunks, keeping the remainder chunk iff its length
    reaches l_min. Input order is preserved; chunk ids are "<id>#<index>".
    """
    out = []
    for tr in tracklets:
        n = tr.length
        if n < rules.l_min:
            continue
        if n <= rules.l_max:
            out.append(tr)
            continue
        chunk_index = 0
        for start in range(0, n, rules.l_max):
            chunk = tr.frames[start : start + rules.l_max]
            if len(chunk) < rules.l_min:
                break
            out.append(Tracklet(id=f"{tr.id}#{chunk_index}", frames=chunk))
            chunk_index += 1
    return out


def spatial_union(tracklet: Tracklet) -> Box:
    """Smallest axis-aligned rectangle containing every per-frame bbox."""
    if tracklet.length == 0:
        raise EmptyTracklet(f"tracklet {tracklet.id!r} has no frames")
    boxes = [box for _, box in tracklet.frames]
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def uniform_scene_indices(frame_count: int, n_scene: int) -> list[int]:
    """n_scene strictly increasing frame indices, floor-spaced from 0."""
    if n_scene < 1 or n_scene > frame_count:
        raise InvalidCount(f"n_scene must be in [1, {frame_count}], got {n_scene}")
    return [i * frame_count // n_scene for i in range(n_scene)]
