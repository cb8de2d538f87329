# Canonical clip representation and its JSON mapping
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from sigshape.core import curve as cv
from sigshape.core import lie
from sigshape.core.errors import DataError, JointCountMismatch, LabelMismatch, UnknownJoint
from sigshape.core.file_handler import FileHandler
from sigshape.mocap.amc import AnimationClip, clip_poses, select_joints
from sigshape.mocap.asf import Skeleton

logger = logging.getLogger('SigShape.clips')

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class PoseClip:
    """A clip as per-frame per-joint axis-angle triples (radians), shape (frames, d, 3)."""

    clip_id: str
    rotvecs: np.ndarray
    joint_names: Sequence[str] = ()
    label: Optional[str] = None
    frame_rate: float = 120.0
    times: Optional[np.ndarray] = None

    def __post_init__(self):
        rv = np.asarray(self.rotvecs, dtype=float)
        if rv.ndim != 3 or rv.shape[2] != 3:
            raise DataError(f"clip {self.clip_id!r}: rotvecs must have shape (frames, d, 3), got {rv.shape}")
        if not np.all(np.isfinite(rv)):
            raise DataError(f"clip {self.clip_id!r}: non-finite rotation vector")
        names = tuple(self.joint_names) or tuple(f'j{k}' for k in range(rv.shape[1]))
        if len(names) != rv.shape[1]:
            raise JointCountMismatch(
                f"clip {self.clip_id!r}: {len(names)} joint names for {rv.shape[1]} joints"
            )
        object.__setattr__(self, 'rotvecs', rv)
        object.__setattr__(self, 'joint_names', names)
        if self.times is not None:
            object.__setattr__(self, 'times', np.asarray(self.times, dtype=float))

    @property
    def n_frames(self) -> int:
        return self.rotvecs.shape[0]

    @property
    def d(self) -> int:
        return self.rotvecs.shape[1]

    def frames(self) -> List[np.ndarray]:
        return [np.stack([lie.exp_so3(v) for v in frame]) for frame in self.rotvecs]

    def to_curve(self) -> cv.PiecewiseGeodesicCurve:
        return cv.from_frames(self.frames(), self.times)

    def select(self, joints: Optional[Sequence[str]]) -> 'PoseClip':
        """Restrict to the named joints, in the given order."""
        if not joints:
            return self
        missing = [j for j in joints if j not in self.joint_names]
        if missing:
            raise UnknownJoint(f"clip {self.clip_id!r} has no joint(s) {', '.join(missing)}")
        idx = [self.joint_names.index(j) for j in joints]
        return PoseClip(self.clip_id, self.rotvecs[:, idx], tuple(joints), self.label,
                        self.frame_rate, self.times)


def from_curve(c: cv.PiecewiseGeodesicCurve, clip_id: str, label: Optional[str] = None,
               joint_names: Sequence[str] = (), frame_rate: float = 120.0,
               keep_times: bool = True) -> PoseClip:
    rotvecs = np.stack([lie.pose_log(p).reshape(-1, 3) for p in c.poses])
    times = np.array(c.times) if keep_times else None
    return PoseClip(clip_id, rotvecs, joint_names, label, frame_rate, times)


def from_animation(clip: AnimationClip, skeleton: Skeleton,
                   joints: Optional[Sequence[str]] = None) -> PoseClip:
    """Canonical form of a parsed AMC clip; frame times stay implicit (uniform)."""
    names = [j.name for j in select_joints(skeleton, joints)]
    poses = clip_poses(clip, skeleton, joints)
    rotvecs = np.stack([lie.pose_log(p).reshape(-1, 3) for p in poses])
    return PoseClip(clip.clip_id, rotvecs, names, clip.label, clip.frame_rate)


def clip_to_dict(clip: PoseClip) -> Dict[str, Any]:
    data = {
        'id': clip.clip_id,
        'label': clip.label,
        'joint_names': list(clip.joint_names),
        'frame_rate': float(clip.frame_rate),
        'frames': clip.rotvecs.tolist(),
    }
    if clip.times is not None:
        data['times'] = clip.times.tolist()
    return data


def clip_from_dict(data: Dict[str, Any]) -> PoseClip:
    try:
        return PoseClip(
            clip_id=str(data['id']),
            rotvecs=np.asarray(data['frames'], dtype=float),
            joint_names=tuple(data.get('joint_names') or ()),
            label=data.get('label'),
            frame_rate=float(data.get('frame_rate', 120.0)),
            times=data.get('times'),
        )
    except KeyError as e:
        raise DataError(f"clip record is missing the {e.args[0]!r} field") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, DataError):
            raise
        raise DataError(f"malformed clip record {data.get('id', '?')!r}: {e}") from None


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    clips: Sequence[PoseClip]

    def __post_init__(self):
        object.__setattr__(self, 'clips', tuple(self.clips))
        ids = [c.clip_id for c in self.clips]
        if len(set(ids)) != len(ids):
            raise DataError("clip ids must be unique within a dataset")

    def __len__(self) -> int:
        return len(self.clips)

    def __iter__(self):
        return iter(self.clips)

    @property
    def ids(self) -> List[str]:
        return [c.clip_id for c in self.clips]

    @property
    def labels(self) -> List[Optional[str]]:
        return [c.label for c in self.clips]

    @property
    def class_names(self) -> List[str]:
        seen: List[str] = []
        for label in self.labels:
            if label is not None and label not in seen:
                seen.append(label)
        return seen

    def require_labels(self):
        """Every clip labeled and at least two classes, as classification needs."""
        if any(label is None for label in self.labels):
            raise LabelMismatch("every clip needs a label")
        if len(self.class_names) < 2:
            raise LabelMismatch(f"need at least 2 classes, got {self.class_names}")

    def curves(self, joints: Optional[Sequence[str]] = None) -> List[cv.PiecewiseGeodesicCurve]:
        return [c.select(joints).to_curve() for c in self.clips]


def dataset_to_dict(dataset: LabeledDataset) -> Dict[str, Any]:
    return {'version': FORMAT_VERSION, 'clips': [clip_to_dict(c) for c in dataset]}


def dataset_from_dict(data: Any) -> LabeledDataset:
    """Accepts a dataset object, a bare list of clips or a single clip record."""
    if isinstance(data, dict) and 'clips' in data:
        records = data['clips']
    elif isinstance(data, list):
        records = data
    elif isinstance(data, dict):
        records = [data]
    else:
        raise DataError("clip file must hold a clip, a list of clips or a dataset object")
    return LabeledDataset([clip_from_dict(r) for r in records])


def read_dataset(path: str) -> LabeledDataset:
    try:
        dataset = dataset_from_dict(FileHandler().read_json(path))
    except DataError as e:
        raise e.with_location(path)
    logger.info(f"Loaded {len(dataset)} clips from {path}")
    return dataset


def write_dataset(path: str, dataset: LabeledDataset):
    FileHandler().write_json(path, dataset_to_dict(dataset))
