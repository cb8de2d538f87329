# AMC motion parsing, serialization and conversion to curves
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from sigshape.core import curve as cv
from sigshape.core import lie
from sigshape.core.errors import (DataError, DofCountMismatch, JointWithoutDof, MissingJointData,
                                  NonContiguousFrames, TooFewFrames, UnknownJoint)
from sigshape.mocap.asf import Joint, Skeleton

logger = logging.getLogger('SigShape.amc')

_AXES = {'x': 0, 'y': 1, 'z': 2}


@dataclass(frozen=True, eq=False)
class AnimationClip:
    """Per-joint channel values, shape (frames, channels), angles in radians."""

    clip_id: str
    frame_rate: float
    channels: Dict[str, np.ndarray]
    label: Optional[str] = None
    first_frame: int = 1

    @property
    def n_frames(self) -> int:
        return len(next(iter(self.channels.values()))) if self.channels else 0

    def frame(self, k: int) -> Dict[str, np.ndarray]:
        return {name: values[k] for name, values in self.channels.items()}


def axis_rotation(axis: str, angle: float) -> np.ndarray:
    v = np.zeros(3)
    v[_AXES[axis.lower()]] = angle
    return lie.exp_so3(v)


def axis_prerotation(joint: Joint) -> np.ndarray:
    """C: the axis angles applied in axis_order about fixed axes, so the first letter acts first."""
    c = np.eye(3)
    for letter in joint.axis_order:
        c = axis_rotation(letter, joint.axis[_AXES[letter.lower()]]) @ c
    return c


def joint_rotation(joint: Joint, values: np.ndarray) -> np.ndarray:
    """C . R_1 . R_2 ..., dof rotations in dof-line order about the joint's local axes."""
    m = np.eye(3)
    for dof, value in zip(joint.dofs, values):
        if dof.startswith('r'):
            m = m @ axis_rotation(dof[1], value)
    return axis_prerotation(joint) @ m


def parse_amc(text: str, skeleton: Skeleton, clip_id: str = 'clip', frame_rate: float = 120.0,
              label: Optional[str] = None, path: Optional[str] = None) -> AnimationClip:
    """
    Parse the text of an AMC motion file against its skeleton.

    Args:
        text (str): File contents
        skeleton (Skeleton): Skeleton declaring dof counts and angle units
        path (str): Source path, used in error messages

    Returns:
        AnimationClip: One row per frame for every joint with channels
    """
    to_rad = np.pi / 180.0 if skeleton.degrees else 1.0
    joints = {j.name: j for j in skeleton.joints}
    frames: List[Dict[str, np.ndarray]] = []
    indices: List[int] = []
    current: Optional[Dict[str, np.ndarray]] = None

    def close(line_no: int):
        if current is None:
            return
        for j in skeleton.joints:
            if j.dofs and j.name not in current:
                raise MissingJointData(f"frame {indices[-1]} has no data for joint {j.name!r}",
                                       path, line_no)

    try:
        number = 0
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line or line.startswith(':'):
                continue
            tokens = line.split()
            if len(tokens) == 1 and tokens[0].lstrip('-').isdigit():
                close(number)
                index = int(tokens[0])
                if indices and index != indices[-1] + 1:
                    raise NonContiguousFrames(f"frame {index} follows frame {indices[-1]}", line=number)
                indices.append(index)
                current = {}
                frames.append(current)
                continue
            if current is None:
                raise DataError("joint data before the first frame index", line=number)
            name = tokens[0]
            if name not in joints:
                raise UnknownJoint(f"unknown joint {name!r}", line=number)
            joint = joints[name]
            try:
                values = np.array([float(t) for t in tokens[1:]])
            except ValueError:
                raise DataError(f"non-numeric value in {line!r}", line=number) from None
            if len(values) != len(joint.dofs):
                raise DofCountMismatch(
                    f"joint {name!r} has {len(joint.dofs)} channels, got {len(values)} values", line=number
                )
            scale = np.array([to_rad if d.startswith('r') else 1.0 for d in joint.dofs])
            current[name] = values * scale
        close(number)
        if len(frames) < 2:
            raise TooFewFrames(f"need at least 2 frames, got {len(frames)}")
    except DataError as e:
        raise e.with_location(path)

    channels = {j.name: np.stack([f[j.name] for f in frames]) for j in skeleton.joints if j.dofs}
    logger.info(f"Parsed {len(frames)} frames for clip {clip_id!r}")
    return AnimationClip(clip_id, float(frame_rate), channels, label, indices[0])


def write_amc(clip: AnimationClip, skeleton: Skeleton) -> str:
    """Serialize a clip in the skeleton's angle unit."""
    to_file = 180.0 / np.pi if skeleton.degrees else 1.0
    lines = [':FULLY-SPECIFIED', ':DEGREES' if skeleton.degrees else ':RADIANS']
    for k in range(clip.n_frames):
        lines.append(str(clip.first_frame + k))
        for j in skeleton.joints:
            if j.name not in clip.channels:
                continue
            scale = [to_file if d.startswith('r') else 1.0 for d in j.dofs]
            values = clip.channels[j.name][k] * scale
            lines.append(j.name + ' ' + ' '.join(repr(float(v)) for v in values))
    lines.append('')
    return '\n'.join(lines)


def select_joints(skeleton: Skeleton, joints: Optional[Sequence[str]] = None) -> List[Joint]:
    """Requested joints in request order; by default every joint with a rotational dof."""
    if not joints:
        return [j for j in skeleton.joints if j.rotational_dofs]
    selected = []
    for name in joints:
        joint = skeleton.joint(name)
        if not joint.rotational_dofs:
            raise JointWithoutDof(f"joint {name!r} has no rotational degree of freedom")
        selected.append(joint)
    return selected


def clip_poses(clip: AnimationClip, skeleton: Skeleton,
               joints: Optional[Sequence[str]] = None) -> np.ndarray:
    """Rotations of the selected joints, shape (frames, d, 3, 3); translations are ignored."""
    selected = select_joints(skeleton, joints)
    if not selected:
        raise JointWithoutDof("skeleton has no joint with a rotational degree of freedom")
    for j in selected:
        if j.name not in clip.channels:
            raise MissingJointData(f"clip {clip.clip_id!r} has no data for joint {j.name!r}")
    return np.stack([
        np.stack([joint_rotation(j, clip.channels[j.name][k]) for j in selected])
        for k in range(clip.n_frames)
    ])


def clip_to_curve(clip: AnimationClip, skeleton: Skeleton,
                  joints: Optional[Sequence[str]] = None) -> cv.PiecewiseGeodesicCurve:
    """Uniform-knot curve through the clip's poses."""
    return cv.from_frames(list(clip_poses(clip, skeleton, joints)))
