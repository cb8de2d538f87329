"""
Seeded synthetic motion classes.

Each class owns a smooth angular program: every joint and axis follows
a * sin(2 pi f s + p) with its own amplitude, integer frequency and phase.
A class prototype samples the program at keyframes. A warped clip keeps the
prototype's keyframes and inserts extra frames on its geodesic segments, so
with zero noise it is an exact reparameterization of the prototype. Noise
right-multiplies every joint of every frame by exp(noise * xi), xi ~ N(0, I).
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from sigshape.core import lie
from sigshape.core.errors import InvalidParameter
from sigshape.mocap.clips import LabeledDataset, PoseClip

logger = logging.getLogger('SigShape.synth')

DEFAULT_CLASSES = 3
DEFAULT_CLIPS_PER_CLASS = 10
DEFAULT_JOINTS = 5
DEFAULT_FRAMES = 60
DEFAULT_NOISE = 0.02
MAX_AMPLITUDE = 1.0


class AngularProgram:
    """Per-joint, per-axis sinusoid defining one motion class."""

    def __init__(self, rng: np.random.Generator, joints: int):
        self.amplitude = rng.uniform(0.3, MAX_AMPLITUDE, size=(joints, 3))
        self.frequency = rng.integers(1, 4, size=(joints, 3)).astype(float)
        self.phase = rng.uniform(0.0, 2.0 * np.pi, size=(joints, 3))

    def __call__(self, s: np.ndarray) -> np.ndarray:
        """Axis-angle vectors at times s, shape (len(s), joints, 3)."""
        s = np.asarray(s, dtype=float)[:, None, None]
        return self.amplitude * np.sin(2.0 * np.pi * self.frequency * s + self.phase)

    def keyframes(self, n: int) -> List[np.ndarray]:
        return [lie.pose_exp(v.ravel()) for v in self(np.linspace(0.0, 1.0, n))]


def _insert_frames(rng: np.random.Generator, keyframes: List[np.ndarray], extra: int) -> List[np.ndarray]:
    """Spread extra frames over the keyframe segments at jittered geodesic positions."""
    n_seg = len(keyframes) - 1
    weights = rng.uniform(0.5, 1.5, size=n_seg)
    counts = rng.multinomial(extra, weights / weights.sum())
    frames = [keyframes[0]]
    for k in range(n_seg):
        n = int(counts[k])
        if n:
            fractions = (np.arange(1, n + 1) + rng.uniform(-0.3, 0.3, size=n)) / (n + 1)
            for s in fractions:
                frames.append(lie.pose_interp(keyframes[k], keyframes[k + 1], float(s)))
        frames.append(keyframes[k + 1])
    return frames


def _perturb(rng: np.random.Generator, frame: np.ndarray, noise: float) -> np.ndarray:
    if noise == 0.0:
        return frame
    xi = rng.normal(size=(frame.shape[0], 3))
    return np.matmul(frame, lie.pose_exp((noise * xi).ravel()))


def synth_classes(seed: int = 0, classes: int = DEFAULT_CLASSES,
                  clips_per_class: int = DEFAULT_CLIPS_PER_CLASS, joints: int = DEFAULT_JOINTS,
                  frames: int = DEFAULT_FRAMES, noise: float = DEFAULT_NOISE, warps: bool = True,
                  labels: Optional[Sequence[str]] = None) -> LabeledDataset:
    """
    Generate a labeled dataset of clips on SO(3)^joints.

    Args:
        seed (int): Seed; equal arguments give bit-identical datasets
        classes (int): Number of motion classes
        clips_per_class (int): Clips generated per class
        joints (int): Joints per frame
        frames (int): Frames per clip
        noise (float): Standard deviation of the per-frame rotation noise (radians)
        warps (bool): Apply a random time warp to every clip

    Returns:
        LabeledDataset: Clips ordered class by class
    """
    for name, value, low in (('classes', classes, 1), ('clips_per_class', clips_per_class, 1),
                             ('joints', joints, 1), ('frames', frames, 2)):
        if int(value) < low:
            raise InvalidParameter(f"{name} must be at least {low}, got {value}")
    if noise < 0 or not np.isfinite(noise):
        raise InvalidParameter(f"noise must be non-negative, got {noise}")
    labels = list(labels) if labels else [f'class{c}' for c in range(classes)]
    if len(labels) != classes:
        raise InvalidParameter(f"need {classes} class labels, got {len(labels)}")

    rng = np.random.default_rng(seed)
    n_key = max(2, frames // 2) if warps else frames
    clips = []
    for c in range(classes):
        program = AngularProgram(rng, joints)
        keyframes = program.keyframes(n_key)
        for k in range(clips_per_class):
            seq = _insert_frames(rng, keyframes, frames - n_key) if warps else list(keyframes)
            seq = [_perturb(rng, f, noise) for f in seq]
            rotvecs = np.stack([lie.pose_log(f).reshape(-1, 3) for f in seq])
            clips.append(PoseClip(f'{labels[c]}-{k:03d}', rotvecs,
                                  tuple(f'joint{j}' for j in range(joints)), labels[c]))
    logger.info(f"Generated {len(clips)} synthetic clips in {classes} classes (seed {seed})")
    return LabeledDataset(clips)
