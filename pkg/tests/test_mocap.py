import json

import numpy as np
import pytest

from sigshape.core import curve as cv
from sigshape.core import lie
from sigshape.core.errors import (DanglingParent, DataError, DofCountMismatch, InvalidParameter,
                                  JointWithoutDof, LabelMismatch, MissingJointData, MissingSection,
                                  NonContiguousFrames, TooFewFrames, UnknownDof, UnknownJoint)
from sigshape.mocap import clips as clipio
from sigshape.mocap.amc import (axis_prerotation, axis_rotation, clip_poses, clip_to_curve, joint_rotation,
                                parse_amc, select_joints, write_amc)
from sigshape.mocap.asf import parse_asf, write_asf
from sigshape.mocap.synth import synth_classes


@pytest.fixture
def skeleton(fixture_text):
    return parse_asf(fixture_text('tiny.asf'), 'tiny.asf')


@pytest.fixture
def amc_text(fixture_text):
    return fixture_text('tiny.amc')


# --- ASF ----------------------------------------------------------------------

def test_parse_asf(skeleton):
    assert skeleton.names == ['root', 'lowerback', 'lhipjoint', 'lfemur']
    assert skeleton.degrees
    assert skeleton.name == 'tiny'
    femur = skeleton.joint('lfemur')
    assert femur.dofs == ('rx', 'rz')
    assert femur.parent == 'lhipjoint'
    assert femur.axis[2] == pytest.approx(np.radians(20.0))
    assert skeleton.root.rotational_dofs == ('rx', 'ry', 'rz')
    assert skeleton.joint('lhipjoint').rotational_dofs == ()
    with pytest.raises(UnknownJoint):
        skeleton.joint('rfemur')


def test_asf_missing_hierarchy(fixture_text):
    text = fixture_text('tiny.asf').split(':hierarchy')[0]
    with pytest.raises(MissingSection):
        parse_asf(text)


def test_asf_root_only_skeleton():
    text = (':root\n  order TX TY TZ RX RY RZ\n  axis XYZ\n  position 0 0 0\n  orientation 0 0 0\n'
            ':hierarchy\n  begin\n  end\n')
    skeleton = parse_asf(text)
    assert skeleton.names == ['root']
    assert skeleton.root.rotational_dofs == ('rx', 'ry', 'rz')


def test_asf_unknown_dof_cites_line(fixture_text):
    text = fixture_text('tiny.asf').replace('dof rx rz', 'dof rx qz')
    with pytest.raises(UnknownDof) as info:
        parse_asf(text, 'bad.asf')
    assert info.value.path == 'bad.asf'
    assert info.value.line is not None
    assert str(info.value).startswith(f'bad.asf:{info.value.line}:')


def test_asf_dangling_parent(fixture_text):
    text = fixture_text('tiny.asf').replace('lhipjoint lfemur', 'pelvis lfemur')
    with pytest.raises(DanglingParent):
        parse_asf(text)


def test_asf_writer_roundtrip(skeleton):
    again = parse_asf(write_asf(skeleton))
    assert again.names == skeleton.names
    assert again.degrees == skeleton.degrees
    for a, b in zip(again.joints, skeleton.joints):
        assert (a.dofs, a.parent, a.axis_order) == (b.dofs, b.parent, b.axis_order)
        np.testing.assert_allclose(a.axis, b.axis, atol=1e-15)


# --- AMC ----------------------------------------------------------------------

def test_parse_amc(skeleton, amc_text):
    clip = parse_amc(amc_text, skeleton, 'tiny', label='walk')
    assert clip.n_frames == 4
    assert clip.first_frame == 1
    assert set(clip.channels) == {'root', 'lowerback', 'lfemur'}
    np.testing.assert_allclose(clip.channels['lfemur'][0], np.radians([5.0, -5.0]))
    # translations are not converted to radians
    assert clip.channels['root'][1][0] == pytest.approx(0.1)


def test_joint_rotation_convention(skeleton, amc_text):
    clip = parse_amc(amc_text, skeleton)
    femur = skeleton.joint('lfemur')
    expected = axis_rotation('z', np.radians(20)) @ axis_rotation('x', np.radians(5)) @ \
        axis_rotation('z', np.radians(-5))
    np.testing.assert_allclose(joint_rotation(femur, clip.channels['lfemur'][0]), expected, atol=1e-14)
    # the root ignores its translation channels
    root_pose = joint_rotation(skeleton.root, clip.channels['root'][1])
    np.testing.assert_allclose(root_pose, axis_rotation('y', np.radians(5)), atol=1e-14)


def test_zero_motion_gives_the_rest_orientation(skeleton):
    frame = 'root 0 0 0 0 0 0\nlowerback 0 0 0\nlfemur 0 0\n'
    clip = parse_amc(f':FULLY-SPECIFIED\n:DEGREES\n1\n{frame}2\n{frame}', skeleton)
    poses = clip_poses(clip, skeleton)
    assert poses.shape == (2, 3, 3, 3)
    rest = np.stack([axis_prerotation(j) for j in select_joints(skeleton)])
    for k in range(2):
        np.testing.assert_allclose(poses[k], rest, atol=1e-15)
    np.testing.assert_allclose(rest[2], axis_rotation('z', np.radians(20.0)), atol=1e-15)


def test_clip_to_curve(skeleton, amc_text):
    clip = parse_amc(amc_text, skeleton)
    c = clip_to_curve(clip, skeleton)
    assert c.d == 3
    np.testing.assert_allclose(c.times, np.linspace(0, 1, 4))
    only = clip_poses(clip, skeleton, ['lfemur', 'lowerback'])
    assert only.shape == (4, 2, 3, 3)


@pytest.mark.parametrize('edit, error', [
    (lambda t: t.replace('lowerback 12 1 0', 'lowerback 12 1 0 4'), DofCountMismatch),
    (lambda t: t.replace('lfemur 10 -5\n', ''), MissingJointData),
    (lambda t: t.replace('\n3\n', '\n5\n'), NonContiguousFrames),
    (lambda t: t.replace('lfemur 5 -5', 'rfemur 5 -5'), UnknownJoint),
    (lambda t: t.replace('lowerback 14 2 0', 'lowerback 14 two 0'), DataError),
    (lambda t: t.split('\n2\n')[0], TooFewFrames),
])
def test_amc_errors(skeleton, amc_text, edit, error):
    with pytest.raises(error) as info:
        parse_amc(edit(amc_text), skeleton, path='tiny.amc')
    assert info.value.path == 'tiny.amc'


def test_amc_writer_roundtrip(skeleton, amc_text):
    clip = parse_amc(amc_text, skeleton)
    again = parse_amc(write_amc(clip, skeleton), skeleton)
    for name, values in clip.channels.items():
        np.testing.assert_allclose(again.channels[name], values, atol=1e-14)


def test_select_joints(skeleton):
    assert [j.name for j in select_joints(skeleton)] == ['root', 'lowerback', 'lfemur']
    with pytest.raises(JointWithoutDof):
        select_joints(skeleton, ['lhipjoint'])


# --- canonical clips ------------------------------------------------------------

def test_pose_clip_from_animation(skeleton, amc_text):
    clip = parse_amc(amc_text, skeleton, 'tiny', label='walk')
    pose_clip = clipio.from_animation(clip, skeleton)
    assert pose_clip.joint_names == ('root', 'lowerback', 'lfemur')
    assert pose_clip.label == 'walk'
    np.testing.assert_allclose(pose_clip.to_curve().poses, clip_to_curve(clip, skeleton).poses, atol=1e-12)


def test_pose_clip_select_and_errors(rng):
    rotvecs = rng.uniform(-1, 1, size=(5, 3, 3))
    clip = clipio.PoseClip('a', rotvecs, ('x', 'y', 'z'))
    picked = clip.select(['z', 'x'])
    np.testing.assert_array_equal(picked.rotvecs[:, 0], rotvecs[:, 2])
    with pytest.raises(UnknownJoint):
        clip.select(['w'])
    with pytest.raises(DataError):
        clipio.PoseClip('b', np.full((2, 1, 3), np.nan))


def test_clip_json_mapping(rng, tmp_path):
    c = lie.pose_exp(rng.uniform(-1, 1, size=6))
    frames = [c, lie.pose_exp(rng.uniform(-1, 1, size=6)) @ c]
    curve = cv.from_frames(frames, [0.0, 0.4])
    pose_clip = clipio.from_curve(curve, 'one', 'jump', ('a', 'b'))
    dataset = clipio.LabeledDataset([pose_clip])
    path = tmp_path / 'clips.json'
    clipio.write_dataset(str(path), dataset)

    data = json.loads(path.read_text())
    assert data['version'] == 1
    assert data['clips'][0]['id'] == 'one'
    assert data['clips'][0]['times'] == [0.0, 1.0]

    loaded = clipio.read_dataset(str(path))
    assert loaded.ids == ['one'] and loaded.labels == ['jump']
    np.testing.assert_allclose(loaded.clips[0].to_curve().poses, curve.poses, atol=1e-12)


def test_dataset_from_dict_variants(rng):
    record = {'id': 'x', 'frames': rng.uniform(-1, 1, size=(3, 1, 3)).tolist()}
    assert len(clipio.dataset_from_dict(record)) == 1
    assert len(clipio.dataset_from_dict([record])) == 1
    with pytest.raises(DataError):
        clipio.dataset_from_dict([record, record])
    with pytest.raises(DataError):
        clipio.dataset_from_dict({'id': 'y'})
    with pytest.raises(DataError):
        clipio.dataset_from_dict(42)


def test_read_dataset_reports_path(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"clips": [')
    with pytest.raises(DataError) as info:
        clipio.read_dataset(str(path))
    assert info.value.path == str(path)


# --- synthetic data -------------------------------------------------------------

def test_synth_is_deterministic():
    a = synth_classes(seed=3, classes=2, clips_per_class=3, joints=2, frames=12)
    b = synth_classes(seed=3, classes=2, clips_per_class=3, joints=2, frames=12)
    for x, y in zip(a, b):
        assert x.clip_id == y.clip_id
        np.testing.assert_array_equal(x.rotvecs, y.rotvecs)
    c = synth_classes(seed=4, classes=2, clips_per_class=3, joints=2, frames=12)
    assert not np.array_equal(a.clips[0].rotvecs, c.clips[0].rotvecs)


def test_synth_layout():
    ds = synth_classes(seed=0, classes=3, clips_per_class=4, joints=5, frames=20)
    assert len(ds) == 12
    assert ds.class_names == ['class0', 'class1', 'class2']
    assert ds.ids[:2] == ['class0-000', 'class0-001']
    assert all(c.rotvecs.shape == (20, 5, 3) for c in ds)
    assert ds.clips[0].joint_names == tuple(f'joint{j}' for j in range(5))
    ds.require_labels()
    assert len(ds.curves(['joint1', 'joint3'])[0].poses[0]) == 2


def test_synth_without_warps_or_noise_repeats_the_prototype():
    ds = synth_classes(seed=1, classes=1, clips_per_class=2, joints=2, frames=10, noise=0.0, warps=False)
    np.testing.assert_array_equal(ds.clips[0].rotvecs, ds.clips[1].rotvecs)


@pytest.mark.parametrize('kwargs', [
    {'classes': 0}, {'frames': 1}, {'noise': -0.1}, {'classes': 2, 'labels': ['only']},
])
def test_synth_rejects_bad_arguments(kwargs):
    with pytest.raises(InvalidParameter):
        synth_classes(**kwargs)


def test_require_labels():
    ds = synth_classes(seed=0, classes=1, clips_per_class=2, joints=1, frames=4)
    with pytest.raises(LabelMismatch):
        ds.require_labels()
