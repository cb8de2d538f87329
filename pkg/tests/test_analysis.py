import numpy as np
import pytest
from scipy.linalg import orthogonal_procrustes
from scipy.spatial.distance import pdist, squareform

from sigshape.core import analysis
from sigshape.core import curve as cv
from sigshape.core import lie
from sigshape.core.analysis import DistanceMatrix, DistanceParams, Method
from sigshape.core.errors import (DataError, DegenerateClass, InvalidParameter, LabelMismatch,
                                  PairComputationError, TooFewPoints)
from sigshape.mocap.synth import synth_classes

QUICK = DistanceParams(grid=16, max_step=3)


@pytest.fixture(scope='module')
def small_dataset():
    return synth_classes(seed=7, classes=2, clips_per_class=3, joints=2, frames=16)


def _block_matrix(classes=3, per_class=10, intra=0.1, inter=10.0):
    labels = np.repeat(np.arange(classes), per_class)
    d = np.where(labels[:, None] == labels[None, :], intra, inter)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d, [f'c{i}' for i in range(len(labels))]), [f'class{x}' for x in labels]


def _line_matrix(positions):
    x = np.asarray(positions, dtype=float)
    return DistanceMatrix(np.abs(x[:, None] - x[None, :]), [str(i) for i in range(len(x))])


def _silhouette_by_hand(d, labels):
    labels = np.asarray(labels)
    scores = []
    for i in range(len(labels)):
        same = (labels == labels[i]) & (np.arange(len(labels)) != i)
        a = d[i, same].mean()
        b = min(d[i, labels == other].mean() for other in set(labels) if other != labels[i])
        scores.append((b - a) / max(a, b))
    return float(np.mean(scores))


# --- distance matrices ----------------------------------------------------

@pytest.mark.parametrize('method', list(Method))
def test_matrix_is_a_valid_distance_matrix(small_dataset, method):
    dm = analysis.distance_matrix(small_dataset.curves(), method, QUICK, ids=small_dataset.ids)
    assert dm.n == 6 and dm.method is method
    assert np.all(np.diag(dm.values) == 0.0)
    np.testing.assert_array_equal(dm.values, dm.values.T)
    assert dm.build_seconds > 0.0
    assert dm.ids == tuple(small_dataset.ids)


@pytest.mark.parametrize('method', ['srvt', 'srvt_dp', 'signature'])
def test_parallel_matches_sequential(small_dataset, method):
    curves = small_dataset.curves()
    pooled = analysis.distance_matrix(curves, method, QUICK, parallel=True, workers=3)
    serial = analysis.distance_matrix(curves, method, QUICK, parallel=False)
    np.testing.assert_array_equal(pooled.values, serial.values)


def test_identical_curves_give_a_zero_matrix(make_curve):
    c = make_curve(4, 2)
    for method in ('srvt', 'signature'):
        np.testing.assert_array_equal(analysis.distance_matrix([c, c], method).values, np.zeros((2, 2)))


def test_duplicate_clip_duplicates_its_row(make_curve):
    curves = [make_curve(4, 1) for _ in range(3)]
    dm = analysis.distance_matrix(curves + [curves[1]], 'signature', parallel=False)
    np.testing.assert_array_equal(dm.values[3, :3], dm.values[1, :3])
    assert dm.values[1, 3] == 0.0


def test_elastic_entries_never_exceed_srvt(small_dataset):
    curves = small_dataset.curves()
    elastic = analysis.distance_matrix(curves, 'srvt_dp', QUICK).values
    rigid = analysis.distance_matrix(curves, 'srvt', QUICK).values
    assert np.all(elastic <= rigid + 1e-12)


def test_signature_entries_are_bounded(small_dataset):
    dm = analysis.distance_matrix(small_dataset.curves(), 'signature')
    assert np.all((dm.values >= 0.0) & (dm.values <= 2.0))


def test_signature_matrix_ignores_reparameterization(make_curve, make_warp):
    curves = [make_curve(5, 2) for _ in range(4)]
    warped = [cv.reparameterize(c, make_warp()) for c in curves]
    a = analysis.distance_matrix(curves, 'signature').values
    b = analysis.distance_matrix(warped, 'signature').values
    assert np.max(np.abs(a - b)) <= 1e-10


def test_warp_only_classes_collapse_but_stay_apart_under_signature():
    ds = synth_classes(seed=2, classes=2, clips_per_class=3, joints=2, frames=40, noise=0.0)
    dm = analysis.distance_matrix(ds.curves(), 'signature')
    labels = np.array(ds.labels)
    assert np.max(dm.values[labels[:, None] == labels[None, :]]) <= 1e-8
    assert np.min(dm.values[labels[:, None] != labels[None, :]]) > 0.1


def test_failing_curve_is_reported_with_its_index(make_curve):
    still = cv.from_frames([lie.identity_pose(2)] * 3)
    with pytest.raises(PairComputationError) as info:
        analysis.distance_matrix([make_curve(3, 2), still], 'srvt', ids=['moving', 'still'])
    assert (info.value.i, info.value.j) == (1, 1)
    assert info.value.exit_code == 3
    assert 'still' in str(info.value)


def test_matrix_preconditions(make_curve):
    with pytest.raises(TooFewPoints):
        analysis.distance_matrix([make_curve()], 'signature')
    with pytest.raises(InvalidParameter):
        analysis.distance_matrix([make_curve(), make_curve()], 'nonsense')
    with pytest.raises(InvalidParameter):
        analysis.distance_matrix([make_curve(), make_curve()], 'signature', DistanceParams(level=9))
    with pytest.raises(LabelMismatch):
        analysis.distance_matrix([make_curve(), make_curve()], 'signature', ids=['only'])
    with pytest.raises(DataError):
        analysis.distance_matrix([make_curve(3, 1), make_curve(3, 2)], 'signature')


def test_metadata_params_follow_the_method():
    assert set(QUICK.for_method(Method.SRVT_DP)) == {'grid', 'max_step', 'penalty', 'symmetric', 'joint_weights'}
    assert QUICK.for_method(Method.SIGNATURE)['level'] == 3


# --- DistanceMatrix ---------------------------------------------------------

@pytest.mark.parametrize('values, error', [
    ([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0]], DataError),
    ([[0.0, -1.0], [-1.0, 0.0]], DataError),
    ([[1e-15, 1.0], [1.0, 0.0]], DataError),
    ([[0.0, 1.0], [1.0 + 1e-9, 0.0]], DataError),
    ([[0.0, np.nan], [np.nan, 0.0]], DataError),
])
def test_distance_matrix_validation(values, error):
    with pytest.raises(error):
        DistanceMatrix(values, [str(i) for i in range(len(values))])


def test_distance_matrix_id_count():
    with pytest.raises(LabelMismatch):
        DistanceMatrix(np.zeros((2, 2)), ['a'])


def test_csv_reads_back_losslessly(small_dataset, tmp_path):
    dm = analysis.distance_matrix(small_dataset.curves(), 'signature', ids=small_dataset.ids)
    path = str(tmp_path / 'd.csv')
    dm.to_csv(path)
    again = DistanceMatrix.from_csv(path)
    assert again.ids == dm.ids
    np.testing.assert_array_equal(again.values, dm.values)


def test_csv_row_ids_must_match_columns(tmp_path):
    path = tmp_path / 'd.csv'
    path.write_text(',a,b\na,0.0,1.0\nc,1.0,0.0\n')
    with pytest.raises(LabelMismatch) as info:
        DistanceMatrix.from_csv(str(path))
    assert info.value.path == str(path) and info.value.line == 3


def test_csv_rejects_text_cells(tmp_path):
    path = tmp_path / 'd.csv'
    path.write_text(',a,b\na,0.0,x\nb,1.0,0.0\n')
    with pytest.raises(DataError) as info:
        DistanceMatrix.from_csv(str(path))
    assert info.value.line == 2


# --- MDS ----------------------------------------------------------------------

def test_mds_two_points():
    emb = analysis.classical_mds(_line_matrix([0.0, 1.0]), dim=1)
    np.testing.assert_allclose(emb.coords[:, 0], [0.5, -0.5], atol=1e-12)


def test_mds_equilateral_triangle():
    d = np.ones((3, 3)) - np.eye(3)
    emb = analysis.classical_mds(DistanceMatrix(d, ['a', 'b', 'c']))
    np.testing.assert_allclose(squareform(pdist(emb.coords)), d, atol=1e-9)
    np.testing.assert_allclose(emb.coords.mean(axis=0), 0.0, atol=1e-12)


def test_mds_recovers_planar_configuration(rng):
    points = rng.normal(size=(10, 2)) * [3.0, 1.0]
    dm = DistanceMatrix(squareform(pdist(points)), [f'p{i}' for i in range(10)])
    emb = analysis.classical_mds(dm)
    planted = points - points.mean(axis=0)
    rotation, _ = orthogonal_procrustes(emb.coords, planted)
    rmsd = np.sqrt(np.mean(np.sum((emb.coords @ rotation - planted) ** 2, axis=1)))
    assert rmsd <= 1e-8
    assert emb.eigenvalues[0] >= emb.eigenvalues[1] > 0
    assert emb.negative_mass <= 1e-10


def test_mds_sign_convention_is_deterministic(rng):
    points = rng.normal(size=(6, 2))
    emb = analysis.classical_mds(DistanceMatrix(squareform(pdist(points)), list('abcdef')))
    for axis in range(2):
        first = emb.coords[np.flatnonzero(np.abs(emb.coords[:, axis]) > 1e-12)[0], axis]
        assert first > 0


def test_mds_reports_non_euclidean_mass():
    d = np.ones((4, 4)) - np.eye(4)
    assert analysis.classical_mds(DistanceMatrix(d, list('abcd'))).negative_mass <= 1e-12
    # breaks the triangle inequality
    d[0, 2] = d[2, 0] = 3.0
    skewed = analysis.classical_mds(DistanceMatrix(d, list('abcd')))
    assert skewed.negative_mass > 1e-3
    assert skewed.eigenvalues[-1] < 0


def test_mds_needs_enough_points():
    with pytest.raises(TooFewPoints):
        analysis.classical_mds(_line_matrix([0.0, 1.0]), dim=2)
    with pytest.raises(InvalidParameter):
        analysis.classical_mds(_line_matrix([0.0, 1.0, 2.0]), dim=0)


# --- classification statistics ----------------------------------------------

def test_knn_on_a_line():
    dm = _line_matrix([0.0, 1.0, 3.0, 10.0])
    assert analysis.loo_knn_accuracy(dm, ['a', 'a', 'b', 'b']) == pytest.approx(0.75)


def test_knn_ties_go_to_the_earliest_neighbour():
    dm = DistanceMatrix(np.ones((3, 3)) - np.eye(3), ['x', 'y', 'z'])
    assert analysis.loo_knn_accuracy(dm, ['a', 'b', 'a'], k=2) == pytest.approx(1 / 3)


def test_knn_on_block_matrix():
    dm, labels = _block_matrix()
    assert analysis.loo_knn_accuracy(dm, labels) == 1.0
    assert analysis.loo_knn_accuracy(dm, labels, k=5) == 1.0
    assert analysis.loo_knn_accuracy(dm, ['same'] * dm.n) == 1.0


def test_knn_with_shuffled_labels_is_near_chance():
    dm, labels = _block_matrix(per_class=30)
    shuffled = list(np.random.default_rng(11).permutation(labels))
    accuracy = analysis.loo_knn_accuracy(dm, shuffled)
    sigma = np.sqrt((1 / 3) * (2 / 3) / dm.n)
    assert abs(accuracy - 1 / 3) <= 3 * sigma


def test_knn_argument_checks():
    dm, labels = _block_matrix()
    with pytest.raises(LabelMismatch):
        analysis.loo_knn_accuracy(dm, labels[:-1])
    with pytest.raises(InvalidParameter):
        analysis.loo_knn_accuracy(dm, labels, k=0)


def test_silhouette_on_block_matrix():
    dm, labels = _block_matrix()
    assert analysis.silhouette(dm, labels) >= 0.9


def test_silhouette_matches_hand_computation(rng):
    points = np.concatenate([rng.normal(size=(5, 2)), rng.normal(size=(6, 2)) + 2.0])
    labels = ['a'] * 5 + ['b'] * 6
    dm = DistanceMatrix(squareform(pdist(points)), [str(i) for i in range(11)])
    assert analysis.silhouette(dm, labels) == pytest.approx(_silhouette_by_hand(dm.values, labels), abs=1e-12)


def test_silhouette_of_interleaved_identical_classes_is_zero():
    d = np.ones((6, 6)) - np.eye(6)
    assert analysis.silhouette(DistanceMatrix(d, list('abcdef')), list('xyxyxy')) == pytest.approx(0.0, abs=1e-12)


def test_statistics_are_scale_free():
    dm, labels = _block_matrix()
    labels[0], labels[10] = labels[10], labels[0]
    scaled = DistanceMatrix(dm.values * 3.7, dm.ids)
    assert analysis.silhouette(scaled, labels) == pytest.approx(analysis.silhouette(dm, labels))
    assert analysis.loo_knn_accuracy(scaled, labels) == analysis.loo_knn_accuracy(dm, labels)


def test_silhouette_degenerate_classes():
    dm, labels = _block_matrix()
    with pytest.raises(DegenerateClass):
        analysis.silhouette(dm, ['one'] * dm.n)
    with pytest.raises(DegenerateClass):
        analysis.silhouette(dm, ['lonely'] + labels[1:])


def test_silhouette_keeps_labels_of_different_types_apart():
    dm, _ = _block_matrix(classes=2, per_class=4)
    mixed = [1] * 4 + ['1'] * 4
    assert analysis.silhouette(dm, mixed) == pytest.approx(analysis.silhouette(dm, ['a'] * 4 + ['b'] * 4))
    assert analysis.silhouette(dm, mixed) >= 0.9


# --- timing -------------------------------------------------------------------

def test_time_methods(small_dataset):
    result = analysis.time_methods(small_dataset.curves(), ['srvt', 'signature'], QUICK)
    assert set(result.seconds) == {'srvt', 'signature'}
    assert result.n_curves == 6
    assert result.ratio is None
    both = analysis.time_methods(small_dataset.curves(), ['srvt_dp', 'signature'], QUICK)
    assert both.ratio > 0


# --- end-to-end clustering and speed (slow) --------------------------------------

@pytest.fixture(scope='module')
def default_dataset():
    return synth_classes(seed=0)


@pytest.mark.slow
def test_clusters_are_separated_by_both_shape_distances(default_dataset):
    curves, labels = default_dataset.curves(), default_dataset.labels
    for method in ('signature', 'srvt_dp'):
        dm = analysis.distance_matrix(curves, method)
        assert analysis.loo_knn_accuracy(dm, labels) >= 0.9


@pytest.mark.slow
def test_elastic_distance_tightens_clusters(default_dataset):
    curves, labels = default_dataset.curves(), default_dataset.labels
    elastic = analysis.silhouette(analysis.distance_matrix(curves, 'srvt_dp'), labels)
    rigid = analysis.silhouette(analysis.distance_matrix(curves, 'srvt'), labels)
    assert elastic >= rigid


@pytest.mark.slow
def test_signature_is_much_faster_than_elastic_matching():
    ds = synth_classes(seed=5, classes=3, clips_per_class=10, joints=10, frames=60)
    curves = ds.curves()
    # compile the DP kernel before timing
    analysis.distance_matrix(curves[:2], 'srvt_dp', parallel=False)
    result = analysis.time_methods(curves, ['srvt_dp', 'signature'])
    assert result.ratio >= 10.0
