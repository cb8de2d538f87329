import json

import pytest

from sigshape.core.errors import DataError, InvalidParameter, UsageError
from sigshape.core.reparam import DEFAULT_GRID_SIZE
from sigshape.ui.settings_manager import RunConfig, SettingsManager


@pytest.fixture
def manager():
    return SettingsManager()


def test_defaults(manager):
    config = manager.build({})
    assert config.method == 'signature'
    assert (config.level, config.grid, config.max_step) == (3, DEFAULT_GRID_SIZE, 4)
    assert config.symmetric and config.parallel and not config.per_joint
    assert config.workers >= 1


def test_flags_override_file_and_none_does_not(manager, tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'method': 'srvt_dp', 'grid': 32, 'joints': 'a, b'}))
    config = manager.build({'grid': 16, 'level': None, 'command': 'distmat'}, str(path))
    assert config.method == 'srvt_dp'
    assert config.grid == 16
    assert config.level == 3
    assert config.joints == ['a', 'b']


def test_ini_values_are_converted(manager, tmp_path):
    path = tmp_path / 'run.ini'
    path.write_text('[SETTINGS]\nsymmetric = no\nweights = 1, 2.5\npenalty = 0.5\nout =\n')
    config = manager.build({}, str(path))
    assert config.symmetric is False
    assert config.weights == [1.0, 2.5]
    assert config.penalty == 0.5
    assert config.out is None


def test_ini_needs_settings_section(manager, tmp_path):
    path = tmp_path / 'run.ini'
    path.write_text('[OTHER]\nmethod = srvt\n')
    with pytest.raises(UsageError):
        manager.build({}, str(path))


@pytest.mark.parametrize('content', [
    {'colour': 'blue'},
    {'grid': 'many'},
    {'parallel': 'perhaps'},
])
def test_bad_settings(manager, tmp_path, content):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps(content))
    with pytest.raises(UsageError):
        manager.build({}, str(path))


def test_missing_config_file(manager, tmp_path):
    with pytest.raises(DataError):
        manager.build({}, str(tmp_path / 'absent.json'))


@pytest.mark.parametrize('flags', [
    {'method': 'nonsense'},
    {'level': 0},
    {'level': 7},
    {'grid': 1},
    {'max_step': 0},
    {'penalty': -1.0},
    {'workers': 0},
    {'k': 0},
    {'dim': 0},
    {'format': 'xml'},
    {'weights': [1.0, -2.0]},
    {'weights': [1.0, 2.0], 'joints': ['a']},
])
def test_validation(manager, flags):
    with pytest.raises(InvalidParameter):
        manager.build(flags)


def test_method_is_normalized(manager):
    assert manager.build({'method': ' SRVT_DP '}).method == 'srvt_dp'


def test_distance_params():
    params = RunConfig(grid=8, max_step=2, penalty=0.25, symmetric=False, weights=[1.0, 3.0]).distance_params()
    assert (params.grid, params.max_step, params.penalty, params.symmetric) == (8, 2, 0.25, False)
    assert params.joint_weights == (1.0, 3.0)
    assert len(params.dp_grid().steps) == 4
