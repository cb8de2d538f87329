# Command-line interface for SigShape
import argparse
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

from sigshape import __version__
from sigshape.core import analysis
from sigshape.core.analysis import DistanceMatrix, Method
from sigshape.core.errors import (DataError, InvalidParameter, LabelMismatch, SigShapeError,
                                  UsageError)
from sigshape.core.file_handler import STDIO, FileHandler
from sigshape.core.selftest import run_selftest
from sigshape.mocap import clips as clipio
from sigshape.mocap.amc import parse_amc
from sigshape.mocap.asf import parse_asf
from sigshape.mocap.synth import (DEFAULT_CLASSES, DEFAULT_CLIPS_PER_CLASS, DEFAULT_FRAMES,
                                  DEFAULT_JOINTS, DEFAULT_NOISE, synth_classes)
from sigshape.ui.output_framer import print_boxed_output
from sigshape.ui.settings_manager import RunConfig, SettingsManager
from sigshape.utils import colors
from sigshape.utils.colors import error, info, print_progress, success, warning

# Get logger for this module
logger = logging.getLogger('SigShape.cli')

EXIT_OK = 0
EXIT_INTERRUPTED = 130


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- parser -------------------------------------------------------------------

def _common_parent() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    parent.add_argument('--config', metavar='PATH', help='JSON or INI ([SETTINGS]) config file')
    parent.add_argument('--log-file', metavar='PATH', help='log file (default sigshape.log)')
    parent.add_argument('--no-color', action='store_true', help='plain status output')
    parent.add_argument('--out', metavar='PATH', help="output file ('-' or omitted: stdout)")
    parent.add_argument('--seed', type=int, help='random seed')
    return parent


def _synthetic_parent() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    group = parent.add_argument_group('synthetic data')
    group.add_argument('--synthetic', action='store_true', help='generate a seeded synthetic dataset')
    group.add_argument('--classes', type=int, default=DEFAULT_CLASSES)
    group.add_argument('--clips-per-class', type=int, default=DEFAULT_CLIPS_PER_CLASS)
    group.add_argument('--synth-joints', type=int, default=DEFAULT_JOINTS)
    group.add_argument('--frames', type=int, default=DEFAULT_FRAMES)
    group.add_argument('--noise', type=float, default=DEFAULT_NOISE)
    group.add_argument('--no-warps', action='store_true', help='skip the random time warps')
    return parent


def _method_parent() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    group = parent.add_argument_group('distance')
    group.add_argument('--method', help='srvt | srvt_dp | signature')
    group.add_argument('--level', type=int, help='signature truncation level N')
    group.add_argument('--grid', type=int, help='DP grid size M')
    group.add_argument('--max-step', type=int, help='largest DP step in either direction')
    group.add_argument('--penalty', type=float, help='DP step penalty weight')
    group.add_argument('--one-sided', dest='symmetric', action='store_const', const=False,
                       help='run the DP in one argument order only')
    group.add_argument('--per-joint', action='store_const', const=True,
                       help='concatenate per-joint log-signatures')
    group.add_argument('--joints', help='comma-separated joint subset')
    group.add_argument('--weights', help='comma-separated per-joint weights')
    group.add_argument('--no-parallel', dest='parallel', action='store_const', const=False,
                       help='compute matrix cells sequentially')
    group.add_argument('--workers', type=int, help='threads for matrix cells')
    return parent


def build_parser() -> ArgumentParser:
    common = _common_parent()
    synthetic = _synthetic_parent()
    method = _method_parent()

    parser = ArgumentParser(prog='sigshape', description='Shape analysis of motion capture animations on SO(3)^d.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=ArgumentParser)
    sub.required = True

    p = sub.add_parser('ingest', parents=[common, synthetic], help='ASF/AMC or JSON clips -> canonical clip JSON')
    p.add_argument('inputs', nargs='*', help='AMC files (with --asf) or clip JSON files')
    p.add_argument('--asf', metavar='PATH', help='skeleton for AMC inputs')
    p.add_argument('--label', help='label for every AMC clip')
    p.add_argument('--frame-rate', type=float, default=120.0)
    p.add_argument('--joints', help='comma-separated joint subset')

    p = sub.add_parser('distmat', parents=[common, synthetic, method], help='distance matrix of clips')
    p.add_argument('inputs', nargs='*', help='clip JSON files')
    p.add_argument('--format', help='csv | json')

    p = sub.add_parser('mds', parents=[common], help='classical MDS of a distance CSV')
    p.add_argument('matrix', help='distance CSV')
    p.add_argument('--labels', metavar='PATH', help='labels: clip JSON, metadata JSON or id,label CSV')
    p.add_argument('--dim', type=int)
    p.add_argument('--svg', metavar='PATH', help='write a scatter plot')

    p = sub.add_parser('classify', parents=[common], help='leave-one-out accuracy and silhouette')
    p.add_argument('matrix', help='distance CSV')
    p.add_argument('--labels', metavar='PATH', help='labels: clip JSON, metadata JSON or id,label CSV')
    p.add_argument('--k', type=int)

    p = sub.add_parser('bench', parents=[common, synthetic, method], help='time distance methods')
    p.add_argument('inputs', nargs='*', help='clip JSON files (default: synthetic data)')
    p.add_argument('--methods', default='srvt_dp,signature', help='comma-separated methods to time')

    p = sub.add_parser('selftest', parents=[common], help='run the embedded property checks')
    p.add_argument('--trials', type=int, default=10)
    return parser


# --- helpers --------------------------------------------------------------------

def _split(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [v.strip() for v in value.split(',') if v.strip()]


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {k: v for k, v in vars(args).items()}
    if isinstance(flags.get('joints'), str):
        flags['joints'] = _split(flags['joints'])
    if isinstance(flags.get('weights'), str):
        try:
            flags['weights'] = [float(w) for w in _split(flags['weights'])]
        except ValueError:
            raise InvalidParameter(f"--weights must be comma-separated numbers, got {args.weights!r}") from None
    return flags


def _out_path(config: RunConfig) -> str:
    return config.out or STDIO


def _synthetic(args: argparse.Namespace, config: RunConfig) -> clipio.LabeledDataset:
    info(f"Generating {args.classes} x {args.clips_per_class} synthetic clips (seed {config.seed})")
    return synth_classes(seed=config.seed, classes=args.classes, clips_per_class=args.clips_per_class,
                         joints=args.synth_joints, frames=args.frames, noise=args.noise,
                         warps=not args.no_warps)


def _load_clips(paths: Sequence[str]) -> clipio.LabeledDataset:
    loaded = []
    for path in paths:
        loaded.extend(clipio.read_dataset(path).clips)
    return clipio.LabeledDataset(loaded)


def _dataset(args: argparse.Namespace, config: RunConfig, default_synthetic: bool = False) -> clipio.LabeledDataset:
    if args.synthetic or (default_synthetic and not args.inputs):
        if args.inputs:
            raise UsageError("--synthetic cannot be combined with input files")
        return _synthetic(args, config)
    if not args.inputs:
        raise UsageError(f"{args.command}: give clip files or --synthetic")
    return _load_clips(args.inputs)


def _curves(dataset: clipio.LabeledDataset, config: RunConfig):
    if len(dataset) == 0:
        raise DataError("no clips to compare")
    curves = dataset.curves(config.joints)
    if config.weights and len(config.weights) != curves[0].d:
        raise InvalidParameter(f"--weights has {len(config.weights)} entries for {curves[0].d} joints")
    return curves


def _read_labels(path: str, ids: Sequence[str]) -> List[str]:
    """Labels for ids from a clip dataset, a distance metadata file or an id,label CSV."""
    handler = FileHandler()
    if path.lower().endswith('.csv'):
        mapping = {}
        for line, row in handler.read_csv(path):
            if len(row) < 2:
                raise DataError("expected id,label", path, line)
            mapping[row[0]] = row[1]
    else:
        data = handler.read_json(path)
        if isinstance(data, dict) and 'labels' in data and 'ids' in data:
            mapping = dict(zip(data['ids'], data['labels']))
        else:
            try:
                dataset = clipio.dataset_from_dict(data)
            except DataError as e:
                raise e.with_location(path)
            mapping = dict(zip(dataset.ids, dataset.labels))
    missing = [i for i in ids if mapping.get(i) is None]
    if missing:
        raise LabelMismatch(f"no label for clip(s) {', '.join(missing[:5])}", path)
    return [str(mapping[i]) for i in ids]


def _labels_for(matrix_path: str, labels_path: Optional[str], ids: Sequence[str],
                required: bool) -> Optional[List[str]]:
    handler = FileHandler()
    if labels_path:
        return _read_labels(labels_path, ids)
    sidecar = handler.metadata_path(matrix_path)
    if os.path.exists(sidecar):
        meta = handler.read_json(sidecar)
        if meta.get('labels') and all(label is not None for label in meta['labels']):
            return _read_labels(sidecar, ids)
    if required:
        raise UsageError("labels needed: pass --labels or keep the matrix's .meta.json sidecar")
    return None


# --- subcommands ----------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace, config: RunConfig) -> int:
    if args.synthetic:
        dataset = _synthetic(args, config)
    else:
        if not args.inputs:
            raise UsageError("ingest: give AMC/JSON files or --synthetic")
        skeleton = None
        if args.asf:
            skeleton = parse_asf(FileHandler().read_text(args.asf), args.asf)
        found = []
        for path in args.inputs:
            if path.lower().endswith('.amc'):
                if skeleton is None:
                    raise UsageError("--asf is required for AMC inputs")
                stem = os.path.splitext(os.path.basename(path))[0]
                clip = parse_amc(FileHandler().read_text(path), skeleton, stem, args.frame_rate,
                                 args.label, path)
                found.append(clipio.from_animation(clip, skeleton, config.joints))
            else:
                found.extend(clipio.read_dataset(path).clips)
        dataset = clipio.LabeledDataset(found)

    clipio.write_dataset(_out_path(config), dataset)
    lines = [f"{c.clip_id}: {c.n_frames} frames, {c.d} joints, label {c.label or '-'}" for c in dataset]
    print_boxed_output(f"{len(dataset)} clips", lines)
    return EXIT_OK


def cmd_distmat(args: argparse.Namespace, config: RunConfig) -> int:
    dataset = _dataset(args, config)
    curves = _curves(dataset, config)
    info(f"Computing {config.method} distances for {len(curves)} clips")
    dm = analysis.distance_matrix(curves, config.method, config.distance_params(), dataset.ids,
                                  parallel=config.parallel, workers=config.workers)
    out = _out_path(config)
    if config.format == 'json':
        dm.to_json(out)
    else:
        dm.to_csv(out)
    FileHandler().write_metadata(out, {
        'method': dm.method.value,
        'params': dm.params,
        'ids': list(dm.ids),
        'labels': dataset.labels,
        'build_seconds': dm.build_seconds,
        'joints': config.joints,
        'seed': config.seed,
    })
    success(f"{dm.n}x{dm.n} matrix built in {dm.build_seconds:.3f}s")
    return EXIT_OK


def cmd_mds(args: argparse.Namespace, config: RunConfig) -> int:
    dm = DistanceMatrix.from_csv(args.matrix)
    labels = _labels_for(args.matrix, args.labels, dm.ids, required=False)
    embedding = analysis.classical_mds(dm, config.dim)
    rows = [['id'] + [f'mds{k + 1}' for k in range(config.dim)]]
    for name, point in zip(dm.ids, embedding.coords):
        rows.append([name] + [repr(float(x)) for x in point])
    FileHandler().write_csv(_out_path(config), rows)
    if embedding.negative_mass > 0:
        warning(f"Distances are not Euclidean: negative eigenvalue mass {embedding.negative_mass:.3g}")
    if config.svg:
        from sigshape.ui.plotting import scatter_svg
        FileHandler().write_text(config.svg, scatter_svg(embedding.coords, labels, os.path.basename(args.matrix)))
        success(f"Scatter plot written to {config.svg}")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    dm = DistanceMatrix.from_csv(args.matrix)
    labels = _labels_for(args.matrix, args.labels, dm.ids, required=True)
    report = {
        'n': dm.n,
        'k': config.k,
        'accuracy': analysis.loo_knn_accuracy(dm, labels, config.k),
        'silhouette': analysis.silhouette(dm, labels),
    }
    FileHandler().write_text(_out_path(config), json.dumps(report, indent=2, sort_keys=True) + '\n')
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: RunConfig) -> int:
    dataset = _dataset(args, config, default_synthetic=True)
    curves = _curves(dataset, config)
    methods = [Method.parse(m) for m in _split(args.methods) or []]
    if not methods:
        raise UsageError("--methods must name at least one method")
    info(f"Timing {', '.join(m.value for m in methods)} on {len(curves)} clips (single-threaded)")
    result = analysis.time_methods(curves, methods, config.distance_params())
    report = {'n_curves': result.n_curves, 'seconds': result.seconds, 'ratio': result.ratio}
    FileHandler().write_text(_out_path(config), json.dumps(report, indent=2, sort_keys=True) + '\n')
    lines = [f"{name:<10} {seconds:10.3f} s" for name, seconds in result.seconds.items()]
    if result.ratio is not None:
        lines.append(f"srvt_dp / signature = {result.ratio:.1f}x")
    print_boxed_output('bench', lines)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace, config: RunConfig) -> int:
    results = run_selftest(config.seed, args.trials, progress=lambda r: print_progress(f"{r.name} ({r.seconds:.2f} s)"))
    lines = [f"{'ok  ' if r.passed else 'FAIL'} {r.name:<42} {r.worst:9.2e} <= {r.tolerance:g}" for r in results]
    print_boxed_output('selftest', lines)
    failed = [r for r in results if not r.passed]
    if failed:
        error(f"{len(failed)} of {len(results)} checks failed")
        return 3
    success(f"All {len(results)} checks passed")
    return EXIT_OK


COMMANDS = {
    'ingest': cmd_ingest,
    'distmat': cmd_distmat,
    'mds': cmd_mds,
    'classify': cmd_classify,
    'bench': cmd_bench,
    'selftest': cmd_selftest,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one subcommand and map failures to exit codes.

    Returns:
        int: 0 ok, 1 usage, 2 data, 3 numerical, 130 interrupted
    """
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        if args.no_color:
            colors.set_color(False)
        config = SettingsManager().build(_flags(args), args.config)
        if args.command == 'bench':
            config.parallel = False
        logger.info(f"Running {args.command}")
        return COMMANDS[args.command](args, config)
    except KeyboardInterrupt:
        warning("Interrupted")
        logger.warning("Interrupted by user")
        return EXIT_INTERRUPTED
    except SigShapeError as e:
        error(str(e))
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        return e.exit_code
    except OSError as e:
        error(f"I/O error: {e}")
        logger.error(f"I/O error: {e}", exc_info=True)
        return DataError.exit_code
