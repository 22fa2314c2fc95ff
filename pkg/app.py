import os
import sys
import json
import logging
import argparse
import traceback

import pandas as pd

from config import get_config
from utils import __version__
from utils.cache import GraphCache, RunManifest, atomic_write, hash_bytes, hash_inputs, log_audit_event
from utils.community import DETECTORS, detect, modularity
from utils.errors import EgoMapError, UsageError
from utils.evaluation import (
    community_confusion,
    f_beta,
    partition_similarity,
    precision,
    recall,
    recovered_blocks,
    identified_fraction,
)
from utils.graph import undirected_projection
from utils.interest_map import MapConfig, build_interest_map
from utils.io import (
    EXPORT_FORMATS,
    dump_partition,
    export_map,
    load_graph,
    load_partition,
    parse_edges,
    parse_metadata,
    read_text,
    render_edges,
    render_metadata,
)
from utils.synthetic import EGO_ID, planted_ego_network

logger = logging.getLogger('egomap.app')

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting so usage errors map to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class EgoMapApp:
    """Command surface: subcommands registered with :meth:`command`."""

    def __init__(self, cfg):
        self.config = cfg
        self.parser = _Parser(prog='egomap', description='Interest maps from social ego networks.')
        self.parser.add_argument('--version', action='version', version=f'egomap {__version__}')
        self.subparsers = self.parser.add_subparsers(dest='subcommand', parser_class=_Parser)
        self.handlers = {}

    @property
    def cache(self) -> GraphCache:
        cache_dir = os.environ.get('EGOMAP_CACHE_DIR') or self.config.CACHE_DIR
        return GraphCache(cache_dir, enabled=self.config.CACHE_ENABLED)

    def command(self, name, help, arguments=()):
        """Register ``func(args)`` as subcommand ``name`` with (flags, kwargs) ``arguments``."""
        def decorator(func):
            sub = self.subparsers.add_parser(name, help=help)
            for flags, kwargs in arguments:
                sub.add_argument(*flags, **kwargs)
            self.handlers[name] = func
            return func
        return decorator

    def audit(self, event):
        if self.config.AUDIT_ENABLED:
            try:
                log_audit_event(self.config.LOGS_DIR, event)
            except OSError as e:
                logger.warning("could not write audit event: %s", e)

    def run(self, argv=None):
        argv = list(sys.argv[1:] if argv is None else argv)
        try:
            args = self.parser.parse_args(argv)
        except UsageError as e:
            print(f"egomap: error: {e}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        except SystemExit as e:
            # --help / --version
            return int(e.code or 0)
        if not args.subcommand:
            self.parser.print_usage(sys.stderr)
            return EXIT_INPUT_ERROR

        event = {'event': 'command', 'subcommand': args.subcommand}
        try:
            status = self.handlers[args.subcommand](args) or EXIT_OK
            event['status'] = 'ok'
        except (EgoMapError, OSError) as e:
            print(f"egomap: error: {e}", file=sys.stderr)
            event.update(status='input_error', error=str(e))
            status = EXIT_INPUT_ERROR
        except Exception as e:
            logger.error("internal error: %s\n%s", e, traceback.format_exc())
            print(f"egomap: internal error: {e}", file=sys.stderr)
            event.update(status='internal_error', error=str(e))
            status = EXIT_INTERNAL_ERROR
        if getattr(args, 'input_hash', None):
            event['input_hash'] = args.input_hash
        self.audit(event)
        return status


def _configure_logging(level):
    root = logging.getLogger('egomap')
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
        root.addHandler(handler)
    root.setLevel(level)


def create_app(config_name=None):
    """Application factory pattern"""
    cfg = get_config(config_name)
    _configure_logging(cfg.LOG_LEVEL)
    app = EgoMapApp(cfg)
    register_commands(app)
    return app


def _write_output(path, data):
    if path in (None, '-'):
        sys.stdout.write(data.decode('utf-8'))
    else:
        atomic_write(path, data)


def register_commands(app):
    """Register all subcommands with the app"""
    cfg = app.config

    def load_inputs(args):
        paths = [args.edges] + ([args.meta] if getattr(args, 'meta', None) else [])
        key = hash_inputs(paths)
        graph = app.cache.get(key)
        if graph is None:
            edges = parse_edges(read_text(args.edges))
            meta = parse_metadata(read_text(args.meta)) if getattr(args, 'meta', None) else None
            graph = load_graph(edges, meta)
            app.cache.put(key, graph)
        args.input_hash = key
        return graph, key, paths

    edges_arg = (('--edges',), dict(required=True, help='CSV edge list with header source,target'))
    meta_arg = (('--meta',), dict(help='JSONL profile metadata'))
    detector_arg = (('--detector',), dict(choices=DETECTORS, default=cfg.DETECTOR))
    seed_arg = (('--seed',), dict(type=int, default=cfg.SEED))
    walk_arg = (('--walk-length',), dict(type=int, default=cfg.WALK_LENGTH, dest='walk_length'))

    @app.command('ingest', 'validate inputs and cache the graph', [edges_arg, meta_arg])
    def ingest(args):
        paths = [args.edges] + ([args.meta] if args.meta else [])
        key = hash_inputs(paths)
        hit = app.cache.get(key) is not None
        graph, _, _ = load_inputs(args)
        logger.info("ingested %d vertices, %d edges", len(graph), len(graph.edges))
        print(f"vertices={len(graph)} edges={len(graph.edges)} hash={key} cache={'hit' if hit else 'miss'}")

    @app.command('detect', 'partition the whole graph and report modularity', [
        edges_arg, meta_arg, detector_arg, seed_arg, walk_arg,
        (('--k',), dict(type=int, help='girvan-newman: stop at this many communities')),
        (('--out',), dict(help='write the partition as JSON')),
    ])
    def detect_cmd(args):
        if args.k is not None and args.detector != 'girvan-newman':
            raise UsageError(f"--k applies only to girvan-newman, not {args.detector}")
        graph, _, _ = load_inputs(args)
        undirected = undirected_projection(graph)
        partition = detect(undirected, args.detector, seed=args.seed, walk_length=args.walk_length,
                           k=args.k, max_workers=cfg.MAX_WORKERS)
        print(f"communities: {partition.k}")
        for idx, members in enumerate(partition.communities()):
            print(f"{idx}: {' '.join(sorted(members))}")
        if undirected.m > 0:
            print(f"Q={modularity(undirected, partition).q:.6f}")
        if args.out:
            _write_output(args.out, dump_partition(partition))

    @app.command('map', 'build the interest map of one ego', [
        edges_arg, meta_arg, detector_arg, seed_arg, walk_arg,
        (('--ego',), dict(required=True)),
        (('--min-size',), dict(type=int, default=cfg.MIN_COMMUNITY_SIZE, dest='min_size')),
        (('--top-k',), dict(type=int, default=cfg.LABEL_TOP_K, dest='top_k')),
        (('--format',), dict(choices=EXPORT_FORMATS, default='json')),
        (('--out',), dict(default='-')),
    ])
    def map_cmd(args):
        graph, key, paths = load_inputs(args)
        map_cfg = MapConfig.from_config(
            cfg, detector=args.detector, min_community_size=args.min_size,
            label_top_k=args.top_k, walk_length=args.walk_length, seed=args.seed,
        )
        interest_map = build_interest_map(graph, args.ego, map_cfg, max_workers=cfg.MAX_WORKERS)
        data = export_map(interest_map, args.format)
        _write_output(args.out, data)
        if args.out != '-':
            manifest = RunManifest(paths, map_cfg.to_dict(), __version__, key, output_hash=hash_bytes(data))
            atomic_write(args.out + '.manifest.json', manifest.to_json())

    @app.command('synth', 'write a planted-partition ego network and its truth', [
        (('--blocks',), dict(type=int, default=2)),
        (('--block-size',), dict(type=int, default=10, dest='block_size')),
        (('--p-in',), dict(type=float, default=0.5, dest='p_in')),
        (('--p-out',), dict(type=float, default=0.02, dest='p_out')),
        seed_arg,
        (('--out-dir',), dict(required=True, dest='out_dir')),
    ])
    def synth(args):
        graph, planted = planted_ego_network(args.blocks, args.block_size, args.p_in, args.p_out, args.seed)
        os.makedirs(args.out_dir, exist_ok=True)
        meta = {v: m for v, m in graph.meta.items()}
        atomic_write(os.path.join(args.out_dir, 'edges.csv'), render_edges(sorted(graph.edges)).encode('utf-8'))
        atomic_write(os.path.join(args.out_dir, 'meta.jsonl'), render_metadata(meta).encode('utf-8'))
        atomic_write(os.path.join(args.out_dir, 'truth.json'), dump_partition(planted.truth))
        print(f"wrote {len(planted.graph)} vertices, {planted.graph.m} edges, ego={EGO_ID} to {args.out_dir}")

    @app.command('eval', 'compare a detected partition with planted truth', [
        (('--pred',), dict(required=True)),
        (('--truth',), dict(required=True)),
        (('--format',), dict(choices=('text', 'json'), default='text')),
    ])
    def eval_cmd(args):
        pred = load_partition(read_text(args.pred))
        truth = load_partition(read_text(args.truth))
        nmi, ari = partition_similarity(pred, truth)
        counts = community_confusion(pred, truth)
        report = {
            'precision': precision(counts),
            'recall': recall(counts),
            'f0.5': f_beta(counts, 0.5),
            'nmi': nmi,
            'ari': ari,
            'identified_fraction': identified_fraction(recovered_blocks(pred, truth), truth.k),
        }
        if args.format == 'json':
            print(json.dumps({k: round(v, 6) for k, v in report.items()}, indent=2))
        else:
            print(pd.Series(report).to_string(float_format=lambda x: f"{x:.6f}"))

    return app


def cli_dispatch(argv=None, config_name=None):
    return create_app(config_name).run(argv)
