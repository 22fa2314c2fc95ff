"""File formats: CSV edges, JSONL profiles, partition JSON and interest-map exports."""
from __future__ import annotations

import csv
import io
import json
import logging
from typing import Dict, Iterable, List, NamedTuple, TextIO, Union

from .community import Partition
from .errors import ParseError, InvalidParameterError
from .graph import DirectedGraph, VertexMeta, build_graph
from .interest_map import InterestMap

logger = logging.getLogger('egomap.io')

EDGE_HEADER = ['source', 'target']
EXPORT_FORMATS = ('json', 'dot', 'graphml', 'html')


class EdgeRecord(NamedTuple):
    source: str
    target: str


def _text(stream: Union[str, TextIO]) -> str:
    return stream if isinstance(stream, str) else stream.read()


def parse_edges(stream: Union[str, TextIO]) -> List[EdgeRecord]:
    """CSV with a ``source,target`` header; blank lines skipped, bad rows reported by line number.

    Ids are kept exactly as the CSV reader yields them, so quoted fields may
    hold commas, newlines or surrounding spaces.
    """
    records: List[EdgeRecord] = []
    header_seen = False
    reader = csv.reader(io.StringIO(_text(stream), newline=''))
    lineno = 1
    try:
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                lineno = reader.line_num + 1
                continue
            if not header_seen:
                if [c.strip() for c in row] != EDGE_HEADER:
                    raise ParseError(lineno, f"expected header 'source,target', got {','.join(row)!r}")
                header_seen = True
            else:
                records.append(_edge_record(lineno, row))
            lineno = reader.line_num + 1
    except csv.Error as e:
        raise ParseError(lineno, f"malformed CSV: {e}")
    if not header_seen:
        raise ParseError(1, "missing header 'source,target'")
    return records


def _edge_record(lineno: int, row: List[str]) -> EdgeRecord:
    if len(row) != 2:
        raise ParseError(lineno, f"expected 2 columns, got {len(row)}")
    source, target = row
    if not source or not target:
        raise ParseError(lineno, "empty vertex id")
    if source == target:
        raise ParseError(lineno, f"self-loop on {source!r}")
    return EdgeRecord(source, target)


def read_text(path: str) -> str:
    """UTF-8 file contents; undecodable bytes are a ``ParseError`` naming line and byte offset."""
    with open(path, 'rb') as f:
        data = f.read()
    try:
        return data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data.count(b'\n', 0, e.start) + 1
        raise ParseError(line, f"invalid UTF-8 at byte {e.start} of {path}")


def render_edges(records: Iterable[EdgeRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(EDGE_HEADER)
    for source, target in records:
        writer.writerow([source, target])
    return buf.getvalue()


def parse_metadata(stream: Union[str, TextIO]) -> Dict[str, VertexMeta]:
    """One JSON object per line; duplicate ids keep the last record."""
    meta: Dict[str, VertexMeta] = {}
    # split on \n only: descriptions may hold U+2028, NEL or form feeds
    for lineno, line in enumerate(io.StringIO(_text(stream), newline='\n'), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(lineno, f"invalid JSON: {e.msg}")
        if not isinstance(obj, dict) or not obj.get('id'):
            raise ParseError(lineno, "missing 'id'")
        try:
            vm = VertexMeta(
                handle=str(obj.get('handle', '') or ''),
                description=str(obj.get('description', '') or ''),
                follower_count=int(obj.get('follower_count', 0) or 0),
            )
        except (TypeError, ValueError, InvalidParameterError) as e:
            raise ParseError(lineno, f"bad field value: {e}")
        vid = str(obj['id'])
        if vid in meta:
            logger.warning("duplicate metadata id %r on line %d; keeping the later record", vid, lineno)
        meta[vid] = vm
    return meta


def render_metadata(meta: Dict[str, VertexMeta]) -> str:
    lines = [
        json.dumps({'id': v, 'handle': m.handle, 'description': m.description,
                    'follower_count': m.follower_count}, ensure_ascii=False)
        for v, m in sorted(meta.items())
    ]
    return ''.join(line + '\n' for line in lines)


def load_graph(edges: List[EdgeRecord], meta: Dict[str, VertexMeta] | None = None) -> DirectedGraph:
    """With metadata every endpoint must be declared; without it endpoints define the vertex set."""
    if meta is None:
        ids = sorted({x for e in edges for x in e})
        return build_graph(ids, edges)
    return build_graph(meta.items(), edges)


# ---------------------------------------------------------------------------
# Graph and partition JSON
# ---------------------------------------------------------------------------

def graph_to_json(g: DirectedGraph) -> bytes:
    doc = {
        'vertices': [
            {'id': v, 'handle': m.handle, 'description': m.description, 'follower_count': m.follower_count}
            for v, m in g.meta.items()
        ],
        'edges': [list(e) for e in sorted(g.edges)],
    }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + '\n').encode('utf-8')


def graph_from_json(data: bytes) -> DirectedGraph:
    doc = json.loads(data.decode('utf-8'))
    return build_graph(doc['vertices'], [tuple(e) for e in doc['edges']])


def dump_partition(p: Partition) -> bytes:
    doc = {'assignment': {v: p.assignment[v] for v in sorted(p.assignment)}}
    return (json.dumps(doc, ensure_ascii=False, indent=2) + '\n').encode('utf-8')


def load_partition(data: Union[bytes, str]) -> Partition:
    text = data.decode('utf-8') if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
        assignment = {str(v): int(c) for v, c in doc['assignment'].items()}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as e:
        raise ParseError(1, f"not a partition document: {e}")
    groups: Dict[int, List[str]] = {}
    for v, c in assignment.items():
        groups.setdefault(c, []).append(v)
    return Partition.from_communities(groups.values())


# ---------------------------------------------------------------------------
# Interest-map export
# ---------------------------------------------------------------------------

def map_to_dict(m: InterestMap) -> dict:
    return {
        'ego': m.ego,
        'detector': m.detector,
        'groups': [
            {
                'community_id': g.community_id,
                'size': g.size,
                'label_terms': [{'term': t, 'weight': round(w, 6)} for t, w in g.label_terms],
                'members': sorted(g.members),
            }
            for g in m.groups
        ],
        'dropped_vertices': sorted(m.dropped_vertices),
    }


def _dot_quote(s: str) -> str:
    return '"' + s.replace('\\', '\\\\').replace('"', '\\"') + '"'


def _export_dot(m: InterestMap) -> str:
    lines = [f"graph interest_map {{", f"  label={_dot_quote(f'{m.ego} ({m.detector})')};"]
    for g in m.groups:
        label = ', '.join(t for t, _ in g.label_terms) or f"group {g.community_id}"
        lines.append(f"  subgraph cluster_{g.community_id} {{")
        lines.append(f"    label={_dot_quote(label)};")
        for v in sorted(g.members):
            lines.append(f"    {_dot_quote(v)};")
        lines.append("  }")
    for v in sorted(m.dropped_vertices):
        lines.append(f"  {_dot_quote(v)} [style=dashed];")
    lines.append("}")
    return '\n'.join(lines) + '\n'


def _export_graphml(m: InterestMap) -> str:
    import networkx as nx

    G = nx.Graph(ego=m.ego, detector=m.detector)
    for g in m.groups:
        label = ', '.join(t for t, _ in g.label_terms)
        for v in sorted(g.members):
            G.add_node(v, community=g.community_id, label=label)
    for v in sorted(m.dropped_vertices):
        G.add_node(v, community=-1, label='')
    return '\n'.join(nx.generate_graphml(G)) + '\n'


def _export_html(m: InterestMap) -> str:
    import plotly.graph_objs as go

    names = [', '.join(t for t, _ in g.label_terms[:3]) or f"group {g.community_id}" for g in m.groups]
    fig = go.Figure(go.Bar(
        x=[g.size for g in m.groups],
        y=names,
        orientation='h',
        hovertext=[', '.join(sorted(g.members)) for g in m.groups],
    ))
    fig.update_layout(
        title=f"Interest map for {m.ego} ({m.detector})",
        xaxis_title='members',
        yaxis=dict(autorange='reversed'),
    )
    return fig.to_html(full_html=True, include_plotlyjs='cdn')


def export_map(m: InterestMap, format: str = 'json') -> bytes:
    """Serialize an interest map. ``json`` and ``dot`` are canonical and byte-stable."""
    if format == 'json':
        text = json.dumps(map_to_dict(m), ensure_ascii=False, indent=2) + '\n'
    elif format == 'dot':
        text = _export_dot(m)
    elif format == 'graphml':
        text = _export_graphml(m)
    elif format == 'html':
        text = _export_html(m)
    else:
        raise InvalidParameterError('format', format, f'expected one of {list(EXPORT_FORMATS)}')
    return text.encode('utf-8')
