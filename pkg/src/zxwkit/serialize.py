"""Diagram and matrix serialization.

JSON schema (round-trip safe, structure preserving):

    {"nodes": [{"id": 0, "kind": "zbox", "a": [re, im]}, ...],
     "edges": [[[id, port], [id, port]], ...],
     "inputs": [ids], "outputs": [ids]}

"a" is present only on zbox nodes.  Symbolic time labels are not part of the
schema; resolve t before exporting.

The matrix text format is one row per line, entries like ``1.5+0.25j``
separated by tabs.  There is deliberately no binary writer.
"""

from __future__ import annotations

import json

import numpy as np

from .graph import (HAD, IN, OUT, W, ZBOX, Diagram, DiagramError, Node,
                    PhaseVar, validate)

_KINDS = {ZBOX: "zbox", HAD: "had", W: "w", IN: "in", OUT: "out"}
_KINDS_BACK = {v: k for k, v in _KINDS.items()}


def diagram_to_dict(d: Diagram) -> dict:
    nodes = []
    for nid in sorted(d.nodes):
        n = d.nodes[nid]
        entry = {"id": nid, "kind": _KINDS[n.kind]}
        if n.kind == ZBOX:
            if isinstance(n.label, PhaseVar):
                raise DiagramError(
                    "diagram has symbolic time labels; resolve t before export")
            entry["a"] = [n.label.real, n.label.imag]
        nodes.append(entry)
    edges = [[[a, pa], [b, pb]] for (a, pa), (b, pb) in d.edges]
    return {"nodes": nodes, "edges": edges,
            "inputs": list(d.inputs), "outputs": list(d.outputs)}


def diagram_from_dict(data: dict) -> Diagram:
    try:
        nodes = {}
        port_count: dict = {}
        for e in data["edges"]:
            for nid, port in e:
                port_count[nid] = max(port_count.get(nid, 0), port + 1)
        for entry in data["nodes"]:
            nid = entry["id"]
            kind = _KINDS_BACK[entry["kind"]]
            if kind == ZBOX:
                re, im = entry["a"]
                label = complex(re, im)
                ports = port_count.get(nid, 0)
            else:
                label = None
                ports = {HAD: 2, W: 3, IN: 1, OUT: 1}[kind]
            nodes[nid] = Node(nid, kind, ports, label)
        edges = [((a, pa), (b, pb)) for (a, pa), (b, pb) in data["edges"]]
        d = Diagram(nodes, edges, list(data["inputs"]), list(data["outputs"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramError(f"malformed diagram JSON: {exc}") from exc
    problems = validate(d)
    if problems:
        raise DiagramError("invalid diagram JSON: " + "; ".join(problems))
    return d


def diagram_to_json(d: Diagram, indent: int = None) -> str:
    return json.dumps(diagram_to_dict(d), indent=indent)


def diagram_from_json(text: str) -> Diagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"not JSON: {exc}") from exc
    return diagram_from_dict(data)


def _fmt_label(label) -> str:
    if isinstance(label, PhaseVar):
        return f"e^(i*{label.slope:g}*t)"
    if abs(label.imag) < 1e-12:
        return f"{label.real:g}"
    return f"{label.real:g}{label.imag:+g}j"


def diagram_to_dot(d: Diagram) -> str:
    """Graphviz rendering: green boxes, yellow Hadamard squares, black W triangles."""
    lines = ["graph zxw {", "  rankdir=LR;", "  node [fontsize=10];"]
    for nid in sorted(d.nodes):
        n = d.nodes[nid]
        if n.kind == ZBOX:
            attrs = (f'shape=box style=filled fillcolor="#66cc66" '
                     f'label="Z({_fmt_label(n.label)})"')
        elif n.kind == HAD:
            attrs = 'shape=square style=filled fillcolor="#eeee44" label="H"'
        elif n.kind == W:
            attrs = ('shape=triangle style=filled fillcolor="#222222" '
                     'fontcolor="#ffffff" label="W"')
        elif n.kind == IN:
            attrs = f'shape=plaintext label="in{d.inputs.index(nid)}"'
        else:
            attrs = f'shape=plaintext label="out{d.outputs.index(nid)}"'
        if n.tag and n.kind not in (IN, OUT):
            attrs += f' tooltip="{n.tag}"'
        lines.append(f"  n{nid} [{attrs}];")
    for (a, pa), (b, pb) in d.edges:
        lines.append(f'  n{a} -- n{b} [taillabel="{pa}" headlabel="{pb}" '
                     f"fontsize=7];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt_entry(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def matrix_to_text(m: np.ndarray) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    rows = ["\t".join(_fmt_entry(z) for z in row) for row in m]
    return "\n".join(rows) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([complex(tok) for tok in line.split("\t")])
        except ValueError as exc:
            raise DiagramError(f"matrix line {lineno}: {exc}") from exc
    if not rows:
        raise DiagramError("empty matrix text")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DiagramError("ragged matrix text")
    return np.array(rows, dtype=complex)


def vector_from_text(text: str) -> np.ndarray:
    """Read a state vector: either one entry per line or one tab-separated line."""
    m = matrix_from_text(text)
    if 1 in m.shape:
        return m.reshape(-1)
    raise DiagramError(f"expected a vector, got shape {m.shape}")
