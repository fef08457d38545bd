"""JSON/DOT writers, text matrix formats, and their round trips."""

import json
import math

import numpy as np
import pytest

from zxwkit import (DiagramError, and_box, diagram_from_dict,
                    diagram_from_json, diagram_to_dict, diagram_to_dot,
                    diagram_to_json, eval_diagram, matrices_close,
                    matrix_from_text, matrix_to_text, pink_spider,
                    structural_equal, triangle, vector_from_text, w_spider,
                    zbox_diagram)


def _random_diagram(rng):
    pick = int(rng.integers(0, 5))
    if pick == 0:
        return zbox_diagram(complex(rng.normal(), rng.normal()),
                            int(rng.integers(0, 3)), int(rng.integers(1, 3)))
    if pick == 1:
        return pink_spider(int(rng.integers(1, 3)), int(rng.integers(1, 3)),
                           math.pi * int(rng.integers(0, 2)))
    if pick == 2:
        return and_box(int(rng.integers(1, 4)))
    if pick == 3:
        return w_spider(int(rng.integers(2, 5)), assoc="balanced")
    return triangle(inverse=bool(rng.integers(0, 2)))


def test_json_round_trip_random():
    rng = np.random.default_rng(77)
    for _ in range(30):
        d = _random_diagram(rng)
        back = diagram_from_json(diagram_to_json(d))
        assert structural_equal(d, back)
        assert matrices_close(eval_diagram(d), eval_diagram(back), 1e-12)


def test_dict_schema():
    d = zbox_diagram(1.0 - 2.0j, 1, 1)
    data = diagram_to_dict(d)
    assert set(data) == {"nodes", "edges", "inputs", "outputs"}
    kinds = {n["kind"] for n in data["nodes"]}
    assert kinds <= {"zbox", "had", "w", "in", "out"}
    boxes = [n for n in data["nodes"] if n["kind"] == "zbox"]
    assert boxes and boxes[0]["a"] == [1.0, -2.0]
    for e in data["edges"]:
        assert len(e) == 2 and all(len(end) == 2 for end in e)
    # stays valid through an actual json encode/decode cycle
    again = diagram_from_dict(json.loads(json.dumps(data)))
    assert structural_equal(d, again)


def test_symbolic_labels_must_be_resolved_first():
    from zxwkit import PhaseVar, resolve_time
    d = zbox_diagram(PhaseVar(-0.25), 1, 1)
    with pytest.raises(DiagramError):
        diagram_to_json(d)       # schema holds concrete labels only
    back = diagram_from_json(diagram_to_json(resolve_time(d, 2.0)))
    assert matrices_close(eval_diagram(d, t=2.0), eval_diagram(back), 1e-12)


def test_from_dict_rejects_garbage():
    with pytest.raises(DiagramError):
        diagram_from_dict({"nodes": [], "edges": []})
    with pytest.raises(DiagramError):
        diagram_from_dict({"nodes": [{"id": 0, "kind": "purple"}],
                           "edges": [], "inputs": [], "outputs": []})
    bad = diagram_to_dict(zbox_diagram(1.0, 1, 1))
    bad["edges"].append([[99, 0], [100, 0]])
    with pytest.raises(DiagramError):
        diagram_from_dict(bad)


def test_dot_output_mentions_generators():
    dot = diagram_to_dot(triangle())
    assert dot.startswith("graph zxw {")
    assert "shape=triangle" in dot        # the W node
    assert "shape=box" in dot             # the label box
    dot_h = diagram_to_dot(pink_spider(1, 1, math.pi))
    assert 'label="H"' in dot_h


def test_matrix_text_round_trip():
    rng = np.random.default_rng(123)
    m = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    back = matrix_from_text(matrix_to_text(m))
    assert np.abs(back - m).max() <= 1e-11   # writer keeps 12 digits
    # entries use re+imj with tab separators
    line = matrix_to_text(np.array([[1.5 - 2.0j, 3.0]]))
    assert "\t" in line and "1.5-2j" in line


def test_matrix_text_errors():
    with pytest.raises(DiagramError):
        matrix_from_text("")
    with pytest.raises(DiagramError):
        matrix_from_text("1\t2\n3\n")
    with pytest.raises(DiagramError) as err:
        matrix_from_text("1\tzzz\n")
    assert "line 1" in str(err.value)


def test_vector_from_text_orientations():
    col = vector_from_text("1\n2j\n-3\n")
    row = vector_from_text("1\t2j\t-3\n")
    assert np.abs(col - row).max() == 0.0
    with pytest.raises(DiagramError):
        vector_from_text("1\t2\n3\t4\n")


def test_comments_and_blanks_ignored():
    m = matrix_from_text("# heading\n\n1\t0\n# middle\n0\t1\n")
    assert np.abs(m - np.eye(2)).max() == 0.0
