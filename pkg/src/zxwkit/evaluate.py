"""Tensor semantics of ZXW diagrams.

``eval_diagram`` maps a diagram with n inputs and m outputs to the dense
complex matrix of shape (2^m, 2^n) it denotes, reading input wire 0 / output
wire 0 as the most significant bit.  The functor laws hold exactly:
sequential composition is matrix product (later diagram on the left),
parallel composition is the Kronecker product.

Contraction builds one tensor per interior node and a 2x2 identity per
boundary-to-boundary wire, then contracts greedily, always picking the pair
of tensors whose contraction yields the smallest intermediate.  Every edge
index appears on at most two tensors, so pairwise ``tensordot`` suffices.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import (HAD, IN, OUT, W, ZBOX, Diagram, DiagramError, PhaseVar)

DEFAULT_CAP = 12
DEFAULT_TOL = 1e-10

_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_W_TENSOR = np.zeros((2, 2, 2), dtype=complex)
_W_TENSOR[0, 0, 0] = 1.0   # |0>  ->  |00>
_W_TENSOR[1, 0, 1] = 1.0   # |1>  ->  |01> + |10>
_W_TENSOR[1, 1, 0] = 1.0


class CapExceeded(DiagramError):
    """Diagram has more open wires than the configured qubit cap."""


def env_cap() -> int:
    return int(os.environ.get("ZXW_CAP", DEFAULT_CAP))


def env_tol() -> float:
    return float(os.environ.get("ZXW_TOL", "1e-9"))


def node_tensor(node, t: Optional[float] = None) -> np.ndarray:
    """Dense tensor of one interior node, one axis of dimension 2 per port."""
    if node.kind == ZBOX:
        label = node.label
        if isinstance(label, PhaseVar):
            if t is None:
                raise DiagramError(
                    "diagram has symbolic time labels; pass t to evaluate")
            label = label.resolve(t)
        arr = np.zeros((2,) * node.ports, dtype=complex)
        arr[(0,) * node.ports] = 1.0
        arr[(1,) * node.ports] += label
        return arr
    if node.kind == HAD:
        return _HAD
    if node.kind == W:
        return _W_TENSOR
    raise DiagramError(f"no tensor for node kind {node.kind!r}")


def _contract_pair(a: np.ndarray, ids_a: list, b: np.ndarray, ids_b: list):
    shared = [i for i in ids_a if i in ids_b]
    ax_a = [ids_a.index(i) for i in shared]
    ax_b = [ids_b.index(i) for i in shared]
    out = np.tensordot(a, b, axes=(ax_a, ax_b))
    ids = [i for i in ids_a if i not in shared] + [i for i in ids_b if i not in shared]
    return out, ids


def eval_diagram(d: Diagram, t: Optional[float] = None, cap: int = None,
                 order: str = "greedy") -> np.ndarray:
    """Evaluate ``d`` to its (2^outputs, 2^inputs) matrix.

    ``order`` picks the contraction schedule: "greedy" (default) or
    "sequential" (node-id order); both give the same matrix to float
    round-off, which the tests pin down.
    """
    cap = env_cap() if cap is None else cap
    if d.n_inputs + d.n_outputs > cap:
        raise CapExceeded(
            f"{d.n_inputs + d.n_outputs} open wires exceed cap {cap}")

    port_edge: dict = {}
    next_id = 0
    for e in d.edges:
        for end in e:
            port_edge[end] = next_id
        next_id += 1

    tensors: list = []
    boundary_kinds = (IN, OUT)
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind in boundary_kinds:
            continue
        if node.ports > cap:
            raise CapExceeded(
                f"node {nid} has {node.ports} legs, cap is {cap}")
        ids = [port_edge[(nid, p)] for p in range(node.ports)]
        arr = node_tensor(node, t)
        # trace out self-loops (an edge with both ends on this node)
        while len(ids) != len(set(ids)):
            dup = next(i for i in ids if ids.count(i) > 1)
            ax = [k for k, i in enumerate(ids) if i == dup]
            arr = np.trace(arr, axis1=ax[0], axis2=ax[1])
            ids = [i for k, i in enumerate(ids) if k not in ax]
        tensors.append((arr, ids))

    # a wire between two boundary ports becomes an explicit identity tensor
    for e in d.edges:
        (a, pa), (bb, pb) = e
        if d.nodes[a].kind in boundary_kinds and d.nodes[bb].kind in boundary_kinds:
            ia, ib = next_id, next_id + 1
            next_id += 2
            port_edge[(a, pa)] = ia
            port_edge[(bb, pb)] = ib
            tensors.append((np.eye(2, dtype=complex), [ia, ib]))

    external = [port_edge[(nid, 0)] for nid in d.outputs] + \
               [port_edge[(nid, 0)] for nid in d.inputs]

    if not tensors:
        return np.ones((1, 1), dtype=complex)

    if order == "sequential":
        arr, ids = tensors[0]
        for nxt_arr, nxt_ids in tensors[1:]:
            arr, ids = _contract_pair(arr, ids, nxt_arr, nxt_ids)
        pool = [(arr, ids)]
    elif order == "greedy":
        live: dict = {k: tensors[k] for k in range(len(tensors))}
        id2pos: dict = {}
        for pos, (_, ids) in live.items():
            for i in ids:
                id2pos.setdefault(i, set()).add(pos)
        fresh = len(tensors)
        while True:
            pairs = {tuple(sorted(ps)) for ps in id2pos.values() if len(ps) == 2}
            if not pairs:
                break

            def rank_after(pair):
                ids_a, ids_b = live[pair[0]][1], live[pair[1]][1]
                shared = len(set(ids_a) & set(ids_b))
                return len(ids_a) + len(ids_b) - 2 * shared

            i, j = min(pairs, key=lambda p: (rank_after(p), p))
            arr, ids = _contract_pair(live[i][0], live[i][1],
                                      live[j][0], live[j][1])
            for old in (i, j):
                for idx in live[old][1]:
                    id2pos[idx].discard(old)
                del live[old]
            live[fresh] = (arr, ids)
            for idx in ids:
                id2pos.setdefault(idx, set()).add(fresh)
            fresh += 1
        pool = list(live.values())
    else:
        raise DiagramError(f"unknown contraction order {order!r}")

    # disconnected components: multiply out (scalars fold into the tensor)
    arr, ids = pool[0]
    for nxt_arr, nxt_ids in pool[1:]:
        arr = np.tensordot(arr, nxt_arr, axes=0)
        ids = ids + nxt_ids
    if sorted(ids) != sorted(external):
        raise DiagramError("internal error: contraction left stray indices")
    perm = [ids.index(i) for i in external]
    arr = np.transpose(arr, perm) if perm else arr
    return arr.reshape(2 ** d.n_outputs, 2 ** d.n_inputs)


@dataclass
class ScalarEquivalence:
    """Result of comparing two matrices up to a global scalar."""

    equal: bool
    scalar: complex
    residual: float

    @property
    def exact(self) -> bool:
        return self.equal and abs(self.scalar - 1.0) <= 1e-8


def equal_up_to_scalar(a: np.ndarray, b: np.ndarray,
                       tol: float = DEFAULT_TOL) -> ScalarEquivalence:
    """Find lambda with a = lambda * b, reading lambda off b's largest entry.

    Zero matrices are equal to each other (lambda 1) and to nothing else.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return ScalarEquivalence(False, 0.0, float("inf"))
    mb = float(np.max(np.abs(b))) if b.size else 0.0
    ma = float(np.max(np.abs(a))) if a.size else 0.0
    if mb <= tol:
        if ma <= tol:
            return ScalarEquivalence(True, 1.0 + 0j, max(ma, mb))
        return ScalarEquivalence(False, 0.0, ma)
    idx = np.unravel_index(int(np.argmax(np.abs(b))), b.shape)
    lam = complex(a[idx] / b[idx])
    residual = float(np.max(np.abs(a - lam * b)))
    if abs(lam) <= tol:
        return ScalarEquivalence(False, lam, residual)
    return ScalarEquivalence(residual <= tol, lam, residual)


def matrices_close(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and float(np.max(np.abs(a - b))) <= tol
