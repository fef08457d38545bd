"""Controlled diagrams: matrices and states gated by a single control wire.

A controlled diagram has the control as input wire 0.  The defining plug
contract is the correctness notion everywhere in this module:

* matrix kind, m qubits: 1+m inputs, m outputs.  Plugging |1> into the
  control must evaluate to the target matrix; plugging |0> must evaluate to
  the identity.
* state kind: 1 input, m outputs.  Plugging |1> gives the target column
  vector; plugging |0> gives |0...0>, the unit of the W-node merge monoid.

Arbitrary square matrices enter through ``decompose_elementary`` (partial
pivot Gauss-Jordan, with a complete-pivot rank factorization for singular
input) followed by ``controlled_product``.  Sums of matrices and sums of
states distribute the control over a W-node fan, which turns the wire sum
of branches into the matrix sum of the gated arms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluate import eval_diagram
from .graph import (Builder, Diagram, DiagramError, attach_and, attach_pink,
                    attach_triangle, attach_w_merge, attach_w_spider,
                    compose_par, compose_seq, identity, plug_basis, splice)

_CTRL = "ctrl"


def _qubit_count(n: int, what: str) -> int:
    m = int(n).bit_length() - 1
    if n < 2 or 2 ** m != n:
        raise DiagramError(f"{what} must be a power of two >= 2, got {n}")
    return m


def _bit(index: int, q: int, m: int) -> int:
    """Bit of ``index`` on wire q, wire 0 being the most significant."""
    return (index >> (m - 1 - q)) & 1


def _zcopy_fan(b: Builder, src, k: int, tag: str = None) -> list:
    """Copy ``src`` onto k wires through a chain of 3-leg label-1 boxes.

    Chaining keeps every node small no matter how wide the fan gets; the
    chain acts as one k-output copy.
    """
    outs = []
    cur = src
    for _ in range(k - 1):
        box = b.zbox(1.0, tag=tag)
        b.wire(cur, b.leg(box))
        outs.append(b.leg(box))
        cur = b.leg(box)
    outs.append(cur)
    return outs


@dataclass
class ControlledDiagram:
    """Diagram with the control on input wire 0."""

    diagram: Diagram
    kind: str          # "matrix" | "state"
    m: int             # data qubits

    def discharge(self) -> Diagram:
        """Plug |1> into the control."""
        return plug_basis(self.diagram, 0, 1)

    def idle(self) -> Diagram:
        """Plug |0> into the control."""
        return plug_basis(self.diagram, 0, 0)


def verify_controlled(cd: ControlledDiagram, target: np.ndarray,
                      tol: float = 1e-9, t: float = None) -> dict:
    """Check both plug contracts against a dense target.

    Returns {"ok", "err_discharge", "err_idle"}; the idle reference is the
    identity for matrices and |0...0> for states.
    """
    dim = 2 ** cd.m
    got_d = eval_diagram(cd.discharge(), t=t)
    got_i = eval_diagram(cd.idle(), t=t)
    if cd.kind == "matrix":
        want_d = np.asarray(target, dtype=complex)
        want_i = np.eye(dim, dtype=complex)
    else:
        want_d = np.asarray(target, dtype=complex).reshape(dim, 1)
        want_i = np.zeros((dim, 1), dtype=complex)
        want_i[0, 0] = 1.0
    err_d = float(np.max(np.abs(got_d - want_d)))
    err_i = float(np.max(np.abs(got_i - want_i)))
    return {"ok": err_d <= tol and err_i <= tol,
            "err_discharge": err_d, "err_idle": err_i}


# ---------------------------------------------------------------------------
# elementary row operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementaryMatrixSpec:
    """One elementary row operation on C^n, n a power of two.

    row_mult(i, a):   identity with entry (i, i) replaced by a
    row_add(i, j, a): identity plus a at entry (i, j), i != j
    row_switch(i, j): the transposition of basis vectors i and j
    """

    kind: str
    n: int
    i: int
    j: int = None
    a: complex = None

    def __post_init__(self):
        _qubit_count(self.n, "elementary dimension")
        if not 0 <= self.i < self.n:
            raise DiagramError(f"row index {self.i} out of range")
        if self.kind == "row_mult":
            if self.a is None or self.j is not None:
                raise DiagramError("row_mult takes (i, a)")
        elif self.kind in ("row_add", "row_switch"):
            if self.j is None or not 0 <= self.j < self.n or self.j == self.i:
                raise DiagramError(f"{self.kind} needs a distinct second row")
            if (self.a is None) != (self.kind == "row_switch"):
                raise DiagramError(f"bad parameters for {self.kind}")
        else:
            raise DiagramError(f"unknown elementary kind {self.kind!r}")

    def dense(self) -> np.ndarray:
        out = np.eye(self.n, dtype=complex)
        if self.kind == "row_mult":
            out[self.i, self.i] = self.a
        elif self.kind == "row_add":
            out[self.i, self.j] = self.a
        else:
            out[self.i, self.i] = out[self.j, self.j] = 0.0
            out[self.i, self.j] = out[self.j, self.i] = 1.0
        return out


def specs_product(specs, n: int) -> np.ndarray:
    """Dense product of the specs in list order (left factor first)."""
    out = np.eye(n, dtype=complex)
    for s in specs:
        out = out @ s.dense()
    return out


def decompose_elementary(m: np.ndarray, tol: float = None) -> list:
    """Factor a square matrix into elementary row operations.

    The product of the returned specs in list order equals the input.  The
    regular path is Gauss-Jordan with partial pivoting (largest magnitude,
    ties to the lowest row).  Singular input falls back to a complete-pivot
    rank factorization: column operations are emitted as specs multiplying
    from the right, and the dropped rank is a trailing run of row_mult(q, 0).
    """
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DiagramError(f"need a square matrix, got shape {m.shape}")
    n = m.shape[0]
    _qubit_count(n, "matrix dimension")
    if tol is None:
        tol = 1e-12 * max(1.0, float(np.max(np.abs(m))))

    def regular(a):
        specs = []
        for c in range(n):
            col = np.abs(a[c:, c])
            p = c + int(np.argmax(col))
            if abs(a[p, c]) <= tol:
                return None
            if p != c:
                a[[p, c], :] = a[[c, p], :]
                specs.append(ElementaryMatrixSpec("row_switch", n, p, c))
            v = a[c, c]
            if abs(v - 1.0) > 0.0:
                a[c, :] /= v
                specs.append(ElementaryMatrixSpec("row_mult", n, c, a=v))
            for r in range(n):
                f = a[r, c]
                if r == c or f == 0.0:
                    continue
                a[r, :] -= f * a[c, :]
                specs.append(ElementaryMatrixSpec("row_add", n, r, c, f))
        return specs

    out = regular(m.copy())
    if out is not None:
        return out

    # rank factorization with complete pivoting
    a = m.copy()
    lefts, rights = [], []
    rank = n
    for c in range(n):
        block = np.abs(a[c:, c:])
        flat = int(np.argmax(block))
        p, q = c + flat // (n - c), c + flat % (n - c)
        if abs(a[p, q]) <= tol:
            rank = c
            break
        if p != c:
            a[[p, c], :] = a[[c, p], :]
            lefts.append(ElementaryMatrixSpec("row_switch", n, p, c))
        if q != c:
            a[:, [q, c]] = a[:, [c, q]]
            rights.append(ElementaryMatrixSpec("row_switch", n, q, c))
        v = a[c, c]
        if abs(v - 1.0) > 0.0:
            a[c, :] /= v
            lefts.append(ElementaryMatrixSpec("row_mult", n, c, a=v))
        for r in range(n):
            f = a[r, c]
            if r != c and f != 0.0:
                a[r, :] -= f * a[c, :]
                lefts.append(ElementaryMatrixSpec("row_add", n, r, c, f))
        for c2 in range(n):
            f = a[c, c2]
            if c2 != c and f != 0.0:
                a[:, c2] -= f * a[:, c]
                rights.append(ElementaryMatrixSpec("row_add", n, c, c2, f))
    zeros = [ElementaryMatrixSpec("row_mult", n, q, a=0.0)
             for q in range(rank, n)]
    return lefts + zeros + list(reversed(rights))


# ---------------------------------------------------------------------------
# controlled elementary diagrams
# ---------------------------------------------------------------------------

def _copy_with_probe(b: Builder, data_ref, twist: bool):
    """Z-copy a data wire; returns (copy_node, probe_ref).

    The probe leg carries the wire value, X-flipped when ``twist``, so an
    and-box can test the wire against either polarity.
    """
    copy = b.zbox(1.0, tag="copy")
    b.wire(data_ref, copy)
    probe = b.leg(copy)
    if twist:
        pins, pouts = attach_pink(b, 1, 1, math.pi, tag="twist")
        b.wire(probe, pins[0])
        probe = pouts[0]
    return copy, probe


def _c_row_mult(m: int, i: int, a: complex) -> Diagram:
    """Diagonal gadget: amplitude a exactly on basis row i when fired."""
    b = Builder()
    ctrl = b.input()
    data = [b.input() for _ in range(m)]
    and_ins, and_out = attach_and(b, 1 + m, tag=_CTRL)
    b.wire(ctrl, and_ins[0])
    copies = []
    for q in range(m):
        copy, probe = _copy_with_probe(b, data[q], _bit(i, q, m) == 0)
        b.wire(probe, and_ins[1 + q])
        copies.append(copy)
    weight = b.zbox(complex(a), tag="weight")
    b.wire(and_out, weight)
    for q in range(m):
        b.wire(copies[q], b.output())
    return b.build()


def _flip_set(m: int, i: int, j: int) -> tuple:
    diff = [q for q in range(m) if _bit(i, q, m) != _bit(j, q, m)]
    return diff[0], diff[1:]


def _apply_flips(x: int, m: int, dstar: int, rest) -> int:
    if _bit(x, dstar, m):
        for d in rest:
            x ^= 1 << (m - 1 - d)
    return x


def _cnot_layer(m: int, ctrl: int, tgt: int) -> Diagram:
    b = Builder()
    ins = [b.input() for _ in range(m)]
    outs = [None] * m
    copy = b.zbox(1.0, tag="copy")
    b.wire(ins[ctrl], copy)
    probe = b.leg(copy)
    outs[ctrl] = copy
    pins, pouts = attach_pink(b, 2, 1, 0.0, tag="xor")
    b.wire(ins[tgt], pins[0])
    b.wire(probe, pins[1])
    outs[tgt] = pouts[0]
    for q in range(m):
        if q not in (ctrl, tgt):
            outs[q] = ins[q]
    for q in range(m):
        b.wire(outs[q], b.output())
    return b.build()


def _hadamard_layer(m: int, wire: int) -> Diagram:
    b = Builder()
    for q in range(m):
        ref = b.input()
        if q == wire:
            h = b.had()
            b.wire(ref, (h, 0))
            ref = (h, 1)
        b.wire(ref, b.output())
    return b.build()


def _conjugation(m: int, dstar: int, rest) -> Diagram:
    layer = identity(m)
    for d in rest:
        layer = compose_seq(layer, _cnot_layer(m, dstar, d))
    return layer


def _addressed_shear(m: int, dstar: int, address: dict, a: complex,
                     upper: bool) -> Diagram:
    """Shear on wire dstar, fired when control and every address bit match.

    Fired lower shear maps |0> to |0> + a|1>; ``upper`` conjugates the wire
    by X for the transposed action.  Idle is the exact identity.
    """
    b = Builder()
    ctrl = b.input()
    data = [b.input() for _ in range(m)]
    and_ins, and_out = attach_and(b, m, tag=_CTRL)
    b.wire(ctrl, and_ins[0])
    out_refs: list = [None] * m
    pos = 1
    for q in range(m):
        if q == dstar:
            continue
        copy, probe = _copy_with_probe(b, data[q], address[q] == 0)
        b.wire(probe, and_ins[pos])
        pos += 1
        out_refs[q] = copy
    ti, to = attach_triangle(b, tag="branch")
    b.wire(and_out, ti)
    weight = b.zbox(complex(a), tag="weight")
    b.wire(to, weight)
    branch = b.leg(weight)
    wire_ref = data[dstar]
    if upper:
        pins, pouts = attach_pink(b, 1, 1, math.pi, tag="conj")
        b.wire(wire_ref, pins[0])
        wire_ref = pouts[0]
    merge_ins, merge_out = attach_w_merge(b, 2)
    b.wire(wire_ref, merge_ins[0])
    b.wire(branch, merge_ins[1])
    if upper:
        pins, pouts = attach_pink(b, 1, 1, math.pi, tag="conj")
        b.wire(merge_out, pins[0])
        merge_out = pouts[0]
    out_refs[dstar] = merge_out
    for q in range(m):
        b.wire(out_refs[q], b.output())
    return b.build()


def _with_control(layer: Diagram) -> Diagram:
    return compose_par(identity(1), layer)


def _c_row_add(m: int, i: int, j: int, a: complex) -> Diagram:
    dstar, rest = _flip_set(m, i, j)
    jj = _apply_flips(j, m, dstar, rest)
    ii = _apply_flips(i, m, dstar, rest)
    address = {q: _bit(jj, q, m) for q in range(m) if q != dstar}
    upper = _bit(jj, dstar, m) == 1
    assert all(_bit(ii, q, m) == address[q] for q in address)
    conj = _conjugation(m, dstar, rest)
    gadget = _addressed_shear(m, dstar, address, a, upper)
    return compose_seq(compose_seq(_with_control(conj), gadget), conj)


def _c_row_switch(m: int, i: int, j: int) -> Diagram:
    dstar, rest = _flip_set(m, i, j)
    jj = _apply_flips(j, m, dstar, rest)
    r = jj | (1 << (m - 1 - dstar))
    conj = _conjugation(m, dstar, rest)
    had = _hadamard_layer(m, dstar)
    core = _c_row_mult(m, r, -1.0)
    pre = compose_seq(_with_control(conj), _with_control(had))
    return compose_seq(compose_seq(pre, core), compose_seq(had, conj))


def controlled_elementary(spec: ElementaryMatrixSpec) -> ControlledDiagram:
    m = _qubit_count(spec.n, "elementary dimension")
    if spec.kind == "row_mult":
        d = _c_row_mult(m, spec.i, spec.a)
    elif spec.kind == "row_add":
        d = _c_row_add(m, spec.i, spec.j, spec.a)
    else:
        d = _c_row_switch(m, spec.i, spec.j)
    return ControlledDiagram(d, "matrix", m)


# ---------------------------------------------------------------------------
# products and sums
# ---------------------------------------------------------------------------

def controlled_identity(m: int) -> ControlledDiagram:
    b = Builder()
    ctrl = b.input()
    stop = b.zbox(1.0, tag=_CTRL)
    b.wire(ctrl, stop)
    for _ in range(m):
        b.wire(b.input(), b.output())
    return ControlledDiagram(b.build(), "matrix", m)


def controlled_product(components, m: int = None,
                       fuse: bool = True) -> ControlledDiagram:
    """Gate a product of controlled matrices with one shared control.

    Discharging gives components[0] @ components[1] @ ... (list order is
    matrix order, so the last entry acts first); idling gives the identity.
    The control fans out through a label-1 ZBox copy.
    """
    components = list(components)
    if m is None:
        if not components:
            raise DiagramError("empty product needs an explicit qubit count")
        m = components[0].m
    if not components:
        return controlled_identity(m)
    if any(c.kind != "matrix" or c.m != m for c in components):
        raise DiagramError("product components must be matrices on one size")
    b = Builder()
    ctrl = b.input()
    fan_refs = _zcopy_fan(b, ctrl, len(components), tag=_CTRL)
    refs = [b.input() for _ in range(m)]
    for idx, comp in enumerate(reversed(components)):
        ins, outs = splice(b, comp.diagram)
        b.wire(fan_refs[idx], ins[0])
        for q in range(m):
            b.wire(refs[q], ins[1 + q])
        refs = outs
    for q in range(m):
        b.wire(refs[q], b.output())
    d = b.build()
    if fuse:
        from .evaluate import env_cap
        from .rules import apply_fusion
        d = apply_fusion(d, max_legs=min(env_cap(), 12)).diagram
    return ControlledDiagram(d, "matrix", m)


def controlled_matrix(matrix: np.ndarray, fuse: bool = True) -> ControlledDiagram:
    """Controlled diagram of an arbitrary square matrix (dimension 2^m)."""
    matrix = np.asarray(matrix, dtype=complex)
    specs = decompose_elementary(matrix)
    m = _qubit_count(matrix.shape[0], "matrix dimension")
    comps = [controlled_elementary(s) for s in specs]
    return controlled_product(comps, m=m, fuse=fuse)


def controlled_sum_matrices(components, weights=None,
                            fuse: bool = True) -> ControlledDiagram:
    """Gate a weighted sum of controlled matrices.

    The control feeds a W-node fan, so exactly one arm fires per branch of
    the resulting superposition; idle arms contribute identity factors and
    the discharge evaluates to sum_i weights[i] * M_i.
    """
    components = list(components)
    if not components:
        raise DiagramError("empty sum")
    m = components[0].m
    if any(c.kind != "matrix" or c.m != m for c in components):
        raise DiagramError("sum components must be matrices on one size")
    k = len(components)
    if weights is None:
        weights = [1.0] * k
    weights = [complex(x) for x in weights]
    if len(weights) != k:
        raise DiagramError("one weight per component")
    b = Builder()
    ctrl = b.input()
    if k == 1:
        fan_refs = [ctrl]
    else:
        fan_in, fan_outs = attach_w_spider(b, k, assoc="balanced", tag=_CTRL)
        b.wire(ctrl, fan_in)
        fan_refs = fan_outs
    refs = [b.input() for _ in range(m)]
    for idx, comp in enumerate(components):
        box = b.zbox(weights[idx], tag="weight")
        b.wire(fan_refs[idx], box)
        ins, outs = splice(b, comp.diagram)
        b.wire(b.leg(box), ins[0])
        for q in range(m):
            b.wire(refs[q], ins[1 + q])
        refs = outs
    for q in range(m):
        b.wire(refs[q], b.output())
    d = b.build()
    if fuse:
        from .evaluate import env_cap
        from .rules import apply_fusion
        d = apply_fusion(d, max_legs=min(env_cap(), 12)).diagram
    return ControlledDiagram(d, "matrix", m)


# ---------------------------------------------------------------------------
# controlled states
# ---------------------------------------------------------------------------

def controlled_state_normal_form(vec: np.ndarray,
                                 fuse: bool = True) -> ControlledDiagram:
    """Controlled state with one W-fan branch per basis amplitude.

    Branch k carries a ZBox labelled vec[k] copying |1> onto exactly the
    qubits set in k; every qubit output merges its incoming branches.
    Discharge gives vec as a column, idle gives |0...0>.
    """
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    m = _qubit_count(vec.shape[0], "state dimension")
    dim = vec.shape[0]
    b = Builder()
    ctrl = b.input()
    fan_in, branches = attach_w_spider(b, dim, assoc="balanced", tag="fan")
    b.wire(ctrl, fan_in)
    per_qubit = {q: [] for q in range(m)}
    for k in range(dim):
        box = b.zbox(complex(vec[k]), tag="amp")
        b.wire(branches[k], box)
        for q in range(m):
            if _bit(k, q, m):
                per_qubit[q].append(b.leg(box))
    for q in range(m):
        legs = per_qubit[q]
        merge_ins, merge_out = attach_w_merge(b, len(legs))
        for leg, mi in zip(legs, merge_ins):
            b.wire(leg, mi)
        b.wire(merge_out, b.output())
    d = b.build()
    if fuse:
        from .evaluate import env_cap
        from .rules import apply_fusion
        d = apply_fusion(d, max_legs=min(env_cap(), 12)).diagram
    return ControlledDiagram(d, "state", m)


def controlled_sum_states(components, weights=None,
                          fuse: bool = True) -> ControlledDiagram:
    """Weighted sum of controlled states via a W fan and per-qubit merges."""
    components = list(components)
    if not components:
        raise DiagramError("empty sum")
    m = components[0].m
    if any(c.kind != "state" or c.m != m for c in components):
        raise DiagramError("sum components must be states on one size")
    k = len(components)
    if weights is None:
        weights = [1.0] * k
    weights = [complex(x) for x in weights]
    if len(weights) != k:
        raise DiagramError("one weight per component")
    b = Builder()
    ctrl = b.input()
    if k == 1:
        fan_refs = [ctrl]
    else:
        fan_in, fan_outs = attach_w_spider(b, k, assoc="balanced", tag=_CTRL)
        b.wire(ctrl, fan_in)
        fan_refs = fan_outs
    outs_per_comp = []
    for idx, comp in enumerate(components):
        box = b.zbox(weights[idx], tag="weight")
        b.wire(fan_refs[idx], box)
        ins, outs = splice(b, comp.diagram)
        b.wire(b.leg(box), ins[0])
        outs_per_comp.append(outs)
    for q in range(m):
        merge_ins, merge_out = attach_w_merge(b, k)
        for idx in range(k):
            b.wire(outs_per_comp[idx][q], merge_ins[idx])
        b.wire(merge_out, b.output())
    d = b.build()
    if fuse:
        from .evaluate import env_cap
        from .rules import apply_fusion
        d = apply_fusion(d, max_legs=min(env_cap(), 12)).diagram
    return ControlledDiagram(d, "state", m)


def sum_normal_forms(vectors, weights=None,
                     fuse: bool = True) -> ControlledDiagram:
    """Controlled weighted sum of plain vectors via their normal forms."""
    comps = [controlled_state_normal_form(v, fuse=fuse) for v in vectors]
    return controlled_sum_states(comps, weights=weights, fuse=fuse)


def state_oracle(vectors, weights) -> np.ndarray:
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    out = np.zeros_like(vecs[0])
    for w, v in zip(weights, vecs):
        out = out + complex(w) * v
    return out


def check_controlled_matrix(matrix: np.ndarray, tol: float = 1e-9) -> dict:
    """Build, plug, and compare against the dense input; see verify_controlled."""
    cd = controlled_matrix(matrix)
    report = verify_controlled(cd, matrix, tol=tol)
    report["specs"] = len(decompose_elementary(np.asarray(matrix,
                                                          dtype=complex)))
    report["nodes"] = len(cd.diagram.nodes)
    return report
