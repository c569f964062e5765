"""Channel constructors and channel-level operations, all at the Choi-matrix level.

The Choi matrix convention is N[(r,i),(s,j)] = sum_k K_k[r,i] conj(K_k[s,j])
for Kraus operators K_k, i.e. output subsystems first, input subsystems
second, and Tr_out N = I_in for a trace-preserving map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .systems import (
    LabeledOperator,
    SystemShape,
    allclose,
    basis_proj,
    embed,
    identity,
    is_ppt,
    is_psd_exact,
    max_entangled,
    merge_labels,
    min_eig,
    partial_trace,
    partial_transpose,
    relabel,
    shape,
    sym_antisym,
    tensor,
    trace_product,
    zeros,
)


class ChannelSpecError(ValueError):
    """Raised when a channel description violates the Choi invariants."""


@dataclass(frozen=True)
class ChannelChoi:
    """A channel, represented by its Choi matrix on (outputs x inputs)."""

    choi: LabeledOperator
    out_labels: tuple[str, ...]
    in_labels: tuple[str, ...]

    @property
    def in_dim(self) -> int:
        d = 1
        for lbl in self.in_labels:
            d *= self.choi.shape.dim_of(lbl)
        return d

    @property
    def out_dim(self) -> int:
        d = 1
        for lbl in self.out_labels:
            d *= self.choi.shape.dim_of(lbl)
        return d

    def to_numeric(self) -> "ChannelChoi":
        return ChannelChoi(self.choi.to_numeric(), self.out_labels, self.in_labels)

    def flat(self) -> "ChannelChoi":
        """Merge composite outputs/inputs into single 'B' / 'A'' subsystems."""
        if self.out_labels == ("B",) and self.in_labels == ("A'",):
            return ChannelChoi(self.choi.permuted(["B", "A'"]), self.out_labels, self.in_labels)
        m = merge_labels(self.choi, [("B", self.out_labels), ("A'", self.in_labels)])
        return ChannelChoi(m, ("B",), ("A'",))

    def validate(self, tol: float = 1e-8) -> None:
        n = self.choi
        if n.is_exact:
            if not is_psd_exact(n):
                raise ChannelSpecError("Choi matrix is not positive semidefinite")
            marg = partial_trace(n, self.out_labels)
            eye = identity(marg.shape, exact=True)
            if not np.array_equal(marg.entries, eye.entries):
                raise ChannelSpecError("Choi matrix is not trace-preserving")
            return
        lo = min_eig(n)
        if lo < -tol:
            raise ChannelSpecError(f"Choi matrix is not PSD (min eigenvalue {lo:.3e})")
        marg = partial_trace(n, self.out_labels)
        gap = (marg - identity(marg.shape)).max_abs()
        if gap > tol:
            raise ChannelSpecError(f"Choi marginal differs from identity by {gap:.3e}")


@dataclass(frozen=True)
class BipartiteChoi:
    """Choi matrix of a bipartite operation on (A' B' x A B)."""

    choi: LabeledOperator
    alice_out: str = "A'"
    bob_out: str = "B'"
    alice_in: str = "A"
    bob_in: str = "B"

    def dims(self) -> dict[str, int]:
        return {lbl: self.choi.shape.dim_of(lbl) for lbl in self.choi.labels}

    def validate(self, tol: float = 1e-8) -> None:
        as_channel = ChannelChoi(self.choi, (self.alice_out, self.bob_out), (self.alice_in, self.bob_in))
        try:
            as_channel.validate(tol)
        except ChannelSpecError as exc:
            raise ChannelSpecError(f"bipartite operation: {exc}") from exc


# -- channel application and figures of merit --------------------------------


def apply_channel(n: ChannelChoi, x: LabeledOperator) -> LabeledOperator:
    """Apply the channel to x; subsystems of x outside the input pass through."""
    for lbl in n.in_labels:
        if lbl not in x.labels:
            raise ValueError(f"channel input {lbl!r} missing from operator labels {x.labels}")
    for lbl in n.out_labels:
        if lbl in set(x.labels) - set(n.in_labels):
            raise ValueError(f"channel output label {lbl!r} collides with a bystander")
    t = partial_transpose(x, n.in_labels)
    return partial_trace(n.choi @ t, n.in_labels)


def channel_fidelity(m: ChannelChoi) -> float:
    """Overlap of the maximally entangled state with its image under the channel."""
    k = m.in_dim
    if m.out_dim != k:
        raise ValueError(f"channel fidelity needs equal dims, got {m.out_dim} != {k}")
    mf = m.flat()
    exact = mf.choi.is_exact
    phi = max_entangled(k, labels=("B", "A'"), exact=exact)
    val = trace_product(phi, mf.choi)
    if exact:
        return val / k
    return float(np.real(val)) / k


def success_probability(m: ChannelChoi) -> float:
    """Average probability of sending a computational-basis message through m."""
    k = m.in_dim
    if m.out_dim != k:
        raise ValueError("success probability needs a square channel")
    ent = m.flat().choi.entries
    total = sum(ent[i * k + i, i * k + i] for i in range(k))
    if isinstance(total, Fraction):
        return total / k
    return float(np.real(total)) / k


def choi_state(n: ChannelChoi) -> LabeledOperator:
    return n.choi * (Fraction(1, n.in_dim) if n.choi.is_exact else 1.0 / n.in_dim)


def is_horodecki(n: ChannelChoi, tol: float = 1e-10) -> bool:
    """True iff the Choi matrix is PPT across the output/input cut."""
    return is_ppt(n.choi, n.out_labels, tol)


def choi_from_kraus(kraus, out_sub, in_sub) -> ChannelChoi:
    """Assemble the Choi matrix of sum_k K_k . K_k^dagger."""
    out_shape = SystemShape(tuple(out_sub))
    in_shape = SystemShape(tuple(in_sub))
    do, di = out_shape.dim, in_shape.dim
    ent = np.zeros((do * di, do * di), dtype=np.complex128)
    for k in kraus:
        v = np.asarray(k, dtype=np.complex128).reshape(do * di)
        ent += np.outer(v, v.conj())
    shp = SystemShape(out_shape.subsystems + in_shape.subsystems)
    return ChannelChoi(LabeledOperator(shp, ent), out_shape.labels, in_shape.labels)


def compose(n2: ChannelChoi, n1: ChannelChoi) -> ChannelChoi:
    """Choi matrix of n2 after n1 (link product over the shared middle system)."""
    if n1.out_dim != n2.in_dim:
        raise ValueError("composition dimension mismatch")
    a = n1.flat()
    b = n2.flat()
    mid = relabel(b.choi, {"A'": "M", "B": "Bo"})
    first = relabel(a.choi, {"B": "M", "A'": "Ai"})
    linked = partial_trace(mid @ partial_transpose(first, ["M"]), ["M"])
    out = relabel(linked, {"Bo": "B", "Ai": "A'"}).permuted(["B", "A'"])
    return ChannelChoi(out, ("B",), ("A'",))


def tensor_channels(channels) -> ChannelChoi:
    """Independent parallel uses, one labeled subsystem pair per use."""
    chois = []
    for i, ch in enumerate(channels):
        f = ch.flat()
        chois.append(relabel(f.choi, {"B": f"B{i:02d}", "A'": f"A'{i:02d}"}))
    total = chois[0]
    for c in chois[1:]:
        total = tensor(total, c)
    outs = tuple(f"B{i:02d}" for i in range(len(chois)))
    ins = tuple(f"A'{i:02d}" for i in range(len(chois)))
    total = total.permuted(list(outs) + list(ins))
    return ChannelChoi(total, outs, ins)


def tensor_power(n: ChannelChoi, k: int) -> ChannelChoi:
    if k < 1:
        raise ValueError("tensor power requires k >= 1")
    if k == 1:
        return n
    return tensor_channels([n] * k)


# -- the channel zoo -----------------------------------------------------------


def werner_holevo(d: int, alpha) -> ChannelChoi:
    """Generalised Werner-Holevo channel; Choi interpolates the S/A projectors."""
    if d < 2:
        raise ValueError("werner_holevo requires d >= 2")
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    s, a = sym_antisym(d, labels=("B", "A'"), exact=True)
    choi = s * (2 * (1 - alpha) / Fraction(d + 1)) + a * (2 * alpha / Fraction(d - 1))
    return ChannelChoi(choi, ("B",), ("A'",))


def depolarizing(d: int, f: float) -> ChannelChoi:
    """Depolarising channel parameterised by its channel fidelity f."""
    if not 0 <= f <= 1:
        raise ValueError(f"fidelity {f} outside [0, 1]")
    exact = isinstance(f, (int, Fraction))
    f = Fraction(f) if exact else float(f)
    one = Fraction(1) if exact else 1.0
    a = (d * d * f - one) / (d * d - 1)
    phi = max_entangled(d, labels=("B", "A'"), exact=exact)
    eye = identity(phi.shape, exact=exact)
    choi = phi * (a * d) + eye * ((one - a) * (one / d))
    return ChannelChoi(choi, ("B",), ("A'",))


def symmetric_classical(d: int, p: float) -> ChannelChoi:
    """d-ary symmetric classical channel parameterised by its success probability."""
    if not 0 <= p <= 1:
        raise ValueError(f"success probability {p} outside [0, 1]")
    exact = isinstance(p, (int, Fraction))
    p = Fraction(p) if exact else float(p)
    one = Fraction(1) if exact else 1.0
    c = (d * p - one) / (d - 1) if d > 1 else one
    ident = dephasing(d) if exact else dephasing(d).to_numeric()
    eye = identity(ident.choi.shape, exact=exact)
    choi = ident.choi * c + eye * ((one - c) * (one / d))
    return ChannelChoi(choi, ("B",), ("A'",))


def dephasing(d: int) -> ChannelChoi:
    """Completely dephasing operation in the computational basis (exact entries)."""
    if d < 1:
        raise ValueError("dephasing requires d >= 1")
    shp = shape(("B", d), ("A'", d))
    choi = zeros(shp, exact=True)
    for i in range(d):
        choi.entries[i * d + i, i * d + i] = Fraction(1)
    return ChannelChoi(choi, ("B",), ("A'",))


def identity_channel(d: int, exact: bool = True) -> ChannelChoi:
    phi = max_entangled(d, labels=("B", "A'"), exact=exact)
    return ChannelChoi(phi * (Fraction(d) if exact else float(d)), ("B",), ("A'",))


def covariance_residual(n: ChannelChoi, u: np.ndarray) -> float:
    """Operator norm of Choi(N o U) - Choi(V o N) for the output correction V.

    For a generalised Werner-Holevo channel, pre-conjugating the input by a
    unitary u equals post-conjugating the output by conj(u), so the returned
    norm vanishes.
    """
    f = n.flat().to_numeric()
    d_in, d_out = f.in_dim, f.out_dim
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (d_in, d_in) or d_in != d_out:
        raise ValueError("covariance check needs a square channel and matching unitary")
    c = f.choi.entries
    pre = np.kron(np.eye(d_out), u.T) @ c @ np.kron(np.eye(d_out), u.conj())
    post = np.kron(u.conj(), np.eye(d_in)) @ c @ np.kron(u.T, np.eye(d_in))
    return float(np.max(np.abs(np.linalg.eigvalsh(pre - post))))


def superactivation_Z() -> BipartiteChoi:
    """Two-qubit bipartite operation built from backward classical communication.

    Bob measures his input, sends the outcome b and a fresh uniform bit r to
    Alice and outputs r; Alice applies a Hadamard iff b = 1, measures, and
    outputs the XOR of her outcome with r.  Enumerating the (b, r, a)
    branches gives eight Kraus operators whose Choi matrix is exactly
    rational, non-signalling in both directions, and PPT.
    """
    shp = shape(("A'", 2), ("B'", 2), ("A", 2), ("B", 2))
    ent = zeros(shp, exact=True).entries
    h_rows = {0: [(0, 1), (1, 1)], 1: [(0, 1), (1, -1)]}  # H row a: entries (col, sign*sqrt2)
    for b in (0, 1):
        weight = Fraction(1, 2) if b == 0 else Fraction(1, 4)
        for r in (0, 1):
            for a in (0, 1):
                m = np.zeros((4, 4), dtype=object)
                m[:, :] = Fraction(0)
                # Kraus (up to a positive scalar): |a xor r><a| H^b on A, |r><b| on B
                cols = [(a, 1)] if b == 0 else h_rows[a]
                for col, sign in cols:
                    m[(a ^ r) * 2 + r, col * 2 + b] = Fraction(sign)
                v = m.reshape(16)
                ent += weight * np.outer(v, v)
    return BipartiteChoi(LabeledOperator(shp, ent))


def ns_gap(z: BipartiteChoi, direction: str) -> LabeledOperator:
    """Deviation from the one-way non-signalling marginal condition.

    direction 'b_to_a': Tr_B' Z must equal (Tr_B'B Z / dim B) x I_B;
    direction 'a_to_b': Tr_A' Z must equal (Tr_A'A Z / dim A) x I_A.
    """
    if direction == "b_to_a":
        out, inp = z.bob_out, z.bob_in
    elif direction == "a_to_b":
        out, inp = z.alice_out, z.alice_in
    else:
        raise ValueError(f"unknown direction {direction!r}")
    lhs = partial_trace(z.choi, [out])
    marg = partial_trace(z.choi, [out, inp])
    d = z.choi.shape.dim_of(inp)
    scale = Fraction(1, d) if z.choi.is_exact else 1.0 / d
    eye = identity(shape((inp, d)), exact=z.choi.is_exact)
    return lhs - tensor(marg * scale, eye)


def is_ppt_preserving(z: BipartiteChoi, tol: float = 1e-10) -> bool:
    """True iff the Choi matrix of the bipartite operation is PPT across Alice/Bob."""
    return is_ppt(z.choi, [z.bob_out, z.bob_in], tol)


# -- JSON channel descriptions ---------------------------------------------------


def _parse_rational(value, what: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ChannelSpecError(f"{what} must be an integer or a rational string 'p/q'")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ChannelSpecError(f"cannot parse {what} {value!r}: {exc}") from exc
    raise ChannelSpecError(f"{what} has unsupported type {type(value).__name__}")


def parse_channel_spec(spec: dict) -> ChannelChoi:
    """Build a validated channel from a JSON-style description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ChannelSpecError("channel spec must be an object with a 'kind' field")
    kind = spec["kind"]
    uses = spec.get("uses", 1)
    if not isinstance(uses, int) or uses < 1:
        raise ChannelSpecError(f"'uses' must be a positive integer, got {uses!r}")
    if kind == "werner_holevo":
        ch = werner_holevo(int(spec["d"]), _parse_rational(spec["alpha"], "alpha"))
    elif kind == "depolarizing":
        ch = depolarizing(int(spec["d"]), float(spec["f"]))
    elif kind == "symmetric_classical":
        ch = symmetric_classical(int(spec["d"]), float(spec["p"]))
    elif kind == "dephasing":
        ch = dephasing(int(spec["d"]))
    elif kind == "choi":
        ch = _parse_raw_choi(spec)
    else:
        raise ChannelSpecError(f"unknown channel kind {kind!r}")
    if uses > 1:
        ch = tensor_power(ch, uses)
    return ch


def _parse_raw_choi(spec: dict) -> ChannelChoi:
    try:
        di = int(spec["in_dim"])
        do = int(spec["out_dim"])
        raw = spec["matrix"]
    except KeyError as exc:
        raise ChannelSpecError(f"raw Choi spec is missing field {exc}") from exc
    n = di * do
    if len(raw) != n * n:
        raise ChannelSpecError(f"matrix must have {n * n} [re, im] entries, got {len(raw)}")
    vals = np.empty(n * n, dtype=np.complex128)
    for idx, pair in enumerate(raw):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ChannelSpecError(f"matrix entry {idx} is not an [re, im] pair")
        vals[idx] = complex(float(pair[0]), float(pair[1]))
    shp = shape(("B", do), ("A'", di))
    ch = ChannelChoi(LabeledOperator(shp, vals.reshape(n, n)), ("B",), ("A'",))
    ch.validate(1e-8)
    return ch
