"""Birdtrack tensor data model: typed-port diagrams over oriented quark lines
and unoriented gluon lines, with generator / triple-gluon / symmetriser
vertices; parsing, composition, tensor products, dagger, partial traces.

A diagram is a perfect matching on ports.  External ports carry the signature
(quark-out "o", quark-in "i", gluon "g"); internal ports belong to vertices:

* ``t``  generator (t^a)^j_k: slots (gluon, quark-out, quark-in)
* ``f``  i f^{abc}: three gluon slots, stored up to cyclic rotation, an odd
  reordering flips the term's sign
* ``d``  fully symmetric three-gluon vertex (2/T_R times the symmetrised
  generator loop)
* ``s``/``a``  (anti-)symmetriser bar over w quark lines: 2w slots in two
  groups of w; slot order within a group is absorbed by canonicalisation,
  with a sign for ``a``

Every stored diagram is canonically labelled (deterministic breadth-first
traversal anchored at the ordered external ports, minimised over vertex slot
symmetries), so equal diagrams merge by dictionary lookup.  Closed loops with
no vertex on them never appear: they are evaluated eagerly to N (quark) or
N^2-1 (gluon) scalar factors.
"""

from __future__ import annotations

import itertools
import json
import re
from typing import Mapping, Sequence

from .coeff import RF_N, RF_ONE, RF_ZERO, RationalFunction, Scalar
from .errors import (
    OrientationError,
    ParseError,
    ResourceLimitError,
    SignatureMismatchError,
)
from .perm import AlgebraElement, Permutation

QOUT = "o"
QIN = "i"
GLU = "g"

Vert = tuple[str, int]  # (kind, bar width); width 0 for t/f/d

_CANON_BRANCH_CAP = 65536


def _vert_size(v: Vert) -> int:
    return 3 if v[0] in "tfd" else 2 * v[1]


def _slot_role(v: Vert, slot: int) -> str:
    kind, _ = v
    if kind == "t":
        return ("g", "tail", "head")[slot]
    if kind in "fd":
        return "g"
    return "q"  # bar slots are orientation-neutral


def _ext_role(kind: str) -> str:
    return {"o": "head", "i": "tail", "g": "g"}[kind]


def _parity(seq: Sequence[int]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


class Diagram:
    """Canonically labelled birdtrack graph; construct via ``canonicalize``."""

    __slots__ = ("sig", "verts", "pairing", "_hash")

    def __init__(self, sig: tuple[str, ...], verts: tuple[Vert, ...], pairing: tuple[int, ...]):
        self.sig = sig
        self.verts = verts
        self.pairing = pairing
        self._hash: int | None = None

    @property
    def n_ports(self) -> int:
        return len(self.pairing)

    def vertex_base(self, vid: int) -> int:
        base = len(self.sig)
        for v in self.verts[:vid]:
            base += _vert_size(v)
        return base

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Diagram)
            and self.sig == other.sig
            and self.verts == other.verts
            and self.pairing == other.pairing
        )

    def __lt__(self, other: "Diagram") -> bool:
        return (self.sig, self.verts, self.pairing) < (other.sig, other.verts, other.pairing)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.sig, self.verts, self.pairing))
        return self._hash

    def __repr__(self) -> str:
        return f"Diagram(sig={''.join(self.sig)}, verts={self.verts}, pairing={self.pairing})"


def _port_tables(sig_len: int, verts: Sequence[Vert]):
    owner: list[int | None] = [None] * sig_len
    base: list[int] = []
    pos = sig_len
    for vid, v in enumerate(verts):
        base.append(pos)
        owner.extend([vid] * _vert_size(v))
        pos += _vert_size(v)
    return owner, base, pos


def _validate(sig, verts, pairing) -> None:
    owner, base, total = _port_tables(len(sig), verts)
    if len(pairing) != total:
        raise OrientationError("pairing does not cover all ports")
    for p, q in enumerate(pairing):
        if q == p or not (0 <= q < total) or pairing[q] != p:
            raise OrientationError("pairing is not a fixed-point-free involution")
    for p in range(total):
        q = pairing[p]
        if p > q:
            continue
        rp = _ext_role(sig[p]) if owner[p] is None else _slot_role(verts[owner[p]], p - base[owner[p]])
        rq = _ext_role(sig[q]) if owner[q] is None else _slot_role(verts[owner[q]], q - base[owner[q]])
        quarkish = {"tail", "head", "q"}
        if rp == "g" or rq == "g":
            if rp != rq:
                raise OrientationError("gluon edge attached to a quark port")
        elif rp in quarkish and rq in quarkish:
            if {rp, rq} == {"tail"} or {rp, rq} == {"head"}:
                raise OrientationError("quark-line orientation clash")
        else:  # pragma: no cover - defensive
            raise OrientationError(f"bad port roles {rp}/{rq}")


def _slot_orders(v: Vert, arrival: int) -> list[tuple[tuple[int, ...], int]]:
    kind, w = v
    if kind == "t":
        return [((0, 1, 2), 1)]
    if kind == "f":
        a = arrival
        return [
            ((a, (a + 1) % 3, (a + 2) % 3), 1),
            ((a, (a + 2) % 3, (a + 1) % 3), -1),
        ]
    if kind == "d":
        a = arrival
        o = [x for x in range(3) if x != a]
        return [((a, o[0], o[1]), 1), ((a, o[1], o[0]), 1)]
    # bars: arrival's group first, then the other group, all orders
    side0 = list(range(w)) if arrival < w else list(range(w, 2 * w))
    side1 = list(range(w, 2 * w)) if arrival < w else list(range(w))
    rest = [s for s in side0 if s != arrival]
    out = []
    for p0 in itertools.permutations(rest):
        first = (arrival,) + p0
        s0 = _parity(first) if kind == "a" else 1
        for p1 in itertools.permutations(side1):
            s1 = _parity(p1) if kind == "a" else 1
            out.append((first + p1, s0 * s1))
    return out


def canonicalize(
    sig: tuple[str, ...], verts: Sequence[Vert], pairing: Sequence[int]
) -> tuple[Diagram | None, int]:
    """Return the canonical relabelling and its sign, or (None, 0) when the
    diagram is forced to vanish by its own slot symmetries."""
    verts = tuple(verts)
    pairing = tuple(pairing)
    owner, base, total = _port_tables(len(sig), verts)
    E = len(sig)
    nverts = len(verts)

    best: list = [None, 0, False]  # encoding, sign, sign_conflict
    branches = [0]

    def finish(disc: list[int], virt: dict[int, tuple[int, ...]], sign: int) -> None:
        branches[0] += 1
        if branches[0] > _CANON_BRANCH_CAP:
            raise ResourceLimitError("diagram canonicalisation branch cap exceeded")
        vid_of = {v: i for i, v in enumerate(disc)}
        newbase: list[int] = []
        pos = E
        for v in disc:
            newbase.append(pos)
            pos += _vert_size(verts[v])

        def vport(p: int) -> int:
            v = owner[p]
            if v is None:
                return p
            return newbase[vid_of[v]] + virt[v].index(p - base[v])

        edges = []
        for p in range(total):
            q = pairing[p]
            if p < q:
                a, b = vport(p), vport(q)
                edges.append((a, b) if a < b else (b, a))
        edges.sort()
        enc = (tuple(verts[v] for v in disc), tuple(edges))
        if best[0] is None or enc < best[0]:
            best[0], best[1], best[2] = enc, sign, False
        elif enc == best[0] and sign != best[1]:
            best[2] = True

    def walk(i: int, frontier: list[int], disc: list[int], virt: dict, sign: int) -> None:
        while i < len(frontier):
            p = frontier[i]
            q = pairing[p]
            v = owner[q]
            i += 1
            if v is None or v in virt:
                continue
            arrival = q - base[v]
            for order, s2 in _slot_orders(verts[v], arrival):
                virt[v] = order
                disc.append(v)
                added = [base[v] + sl for sl in order]
                walk(i, frontier + added, disc, virt, sign * s2)
                disc.pop()
                del virt[v]
            return
        left = [v for v in range(nverts) if v not in virt]
        if not left:
            finish(disc, virt, sign)
            return
        # seed a closed component: try every (vertex, slot) as the next anchor
        for v in left:
            for arrival in range(_vert_size(verts[v])):
                for order, s2 in _slot_orders(verts[v], arrival):
                    virt[v] = order
                    disc.append(v)
                    added = [base[v] + sl for sl in order]
                    walk(i, frontier + added, disc, virt, sign * s2)
                    disc.pop()
                    del virt[v]

    walk(0, list(range(E)), [], {}, 1)
    if best[2]:
        return None, 0
    kinds, edges = best[0]
    new_pairing = [0] * total
    for a, b in edges:
        new_pairing[a] = b
        new_pairing[b] = a
    return Diagram(tuple(sig), kinds, tuple(new_pairing)), best[1]


def _contract(
    sig: tuple[str, ...],
    names: tuple[str, ...],
    verts: tuple[Vert, ...],
    pairing: tuple[int, ...],
    pairs: Sequence[tuple[int, int]],
    check_kinds: bool = True,
):
    """Remove pairs of external ports, splicing their edges.  Returns
    (sig, names, verts, raw_pairing, n_quark_loops, n_gluon_loops)."""
    E = len(sig)
    removed: set[int] = set()
    jump: dict[int, int] = {}
    for a, b in pairs:
        if not (0 <= a < E and 0 <= b < E) or a == b:
            raise SignatureMismatchError(f"bad contraction pair ({a},{b})")
        if a in removed or b in removed:
            raise SignatureMismatchError("port contracted twice")
        kinds = (sig[a], sig[b])
        if check_kinds and kinds not in ((QOUT, QIN), (QIN, QOUT), (GLU, GLU)):
            raise SignatureMismatchError(f"incompatible port kinds {kinds}")
        removed.update((a, b))
        jump[a] = b
        jump[b] = a

    keep = [p for p in range(len(pairing)) if p not in removed]
    index = {p: k for k, p in enumerate(keep)}
    new_pairing = [0] * len(keep)
    on_chain: set[int] = set()
    for p in keep:
        q = pairing[p]
        while q in removed:
            on_chain.add(q)
            on_chain.add(jump[q])
            q = pairing[jump[q]]
        new_pairing[index[p]] = index[q]
    # removed ports not on any survivor chain form pure closed loops
    qloops = gloops = 0
    seen = set(on_chain)
    for p in removed:
        if p in seen:
            continue
        x = p
        while x not in seen:
            seen.add(x)
            seen.add(jump[x])
            x = pairing[jump[x]]
        if sig[p] == GLU:
            gloops += 1
        else:
            qloops += 1
    new_sig = tuple(sig[p] for p in keep if p < E)
    new_names = tuple(names[p] for p in keep if p < E)
    return new_sig, new_names, verts, tuple(new_pairing), qloops, gloops


_LOOP_Q = RF_N
_LOOP_G = RF_N * RF_N - 1


class TensorExpr:
    """Formal linear combination of diagrams sharing one external signature."""

    __slots__ = ("sig", "names", "terms")

    def __init__(
        self,
        sig: Sequence[str],
        names: Sequence[str] | None = None,
        terms: Mapping[Diagram, Scalar] | None = None,
    ):
        self.sig = tuple(sig)
        self.names = tuple(names) if names is not None else tuple(f"p{k}" for k in range(len(self.sig)))
        if len(self.names) != len(self.sig):
            raise SignatureMismatchError("names/signature length mismatch")
        self.terms: dict[Diagram, RationalFunction] = {}
        for d, c in (terms or {}).items():
            c = RationalFunction.coerce(c)
            if d.sig != self.sig:
                raise SignatureMismatchError("term signature differs from expression signature")
            if not c.is_zero:
                self.terms[d] = c

    # -- constructors

    @classmethod
    def zero(cls, sig: Sequence[str] = (), names: Sequence[str] | None = None) -> "TensorExpr":
        return cls(sig, names)

    @classmethod
    def scalar(cls, value: Scalar) -> "TensorExpr":
        value = RationalFunction.coerce(value)
        out = cls((), ())
        if not value.is_zero:
            d, _ = canonicalize((), (), ())
            out.terms[d] = value
        return out

    @classmethod
    def parse(cls, text: str) -> "TensorExpr":
        return parse_expression(text)

    @classmethod
    def from_permutation(cls, p: "Permutation | AlgebraElement") -> "TensorExpr":
        """Quark-line wiring of a permutation (or algebra element): externals
        are n quark-out ports then n quark-in ports; line j enters at in-port
        j and leaves at out-port p(j)."""
        if isinstance(p, Permutation):
            p = AlgebraElement.from_permutation(p)
        n = p.degree
        sig = (QOUT,) * n + (QIN,) * n
        names = tuple(f"j{k}" for k in range(1, n + 1)) + tuple(f"k{k}" for k in range(1, n + 1))
        out = cls(sig, names)
        for perm, coeff in p.terms.items():
            pairing = [0] * (2 * n)
            for j in range(1, n + 1):
                a, b = n + j - 1, perm(j) - 1
                pairing[a] = b
                pairing[b] = a
            d, sign = canonicalize(sig, (), pairing)
            out._accumulate(d, coeff * sign)
        return out

    # -- basic structure

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[Diagram, RationalFunction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def _accumulate(self, d: Diagram | None, c: RationalFunction) -> None:
        if d is None or c.is_zero:
            return
        v = self.terms.get(d)
        v = c if v is None else v + c
        if v.is_zero:
            self.terms.pop(d, None)
        else:
            self.terms[d] = v

    def _check_sig(self, other: "TensorExpr") -> None:
        if self.sig != other.sig:
            raise SignatureMismatchError(f"signature {self.sig} vs {other.sig}")

    # -- linear operations

    def __add__(self, other: "TensorExpr") -> "TensorExpr":
        self._check_sig(other)
        out = TensorExpr(self.sig, self.names, self.terms)
        for d, c in other.terms.items():
            out._accumulate(d, c)
        return out

    def __neg__(self) -> "TensorExpr":
        return self.scale(-1)

    def __sub__(self, other: "TensorExpr") -> "TensorExpr":
        return self + (-other)

    def scale(self, c: Scalar) -> "TensorExpr":
        c = RationalFunction.coerce(c)
        out = TensorExpr(self.sig, self.names)
        if not c.is_zero:
            out.terms = {d: v * c for d, v in self.terms.items()}
        return out

    def __mul__(self, c: Scalar) -> "TensorExpr":
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c: Scalar) -> "TensorExpr":
        return self.scale(RF_ONE / RationalFunction.coerce(c))

    # -- graph operations

    def dagger(self) -> "TensorExpr":
        """Hermitian conjugate: mirror the diagram and reverse all arrows.
        Quark-in/out roles swap; f vertices reverse cyclic order; coefficients
        (real rational functions) are unchanged."""
        sig = tuple({QOUT: QIN, QIN: QOUT}.get(k, k) for k in self.sig)
        out = TensorExpr(sig, self.names)
        for d, c in self.terms.items():
            pairing = list(d.pairing)
            base = len(d.sig)
            for v in d.verts:
                if v[0] in ("t", "f"):
                    s1, s2 = base + 1, base + 2
                    p1, p2 = pairing[s1], pairing[s2]
                    # swap attachments of the two slots (handles the self-edge)
                    if p1 == s2:
                        pass
                    else:
                        pairing[s1], pairing[s2] = p2, p1
                        pairing[p1] = s2
                        pairing[p2] = s1
                base += _vert_size(v)
            nd, sign = canonicalize(sig, d.verts, pairing)
            out._accumulate(nd, c * sign)
        return out

    def tensor_product(self, other: "TensorExpr") -> "TensorExpr":
        return self.compose(other, ())

    def compose(
        self, other: "TensorExpr", boundary: Sequence[tuple[int, int]]
    ) -> "TensorExpr":
        """Glue ports of self to ports of other: boundary lists (self_port,
        other_port) pairs; unmatched externals keep their order, self first."""
        Ea = len(self.sig)
        joint_sig = self.sig + other.sig
        used = set()
        names_b = []
        for nm in other.names:
            while nm in self.names or nm in names_b:
                nm += "_"
            names_b.append(nm)
        joint_names = self.names + tuple(names_b)
        pairs = [(a, Ea + b) for a, b in boundary]
        out: TensorExpr | None = None
        for da, ca in self.terms.items():
            for db, cb in other.terms.items():
                sig, names, verts, pairing = _union(da, self.names, db, joint_names[Ea:])
                nsig, nnames, verts, npair, ql, gl = _contract(sig, names, verts, pairing, pairs)
                if out is None:
                    out = TensorExpr(nsig, nnames)
                d, sign = canonicalize(nsig, verts, npair)
                out._accumulate(d, ca * cb * sign * _LOOP_Q**ql * _LOOP_G**gl)
        if out is None:
            out = TensorExpr(*_contracted_signature(joint_sig, joint_names, pairs))
        return out

    def partial_trace(self, pairs: Sequence[tuple[int, int]]) -> "TensorExpr":
        """Join quark-out to quark-in (or gluon to gluon) external ports."""
        out: TensorExpr | None = None
        for d, c in self.terms.items():
            nsig, nnames, verts, npair, ql, gl = _contract(
                d.sig, self.names, d.verts, d.pairing, pairs
            )
            if out is None:
                out = TensorExpr(nsig, nnames)
            nd, sign = canonicalize(nsig, verts, npair)
            out._accumulate(nd, c * sign * _LOOP_Q**ql * _LOOP_G**gl)
        if out is None:
            out = TensorExpr(*_contracted_signature(self.sig, self.names, pairs))
        return out

    def reorder_externals(self, order: Sequence[int]) -> "TensorExpr":
        """Permute the external ports: new port k is old port order[k]."""
        if sorted(order) != list(range(len(self.sig))):
            raise SignatureMismatchError("order must be a permutation of the ports")
        nsig = tuple(self.sig[o] for o in order)
        nnames = tuple(self.names[o] for o in order)
        inv = {o: k for k, o in enumerate(order)}
        out = TensorExpr(nsig, nnames)
        for d, c in self.terms.items():
            E = len(d.sig)

            def remap(p: int) -> int:
                return inv[p] if p < E else p

            pairing = [0] * len(d.pairing)
            for p, q in enumerate(d.pairing):
                pairing[remap(p)] = remap(q)
            nd, sign = canonicalize(nsig, d.verts, pairing)
            out._accumulate(nd, c * sign)
        return out

    # -- comparisons and helpers

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TensorExpr)
            and self.sig == other.sig
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.sig, frozenset(self.terms.items())))

    def ratio_to(self, other: "TensorExpr") -> RationalFunction | None:
        """Exact ratio self/other when the two expressions are proportional,
        else None.  Zero/zero counts as proportional with ratio 0."""
        self._check_sig(other)
        if self.is_zero:
            return RF_ZERO
        if other.is_zero or self.terms.keys() != other.terms.keys():
            return None
        ratio: RationalFunction | None = None
        for d, c in self.terms.items():
            r = c / other.terms[d]
            if ratio is None:
                ratio = r
            elif ratio != r:
                return None
        return ratio

    def __str__(self) -> str:
        return render_expression(self)

    def __repr__(self) -> str:
        return f"TensorExpr({''.join(self.sig) or 'scalar'}, {len(self.terms)} terms)"

    def to_json(self) -> str:
        out = {
            "externals": [
                {"name": n, "kind": k} for n, k in zip(self.names, self.sig)
            ],
            "terms": [
                {"coeff": str(c), "atoms": _render_diagram(d, self.names)}
                for d, c in self.sorted_terms()
            ],
        }
        return json.dumps(out)


def _contracted_signature(sig, names, pairs):
    removed = set()
    for a, b in pairs:
        kinds = (sig[a], sig[b])
        if kinds not in ((QOUT, QIN), (QIN, QOUT), (GLU, GLU)):
            raise SignatureMismatchError(f"incompatible port kinds {kinds}")
        removed.update((a, b))
    nsig = tuple(k for i, k in enumerate(sig) if i not in removed)
    nnames = tuple(n for i, n in enumerate(names) if i not in removed)
    return nsig, nnames


def _union(da: Diagram, names_a, db: Diagram, names_b):
    Ea, Eb = len(da.sig), len(db.sig)
    off_v = len(da.verts)
    sig = da.sig + db.sig
    names = tuple(names_a) + tuple(names_b)
    verts = da.verts + db.verts
    size_a = len(da.pairing)

    def map_a(p: int) -> int:
        return p if p < Ea else p + Eb

    def map_b(p: int) -> int:
        return p + Ea if p < Eb else p + size_a

    pairing = [0] * (size_a + len(db.pairing))
    for p, q in enumerate(da.pairing):
        pairing[map_a(p)] = map_a(q)
    for p, q in enumerate(db.pairing):
        pairing[map_b(p)] = map_b(q)
    return sig, names, verts, tuple(pairing)


# ---------------------------------------------------------------------------
# parsing


_ATOMS = ("delta", "gd", "t", "f", "dv", "sym", "asym")

_TOK = re.compile(
    r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|([()\[\];:,+\-*/^]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.rstrip()
    out: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.group(1):
            out.append(("int", m.group(1)))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            out.append(("op", m.group(3)))
    out.append(("end", ""))
    return out


# one parsed multiplicative unit: coefficient and a tuple of atom instances
# Atom = (kind, args) with args a tuple of name tuples (grouped per slot list)
_Sum = list  # list[tuple[RationalFunction, tuple]]


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, op: str):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def at_op(self, op: str) -> bool:
        return self.peek() == ("op", op)

    # header: [out: a,b; in: c; glu: d] in any section order; external order is
    # the order of appearance of the names
    def parse_header(self):
        if not self.at_op("["):
            return None
        self.next()
        order: list[tuple[str, str]] = []  # (name, kind)
        kinds = {"out": QOUT, "in": QIN, "glu": GLU}
        while True:
            kind, val = self.next()
            if kind != "name" or val not in kinds:
                raise ParseError(f"bad header section {val!r}")
            self.expect(":")
            while True:
                k2, name = self.next()
                if k2 != "name":
                    raise ParseError("expected index name in header")
                order.append((name, kinds[val]))
                if self.at_op(","):
                    self.next()
                    continue
                break
            if self.at_op(";"):
                self.next()
                continue
            self.expect("]")
            return order

    def parse(self) -> "TensorExpr":
        header = self.parse_header()
        value = self.parse_expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return _wire_sum(value, header)

    def parse_expr(self) -> _Sum:
        value = self.parse_term()
        while self.at_op("+") or self.at_op("-"):
            _, op = self.next()
            rhs = self.parse_term()
            if op == "-":
                rhs = [(-c, a) for c, a in rhs]
            value = value + rhs
        return value

    def parse_term(self) -> _Sum:
        value = self.parse_factor()
        while self.at_op("*") or self.at_op("/"):
            _, op = self.next()
            rhs = self.parse_factor()
            if op == "*":
                value = [(c1 * c2, a1 + a2) for c1, a1 in value for c2, a2 in rhs]
            else:
                value = [(c1 / _as_scalar(rhs), a1) for c1, a1 in value]
        return value

    def parse_factor(self) -> _Sum:
        sign = 1
        while self.at_op("-"):
            self.next()
            sign = -sign
        value = self.parse_primary()
        if self.at_op("^"):
            self.next()
            neg = False
            if self.at_op("-"):
                self.next()
                neg = True
            kind, val = self.next()
            if kind != "int":
                raise ParseError("exponent must be an integer")
            e = -int(val) if neg else int(val)
            value = [(_as_scalar(value) ** e, ())]
        if sign == -1:
            value = [(-c, a) for c, a in value]
        return value

    def parse_primary(self) -> _Sum:
        kind, val = self.next()
        if kind == "int":
            return [(RationalFunction.from_int(int(val)), ())]
        if kind == "name":
            if val == "N":
                return [(RF_N, ())]
            if val in ("TR", "T_R"):
                from .coeff import RF_TR

                return [(RF_TR, ())]
            if val in _ATOMS:
                return [(RF_ONE, (self.parse_atom(val),))]
            raise ParseError(f"unknown atom or symbol {val!r}")
        if (kind, val) == ("op", "("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")

    def parse_atom(self, name: str):
        self.expect("(")
        groups: list[list[str]] = [[]]
        while True:
            kind, val = self.next()
            if kind != "name":
                raise ParseError(f"expected index name in {name}(...), got {val!r}")
            groups[-1].append(val)
            if self.at_op(","):
                self.next()
                continue
            if self.at_op(";"):
                self.next()
                groups.append([])
                continue
            self.expect(")")
            break
        return _normalise_atom(name, groups)


def _as_scalar(value: _Sum) -> RationalFunction:
    total = RF_ZERO
    for c, atoms in value:
        if atoms:
            raise ParseError("division/power requires a scalar coefficient expression")
        total = total + c
    return total


def _normalise_atom(name: str, groups: list[list[str]]):
    flat = [x for g in groups for x in g]
    shapes = {
        "delta": (1, 2),
        "gd": (1, 2),
        "t": (2, 3),
        "f": (1, 3),
        "dv": (1, 3),
    }
    if name in shapes:
        ngroups, nargs = shapes[name]
        if name == "t":
            if len(groups) != 2 or len(groups[0]) != 1 or len(groups[1]) != 2:
                raise ParseError("generator atom is t(gluon; quark-out, quark-in)")
        else:
            if len(groups) != 1 or len(flat) != nargs:
                raise ParseError(f"{name} takes {nargs} indices")
        return (name, tuple(tuple(g) for g in groups))
    # bars
    if len(groups) != 2 or len(groups[0]) != len(groups[1]) or not groups[0]:
        raise ParseError(f"{name} takes two equal-length index lists")
    return (name, tuple(tuple(g) for g in groups))


def _wire_sum(value: _Sum, header) -> TensorExpr:
    expr: TensorExpr | None = None
    sig_names: tuple | None = None
    for coeff, atoms in value:
        if coeff.is_zero and not atoms:
            continue  # a zero scalar is the additive identity of any signature
        sig, names, verts, pairing, ql, gl = _wire_term(atoms, header)
        if expr is None:
            expr = TensorExpr(sig, names)
            sig_names = (sig, names)
        elif (sig, names) != sig_names:
            raise ParseError("terms differ in external signature")
        d, sign = canonicalize(sig, verts, pairing)
        expr._accumulate(d, coeff * sign * _LOOP_Q**ql * _LOOP_G**gl)
    if expr is None:
        if header is not None:
            return TensorExpr.zero(tuple(k for _, k in header), tuple(n for n, _ in header))
        return TensorExpr.zero()
    return expr


def _wire_term(atoms, header):
    """Build the port graph of one product of atoms."""
    verts: list[Vert] = []
    # endpoint: ("v", vid, slot) or ("l", link_id, end)
    occurrences: dict[str, list] = {}
    links: list[str] = []  # link kinds: "q" or "g"

    def occur(name: str, endpoint, polarity: str, typ: str):
        occurrences.setdefault(name, []).append((endpoint, polarity, typ))

    for kind, groups in atoms:
        if kind == "delta":
            lid = len(links)
            links.append("q")
            i, j = groups[0]
            occur(i, ("l", lid, 0), "up", "q")
            occur(j, ("l", lid, 1), "down", "q")
        elif kind == "gd":
            lid = len(links)
            links.append("g")
            a, b = groups[0]
            occur(a, ("l", lid, 0), "", "g")
            occur(b, ("l", lid, 1), "", "g")
        elif kind == "t":
            vid = len(verts)
            verts.append(("t", 0))
            (a,), (i, j) = groups
            occur(a, ("v", vid, 0), "", "g")
            occur(i, ("v", vid, 1), "up", "q")
            occur(j, ("v", vid, 2), "down", "q")
        elif kind in ("f", "dv"):
            vid = len(verts)
            verts.append(("f" if kind == "f" else "d", 0))
            for slot, a in enumerate(groups[0]):
                occur(a, ("v", vid, slot), "", "g")
        else:  # sym / asym
            w = len(groups[0])
            vid = len(verts)
            verts.append(("s" if kind == "sym" else "a", w))
            for slot, nm in enumerate(groups[0]):
                occur(nm, ("v", vid, slot), "up", "q")
            for slot, nm in enumerate(groups[1]):
                occur(nm, ("v", vid, w + slot), "down", "q")

    # classify names
    externals: list[tuple[str, str]] = []  # (name, sig kind)
    ties: dict = {}  # endpoint -> endpoint via shared name
    for name, occ in occurrences.items():
        types = {t for _, _, t in occ}
        if len(types) > 1:
            raise ParseError(f"index {name!r} mixes quark and gluon use")
        typ = types.pop()
        if len(occ) > 2:
            raise ParseError(f"index {name!r} used more than twice")
        if len(occ) == 2:
            pols = sorted(p for _, p, _ in occ)
            if typ == "q" and pols != ["down", "up"]:
                raise OrientationError(
                    f"index {name!r} must appear once as upper and once as lower"
                )
            (e1, _, _), (e2, _, _) = occ
            ties[e1] = e2
            ties[e2] = e1
        else:
            (endpoint, pol, _), = occ
            kind = GLU if typ == "g" else (QOUT if pol == "up" else QIN)
            externals.append((name, kind))

    # external order: header or lexicographic
    if header is not None:
        declared = {n: k for n, k in header}
        actual = dict(externals)
        if declared != actual:
            raise ParseError(
                f"header externals {sorted(declared.items())} do not match "
                f"term externals {sorted(actual.items())}"
            )
        ordered = list(header)
    else:
        ordered = sorted(externals)
    ext_index = {name: k for k, (name, _) in enumerate(ordered)}
    sig = tuple(k for _, k in ordered)
    names = tuple(n for n, _ in ordered)

    # resolve chains through link atoms into edges between real ports
    owner, base, total = _port_tables(len(sig), verts)
    pairing: list[int | None] = [None] * total

    def other_end(ep):
        # step across the link atom
        _, lid, end = ep
        return ("l", lid, 1 - end)

    # single-occurrence names tie their endpoint to the external port
    for k, (name, _kind) in enumerate(ordered):
        (ep, _p, _t), = occurrences[name]
        ties[ep] = ("x", k, 0)
        ties[("x", k, 0)] = ep

    def real_port(ep) -> int | None:
        if ep[0] == "v":
            return base[ep[1]] + ep[2]
        if ep[0] == "x":
            return ep[1]
        return None

    qloops = gloops = 0
    seen = set()
    # walk from every real endpoint
    starts = [ep for ep in ties if ep[0] in ("v", "x")]
    for start in starts:
        if start in seen:
            continue
        p0 = real_port(start)
        ep = ties[start]
        seen.add(start)
        while ep[0] == "l":
            seen.add(ep)
            ep = other_end(ep)
            seen.add(ep)
            ep = ties[ep]
        seen.add(ep)
        p1 = real_port(ep)
        if pairing[p0] is not None or pairing[p1] is not None or p0 == p1:
            raise ParseError("inconsistent index wiring")
        pairing[p0] = p1
        pairing[p1] = p0
    # closed pure-link cycles
    for lid, lkind in enumerate(links):
        ep = ("l", lid, 0)
        if ep in seen:
            continue
        x = ep
        while x not in seen:
            seen.add(x)
            y = other_end(x)
            seen.add(y)
            x = ties[y]
        if lkind == "g":
            gloops += 1
        else:
            qloops += 1
    if any(p is None for p in pairing):
        raise ParseError("unwired port")  # pragma: no cover
    _validate(sig, tuple(verts), tuple(pairing))
    return sig, names, tuple(verts), tuple(pairing), qloops, gloops


def parse_expression(text: str) -> TensorExpr:
    """Parse the tensor DSL.

    Grammar::

        expr   := [header] term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := ['-'] primary ['^' int]
        primary:= int | 'N' | 'TR' | 'T_R' | atom | '(' expr ')'
        atom   := 'delta(' q ',' q ')' | 'gd(' g ',' g ')'
                | 't(' g ';' q ',' q ')' | 'f(' g ',' g ',' g ')'
                | 'dv(' g ',' g ',' g ')'
                | 'sym(' qlist ';' qlist ')' | 'asym(' qlist ';' qlist ')'
        header := '[' section (';' section)* ']',
        section:= ('out'|'in'|'glu') ':' name (',' name)*

    The first argument slot of delta/t is the quark-out (upper) index, the
    second the quark-in (lower).  f(a,b,c) denotes i f^{abc} read in
    anti-clockwise order.  Division and powers apply to scalar coefficient
    subexpressions only.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# rendering


def _fresh_names(used: set[str], count: int, prefix: str) -> list[str]:
    out = []
    k = 1
    while len(out) < count:
        nm = f"{prefix}{k}"
        if nm not in used:
            out.append(nm)
            used.add(nm)
        k += 1
    return out


def _render_diagram(d: Diagram, ext_names: Sequence[str]) -> str:
    E = len(d.sig)
    owner, base, total = _port_tables(E, d.verts)
    edges = [(p, q) for p, q in enumerate(d.pairing) if p < q]
    used = set(ext_names)
    # name each edge
    edge_name: dict[tuple[int, int], str] = {}
    internal_q = [e for e in edges if _edge_kind(d, owner, base, e) == "q" and e[0] >= E]
    internal_g = [e for e in edges if _edge_kind(d, owner, base, e) == "g" and e[0] >= E]
    qnames = _fresh_names(used, len(internal_q), "q")
    gnames = _fresh_names(used, len(internal_g), "h")
    for e, nm in zip(internal_q, qnames):
        edge_name[e] = nm
    for e, nm in zip(internal_g, gnames):
        edge_name[e] = nm
    for e in edges:
        if e[0] < E:
            edge_name[e] = ext_names[e[0]]

    def name_at(p: int) -> str:
        q = d.pairing[p]
        return edge_name[(p, q) if p < q else (q, p)]

    # orientation of quark edges: the "up" (quark-out) name position sits at a
    # vertex tail or at an external quark-out port.  Bar slots are neutral, so
    # segments between distinct bars are oriented by a global balance solve:
    # every bar needs exactly w lines in and w lines out.
    def port_role(p: int) -> str:
        if p < E:
            return _ext_role(d.sig[p])
        return _slot_role(d.verts[owner[p]], p - base[owner[p]])

    # each bar has one binary direction: either its first slot group is the
    # quark-out side or its second is; fixed edges pin it, bar-bar segments
    # propagate it, leftover components default to the first group
    bar_dir: dict[int, int] = {}  # vid -> +1 (group A out) / -1 (group B out)
    for vid, v in enumerate(d.verts):
        if v[0] in "sa":
            bar_dir[vid] = 0

    def bar_side(p: int) -> int:
        return 0 if (p - base[owner[p]]) < d.verts[owner[p]][1] else 1

    def set_dir(vid: int, value: int) -> None:
        if bar_dir[vid] == 0:
            bar_dir[vid] = value
        elif bar_dir[vid] != value:
            raise OrientationError("quark flow through bars cannot be oriented")

    constraints: list[tuple[int, int, int, int]] = []  # (vidX, sideX, vidY, sideY)
    fixed: list[tuple[tuple[int, int], int]] = []
    for e in edges:
        p, q = e
        rp, rq = port_role(p), port_role(q)
        if rp == "g":
            continue
        if rp == "q" and rq == "q":
            if owner[p] == owner[q]:
                if bar_side(p) == bar_side(q):
                    raise OrientationError("bar traced within one slot group")
                continue  # self-segment is consistent either way
            constraints.append((owner[p], bar_side(p), owner[q], bar_side(q)))
            continue
        up = p if (rp == "tail" or rq == "head") else q
        fixed.append((e, up))
        for end, is_up in ((p, up == p), (q, up == q)):
            if end >= E and owner[end] in bar_dir:
                side = bar_side(end)
                set_dir(owner[end], 1 if (is_up == (side == 0)) else -1)
    def _want(s: int, up: bool) -> int:
        return 1 if (up == (s == 0)) else -1

    def _propagate() -> None:
        changed = True
        while changed:
            changed = False
            for vx, sx, vy, sy in constraints:
                # the two ends of a segment flow in opposite directions
                if bar_dir[vx] and not bar_dir[vy]:
                    up_x = (bar_dir[vx] == 1) == (sx == 0)
                    set_dir(vy, _want(sy, not up_x))
                    changed = True
                elif bar_dir[vy] and not bar_dir[vx]:
                    up_y = (bar_dir[vy] == 1) == (sy == 0)
                    set_dir(vx, _want(sx, not up_y))
                    changed = True
                elif bar_dir[vx] and bar_dir[vy]:
                    up_x = (bar_dir[vx] == 1) == (sx == 0)
                    up_y = (bar_dir[vy] == 1) == (sy == 0)
                    if up_x == up_y:
                        raise OrientationError(
                            "quark flow through bars cannot be oriented"
                        )

    _propagate()
    while any(val == 0 for val in bar_dir.values()):
        seed = next(v for v, val in bar_dir.items() if val == 0)
        bar_dir[seed] = 1
        _propagate()

    def slot_is_up(p: int) -> bool:
        return (bar_dir[owner[p]] == 1) == (bar_side(p) == 0)

    up_end: dict[tuple[int, int], int] = {}
    for e, up in fixed:
        up_end[e] = up
    for e in edges:
        if e in up_end:
            continue
        p, q = e
        rp, rq = port_role(p), port_role(q)
        if rp == "g":
            continue
        if owner[p] == owner[q]:
            up_end[e] = p if slot_is_up(p) else q
        else:
            up_end[e] = p if slot_is_up(p) else q

    atoms: list[str] = []
    # external-external edges
    for e in edges:
        p, q = e
        if p < E and q < E:
            if d.sig[p] == GLU:
                atoms.append(f"gd({ext_names[p]},{ext_names[q]})")
            else:
                up = p if d.sig[p] == QOUT else q
                dn = q if up == p else p
                atoms.append(f"delta({ext_names[up]},{ext_names[dn]})")
    # vertices
    for vid, v in enumerate(d.verts):
        b = base[vid]
        kind, w = v
        if kind == "t":
            atoms.append(f"t({name_at(b)};{name_at(b + 1)},{name_at(b + 2)})")
        elif kind == "f":
            atoms.append(f"f({name_at(b)},{name_at(b + 1)},{name_at(b + 2)})")
        elif kind == "d":
            atoms.append(f"dv({name_at(b)},{name_at(b + 1)},{name_at(b + 2)})")
        else:
            ups, downs = [], []
            for slot in range(2 * w):
                p = b + slot
                q = d.pairing[p]
                e = (p, q) if p < q else (q, p)
                (ups if up_end[e] == p else downs).append(name_at(p))
            if len(ups) != w or len(downs) != w:
                raise OrientationError("bar with unbalanced line directions")
            word = "sym" if kind == "s" else "asym"
            atoms.append(f"{word}({','.join(ups)};{','.join(downs)})")
    return "*".join(atoms) if atoms else "1"


def _edge_kind(d: Diagram, owner, base, e) -> str:
    p = e[0]
    if p < len(d.sig):
        return "g" if d.sig[p] == GLU else "q"
    role = _slot_role(d.verts[owner[p]], p - base[owner[p]])
    return "g" if role == "g" else "q"


def render_expression(e: TensorExpr) -> str:
    parts = []
    if e.sig:
        sections = []
        k = 0
        labels = {QOUT: "out", QIN: "in", GLU: "glu"}
        while k < len(e.sig):
            j = k
            while j < len(e.sig) and e.sig[j] == e.sig[k]:
                j += 1
            sections.append(f"{labels[e.sig[k]]}: {','.join(e.names[k:j])}")
            k = j
        parts.append("[" + "; ".join(sections) + "] ")
    if e.is_zero:
        parts.append("0")
        return "".join(parts)
    terms = []
    for d, c in e.sorted_terms():
        body = _render_diagram(d, e.names)
        if body == "1":
            terms.append(f"({c})")
        else:
            terms.append(f"({c})*{body}")
    parts.append(" + ".join(terms))
    return "".join(parts)
