"""Reduction of tensor expressions to trace-basis normal form.

The rewriting is staged and terminating: triple-gluon vertices are first
replaced by (anti-)symmetrised generator loops, then bars are expanded into
signed permutation sums, then every internal gluon line is removed with the
completeness (Fierz) identity
``t(a;j,k) t(a;l,m) = T_R (delta(j,m) delta(l,k) - 1/N delta(j,k) delta(l,m))``,
and finally closed quark loops are read off: an empty loop gives N, a loop
through a single generator vanishes (tr t^a = 0), a loop through two
generators gives T_R times a gluon pairing, and longer loops become closed
traces.  The resulting normal form is a sum of wirings: open quark strings,
closed traces (length >= 3, stored at the lexicographically minimal
rotation), and external gluon pairings."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .coeff import RF_N, RF_ONE, RF_TR, RF_ZERO, RationalFunction, Scalar
from .errors import (
    EngineError,
    ResourceLimitError,
    SignatureMismatchError,
)
from .tensor import (
    GLU,
    QIN,
    QOUT,
    Diagram,
    TensorExpr,
    _contract,
    _port_tables,
    _union,
    _vert_size,
    canonicalize,
)

_LOOP_Q = RF_N
_LOOP_G = RF_N * RF_N - 1


@dataclass(frozen=True)
class Limits:
    """Expansion caps for the rewriting pipeline."""

    max_terms: int = 10**6
    bar_cap: int = 8


DEFAULT_LIMITS = Limits()


def _guard(count: int, limits: Limits) -> None:
    if count > limits.max_terms:
        raise ResourceLimitError(f"intermediate term count exceeds {limits.max_terms}")


# ---------------------------------------------------------------------------
# graph surgery helpers


def _detach_vertices(d: Diagram, vids: Sequence[int]):
    """Remove vertices, exposing their slots as pseudo-external ports appended
    after the real externals (in vid order, slots in layout order).  Returns
    (sig, verts, pairing, first_pseudo_index)."""
    E = len(d.sig)
    vids = sorted(vids)
    owner, base, total = _port_tables(E, d.verts)
    removed_ports: list[int] = []
    pseudo_kinds: list[str] = []
    for vid in vids:
        kind, w = d.verts[vid]
        size = _vert_size(d.verts[vid])
        for s in range(size):
            removed_ports.append(base[vid] + s)
            if kind in "fd" or (kind == "t" and s == 0):
                pseudo_kinds.append(GLU)
            else:
                pseudo_kinds.append(QIN)  # quark-ish; kind checks are off here
    removed_set = set(removed_ports)
    pseudo_of = {p: E + k for k, p in enumerate(removed_ports)}
    keep_tail = [p for p in range(E, total) if p not in removed_set]
    tail_of = {p: E + len(removed_ports) + k for k, p in enumerate(keep_tail)}

    def remap(p: int) -> int:
        if p < E:
            return p
        if p in pseudo_of:
            return pseudo_of[p]
        return tail_of[p]

    new_sig = d.sig + tuple(pseudo_kinds)
    new_verts = tuple(v for i, v in enumerate(d.verts) if i not in set(vids))
    new_pairing = [0] * total
    for p, q in enumerate(d.pairing):
        new_pairing[remap(p)] = remap(q)
    return new_sig, new_verts, tuple(new_pairing), E


def _drop_direct_edge(sig, verts, pairing, a: int, b: int):
    """Delete two external ports joined by a direct edge (no splice, no loop)."""
    if pairing[a] != b:
        raise EngineError("ports are not directly connected")
    keep = [p for p in range(len(pairing)) if p not in (a, b)]
    index = {p: k for k, p in enumerate(keep)}
    new_pairing = tuple(index[pairing[p]] for p in keep)
    new_sig = tuple(k for i, k in enumerate(sig) if i < len(sig) and i not in (a, b))
    return new_sig, verts, new_pairing


def _glue(sig, verts, pairing, pairs):
    """Contract pseudo-external pairs; returns (verts, pairing, sig, loop factor)."""
    names = tuple(f"x{k}" for k in range(len(sig)))
    nsig, _names, verts, npair, ql, gl = _contract(
        sig, names, verts, pairing, pairs, check_kinds=False
    )
    return nsig, verts, npair, _LOOP_Q**ql * _LOOP_G**gl


# the three-generator quark loop with gluon externals (g0, g1, g2) attached to
# the cycle t0 -> t1 -> t2; gluing an i f^{abc} vertex's slots (a, b, c) onto
# (g0, g1, g2) in the order (a, c, b) yields + tr(t^a t^b t^c) / T_R, in the
# order (a, b, c) it yields + tr(t^a t^c t^b) / T_R
_LOOP_SIG = (GLU, GLU, GLU)
_LOOP_VERTS = (("t", 0), ("t", 0), ("t", 0))
_LOOP_PAIRING = (3, 6, 9, 0, 8, 10, 1, 11, 4, 2, 5, 7)

_F_ORDERS = (((0, 2, 1), 1), ((0, 1, 2), -1))
_D_ORDERS = (((0, 2, 1), 1), ((0, 1, 2), 1))


def eliminate_fd(e: TensorExpr, limits: Limits = DEFAULT_LIMITS) -> TensorExpr:
    """Replace every triple-gluon vertex by its pair of generator-loop terms:
    i f -> (1/T_R) (tr-loop - reversed loop), d -> (1/T_R) (tr-loop + reversed).
    """
    out = TensorExpr(e.sig, e.names)
    work = list(e.terms.items())
    while work:
        d, c = work.pop()
        vid = next((i for i, v in enumerate(d.verts) if v[0] in "fd"), None)
        if vid is None:
            out._accumulate(d, c)
            continue
        kind = d.verts[vid][0]
        sig, verts, pairing, p0 = _detach_vertices(d, [vid])
        orders = _F_ORDERS if kind == "f" else _D_ORDERS
        for order, sgn in orders:
            usig, _, uverts, upair = _union_raw(sig, verts, pairing, _LOOP_SIG, _LOOP_VERTS, _LOOP_PAIRING)
            pairs = [(p0 + order[k], len(sig) + k) for k in range(3)]
            nsig, nverts, npair, factor = _glue(usig, uverts, upair, pairs)
            nd, sign = canonicalize(nsig, nverts, npair)
            if nd is None:
                continue
            coeff = c * Fraction(sgn) * sign * factor / RF_TR
            if any(v[0] in "fd" for v in nd.verts):
                work.append((nd, coeff))
            else:
                out._accumulate(nd, coeff)
        _guard(len(work) + len(out.terms), limits)
    return out


def _union_raw(sig_a, verts_a, pair_a, sig_b, verts_b, pair_b):
    da = Diagram(tuple(sig_a), tuple(verts_a), tuple(pair_a))
    db = Diagram(tuple(sig_b), tuple(verts_b), tuple(pair_b))
    names_a = tuple(f"a{k}" for k in range(len(sig_a)))
    names_b = tuple(f"b{k}" for k in range(len(sig_b)))
    return _union(da, names_a, db, names_b)


def expand_bars(e: TensorExpr, limits: Limits = DEFAULT_LIMITS) -> TensorExpr:
    """Replace every (anti-)symmetriser bar by its signed permutation sum with
    the 1/w! prefactor."""
    out = TensorExpr(e.sig, e.names)
    work = list(e.terms.items())
    while work:
        d, c = work.pop()
        vid = next((i for i, v in enumerate(d.verts) if v[0] in "sa"), None)
        if vid is None:
            out._accumulate(d, c)
            continue
        kind, w = d.verts[vid]
        if w > limits.bar_cap:
            raise ResourceLimitError(f"bar width {w} exceeds cap {limits.bar_cap}")
        sig, verts, pairing, p0 = _detach_vertices(d, [vid])
        norm = Fraction(1, _fact(w))
        for perm in itertools.permutations(range(w)):
            sgn = _perm_sign(perm) if kind == "a" else 1
            pairs = [(p0 + i, p0 + w + perm[i]) for i in range(w)]
            nsig, nverts, npair, factor = _glue(sig, verts, pairing, pairs)
            nd, sign = canonicalize(nsig, nverts, npair)
            if nd is None:
                continue
            coeff = c * (sgn * norm) * sign * factor
            if any(v[0] in "sa" for v in nd.verts):
                work.append((nd, coeff))
            else:
                out._accumulate(nd, coeff)
        _guard(len(work) + len(out.terms), limits)
    return out


def _fact(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _perm_sign(perm) -> int:
    inv = sum(
        1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j]
    )
    return -1 if inv % 2 else 1


def _find_internal_gluon(d: Diagram) -> tuple[int, int] | None:
    E = len(d.sig)
    owner, base, total = _port_tables(E, d.verts)
    for p in range(E, total):
        q = d.pairing[p]
        if q <= p or q < E:
            continue
        vp, vq = owner[p], owner[q]
        if d.verts[vp][0] == "t" and p - base[vp] == 0 and d.verts[vq][0] == "t" and q - base[vq] == 0:
            return p, q
    return None


def fierz_reduce(e: TensorExpr, limits: Limits = DEFAULT_LIMITS) -> TensorExpr:
    """Remove internal gluon lines with the completeness identity; expects an
    expression free of triple-gluon vertices and bars."""
    for d in e.terms:
        if any(v[0] in "fdsa" for v in d.verts):
            raise EngineError("fierz_reduce requires eliminate_fd and expand_bars first")
    out = TensorExpr(e.sig, e.names)
    work = list(e.terms.items())
    while work:
        d, c = work.pop()
        edge = _find_internal_gluon(d)
        if edge is None:
            out._accumulate(d, c)
            continue
        p, q = edge
        owner, base, _ = _port_tables(len(d.sig), d.verts)
        u, v = owner[p], owner[q]
        sig, verts, pairing, p0 = _detach_vertices(d, [u, v])
        # pseudo ports: (u.g, u.qo, u.qi, v.g, v.qo, v.qi)
        sig, verts, pairing = _drop_direct_edge(sig, verts, pairing, p0, p0 + 3)
        # after the drop: (u.qo, u.qi, v.qo, v.qi)
        uo, ui, vo, vi = p0, p0 + 1, p0 + 2, p0 + 3
        for pairs, weight in (
            ([(uo, vi), (vo, ui)], RF_TR),
            ([(uo, ui), (vo, vi)], -RF_TR / RF_N),
        ):
            nsig, nverts, npair, factor = _glue(sig, verts, pairing, pairs)
            nd, sign = canonicalize(nsig, nverts, npair)
            if nd is None:
                continue
            coeff = c * weight * sign * factor
            if _find_internal_gluon(nd) is not None:
                work.append((nd, coeff))
            else:
                out._accumulate(nd, coeff)
        _guard(len(work) + len(out.terms), limits)
    return out


# ---------------------------------------------------------------------------
# normal form


@dataclass(frozen=True)
class Wiring:
    """Canonical trace-basis wiring over the external ports: open quark
    strings (out port, gluon labels in product order, in port), closed traces
    (length >= 3, minimal rotation), and gluon pairings."""

    strings: tuple[tuple[int, tuple[int, ...], int], ...] = ()
    traces: tuple[tuple[int, ...], ...] = ()
    pairs: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(strings, traces, pairs) -> "Wiring":
        strings = tuple(sorted(tuple(s) for s in strings))
        traces = tuple(sorted(_min_rotation(tuple(t)) for t in traces))
        pairs = tuple(sorted(tuple(sorted(p)) for p in pairs))
        return Wiring(strings, traces, pairs)


def _min_rotation(t: tuple[int, ...]) -> tuple[int, ...]:
    return min(t[k:] + t[:k] for k in range(len(t)))


class NormalForm:
    """Trace-basis normal form: canonical wirings with exact coefficients."""

    __slots__ = ("sig", "names", "terms")

    def __init__(
        self,
        sig: Sequence[str],
        names: Sequence[str] | None = None,
        terms: Mapping[Wiring, Scalar] | None = None,
    ):
        self.sig = tuple(sig)
        self.names = tuple(names) if names is not None else tuple(f"p{k}" for k in range(len(self.sig)))
        self.terms: dict[Wiring, RationalFunction] = {}
        for w, c in (terms or {}).items():
            c = RationalFunction.coerce(c)
            if not c.is_zero:
                self.terms[w] = c

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, w: Wiring) -> RationalFunction:
        return self.terms.get(w, RF_ZERO)

    def scalar(self) -> RationalFunction:
        """Value of an empty-signature normal form."""
        if self.sig:
            raise SignatureMismatchError("scalar() on a non-scalar normal form")
        return self.terms.get(Wiring(), RF_ZERO)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, NormalForm)
            and self.sig == other.sig
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.sig, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Wiring, RationalFunction]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0].strings, kv[0].traces, kv[0].pairs))

    def ratio_to(self, other: "NormalForm") -> RationalFunction | None:
        if self.sig != other.sig:
            raise SignatureMismatchError("normal forms on different signatures")
        if self.is_zero:
            return RF_ZERO
        if other.is_zero or self.terms.keys() != other.terms.keys():
            return None
        ratio: RationalFunction | None = None
        for w, c in self.terms.items():
            r = c / other.terms[w]
            if ratio is None:
                ratio = r
            elif ratio != r:
                return None
        return ratio

    def to_expr(self) -> TensorExpr:
        out = TensorExpr(self.sig, self.names)
        for w, c in self.terms.items():
            sig = self.sig
            verts: list = []
            edges: list[tuple[int, int]] = []
            E = len(sig)
            base = E

            def new_t() -> int:
                nonlocal base
                verts.append(("t", 0))
                b = base
                base += 3
                return b

            for out_p, gluons, in_p in w.strings:
                prev_tail = in_p  # external in-port is a tail
                for a in reversed(gluons):
                    b = new_t()
                    edges.append((b, a))  # gluon slot to external gluon
                    edges.append((prev_tail, b + 2))  # into t.qi
                    prev_tail = b + 1  # t.qo
                edges.append((prev_tail, out_p))
            for tr in w.traces:
                bases = [new_t() for _ in tr]
                for b, a in zip(bases, tr):
                    edges.append((b, a))
                k = len(tr)
                for j in range(k):
                    # product order: t(a_{j+1}).qo -> t(a_j).qi
                    edges.append((bases[(j + 1) % k] + 1, bases[j] + 2))
            for a, b in w.pairs:
                edges.append((a, b))
            pairing = [0] * base
            for a, b in edges:
                pairing[a] = b
                pairing[b] = a
            d, sign = canonicalize(sig, tuple(verts), pairing)
            out._accumulate(d, c * sign)
        return out

    def to_dsl(self) -> str:
        return str(self.to_expr())

    def to_json(self) -> str:
        nm = self.names

        def wiring_json(w: Wiring):
            return {
                "strings": [
                    {"out": nm[o], "gluons": [nm[a] for a in g], "in": nm[i]}
                    for o, g, i in w.strings
                ],
                "traces": [[nm[a] for a in t] for t in w.traces],
                "pairs": [[nm[a], nm[b]] for a, b in w.pairs],
            }

        return json.dumps(
            {
                "externals": [{"name": n, "kind": k} for n, k in zip(self.names, self.sig)],
                "terms": [
                    {"wiring": wiring_json(w), "coeff": str(c)}
                    for w, c in self.sorted_terms()
                ],
            }
        )

    def __str__(self) -> str:
        return self.to_dsl()

    def __repr__(self) -> str:
        return f"NormalForm({''.join(self.sig) or 'scalar'}, {len(self.terms)} terms)"


def _extract_wiring(d: Diagram) -> tuple[Wiring | None, RationalFunction]:
    """Read the trace-basis wiring off a reduced diagram (generators only, no
    internal gluon edges).  Returns (None, 0) when a single-generator loop
    kills the term; the factor collects T_R powers from two-generator loops."""
    E = len(d.sig)
    owner, base, total = _port_tables(E, d.verts)
    glabel: dict[int, int] = {}
    succ: dict[int, int | None] = {}  # vid -> next vid along quark flow (None=external)
    out_end: dict[int, int] = {}
    for vid, v in enumerate(d.verts):
        if v[0] != "t":
            raise EngineError("unreduced vertex in wiring extraction")
        b = base[vid]
        ga = d.pairing[b]
        if ga >= E:
            raise EngineError("internal gluon line in wiring extraction")
        glabel[vid] = ga
        nxt = d.pairing[b + 1]  # partner of quark-out slot
        if nxt < E:
            succ[vid] = None
            out_end[vid] = nxt
        else:
            succ[vid] = owner[nxt]
    strings = []
    visited: set[int] = set()
    for p in range(E):
        if d.sig[p] != QIN:
            continue
        x = d.pairing[p]
        if x < E:
            strings.append((x, (), p))
            continue
        vid = owner[x]
        labels = []
        while True:
            visited.add(vid)
            labels.append(glabel[vid])
            if succ[vid] is None:
                strings.append((out_end[vid], tuple(reversed(labels)), p))
                break
            vid = succ[vid]
    factor = RF_ONE
    traces: list[tuple[int, ...]] = []
    pairs: list[tuple[int, int]] = []
    for vid in range(len(d.verts)):
        if vid in visited:
            continue
        cycle = []
        x = vid
        while x not in visited:
            visited.add(x)
            cycle.append(glabel[x])
            x = succ[x]
        if len(cycle) == 1:
            return None, RF_ZERO  # tr t^a = 0
        labels = tuple(reversed(cycle))
        if len(labels) == 2:
            # tr(t^a t^b) = T_R gd(a,b)
            factor = factor * RF_TR
            pairs.append(labels)
        else:
            traces.append(labels)
    for p in range(E):
        q = d.pairing[p]
        if q < E and p < q and d.sig[p] == GLU:
            pairs.append((p, q))
    return Wiring.make(strings, traces, pairs), factor


def normal_form(e: TensorExpr, limits: Limits = DEFAULT_LIMITS) -> NormalForm:
    """Full reduction: triple-gluon vertices to loops, bars to permutations,
    internal gluons away with the completeness identity, loops evaluated."""
    reduced = fierz_reduce(expand_bars(eliminate_fd(e, limits), limits), limits)
    nf = NormalForm(e.sig, e.names)
    for d, c in reduced.terms.items():
        w, factor = _extract_wiring(d)
        if w is None:
            continue
        cur = nf.terms.get(w, RF_ZERO) + c * factor
        if cur.is_zero:
            nf.terms.pop(w, None)
        else:
            nf.terms[w] = cur
    return nf


def inner_product(
    c1: TensorExpr, c2: TensorExpr, limits: Limits = DEFAULT_LIMITS
) -> RationalFunction:
    """<c1, c2> = tr(c1^dagger c2): full contraction, exact."""
    if c1.sig != c2.sig:
        raise SignatureMismatchError(f"signature {c1.sig} vs {c2.sig}")
    glued = c1.dagger().compose(c2, [(k, k) for k in range(len(c1.sig))])
    return normal_form(glued, limits).scalar()


# ---------------------------------------------------------------------------
# worked constants


def derive_casimir_fundamental(limits: Limits = DEFAULT_LIMITS) -> RationalFunction:
    """Coefficient of the bare quark line in the one-gluon self-energy wiring."""
    nf = normal_form(TensorExpr.parse("t(a;i,k)*t(a;k,j)"), limits)
    return nf.coefficient(Wiring.make([(0, (), 1)], [], []))


def derive_casimir_adjoint(limits: Limits = DEFAULT_LIMITS) -> RationalFunction:
    """Coefficient of the gluon line in the two-vertex gluon self-energy."""
    nf = normal_form(TensorExpr.parse("f(a,x,y)*f(b,y,x)"), limits)
    return nf.coefficient(Wiring.make([], [], [(0, 1)]))
