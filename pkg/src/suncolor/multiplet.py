"""Bases for colour space: trace bases, the gluon projector set on A x A,
quark multiplet bases, transition operators via the Schur-connector search,
and exact basis verification.

Map convention: a basis vector for a colour space viewed as a linear map
carries its output half first, then its input half; ``split`` is the size of
the output half and the input half has the complementary port kinds.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .coeff import RF_N, RF_ONE, RationalFunction
from .errors import (
    ConnectorNotFoundError,
    ResourceLimitError,
    SignatureMismatchError,
    VerificationError,
)
from .rewrite import Limits, DEFAULT_LIMITS, NormalForm, Wiring, inner_product, normal_form
from .tableaux import standard_tableaux
from .tensor import GLU, QIN, QOUT, TensorExpr, canonicalize
from .young import hermitian_young

_FLIP = {QOUT: QIN, QIN: QOUT, GLU: GLU}


@dataclass
class BasisVector:
    """One labelled element of a (candidate) basis of colour space."""

    label: str
    expr: TensorExpr
    kind: str  # "projector" | "transition" | "spanning"
    norm_sq: RationalFunction
    dimension: RationalFunction | None = None
    split: int | None = None  # output-half size when the vector is a map

    def __repr__(self) -> str:
        return f"BasisVector({self.label!r}, {self.kind})"


# ---------------------------------------------------------------------------
# map helpers


def identity_map(half: Sequence[str], names: Sequence[str] | None = None) -> TensorExpr:
    """Identity wiring on the space described by the output-half kinds."""
    half = tuple(half)
    sig = half + tuple(_FLIP[k] for k in half)
    if names is None:
        names = tuple(f"a{k + 1}" for k in range(len(half))) + tuple(
            f"b{k + 1}" for k in range(len(half))
        )
    split = len(half)
    pairing = [0] * (2 * split)
    for k in range(split):
        pairing[k] = split + k
        pairing[split + k] = k
    d, sign = canonicalize(sig, (), pairing)
    return TensorExpr(sig, names, {d: RationalFunction.from_int(sign)})


def compose_maps(x: TensorExpr, y: TensorExpr, split: int) -> TensorExpr:
    """x after y for maps sharing the same carrier space."""
    boundary = [(split + k, k) for k in range(split)]
    return x.compose(y, boundary)


def map_trace(x: TensorExpr, split: int, limits: Limits = DEFAULT_LIMITS) -> RationalFunction:
    """Closed trace of a map: output half joined to input half."""
    pairs = [(k, split + k) for k in range(split)]
    return normal_form(x.partial_trace(pairs), limits).scalar()


def map_dagger(x: TensorExpr, split: int) -> TensorExpr:
    """Hermitian conjugate brought back onto the original port order."""
    n = len(x.sig)
    order = list(range(split, n)) + list(range(split))
    return x.dagger().reorder_externals(order)


def proportionality(a: TensorExpr, b: TensorExpr, limits: Limits = DEFAULT_LIMITS) -> RationalFunction | None:
    """Exact ratio a/b of the two normal forms, or None if not proportional."""
    return normal_form(a, limits).ratio_to(normal_form(b, limits))


# ---------------------------------------------------------------------------
# trace bases


def trace_basis(n_q: int, n_g: int, cap: int = 8) -> list[BasisVector]:
    """All non-vanishing wirings of external (anti)quark ends after attaching
    a generator to each external gluon; single-generator loops are dropped by
    tr t^a = 0 and prefactors are omitted."""
    if n_q + n_g < 1:
        raise ValueError("need at least one external line")
    if n_q + n_g > cap:
        raise ResourceLimitError(f"trace basis size {n_q + n_g} exceeds cap {cap}")
    sig = (QOUT,) * n_q + (QIN,) * n_q + (GLU,) * n_g
    names = (
        tuple(f"u{k + 1}" for k in range(n_q))
        + tuple(f"d{k + 1}" for k in range(n_q))
        + tuple(f"a{k + 1}" for k in range(n_g))
    )
    outs = list(range(n_q))
    glu = list(range(2 * n_q, 2 * n_q + n_g))
    # tails: external quark-in ports and each generator's outgoing stub;
    # heads: external quark-out ports and each generator's incoming stub
    tails = [("x", n_q + k) for k in range(n_q)] + [("t", k) for k in range(n_g)]
    heads = [("x", k) for k in outs] + [("t", k) for k in range(n_g)]
    wirings: list[Wiring] = []
    seen = set()
    for images in itertools.permutations(range(len(heads))):
        succ = {tails[i]: heads[images[i]] for i in range(len(tails))}
        strings = []
        traces = []
        pairs = []
        ok = True
        used: set = set()
        # open strings from each external quark-in port
        for k in range(n_q):
            node = succ[("x", n_q + k)]
            labels = []
            while node[0] == "t":
                used.add(node[1])
                labels.append(glu[node[1]])
                node = succ[("t", node[1])]
            strings.append((node[1], tuple(reversed(labels)), n_q + k))
        for k in range(n_g):
            if k in used:
                continue
            cycle = []
            node = ("t", k)
            while node[1] not in used or node[0] != "t":
                used.add(node[1])
                cycle.append(glu[node[1]])
                node = succ[node]
                if node[0] != "t":  # pragma: no cover - cannot leave a cycle
                    raise AssertionError
                if node[1] == k:
                    break
            if len(cycle) == 1:
                ok = False  # tr t^a = 0
                break
            labels = tuple(reversed(cycle))
            if len(labels) == 2:
                pairs.append(tuple(sorted(labels)))
            else:
                traces.append(labels)
        if not ok:
            continue
        w = Wiring.make(strings, traces, pairs)
        if w in seen:
            continue
        seen.add(w)
        wirings.append(w)
    out = []
    for k, w in enumerate(wirings):
        nf = NormalForm(sig, names, {w: RF_ONE})
        expr = nf.to_expr()
        out.append(
            BasisVector(
                label=f"c{k + 1}",
                expr=expr,
                kind="spanning",
                norm_sq=inner_product(expr, expr),
            )
        )
    return out


def gram_matrix(vs: Sequence[BasisVector], limits: Limits = DEFAULT_LIMITS) -> list[list[RationalFunction]]:
    sig = vs[0].expr.sig
    for v in vs:
        if v.expr.sig != sig:
            raise SignatureMismatchError("basis vectors on different signatures")
    return [[inner_product(a.expr, b.expr, limits) for b in vs] for a in vs]


def gram_rank_at(vs: Sequence[BasisVector], n: int, tr: Fraction = Fraction(1, 2)) -> int:
    """Exact rank of the Gram matrix evaluated at a concrete (N, T_R)."""
    gram = gram_matrix(vs)
    rows = [[entry.evaluate(n, tr) for entry in row] for row in gram]
    return matrix_rank_fractions(rows)


def matrix_rank_fractions(rows: list[list[Fraction]]) -> int:
    m = [list(map(Fraction, row)) for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pv = m[row][col]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [x - factor * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


# ---------------------------------------------------------------------------
# connector search (Schur)


def _matchings(items: list[tuple[int, str]]):
    """All perfect matchings of (id, role) items; quark tails pair heads,
    gluons pair gluons."""
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        second = items[k]
        roles = {first[1], second[1]}
        if roles == {"g"} or roles == {"tail", "head"}:
            rest = items[1:k] + items[k + 1 :]
            for sub in _matchings(rest):
                yield [(first[0], second[0])] + sub


_CONNECTOR_VERTEX_SETS: tuple[tuple[str, ...], ...] = (
    (),
    ("t",),
    ("f",),
    ("d",),
    ("t", "t"),
    ("t", "f"),
    ("t", "d"),
    ("f", "d"),
    ("f", "f"),
    ("d", "d"),
)


def connector_candidates(out_half: Sequence[str], in_half: Sequence[str]) -> Iterable[TensorExpr]:
    """Deterministic enumeration of invariant connector wirings from the
    space with the given input half onto the given output half: pure pairings
    first, then wirings with one generator, one f, one d, then two-vertex
    combinations.  Structurally vanishing candidates are skipped."""
    sig = tuple(out_half) + tuple(_FLIP[k] for k in in_half)
    names = tuple(f"c{k}" for k in range(len(sig)))
    seen_nf = set()
    for vset in _CONNECTOR_VERTEX_SETS:
        verts = tuple(("t", 0) if v == "t" else ("f" if v == "f" else "d", 0) for v in vset)
        items: list[tuple[int, str]] = []
        for p, k in enumerate(sig):
            items.append((p, {QOUT: "head", QIN: "tail", GLU: "g"}[k]))
        base = len(sig)
        for v in verts:
            if v[0] == "t":
                items.extend([(base, "g"), (base + 1, "tail"), (base + 2, "head")])
            else:
                items.extend([(base, "g"), (base + 1, "g"), (base + 2, "g")])
            base += 3
        for edges in _matchings(items):
            pairing = [0] * base
            for a, b in edges:
                pairing[a] = b
                pairing[b] = a
            d, sign = canonicalize(sig, verts, pairing)
            if d is None:
                continue
            expr = TensorExpr(sig, names, {d: RationalFunction.from_int(sign)})
            nf = normal_form(expr)
            if nf.is_zero:
                continue
            key = (sig, frozenset(nf.terms.items()))
            if key in seen_nf:
                continue
            seen_nf.add(key)
            yield expr


def transition_operators(
    source: BasisVector,
    target: BasisVector,
    limits: Limits = DEFAULT_LIMITS,
) -> BasisVector:
    """Transition operator mapping the source multiplet onto the (equivalent)
    target multiplet: the first non-vanishing sandwich target * C * source
    over the fixed connector enumeration, returned unnormalised with its
    norm squared."""
    if source.split is None or target.split is None:
        raise ValueError("transition endpoints must be maps (split set)")
    s_half = source.expr.sig[: source.split]
    t_half = target.expr.sig[: target.split]
    src = normal_form(source.expr, limits).to_expr()
    tgt = normal_form(target.expr, limits).to_expr()
    for cand in connector_candidates(t_half, s_half):
        step = tgt.compose(cand, [(target.split + k, k) for k in range(len(t_half))])
        sandwich = step.compose(
            src, [(target.split + k, k) for k in range(len(s_half))]
        )
        nf = normal_form(sandwich, limits)
        if nf.is_zero:
            continue
        expr = nf.to_expr()
        return BasisVector(
            label=f"{source.label}->{target.label}",
            expr=expr,
            kind="transition",
            norm_sq=inner_product(expr, expr, limits),
            split=target.split,
        )
    raise ConnectorNotFoundError(
        f"no non-vanishing connector from {source.label} to {target.label}"
    )


# ---------------------------------------------------------------------------
# gluon projectors on A x A


def _normalise_projector(label: str, raw: TensorExpr, split: int, limits: Limits) -> BasisVector:
    """Scale a candidate with raw*raw = kappa*raw into an exact projector."""
    square = compose_maps(raw, raw, split)
    kappa = proportionality(square, raw, limits)
    if kappa is None or kappa.is_zero:
        raise VerificationError(f"candidate {label} does not square to a multiple of itself")
    expr = normal_form(raw.scale(RF_ONE / kappa), limits).to_expr()
    dim = map_trace(expr, split, limits)
    return BasisVector(
        label=label,
        expr=expr,
        kind="projector",
        norm_sq=dim,  # <P, P> = tr P for a Hermitian projector
        dimension=dim,
        split=split,
    )


def gluon_projectors_AA(limits: Limits = DEFAULT_LIMITS) -> list[BasisVector]:
    """The seven projectors decomposing A x A, valid at symbolic N:
    singlet (bent-back gluon pair), two adjoints (f- and d-vertex bridges,
    normalised by enforcing P*P = P), and four new multiplets from
    generator-split Young sandwiches with a Gram-Schmidt step against the old
    multiplets.  The last one's trace vanishes at N = 3."""
    split = 2
    singlet = TensorExpr.parse(
        "[glu: a1,a2,b1,b2] (1/(N^2-1))*gd(a1,a2)*gd(b1,b2)"
    )
    vectors = [
        BasisVector(
            "singlet",
            singlet,
            "projector",
            norm_sq=RF_ONE,
            dimension=RF_ONE,
            split=split,
        )
    ]
    f_bridge = TensorExpr.parse("[glu: a1,a2,b1,b2] f(a1,a2,x)*f(x,b1,b2)")
    vectors.append(_normalise_projector("adjoint-a", f_bridge, split, limits))
    d_bridge = TensorExpr.parse("[glu: a1,a2,b1,b2] dv(a1,a2,x)*dv(x,b1,b2)")
    vectors.append(_normalise_projector("adjoint-s", d_bridge, split, limits))
    old = list(vectors)
    for bar_q, bar_aq in (("sym", "asym"), ("asym", "sym"), ("sym", "sym"), ("asym", "asym")):
        t = TensorExpr.parse(
            "[glu: a1,a2,b1,b2] "
            "t(a1;u1,d1)*t(a2;u2,d2)*t(b1;v1,e1)*t(b2;v2,e2)"
            f"*{bar_q}(e1,e2;u1,u2)*{bar_aq}(d1,d2;v1,v2)"
        )
        tilde = normal_form(t, limits).to_expr()
        for p in old:
            overlap = map_trace(compose_maps(p.expr, tilde, split), split, limits)
            if not overlap.is_zero:
                tilde = tilde - p.expr.scale(overlap / p.dimension)
        label = f"{bar_q[0]}x{bar_aq[0]}"
        vectors.append(_normalise_projector(label, tilde, split, limits))
    return vectors


# ---------------------------------------------------------------------------
# quark multiplet basis


def quark_multiplet_basis(n: int = 3, limits: Limits = DEFAULT_LIMITS) -> list[BasisVector]:
    """Orthogonal multiplet basis for the colour space of V^3 -> V^3 maps:
    the four Hermitian Young projectors plus the two transition operators
    between the copies of the mixed-symmetry multiplet."""
    if n != 3:
        raise ValueError("only the three-quark case is implemented")
    vectors: list[BasisVector] = []
    by_shape: dict[tuple[int, ...], list[BasisVector]] = {}
    for t in standard_tableaux(n):
        op = hermitian_young(t)
        expr = TensorExpr.from_permutation(op.element)
        dim = op.trace_dimension()
        v = BasisVector(
            label=str(t),
            expr=expr,
            kind="projector",
            norm_sq=dim,
            dimension=dim,
            split=n,
        )
        vectors.append(v)
        by_shape.setdefault(t.shape.rows, []).append(v)
    transitions: list[BasisVector] = []
    for shape, group in by_shape.items():
        for a in group:
            for b in group:
                if a is not b:
                    transitions.append(transition_operators(b, a, limits))
    return vectors + transitions


def vbarv_singlet_projector() -> BasisVector:
    """Projector onto the singlet of the quark-antiquark pair."""
    expr = TensorExpr.parse("[out: j; in: k; in: l; out: m] (1/N)*delta(j,k)*delta(m,l)")
    return BasisVector("qqbar-singlet", expr, "projector", norm_sq=RF_ONE, dimension=RF_ONE, split=2)


def vbarv_adjoint_projector() -> BasisVector:
    """Projector onto the adjoint of the quark-antiquark pair."""
    expr = TensorExpr.parse(
        "[out: j; in: k; in: l; out: m] (1/T_R)*t(a;j,k)*t(a;m,l)"
    )
    dim = RF_N * RF_N - 1
    return BasisVector("qqbar-adjoint", expr, "projector", norm_sq=dim, dimension=dim, split=2)


def vbarv_aa_multiplet_basis(limits: Limits = DEFAULT_LIMITS) -> list[BasisVector]:
    """The three-vector orthogonal multiplet basis for the colour space of
    Vbar x V x A^2, ordered (singlet route, adjoint-f route, adjoint-d
    route); external order is (quark-out, quark-in, gluon, gluon)."""
    singlets = vbarv_singlet_projector()
    adj = vbarv_adjoint_projector()
    gluons = gluon_projectors_AA(limits)
    routes = [
        (singlets, gluons[0]),
        (adj, gluons[1]),
        (adj, gluons[2]),
    ]
    out = []
    for source, target in routes:
        v = transition_operators(source, target, limits)
        # bring the externals onto the (quark-out, quark-in, gluon, gluon) order
        expr = v.expr.reorder_externals((3, 2, 0, 1))
        out.append(
            BasisVector(v.label, expr, "transition", norm_sq=v.norm_sq)
        )
    return out


# ---------------------------------------------------------------------------
# verification


@dataclass
class BasisReport:
    """Exact verification results for a set of basis vectors."""

    labels: list[str]
    gram: list[list[RationalFunction]]
    idempotent: dict[str, bool]
    hermitian: dict[str, bool]
    transversal: bool
    complete: bool | None
    diagonal: bool
    dimensions: dict[str, tuple[RationalFunction, Fraction]]

    @property
    def passed(self) -> bool:
        checks = [self.transversal, *self.idempotent.values(), *self.hermitian.values()]
        if self.complete is not None:
            checks.append(self.complete)
        return all(checks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "labels": self.labels,
                "gram": [[str(x) for x in row] for row in self.gram],
                "idempotent": self.idempotent,
                "hermitian": self.hermitian,
                "transversal": self.transversal,
                "complete": self.complete,
                "diagonal": self.diagonal,
                "dimensions": {
                    k: {"symbolic": str(sym), "at_N3": str(val)}
                    for k, (sym, val) in self.dimensions.items()
                },
                "passed": self.passed,
            }
        )


def verify_basis(
    vs: Sequence[BasisVector],
    expect_complete: bool = False,
    limits: Limits = DEFAULT_LIMITS,
) -> BasisReport:
    """Exact Gram matrix plus idempotence/hermiticity/transversality and,
    when requested, completeness of the projector subset."""
    sig = vs[0].expr.sig
    for v in vs:
        if v.expr.sig != sig:
            raise SignatureMismatchError("basis vectors on different signatures")
    gram = gram_matrix(vs, limits)
    idempotent: dict[str, bool] = {}
    hermitian: dict[str, bool] = {}
    projectors = [v for v in vs if v.kind == "projector" and v.split is not None]
    for v in projectors:
        nf = normal_form(v.expr, limits)
        idempotent[v.label] = normal_form(
            compose_maps(v.expr, v.expr, v.split), limits
        ) == nf
        hermitian[v.label] = normal_form(map_dagger(v.expr, v.split), limits) == nf
    transversal = True
    for a in projectors:
        for b in projectors:
            if a is not b and not normal_form(
                compose_maps(a.expr, b.expr, a.split), limits
            ).is_zero:
                transversal = False
    complete: bool | None = None
    if expect_complete and projectors:
        split = projectors[0].split
        total = projectors[0].expr
        for v in projectors[1:]:
            total = total + v.expr
        ident = identity_map(sig[:split])
        complete = normal_form(total, limits) == normal_form(ident, limits)
    diagonal = all(
        gram[i][j].is_zero for i in range(len(vs)) for j in range(len(vs)) if i != j
    )
    dimensions = {}
    for v in vs:
        if v.dimension is not None:
            dimensions[v.label] = (v.dimension, v.dimension.evaluate(3, Fraction(1, 2)))
    return BasisReport(
        labels=[v.label for v in vs],
        gram=gram,
        idempotent=idempotent,
        hermitian=hermitian,
        transversal=transversal,
        complete=complete,
        diagonal=diagonal,
        dimensions=dimensions,
    )


# ---------------------------------------------------------------------------
# JSON import/export


def export_basis(vs: Sequence[BasisVector]) -> str:
    return json.dumps(
        {
            "vectors": [
                {
                    "label": v.label,
                    "kind": v.kind,
                    "dsl_text": str(v.expr),
                    "norm_sq": str(v.norm_sq),
                    "dimension": None if v.dimension is None else str(v.dimension),
                    "split": v.split,
                }
                for v in vs
            ]
        }
    )


def import_basis(text: str) -> list[BasisVector]:
    data = json.loads(text)
    out = []
    for entry in data["vectors"]:
        out.append(
            BasisVector(
                label=entry["label"],
                expr=TensorExpr.parse(entry["dsl_text"]),
                kind=entry["kind"],
                norm_sq=RationalFunction.parse(entry["norm_sq"]),
                dimension=(
                    None
                    if entry.get("dimension") in (None, "")
                    else RationalFunction.parse(entry["dimension"])
                ),
                split=entry.get("split"),
            )
        )
    return out
