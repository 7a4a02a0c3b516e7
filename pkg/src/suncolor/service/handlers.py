"""Request handlers shared by the HTTP service and the command-line client."""

from __future__ import annotations

import json
from fractions import Fraction

from ..errors import ParseError
from ..multiplet import (
    BasisVector,
    gluon_projectors_AA,
    gram_matrix,
    import_basis,
    quark_multiplet_basis,
    trace_basis,
    verify_basis,
)
from ..oracle import DEFAULT_ATOL, DEFAULT_RTOL, max_deviation, numeric_eval
from ..rewrite import Limits, inner_product, normal_form
from ..tableaux import decompose_adjoint_power, standard_tableaux
from ..tensor import TensorExpr
from ..vec3 import parse_eps, reduce_eps
from . import models as m


def _limits(req) -> Limits:
    kw = {}
    if getattr(req, "cap_terms", None):
        kw["max_terms"] = req.cap_terms
    if getattr(req, "cap_degree", None):
        kw["bar_cap"] = req.cap_degree
    return Limits(**kw) if kw else Limits()


def handle_simplify(req: m.SimplifyRequest) -> m.SimplifyResponse:
    nf = normal_form(TensorExpr.parse(req.expression), _limits(req))
    data = json.loads(nf.to_json())
    return m.SimplifyResponse(
        externals=[m.ExternalPort(**e) for e in data["externals"]],
        terms=[m.WiringTerm(**t) for t in data["terms"]],
        dsl=nf.to_dsl(),
        n_terms=len(nf.terms),
    )


def handle_inner(req: m.InnerRequest) -> m.InnerResponse:
    left = TensorExpr.parse(req.left)
    right = TensorExpr.parse(req.right)
    value = inner_product(left, right, _limits(req))
    at_point = None
    if req.n is not None:
        tr = _parse_fraction(req.tr or "1/2")
        at_point = str(value.evaluate(req.n, tr))
    return m.InnerResponse(value=str(value), value_at_point=at_point)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational number {text!r}: {exc}") from None


def _vector_model(v: BasisVector) -> m.BasisVectorModel:
    return m.BasisVectorModel(
        label=v.label,
        kind=v.kind,
        dsl_text=str(v.expr),
        norm_sq=str(v.norm_sq),
        dimension=None if v.dimension is None else str(v.dimension),
        split=v.split,
    )


def _vectors_from_models(entries: list[m.BasisVectorModel]) -> list[BasisVector]:
    payload = {"vectors": [e.model_dump() for e in entries]}
    return import_basis(json.dumps(payload))


def handle_gram(req: m.GramRequest) -> m.GramResponse:
    vs = _vectors_from_models(req.vectors)
    limits = _limits(req)
    report = None
    if req.verify:
        rep = verify_basis(vs, expect_complete=req.expect_complete, limits=limits)
        gram = rep.gram
        report = json.loads(rep.to_json())
    else:
        gram = gram_matrix(vs, limits)
    return m.GramResponse(
        labels=[v.label for v in vs],
        gram=[[str(x) for x in row] for row in gram],
        report=report,
    )


def handle_basis(req: m.BasisRequest) -> m.BasisResponse:
    limits = _limits(req)
    if req.kind == "trace":
        vs = trace_basis(req.n_q, req.n_g)
    elif req.kind == "quark":
        vs = quark_multiplet_basis(3, limits)
    else:
        vs = gluon_projectors_AA(limits)
    report = None
    if req.verify:
        expect = req.kind in ("quark", "gluon-aa")
        report = json.loads(
            verify_basis(vs, expect_complete=expect, limits=limits).to_json()
        )
    return m.BasisResponse(vectors=[_vector_model(v) for v in vs], report=report)


def handle_dims(req: m.DimsRequest) -> m.DimsResponse:
    n = None if req.n == "large" else int(req.n)
    dec = decompose_adjoint_power(req.power, n)
    entries = [
        m.DimsEntry(
            diagram=str(d), multiplicity=mult, dimension=d.dimension_at(dec.effective_n)
        )
        for d, mult in dec.counts.items()
    ]
    return m.DimsResponse(
        power=req.power,
        n=req.n,
        multiplets=dec.multiplets,
        colour_space_dimension=dec.colour_space_dimension,
        decomposition=entries,
    )


def handle_tableaux(req: m.TableauxRequest) -> m.TableauxResponse:
    tabs = standard_tableaux(req.n)
    entries = [
        m.TableauEntry(
            tableau=str(t),
            shape=str(t.shape),
            hook_product=t.shape.hook_product(),
            sun_dimension=str(t.shape.sun_dimension()),
        )
        for t in tabs
    ]
    return m.TableauxResponse(n=req.n, count=len(tabs), tableaux=entries)


def handle_oracle(req: m.OracleRequest) -> m.OracleResponse:
    expr = TensorExpr.parse(req.expression)
    tr = _parse_fraction(req.tr)
    nf = normal_form(expr, _limits(req))
    direct = numeric_eval(expr, req.n, tr)
    reduced = numeric_eval(nf.to_expr(), req.n, tr)
    dev_abs, dev_rel = max_deviation(direct, reduced)
    ok = dev_rel < DEFAULT_RTOL or dev_abs < DEFAULT_ATOL
    return m.OracleResponse(
        ok=ok,
        max_abs_deviation=dev_abs,
        max_rel_deviation=dev_rel,
        rtol=DEFAULT_RTOL,
        atol=DEFAULT_ATOL,
    )


def handle_vec3(req: m.Vec3Request) -> m.Vec3Response:
    reduced = reduce_eps(parse_eps(req.expression))
    return m.Vec3Response(reduced=str(reduced), n_terms=len(reduced.terms))
