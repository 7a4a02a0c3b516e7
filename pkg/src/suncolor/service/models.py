"""Pydantic request/response models for the suncolor service; the CLI builds
the same models and shares the handlers, so the wire format is the single
source of truth for machine-readable output."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CapsMixin(BaseModel):
    cap_terms: Optional[int] = Field(default=None, ge=1)
    cap_degree: Optional[int] = Field(default=None, ge=1)


class ExternalPort(BaseModel):
    name: str
    kind: Literal["o", "i", "g"]


class StringRun(BaseModel):
    out: str
    gluons: list[str]
    in_: str = Field(alias="in")

    model_config = {"populate_by_name": True}


class WiringModel(BaseModel):
    strings: list[StringRun]
    traces: list[list[str]]
    pairs: list[list[str]]


class WiringTerm(BaseModel):
    wiring: WiringModel
    coeff: str


class SimplifyRequest(CapsMixin):
    expression: str


class SimplifyResponse(BaseModel):
    externals: list[ExternalPort]
    terms: list[WiringTerm]
    dsl: str
    n_terms: int


class InnerRequest(CapsMixin):
    left: str
    right: str
    n: Optional[int] = None
    tr: Optional[str] = None


class InnerResponse(BaseModel):
    value: str
    value_at_point: Optional[str] = None


class BasisVectorModel(BaseModel):
    label: str
    kind: Literal["projector", "transition", "spanning"]
    dsl_text: str
    norm_sq: str
    dimension: Optional[str] = None
    split: Optional[int] = None


class GramRequest(CapsMixin):
    vectors: list[BasisVectorModel]
    verify: bool = False
    expect_complete: bool = False


class GramResponse(BaseModel):
    labels: list[str]
    gram: list[list[str]]
    report: Optional[dict] = None


class BasisRequest(CapsMixin):
    kind: Literal["trace", "quark", "gluon-aa"]
    n_q: int = Field(default=0, ge=0)
    n_g: int = Field(default=0, ge=0)
    verify: bool = False


class BasisResponse(BaseModel):
    vectors: list[BasisVectorModel]
    report: Optional[dict] = None


class DimsRequest(BaseModel):
    power: int = Field(ge=0)
    n: int | Literal["large"] = "large"


class DimsEntry(BaseModel):
    diagram: str
    multiplicity: int
    dimension: int


class DimsResponse(BaseModel):
    power: int
    n: int | Literal["large"]
    multiplets: int
    colour_space_dimension: int
    decomposition: list[DimsEntry]


class TableauxRequest(BaseModel):
    n: int = Field(ge=1, le=8)


class TableauEntry(BaseModel):
    tableau: str
    shape: str
    hook_product: int
    sun_dimension: str


class TableauxResponse(BaseModel):
    n: int
    count: int
    tableaux: list[TableauEntry]


class OracleRequest(CapsMixin):
    expression: str
    n: int = Field(default=3, ge=2, le=6)
    tr: str = "1/2"


class OracleResponse(BaseModel):
    ok: bool
    max_abs_deviation: float
    max_rel_deviation: float
    rtol: float
    atol: float


class Vec3Request(BaseModel):
    expression: str


class Vec3Response(BaseModel):
    reduced: str
    n_terms: int


class ErrorBody(BaseModel):
    kind: Literal["parse", "resource", "verification", "internal"]
    message: str
