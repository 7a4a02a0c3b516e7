"""Numeric contraction oracle: evaluates tensor expressions by explicit index
summation over a concrete generator basis, independently of the symbolic
rewriting pipeline.

Generators are a generalised Gell-Mann basis of traceless Hermitian N x N
matrices rescaled so that tr(t^a t^b) = T_R delta^{ab}; the three-gluon
vertex tensors are obtained from generator traces, matching the engine's
definitions (f carries the factor i, d is real)."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .tensor import GLU, QIN, QOUT, TensorExpr, _port_tables

ORACLE_MIN_N = 2
ORACLE_MAX_N = 6
DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


@lru_cache(maxsize=None)
def su_generators(n: int, tr: Fraction = Fraction(1, 2)) -> np.ndarray:
    """Array of shape (n^2-1, n, n) with tr(t^a t^b) = tr * delta^{ab}."""
    if not ORACLE_MIN_N <= n <= ORACLE_MAX_N:
        raise ValueError(f"oracle supports {ORACLE_MIN_N} <= N <= {ORACLE_MAX_N}")
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m)
    for l in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        for j in range(l):
            m[j, j] = 1.0
        m[l, l] = -l
        m *= math.sqrt(2.0 / (l * (l + 1)))
        mats.append(m)
    basis = np.array(mats) * math.sqrt(float(tr) / 2.0)
    basis.setflags(write=False)
    return basis


@lru_cache(maxsize=None)
def f_tensor(n: int, tr: Fraction = Fraction(1, 2)) -> np.ndarray:
    """i f^{abc} = (tr(t^a t^b t^c) - tr(t^b t^a t^c)) / T_R."""
    g = su_generators(n, tr)
    tabc = np.einsum("aij,bjk,cki->abc", g, g, g)
    out = (tabc - np.einsum("bac->abc", tabc)) / float(tr)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def d_tensor(n: int, tr: Fraction = Fraction(1, 2)) -> np.ndarray:
    """Fully symmetric vertex: (tr(t^a t^b t^c) + tr(t^b t^a t^c)) / T_R."""
    g = su_generators(n, tr)
    tabc = np.einsum("aij,bjk,cki->abc", g, g, g)
    out = (tabc + np.einsum("bac->abc", tabc)) / float(tr)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _bar_array(kind: str, width: int, n: int) -> np.ndarray:
    """(Anti-)symmetriser on V^{\\otimes w} as a 2w-index array: the first w
    axes are one line group, the last w the other."""
    shape = (n,) * (2 * width)
    out = np.zeros(shape, dtype=complex)
    idx = np.indices(shape)
    for perm in itertools.permutations(range(width)):
        sign = 1
        if kind == "a":
            inv = sum(
                1
                for i in range(width)
                for j in range(i + 1, width)
                if perm[i] > perm[j]
            )
            sign = -1 if inv % 2 else 1
        mask = np.ones(shape, dtype=bool)
        for i in range(width):
            mask &= idx[i] == idx[width + perm[i]]
        out += sign * mask.astype(complex)
    out /= math.factorial(width)
    out.setflags(write=False)
    return out


def numeric_eval(expr: TensorExpr, n: int, tr: Fraction | int = Fraction(1, 2)) -> np.ndarray:
    """Contract an expression by explicit index summation.  Returns a complex
    array with one axis per external port (dimension N for quark ports,
    N^2-1 for gluon ports); scalars come back as 0-d arrays."""
    tr = Fraction(tr)
    g = su_generators(n, tr)
    ften, dten = f_tensor(n, tr), d_tensor(n, tr)
    dims = {QOUT: n, QIN: n, GLU: n * n - 1}
    out_shape = tuple(dims[k] for k in expr.sig)
    total = np.zeros(out_shape, dtype=complex)
    for diagram, coeff in expr.terms.items():
        E = len(diagram.sig)
        owner, base, nports = _port_tables(E, diagram.verts)
        # one einsum axis per edge
        port_axis: dict[int, int] = {}
        axis_count = 0
        for p in range(nports):
            q = diagram.pairing[p]
            if p < q:
                port_axis[p] = port_axis[q] = axis_count
                axis_count += 1
        ops: list[np.ndarray] = []
        subs: list[list[int]] = []
        ext_axes = [0] * E
        for p in range(E):
            q = diagram.pairing[p]
            if q < E:
                if q < p:
                    continue  # handled with its partner
                # external-external edge: identity operand, two distinct axes
                a, b = port_axis[p], axis_count
                axis_count += 1
                ops.append(np.eye(dims[diagram.sig[p]], dtype=complex))
                subs.append([a, b])
                ext_axes[p], ext_axes[q] = a, b
            else:
                ext_axes[p] = port_axis[p]
        for vid, v in enumerate(diagram.verts):
            b0 = base[vid]
            kind, w = v
            if kind == "t":
                ops.append(g)
                subs.append([port_axis[b0], port_axis[b0 + 1], port_axis[b0 + 2]])
            elif kind == "f":
                ops.append(ften)
                subs.append([port_axis[b0 + s] for s in range(3)])
            elif kind == "d":
                ops.append(dten)
                subs.append([port_axis[b0 + s] for s in range(3)])
            else:
                ops.append(_bar_array(kind, w, n))
                subs.append([port_axis[b0 + s] for s in range(2 * w)])
        weight = complex(coeff.evaluate(n, tr))
        if not ops:
            total += weight * np.ones(out_shape, dtype=complex)
            continue
        args: list = []
        for op, sub in zip(ops, subs):
            args.extend((op, sub))
        args.append(ext_axes)
        total += weight * np.einsum(*args)
    return total


def numeric_inner(c1: TensorExpr, c2: TensorExpr, n: int, tr: Fraction | int = Fraction(1, 2)) -> complex:
    """<c1, c2> by brute force: componentwise conjugate contraction."""
    a = numeric_eval(c1, n, tr)
    b = numeric_eval(c2, n, tr)
    return complex(np.sum(np.conj(a) * b))


def agree(a, b, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    scale = np.maximum(np.abs(a), np.abs(b))
    return bool(np.all(np.abs(a - b) <= atol + rtol * scale))


def max_deviation(a, b) -> tuple[float, float]:
    """(absolute, relative) worst-case deviation between two arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    diff = np.abs(a - b)
    absdev = float(diff.max()) if diff.size else 0.0
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, diff / scale, 0.0)
    reldev = float(rel.max()) if rel.size else 0.0
    return absdev, reldev
