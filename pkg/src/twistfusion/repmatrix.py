"""Evaluated R-, R'- and S-matrices on fusion modules.

Everything is assembled from the box-level factorization: a block between two
module factors is an ordered product of two-leg Yang factors over box pairs,
restricted to the tensor product of the module bases, and blocks are embedded
and multiplied in the prescribed order.

Ordering conventions (leftmost factor first):
  R / breve-R blocks:   outer factor index i descending, inner j ascending;
                        inside a block, boxes p descending, q ascending.
  R' / breve-R' blocks: i descending, j descending; boxes p and q descending.
  elementary S:         p descending, q descending below p.
  fused S:              i descending: [S_i, then R'_{i,j} for j descending].
  Yangian action T_Z(u): single auxiliary box against all module boxes in
                        ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fusion as fusion_mod
from .diagrams import SkewDiagram, column_tableau, parse_skew, sharp
from .errors import (
    BoxCapExceeded,
    DimensionMismatch,
    ShapeTooTall,
    SingularFamily,
    SingularParameter,
)
from .exactnum import RatFunc, parse_rational
from .linalg import ScaledIntMatrix, feye, mat_equal
from .tensor import (
    Basis,
    GForm,
    TensorOperator,
    embed_matrix,
    embed_operator,
    restrict,
    reversal_op,
    right_apply_two_leg,
    structural_ops,
    transpose_legs,
    two_leg_entries,
)

_F1 = Fraction(1)

KINDS = ("R", "R'", "Rb", "Rb'")


def _lift(val):
    return val if isinstance(val, RatFunc) else Fraction(val)


def _is_symbolic(*vals) -> bool:
    return any(isinstance(v, RatFunc) for v in vals)


def yang_matrices(form: GForm, u, v):
    """(R, R', breve-R, breve-R') on two legs, exact in u, v."""
    N = form.N
    P, Q = structural_ops(form)
    ident = TensorOperator.identity((N, N))
    u, v = _lift(u), _lift(v)
    R = (u - v) * ident - P
    Rp = -((u + v) * ident) - Q
    duv = u - v
    suv = u + v
    if _is_symbolic(u, v):
        if isinstance(duv, RatFunc) and duv.is_zero():
            raise SingularFamily("u - v vanishes identically")
        if isinstance(suv, RatFunc) and suv.is_zero():
            raise SingularFamily("u + v vanishes identically")
    else:
        if duv == 0:
            raise SingularParameter(f"breve R singular at u = v = {u}")
        if suv == 0:
            raise SingularParameter(f"breve R' singular at u = -v = {u}")
    Rb = ident - (1 / duv) * P
    Rbp = ident + (1 / suv) * Q
    if _is_symbolic(u, v):
        lift = lambda op: op.map_entries(RatFunc.coerce)  # noqa: E731
        return lift(R), lift(Rp), lift(Rb), lift(Rbp)
    return R, Rp, Rb, Rbp


# ---------------------------------------------------------------------------
# fused module specifications

class FusedModuleSpec:
    """Ordered list of (skew diagram, rational parameter) over a fixed form."""

    def __init__(self, form: GForm, factors, box_cap: int = 6):
        self.form = form
        self.factors = [(d, Fraction(z)) for (d, z) in factors]
        for d, _ in self.factors:
            if not d.fits(form.N):
                raise ShapeTooTall(f"{d} does not fit N={form.N}")
        self.n_total = sum(d.size for d, _ in self.factors)
        if self.n_total > box_cap:
            raise BoxCapExceeded(f"{self.n_total} boxes exceed cap {box_cap}")
        self._fusion = None
        self._tdata = None
        self._kron_bases: dict = {}

    # -- construction helpers -------------------------------------------
    @classmethod
    def from_string(cls, form: GForm, text: str, box_cap: int = 6) -> "FusedModuleSpec":
        factors = []
        text = text.strip()
        if text:
            for chunk in text.split(";"):
                if ":" not in chunk:
                    raise ValueError(f"factor {chunk!r} missing ':z'")
                dia, _, zs = chunk.rpartition(":")
                factors.append((parse_skew(dia), parse_rational(zs)))
        return cls(form, factors, box_cap=box_cap)

    @property
    def N(self) -> int:
        return self.form.N

    @property
    def ell(self) -> int:
        return len(self.factors)

    def fusion(self, i: int) -> fusion_mod.FusionOperator:
        if self._fusion is None:
            self._fusion = [
                fusion_mod.fusion_operator(d, self.N, box_cap=max(6, self.n_total))
                for d, _ in self.factors
            ]
        return self._fusion[i]

    def basis(self, i: int) -> Basis:
        return self.fusion(i).module_basis

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return tuple(self.fusion(i).dim for i in range(self.ell))

    @property
    def dimZ(self) -> int:
        out = 1
        for d in self.factor_dims:
            out *= d
        return out

    def contents(self, i: int) -> tuple[int, ...]:
        return column_tableau(self.factors[i][0]).contents

    def z(self, i: int):
        return self.factors[i][1]

    def box_params(self, i: int, shift=None) -> list:
        z = self.z(i) if shift is None else shift + self.z(i)
        return [z + c for c in self.contents(i)]

    def all_box_params(self) -> list[Fraction]:
        return [p for i in range(self.ell) for p in self.box_params(i)]

    def kron_basis(self, i: int, j: int) -> Basis:
        key = (i, j)
        if key not in self._kron_bases:
            self._kron_bases[key] = Basis.kron(self.basis(i), self.basis(j))
        return self._kron_bases[key]

    def spec_string(self) -> str:
        return ";".join(f"{d}:{z}" for d, z in self.factors)

    def to_json(self) -> dict:
        return {"form": self.form.kind, "N": self.N, "modules": self.spec_string()}

    def __repr__(self):
        return f"FusedModuleSpec({self.form.kind}, N={self.N}, [{self.spec_string()}])"


def form_equal(a: GForm, b: GForm) -> bool:
    return a.kind == b.kind and a.N == b.N and mat_equal(a.g, b.g)


# ---------------------------------------------------------------------------
# box-level blocks

def _pair_block(
    form: GForm,
    contA,
    basisA: Basis,
    paramA,
    contB,
    basisB: Basis,
    paramB,
    kind: str,
) -> TensorOperator:
    """Ordered box product between two module factors, restricted to
    V_A (x) V_B; returned with leg dims (dim A, dim B)."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    N = form.N
    nA, nB = len(contA), len(contB)
    dims = (N,) * (nA + nB)
    P, Q = structural_ops(form)
    p_entries = two_leg_entries(P)
    q_entries = two_leg_entries(Q)
    if kind in ("R", "Rb"):
        seq = [(p, q) for p in reversed(range(nA)) for q in range(nB)]
    else:
        seq = [(p, q) for p in reversed(range(nA)) for q in reversed(range(nB))]
    M = feye(N ** (nA + nB))
    for (p, q) in seq:
        u = paramA + Fraction(contA[p]) if not isinstance(paramA, RatFunc) else paramA + contA[p]
        v = paramB + Fraction(contB[q]) if not isinstance(paramB, RatFunc) else paramB + contB[q]
        if kind == "R":
            alpha, entries, coef = u - v, p_entries, -_F1
        elif kind == "R'":
            alpha, entries, coef = -(u + v), q_entries, -_F1
        elif kind == "Rb":
            den = u - v
            _check_denominator(den, f"boxes ({p+1},{q+1})")
            alpha, entries, coef = _F1, p_entries, -1 / den
        else:  # Rb'
            den = u + v
            _check_denominator(den, f"boxes ({p+1},{q+1})")
            alpha, entries, coef = _F1, q_entries, 1 / den
        scaled = [(a, b, c, d, coef * val) for (a, b, c, d, val) in entries]
        M = right_apply_two_leg(M, dims, p, nA + q, scaled, alpha)
    kb = Basis.kron(basisA, basisB)
    return restrict(
        TensorOperator(M, dims), kb, kb, dims=(basisA.size, basisB.size)
    )


def _check_denominator(den, where: str):
    if isinstance(den, RatFunc):
        if den.is_zero():
            raise SingularFamily(f"denominator vanishes identically at {where}")
    elif den == 0:
        raise SingularParameter(f"denominator vanishes at {where}")


# ---------------------------------------------------------------------------
# frame representation of blocks: polynomial coefficient matrices in the
# deformation variable over one scalar denominator (keeps everything numeric)

@dataclass
class FrameBlock:
    """sum_k frames[k] * zeta^k divided by the scalar polynomial den."""

    frames: list
    den: object  # Poly
    dims: tuple[int, ...]


def _frame_chain_apply(frames, dims, p, q, a, b, entries):
    """Multiply polynomial frames by ((a + b*zeta) * 1 + X_{p,q}) on the right."""
    out = []
    for k in range(len(frames) + 1):
        term = None
        if k < len(frames):
            term = right_apply_two_leg(frames[k], dims, p, q, entries, a)
        if b != 0 and k >= 1:
            lower = b * frames[k - 1]
            term = lower if term is None else term + lower
        out.append(term)
    while len(out) > 1 and mat_equal(out[-1], 0 * out[-1]):
        out.pop()
    return out


def _pair_block_frames(
    form: GForm,
    contA,
    basisA: Basis,
    zA,
    shiftA: bool,
    contB,
    basisB: Basis,
    zB,
    shiftB: bool,
    kind: str,
) -> FrameBlock:
    """Frame form of _pair_block, with parameters affine in the deformation
    variable: u_p = zA + c_p (+ zeta if shiftA), likewise v_q."""
    from .exactnum import Poly

    N = form.N
    nA, nB = len(contA), len(contB)
    dims = (N,) * (nA + nB)
    P, Q = structural_ops(form)
    p_entries = two_leg_entries(P)
    q_entries = two_leg_entries(Q)
    if kind in ("R", "Rb"):
        seq = [(p, q) for p in reversed(range(nA)) for q in range(nB)]
    else:
        seq = [(p, q) for p in reversed(range(nA)) for q in reversed(range(nB))]
    bu = 1 if shiftA else 0
    bv = 1 if shiftB else 0
    frames = [feye(N ** (nA + nB))]
    den = Poly.const(1)
    for (p, q) in seq:
        au = zA + contA[p]
        av = zB + contB[q]
        if kind == "R":
            a, b, entries = au - av, bu - bv, [(x, y, z, w, -v) for (x, y, z, w, v) in p_entries]
        elif kind == "Rb":
            # numerator (u-v) - P over denominator (u-v)
            a, b, entries = au - av, bu - bv, [(x, y, z, w, -v) for (x, y, z, w, v) in p_entries]
            if b == 0 and a == 0:
                raise SingularParameter(f"breve R singular at boxes ({p+1},{q+1})")
            den = den * Poly((a, Fraction(b)))
        elif kind == "R'":
            a, b, entries = -(au + av), -(bu + bv), [(x, y, z, w, -v) for (x, y, z, w, v) in q_entries]
        else:  # Rb': numerator (u+v) + Q over denominator (u+v)
            a, b, entries = au + av, bu + bv, list(q_entries)
            if b == 0 and a == 0:
                raise SingularParameter(f"breve R' singular at boxes ({p+1},{q+1})")
            den = den * Poly((a, Fraction(b)))
        frames = _frame_chain_apply(frames, dims, p, nA + q, a, b, entries)
    kb = Basis.kron(basisA, basisB)
    sub = (basisA.size, basisB.size)
    frames = [restrict(TensorOperator(fr, dims), kb, kb, dims=sub).mat for fr in frames]
    return FrameBlock(frames, den, sub)


def _elementary_s_frames(omega: SkewDiagram, z, shifted: bool, form: GForm) -> FrameBlock:
    """Frame form of s_elementary (polynomial, denominator 1)."""
    from .exactnum import Poly

    N = form.N
    n = omega.size
    fus = fusion_mod.fusion_operator(omega, N, box_cap=max(6, n))
    basis = fus.module_basis
    if n <= 1:
        return FrameBlock([feye(basis.size)], Poly.const(1), (basis.size,))
    cont = column_tableau(omega).contents
    _, Q = structural_ops(form)
    q_entries = [(x, y, zz, w, -v) for (x, y, zz, w, v) in two_leg_entries(Q)]
    dims = (N,) * n
    bshift = 2 if shifted else 0
    frames = [feye(N**n)]
    for p in reversed(range(n)):
        for q in reversed(range(p)):
            a = -((z + cont[p]) + (z + cont[q]))
            frames = _frame_chain_apply(frames, dims, p, q, a, -bshift, q_entries)
    frames = [
        restrict(TensorOperator(fr, dims), basis, basis, dims=(basis.size,)).mat
        for fr in frames
    ]
    return FrameBlock(frames, Poly.const(1), (basis.size,))


def breve_r_frame_blocks(Z: FusedModuleSpec) -> list[tuple[FrameBlock, tuple[int, ...]]]:
    """Ordered frame blocks of breve-R_{W,Z}(zeta), W the zeta-shifted copy of Z."""
    ell = Z.ell
    blocks = []
    for (i, j) in [(i, j) for i in reversed(range(ell)) for j in range(ell)]:
        fb = _pair_block_frames(
            Z.form,
            Z.contents(i), Z.basis(i), Z.z(i), True,
            Z.contents(j), Z.basis(j), Z.z(j), False,
            "Rb",
        )
        blocks.append((fb, (i, ell + j)))
    return blocks


def swz_frame_blocks(Z: FusedModuleSpec) -> list[tuple[FrameBlock, tuple[int, ...]]]:
    """Ordered frame blocks of S_{W,Z}(zeta), W the zeta-shifted copy of Z.

    Slots 0..l-1 are the W factors, l..2l-1 the Z factors."""
    ell = Z.ell
    blocks: list[tuple[FrameBlock, tuple[int, ...]]] = []
    for (i, j) in [(i, j) for i in reversed(range(ell)) for j in reversed(range(ell))]:
        fb = _pair_block_frames(
            Z.form,
            Z.contents(i), Z.basis(i), Z.z(i), True,
            Z.contents(j), Z.basis(j), Z.z(j), False,
            "Rb'",
        )
        blocks.append((fb, (i, ell + j)))
    for i in reversed(range(ell)):
        blocks.append((_elementary_s_frames(Z.factors[i][0], Z.z(i), True, Z.form), (i,)))
        for j in reversed(range(i)):
            fb = _pair_block_frames(
                Z.form,
                Z.contents(i), Z.basis(i), Z.z(i), True,
                Z.contents(j), Z.basis(j), Z.z(j), True,
                "R'",
            )
            blocks.append((fb, (i, j)))
    blocks.extend(breve_r_frame_blocks(Z))
    return blocks


def breve_r_family_leading(Z: FusedModuleSpec, window: int = 6):
    """Laurent order and exact leading coefficient matrix of the breve-R
    family of the shifted pair (W, Z) at zeta = 0."""
    from .tensor import MatrixLaurentSeries

    dims = Z.factor_dims + Z.factor_dims
    prod = None
    for fb, slots in breve_r_frame_blocks(Z):
        mls = MatrixLaurentSeries.from_frames(fb.frames, fb.den, window).embedded(slots, dims)
        prod = mls if prod is None else prod @ mls
    prod = prod.trimmed()
    return prod.order, prod.coefficient(prod.order).to_fractions()


def r_factorized_blocks(
    W: FusedModuleSpec, Z: FusedModuleSpec, kind: str, w_shift=None
) -> list[tuple[TensorOperator, tuple[int, ...]]]:
    """Ordered restricted blocks of R_{W,Z}-type operators on W (x) Z.

    Slots 0..k-1 are the W factors, k..k+l-1 the Z factors.  w_shift, when
    given, is added to every W parameter (symbolic families use RatFunc.x()).
    """
    if not form_equal(W.form, Z.form):
        raise DimensionMismatch("W and Z use different forms")
    k, ell = W.ell, Z.ell
    if kind in ("R", "Rb"):
        order = [(i, j) for i in reversed(range(k)) for j in range(ell)]
    elif kind in ("R'", "Rb'"):
        order = [(i, j) for i in reversed(range(k)) for j in reversed(range(ell))]
    else:
        raise ValueError(f"kind must be one of {KINDS}")
    blocks = []
    for (i, j) in order:
        wparam = W.z(i) if w_shift is None else w_shift + W.z(i)
        block = _pair_block(
            Z.form,
            W.contents(i),
            W.basis(i),
            wparam,
            Z.contents(j),
            Z.basis(j),
            Z.z(j),
            kind,
        )
        blocks.append((block, (i, k + j)))
    return blocks


def r_factorized(W: FusedModuleSpec, Z: FusedModuleSpec, kind: str, w_shift=None) -> TensorOperator:
    """The operator on W (x) Z assembled from its ordered restricted blocks."""
    dims = W.factor_dims + Z.factor_dims
    out = TensorOperator.identity(dims)
    for block, slots in r_factorized_blocks(W, Z, kind, w_shift=w_shift):
        out = out @ embed_operator(block, slots, dims)
    return out


def s_elementary(omega: SkewDiagram, z, form: GForm, basis: Basis | None = None) -> TensorOperator:
    """Twisted S-matrix of one elementary module: ordered product of R'
    factors over box pairs, restricted to the module."""
    N = form.N
    n = omega.size
    fus = fusion_mod.fusion_operator(omega, N, box_cap=max(6, n))
    basis = basis or fus.module_basis
    if n <= 1:
        return TensorOperator.identity((basis.size,))
    cont = column_tableau(omega).contents
    _, Q = structural_ops(form)
    q_entries = two_leg_entries(Q)
    dims = (N,) * n
    M = feye(N**n)
    for p in reversed(range(n)):
        for q in reversed(range(p)):
            vp = z + cont[p]
            vq = z + cont[q]
            alpha = -(vp + vq)
            scaled = [(a, b, c, d, -val) for (a, b, c, d, val) in q_entries]
            M = right_apply_two_leg(M, dims, p, q, scaled, alpha)
    return restrict(TensorOperator(M, dims), basis, basis, dims=(basis.size,))


def s_fused_blocks(Z: FusedModuleSpec, shift=None) -> list[tuple[TensorOperator, tuple[int, ...]]]:
    """Ordered blocks of the fused S-matrix of Z (parameters shifted if asked)."""
    blocks = []
    for i in reversed(range(Z.ell)):
        zi = Z.z(i) if shift is None else shift + Z.z(i)
        blocks.append((s_elementary(Z.factors[i][0], zi, Z.form, Z.basis(i)), (i,)))
        for j in reversed(range(i)):
            zj = Z.z(j) if shift is None else shift + Z.z(j)
            block = _pair_block(
                Z.form,
                Z.contents(i),
                Z.basis(i),
                zi,
                Z.contents(j),
                Z.basis(j),
                zj,
                "R'",
            )
            blocks.append((block, (i, j)))
    return blocks


def s_fused(Z: FusedModuleSpec, shift=None) -> TensorOperator:
    dims = Z.factor_dims
    out = TensorOperator.identity(dims)
    for block, slots in s_fused_blocks(Z, shift=shift):
        out = out @ embed_operator(block, slots, dims)
    return out


# ---------------------------------------------------------------------------
# Yangian action and twisted-Yangian generator matrices

class _TData:
    """T_Z(u) as polynomial coefficient frames over the scalar denominator
    prod_q (u - v_q); keeps all products numeric."""

    def __init__(self, frames: list[np.ndarray], den):
        self.frames = frames
        self.den = den

    def at(self, u0: Fraction) -> np.ndarray:
        d = self.den.eval(u0)
        if d == 0:
            raise SingularParameter(f"u = {u0} is a pole of T")
        acc = self.frames[-1]
        for fr in reversed(self.frames[:-1]):
            acc = acc * u0 + fr
        return acc * (1 / d)

    def ratfunc_matrix(self) -> np.ndarray:
        from .exactnum import Poly

        shape = self.frames[0].shape
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(shape):
            coeffs = [fr[idx] for fr in self.frames]
            out[idx] = RatFunc(Poly(coeffs), self.den)
        return out


def _t_data(Z: FusedModuleSpec) -> _TData:
    from .exactnum import Poly

    if Z._tdata is not None:
        return Z._tdata
    N = Z.N
    dims = (N,) + Z.factor_dims
    D = N * Z.dimZ
    P, _ = structural_ops(Z.form)
    p_entries = two_leg_entries(P)
    full_aux = Basis.full(N)
    acc = [feye(D)]  # coefficient frames of the accumulated product, low first
    den = Poly.const(1)
    for j in range(Z.ell):
        nj = Z.factors[j][0].size
        bdims = (N,) * (nj + 1)
        bD = N ** (nj + 1)
        frames = [feye(bD)]
        for q, vq in enumerate(Z.box_params(j), start=1):
            # multiply by (u - v_q) - P_{0,q}; frames move up one degree
            new = [None] * (len(frames) + 1)
            for k in range(len(frames) + 1):
                term = frames[k - 1] if k >= 1 else None
                if k < len(frames):
                    base = right_apply_two_leg(
                        frames[k], bdims, 0, q, p_entries, 0
                    )  # frames[k] @ P part
                    low = -vq * frames[k] - base
                    term = low if term is None else term + low
                new[k] = term
            frames = new
            den = den * Poly((-vq, _F1))
        kb = Basis.kron(full_aux, Z.basis(j))
        sub_dims = (N, Z.basis(j).size)
        frames = [
            restrict(TensorOperator(fr, bdims), kb, kb, dims=sub_dims).mat for fr in frames
        ]
        emb = [
            ScaledIntMatrix.from_fractions(
                embed_matrix(fr, (0, 1 + j), dims)
            )
            for fr in frames
        ]
        acc_s = [ScaledIntMatrix.from_fractions(fr) for fr in acc]
        out = []
        for k in range(len(acc_s) + len(emb) - 1):
            tot = None
            for a in range(max(0, k - len(emb) + 1), min(len(acc_s), k + 1)):
                term = acc_s[a] @ emb[k - a]
                tot = term if tot is None else tot + term
            out.append(tot.to_fractions())
        acc = out
    data = _TData(acc, den)
    Z._tdata = data
    return data


def t_action(Z: FusedModuleSpec) -> TensorOperator:
    """T_Z(u): operator on (auxiliary C^N) (x) Z with RatFunc(u) entries,
    the ordered product of single-box breve factors restricted per factor."""
    return TensorOperator(_t_data(Z).ratfunc_matrix(), (Z.N,) + Z.factor_dims)


@dataclass
class GeneratorMatrices:
    """rho[k][i][j]: the End(Z) matrix of the k-th generator coefficient."""

    K: int
    N: int
    dimZ: int
    rho: list  # rho[k][i][j] -> object ndarray (dimZ x dimZ)


def _entrywise_series(op: TensorOperator, K: int) -> list[np.ndarray]:
    """Coefficient matrices of u^0..u^-K for a RatFunc-entry operator."""
    D = op.size
    frames = [np.empty((D, D), dtype=object) for _ in range(K + 1)]
    zero = Fraction(0)
    for fr in frames:
        fr[...] = zero
    for (r, c), v in np.ndenumerate(op.mat):
        f = v if isinstance(v, RatFunc) else RatFunc.const(v)
        if f.is_zero():
            continue
        for k, coef in enumerate(f.series_at_infinity(K)):
            if coef != 0:
                frames[k][r, c] = coef
    return frames


def s_generators(Z: FusedModuleSpec, K: int) -> GeneratorMatrices:
    """Expand S_Z(u) = T^t(-u) T(u) at infinity to order K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    N, dZ = Z.N, Z.dimZ
    T = t_action(Z)
    Tt = transpose_legs(T.map_entries(lambda f: RatFunc.coerce(f).subs_neg()), {1}, Z.form)
    A = [ScaledIntMatrix.from_fractions(m) for m in _entrywise_series(Tt, K)]
    B = [ScaledIntMatrix.from_fractions(m) for m in _entrywise_series(T, K)]
    rho = []
    for k in range(K + 1):
        acc = None
        for a in range(k + 1):
            term = A[a] @ B[k - a]
            acc = term if acc is None else acc + term
        Sk = acc.to_fractions().reshape(N, dZ, N, dZ)
        rho.append([[Sk[i, :, j, :] for j in range(N)] for i in range(N)])
    return GeneratorMatrices(K=K, N=N, dimZ=dZ, rho=rho)


# ---------------------------------------------------------------------------
# defining relations by sampling

@dataclass
class RelationReport:
    spec: str
    degree_bound: int
    rtt_checked: int
    rtt_failures: list
    reflection_checked: int
    reflection_failures: list
    singular_samples: list
    proven: bool

    @property
    def passed(self) -> bool:
        return (
            not self.rtt_failures
            and not self.reflection_failures
            and self.rtt_checked > self.degree_bound
            and self.reflection_checked > self.degree_bound
        )


def _aux_sparse(form: GForm, u, v, primed: bool):
    """Sparse entries ((i,j),(a,b)) -> value of R or R' on the two aux legs."""
    N = form.N
    P, Q = structural_ops(form)
    out: dict = {}
    if not primed:
        for i in range(N):
            for j in range(N):
                out[((i, j), (i, j))] = u - v
        for (a, b, c, d, val) in two_leg_entries(P):
            key = ((a, b), (c, d))
            out[key] = out.get(key, Fraction(0)) - val
    else:
        for i in range(N):
            for j in range(N):
                out[((i, j), (i, j))] = -(u + v)
        for (a, b, c, d, val) in two_leg_entries(Q):
            key = ((a, b), (c, d))
            out[key] = out.get(key, Fraction(0)) - val
    return {k: v for k, v in out.items() if v != 0}


def _blocked(mat: np.ndarray, N: int, d: int) -> list:
    """Split into (N,N) blocks of raw integer d x d arrays with one common
    scale.  The scale is dropped: both sides of each relation carry identical
    scale products, so integer equality of the cleared sides is exact."""
    from .linalg import to_int_scaled

    mi, _ = to_int_scaled(mat)
    T4 = mi.reshape(N, d, N, d)
    return [[np.ascontiguousarray(T4[i, :, j, :]) for j in range(N)] for i in range(N)]


def _int_cleared(entries: dict) -> dict:
    """Scale a sparse coefficient dict to integer values (same factor on both
    relation sides, so equality is unaffected)."""
    import math as _math

    lcm = 1
    for v in entries.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            lcm = lcm * v.denominator // _math.gcd(lcm, v.denominator)
    return {k: int(v * lcm) for k, v in entries.items()}


def _by_row_col(R: dict):
    by_row: dict = {}
    by_col: dict = {}
    for ((i, j), (a, b)), val in R.items():
        by_row.setdefault((i, j), []).append((a, b, val))
        by_col.setdefault((a, b), []).append((i, j, val))
    return by_row, by_col


def _rtt_holds(Tu, Tv, R: dict, N: int, d: int) -> bool:
    M1 = {}
    M2 = {}
    for a in range(N):
        for k in range(N):
            for b in range(N):
                for l in range(N):
                    M1[(a, k, b, l)] = Tu[a][k] @ Tv[b][l]
                    M2[(a, k, b, l)] = Tv[a][k] @ Tu[b][l]
    zero = np.zeros((d, d), dtype=object)
    by_row, by_col = _by_row_col(R)
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    lhs = zero
                    for (a, b, val) in by_row.get((i, j), ()):
                        lhs = lhs + val * M1[(a, k, b, l)]
                    rhs = zero
                    for (a, b, val) in by_col.get((k, l), ()):
                        rhs = rhs + val * M2[(j, b, i, a)]
                    if not np.equal(lhs, rhs).all():
                        return False
    return True


def _reflection_holds(Su, Sv, R: dict, Rp: dict, N: int, d: int) -> bool:
    P2 = {}
    P2p = {}
    for i in range(N):
        for a in range(N):
            for dd in range(N):
                for l in range(N):
                    P2[(i, a, dd, l)] = Su[i][a] @ Sv[dd][l]
                    P2p[(i, a, dd, l)] = Sv[i][a] @ Su[dd][l]
    zero = np.zeros((d, d), dtype=object)
    X = {}
    Y = {}
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    X[(i, j, k, l)] = zero
                    Y[(i, j, k, l)] = zero
    for ((a, b), (c, dd)), val in Rp.items():
        # X = S1(u) R' S2(v):  X[(i,b),(c,l)] += val * Su[i,a] Sv[dd,l]
        for i in range(N):
            for l in range(N):
                X[(i, b, c, l)] = X[(i, b, c, l)] + val * P2[(i, a, dd, l)]
        # Y = S2(v) R' S1(u):  Y[(a,j),(k,dd)] += val * Sv[j,b] Su[c,k]
        for j in range(N):
            for k in range(N):
                Y[(a, j, k, dd)] = Y[(a, j, k, dd)] + val * P2p[(j, b, c, k)]
    by_row, by_col = _by_row_col(R)
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    lhs = zero
                    for (a, b, val) in by_row.get((i, j), ()):
                        lhs = lhs + val * X[(a, b, k, l)]
                    rhs = zero
                    for (a, b, val) in by_col.get((k, l), ()):
                        rhs = rhs + val * Y[(i, j, a, b)]
                    if not np.equal(lhs, rhs).all():
                        return False
    return True


def check_defining_relations(Z: FusedModuleSpec, samples=None) -> RelationReport:
    """RTT and the reflection relation on Z, exactly, at a grid of rational
    points whose size beats the degree bound 2n+2 per variable (so agreement
    is an identity of rational functions); user-supplied samples are checked
    individually with per-sample pole reporting."""
    N, d = Z.N, Z.dimZ
    n = Z.n_total
    bound = 2 * n + 2
    td = _t_data(Z)
    poles = set()
    for p in Z.all_box_params():
        poles.add(p)
        poles.add(-p)

    def t_at(u0):
        return TensorOperator(td.at(u0), (N,) + Z.factor_dims)

    def s_at(Tu_neg_mat, Tu_op):
        Tt = transpose_legs(
            TensorOperator(Tu_neg_mat, (N,) + Z.factor_dims), {1}, Z.form
        )
        return Tt @ Tu_op

    if samples is None:
        grid = []
        k = 1
        while len(grid) < bound + 1:
            q = Fraction(k)
            if q not in poles and -q not in poles:
                grid.append(q)
            k += 1
        pairs = [(u, v) for u in grid for v in grid]
        proven_grid = True
    else:
        pairs = [(Fraction(u), Fraction(v)) for (u, v) in samples]
        proven_grid = False

    cacheT: dict = {}
    cacheS: dict = {}

    def blocks_for(u0):
        if u0 not in cacheT:
            op = t_at(u0)
            cacheT[u0] = (op, _blocked(op.mat, N, d))
        return cacheT[u0]

    def s_blocks_for(u0):
        if u0 not in cacheS:
            op, _ = blocks_for(u0)
            opn, _ = blocks_for(-u0)
            s_op = s_at(opn.mat, op)
            cacheS[u0] = _blocked(s_op.mat, N, d)
        return cacheS[u0]

    rtt_fail, refl_fail, singular = [], [], []
    rtt_n = refl_n = 0
    for (u0, v0) in pairs:
        if u0 in poles or -u0 in poles or v0 in poles or -v0 in poles:
            singular.append(
                {"u": str(u0), "v": str(v0), "error": "SingularParameter: sample at a pole"}
            )
            continue
        R = _int_cleared(_aux_sparse(Z.form, u0, v0, primed=False))
        Rp = _int_cleared(_aux_sparse(Z.form, u0, v0, primed=True))
        _, Tu = blocks_for(u0)
        _, Tv = blocks_for(v0)
        rtt_n += 1
        if not _rtt_holds(Tu, Tv, R, N, d):
            rtt_fail.append((str(u0), str(v0)))
        Su = s_blocks_for(u0)
        Sv = s_blocks_for(v0)
        refl_n += 1
        if not _reflection_holds(Su, Sv, R, Rp, N, d):
            refl_fail.append((str(u0), str(v0)))
    return RelationReport(
        spec=Z.spec_string(),
        degree_bound=bound,
        rtt_checked=rtt_n,
        rtt_failures=rtt_fail,
        reflection_checked=refl_n,
        reflection_failures=refl_fail,
        singular_samples=singular,
        proven=proven_grid and not rtt_fail and not refl_fail,
    )


# ---------------------------------------------------------------------------
# contragredient duality

@dataclass
class DualityReport:
    diagram: SkewDiagram
    N: int
    form: str
    z: Fraction
    K: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


def duality_check(omega: SkewDiagram, z, form: GForm, K: int | None = None) -> DualityReport:
    """The contragredient-module identity: for generator instances h,
    rho_sharp(h) F_sharp = sigma_hat (rho(tau(h)) F)^t sigma_hat,
    with h the u^-k coefficients of the tautological single-box action."""
    N = form.N
    z = Fraction(z)
    n = omega.size
    if K is None:
        K = max(1, 2 * n)
    if n == 0:
        return DualityReport(omega, N, form.kind, z, K, [])
    F = fusion_mod.fusion_operator(omega, N)
    sh_dia, c_shift = sharp(omega)
    Fs = fusion_mod.fusion_operator(sh_dia, N)
    z_sharp = -z - c_shift
    cont = column_tableau(omega).contents
    cont_s = column_tableau(sh_dia).contents
    x = RatFunc.x()

    # tautological (descending) products at the two evaluation tuples
    t_sharp = [z_sharp + cont_s[n - p] for p in range(1, n + 1)]
    t_tau = [-(z + cont[n - p]) for p in range(1, n + 1)]
    U_sharp = fusion_mod.defining_action_product(x, t_sharp, N, ascending=False)
    U_tau = fusion_mod.defining_action_product(x, t_tau, N, ascending=False)

    dims = (N,) * (n + 1)
    s_hat = reversal_op(n, N)
    sig = TensorOperator(np.kron(feye(N), s_hat.mat), dims)
    Fe = TensorOperator(np.kron(feye(N), F.matrix.mat), dims)
    Fse = TensorOperator(np.kron(feye(N), Fs.matrix.mat), dims)
    legs = set(range(2, n + 2))

    Cs = _entrywise_series(U_sharp, K)
    Ct = _entrywise_series(U_tau, K)
    failures = []
    for k in range(K + 1):
        Lk = (sig @ TensorOperator(Cs[k], dims) @ sig) @ Fse
        rho_tau = sig @ transpose_legs(TensorOperator(Ct[k], dims), legs, form) @ sig
        Xk = rho_tau @ Fe
        Rk = sig @ transpose_legs(Xk, legs, form) @ sig
        if Lk != Rk:
            failures.append(k)
    return DualityReport(omega, N, form.kind, z, K, failures)
