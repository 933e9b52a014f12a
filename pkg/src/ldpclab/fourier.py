"""Harmonic analysis over F_q^ell and the layered-code containment bound.

Transforms are direct sums against the additive characters chi_x(y) =
omega_p^tr(<x,y>) with the expectation normalization: fhat(y) =
E_x[f(x) conj(chi_x(y))], so a probability distribution has fhat(0) =
q^(-ell).  Tables are dense complex arrays indexed by the base-q vector
encoding (first coordinate least significant).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import gvdistance, linalg
from .ensembles import LdpcEnsembleParams
from .errors import (
    EvenSparsity,
    LengthMismatch,
    NonRealResult,
    NotInLtau,
    NotSmooth,
    NotSmoothEnough,
    StateSpaceTooLarge,
    TableTooLarge,
)
from .gf import Field
from .rowdist import RowDistribution, entropy_q, row_distribution_of, smoothness

TABLE_GUARD = 10 ** 6
IMAG_TOL = 1e-10


def _check_table(field: Field, ell: int) -> int:
    size = field.q ** ell
    if size > TABLE_GUARD:
        raise TableTooLarge(f"q^l = {field.q}^{ell} exceeds {TABLE_GUARD}")
    return size


@dataclass
class ComplexDistribution:
    """Dense complex table over F_q^ell, indexed by vector encoding."""

    field: Field
    ell: int
    values: np.ndarray

    @staticmethod
    def zeros(field: Field, ell: int) -> "ComplexDistribution":
        size = _check_table(field, ell)
        return ComplexDistribution(field, ell, np.zeros(size, dtype=np.complex128))

    def is_probability(self, tol: float = 1e-12) -> bool:
        v = self.values
        return (
            np.all(np.abs(v.imag) <= tol)
            and np.all(v.real >= -tol)
            and abs(v.real.sum() - 1) <= tol
        )


@dataclass
class FourierTable:
    field: Field
    ell: int
    coefficients: np.ndarray


def distribution_table(tau: RowDistribution) -> ComplexDistribution:
    """tau as a dense complex table."""
    out = ComplexDistribution.zeros(tau.field, tau.ell)
    q = tau.field.q
    for v, m in tau.masses:
        out.values[linalg.vector_index(v, q)] += float(m)
    return out


def scalar_twist(tau: RowDistribution) -> ComplexDistribution:
    """Distribution of lambda*v for v ~ tau and lambda uniform in F_q^*."""
    fld = tau.field
    q = fld.q
    out = ComplexDistribution.zeros(fld, tau.ell)
    for v, m in tau.masses:
        va = np.array(v, dtype=np.int64)
        for lam in fld.units():
            out.values[linalg.vector_index(fld.mul(lam, va), q)] += float(m) / (q - 1)
    return out


@lru_cache(maxsize=32)
def _character_matrix(field: Field, ell: int) -> np.ndarray:
    """chi[x, y] for all pairs of vector indices."""
    size = _check_table(field, ell)
    if size * size > 16 * TABLE_GUARD:
        raise TableTooLarge(f"character matrix {size}x{size} too large")
    vecs = linalg.all_vectors(ell, field.q)
    tr = np.zeros((size, size), dtype=np.int64)
    for i in range(ell):
        tr = (tr + field.trace(field.mul(vecs[:, i][:, None], vecs[:, i][None, :]))) % field.p
    return field._char_roots[tr]


def fourier_transform(f: ComplexDistribution) -> FourierTable:
    """fhat(y) = E_x[f(x) conj(chi_x(y))], a direct O(q^(2l)) sum."""
    chi = _character_matrix(f.field, f.ell)
    size = f.values.shape[0]
    coeffs = (f.values[None, :] @ np.conj(chi)).ravel() / size
    return FourierTable(f.field, f.ell, coeffs)


def inverse_transform(t: FourierTable) -> ComplexDistribution:
    """f(x) = sum_y fhat(y) chi_y(x)."""
    chi = _character_matrix(t.field, t.ell)
    return ComplexDistribution(t.field, t.ell, (t.coefficients[None, :] @ chi).ravel())


def conv_power_at_zero(p: ComplexDistribution, s: int) -> float:
    """sum_y phat(y)^s; the s-fold self-convolution of p evaluated at 0.

    The caller owns the q^(l(s-1)) normalization relating this to the
    probability that s independent p-samples sum to zero.  The input must
    be scalar-twist symmetric, which forces the sum to be real.
    """
    if s < 1:
        raise ValueError(f"s = {s} must be >= 1")
    coeffs = fourier_transform(p).coefficients
    val = np.sum(coeffs ** s)
    if abs(val.imag) > IMAG_TOL:
        raise NonRealResult(f"imaginary residue {val.imag} in convolution power")
    return float(val.real)


def fourier_coefficient_bound(
    tau: RowDistribution, delta
) -> tuple[float, float, bool]:
    """(max nonzero coefficient of the scalar twist, q^-l (1 - q delta/(q-1)), holds)."""
    delta = float(delta)
    if float(smoothness(tau)) < delta - 1e-12:
        raise NotSmoothEnough(f"tau is not {delta}-smooth")
    q, ell = tau.field.q, tau.ell
    coeffs = fourier_transform(scalar_twist(tau)).coefficients
    if np.max(np.abs(coeffs[1:].imag)) > IMAG_TOL:
        raise NonRealResult("nonzero coefficient with imaginary part")
    max_coeff = float(np.max(coeffs[1:].real))
    bound = q ** (-ell) * (1 - q * delta / (q - 1))
    return max_coeff, bound, max_coeff <= bound + IMAG_TOL


@dataclass
class LdpcBoundReport:
    n: int
    ell: int
    s: int
    rate: Fraction
    delta: float
    per_block_log: float      # log_q Pr[one block of s twisted rows sums to 0], bounded
    conditioning_log: float   # log_q of the row-distribution conditioning factor
    layer_log: float          # per-layer log bound: (n/s) per_block + conditioning
    log_q_bound: float        # t * layer_log, bounding log_q Pr[M in code]
    target_log: float         # -(1-eps)(1-R) l n

    def to_json(self) -> str:
        d = self.__dict__.copy()
        d["rate"] = [self.rate.numerator, self.rate.denominator]
        return json.dumps(d, indent=1)


def ldpc_contain_bound(
    m: np.ndarray, params: LdpcEnsembleParams, eps: float
) -> LdpcBoundReport:
    """Upper bound on log_q Pr[all columns of M lie in a sampled code].

    Assembled per layer: the block zero-sum probability is bounded through
    the Fourier coefficients of the scalar twist (q^-l + (1-q delta/(q-1))^s
    per block after normalization), and the conditioning step from i.i.d.
    rows back to the exact row distribution costs the explicit factor
    q^(n H_q(tau)) / multinomial(n; tau n) instead of an opaque polynomial.
    Requires odd s (the parity the coefficient-power argument needs) and a
    smooth row distribution.  Smoothness above 1 - 1/q is clipped: beyond
    it the coefficient bound turns negative and the odd-power sum is no
    longer monotone in delta, so the clipped value is the safe one.
    """
    m = linalg.as_matrix(m)
    n, ell = m.shape
    if n != params.n:
        raise LengthMismatch(f"matrix has {n} rows, params expect {params.n}")
    if params.s % 2 == 0:
        raise EvenSparsity(f"s = {params.s} is even; bound proven for odd s")
    q = params.field.q
    tau = row_distribution_of(params.field, m)
    delta = float(smoothness(tau))
    if delta == 0:
        raise NotSmooth("row distribution is not smooth (support spans a proper subspace)")
    delta = min(delta, (q - 1) / q)
    s = params.s
    per_block = math.log(q ** (-ell) + (1 - q * delta / (q - 1)) ** s, q)
    # Pr[iid rows realize tau exactly] = multinomial * q^(-n H_q(tau))
    log_multinomial = math.log(math.factorial(n), q)
    for v, mass in tau.masses:
        c = mass * n
        if c.denominator != 1:
            raise NotInLtau(f"tau({v}) * n = {c} is not an integer")
        log_multinomial -= math.log(math.factorial(int(c)), q)
    conditioning = n * float(entropy_q(tau)) - log_multinomial
    layer = (n // s) * per_block + conditioning
    t = int(params.t)
    rate = params.rate
    return LdpcBoundReport(
        n=n,
        ell=ell,
        s=s,
        rate=rate,
        delta=delta,
        per_block_log=per_block,
        conditioning_log=conditioning,
        layer_log=layer,
        log_q_bound=t * layer,
        target_log=-(1 - eps) * float(1 - rate) * ell * n,
    )


def exact_layer_prob(tau: RowDistribution, n: int, s: int) -> float:
    """Exact probability that one layer annihilates a fixed M with row
    distribution tau.

    The layer partitions the n rows into n/s blocks uniformly and scales
    each by an independent uniform unit; a block vanishes iff its scaled
    rows sum to zero in F_q^l.  DP over blocks on the remaining row-type
    counts, with multivariate hypergeometric transition weights; the
    within-block zero-sum probability comes from convolving the per-row
    twisted tables.  For l = 1 only the nonzero count matters and the
    unbounded-n weight DP applies.
    """
    fld = tau.field
    q = fld.q
    if n % s != 0:
        raise ValueError(f"s = {s} does not divide n = {n}")
    counts = []
    for v, mass in tau.masses:
        c = mass * n
        if c.denominator != 1:
            raise NotInLtau(f"tau({v}) * n = {c} is not an integer")
        counts.append(int(c))
    supp = tau.support()

    if tau.ell == 1:
        w = sum(c for (v,), c in zip(supp, counts) if v != 0)
        r = gvdistance.zero_sum_probs(q, s)
        blocks = n // s

        @lru_cache(maxsize=None)
        def layer(b: int, w_rem: int) -> float:
            if b == blocks:
                return 1.0 if w_rem == 0 else 0.0
            n_rem = (blocks - b) * s
            total = 0.0
            for k in range(max(0, w_rem - (n_rem - s)), min(s, w_rem) + 1):
                if r[k] == 0.0:
                    continue
                pk = (
                    math.comb(w_rem, k)
                    * math.comb(n_rem - w_rem, s - k)
                    / math.comb(n_rem, s)
                )
                total += pk * r[k] * layer(b + 1, w_rem - k)
            return total

        out = layer(0, w)
        layer.cache_clear()
        return out

    if len(supp) > 6 or n // s > 16:
        raise StateSpaceTooLarge(
            f"support {len(supp)}, n/s = {n // s} beyond the DP guard"
        )
    size = _check_table(fld, tau.ell)
    blocks = n // s

    # dense zero-sum table per support vector: uniform over its unit multiples
    twists = []
    for v in supp:
        tbl = np.zeros(size, dtype=np.float64)
        va = np.array(v, dtype=np.int64)
        for lam in fld.units():
            tbl[linalg.vector_index(fld.mul(lam, va), q)] += 1 / (q - 1)
        twists.append(tbl)

    # group convolution table: index addition over F_q^l
    vecs = linalg.all_vectors(tau.ell, q)
    add_idx = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        summed = fld.add(vecs[i][None, :], vecs)
        add_idx[i] = [linalg.vector_index(x, q) for x in summed]

    def convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.zeros(size, dtype=np.float64)
        np.add.at(out, add_idx, a[:, None] * b[None, :])
        return out

    @lru_cache(maxsize=None)
    def block_zero_prob(comp: tuple[int, ...]) -> float:
        acc = np.zeros(size, dtype=np.float64)
        acc[0] = 1.0
        for tbl, k in zip(twists, comp):
            for _ in range(k):
                acc = convolve(acc, tbl)
        return float(acc[0])

    def compositions(total: int, caps: tuple[int, ...]):
        if len(caps) == 1:
            if total <= caps[0]:
                yield (total,)
            return
        for first in range(min(total, caps[0]) + 1):
            for rest in compositions(total - first, caps[1:]):
                yield (first, *rest)

    memo: dict[tuple[int, ...], float] = {}

    def walk(rem: tuple[int, ...]) -> float:
        n_rem = sum(rem)
        if n_rem == 0:
            return 1.0
        if rem in memo:
            return memo[rem]
        if len(memo) > 2 * 10 ** 6:
            raise StateSpaceTooLarge("allocation DP state count exceeded guard")
        total = 0.0
        denom = math.comb(n_rem, s)
        for comp in compositions(s, rem):
            z = block_zero_prob(comp)
            if z == 0.0:
                continue
            weight = 1
            for c, k in zip(rem, comp):
                weight *= math.comb(c, k)
            nxt = tuple(c - k for c, k in zip(rem, comp))
            total += (weight / denom) * z * walk(nxt)
        memo[rem] = total
        return total

    out = walk(tuple(counts))
    block_zero_prob.cache_clear()
    return out
