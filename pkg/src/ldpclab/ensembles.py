"""Random linear and random s-LDPC code samplers with brute-force analytics.

The LDPC ensemble stacks t = (1-R)*s independent layers; each layer
partitions the n coordinates into n/s parity checks via a Fisher-Yates
permutation and scales every coordinate by a uniform nonzero element.
Sampling is driven by a counter-based PRNG (numpy Philox keyed on the
64-bit seed), so a (params, seed) pair reproduces a code bit-for-bit and
Monte Carlo workers can partition seed space deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from . import linalg
from .errors import (
    BadRate,
    CodeTooLarge,
    DivisibilityViolation,
    LengthMismatch,
)
from .gf import Field, field_new

ENUM_GUARD = 1 << 24


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def fisher_yates(rng: np.random.Generator, n: int) -> np.ndarray:
    """Explicit Fisher-Yates shuffle of [0, n), consuming one draw per step."""
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


@dataclass(frozen=True)
class LdpcEnsembleParams:
    """Parameters (q, n, s, R) of the layered LDPC ensemble; t = (1-R)s."""

    field: Field
    n: int
    s: int
    rate: Fraction

    def __post_init__(self):
        if not (0 < self.rate < 1):
            raise BadRate(f"rate must be in (0,1), got {self.rate}")
        if self.n % self.s != 0:
            raise DivisibilityViolation(f"s={self.s} does not divide n={self.n}")
        t = (1 - self.rate) * self.s
        if t.denominator != 1 or t <= 0:
            raise DivisibilityViolation(
                f"t = (1-R)*s = {t} must be a positive integer"
            )

    @property
    def t(self) -> int:
        return int((1 - self.rate) * self.s)

    @property
    def checks_per_layer(self) -> int:
        return self.n // self.s


class LinearCode:
    """A linear code given by its parity-check matrix H; kernel cached."""

    def __init__(self, field: Field, h: np.ndarray, s: int, rate: Fraction, seed: int):
        self.field = field
        self.h = np.asarray(h, dtype=np.int64)
        self.n = self.h.shape[1]
        self.s = s  # 0 marks a random linear code
        self.rate = rate
        self.seed = seed
        self._generator: Optional[np.ndarray] = None

    @property
    def generator(self) -> np.ndarray:
        """n x k matrix whose columns span the code."""
        if self._generator is None:
            self._generator = linalg.kernel_basis(self.field, self.h)
        return self._generator

    @property
    def dimension(self) -> int:
        return self.generator.shape[1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinearCode)
            and self.field == other.field
            and self.s == other.s
            and self.rate == other.rate
            and np.array_equal(self.h, other.h)
        )

    # -- serialization --

    def to_json(self) -> str:
        q = self.field.q
        sep = "" if q <= 10 else ","
        rows = [sep.join(str(int(x)) for x in row) for row in self.h]
        doc = {
            "field": {"p": self.field.p, "h": self.field.h,
                      "modulus": list(self.field.modulus)},
            "n": self.n,
            "s": self.s,
            "rate": [self.rate.numerator, self.rate.denominator],
            "seed": self.seed,
            "h_rows": rows,
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LinearCode":
        doc = json.loads(text)
        fld = field_new(doc["field"]["p"], doc["field"]["h"])
        if list(fld.modulus) != doc["field"]["modulus"]:
            raise ValueError("field modulus mismatch in serialized code")
        q = fld.q
        rows = []
        for row in doc["h_rows"]:
            if q <= 10:
                rows.append([int(c) for c in row])
            else:
                rows.append([int(c) for c in row.split(",")] if row else [])
        h = np.array(rows, dtype=np.int64).reshape(len(rows), doc["n"])
        return cls(fld, h, doc["s"], Fraction(*doc["rate"]), doc["seed"])


def sample_rlc(n: int, rate: Fraction, fld: Field, seed: int) -> LinearCode:
    """Kernel of a uniformly random (1-R)n x n matrix over F_q."""
    rate = Fraction(rate)
    if not (0 < rate < 1):
        raise BadRate(f"rate must be in (0,1), got {rate}")
    if (rate * n).denominator != 1:
        raise BadRate(f"R*n = {rate * n} is not an integer")
    m = int((1 - rate) * n)
    rng = make_rng(seed)
    h = rng.integers(0, fld.q, size=(m, n)).astype(np.int64)
    return LinearCode(fld, h, 0, rate, seed)


def _sample_layer(params: LdpcEnsembleParams, rng: np.random.Generator) -> np.ndarray:
    n, s, q = params.n, params.s, params.field.q
    perm = fisher_yates(rng, n)
    scalars = (
        np.ones(n, dtype=np.int64)
        if q == 2
        else rng.integers(1, q, size=n).astype(np.int64)
    )
    layer = np.zeros((n // s, n), dtype=np.int64)
    for i in range(n // s):
        cols = perm[i * s:(i + 1) * s]
        layer[i, cols] = scalars[cols]
    return layer


def sample_ldpc(params: LdpcEnsembleParams, seed: int) -> LinearCode:
    """Stack t independent layers, each a filtered random permutation."""
    rng = make_rng(seed)
    layers = [_sample_layer(params, rng) for _ in range(params.t)]
    h = np.vstack(layers)
    return LinearCode(params.field, h, params.s, params.rate, seed)


def contains(code: LinearCode, v: np.ndarray) -> bool:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (code.n,):
        raise LengthMismatch(f"vector length {v.shape} vs n={code.n}")
    return not np.any(linalg.matmul(code.field, code.h, v))


def _check_enum_guard(code: LinearCode) -> int:
    k = code.dimension
    if code.field.q ** k > ENUM_GUARD:
        raise CodeTooLarge(f"q^k = {code.field.q}^{k} exceeds {ENUM_GUARD}")
    return k


def _codeword_bitmasks(code: LinearCode) -> np.ndarray:
    """All codewords of a binary code with n <= 64, as uint64 bitmasks.

    Codeword for message index m is the XOR of the generators selected by
    the bits of m; built by doubling so index order matches message order.
    """
    assert code.field.q == 2 and code.n <= 64
    gens = [
        np.uint64(linalg.vector_index(code.generator[:, j], 2))
        for j in range(code.dimension)
    ]
    cws = np.zeros(1, dtype=np.uint64)
    for g in gens:
        cws = np.concatenate([cws, cws ^ g])
    return cws


def enumerate_codewords(code: LinearCode, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Yield all q^k codewords as message-space enumeration times the basis."""
    k = _check_enum_guard(code)
    q = code.field.q
    total = q ** k
    gen = code.generator
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        msgs = np.zeros((k, idx.size), dtype=np.int64)
        rem = idx.copy()
        for i in range(k):
            msgs[i] = rem % q
            rem //= q
        cws = linalg.matmul(code.field, gen, msgs) if k else np.zeros((code.n, idx.size), dtype=np.int64)
        for j in range(idx.size):
            yield cws[:, j]


def _codeword_weights(code: LinearCode, chunk: int = 1 << 16):
    """Yield (message index array, weight array) over all codewords."""
    k = _check_enum_guard(code)
    q = code.field.q
    if q == 2 and code.n <= 64:
        cws = _codeword_bitmasks(code)
        w = np.bitwise_count(cws).astype(np.int64)
        yield np.arange(cws.size), w
        return
    total = q ** k
    gen = code.generator
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        msgs = np.zeros((k, idx.size), dtype=np.int64)
        rem = idx.copy()
        for i in range(k):
            msgs[i] = rem % q
            rem //= q
        cws = linalg.matmul(code.field, gen, msgs)
        yield idx, np.count_nonzero(cws, axis=0)


def _message_to_codeword(code: LinearCode, m_idx: int) -> np.ndarray:
    k = code.dimension
    q = code.field.q
    msg = np.zeros(k, dtype=np.int64)
    rem = m_idx
    for i in range(k):
        msg[i] = rem % q
        rem //= q
    return linalg.matmul(code.field, code.generator, msg)


def min_distance(code: LinearCode) -> tuple[float, np.ndarray]:
    """Minimum relative weight of a nonzero codeword, with a witness."""
    if code.dimension == 0:
        return 1.0, np.zeros(code.n, dtype=np.int64)
    best_w, best_idx = code.n + 1, 0
    for idx, w in _codeword_weights(code):
        nz = idx != 0
        if np.any(nz):
            j = int(np.argmin(np.where(nz, w, code.n + 1)))
            if w[j] < best_w and idx[j] != 0:
                best_w, best_idx = int(w[j]), int(idx[j])
    witness = _message_to_codeword(code, best_idx)
    return best_w / code.n, witness


def has_codeword_of_weight(code: LinearCode, weight: int) -> bool:
    """Exhaustively check for a codeword of exact Hamming weight."""
    for idx, w in _codeword_weights(code):
        hits = (w == weight) & (idx != 0)
        if np.any(hits):
            return True
    return False


def list_size_at(code: LinearCode, center: np.ndarray, alpha: float) -> int:
    """Exact count of codewords within relative distance alpha of center."""
    center = np.asarray(center, dtype=np.int64)
    if center.shape != (code.n,):
        raise LengthMismatch(f"center length {center.shape} vs n={code.n}")
    _check_enum_guard(code)
    radius = int(np.floor(alpha * code.n + 1e-9))
    if code.field.q == 2 and code.n <= 64:
        cws = _codeword_bitmasks(code)
        c = np.uint64(linalg.vector_index(center, 2))
        return int(np.count_nonzero(np.bitwise_count(cws ^ c) <= radius))
    count = 0
    for cw in enumerate_codewords(code):
        if np.count_nonzero(cw != center) <= radius:
            count += 1
    return count


@dataclass
class ListSizeResult:
    max_list_size: int
    worst_center: np.ndarray
    exhaustive: bool


def _ball_difference_indices(fld: Field, n: int, radius: int) -> np.ndarray:
    """Indices of all vectors of weight <= radius in F_q^n."""
    from itertools import combinations, product

    q = fld.q
    out = [0]
    for w in range(1, radius + 1):
        for pos in combinations(range(n), w):
            for vals in product(range(1, q), repeat=w):
                idx = 0
                for p_, v_ in zip(pos, vals):
                    idx += v_ * q ** p_
                out.append(idx)
    return np.array(out, dtype=np.int64)


def max_list_size(
    code: LinearCode,
    alpha: float,
    center_budget: Optional[int] = None,
    seed: int = 0,
) -> ListSizeResult:
    """Max codeword count over Hamming balls of relative radius alpha.

    Exhaustive over all q^n centers when q^n <= 2^24; otherwise a
    center-sampling budget must be supplied and the result is a lower
    bound (exhaustive=False).
    """
    q = code.field.q
    radius = int(np.floor(alpha * code.n + 1e-9))
    if q ** code.n <= ENUM_GUARD:
        _check_enum_guard(code)
        counts = np.zeros(q ** code.n, dtype=np.int64)
        diffs = _ball_difference_indices(code.field, code.n, radius)
        if q == 2:
            cw_idx = np.array(
                [linalg.vector_index(cw, 2) for cw in enumerate_codewords(code)],
                dtype=np.int64,
            )
            for d in diffs:
                np.add.at(counts, cw_idx ^ d, 1)
        else:
            diff_vecs = np.stack(
                [linalg.index_vector(int(d), code.n, q) for d in diffs]
            )
            powers = q ** np.arange(code.n, dtype=np.int64)
            for cw in enumerate_codewords(code):
                centers = code.field.add(cw[None, :], diff_vecs)
                np.add.at(counts, centers @ powers, 1)
        worst = int(np.argmax(counts))
        return ListSizeResult(
            int(counts[worst]),
            linalg.index_vector(worst, code.n, q),
            exhaustive=True,
        )
    if center_budget is None:
        raise CodeTooLarge(
            f"q^n = {q}^{code.n} exceeds {ENUM_GUARD}; supply a center budget"
        )
    rng = make_rng(seed)
    best, best_center = -1, None
    for _ in range(center_budget):
        center = rng.integers(0, q, size=code.n).astype(np.int64)
        l_ = list_size_at(code, center, alpha)
        if l_ > best:
            best, best_center = l_, center
    return ListSizeResult(best, best_center, exhaustive=False)


# ---------------------------------------------------------------------------
# Monte Carlo containment estimators


def mc_rlc_contains(
    m: np.ndarray,
    rate: Fraction,
    fld: Field,
    trials: int,
    seed: int,
    chunk: int = 1 << 12,
) -> float:
    """Fraction of random linear codes (over `trials` seeds) containing M.

    A fresh uniform parity-check matrix is drawn per trial and M is
    contained iff H.M = 0.  Vectorized over trials for prime fields.
    """
    m = np.asarray(m, dtype=np.int64)
    n, ell = m.shape
    rows = int((1 - Fraction(rate)) * n)
    rng = make_rng(seed)
    hits = 0
    if fld.h == 1:
        p = fld.p
        for start in range(0, trials, chunk):
            b = min(chunk, trials - start)
            hs = rng.integers(0, p, size=(b, rows, n))
            prod = np.einsum("brn,nl->brl", hs, m) % p
            hits += int(np.count_nonzero(~prod.any(axis=(1, 2))))
        return hits / trials
    for _ in range(trials):
        h = rng.integers(0, fld.q, size=(rows, n)).astype(np.int64)
        if not np.any(linalg.matmul(fld, h, m)):
            hits += 1
    return hits / trials


def mc_ldpc_contains(
    m: np.ndarray,
    params: LdpcEnsembleParams,
    trials: int,
    seed: int,
    chunk: int = 1 << 14,
) -> float:
    """Fraction of sampled s-LDPC codes containing M (prime fields vectorized).

    Per layer, M is annihilated iff every parity block's scaled row sum
    vanishes; layers are sampled independently, so a trial batches t
    permutations and scalar draws.
    """
    m = np.asarray(m, dtype=np.int64)
    n, ell = m.shape
    if n != params.n:
        raise LengthMismatch(f"M has {n} rows, params.n = {params.n}")
    fld = params.field
    s, t, blocks = params.s, params.t, params.checks_per_layer
    rng = make_rng(seed)
    if fld.h != 1:
        hits = 0
        for i in range(trials):
            code = sample_ldpc(params, seed=int(rng.integers(0, 2 ** 63)))
            if not np.any(linalg.matmul(fld, code.h, m)):
                hits += 1
        return hits / trials
    p = fld.p
    hits = 0
    for start in range(0, trials, chunk):
        b = min(chunk, trials - start)
        ok = np.ones(b, dtype=bool)
        for _ in range(t):
            perms = np.argsort(rng.random(size=(b, n)), axis=1)
            rows = m[perms]  # (b, n, ell), rows permuted per trial
            if p > 2:
                scal = rng.integers(1, p, size=(b, n, 1))
                rows = rows * scal % p
            sums = rows.reshape(b, blocks, s, ell).sum(axis=2) % p
            ok &= ~sums.any(axis=(1, 2))
        hits += int(np.count_nonzero(ok))
    return hits / trials
