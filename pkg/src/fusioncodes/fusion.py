"""Exact loss and Pauli-error analysis of transversal logical fusions.

Two identical graph codes are fused pairwise with standard physical
fusions.  Each fused pair yields the XX and ZZ joint parities on
success, one of them on failure (chosen by the per-pair failure basis
w_i: 1 recovers XX, 0 recovers ZZ), and nothing if either photon is
lost.  A logical parity is recovered when some representative of the
corresponding logical set is reconstructible qubit by qubit.

Patterns are classified once per code over all 4^n per-qubit
availability states (none / ZZ only / XX only / both); every failure
basis then just filters that table, which keeps the 2^n basis scan and
erasure polynomials exact and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .codes import GraphCode, logical_set
from .lpoly import LossPolynomial
from .pauli import ResourceCapExceeded, enumerate_group, gf2_reduce

FUSION_CAP = 8

# availability digits, one per fused pair
AVAIL_NONE = 0  # photon loss: no parity
AVAIL_ZZ = 1  # failure recovering ZZ
AVAIL_XX = 2  # failure recovering XX
AVAIL_BOTH = 3  # successful fusion: XX and ZZ


class Outcome(Enum):
    LOSS = "loss"
    FAIL = "fail"
    SUCCESS = "success"


@dataclass(frozen=True)
class FusionSpec:
    """Physical fusion model: transmission, failure rate, failure bases."""

    eta: float
    p_fail: float = 0.5
    w: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta out of range: {self.eta}")
        if not 0.0 <= self.p_fail <= 1.0:
            raise ValueError(f"p_fail out of range: {self.p_fail}")
        if any(b not in (0, 1) for b in self.w):
            raise ValueError("failure bases must be 0 (ZZ) or 1 (XX)")

    @property
    def w_mask(self) -> int:
        return sum(1 << i for i, b in enumerate(self.w) if b)


@dataclass(frozen=True)
class MeasurementPattern:
    """Per-pair outcomes with their occurrence-probability monomial."""

    outcomes: tuple[Outcome, ...]
    probability: LossPolynomial


def pattern_probability(outcomes, spec: FusionSpec) -> LossPolynomial:
    """Occurrence probability of one SUCCESS/FAIL/LOSS assignment."""
    outs = tuple(outcomes)
    s = sum(1 for o in outs if o is Outcome.SUCCESS)
    f = sum(1 for o in outs if o is Outcome.FAIL)
    l = len(outs) - s - f
    poly = LossPolynomial(len(outs))
    poly.add_pattern(s, f, l)
    return poly


def availability_masks(outcomes, w_bits) -> tuple[int, int]:
    """(XX-available, ZZ-available) bit masks for a pattern under w."""
    ax = az = 0
    for i, o in enumerate(outcomes):
        if o is Outcome.SUCCESS:
            ax |= 1 << i
            az |= 1 << i
        elif o is Outcome.FAIL:
            if w_bits[i]:
                ax |= 1 << i
            else:
                az |= 1 << i
    return ax, az


def recoverable(logical_pair, outcomes, w_bits) -> bool:
    """Can the paired parity of this logical representative be read out?

    Per qubit in the support: X needs the XX parity, Z needs ZZ, Y needs
    both; lost pairs provide nothing.
    """
    ax, az = availability_masks(outcomes, w_bits)
    return (logical_pair.x_bits & ~ax) == 0 and (logical_pair.z_bits & ~az) == 0


# -- per-code availability table --------------------------------------


class CodeFusionTable:
    """Classification of all 4^n availability states for one code."""

    def __init__(self, code: GraphCode):
        n = code.n_code
        if n > FUSION_CAP:
            raise ResourceCapExceeded(f"{n} code qubits exceeds cap {FUSION_CAP}")
        self.code = code
        self.n = n
        size = 4**n
        idx = np.arange(size, dtype=np.int64)
        shifts = 2 * np.arange(n, dtype=np.int64)
        digits = (idx[:, None] >> shifts) & 3
        bits = 1 << np.arange(n, dtype=np.int64)

        self.n_success = (digits == AVAIL_BOTH).sum(axis=1).astype(np.int8)
        self.n_fail = ((digits == AVAIL_XX) | (digits == AVAIL_ZZ)).sum(axis=1).astype(np.int8)
        self.n_loss = (n - self.n_success - self.n_fail).astype(np.int8)
        self.fail_xx_mask = ((digits == AVAIL_XX) * bits).sum(axis=1)
        self.fail_zz_mask = ((digits == AVAIL_ZZ) * bits).sum(axis=1)
        self.ax_mask = (((digits == AVAIL_BOTH) | (digits == AVAIL_XX)) * bits).sum(axis=1)
        self.az_mask = (((digits == AVAIL_BOTH) | (digits == AVAIL_ZZ)) * bits).sum(axis=1)

        self.reps = {"X": logical_set(code, "X"), "Z": logical_set(code, "Z")}
        self.rep_index = {}
        for basis in ("X", "Z"):
            rep = np.full(size, -1, dtype=np.int16)
            for k, p in enumerate(self.reps[basis]):
                cov = ((p.x_bits & ~self.ax_mask) == 0) & ((p.z_bits & ~self.az_mask) == 0)
                rep[cov & (rep < 0)] = k
            self.rep_index[basis] = rep

    def consistent(self, w_mask: int) -> np.ndarray:
        """Patterns whose failure outcomes agree with the basis vector."""
        return ((self.fail_xx_mask & ~w_mask) == 0) & ((self.fail_zz_mask & w_mask) == 0)

    def success_polynomial(self, basis: str, w_mask: int) -> LossPolynomial:
        select = self.consistent(w_mask) & (self.rep_index[basis] >= 0)
        key = self.n_success.astype(np.int64) * (self.n + 1) + self.n_fail
        counts = np.bincount(key[select], minlength=(self.n + 1) ** 2)
        poly = LossPolynomial(self.n)
        for k, c in enumerate(counts):
            if c:
                s, f = divmod(k, self.n + 1)
                poly.add_pattern(s, f, self.n - s - f, int(c))
        return poly

    def full_polynomial(self, w_mask: int) -> LossPolynomial:
        """Sum over every consistent pattern; identically 1 when normalized."""
        select = self.consistent(w_mask)
        key = self.n_success.astype(np.int64) * (self.n + 1) + self.n_fail
        counts = np.bincount(key[select], minlength=(self.n + 1) ** 2)
        poly = LossPolynomial(self.n)
        for k, c in enumerate(counts):
            if c:
                s, f = divmod(k, self.n + 1)
                poly.add_pattern(s, f, self.n - s - f, int(c))
        return poly

    def pattern_outcomes(self, avail_idx: int) -> tuple[Outcome, ...]:
        outs = []
        for i in range(self.n):
            d = (avail_idx >> (2 * i)) & 3
            outs.append(
                Outcome.SUCCESS if d == AVAIL_BOTH else Outcome.LOSS if d == AVAIL_NONE else Outcome.FAIL
            )
        return tuple(outs)


@lru_cache(maxsize=8)
def fusion_table(code: GraphCode) -> CodeFusionTable:
    return CodeFusionTable(code)


# -- erasure analysis --------------------------------------------------


@dataclass
class ErasureReport:
    """Result of analysing one (code, failure basis) pair."""

    code: GraphCode
    spec: FusionSpec
    p_success_xx: LossPolynomial
    p_success_zz: LossPolynomial

    def success_probability(self, basis: str, eta: float | None = None) -> float:
        poly = self.p_success_xx if basis == "X" else self.p_success_zz
        return poly.eval(self.spec.eta if eta is None else eta, self.spec.p_fail)

    def erasure_rate(self, basis: str, eta: float | None = None) -> float:
        return 1.0 - self.success_probability(basis, eta)

    def to_json_dict(self, eta_grid=()) -> dict:
        spec = self.spec
        return {
            "code_id": self.code.code_id,
            "n_code": self.code.n_code,
            "w": list(spec.w),
            "p_fail": spec.p_fail,
            "p_success_xx_counts": {f"{s},{f},{l}": c for (s, f, l), c in sorted(self.p_success_xx.counts.items())},
            "p_success_zz_counts": {f"{s},{f},{l}": c for (s, f, l), c in sorted(self.p_success_zz.counts.items())},
            "rates": [
                {
                    "eta": e,
                    "p_erase_xx": self.erasure_rate("X", e),
                    "p_erase_zz": self.erasure_rate("Z", e),
                }
                for e in eta_grid
            ],
        }


def erasure_analysis(code: GraphCode, spec: FusionSpec) -> ErasureReport:
    """Exact success polynomials for the two paired logical parities."""
    if len(spec.w) != code.n_code:
        raise ValueError(f"failure basis length {len(spec.w)} != {code.n_code} code qubits")
    table = fusion_table(code)
    return ErasureReport(
        code=code,
        spec=spec,
        p_success_xx=table.success_polynomial("X", spec.w_mask),
        p_success_zz=table.success_polynomial("Z", spec.w_mask),
    )


def measurement_patterns(code: GraphCode, spec: FusionSpec, basis: str):
    """The recovering patterns M_X or M_Z with representatives, in index order."""
    table = fusion_table(code)
    select = table.consistent(spec.w_mask) & (table.rep_index[basis] >= 0)
    reps = table.reps[basis]
    out = []
    for avail_idx in np.nonzero(select)[0]:
        outcomes = table.pattern_outcomes(int(avail_idx))
        out.append(
            (
                MeasurementPattern(outcomes, pattern_probability(outcomes, spec)),
                reps[int(table.rep_index[basis][avail_idx])],
            )
        )
    return out


# -- depolarizing flips ------------------------------------------------


def pauli_flip_probability(epsilon: float) -> float:
    """Chance a fused pair's measured parity is flipped by depolarizing noise."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon out of range: {epsilon}")
    return 4.0 * ((epsilon / 3.0) * (1.0 - epsilon) + epsilon**2 / 9.0)


def joint_flip_distribution(epsilon: float, exact: bool = False) -> dict[tuple[int, int], float | Fraction]:
    """Joint law of (XX flip, ZZ flip) on one fused pair.

    Enumerates the 16 two-photon Pauli assignments of the single-qubit
    depolarizing channel: each photon is clean with probability 1-eps,
    or suffers X, Y or Z with probability eps/3.  A single-photon X
    flips the ZZ parity, Z flips XX, Y flips both; the pair flip is the
    XOR of the two photons' contributions.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon out of range: {epsilon}")
    one = Fraction(1) if exact else 1.0
    eps = Fraction(epsilon).limit_denominator(10**12) if exact else epsilon
    probs = {(0, 0): one - eps, (0, 1): eps / 3, (1, 1): eps / 3, (1, 0): eps / 3}
    dist: dict[tuple[int, int], float | Fraction] = {(0, 0): 0 * one, (0, 1): 0 * one, (1, 0): 0 * one, (1, 1): 0 * one}
    for (u1, v1), p1 in probs.items():
        for (u2, v2), p2 in probs.items():
            dist[(u1 ^ u2, v1 ^ v2)] += p1 * p2
    return dist


def _flip_bias(epsilon: float) -> float:
    """Common bias factor E[(-1)^flip] per touched pair.

    For the depolarizing channel the XX, ZZ and joint (Y-type) parity
    flips all have the same probability p, so a group element touching a
    pair contributes 1-2p regardless of its letter there.
    """
    dist = joint_flip_distribution(epsilon)
    bias_u = 1.0 - 2.0 * (dist[(1, 0)] + dist[(1, 1)])
    bias_v = 1.0 - 2.0 * (dist[(0, 1)] + dist[(1, 1)])
    bias_uv = 1.0 - 2.0 * (dist[(1, 0)] + dist[(0, 1)])
    assert abs(bias_u - bias_v) < 1e-15 and abs(bias_u - bias_uv) < 1e-15
    return bias_u


# -- maximum-likelihood error decoding ---------------------------------


def _fwht_rows(a: np.ndarray) -> np.ndarray:
    """In-place Walsh-Hadamard transform along the last axis."""
    m = a.shape[-1]
    h = 1
    while h < m:
        for start in range(0, m, 2 * h):
            x = a[..., start : start + h].copy()
            y = a[..., start + h : start + 2 * h]
            a[..., start : start + h] = x + y
            a[..., start + h : start + 2 * h] = x - y
        h *= 2
    return a


class ErrorAnalyzer:
    """Per-(code, failure-basis) setup for repeated error-rate evaluation.

    For each recovering pattern the decoder sees the syndrome of the
    paired code stabilizers that are reconstructible from the available
    parities, and flips the recovered logical parity to the likelier
    value.  The joint law of (syndrome, logical flip) is the Walsh
    transform of per-group-element biases (1-2p)^weight, so each
    pattern reduces to one small transform.
    """

    def __init__(self, code: GraphCode, w: tuple[int, ...], p_fail: float = 0.5):
        if len(w) != code.n_code:
            raise ValueError("failure basis length mismatch")
        self.code = code
        self.w = tuple(w)
        self.p_fail = p_fail
        self.n = code.n_code
        table = fusion_table(code)
        w_mask = sum(1 << i for i, b in enumerate(w) if b)
        consistent = table.consistent(w_mask)

        stab_elems = enumerate_group(code.stabilizers)
        stab_xz = [(p.x_bits, p.z_bits) for p in stab_elems]

        self._sides = {}
        for basis in ("X", "Z"):
            select = consistent & (table.rep_index[basis] >= 0)
            idxs = np.nonzero(select)[0]
            reps = table.reps[basis]
            s_cnt = table.n_success[idxs].astype(np.float64)
            f_cnt = table.n_fail[idxs].astype(np.float64)
            l_cnt = table.n_loss[idxs].astype(np.float64)
            groups: dict[int, list[tuple[int, np.ndarray]]] = {}
            lweight = np.zeros(len(idxs), dtype=np.int8)
            for row, avail in enumerate(idxs):
                ax = int(table.ax_mask[avail])
                az = int(table.az_mask[avail])
                rep = reps[int(table.rep_index[basis][avail])]
                lweight[row] = rep.weight
                members = [
                    x | (z << self.n)
                    for (x, z) in stab_xz
                    if (x & ~ax) == 0 and (z & ~az) == 0
                ]
                gens = gf2_reduce(members)
                r = len(gens)
                mask_n = (1 << self.n) - 1
                base = [(g & mask_n, g >> self.n) for g in gens]
                # subgroup <gens> x {1, rep}: bit j < r -> generator j, top bit -> rep
                weights = np.zeros(1 << (r + 1), dtype=np.int8)
                cur = [(0, 0)] * (1 << r)
                for y in range(1, 1 << r):
                    low = (y & -y).bit_length() - 1
                    px, pz = cur[y & (y - 1)]
                    cur[y] = (px ^ base[low][0], pz ^ base[low][1])
                for y in range(1 << r):
                    x0, z0 = cur[y]
                    weights[y] = (x0 | z0).bit_count()
                    x1, z1 = x0 ^ rep.x_bits, z0 ^ rep.z_bits
                    weights[y | (1 << r)] = (x1 | z1).bit_count()
                groups.setdefault(r, []).append((row, weights))
            packed = {}
            for r, items in groups.items():
                rows = np.array([row for row, _ in items], dtype=np.int64)
                mat = np.stack([wv for _, wv in items]).astype(np.float64)
                packed[r] = (rows, mat)
            self._sides[basis] = {
                "idxs": idxs,
                "s": s_cnt,
                "f": f_cnt,
                "l": l_cnt,
                "groups": packed,
                "lweight": lweight,
            }

    def pattern_probabilities(self, basis: str, eta: float) -> np.ndarray:
        side = self._sides[basis]
        a = eta * eta
        return (
            (1.0 - self.p_fail) ** side["s"]
            * self.p_fail ** side["f"]
            * a ** (side["s"] + side["f"])
            * (1.0 - a) ** side["l"]
        )

    def pattern_error_rates(self, basis: str, epsilon: float) -> np.ndarray:
        """Conditional logical error rate per recovering pattern."""
        side = self._sides[basis]
        bias = _flip_bias(epsilon)
        out = np.zeros(len(side["idxs"]), dtype=np.float64)
        for r, (rows, wmat) in side["groups"].items():
            beta = bias**wmat
            t = _fwht_rows(beta.copy()) / float(wmat.shape[1])
            half = 1 << r
            out[rows] = np.minimum(t[:, :half], t[:, half:]).sum(axis=1)
        return out

    def pattern_uncorrected_rates(self, basis: str, epsilon: float) -> np.ndarray:
        side = self._sides[basis]
        bias = _flip_bias(epsilon)
        return 0.5 * (1.0 - bias ** side["lweight"].astype(np.float64))

    def rates(self, eta: float, epsilon: float, corrections: bool = True) -> dict[str, float]:
        """Erasure-weighted logical error rate for each parity."""
        result = {}
        for basis in ("X", "Z"):
            p = self.pattern_probabilities(basis, eta)
            total = p.sum()
            if total <= 0.0:
                result[basis] = 0.0
                continue
            perr = (
                self.pattern_error_rates(basis, epsilon)
                if corrections
                else self.pattern_uncorrected_rates(basis, epsilon)
            )
            result[basis] = float(np.dot(p, perr) / total)
        return result


@dataclass
class ErrorReport:
    """Logical error rates of both parities at one (eta, epsilon) point.

    ``pattern_rates`` maps each basis to (availability indices of the
    recovering patterns, their conditional error rates).
    """

    code: GraphCode
    spec: FusionSpec
    epsilon: float
    p_error_xx: float
    p_error_zz: float
    p_error_xx_uncorrected: float
    p_error_zz_uncorrected: float
    pattern_rates: dict = None

    def average_error(self) -> float:
        return 0.5 * (self.p_error_xx + self.p_error_zz)


@lru_cache(maxsize=8)
def _analyzer(code: GraphCode, w: tuple[int, ...], p_fail: float) -> ErrorAnalyzer:
    return ErrorAnalyzer(code, w, p_fail)


def error_analysis(code: GraphCode, spec: FusionSpec, epsilon: float) -> ErrorReport:
    """ML-decoded logical error rates under depolarizing noise."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon out of range: {epsilon}")
    ana = _analyzer(code, tuple(spec.w), spec.p_fail)
    with_corr = ana.rates(spec.eta, epsilon, corrections=True)
    without = ana.rates(spec.eta, epsilon, corrections=False)
    per_pattern = {
        basis: (ana._sides[basis]["idxs"].copy(), ana.pattern_error_rates(basis, epsilon))
        for basis in ("X", "Z")
    }
    return ErrorReport(
        code=code,
        spec=spec,
        epsilon=epsilon,
        p_error_xx=with_corr["X"],
        p_error_zz=with_corr["Z"],
        p_error_xx_uncorrected=without["X"],
        p_error_zz_uncorrected=without["Z"],
        pattern_rates=per_pattern,
    )


# -- failure-basis optimization ----------------------------------------


@dataclass
class OptimizationResult:
    w_star: tuple[int, ...]
    value: float
    report: ErasureReport
    per_w_values: dict[tuple[int, ...], float]


def optimize_failure_bases(code: GraphCode, objective, p_fail: float = 0.5) -> OptimizationResult:
    """Exhaustive scan of all 2^n failure-basis vectors.

    ``objective`` maps an ErasureReport to a scalar to maximize (e.g. a
    loss tolerance).  Ties keep the lowest basis vector read as a binary
    integer, so results are reproducible.
    """
    n = code.n_code
    if n > FUSION_CAP:
        raise ResourceCapExceeded(f"{n} code qubits exceeds cap {FUSION_CAP}")
    best = None
    values = {}
    for w_mask in range(1 << n):
        w = tuple((w_mask >> i) & 1 for i in range(n))
        report = erasure_analysis(code, FusionSpec(eta=1.0, p_fail=p_fail, w=w))
        val = float(objective(report))
        values[w] = val
        if best is None or val > best[0]:
            best = (val, w, report)
    value, w_star, report = best
    return OptimizationResult(w_star=w_star, value=value, report=report, per_w_values=values)


# -- dual-code consistency ---------------------------------------------


def dual_failure_basis(w: tuple[int, ...], swapped_qubit: int) -> tuple[int, ...]:
    """Failure basis seen by the dual code: flip the bit at the pivot qubit."""
    return tuple((1 - b) if i == swapped_qubit else b for i, b in enumerate(w))


def validate_dual_swap(code: GraphCode, dual: GraphCode, swapped_qubit: int, p_fail=Fraction(1, 2)) -> bool:
    """Check the exact polynomial swap p_xx <-> p_zz for every basis."""
    n = code.n_code
    table = fusion_table(code)
    dual_table = fusion_table(dual)
    for w_mask in range(1 << n):
        dual_mask = w_mask ^ (1 << swapped_qubit)
        xx = table.success_polynomial("X", w_mask).eta2_coeffs(p_fail)
        zz = table.success_polynomial("Z", w_mask).eta2_coeffs(p_fail)
        if dual_table.success_polynomial("Z", dual_mask).eta2_coeffs(p_fail) != xx:
            return False
        if dual_table.success_polynomial("X", dual_mask).eta2_coeffs(p_fail) != zz:
            return False
    return True
