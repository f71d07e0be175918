"""Exact n-qubit Pauli algebra in bit-packed symplectic form.

Operators are stored as two integers whose bit ``i`` gives the X / Z
component on qubit ``i`` (X = (1,0), Z = (0,1), Y = (1,1) with the
Hermitian convention Y = iXZ).  The global phase of every operator used
by the code constructions is real (+1 or -1); intermediate products may
pick up a factor of +/-i, which is carried internally as a power of i so
that multiplication stays exactly associative, e.g. (XZ)^2 = -I.
Asking for the ``sign`` of an operator whose phase is imaginary raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations


class DimensionMismatch(ValueError):
    """Two operators act on different qubit counts."""


class ResourceCapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""


_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_CHAR = {v: k for k, v in _CHAR_TO_BITS.items()}


@dataclass(frozen=True)
class PauliOperator:
    """Signed n-qubit Pauli string.

    ``phase`` is the exponent k of the global factor i^k (mod 4).  All
    stabilizers and logical operators handled here have k in {0, 2},
    i.e. sign +1 or -1.
    """

    n: int
    x_bits: int
    z_bits: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative qubit count")
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("component bits outside qubit range")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors ------------------------------------------------

    @staticmethod
    def identity(n: int) -> "PauliOperator":
        return PauliOperator(n, 0, 0, 0)

    @staticmethod
    def single(n: int, qubit: int, kind: str, sign: int = 1) -> "PauliOperator":
        """One non-identity letter ``kind`` in {X, Y, Z} on ``qubit``."""
        x, z = _CHAR_TO_BITS[kind]
        return PauliOperator(n, x << qubit, z << qubit, 0 if sign == 1 else 2)

    @staticmethod
    def from_string(text: str) -> "PauliOperator":
        """Parse '+XIZ', '-Y Y', 'XZ' (optional sign, optional spaces).

        Leftmost letter is qubit 0.
        """
        s = text.strip().replace(" ", "")
        phase = 0
        if s and s[0] in "+-":
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
        if not s:
            raise ValueError(f"empty Pauli string: {text!r}")
        x = z = 0
        for i, ch in enumerate(s):
            try:
                xb, zb = _CHAR_TO_BITS[ch.upper()]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}") from None
            x |= xb << i
            z |= zb << i
        return PauliOperator(len(s), x, z, phase)

    # -- basic queries -----------------------------------------------

    @property
    def sign(self) -> int:
        """+1 or -1.  Raises if the phase is imaginary (+/-i)."""
        if self.phase % 2:
            raise ValueError("operator carries an imaginary phase, sign undefined")
        return 1 if self.phase == 0 else -1

    @property
    def support_mask(self) -> int:
        return self.x_bits | self.z_bits

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def letter(self, qubit: int) -> str:
        return _BITS_TO_CHAR[((self.x_bits >> qubit) & 1, (self.z_bits >> qubit) & 1)]

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def to_string(self) -> str:
        sgn = "+" if self.phase == 0 else "-" if self.phase == 2 else ("+i" if self.phase == 1 else "-i")
        return sgn + "".join(self.letter(q) for q in range(self.n))

    def __str__(self):
        return self.to_string()

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x_bits, self.z_bits, self.phase + 2)


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Product ``a * b`` with exact phase bookkeeping.

    Writing each letter canonically as i^(x z) X^x Z^z, the product picks
    up i^g per qubit with
    g = x_a z_a + x_b z_b + 2 z_a x_b - (x_a ^ x_b)(z_a ^ z_b)  (mod 4).
    """
    if a.n != b.n:
        raise DimensionMismatch(f"qubit counts differ: {a.n} vs {b.n}")
    x = a.x_bits ^ b.x_bits
    z = a.z_bits ^ b.z_bits
    g = (
        (a.x_bits & a.z_bits).bit_count()
        + (b.x_bits & b.z_bits).bit_count()
        + 2 * (a.z_bits & b.x_bits).bit_count()
        - (x & z).bit_count()
    )
    return PauliOperator(a.n, x, z, a.phase + b.phase + g)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """True iff the symplectic inner product of a and b is even."""
    if a.n != b.n:
        raise DimensionMismatch(f"qubit counts differ: {a.n} vs {b.n}")
    return ((a.x_bits & b.z_bits).bit_count() + (a.z_bits & b.x_bits).bit_count()) % 2 == 0


def qubitwise_commutes(a: PauliOperator, available_x: int, available_z: int) -> bool:
    """True iff ``a`` is reconstructible qubit by qubit from measured parities.

    ``available_x`` / ``available_z`` are bit masks of the qubits whose X /
    Z parity was recovered.  An X letter needs the X parity, Z needs Z,
    Y needs both; identity letters need nothing.
    """
    return (a.x_bits & ~available_x) == 0 and (a.z_bits & ~available_z) == 0


def gf2_rank(rows: list[int]) -> int:
    """Rank over GF(2) of bit-vector rows."""
    basis: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            h = row.bit_length() - 1
            if h in basis:
                row ^= basis[h]
            else:
                basis[h] = row
                rank += 1
                break
    return rank


def gf2_reduce(rows: list[int]) -> list[int]:
    """Independent basis (one row per leading bit) spanning the given rows."""
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            h = row.bit_length() - 1
            if h in basis:
                row ^= basis[h]
            else:
                basis[h] = row
                break
    return [basis[h] for h in sorted(basis, reverse=True)]


def gf2_in_span(rows: list[int], target: int) -> bool:
    """True iff ``target`` lies in the GF(2) span of ``rows``."""
    for row in gf2_reduce(rows):
        h = row.bit_length() - 1
        if (target >> h) & 1:
            target ^= row
    return target == 0


@dataclass(frozen=True)
class StabilizerGroup:
    """Independent, mutually commuting generators of an abelian Pauli group."""

    n: int
    generators: tuple[PauliOperator, ...]

    def __post_init__(self):
        for g in self.generators:
            if g.n != self.n:
                raise DimensionMismatch("generator qubit count differs from group")
            g.sign  # noqa: B018 - asserts the phase is real
        for a, b in combinations(self.generators, 2):
            if not commutes(a, b):
                raise ValueError(f"generators do not commute: {a} vs {b}")
        rows = [g.x_bits | (g.z_bits << self.n) for g in self.generators]
        if gf2_rank(rows) != len(rows):
            raise ValueError("generators are not independent")

    @property
    def k(self) -> int:
        return len(self.generators)


def enumerate_group(group: StabilizerGroup, cap: int = 20) -> list[PauliOperator]:
    """All 2^k signed elements, ordered by the generator-subset counter.

    Element at index ``s`` is the product of the generators whose bit is
    set in ``s``, so the ordering is reproducible across runs.
    """
    if group.k > cap:
        raise ResourceCapExceeded(f"group has {group.k} generators, cap is {cap}")
    elements = [PauliOperator.identity(group.n)]
    for s in range(1, 1 << group.k):
        low = (s & -s).bit_length() - 1
        elements.append(multiply(elements[s & (s - 1)], group.generators[low]))
    return elements
