"""Sign-exact stabilizer tableau for verifying Clifford generation circuits.

Tracks stabilizer generators only (no destabilizers): the circuits
verified here consist of |+> preparations, CZ gates and X measurements
postselected on +1, so measurement updates never need an outcome drawn
from destabilizer bookkeeping.  Signs are carried exactly through the
bit-packed Pauli arithmetic, which makes the final comparison an exact
state-equality check rather than an up-to-local-Clifford one.
"""

from __future__ import annotations

from .pauli import PauliOperator, multiply


class BranchImpossible(RuntimeError):
    """The forced +1 measurement branch has zero probability."""


class StabilizerTableau:
    """n commuting generators with exact signs, one per wire."""

    def __init__(self, n: int):
        self.n = n
        self.rows = [PauliOperator.single(n, i, "X") for i in range(n)]  # all wires |+>

    @staticmethod
    def graph_state(n: int, edges) -> "StabilizerTableau":
        tab = StabilizerTableau(n)
        adj = [0] * n
        for u, v in edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        tab.rows = [PauliOperator(n, 1 << i, adj[i], 0) for i in range(n)]
        return tab

    def cz(self, a: int, b: int) -> None:
        """Conjugate every generator by CZ(a, b).

        X_a -> X_a Z_b and X_b -> X_b Z_a; a generator picks up a sign
        when both X components are present and exactly one Z is (the
        XX <-> YY exchange)."""
        if a == b:
            raise ValueError("CZ needs two distinct wires")
        new_rows = []
        for row in self.rows:
            xa = (row.x_bits >> a) & 1
            xb = (row.x_bits >> b) & 1
            za = (row.z_bits >> a) & 1
            zb = (row.z_bits >> b) & 1
            z = row.z_bits ^ (xa << b) ^ (xb << a)
            phase = row.phase + (2 if xa and xb and (za ^ zb) else 0)
            new_rows.append(PauliOperator(row.n, row.x_bits, z, phase))
        self.rows = new_rows

    def measure_x_plus(self, wire: int) -> None:
        """Project wire onto X=+1 and update; raises if that branch is null."""
        x_row = PauliOperator.single(self.n, wire, "X")
        anti = [k for k, row in enumerate(self.rows) if (row.z_bits >> wire) & 1]
        if anti:
            pivot = self.rows[anti[0]]
            for k in anti[1:]:
                self.rows[k] = multiply(self.rows[k], pivot)
            self.rows[anti[0]] = x_row
            return
        # outcome already determined: X_wire must be a +1 group element
        basis = {}
        for row in self.rows:
            cur = row
            key = cur.x_bits | (cur.z_bits << self.n)
            while key:
                h = key.bit_length() - 1
                if h in basis:
                    cur = multiply(cur, basis[h])
                    key = cur.x_bits | (cur.z_bits << self.n)
                else:
                    basis[h] = cur
                    break
        goal = x_row
        cur = goal
        key = cur.x_bits | (cur.z_bits << self.n)
        acc = PauliOperator.identity(self.n)
        while key:
            h = key.bit_length() - 1
            if h not in basis:
                raise BranchImpossible(f"X on wire {wire} is not determined")
            acc = multiply(acc, basis[h])
            cur = multiply(cur, basis[h])
            key = cur.x_bits | (cur.z_bits << self.n)
        if acc.x_bits != x_row.x_bits or acc.z_bits != 0:
            raise BranchImpossible(f"cannot reduce X on wire {wire}")
        if acc.sign != 1:
            raise BranchImpossible(f"forced +1 outcome on wire {wire} has zero probability")

    def restricted_rows(self, keep_mask: int) -> list[PauliOperator]:
        """Generators supported inside ``keep_mask`` (other wires must be
        in definite X states with their X rows present)."""
        rows = list(self.rows)
        outside = ~keep_mask
        # clear X components outside the kept wires using their pure-X rows
        pure = {}
        for row in rows:
            if row.z_bits == 0 and row.x_bits.bit_count() == 1 and row.x_bits & outside:
                pure[row.x_bits] = row
        cleaned = []
        for row in rows:
            if row.z_bits == 0 and row.x_bits in pure:
                continue
            cur = row
            rem = cur.x_bits & outside
            while rem:
                bit = rem & -rem
                if bit not in pure:
                    raise ValueError("cannot isolate kept wires")
                cur = multiply(cur, pure[bit])
                rem = cur.x_bits & outside
            if cur.z_bits & outside:
                raise ValueError("kept wires still entangled with dropped wires")
            cleaned.append(cur)
        return cleaned

    @staticmethod
    def canonical(rows: list[PauliOperator]) -> tuple:
        """Unique signed reduced form of a commuting generator list."""
        if not rows:
            return ()
        n = rows[0].n
        basis: dict[int, PauliOperator] = {}
        for row in rows:
            cur = row
            key = cur.x_bits | (cur.z_bits << n)
            while key:
                h = key.bit_length() - 1
                if h in basis:
                    cur = multiply(cur, basis[h])
                    key = cur.x_bits | (cur.z_bits << n)
                else:
                    basis[h] = cur
                    break
        # back-substitute in increasing pivot order so each finished row is
        # free of every other pivot position, giving a unique reduced form
        for h in sorted(basis):
            cur = basis[h]
            for h2 in sorted(basis):
                if h2 >= h:
                    break
                key = cur.x_bits | (cur.z_bits << n)
                if (key >> h2) & 1:
                    cur = multiply(cur, basis[h2])
            basis[h] = cur
        return tuple((p.x_bits, p.z_bits, p.phase) for _, p in sorted(basis.items(), reverse=True))
