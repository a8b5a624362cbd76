"""Shared test utilities: bit-parallel circuit simulation and small program runners."""

from ibmc import semantics as sem
from ibmc.cnf import CnfEncoder
from ibmc.frontend.ast import Type
from ibmc.symex import SsaName, TermFactory

BINARY_OPS = tuple(sem.BINARY)
COMPARE_OPS = tuple(sem.COMPARE)


class RecordingSolver:
    """Just enough of the solver interface to capture an encoding."""

    def __init__(self):
        self.nvars = 0
        self.clauses = []

    def new_var(self):
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits):
        self.clauses.append(list(lits))
        return True

    def mark_activation(self, v):
        pass


def simulate(enc: CnfEncoder, inputs: dict, mask: int) -> list:
    """Value of every variable for a batch of samples packed into ints (bit s = sample s)."""
    gates = {}
    for key, out in enc.g._hash.items():
        gates[out] = key
    vals = [0] * (enc.solver.nvars + 1)

    def lit(x):
        return vals[x] if x > 0 else vals[-x] ^ mask

    for v in range(1, enc.solver.nvars + 1):
        if v == enc.g.T:
            vals[v] = mask
        elif v in gates:
            key = gates[v]
            if key[0] == "and":
                vals[v] = lit(key[1]) & lit(key[2])
            elif key[0] == "xor":
                vals[v] = lit(key[1]) ^ lit(key[2])
            else:
                c, a, b = lit(key[1]), lit(key[2]), lit(key[3])
                vals[v] = (c & a) | ((c ^ mask) & b)
        else:
            vals[v] = inputs.get(v, 0)
    return vals


def clauses_hold(clauses, vals, mask) -> bool:
    for c in clauses:
        acc = 0
        for x in c:
            acc |= vals[x] if x > 0 else vals[-x] ^ mask
        if acc != mask:
            return False
    return True


def pack(values: list, bit: int) -> int:
    """Bit ``bit`` of each sample value, packed."""
    return int("".join("1" if (v >> bit) & 1 else "0" for v in reversed(values)) or "0", 2)


def check_operator(op: str, width: int, signed: bool, pairs: list) -> int:
    """Number of operand pairs where the bit-blasted operator disagrees with ``semantics``."""
    solver = RecordingSolver()
    tf = TermFactory()
    ty = Type("bv", width, signed)
    enc = CnfEncoder(solver, tf)
    a = tf.name(SsaName("a", 0, 0), ty)
    b = tf.name(SsaName("b", 0, 0), ty)
    out = enc.bits(tf.binary(op, a, b))
    n = len(pairs)
    mask = (1 << n) - 1
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    inputs = {}
    for i, v in enumerate(enc.bits(a)):
        inputs[v] = pack(xs, i)
    for i, v in enumerate(enc.bits(b)):
        inputs[v] = pack(ys, i)
    vals = simulate(enc, inputs, mask)
    assert clauses_hold(solver.clauses, vals, mask), f"{op}: simulation violates a clause"
    if op in sem.COMPARE:
        want = [int(sem.COMPARE[op](x, y, width)) for x, y in pairs]
    else:
        want = [sem.BINARY[op](x, y, width) for x, y in pairs]
    bad = 0
    for i, x in enumerate(out):
        word = vals[x] if x > 0 else vals[-x] ^ mask
        bad |= word ^ pack(want, i)
    return bin(bad).count("1")
