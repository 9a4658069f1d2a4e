"""Extraction of well-separated indices with linearly independent values.

Setting: a k x N matrix lam over Q and a map xi from [1, N+k-1] to Q^M.
The vectors v_j in (Q^M)^k have entries lam[i][j] * xi(j+i). Given a rank
lower bound rk(v_1..v_N) > (k+4 delta)(p+q-1) and indices m_1..m_q, we
produce n_1 < ... < n_p with xi(n_1..n_p) independent, pairwise gaps above
delta and distance above delta from every m_j.

All arithmetic is exact. Ranks use fraction-free (Bareiss) elimination on
integer rows.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction


class PreconditionError(ValueError):
    """The rank hypothesis (or another input condition) does not hold."""


class RecursionCapError(RuntimeError):
    """The recursive step exceeded its invocation budget."""


# --------------------------------------------------------------------------
# exact linear algebra


def _integer_row(vec) -> list[int]:
    den = 1
    for x in vec:
        den = math.lcm(den, Fraction(x).denominator)
    return [int(Fraction(x) * den) for x in vec]


def rank_Q(vectors) -> int:
    """Rank over Q of a list of rational vectors (Bareiss elimination)."""
    rows = [_integer_row(v) for v in vectors if any(x != 0 for x in v)]
    if not rows:
        return 0
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("vectors must share one length")
    m = [list(r) for r in rows]
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, len(m)):
            f = m[i][col]
            m[i] = [(p * m[i][j] - f * m[rank][j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == len(m):
            break
    return rank


def _independent(vectors) -> bool:
    return rank_Q(vectors) == len(vectors)


def _in_span(v, basis) -> bool:
    if not any(x != 0 for x in v):
        return True
    return rank_Q(list(basis) + [v]) == rank_Q(basis)


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class ExtractionInstance:
    k: int
    N: int
    M: int
    lam: tuple[tuple[Fraction, ...], ...]  # k rows, N columns
    xi: dict[int, tuple[Fraction, ...]]  # 1..N+k-1 -> Q^M

    def __post_init__(self):
        if self.k < 1 or self.N < 1 or self.M < 1:
            raise ValueError("k, N, M must be positive")
        if len(self.lam) != self.k or any(len(row) != self.N for row in self.lam):
            raise ValueError("lam must be a k x N matrix")
        want = set(range(1, self.N + self.k))
        if set(self.xi) != want:
            raise ValueError(f"xi must be defined exactly on 1..{self.N + self.k - 1}")
        if any(len(v) != self.M for v in self.xi.values()):
            raise ValueError(f"xi values must lie in Q^{self.M}")

    @property
    def top(self) -> int:
        return self.N + self.k - 1

    def to_json(self) -> dict:
        from .report import rational_json

        return {
            "k": self.k,
            "N": self.N,
            "M": self.M,
            "lambda": [[rational_json(x) for x in row] for row in self.lam],
            "xi": {str(n): [rational_json(x) for x in v] for n, v in sorted(self.xi.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExtractionInstance":
        from .report import rational_from_json

        def rat(x):
            return rational_from_json(x) if isinstance(x, dict) else Fraction(x)

        return cls(
            int(obj["k"]),
            int(obj["N"]),
            int(obj["M"]),
            tuple(tuple(rat(x) for x in row) for row in obj["lambda"]),
            {int(n): tuple(rat(x) for x in v) for n, v in obj["xi"].items()},
        )


def make_instance(lam, xi) -> ExtractionInstance:
    lam = tuple(tuple(Fraction(x) for x in row) for row in lam)
    xi = {int(n): tuple(Fraction(x) for x in v) for n, v in xi.items()}
    M = len(next(iter(xi.values())))
    return ExtractionInstance(len(lam), len(lam[0]), M, lam, xi)


def zeta_shaped_instance(k: int, N: int) -> ExtractionInstance:
    """lam[i][s] = binom(2s+2i-2, 2i-2) with xi(n) the n-th standard basis vector."""
    M = N + k - 1
    lam = [[math.comb(2 * s + 2 * i - 2, 2 * i - 2) for s in range(1, N + 1)] for i in range(1, k + 1)]
    xi = {n: tuple(Fraction(int(j == n - 1)) for j in range(M)) for n in range(1, M + 1)}
    return make_instance(lam, xi)


@dataclass(frozen=True)
class SpreadRequest:
    delta: Fraction
    p: int
    m: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if self.delta < 0 or self.p < 0:
            raise ValueError("delta and p must be non-negative")

    @property
    def q(self) -> int:
        return len(self.m)

    def to_json(self) -> dict:
        from .report import rational_json

        return {"delta": rational_json(self.delta), "p": self.p, "q": self.q, "m": list(self.m)}

    @classmethod
    def from_json(cls, obj: dict) -> "SpreadRequest":
        from .report import rational_from_json

        d = obj["delta"]
        delta = rational_from_json(d) if isinstance(d, dict) else Fraction(d)
        m = tuple(obj.get("m", ()))
        if "q" in obj and int(obj["q"]) != len(m):
            raise ValueError("q does not match the number of m indices")
        return cls(delta, int(obj["p"]), m)


def build_vectors(inst: ExtractionInstance) -> list[list[tuple[Fraction, ...]]]:
    """v_j as a list of k blocks, block i being lam[i][j] * xi(j+i)."""
    out = []
    for j in range(1, inst.N + 1):
        blocks = []
        for i in range(1, inst.k + 1):
            n = j + i - 1
            if not 1 <= n <= inst.top:
                raise IndexError(f"xi index {n} out of range")
            c = inst.lam[i - 1][j - 1]
            blocks.append(tuple(c * x for x in inst.xi[n]))
        out.append(blocks)
    return out


def _flat(blocks) -> list[Fraction]:
    return [x for b in blocks for x in b]


def family_rank(inst: ExtractionInstance) -> int:
    return rank_Q([_flat(v) for v in build_vectors(inst)])


def rank_threshold(k: int, delta: Fraction, p: int, q: int) -> Fraction:
    return (k + 4 * Fraction(delta)) * (p + q - 1)


# --------------------------------------------------------------------------
# the extraction


@dataclass
class _State:
    inst: ExtractionInstance
    delta: Fraction
    budget: int
    calls: int = 0
    trace: list = field(default_factory=list)

    def xi(self, n):
        return self.inst.xi[n]

    def vecs(self, ns):
        return [self.inst.xi[n] for n in ns]


def _inside(n: int, intervals) -> bool:
    return any(R <= n <= S for R, S in intervals)


def _step(st: _State, ns: list[int], intervals: list[tuple[Fraction, Fraction]]) -> list[int]:
    """One recursive step: p separated independent indices become p+1."""
    st.calls += 1
    if st.calls > st.budget:
        raise RecursionCapError(f"more than {st.budget} recursive steps")
    inst, delta, k = st.inst, st.delta, st.inst.k
    p = len(ns)
    allowed = [n for n in range(1, inst.top + 1) if not _inside(n, intervals)]
    # starting points j of v_j whose entries all lie in allowed indices
    shrunk = [(R - k + 1, S) for R, S in intervals]
    starts = [j for j in range(1, inst.N + 1) if not _inside(j, shrunk)]

    if p == 0:
        for j in starts:
            for i in range(1, k + 1):
                n = j + i - 1
                if inst.lam[i - 1][j - 1] != 0 and any(x != 0 for x in st.xi(n)):
                    st.trace.append(("base", n))
                    return [n]
        raise PreconditionError("no nonzero vector outside the excluded intervals")

    span = st.vecs(ns)
    far = [n for n in allowed if all(abs(n - m) > delta for m in ns)]
    for n in far:
        if not _in_span(st.xi(n), span):
            st.trace.append(("outside-span", n))
            return ns + [n]

    s = None
    for j in starts:
        for i in range(1, k + 1):
            n = j + i - 1
            if inst.lam[i - 1][j - 1] != 0 and not _in_span(st.xi(n), span):
                s = n
                break
        if s is not None:
            break
    if s is None:
        raise PreconditionError("rank hypothesis fails inside the recursion")
    close = [i for i, n in enumerate(ns) if abs(s - n) <= delta]
    if not close:  # cannot happen: s would lie in the outside-span set
        raise AssertionError("witness is far from every chosen index")

    if len(close) == 1:
        i1 = close[0]
        n1 = ns[i1]
        rest = ns[:i1] + ns[i1 + 1:]
        new = (min(s, n1) - delta, max(s, n1) + delta)
        st.trace.append(("case1", s, n1))
        got = _step(st, rest, intervals + [new])
        if _independent(st.vecs(got + [n1])):
            return got + [n1]
        if not _independent(st.vecs(got + [s])):
            raise AssertionError("neither n1 nor s completes the family")
        return got + [s]

    n1, n2 = sorted((ns[close[0]], ns[close[1]]))
    rest = [n for n in ns if n not in (n1, n2)]
    new = (n1 - delta, n2 + delta)
    first = _step(st, rest, intervals + [new])
    second = _step(st, first, intervals + [new])
    d = 2 + len(second) - rank_Q(st.vecs([n1, n2] + second))
    st.trace.append(("case2", s, n1, n2, d))
    if d == 0:
        return [n1, n2] + first
    if d == 1:
        for keep, other in ((n2, n1), (n1, n2)):
            fam = st.vecs([keep] + second)
            if _independent(fam) and _in_span(st.xi(other), fam):
                return [keep] + second
        raise AssertionError("d = 1 but neither index completes the family")
    return second + [s]


def _check_request(inst: ExtractionInstance, req: SpreadRequest) -> None:
    for m in req.m:
        if not 1 <= m <= inst.top:
            raise PreconditionError(f"m index {m} outside [1, {inst.top}]")


def extract(inst: ExtractionInstance, req: SpreadRequest, trace: list | None = None) -> list[int]:
    """Indices n_1 < ... < n_p meeting the independence and spacing conditions."""
    _check_request(inst, req)
    rk = family_rank(inst)
    need = rank_threshold(inst.k, req.delta, req.p, req.q)
    if not rk > need:
        raise PreconditionError(f"rank {rk} is not above (k+4 delta)(p+q-1) = {need}")
    if req.p == 0:
        return []
    delta = req.delta
    if delta < 1:
        # integers: |x - y| > delta <=> x != y, so the counting argument applies
        banned = set(req.m)
        chosen: list[int] = []
        for n in range(1, inst.top + 1):
            if n in banned:
                continue
            cand = chosen + [n]
            if _independent([inst.xi[x] for x in cand]):
                chosen = cand
                if len(chosen) == req.p:
                    break
        if len(chosen) < req.p:
            raise AssertionError("counting argument failed to find enough indices")
        if trace is not None:
            trace.append(("direct", tuple(chosen)))
        return sorted(chosen)
    top = inst.top
    intervals = [(max(Fraction(1), m - delta), min(Fraction(top), m + delta)) for m in req.m]
    budget = (req.p + req.q + 1) * (inst.N + inst.k)
    st = _State(inst, delta, budget)
    ns: list[int] = []
    for _ in range(req.p):
        ns = _step(st, ns, intervals)
    if trace is not None:
        trace.extend(st.trace)
    return sorted(ns)


def extend(inst: ExtractionInstance, delta, ns, intervals=()) -> list[int]:
    """Run the recursive step once: from p admissible indices to p+1.

    ns must be independent, pairwise more than delta apart and outside the
    excluded intervals; requires delta >= 1 and rank > (k+4 delta)(p+q).
    """
    delta = Fraction(delta)
    if delta < 1:
        raise ValueError("the recursive step needs delta >= 1")
    intervals = [(Fraction(R), Fraction(S)) for R, S in intervals]
    ns = list(ns)
    need = rank_threshold(inst.k, delta, len(ns) + 1, len(intervals))
    if not family_rank(inst) > need:
        raise PreconditionError(f"rank is not above {need}")
    if not _independent([inst.xi[n] for n in ns]) or any(_inside(n, intervals) for n in ns):
        raise PreconditionError("starting indices are not admissible")
    if any(abs(x - y) <= delta for x, y in itertools.combinations(ns, 2)):
        raise PreconditionError("starting indices are not separated")
    st = _State(inst, delta, (len(ns) + len(intervals) + 2) * (inst.N + inst.k))
    out = _step(st, ns, intervals)
    return out


def certify(inst: ExtractionInstance, req: SpreadRequest, result) -> bool:
    if result is None or len(result) != req.p:
        return False
    if len(set(result)) != len(result):
        return False
    if any(not 1 <= n <= inst.top for n in result):
        return False
    if any(abs(x - y) <= req.delta for x, y in itertools.combinations(result, 2)):
        return False
    if any(abs(n - m) <= req.delta for n in result for m in req.m):
        return False
    return _independent([inst.xi[n] for n in result])


BRUTE_FORCE_CAP = 18


def brute_force(inst: ExtractionInstance, req: SpreadRequest) -> list[int] | None:
    """Lexicographically first admissible p-subset, or None."""
    if inst.top > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force limited to N+k-1 <= {BRUTE_FORCE_CAP}")
    _check_request(inst, req)
    allowed = [n for n in range(1, inst.top + 1) if all(abs(n - m) > req.delta for m in req.m)]

    def grow(chosen, start):
        if len(chosen) == req.p:
            return list(chosen)
        for idx in range(start, len(allowed)):
            n = allowed[idx]
            if chosen and n - chosen[-1] <= req.delta:
                continue
            cand = chosen + [n]
            if not _independent([inst.xi[x] for x in cand]):
                continue
            got = grow(cand, idx + 1)
            if got is not None:
                return got
        return None

    return grow([], 0)


# --------------------------------------------------------------------------
# random corpus


def random_instance(rng, k_max: int = 3, N_max: int = 12, M_max: int = 8) -> ExtractionInstance:
    """Small instance with planted dependencies: zero values and values from a low-rank pool."""
    k = rng.randint(1, k_max)
    N = rng.randint(1, N_max)
    M = rng.randint(1, M_max)
    pool = [[rng.randint(-3, 3) for _ in range(M)] for _ in range(rng.randint(1, M))]
    xi = {}
    for n in range(1, N + k):
        u = rng.random()
        if u < 0.15:
            v = [0] * M
        elif u < 0.5:
            w = [rng.randint(-2, 2) for _ in pool]
            v = [sum(c * row[j] for c, row in zip(w, pool)) for j in range(M)]
        else:
            v = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(M)]
        xi[n] = v
    lam = [[rng.choice((0, 1, 2, -1, 3)) for _ in range(N)] for _ in range(k)]
    return make_instance(lam, xi)


def random_request(rng, inst: ExtractionInstance, violate: float = 0.2) -> SpreadRequest:
    """Largest p allowed by the rank bound, or one more with probability ``violate``."""
    delta = rng.choice((Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)))
    q = rng.choice((0, 1, 2))
    m = tuple(rng.randint(1, inst.top) for _ in range(q))
    rk = family_rank(inst)
    p = 0
    while rk > rank_threshold(inst.k, delta, p + 1, q):
        p += 1
    if rng.random() < violate:
        p += 1
    return SpreadRequest(delta, p, m)
