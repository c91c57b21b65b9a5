"""Algebras for the state monad: law checking, morphisms, and classification.

An algebra is a carrier X with a structure map ``h: TX -> X`` satisfying the
unit law (``h`` retracts the unit) and the associativity law (``h . T(h) =
h . mult``).  The classifier enumerates every structure map on a given
carrier by three independent routes:

``brute``
    walk every table ``TX -> X`` and keep the ones passing the laws;
``constrained``
    fix the table on the unit image, then depth-first search with eager
    propagation of associativity instances (complete: returns exactly the
    brute-force set whenever brute force is feasible);
``transport``
    conjugate the function-space structure along every bijection from the
    carrier to a function space of matching size (an oracle independent of
    any search).

Search work is bounded by an explicit ceiling; exceeding it raises
:class:`SearchCeilingExceeded`, never a silent truncation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

from .finset import FinSet, FinSetError, Morphism, evaluation, exp_map
from .statemonad import StateMonadCtx

DEFAULT_SEARCH_CEILING = 10**7

#: Associativity domains up to this size are checked exhaustively.
DEFAULT_ASSOC_LIMIT = 20_000_000

_SCALAR_ASSOC_LIMIT = 1 << 16


class SearchCeilingExceeded(RuntimeError):
    """The configured search ceiling would be exceeded; nothing was computed."""


@dataclass(eq=False)
class TAlgebra:
    """A validated algebra: carrier X plus structure map ``TX -> X``.

    ``checked`` records how associativity was verified: ``"full"`` for an
    exhaustive scan, ``"sampled"`` when the instance space was too large and
    a seeded sample was used instead.
    """

    ctx: StateMonadCtx
    carrier: FinSet
    structure: Morphism
    checked: str = "full"

    def key(self) -> tuple:
        return (self.ctx.state.size, self.carrier.size, self.structure.table)

    def __repr__(self) -> str:
        return (
            f"TAlgebra(s={self.ctx.state.size}, x={self.carrier.size}, "
            f"h={list(self.structure.table) if len(self.structure.table) <= 32 else '...'})"
        )


@dataclass(frozen=True)
class AlgebraViolation:
    """A failed algebra law, with a witness element.

    For the unit law the witness is a carrier element; for associativity it
    is a code in TTX where the two evaluation orders disagree.
    """

    law: str
    witness: int
    lhs: int
    rhs: int

    def __str__(self) -> str:
        return f"{self.law} law fails at {self.witness}: {self.lhs} != {self.rhs}"


@dataclass(eq=False)
class AlgebraMorphism:
    source: TAlgebra
    target: TAlgebra
    map: Morphism


def _structure_tools(ctx: StateMonadCtx, x: FinSet):
    """Shared per-carrier data: sizes, digit table, powers, state combos."""
    s = ctx.state.size
    xn = x.size
    pair_sx = s * xn
    m = ctx.t_obj(x).size
    pe = [
        [(t // pair_sx**c) % pair_sx for t in range(m)] if pair_sx else []
        for c in range(s)
    ]
    pows = [pair_sx**i for i in range(s)]
    ccombos = list(product(range(s), repeat=s))
    return s, xn, pair_sx, m, pe, pows, ccombos


def check_algebra(
    ctx: StateMonadCtx,
    carrier: FinSet | int,
    structure: Morphism,
    *,
    assoc_limit: int = DEFAULT_ASSOC_LIMIT,
    samples: int = 4096,
    seed: int = 0,
) -> TAlgebra | AlgebraViolation:
    """Validate a structure map, returning the algebra or the first broken law.

    The unit law is always checked exhaustively.  Associativity is checked
    exhaustively while the instance space TTX fits under ``assoc_limit`` and
    on a seeded random sample beyond that (recorded on the result).
    """
    carrier = carrier if isinstance(carrier, FinSet) else FinSet(carrier)
    tx = ctx.t_obj(carrier)
    if structure.dom != tx or structure.cod != carrier:
        raise FinSetError(
            f"structure map must be {tx.size} -> {carrier.size}, "
            f"got {structure.dom.size} -> {structure.cod.size}"
        )
    h = structure.table
    for v in range(carrier.size):
        image = h[ctx.unit_at(carrier, v)]
        if image != v:
            return AlgebraViolation("unit", v, image, v)

    s = ctx.state.size
    ttx_size = (s * tx.size) ** s if s else 1
    if ttx_size <= assoc_limit:
        witness = _assoc_witness_full(ctx, carrier, h)
        checked = "full"
    else:
        witness = _assoc_witness_sampled(ctx, carrier, h, samples, seed)
        checked = "sampled"
    if witness is not None:
        w, lhs, rhs = witness
        return AlgebraViolation("associativity", w, lhs, rhs)
    return TAlgebra(ctx, carrier, structure, checked=checked)


def _assoc_witness_full(ctx, x: FinSet, h) -> tuple[int, int, int] | None:
    s = ctx.state.size
    if s == 0:
        return None
    tx_size = ctx.t_obj(x).size
    ttx_size = (s * tx_size) ** s
    if ttx_size > _SCALAR_ASSOC_LIMIT:
        from . import _bulk

        w = _bulk.algebra_assoc_scan(ctx, x, h)
        if w is None:
            return None
        lhs, rhs = _assoc_point(ctx, x, h, w)
        return (w, lhs, rhs)
    for w in range(ttx_size):
        lhs, rhs = _assoc_point(ctx, x, h, w)
        if lhs != rhs:
            return (w, lhs, rhs)
    return None


def _assoc_witness_sampled(ctx, x, h, samples, seed):
    s = ctx.state.size
    tx_size = ctx.t_obj(x).size
    ttx_size = (s * tx_size) ** s
    rng = random.Random(seed)
    for _ in range(samples):
        w = rng.randrange(ttx_size)
        lhs, rhs = _assoc_point(ctx, x, h, w)
        if lhs != rhs:
            return (w, lhs, rhs)
    return None


def _assoc_point(ctx, x: FinSet, h, w: int) -> tuple[int, int]:
    """Evaluate both sides of associativity at one TTX code (bigint safe)."""
    s = ctx.state.size
    xn = x.size
    pair_sx = s * xn
    tx_size = ctx.t_obj(x).size
    outer = s * tx_size
    th_code = 0
    p = 1
    rest = w
    for _ in range(s):
        a = rest % outer
        rest //= outer
        c, t = divmod(a, tx_size)
        th_code += (c * xn + h[t]) * p
        p *= pair_sx
    return h[th_code], h[ctx.mult_at(x, w)]


def morphism_witness(u: Morphism, source: TAlgebra, target: TAlgebra) -> int | None:
    """First TX code where ``u . h != h' . T(u)``, or None when none exists."""
    if source.ctx.state != target.ctx.state:
        raise FinSetError("algebra morphism requires a common state object")
    if u.dom != source.carrier or u.cod != target.carrier:
        raise FinSetError(
            f"map must be {source.carrier.size} -> {target.carrier.size}, "
            f"got {u.dom.size} -> {u.cod.size}"
        )
    ctx = source.ctx
    s = ctx.state.size
    h, h2 = source.structure.table, target.structure.table
    tx_size = len(h)
    xn, x2n = source.carrier.size, target.carrier.size
    if tx_size > 1 << 17:
        import numpy as np

        ut = np.asarray(u.table, dtype=np.int64)
        hh = np.asarray(h, dtype=np.int64)
        hh2 = np.asarray(h2, dtype=np.int64)
        w = np.arange(tx_size, dtype=np.int64)
        tu = np.zeros_like(w)
        p = 1
        rest = w.copy()
        for _ in range(s):
            c, v = np.divmod(rest % (s * xn), xn)
            rest //= s * xn
            tu += (c * x2n + ut[v]) * p
            p *= s * x2n
        bad = np.nonzero(ut[hh] != hh2[tu])[0]
        return int(bad[0]) if bad.size else None
    ut = u.table
    for w in range(tx_size):
        tu_code = 0
        p = 1
        rest = w
        for _ in range(s):
            c, v = divmod(rest % (s * xn), xn)
            rest //= s * xn
            tu_code += (c * x2n + ut[v]) * p
            p *= s * x2n
        if ut[h[w]] != h2[tu_code]:
            return w
    return None


def check_morphism(u: Morphism, source: TAlgebra, target: TAlgebra) -> bool:
    return morphism_witness(u, source, target) is None


def algebra_morphism(u: Morphism, source: TAlgebra, target: TAlgebra) -> AlgebraMorphism:
    w = morphism_witness(u, source, target)
    if w is not None:
        raise FinSetError(f"not an algebra morphism: square fails at TX code {w}")
    return AlgebraMorphism(source, target, u)


def free_algebra(ctx: StateMonadCtx, x: FinSet | int) -> TAlgebra:
    """The free algebra on X: carrier TX with the multiplication as structure."""
    x = x if isinstance(x, FinSet) else FinSet(x)
    result = check_algebra(ctx, ctx.t_obj(x), ctx.mult(x))
    if isinstance(result, AlgebraViolation):
        raise AssertionError(f"free algebra failed validation: {result}")
    return result


# ---------------------------------------------------------------------------
# classification


def enumerate_algebras(
    ctx: StateMonadCtx,
    carrier: FinSet | int,
    method: str = "constrained",
    ceiling: int = DEFAULT_SEARCH_CEILING,
) -> list[TAlgebra]:
    """All algebra structures on the carrier, canonically sorted by table.

    Refuses an empty state object: with no states the monad degenerates and
    the classification below (function spaces over S) is meaningless.
    """
    if ctx.state.size == 0:
        raise FinSetError(
            "classification requires a nonempty state object; "
            "see the empty-state diagnostic for what happens without one"
        )
    if ceiling <= 0:
        raise FinSetError(f"ceiling must be positive, got {ceiling}")
    carrier = carrier if isinstance(carrier, FinSet) else FinSet(carrier)
    if method == "brute":
        tables = _enumerate_brute(ctx, carrier, ceiling)
    elif method == "constrained":
        tables = _enumerate_constrained(ctx, carrier, ceiling)
    elif method == "transport":
        tables = _enumerate_transport(ctx, carrier, ceiling)
    else:
        raise FinSetError(f"unknown method {method!r}")
    tx = ctx.t_obj(carrier)
    out = []
    validate = len(tables) * max((ctx.state.size * tx.size) ** ctx.state.size, 1) <= 10**7
    for table in sorted(tables):
        structure = Morphism(tx, carrier, table)
        if validate:
            alg = check_algebra(ctx, carrier, structure)
            if isinstance(alg, AlgebraViolation):
                raise AssertionError(f"enumeration produced a non-algebra: {alg}")
        else:
            alg = TAlgebra(ctx, carrier, structure, checked="search")
        out.append(alg)
    return out


def _enumerate_brute(ctx, x: FinSet, ceiling) -> list[tuple[int, ...]]:
    s, xn, pair_sx, m, pe, pows, ccombos = _structure_tools(ctx, x)
    if xn**m > ceiling:
        raise SearchCeilingExceeded(
            f"brute force needs {xn}**{m} candidates, ceiling is {ceiling}"
        )
    if xn == 0:
        return [()] if m == 0 else []
    template: list[int | None] = [None] * m
    for v in range(xn):
        template[ctx.unit_at(x, v)] = v
    free = [t for t in range(m) if template[t] is None]
    found = []
    cells = list(range(m))
    for combo in product(range(xn), repeat=len(free)):
        h = template[:]
        for t, v in zip(free, combo):
            h[t] = v
        if _assoc_holds(h, s, xn, pair_sx, pe, pows, ccombos, cells):
            found.append(tuple(h))
    return found


def _assoc_holds(h, s, xn, pair_sx, pe, pows, ccombos, cells) -> bool:
    for tup in product(cells, repeat=s):
        vals = [h[t] for t in tup]
        for combo in ccombos:
            lhs = 0
            rhs = 0
            for i in range(s):
                c = combo[i]
                lhs += (c * xn + vals[i]) * pows[i]
                rhs += pe[c][tup[i]] * pows[i]
            if h[lhs] != h[rhs]:
                return False
    return True


class _ConstrainedSearch:
    """Backtracking enumeration with eager propagation.

    The unit law pins the table on the unit image.  Every associativity
    instance, once its premise cells are valued, reduces to an equality
    between two table cells; these are maintained in a union-find with
    per-class values and a trail for rollback.  Instances are generated
    incrementally as cells become valued, so each is processed exactly once
    per search node.
    """

    def __init__(self, ctx: StateMonadCtx, x: FinSet, ceiling: int):
        self.ctx = ctx
        self.x = x
        self.ceiling = ceiling
        (self.s, self.xn, self.pair_sx, self.m, self.pe, self.pows, self.ccombos) = (
            _structure_tools(ctx, x)
        )
        instance_count = (self.m**self.s) * len(self.ccombos)
        if instance_count > ceiling:
            raise SearchCeilingExceeded(
                f"constrained search needs {instance_count} associativity "
                f"instances, ceiling is {ceiling}"
            )
        m = self.m
        self.parent = list(range(m))
        self.members: list[list[int]] = [[t] for t in range(m)]
        self.value: list[int | None] = [None] * m
        self.valued: list[int] = []
        self.processed = 0
        self.trail: list[tuple] = []
        # work counts value assignments tried plus propagation instances
        # processed; the ceiling bounds their sum
        self.work = 0
        self.solutions: list[tuple[int, ...]] = []

    # union-find with rollback (no path compression, union by size)

    def _find(self, c: int) -> int:
        parent = self.parent
        while parent[c] != c:
            c = parent[c]
        return c

    def _assign(self, cell: int, v: int) -> bool:
        r = self._find(cell)
        val = self.value[r]
        if val is not None:
            return val == v
        self.trail.append(("val", r, len(self.valued)))
        self.value[r] = v
        self.valued.extend(self.members[r])
        return True

    def _union(self, a: int, b: int) -> bool:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return True
        va, vb = self.value[ra], self.value[rb]
        if va is not None and vb is not None and va != vb:
            return False
        if len(self.members[ra]) < len(self.members[rb]):
            ra, rb = rb, ra
            va, vb = vb, va
        newly = None
        if va is None and vb is not None:
            newly = list(self.members[ra])
        elif vb is None and va is not None:
            newly = list(self.members[rb])
        self.trail.append(
            ("uni", rb, ra, len(self.members[ra]), va, len(self.valued))
        )
        self.parent[rb] = ra
        self.members[ra].extend(self.members[rb])
        if va is None and vb is not None:
            self.value[ra] = vb
        if newly:
            self.valued.extend(newly)
        return True

    def _rollback(self, mark: int) -> None:
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry[0] == "val":
                _, r, vlen = entry
                self.value[r] = None
                del self.valued[vlen:]
            else:
                _, rb, ra, mlen, old_value, vlen = entry
                self.parent[rb] = rb
                del self.members[ra][mlen:]
                self.value[ra] = old_value
                del self.valued[vlen:]
        self.processed = len(self.valued)

    # propagation

    def _propagate(self) -> bool:
        s, xn, pows, pe, ccombos = self.s, self.xn, self.pows, self.pe, self.ccombos
        while self.processed < len(self.valued):
            cell = self.valued[self.processed]
            prev = self.valued[: self.processed]
            self.processed += 1
            for mask in range(1, 1 << s):
                options = [
                    (cell,) if (mask >> i) & 1 else prev for i in range(s)
                ]
                if any(len(o) == 0 for o in options):
                    continue
                for tup in product(*options):
                    vals = [self.value[self._find(t)] for t in tup]
                    self.work += len(ccombos)
                    if self.work > self.ceiling:
                        raise SearchCeilingExceeded(
                            f"constrained search exceeded {self.ceiling} "
                            f"assignment/propagation steps"
                        )
                    for combo in ccombos:
                        lhs = 0
                        rhs = 0
                        for i in range(s):
                            c = combo[i]
                            lhs += (c * xn + vals[i]) * pows[i]
                            rhs += pe[c][tup[i]] * pows[i]
                        if not self._union(lhs, rhs):
                            return False
        return True

    def run(self) -> list[tuple[int, ...]]:
        if self.xn == 0:
            return [()] if self.m == 0 else []
        for v in range(self.xn):
            if not self._assign(self.ctx.unit_at(self.x, v), v):
                return []
        if not self._propagate():
            return []
        order = self._priority_order()
        self._dfs(order)
        return self.solutions

    def _priority_order(self) -> list[int]:
        ones = sum(self.pows)
        const_state = [
            (s1 * self.xn + v) * ones
            for s1 in range(self.s)
            for v in range(self.xn)
        ]
        seen = set()
        order = []
        for t in const_state + list(range(self.m)):
            if t not in seen:
                seen.add(t)
                order.append(t)
        return order

    def _dfs(self, order: list[int]) -> None:
        cell = next(
            (t for t in order if self.value[self._find(t)] is None), None
        )
        if cell is None:
            h = tuple(self.value[self._find(t)] for t in range(self.m))
            self.solutions.append(h)
            return
        for v in range(self.xn):
            self.work += 1
            if self.work > self.ceiling:
                raise SearchCeilingExceeded(
                    f"constrained search exceeded {self.ceiling} "
                    f"assignment/propagation steps"
                )
            mark = len(self.trail)
            if self._assign(cell, v) and self._propagate():
                self._dfs(order)
            self._rollback(mark)


def _enumerate_constrained(ctx, x: FinSet, ceiling) -> list[tuple[int, ...]]:
    return _ConstrainedSearch(ctx, x, ceiling).run()


def _integer_root(n: int, k: int) -> int | None:
    """The exact k-th root of n, or None when n is not a perfect k-th power."""
    if n == 0:
        return 0
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _enumerate_transport(ctx, x: FinSet, ceiling) -> list[tuple[int, ...]]:
    s = ctx.state.size
    n = x.size
    k = _integer_root(n, s)
    if k is None:
        return []
    m = ctx.t_obj(x).size
    cost = factorial(n) * max(m, 1)
    if cost > ceiling:
        raise SearchCeilingExceeded(
            f"transport needs {factorial(n)} bijections over {m}-entry tables, "
            f"ceiling is {ceiling}"
        )
    y = FinSet(k)
    eps_s = exp_map(evaluation(y, ctx.state), ctx.state).table
    found = set()
    for perm in permutations(range(n)):
        b = Morphism(x, x, perm)
        tb = ctx.t_map(b).table
        inv = [0] * n
        for i, v in enumerate(perm):
            inv[v] = i
        found.add(tuple(inv[eps_s[tb[t]]] for t in range(m)))
    return sorted(found)


# ---------------------------------------------------------------------------
# isomorphism classes


def canonical_structure(alg: TAlgebra, perm_ceiling: int = 10**5) -> tuple[int, ...]:
    """Least structure table over all relabelings of the carrier."""
    n = alg.carrier.size
    if factorial(n) > perm_ceiling:
        raise SearchCeilingExceeded(
            f"canonical form over {factorial(n)} relabelings exceeds {perm_ceiling}"
        )
    ctx = alg.ctx
    h = alg.structure.table
    best = None
    for perm in permutations(range(n)):
        p = Morphism(alg.carrier, alg.carrier, perm)
        inv = [0] * n
        for i, v in enumerate(perm):
            inv[v] = i
        t_inv = ctx.t_map(Morphism(alg.carrier, alg.carrier, tuple(inv))).table
        cand = tuple(perm[h[t_inv[w]]] for w in range(len(h)))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def iso_classes(algebras: list[TAlgebra]) -> list[list[TAlgebra]]:
    """Group algebras on a common carrier by relabeling equivalence."""
    buckets: dict[tuple, list[TAlgebra]] = {}
    for alg in algebras:
        buckets.setdefault(canonical_structure(alg), []).append(alg)
    return [buckets[k] for k in sorted(buckets)]


# ---------------------------------------------------------------------------
# serialization


def algebra_to_dict(alg: TAlgebra) -> dict:
    return {
        "s_size": alg.ctx.state.size,
        "x_size": alg.carrier.size,
        "h": list(alg.structure.table),
    }


def algebra_from_dict(d: dict, s0: int | None = None) -> TAlgebra:
    try:
        s_size, x_size, h = d["s_size"], d["x_size"], d["h"]
    except (KeyError, TypeError) as exc:
        raise FinSetError(f"malformed algebra record: {d!r}") from exc
    ctx = StateMonadCtx(s_size, s0)
    carrier = FinSet(x_size)
    structure = Morphism(ctx.t_obj(carrier), carrier, tuple(h))
    result = check_algebra(ctx, carrier, structure)
    if isinstance(result, AlgebraViolation):
        raise FinSetError(f"record does not satisfy the algebra laws: {result}")
    return result


def algebra_dumps(alg: TAlgebra) -> str:
    return json.dumps(algebra_to_dict(alg), sort_keys=True, separators=(",", ":"))
