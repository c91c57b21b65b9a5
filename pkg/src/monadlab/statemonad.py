"""The state monad ``T = (S x -)^S`` over finite sets, for a fixed state object.

A :class:`StateMonadCtx` fixes the state object S and an optional chosen
state ``s0``, and exposes the monad data (object/arrow action, unit,
multiplication) together with the auxiliary natural maps the rest of the
package needs: the graph map ``Z^S -> TZ``, evaluation at the chosen state
``Z^S -> Z``, and the constant-function embedding ``Z -> Z^S``.

Tables are built eagerly for objects of manageable size; the ``*_at``
methods evaluate the same maps at a single point without materializing any
table, which is what the large-object law checks use.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .finset import (
    ExpCodec,
    FinSet,
    FinSetError,
    Morphism,
    ProductCodec,
    compose,
    curry,
    evaluation,
    exp_map,
    identity,
    pairing,
    product_map,
)

#: Above this domain size, exhaustive scans switch to the vectorized kernels.
_VECTOR_THRESHOLD = 1 << 16

#: Largest domain an exhaustive law scan will walk (chunked).
DEFAULT_SCAN_LIMIT = 300_000_000

#: Largest domain for the reduced (transpose-level) associativity scan.
DEFAULT_REDUCED_LIMIT = 20_000_000

#: Sample count for law checks whose exhaustive domain is out of reach.
DEFAULT_SAMPLES = 20_000


@dataclass(frozen=True)
class LawCheck:
    """Outcome of one law check.

    ``mode`` records how the domain was covered: ``"full"`` is an exhaustive
    scan, ``"reduced"`` is an exhaustive scan of a provably equivalent
    smaller identity, ``"sampled"`` is a seeded random sample.  ``witness``
    is a counterexample point when ``ok`` is false.
    """

    law: str
    mode: str
    checked: int
    ok: bool
    witness: int | None = None


class StateMonadCtx:
    """The monad ``TX = (S x X)^S`` with a fixed finite state object S.

    ``s0`` is the chosen global element of S used by the section
    construction; it defaults to 0 when S is nonempty.  Contexts are value
    objects: two contexts with equal state size and ``s0`` behave
    identically.
    """

    def __init__(self, state: FinSet | int, s0: int | None = None):
        self.state = state if isinstance(state, FinSet) else FinSet(state)
        if s0 is None and self.state.size >= 1:
            s0 = 0
        if s0 is not None and not 0 <= s0 < self.state.size:
            raise FinSetError(f"s0={s0} is not an element of a {self.state.size}-state object")
        self.s0 = s0
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"StateMonadCtx(state={self.state.size}, s0={self.s0})"

    # -- encodings ---------------------------------------------------------

    def pair_codec(self, x: FinSet | int) -> ProductCodec:
        x = x if isinstance(x, FinSet) else FinSet(x)
        return ProductCodec(self.state, x)

    def pair_obj(self, x: FinSet | int) -> FinSet:
        return self.pair_codec(x).obj

    def t_codec(self, x: FinSet | int) -> ExpCodec:
        return ExpCodec(self.pair_obj(x), self.state)

    def t_obj(self, x: FinSet | int) -> FinSet:
        """The carrier of ``TX``, of size ``(|S| * |X|) ** |S|``."""
        return self.t_codec(x).obj

    # -- functor and monad structure ----------------------------------------

    def t_map(self, f: Morphism) -> Morphism:
        """``T(f) = (S x f)^S``."""
        return exp_map(product_map(identity(self.state), f), self.state)

    def unit(self, x: FinSet | int) -> Morphism:
        """``X -> TX`` sending ``x`` to the state-passing constant ``s -> (s, x)``."""
        x = x if isinstance(x, FinSet) else FinSet(x)
        key = ("unit", x.size)
        if key not in self._cache:
            n = x.size
            base = self.state.size * n
            table = []
            for v in range(n):
                code = 0
                p = 1
                for s in range(self.state.size):
                    code += (s * n + v) * p
                    p *= base
                table.append(code)
            self._cache[key] = Morphism(x, self.t_obj(x), tuple(table))
        return self._cache[key]

    def unit_at(self, x: FinSet, v: int) -> int:
        n = x.size
        base = self.state.size * n
        code = 0
        p = 1
        for s in range(self.state.size):
            code += (s * n + v) * p
            p *= base
        return code

    def mult(self, x: FinSet | int) -> Morphism:
        """``TTX -> TX`` as the exponentiated evaluation of ``S x X``."""
        x = x if isinstance(x, FinSet) else FinSet(x)
        key = ("mult", x.size)
        if key not in self._cache:
            ev = evaluation(self.pair_obj(x), self.state)
            self._cache[key] = exp_map(ev, self.state)
        return self._cache[key]

    def mult_pointwise(self, x: FinSet | int) -> Morphism:
        """``TTX -> TX`` by the explicit formula: run the outer computation,
        then the inner one from the state it produced.

        Independent of :meth:`mult`; the two are compared table-for-table as
        a codec cross-check.
        """
        x = x if isinstance(x, FinSet) else FinSet(x)
        ttx = self.t_obj(self.t_obj(x))
        table = tuple(self.mult_at(x, w) for w in range(ttx.size))
        return Morphism(ttx, self.t_obj(x), table)

    def mult_at(self, x: FinSet, w: int) -> int:
        """Evaluate the multiplication at a single ``TTX`` code (bigint safe)."""
        tx = self.t_obj(x).size
        pair_sx = self.state.size * x.size
        outer_base = self.state.size * tx
        code = 0
        p = 1
        for s in range(self.state.size):
            a = w % outer_base
            w //= outer_base
            c, t = divmod(a, tx)
            code += ((t // pair_sx**c) % pair_sx) * p
            p *= pair_sx
        return code

    # -- auxiliary natural maps ----------------------------------------------

    def graph_map(self, z: FinSet | int) -> Morphism:
        """``Z^S -> TZ`` pairing every state with the function's value there.

        This is the transpose of the pairing of the projection with
        evaluation; pointwise it sends ``g`` to ``s -> (s, g(s))``.
        """
        z = z if isinstance(z, FinSet) else FinSet(z)
        key = ("graph", z.size)
        if key not in self._cache:
            codec = ProductCodec(self.state, ExpCodec(z, self.state).obj)
            arrow = pairing(codec.proj_left(), evaluation(z, self.state))
            self._cache[key] = curry(arrow, codec)
        return self._cache[key]

    def graph_at(self, z: FinSet, g: int) -> int:
        n = z.size
        base = self.state.size * n
        code = 0
        p = 1
        for s in range(self.state.size):
            g, d = divmod(g, n)
            code += (s * n + d) * p
            p *= base
        return code

    def const_map(self, z: FinSet | int) -> Morphism:
        """``Z -> Z^S`` sending each element to the constant function on it.

        The transpose of the right projection ``S x Z -> Z``.
        """
        z = z if isinstance(z, FinSet) else FinSet(z)
        key = ("const", z.size)
        if key not in self._cache:
            codec = self.pair_codec(z)
            self._cache[key] = curry(codec.proj_right(), codec)
        return self._cache[key]

    def const_at(self, z: FinSet, v: int) -> int:
        code = 0
        p = 1
        for _ in range(self.state.size):
            code += v * p
            p *= z.size
        return code

    def exp_one_iso(self, a: FinSet | int) -> Morphism:
        """The canonical isomorphism ``A^1 -> A`` (numerically the identity)."""
        a = a if isinstance(a, FinSet) else FinSet(a)
        return Morphism(ExpCodec(a, FinSet(1)).obj, a, tuple(range(a.size)))

    def restrict_to_chosen(self, z: FinSet | int) -> Morphism:
        """``Z^S -> Z^1`` precomposing with the chosen state ``s0``."""
        if self.s0 is None:
            raise FinSetError("no chosen state: the state object is empty")
        z = z if isinstance(z, FinSet) else FinSet(z)
        codec = ExpCodec(z, self.state)
        cod = ExpCodec(z, FinSet(1)).obj
        table = tuple(codec.digit(g, self.s0) for g in range(codec.obj.size))
        return Morphism(codec.obj, cod, table)

    def chosen_eval(self, z: FinSet | int) -> Morphism:
        """``Z^S -> Z`` evaluating a function at the chosen state ``s0``."""
        z = z if isinstance(z, FinSet) else FinSet(z)
        return compose(self.exp_one_iso(z), self.restrict_to_chosen(z))

    def diagonal(self) -> Morphism:
        """``S -> S x S`` duplicating the state."""
        n = self.state.size
        return Morphism(self.state, FinSet(n * n), tuple(s * n + s for s in range(n)))

    # -- structural identities -------------------------------------------------

    def pairing_via_diagonal_identity(self, x: FinSet | int) -> bool:
        """The pairing of the state projection with the constant embedding of
        ``S x X`` equals routing through the diagonal.

        Both sides are maps ``S x X -> S x TX``; their tables are compared.
        """
        x = x if isinstance(x, FinSet) else FinSet(x)
        z = self.pair_obj(x)
        codec = self.pair_codec(x)
        lhs = pairing(codec.proj_left(), self.const_map(z))
        rhs = compose(
            product_map(identity(self.state), self.const_map(z)),
            product_map(self.diagonal(), identity(x)),
        )
        return lhs.table == rhs.table

    def graph_flatten_identity(self, x: FinSet | int) -> bool:
        """Embedding as constants, taking the graph, and flattening is the unit.

        Pointwise over X: ``mult . graph(TX) . transpose(const(S x X))``
        agrees with :meth:`unit`.  Evaluated lazily, so it works even when
        ``T(TX)`` is far too large to tabulate.
        """
        x = x if isinstance(x, FinSet) else FinSet(x)
        tx = self.t_obj(x)
        const = self.const_map(self.pair_obj(x))
        n = x.size
        for v in range(n):
            transposed = 0
            p = 1
            for s in range(self.state.size):
                transposed += const.table[s * n + v] * p
                p *= tx.size
            flattened = self.mult_at(x, self.graph_at(tx, transposed))
            if flattened != self.unit_at(x, v):
                return False
        return True

    # -- law checks --------------------------------------------------------------

    def unit_law_witness(self, x: FinSet | int) -> int | None:
        """First element violating ``mult . unit(TX) = id = mult . T(unit)``."""
        x = x if isinstance(x, FinSet) else FinSet(x)
        tx = self.t_obj(x)
        for t in range(tx.size):
            if self.mult_at(x, self.unit_at(tx, t)) != t:
                return t
        t_unit = self.t_map(self.unit(x))
        for t in range(tx.size):
            if self.mult_at(x, t_unit.table[t]) != t:
                return t
        return None

    def mult_agreement(
        self,
        x: FinSet | int,
        limit: int = DEFAULT_SCAN_LIMIT,
    ) -> LawCheck:
        """Compare the two multiplication implementations over all of TTX."""
        x = x if isinstance(x, FinSet) else FinSet(x)
        ttx = self.t_obj(self.t_obj(x)).size
        if ttx > limit:
            raise FinSetError(
                f"TTX has {ttx} elements, above the scan limit {limit}"
            )
        if ttx > _VECTOR_THRESHOLD:
            from . import _bulk

            witness = _bulk.mult_agreement_scan(self, x)
        else:
            witness = None
            ev = self.mult(x)
            for w in range(ttx):
                if ev.table[w] != self.mult_at(x, w):
                    witness = w
                    break
        return LawCheck("mult_agreement", "full", ttx, witness is None, witness)

    def associativity_check(
        self,
        x: FinSet | int,
        scan_limit: int = DEFAULT_SCAN_LIMIT,
        reduced_limit: int = DEFAULT_REDUCED_LIMIT,
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
    ) -> LawCheck:
        """Check ``mult . T(mult) = mult . mult_T`` on ``TTTX``.

        Covers the domain exhaustively when feasible.  When ``TTTX`` is too
        large but ``S x TTX`` is not, checks the equivalent transposed
        identity on ``S x TTX`` instead (exact: the exponential functor is
        faithful for nonempty S, since it preserves constants).  Beyond
        that, falls back to a seeded random sample.
        """
        x = x if isinstance(x, FinSet) else FinSet(x)
        s = self.state.size
        tx = self.t_obj(x)
        ttx = self.t_obj(tx)
        tttx_size = (s * ttx.size) ** s if s else 1

        if s == 0:
            return LawCheck("associativity", "full", 1, True)

        if tttx_size <= scan_limit:
            if tttx_size > _VECTOR_THRESHOLD:
                from . import _bulk

                witness = _bulk.associativity_scan(self, x)
            else:
                witness = self._assoc_scan_scalar(x, tttx_size)
            return LawCheck("associativity", "full", tttx_size, witness is None, witness)

        if s * ttx.size <= reduced_limit and ttx.size <= reduced_limit:
            witness = self._assoc_scan_reduced(x)
            return LawCheck(
                "associativity", "reduced", s * ttx.size, witness is None, witness
            )

        rng = random.Random(seed)
        for _ in range(samples):
            w = rng.randrange(tttx_size)
            if self._assoc_point(x, w) is not None:
                return LawCheck("associativity", "sampled", samples, False, w)
        return LawCheck("associativity", "sampled", samples, True)

    def _assoc_point(self, x: FinSet, w: int) -> int | None:
        """Return ``w`` when the two flattening orders disagree there."""
        tx = self.t_obj(x)
        ttx = self.t_obj(tx)
        s = self.state.size
        outer = s * ttx.size
        mid = s * tx.size
        lhs_code = 0
        rhs_code = 0
        p = 1
        rest = w
        for _ in range(s):
            a = rest % outer
            rest //= outer
            c, t = divmod(a, ttx.size)
            lhs_code += (c * tx.size + self.mult_at(x, t)) * p
            rhs_code += ((t // mid**c) % mid) * p
            p *= mid
        lhs = self.mult_at(x, lhs_code)
        rhs = self.mult_at(x, rhs_code)
        return None if lhs == rhs else w

    def _assoc_scan_scalar(self, x: FinSet, size: int) -> int | None:
        for w in range(size):
            if self._assoc_point(x, w) is not None:
                return w
        return None

    def _assoc_scan_reduced(self, x: FinSet) -> int | None:
        """Exhaust the transposed identity on ``S x TTX``.

        Both flattening orders arise as ``(-)^S`` of maps ``S x TTX -> S x X``;
        for nonempty S it therefore suffices to compare those maps, i.e. to
        compare ``evaluate twice`` against ``flatten, then evaluate``.
        """
        tx = self.t_obj(x)
        ttx = self.t_obj(tx)
        s = self.state.size
        pair_stx = s * tx.size
        pair_sx = s * x.size
        eps_mid = evaluation(self.pair_obj(x), self.state).table
        outer_pows = [pair_stx**i for i in range(s)]
        inner_pows = [pair_sx**i for i in range(s)]
        for w in range(ttx.size):
            mw = self.mult_at(x, w)
            for si in range(s):
                lhs = eps_mid[(w // outer_pows[si]) % pair_stx]
                rhs = (mw // inner_pows[si]) % pair_sx
                if lhs != rhs:
                    return w
        return None
