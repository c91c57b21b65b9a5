"""The equivalence between finite sets and state-monad algebras, made executable.

One direction sends an object Y to its function algebra: the carrier ``Y^S``
with the exponentiated evaluation as structure map.  The other direction
extracts from any algebra ``(X, h)`` a base object Y, the image of the
reachability map ``h . const: S x X -> X``, together with a surjection
``epi``, an inclusion ``mono``, and the comparison map ``compare: X -> Y^S``
obtained by transposing ``epi``.

The constructions that witness the equivalence are all explicit:

* ``compare_inverse`` builds the two-sided inverse of ``compare`` directly
  from the structure map;
* ``compare_retraction`` builds a left inverse by flattening graphs;
* ``compare_section`` builds a right inverse from any chosen state;
* ``base_iso`` exhibits the base of a function algebra as the original
  object, naturally.

``verify_monadicity`` runs the whole pipeline over every carrier up to a
bound and reports per-check tallies.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .algebra import (
    DEFAULT_SEARCH_CEILING,
    AlgebraViolation,
    AlgebraMorphism,
    SearchCeilingExceeded,
    TAlgebra,
    check_algebra,
    enumerate_algebras,
    morphism_witness,
)
from .finset import (
    ExpCodec,
    FinSet,
    FinSetError,
    Morphism,
    classify,
    compose,
    curry,
    evaluation,
    exp_map,
    factorize,
    hom,
    hom_size,
    identity,
)
from .statemonad import StateMonadCtx


def function_algebra(ctx: StateMonadCtx, y: FinSet | int, validate: bool = True) -> TAlgebra:
    """The algebra of S-indexed functions into Y: carrier ``Y^S``, structure
    map the exponentiated evaluation."""
    y = y if isinstance(y, FinSet) else FinSet(y)
    carrier = ExpCodec(y, ctx.state).obj
    structure = exp_map(evaluation(y, ctx.state), ctx.state)
    if not validate:
        return TAlgebra(ctx, carrier, structure, checked="none")
    result = check_algebra(ctx, carrier, structure)
    if isinstance(result, AlgebraViolation):
        raise AssertionError(f"function algebra failed validation: {result}")
    return result


def function_algebra_map(
    ctx: StateMonadCtx, v: Morphism, validate: bool = True
) -> AlgebraMorphism:
    """The action of the function-algebra construction on a map ``v: Y -> Y'``,
    namely ``v^S``, checked to be an algebra morphism."""
    source = function_algebra(ctx, v.dom, validate=False)
    target = function_algebra(ctx, v.cod, validate=False)
    u = exp_map(v, ctx.state)
    if validate:
        w = morphism_witness(u, source, target)
        if w is not None:
            raise AssertionError(f"exponentiated map broke the morphism square at {w}")
    return AlgebraMorphism(source, target, u)


@dataclass(eq=False)
class BaseData:
    """An algebra with its extracted base object and comparison data.

    ``reach`` is the structure map restricted along the constant embedding;
    its image is the base.  ``mono . epi == reach`` and ``compare`` is the
    transpose of ``epi``.
    """

    algebra: TAlgebra
    base: FinSet
    epi: Morphism
    mono: Morphism
    reach: Morphism
    compare: Morphism


def extract_base(alg: TAlgebra) -> BaseData:
    """Factor the reachability map of an algebra through its image.

    The base collects the values ``h(const(s, x))`` in order of least
    preimage, which makes every downstream construction deterministic.
    """
    ctx = alg.ctx
    x = alg.carrier
    pair = ctx.pair_obj(x)
    reach = compose(alg.structure, ctx.const_map(pair))
    fact = factorize(reach)
    compare = curry(fact.epi, ctx.pair_codec(x))
    return BaseData(
        algebra=alg,
        base=fact.image,
        epi=fact.epi,
        mono=fact.mono,
        reach=reach,
        compare=compare,
    )


def compare_inverse(data: BaseData) -> Morphism:
    """The explicit two-sided inverse ``Y^S -> X`` of the comparison map.

    A function ``y: S -> Y`` is sent to ``h(s -> (s, mono(y(s))))``: its
    values are included back into the carrier, paired with their state, and
    folded by the structure map.
    """
    ctx = data.algebra.ctx
    alg = data.algebra
    xn = alg.carrier.size
    s = ctx.state.size
    yn = data.base.size
    pair_sx = s * xn
    h = alg.structure.table
    mono = data.mono.table
    table = []
    for ycode in range(yn**s):
        code = 0
        p = 1
        rest = ycode
        for si in range(s):
            rest, d = divmod(rest, yn)
            code += (si * xn + mono[d]) * p
            p *= pair_sx
        table.append(h[code])
    return Morphism(ExpCodec(data.base, ctx.state).obj, alg.carrier, tuple(table))


def compare_retraction(data: BaseData) -> Morphism:
    """A left inverse ``Y^S -> X``: include pointwise, take the graph, fold."""
    ctx = data.algebra.ctx
    fold_graph = compose(data.algebra.structure, ctx.graph_map(data.algebra.carrier))
    return compose(fold_graph, exp_map(data.mono, ctx.state))


def epi_section(data: BaseData, s0: int | None = None) -> Morphism:
    """A section ``Y -> S x X`` of the reachability surjection, from a chosen
    state: include, embed as a computation, evaluate at the chosen state."""
    ctx = data.algebra.ctx
    if s0 is None:
        s0 = ctx.s0
    if s0 is None:
        raise FinSetError("a section requires a nonempty state object")
    picked = StateMonadCtx(ctx.state, s0)
    x = data.algebra.carrier
    embed = compose(ctx.unit(x), data.mono)
    return compose(picked.chosen_eval(ctx.pair_obj(x)), embed)


def compare_section(data: BaseData, s0: int | None = None) -> Morphism:
    """A right inverse ``Y^S -> X`` of the comparison map: exponentiate the
    section of the surjection, then fold."""
    ctx = data.algebra.ctx
    sigma = epi_section(data, s0)
    return compose(data.algebra.structure, exp_map(sigma, ctx.state))


@dataclass(frozen=True)
class SectionRetraction:
    """Left and right inverses of a comparison map; the section needs a
    chosen state and is None when the state object is empty."""

    retraction: Morphism
    section: Morphism | None


def section_retraction(data: BaseData, s0: int | None = None) -> SectionRetraction:
    retraction = compare_retraction(data)
    ctx = data.algebra.ctx
    if s0 is None:
        s0 = ctx.s0
    section = compare_section(data, s0) if s0 is not None else None
    return SectionRetraction(retraction=retraction, section=section)


def compare_is_algebra_map(data: BaseData) -> bool:
    """Whether the comparison map is a morphism into the function algebra of
    the base."""
    target = function_algebra(data.algebra.ctx, data.base, validate=False)
    return morphism_witness(data.compare, data.algebra, target) is None


def base_map(u: Morphism, source: BaseData, target: BaseData) -> Morphism:
    """The unique map between bases commuting with the two surjections.

    Well-definedness is checked on the fibers of the source surjection: all
    preimages of a base element must land on one target element.  A fiber
    collision means ``u`` was not an algebra morphism.
    """
    ctx = source.algebra.ctx
    xn = source.algebra.carrier.size
    x2n = target.algebra.carrier.size
    table: list[int | None] = [None] * source.base.size
    for i, yv in enumerate(source.epi.table):
        si, xv = divmod(i, xn)
        image = target.epi.table[si * x2n + u.table[xv]]
        if table[yv] is None:
            table[yv] = image
        elif table[yv] != image:
            raise FinSetError(
                f"fiber collision over base element {yv}: "
                f"{table[yv]} != {image} (map is not an algebra morphism)"
            )
    return Morphism(source.base, target.base, tuple(table))  # type: ignore[arg-type]


def base_iso(ctx: StateMonadCtx, y: FinSet | int, data: BaseData | None = None) -> Morphism:
    """The isomorphism from the base of the function algebra on Y back to Y.

    It is the unique map compatible with both surjections: the extracted
    base element of ``(s, g)`` goes to ``g(s)``.  Requires a nonempty state
    object.
    """
    if ctx.state.size == 0:
        raise FinSetError("the base of a function algebra needs a nonempty state object")
    y = y if isinstance(y, FinSet) else FinSet(y)
    if data is None:
        data = extract_base(function_algebra(ctx, y, validate=False))
    ev = evaluation(y, ctx.state)
    table: list[int | None] = [None] * data.base.size
    for i, z in enumerate(data.epi.table):
        v = ev.table[i]
        if table[z] is None:
            table[z] = v
        elif table[z] != v:
            raise AssertionError(f"base iso not well defined at {z}")
    return Morphism(data.base, y, tuple(table))  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# per-algebra check suite


def check_suite(alg: TAlgebra, s0_values: list[int] | None = None) -> dict[str, bool]:
    """Run every comparison identity on one algebra.

    Returns a name-to-outcome map; all values must be True for a valid
    algebra over a nonempty state object.
    """
    ctx = alg.ctx
    s = ctx.state.size
    x = alg.carrier
    if s0_values is None:
        s0_values = list(range(s))
    data = extract_base(alg)
    id_x = identity(x)
    exp_obj = ExpCodec(data.base, ctx.state).obj
    id_exp = identity(exp_obj)

    out: dict[str, bool] = {}
    out["base_power"] = data.base.size**s == x.size
    inv = compare_inverse(data)
    out["compare_bijection"] = (
        compose(inv, data.compare).table == id_x.table
        and compose(data.compare, inv).table == id_exp.table
    )
    out["compare_algebra_map"] = compare_is_algebra_map(data)
    retr = compare_retraction(data)
    out["retraction_identity"] = compose(retr, data.compare).table == id_x.table
    out["retraction_matches_inverse"] = retr.table == inv.table
    out["transpose_triangle"] = (
        compose(exp_map(data.mono, ctx.state), data.compare).table
        == curry(data.reach, ctx.pair_codec(x)).table
    )
    epi_sections_ok = True
    sections_ok = True
    sections_match = True
    for s0 in s0_values:
        sigma = epi_section(data, s0)
        epi_sections_ok &= compose(data.epi, sigma).table == identity(data.base).table
        big = compare_section(data, s0)
        sections_ok &= compose(data.compare, big).table == id_exp.table
        sections_match &= big.table == inv.table
    out["epi_section_identity"] = epi_sections_ok
    out["section_identity"] = sections_ok
    out["section_matches_inverse"] = sections_match
    return out


# ---------------------------------------------------------------------------
# full verification pipeline


@dataclass
class CheckTally:
    checked: int = 0
    failed: int = 0
    witness: str | None = None

    def record(self, ok: bool, witness: str | None = None) -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.witness is None:
                self.witness = witness


@dataclass
class VerificationReport:
    s_size: int
    max_x: int
    seed: int
    method: str
    carriers: dict[int, dict] = field(default_factory=dict)
    checks: dict[str, CheckTally] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def tally(self, name: str) -> CheckTally:
        return self.checks.setdefault(name, CheckTally())

    @property
    def passed(self) -> bool:
        return all(t.failed == 0 for t in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "s_size": self.s_size,
            "max_x": self.max_x,
            "seed": self.seed,
            "method": self.method,
            "passed": self.passed,
            "carriers": {
                str(x): info for x, info in sorted(self.carriers.items())
            },
            "checks": {
                name: {
                    "checked": t.checked,
                    "failed": t.failed,
                    "witness": t.witness,
                }
                for name, t in sorted(self.checks.items())
            },
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [
            f"state size {self.s_size}, carriers up to {self.max_x}, "
            f"method {self.method}, seed {self.seed}"
        ]
        for x, info in sorted(self.carriers.items()):
            if info.get("guarded"):
                lines.append(f"  carrier {x}: guarded ({info['guarded']})")
            else:
                lines.append(f"  carrier {x}: {info['count']} algebra(s)")
        for name, t in sorted(self.checks.items()):
            status = "ok" if t.failed == 0 else f"FAILED ({t.failed}, e.g. {t.witness})"
            lines.append(f"  {name}: {t.checked} checked, {status}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append("PASSED" if self.passed else "FAILED")
        return "\n".join(lines)


def _sample_maps(rng: random.Random, dom: FinSet, cod: FinSet, count: int):
    if dom.size > 0 and cod.size == 0:
        return
    for _ in range(count):
        table = tuple(rng.randrange(cod.size) for _ in range(dom.size))
        yield Morphism(dom, cod, table)


def _hom_or_sample(rng, dom, cod, limit, count):
    if hom_size(dom, cod) <= limit:
        yield from hom(dom, cod)
    else:
        yield from _sample_maps(rng, dom, cod, count)


def verify_monadicity(
    s_size: int,
    max_x: int,
    *,
    seed: int = 0,
    ceiling: int = DEFAULT_SEARCH_CEILING,
    method: str = "constrained",
    hom_limit: int = 10_000,
    sample_size: int = 100,
) -> VerificationReport:
    """Enumerate algebras on every carrier up to ``max_x`` and verify every
    comparison identity, returning a structured report.

    Raises for an empty state object: the equivalence genuinely fails there
    (see :func:`empty_state_diagnostic` for the demonstration).
    """
    if s_size < 1:
        raise FinSetError(
            "verification requires a nonempty state object: with no states "
            "the comparison with function spaces is not an equivalence "
            "(run the empty-state diagnostic to see the failure)"
        )
    rng = random.Random(seed)
    report = VerificationReport(s_size=s_size, max_x=max_x, seed=seed, method=method)
    ctx = StateMonadCtx(s_size)
    s0_values = list(range(s_size))

    for x_size in range(max_x + 1):
        x = FinSet(x_size)
        report.tally("unit_graph_identity").record(
            ctx.graph_flatten_identity(x), witness=f"x={x_size}"
        )
        report.tally("pairing_decomposition").record(
            ctx.pairing_via_diagonal_identity(x), witness=f"x={x_size}"
        )
        try:
            algebras = enumerate_algebras(ctx, x, method=method, ceiling=ceiling)
        except SearchCeilingExceeded as exc:
            report.carriers[x_size] = {"count": None, "guarded": str(exc)}
            continue
        report.carriers[x_size] = {"count": len(algebras), "guarded": None}
        k = _nth_root_or_none(x_size, s_size)
        if k is not None:
            expected = _count_conjecture(x_size, k)
            report.tally("structure_count_conjecture").record(
                len(algebras) == expected,
                witness=f"x={x_size}: {len(algebras)} != {expected}",
            )
        else:
            report.tally("structure_count_conjecture").record(
                len(algebras) == 0, witness=f"x={x_size}: {len(algebras)} != 0"
            )
        for alg in algebras:
            for name, ok in check_suite(alg, s0_values).items():
                report.tally(name).record(
                    ok, witness=f"x={x_size}, h={list(alg.structure.table)}"
                )

    # function-algebra side
    base_datas: dict[int, BaseData] = {}
    for y_size in range(max_x + 1):
        y = FinSet(y_size)
        if y_size**s_size > max(4096, max_x**s_size):
            report.notes.append(f"function algebra on {y_size} skipped (carrier too large)")
            continue
        ka = function_algebra(ctx, y, validate=True)
        report.tally("function_algebra_valid").record(True, witness=f"y={y_size}")
        if ka.checked != "full":
            report.notes.append(
                f"function algebra on {y_size}: associativity checked by {ka.checked}"
            )
        data = extract_base(ka)
        base_datas[y_size] = data
        report.tally("base_recovery").record(
            data.base.size == y_size,
            witness=f"y={y_size}: base {data.base.size}",
        )
        xi = base_iso(ctx, y, data)
        ok = (
            classify(xi).iso
            and compose(ctx.const_map(y), xi).table == data.mono.table
            and compose(xi, data.epi).table == evaluation(y, ctx.state).table
        )
        report.tally("roundtrip_iso").record(ok, witness=f"y={y_size}")
        constants = set(ctx.const_map(y).table)
        report.tally("constant_image").record(
            set(data.mono.table) == constants, witness=f"y={y_size}"
        )
        for name, ok in check_suite(ka, s0_values).items():
            report.tally(name).record(ok, witness=f"K({y_size})")

    # naturality and functoriality across the function-algebra side
    sizes = sorted(base_datas)
    for y1 in sizes:
        for y2 in sizes:
            d1, d2 = base_datas[y1], base_datas[y2]
            xi1 = base_iso(ctx, FinSet(y1), d1)
            xi2 = base_iso(ctx, FinSet(y2), d2)
            for v in _hom_or_sample(rng, FinSet(y1), FinSet(y2), hom_limit, sample_size):
                u = exp_map(v, ctx.state)
                report.tally("function_algebra_map_valid").record(
                    morphism_witness(u, d1.algebra, d2.algebra) is None,
                    witness=f"v={list(v.table)}: {y1}->{y2}",
                )
                lv = base_map(u, d1, d2)
                report.tally("roundtrip_iso_natural").record(
                    compose(xi2, lv).table == compose(v, xi1).table,
                    witness=f"v={list(v.table)}: {y1}->{y2}",
                )
    for y1 in sizes:
        d1 = base_datas[y1]
        report.tally("base_map_functorial").record(
            base_map(identity(d1.algebra.carrier), d1, d1).table
            == identity(d1.base).table,
            witness=f"id on K({y1})",
        )
    for _ in range(sample_size if sizes else 0):
        y1, y2, y3 = (rng.choice(sizes) for _ in range(3))
        f = _random_map(rng, FinSet(y1), FinSet(y2))
        g = _random_map(rng, FinSet(y2), FinSet(y3))
        if f is None or g is None:
            continue
        d1, d2, d3 = base_datas[y1], base_datas[y2], base_datas[y3]
        lhs = base_map(exp_map(compose(g, f), ctx.state), d1, d3)
        rhs = compose(
            base_map(exp_map(g, ctx.state), d2, d3),
            base_map(exp_map(f, ctx.state), d1, d2),
        )
        report.tally("base_map_functorial").record(
            lhs.table == rhs.table, witness=f"{y1}->{y2}->{y3}"
        )
    report.notes.append(
        "structure counts compared against the relabeling conjecture "
        "x!/k! (verified only at these sizes)"
    )
    return report


def _random_map(rng: random.Random, dom: FinSet, cod: FinSet) -> Morphism | None:
    if dom.size > 0 and cod.size == 0:
        return None
    return Morphism(dom, cod, tuple(rng.randrange(cod.size) for _ in range(dom.size)))


def _nth_root_or_none(n: int, k: int) -> int | None:
    if n == 0:
        return 0
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _count_conjecture(x_size: int, k: int) -> int:
    from math import factorial

    return factorial(x_size) // factorial(k)


def empty_state_diagnostic(max_x: int) -> dict:
    """What goes wrong without states: count structure maps per carrier.

    With an empty state object, TX is a one-point set for every X, so a
    structure map exists only when the unit law can hold, i.e. on one-point
    carriers.  The comparison with function spaces therefore collapses
    everything and cannot be an equivalence.
    """
    ctx = StateMonadCtx(0)
    counts: dict[int, int] = {}
    for x_size in range(max_x + 1):
        x = FinSet(x_size)
        tx = ctx.t_obj(x)
        count = 0
        for h in hom(tx, x):
            if isinstance(check_algebra(ctx, x, h), TAlgebra):
                count += 1
        counts[x_size] = count
    admitting = [x for x, c in counts.items() if c > 0]
    return {
        "s_size": 0,
        "algebra_counts": {str(x): c for x, c in counts.items()},
        "carriers_with_algebras": admitting,
        "essential_surjectivity_fails": any(
            c == 0 for x, c in counts.items() if x != 1
        ),
        "message": (
            "with an empty state object TX is a one-point set for every X; "
            "only one-point carriers admit a structure map, so every carrier "
            "of a different size lies outside the image of the comparison "
            "and the equivalence fails"
        ),
    }
