"""The free Lévy process on K<d> assembled from increment nets, and checks of its defining properties.

Every check is moment-level at a finite net depth.  Marginals use the exact
net engine and are extrapolated over a dyadic depth schedule; the truncated
matrices only enter the cross-check column of the moment table and the
cyclicity rank.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .fock.moments import net_vacuum_moment
from .fock.nets import generator_increment, truncated_net_moment
from .fock.space import GridSpec
from .functionals import Functional, Letter, Partition, free_product_recursion, merge_adjacent, richardson, tagged_word
from .ncalg import NCPoly, all_monomials, coproduct, counit, mono_str
from .schurmann import SchurmannTriple, psi_extend
from .scalars import EXACT, FLOAT, exact

DEFAULT_TOLERANCES = {
    "marginal": 1e-4,
    "semigroup": 1e-4,
    "increment": 1e-9,
    "freeness": 1e-6,
    "stationarity": 1e-12,
    "continuity": 5e-2,
    "generator": 1e-3,
}

CYCLICITY_NOTE = "finite truncation and degree only; density in the full Fock space is not decided"


class Estimate(NamedTuple):
    value: complex
    error: float
    provenance: str


@dataclass(frozen=True)
class LevyConfig:
    triple: SchurmannTriple
    grid: GridSpec
    depths: tuple = (4, 5, 6)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    mode: str = EXACT

    def __post_init__(self):
        t = self.triple
        for g, rho in t.rho_gen.items():
            dl = t.delta((g,))
            if any(rho[i][j] != (dl if i == j else 0) for i in range(t.D) for j in range(t.D)):
                raise ValueError(f"rho({g}) must equal δ({g})·id for the increment construction")
        if not self.depths:
            raise ValueError("depth schedule must be nonempty")
        object.__setattr__(self, "depths", tuple(sorted(self.depths)))
        object.__setattr__(self, "tolerances", {**DEFAULT_TOLERANCES, **self.tolerances})

    @property
    def dsg(self):
        return self.triple.dsg

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])


@dataclass
class DefectReport:
    name: str
    samples: list
    max_defect: float
    tolerance: float
    details: list = field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        # strict: a zero tolerance is never met, even by an exact zero
        return self.max_defect < self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": list(self.samples),
            "max_defect": self.max_defect,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
            "note": self.note,
        }


def _poly(cfg: LevyConfig, b) -> NCPoly:
    if isinstance(b, NCPoly):
        return b.to_float() if cfg.mode == FLOAT and b.mode != FLOAT else b
    return NCPoly.monomial(tuple(b), 1, cfg.dsg, cfg.mode)


def _cast(cfg: LevyConfig, v):
    return complex(v) if cfg.mode == FLOAT else v


def _diff(a, b) -> float:
    d = a - b
    return 0.0 if not d else abs(complex(d))


def net_moment(cfg: LevyConfig, letters: Sequence[tuple]) -> object:
    """``Φ(f_{α_1}(b_1) ⋯ f_{α_k}(b_k))`` at the given partitions (exact net engine)."""
    return net_vacuum_moment(cfg.triple, [(_poly(cfg, b), a) for b, a in letters], cfg.mode)


def tagged_moment(cfg: LevyConfig, p: NCPoly, alphas: dict):
    """Vacuum moment of a tagged polynomial with copy ``i`` realized by the net over ``alphas[i]``."""
    total = _cast(cfg, exact(0))
    for m, c in p.items():
        letters = [(NCPoly.monomial((g.with_tag(1),), 1, cfg.dsg), alphas[g.tag]) for g in m]
        v = net_moment(cfg, letters) if letters else _cast(cfg, exact(1))
        total = total + _cast(cfg, c) * v
    return total


def default_samples(d: int, max_degree: int | None = None) -> list[tuple]:
    """Nonempty monomials of degree ≤ 3 (d = 1) or ≤ 2 (d ≥ 2)."""
    from .ncalg import KD

    if max_degree is None:
        max_degree = 3 if d == 1 else 2
    return all_monomials(KD(d), max_degree, min_degree=1)


# ----------------------------------------------------------------------------
# marginals


def marginal(cfg: LevyConfig, t, b, depths: Sequence[int] | None = None) -> Estimate:
    """``φ_t(b) = Φ(f_{0,t}(b))`` extrapolated over dyadic depths; error is the last residual."""
    t = Fraction(t)
    p = _poly(cfg, b)
    if t == 0:
        return Estimate(complex(counit(cfg.dsg, p)), 0.0, "exact")
    depths = tuple(depths or cfg.depths)
    values = [complex(net_moment(cfg, [(p, Partition.dyadic(0, t, j))])) for j in depths]
    if len(values) == 1:
        return Estimate(values[0], math.inf, "exact-net")
    return Estimate(richardson(values), abs(values[-1] - values[-2]), "extrapolated")


def closed_form_generator_marginal(triple: SchurmannTriple, t) -> np.ndarray:
    """``exp(t M)`` with ``M_{kl} = Ψ(x_{kl})``: the limit of the path sum for generators."""
    from scipy.linalg import expm

    d = triple.dsg.d
    M = np.array([[complex(triple.psi_gen[triple.dsg.sym(k, l)]) for l in range(1, d + 1)] for k in range(1, d + 1)])
    return expm(float(t) * M)


@dataclass
class MomentTable:
    """``(monomial, (r, s)) -> Estimate``."""

    entries: dict = field(default_factory=dict)

    def put(self, m: tuple, interval: tuple, est: Estimate):
        if not m and abs(est.value - 1) > 0:
            raise ValueError("the unit must have moment 1")
        self.entries[(tuple(m), tuple(Fraction(x) for x in interval))] = est

    def get(self, m: tuple, interval: tuple) -> Estimate:
        return self.entries[(tuple(m), tuple(Fraction(x) for x in interval))]

    def keys(self):
        return self.entries.keys()

    def max_difference(self, other: MomentTable) -> tuple[float, float]:
        """Largest value gap over shared keys and the largest combined error bar there."""
        gap = bars = 0.0
        for key in self.entries.keys() & other.entries.keys():
            a, b = self.entries[key], other.entries[key]
            gap = max(gap, abs(a.value - b.value))
            bars = max(bars, a.error + b.error)
        return gap, bars


def moment_table(cfg: LevyConfig, monomials: Sequence[tuple], intervals: Sequence[tuple]) -> MomentTable:
    """Moments of ``f_{r,s}`` through stationarity: ``Φ∘f_{r,s} = φ_{s−r}``."""
    table = MomentTable()
    for r, s in intervals:
        for m in monomials:
            if not m:
                table.put((), (r, s), Estimate(1.0, 0.0, "exact"))
            else:
                table.put(m, (r, s), marginal(cfg, Fraction(s) - Fraction(r), m))
    return table


def stochastically_equivalent(a: MomentTable, b: MomentTable, tol: float) -> bool:
    gap, bars = a.max_difference(b)
    return gap <= bars + tol


def semigroup_defect(cfg: LevyConfig, s, t, samples: Sequence[tuple]) -> DefectReport:
    """``(φ_s ⊎ φ_t)(b)`` against ``φ_{s+t}(b)`` with extrapolated marginals."""
    s, t = Fraction(s), Fraction(t)
    phis = [
        Functional(cfg.dsg, lambda m, u=u: marginal(cfg, u, m).value, mode=FLOAT, name=f"phi[{u}]")
        for u in (s, t)
    ]
    details = []
    worst = 0.0
    for m in samples:
        p = NCPoly.monomial(m, 1, cfg.dsg)
        conv = sum(
            (complex(c) * free_product_recursion(phis, tagged_word(mm, cfg.dsg, FLOAT)) for mm, c in coproduct(cfg.dsg, p).items()),
            0j,
        )
        whole = marginal(cfg, s + t, m).value
        err = abs(conv - whole)
        worst = max(worst, err)
        details.append({"monomial": mono_str(m), "defect": err})
    return DefectReport("semigroup", [mono_str(m) for m in samples], worst, cfg.tol("semigroup"), details)


# ----------------------------------------------------------------------------
# process properties


def increment_factorization_defect(cfg: LevyConfig, r, s, tp, samples: Sequence[tuple], depth: int) -> DefectReport:
    """``Φ(f_{r,t'}(b))`` against ``Φ((f_{r,s} ⋆ f_{s,t'})(b))`` with the whole partition the union of the halves."""
    a1, a2 = Partition.dyadic(r, s, depth), Partition.dyadic(s, tp, depth)
    whole = a1 | a2
    details, worst = [], 0.0
    for m in samples:
        p = _poly(cfg, m)
        lhs = net_moment(cfg, [(p, whole)])
        rhs = tagged_moment(cfg, coproduct(cfg.dsg, p), {1: a1, 2: a2})
        err = _diff(lhs, rhs)
        worst = max(worst, err)
        details.append({"monomial": mono_str(m), "defect": err})
    return DefectReport("increment", [mono_str(m) for m in samples], worst, cfg.tol("increment"), details)


def freeness_defect(cfg: LevyConfig, intervals: Sequence[tuple], words: Sequence[Sequence[tuple]], depth: int) -> DefectReport:
    """Joint moments of increments on disjoint intervals against the free product of their marginals.

    A word is a list of ``(interval index, monomial)``.  Both sides use the
    dyadic partition of depth ``depth`` on each interval.
    """
    ivs = [(Fraction(r), Fraction(s)) for r, s in intervals]
    for (r1, s1), (r2, s2) in zip(ivs, ivs[1:]):
        if not (r1 < s1 <= r2 < s2):
            raise ValueError("intervals must be disjoint and ordered")
    alphas = [Partition.dyadic(r, s, depth) for r, s in ivs]
    phis = [
        Functional(cfg.dsg, lambda m, a=a: net_moment(cfg, [(m, a)]), mode=cfg.mode, name=f"phi{a.R},{a.S}")
        for a in alphas
    ]
    details, worst = [], 0.0
    for w in words:
        lhs = net_moment(cfg, [(m, alphas[i]) for i, m in w])
        rhs = free_product_recursion(phis, merge_adjacent([Letter(i + 1, _poly(cfg, m)) for i, m in w]))
        err = _diff(lhs, rhs)
        worst = max(worst, err)
        details.append({"word": _word_str(w), "defect": err})
    return DefectReport("freeness", [_word_str(w) for w in words], worst, cfg.tol("freeness"), details)


def _word_str(w) -> str:
    return " ".join(f"[{mono_str(m)}]@{i + 1}" for i, m in w)


def stationarity_defect(cfg: LevyConfig, r, s, samples: Sequence[tuple], depth: int) -> DefectReport:
    """``Φ∘f_{r,s}`` against ``Φ∘f_{0,s−r}`` at the same depth."""
    r, s = Fraction(r), Fraction(s)
    a, a0 = Partition.dyadic(r, s, depth), Partition.dyadic(0, s - r, depth)
    details, worst = [], 0.0
    for m in samples:
        err = _diff(net_moment(cfg, [(m, a)]), net_moment(cfg, [(m, a0)]))
        worst = max(worst, err)
        details.append({"monomial": mono_str(m), "defect": err})
    return DefectReport(
        "stationarity", [mono_str(m) for m in samples], worst, cfg.tol("stationarity"), details, note=f"shift {r}"
    )


def weak_continuity_probe(cfg: LevyConfig, b, t_schedule: Sequence) -> list[tuple[Fraction, float]]:
    """``|φ_t(b) − δ(b)|`` per t."""
    p = _poly(cfg, b)
    dl = complex(counit(cfg.dsg, p))
    return [(Fraction(t), abs(marginal(cfg, t, p).value - dl)) for t in t_schedule]


def continuity_report(cfg: LevyConfig, samples: Sequence[tuple], t_schedule: Sequence) -> DefectReport:
    """Continuity at 0 judged at the smallest t of the schedule."""
    details, worst = [], 0.0
    for m in samples:
        rows = weak_continuity_probe(cfg, m, t_schedule)
        last = min(rows)[1]
        worst = max(worst, last)
        details.append({"monomial": mono_str(m), "probe": [[str(t), v] for t, v in rows]})
    return DefectReport("continuity", [mono_str(m) for m in samples], worst, cfg.tol("continuity"), details)


@dataclass
class GeneratorEstimate:
    value: complex
    error: float
    order: float
    quotients: list


def generator_from_marginal(cfg: LevyConfig, b, t_schedule: Sequence) -> GeneratorEstimate:
    """``(φ_t(b) − δ(b))/t`` over halving t, extrapolated to t → 0.

    ``order`` is the observed power of t in the quotient error (``inf`` when the
    quotients agree to roundoff).
    """
    ts = [Fraction(t) for t in t_schedule]
    if len(ts) < 3 or any(a != 2 * b for a, b in zip(ts, ts[1:])):
        raise ValueError("t schedule must halve at each step and have at least three entries")
    p = _poly(cfg, b)
    dl = complex(counit(cfg.dsg, p))
    q = [(marginal(cfg, t, p).value - dl) / float(t) for t in ts]
    value = richardson(q)
    error = abs(value - richardson(q[:-1]))
    d1, d2 = abs(q[-2] - q[-3]), abs(q[-1] - q[-2])
    if d2 < 1e-12:
        order = math.inf
    else:
        order = math.log2(d1 / d2)
    return GeneratorEstimate(value, error, order, q)


def generator_report(cfg: LevyConfig, samples: Sequence[tuple], t_schedule: Sequence) -> DefectReport:
    details, worst = [], 0.0
    for m in samples:
        est = generator_from_marginal(cfg, m, t_schedule)
        exact_psi = complex(psi_extend(cfg.triple, _poly(cfg, m)))
        err = abs(est.value - exact_psi)
        worst = max(worst, err)
        details.append(
            {"monomial": mono_str(m), "estimate": [est.value.real, est.value.imag], "psi": [exact_psi.real, exact_psi.imag],
             "error_bar": est.error, "order": est.order, "defect": err}
        )
    return DefectReport("generator", [mono_str(m) for m in samples], worst, cfg.tol("generator"), details)


def marginal_report(cfg: LevyConfig, times: Sequence) -> DefectReport:
    """Generator marginals against the matrix exponential of ``Ψ`` on generators."""
    details, worst = [], 0.0
    d = cfg.dsg.d
    for t in times:
        E = closed_form_generator_marginal(cfg.triple, t)
        for k in range(1, d + 1):
            for l in range(1, d + 1):
                for starred in (False, True):
                    g = cfg.dsg.sym(k, l, starred)
                    est = marginal(cfg, t, (g,))
                    want = E[k - 1, l - 1].conjugate() if starred else E[k - 1, l - 1]
                    err = abs(est.value - want)
                    worst = max(worst, err)
                    details.append({"monomial": mono_str((g,)), "t": str(t), "defect": err, "error_bar": est.error})
    samples = sorted({row["monomial"] for row in details})
    return DefectReport("marginal", samples, worst, cfg.tol("marginal"), details)


# ----------------------------------------------------------------------------
# truncated cross-check and cyclicity


def truncated_marginal(cfg: LevyConfig, t, b, depth: int) -> tuple[complex, bool]:
    """``φ_t(b)`` on the truncated matrices at one depth, with the leak flag."""
    return truncated_net_moment(cfg.grid, cfg.triple, [(_poly(cfg, b), Partition.dyadic(0, t, depth))])


@dataclass
class CyclicityReport:
    rank: int
    reachable_dim: int
    vectors: int
    note: str = CYCLICITY_NOTE

    @property
    def full(self) -> bool:
        return self.rank == self.reachable_dim


def cyclicity_rank(
    cfg: LevyConfig, degree_bound: int, cells: Sequence[int], words: Sequence[tuple] | None = None, tol: float = 1e-10
) -> CyclicityReport:
    """Gram rank of ``{w Ω}`` against the dimension of the degree-≤``degree_bound`` span over ``cells``.

    Each letter of a word is ``(generator, cell)`` and acts as the process
    increment ``f`` on that single grid cell.  The default word set is every
    product of at most ``degree_bound`` letters.
    """
    g = cfg.grid
    if degree_bound > g.N:
        raise ValueError(f"degree bound {degree_bound} exceeds the truncation degree {g.N}")
    w = g.width
    ops = {}
    letters = [(gen, c) for c in cells for gen in cfg.dsg.generators()]
    for gen, c in letters:
        ops[(gen, c)] = generator_increment(g, cfg.triple, gen, c * w, (c + 1) * w)
    if words is None:
        words = [()]
        frontier = [()]
        for _ in range(degree_bound):
            frontier = [wd + (lt,) for wd in frontier for lt in letters]
            words.extend(frontier)
    vecs = []
    for wd in words:
        v = g.vacuum()
        for lt in reversed(wd):
            v = ops[lt].apply(v)
        vecs.append(v)
    V = np.array(vecs)
    gram = V.conj() @ V.T
    rank = int(np.linalg.matrix_rank(gram, tol=tol, hermitian=True))
    k = len(set(cells)) * g.d_space
    reachable = sum(k**j for j in range(degree_bound + 1))
    return CyclicityReport(rank, reachable, len(words))


# ----------------------------------------------------------------------------
# suite


def run_suite(cfg: LevyConfig, *, times=(Fraction(1, 2), Fraction(1)), depth: int | None = None, seed: int = 0) -> list[DefectReport]:
    """All property reports in a fixed order for one configuration."""
    import random

    depth = cfg.depths[-1] if depth is None else depth
    samples = default_samples(cfg.dsg.d)
    short = default_samples(cfg.dsg.d, 2)
    rng = random.Random(seed)
    reports = [
        marginal_report(cfg, times),
        semigroup_defect(cfg, Fraction(1, 4), Fraction(1, 2), short),
        increment_factorization_defect(cfg, 0, Fraction(1, 2), 1, short, depth - 1),
    ]
    gens = cfg.dsg.generators()
    words = [[(0, (a,)), (1, (b,))] for a in gens for b in gens]
    words += [[(0, (a,)), (1, (b,)), (0, (c,)), (1, (a,))] for a in gens[:2] for b in gens[:2] for c in gens[:2]]
    reports.append(freeness_defect(cfg, [(0, Fraction(1, 2)), (Fraction(1, 2), 1)], words, depth - 1))
    shift = Fraction(rng.randint(1, 8), 8)
    reports.append(stationarity_defect(cfg, shift, shift + Fraction(1, 2), samples, depth - 1))
    ts = [Fraction(1, 2**k) for k in range(3, 7)]
    reports.append(continuity_report(cfg, short, ts))
    reports.append(generator_report(cfg, short, ts))
    return reports
