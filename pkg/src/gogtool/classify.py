"""Operator algebra reports assembled from the boundary dynamics.

The reduced algebra of the boundary groupoid is simple exactly when
the action is minimal and topologically free, it is nuclear because
the vertex groups are abelian, and in the simple case it is purely
infinite exactly when the action is locally contractive.  That splits
the simple algebras in two: contracting actions give Kirchberg
algebras, and the one simple non-contracting family, the odometer
over a ray of indices, gives a stable Bunce-Deddens algebra.  For
graphs of trivial groups the K-groups depend on the first Betti
number alone.

Nothing here computes; the module composes the three-valued verdicts
of the dynamics procedures, carrying their witnesses along so every
decided field of a report can be rechecked.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Tuple

from .abelian import FgAbelianGroup, format_group
from .dynamics import (Subject, Verdict, is_locally_contractive, is_minimal,
                       is_topologically_free, is_trivial_groups)
from .gog import GraphOfGroups, RaySpec


class ClassifyError(ValueError):
    pass


DICHOTOMIES = ("kirchberg", "stable_bunce_deddens", "not_simple", "unknown")

_VALUE_NAMES = {True: "true", False: "false", None: "unknown"}


@dataclass(frozen=True)
class Classification:
    """Classification report for the boundary algebra of one input.

    simple, nuclear and purely_infinite carry the dynamical evidence
    behind them.  purely_infinite asserts the simple form of the
    property, so it is false whenever simplicity fails.  k0 and k1
    are group descriptors, populated only for graphs of trivial
    groups whose algebra is simple.  notes lists facts that need no
    computation plus whatever the dichotomy branch adds.
    """

    simple: Verdict
    nuclear: Verdict
    purely_infinite: Verdict
    dichotomy: str
    k0: Optional[str] = None
    k1: Optional[str] = None
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.dichotomy not in DICHOTOMIES:
            raise ClassifyError(f"unknown dichotomy tag {self.dichotomy!r}")

    def as_dict(self) -> dict:
        return {
            "simple": self.simple.as_dict(),
            "nuclear": self.nuclear.as_dict(),
            "purely_infinite": self.purely_infinite.as_dict(),
            "dichotomy": self.dichotomy,
            "k0": self.k0,
            "k1": self.k1,
            "notes": list(self.notes),
        }


def _simplicity(minimal: Verdict, free: Verdict) -> Verdict:
    """Simplicity is equivalent to minimal plus topologically free for
    these boundary groupoids, so the conjunction of the two verdicts
    decides it whenever a false appears or both are true."""
    evidence = {"minimal": minimal.as_dict(),
                "topologically_free": free.as_dict()}
    if minimal.value is False:
        return Verdict(False, "simplicity needs the action minimal and "
                              "topologically free, and minimality fails",
                       evidence)
    if free.value is False:
        return Verdict(False, "simplicity needs the action minimal and "
                              "topologically free, and topological "
                              "freeness fails", evidence)
    if minimal.value is True and free.value is True:
        return Verdict(True, "the action is minimal and topologically "
                             "free, which characterizes simplicity",
                       evidence)
    missing = [name for name, v in (("minimality", minimal),
                                    ("topological freeness", free))
               if v.value is None]
    return Verdict(None, " and ".join(missing) + " could not be decided",
                   evidence)


def _nuclearity(subject: Subject) -> Verdict:
    if isinstance(subject, RaySpec):
        return Verdict(True, "the odometer is an action of the integers, "
                             "an amenable group, so the crossed product "
                             "is nuclear", {"acting_group": "Z"})
    groups = {x: format_group(subject.vertex_group(x))
              for x in subject.vertices}
    return Verdict(True, "every vertex group is abelian, hence amenable, "
                         "so the boundary groupoid is amenable and its "
                         "algebra nuclear", {"vertex_groups": groups})


def _pure_infiniteness(simple: Verdict, contractive: Verdict) -> Verdict:
    """Asserts the simple form of pure infiniteness.  A simple algebra
    here is purely infinite exactly when the action is locally
    contractive; without simplicity the assertion fails outright."""
    evidence = {"simple": _VALUE_NAMES[simple.value],
                "locally_contractive": contractive.as_dict()}
    if simple.value is False:
        return Verdict(False, "a non-simple algebra is not a purely "
                              "infinite simple algebra", evidence)
    if contractive.value is False:
        return Verdict(False, "the action is not locally contractive; a "
                              "simple algebra from a non-contracting "
                              "boundary action is stably finite",
                       evidence)
    if simple.value is True and contractive.value is True:
        return Verdict(True, "the action is minimal, topologically free "
                             "and locally contractive, so the simple "
                             "algebra is purely infinite", evidence)
    missing = [name for name, v in (("simplicity", simple),
                                    ("local contractivity", contractive))
               if v.value is None]
    return Verdict(None, " and ".join(missing) + " could not be decided",
                   evidence)


def _prime_powers(k: int) -> Counter:
    out: Counter = Counter()
    d = 2
    while d * d <= k:
        while k % d == 0:
            out[d] += 1
            k //= d
        d += 1
    if k > 1:
        out[k] += 1
    return out


def supernatural_number(ray: RaySpec) -> str:
    """Formal product of every index along the ray, as a string.  A
    prime dividing a period entry recurs forever and appears with
    exponent inf; primes confined to the prefix keep finite
    exponents."""
    finite: Counter = Counter()
    for k in ray.prefix:
        finite.update(_prime_powers(k))
    endless = set()
    for k in ray.period:
        endless.update(_prime_powers(k))
    parts = []
    for p in sorted(set(finite) | endless):
        if p in endless:
            parts.append(f"{p}^inf")
        elif finite[p] > 1:
            parts.append(f"{p}^{finite[p]}")
        else:
            parts.append(str(p))
    return " * ".join(parts) if parts else "1"


def betti_number(gog: GraphOfGroups) -> int:
    """First Betti number of the underlying connected graph: geometric
    edges minus vertices plus one."""
    return len(gog.oriented_edges()) - len(gog.vertices) + 1


def k_theory_trivial(gog: GraphOfGroups) -> Tuple[str, str, str]:
    """K-groups of the boundary algebra of a graph of trivial groups,
    plus a note locating the class of the unit.

    Only the first Betti number n enters: K0 is free of rank n with a
    cyclic torsion part of order n - 1, and K1 is free of rank n.
    The algebra must be simple, which rules out n = 1 (a single
    cycle is never minimal here) and anything undecided.
    """
    if not isinstance(gog, GraphOfGroups) or not is_trivial_groups(gog):
        raise ClassifyError("K-theory is computed only for graphs of "
                            "trivial groups")
    minimal = is_minimal(gog)
    free = is_topologically_free(gog)
    for name, verdict in (("minimal", minimal),
                          ("topologically free", free)):
        if verdict.value is False:
            raise ClassifyError(f"the boundary algebra is not simple: "
                                f"the action is not {name} "
                                f"({verdict.reason})")
        if verdict.value is None:
            raise ClassifyError(f"the boundary algebra is not known to be "
                                f"simple: whether the action is {name} "
                                f"is undecided ({verdict.reason})")
    n = betti_number(gog)
    if n < 2:
        raise ClassifyError(f"Betti number {n} contradicts simplicity; "
                            f"refusing to report K-groups")
    k0 = FgAbelianGroup(n, (n - 1,) if n - 1 >= 2 else ())
    k1 = FgAbelianGroup(n)
    if n == 2:
        note = ("the torsion subgroup of K0 is trivial, so the class of "
                "the unit vanishes")
    else:
        note = (f"the class of the unit generates the torsion subgroup "
                f"Z/{n - 1} of K0")
    return format_group(k0), format_group(k1), note


def classify(subject: Subject) -> Classification:
    """Full report for a graph of groups or a ray preset.

    Unknowns propagate: a dichotomy is only named when the verdicts
    deciding it are in, and K-groups appear only for simple algebras
    of trivial-group graphs.
    """
    minimal = is_minimal(subject)
    free = is_topologically_free(subject)
    contractive = is_locally_contractive(subject)
    simple = _simplicity(minimal, free)
    nuclear = _nuclearity(subject)
    pure = _pure_infiniteness(simple, contractive)

    if simple.value is False:
        dichotomy = "not_simple"
    elif simple.value is True and contractive.value is True:
        dichotomy = "kirchberg"
    elif simple.value is True and contractive.value is False:
        dichotomy = "stable_bunce_deddens"
    else:
        dichotomy = "unknown"

    notes = ["separable: the boundary groupoid is second countable",
             "satisfies the UCT: the algebra comes from a second "
             "countable amenable etale groupoid"]
    k0 = k1 = None
    if (isinstance(subject, GraphOfGroups) and is_trivial_groups(subject)
            and simple.value is True):
        k0, k1, unit_note = k_theory_trivial(subject)
        notes.append(unit_note)
    if dichotomy == "kirchberg":
        notes.append("Kirchberg algebra: simple, separable, nuclear and "
                     "purely infinite")
    if dichotomy == "stable_bunce_deddens" and isinstance(subject, RaySpec):
        notes.append(f"stable Bunce-Deddens algebra of supernatural "
                     f"number {supernatural_number(subject)}")
    return Classification(simple, nuclear, pure, dichotomy, k0, k1,
                          tuple(notes))
