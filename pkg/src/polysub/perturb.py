"""Outward perturbation of colored halfspaces into general position.

Halfspaces are moved one at a time, in input order, by a small tilt of the
normal plus an outward shift of the offset.  The shift is large enough that
the old halfspace (inside the bounding simplex) is strictly contained in the
new one, and both are bounded by a safe distance derived from the arrangement
vertices, so faces inside the simplex survive.  Coefficients come from a
deterministic sequence of rationals with growing prime denominators; general
position of the already perturbed prefix is re-checked exactly after every
step and a step is retried with fresh coefficients when it fails.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .engine import census
from .rational import Singular, dot, format_rational, primitive_row, rank, solve_square
from .scene import Halfspace, Scene, add_bounding_simplex, candidate_vertices, delta_vertices

__all__ = [
    "GeneralPositionReport",
    "PerturbationStep",
    "RetryExhausted",
    "MonotonicityViolation",
    "check_general_position",
    "safe_epsilon",
    "perturb_scene",
    "verify_monotonicity",
]

MAX_RETRIES = 64


class RetryExhausted(RuntimeError):
    pass


class MonotonicityViolation(AssertionError):
    def __init__(self, dim, before, after):
        super().__init__(f"dimension {dim}: {after} faces after perturbation, {before} before")
        self.dim = dim


@dataclass
class GeneralPositionReport:
    distinct_hyperplanes: bool
    simple: bool
    generic_vertical_ok: bool
    witnesses: list = field(default_factory=list)

    @property
    def ok(self):
        return self.distinct_hyperplanes and self.simple and self.generic_vertical_ok

    def to_dict(self):
        return {
            "distinct_hyperplanes": self.distinct_hyperplanes,
            "simple": self.simple,
            "generic_vertical_ok": self.generic_vertical_ok,
            "witnesses": self.witnesses,
        }


def _hyperplane_key(h):
    row = primitive_row(list(h.normal) + [h.offset])
    lead = next(x for x in row if x)
    return row if lead > 0 else tuple(-x for x in row)


def _concurrent(hs, ids):
    """Common point of the hyperplanes ``ids`` with dependent normals, if any."""
    A = [hs[i].normal for i in ids]
    r = rank(A)
    if r == len(ids):
        return False, None
    if rank([list(hs[i].normal) + [hs[i].offset] for i in ids]) != r:
        return False, None  # no common point
    return True, r


def _fmt_point(p):
    return [format_rational(x) for x in p]


def check_general_position(scene, new=None):
    """Exact general-position test.

    Every pair of hyperplanes must differ, and every set of at most ``d + 1``
    hyperplanes with a common point must have independent normals.  ``new``
    restricts the subset checks to subsets containing that halfspace id.
    """
    hs = scene.halfspaces
    d = scene.dim
    witnesses = []
    first = {}
    reps = []
    for i, h in enumerate(hs):
        key = _hyperplane_key(h)
        if key in first:
            if new is None or new in (first[key], i):
                witnesses.append({"kind": "duplicate", "ids": [first[key], i]})
        else:
            first[key] = i
            reps.append(i)
    distinct = not witnesses

    violating = []
    pool = [i for i in reps if i != new]
    for size in range(2, d + 2):
        if new is None:
            subsets = combinations(reps, size)
        elif new in reps:
            subsets = (tuple(sorted(c + (new,))) for c in combinations(pool, size - 1))
        else:
            break
        for ids in subsets:
            if any(v <= set(ids) for v in violating):
                continue
            bad, r = _concurrent(hs, ids)
            if not bad:
                continue
            violating.append(set(ids))
            w = {"kind": "concurrent", "ids": list(ids)}
            if r == d:
                for sub in combinations(ids, d):
                    try:
                        w["point"] = _fmt_point(
                            solve_square([hs[i].normal for i in sub], [hs[i].offset for i in sub])
                        )
                        break
                    except Singular:
                        pass
            witnesses.append(w)
    simple = not violating
    # a vertical direction avoiding finitely many hyperplanes always exists once
    # the arrangement is simple; charging.pick_generic_direction constructs one
    return GeneralPositionReport(distinct, simple, distinct and simple, witnesses)


# -- safe distances ----------------------------------------------------------

def _arrangement_points(scene):
    hs = scene.halfspaces
    out = []
    for p in candidate_vertices(list({_hyperplane_key(h): h for h in hs}.values()), scene.dim):
        if all(hs[i].slack(p) >= 0 for i in scene.delta_ids()):
            out.append(p)
    return out


def _power_of_two_below(sq_dist):
    """Largest ``2**e`` with ``(2**e)**2 < sq_dist / 4``."""
    eps = Fraction(1)
    while 4 * eps * eps >= sq_dist:
        eps /= 2
    while 4 * (2 * eps) ** 2 < sq_dist:
        eps *= 2
    return eps


def safe_epsilon(scene, h):
    """A power of two strictly below half the smallest positive distance from
    the hyperplane of halfspace ``h`` to an arrangement vertex in the simplex."""
    if scene.delta_color is None:
        raise ValueError("attach a bounding simplex first")
    hp = scene.halfspaces[h]
    norm2 = dot(hp.normal, hp.normal)
    best = None
    for p in _arrangement_points(scene):
        v = hp.slack(p)
        if v:
            sq = v * v / norm2
            best = sq if best is None or sq < best else best
    return _power_of_two_below(best)


# -- perturbation ------------------------------------------------------------

@dataclass
class PerturbationStep:
    hid: int
    old: Halfspace
    new: Halfspace
    epsilon: Fraction

    def to_line(self):
        def fmt(h):
            return " ".join(format_rational(x) for x in h.normal + (h.offset,))

        return f"step {self.hid} eps {format_rational(self.epsilon)} old {fmt(self.old)} new {fmt(self.new)}"


def _primes():
    n = 101
    while True:
        if all(n % p for p in range(2, int(n ** 0.5) + 1)):
            yield n
        n += 2


def perturb_scene(scene):
    """Perturb every non-simplex halfspace outward; returns the new scene and
    the step log."""
    if scene.delta_color is None:
        raise ValueError("attach a bounding simplex first")
    d = scene.dim
    box = max(abs(x) for p in delta_vertices(scene) for x in p)
    corners = delta_vertices(scene)
    primes = _primes()
    current = list(scene.halfspaces)
    done = set(scene.delta_ids())
    steps = []
    for hid in scene.user_ids():
        h = current[hid]
        eps = safe_epsilon(Scene(d, current, scene.num_colors, scene.delta_color), hid)
        amax = max(abs(a) for a in h.normal)
        tilt_budget = eps * amax / (12 * box)
        for _ in range(MAX_RETRIES):
            ps = [next(primes) for _ in range(d + 1)]
            eta = tuple(
                tilt_budget * (1 if k % 2 == 0 else -1) / (d * ps[k]) for k in range(d)
            )
            reach = max(abs(dot(eta, x)) for x in corners)
            shift = 2 * reach + eps * amax / 4 * (1 - Fraction(1, ps[d]))
            new = Halfspace(tuple(a + e for a, e in zip(h.normal, eta)), h.offset + shift, h.color)
            # outward: the old halfspace inside the simplex lies in the new interior
            assert all(shift > dot(eta, x) for x in corners)
            trial = list(current)
            trial[hid] = new
            prefix = sorted(done | {hid})
            sub = Scene(d, [trial[i] for i in prefix], scene.num_colors)
            if check_general_position(sub, new=prefix.index(hid)).ok:
                break
        else:
            raise RetryExhausted(f"halfspace {hid}: no generic perturbation found")
        current = trial
        done.add(hid)
        steps.append(PerturbationStep(hid, h, new, eps))
    return Scene(d, current, scene.num_colors, scene.delta_color), steps


def _matching_delta(before, after):
    if before.delta_color is None and after.delta_color is not None:
        return before.with_delta_of(after)
    if before.delta_color is None:
        return add_bounding_simplex(before)
    return before


def verify_monotonicity(scene, perturbed):
    """Census both scenes inside the same simplex; every per-dimension count
    must not decrease."""
    before = census(_matching_delta(scene, perturbed))
    after = census(perturbed)
    for k, (a, b) in enumerate(zip(before.counts, after.counts)):
        if b < a:
            raise MonotonicityViolation(k, a, b)
    return {
        "before": [str(c) for c in before.counts],
        "after": [str(c) for c in after.counts],
        "monotone": True,
        "preserved": before.counts == after.counts,
    }


def log_text(steps):
    return "".join(s.to_line() + "\n" for s in steps)


def report_json(report):
    return json.dumps(report, sort_keys=True)
