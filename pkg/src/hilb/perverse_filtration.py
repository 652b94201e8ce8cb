"""The abstract perversity on A{S_n} and the checkable filtration theorems.

The perversity of a basis element a.sigma with factors alpha_1, ..., alpha_k
on the orbits of sigma of type 1^{a_1} ... n^{a_n} is

    p(a.sigma) = sum_i p(alpha_i) + sum_i (i - 1) a_i
               = sum_i p(alpha_i) + (n - number of orbits),

the zero class has perversity bottom (-infinity), and the perversity of a
class is the maximum over its support.  The multiplicativity checker verifies
p(x.y) <= p(x) + p(y) over every pair of basis elements; it factorizes over
the joint orbits of the two permutations (both the product and the perversity
bookkeeping decompose orbitwise), which turns the factorially large pair
space into a short list of transitive local subproblems without giving up
exhaustiveness.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct
from multiprocessing import Pool

from .errors import UsageError
from .report import CheckReport
from .surface_ring import SurfaceRing, diagonal_push, load_ring, save_ring
from .symmetric_groups import Perm, enumerate_sn, graph_defect, orbits
from .wreath_ring import (
    DEFAULT_LIMIT,
    _MULT_STEP_COST,
    WreathClass,
    WreathElement,
    _mul_sequence,
    _perm_orbit_blocks,
    cup,
    render_element,
    restrict_perm,
)


class _Bottom:
    """Sentinel below every integer; the perversity of the zero class."""

    __slots__ = ()

    def __lt__(self, other):
        return not isinstance(other, _Bottom)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _Bottom)

    def __repr__(self):
        return "-inf"


BOTTOM = _Bottom()

PerversityValue = int | _Bottom


def perversity(ring: SurfaceRing, x: WreathElement) -> int:
    """Sum of factor perversities plus the cycle-type shift n - #orbits."""
    blocks = _perm_orbit_blocks(x.sigma.images)
    value = sum(ring.perversities[f] for f in x.factors) + (x.n - len(blocks))
    return value


def perversity_class(ring: SurfaceRing, cls: WreathClass) -> PerversityValue:
    if not cls.terms:
        return BOTTOM
    return max(perversity(ring, el) for el in cls.terms)


# -- multiplicativity ----------------------------------------------------------


def _local_mult_stats(ring: SurfaceRing, sigma: Perm, tau: Perm):
    """Worst perversity excess on one transitive joint orbit.

    Returns (best_excess, argmax factor tuples, any_nonzero) over all local
    factor assignments; best_excess is None when every local product
    vanishes, in which case no global pair through this orbit can violate.
    """
    cache = ring._caches.setdefault("mult_local", {})
    key = (sigma.images, tau.images)
    hit = cache.get(key)
    if hit is not None:
        return hit
    m = sigma.n
    g = graph_defect(sigma, tau)[tuple(range(1, m + 1))]
    s_blocks = _perm_orbit_blocks(sigma.images)
    t_blocks = _perm_orbit_blocks(tau.images)
    st_blocks = _perm_orbit_blocks(sigma.compose(tau).images)
    shift_x = m - len(s_blocks)
    shift_y = m - len(t_blocks)
    shift_res = m - len(st_blocks)
    best = None
    arg = None
    if g >= 2:
        result = (None, None)
        cache[key] = result
        return result
    perv = ring.perversities
    for fx in iproduct(range(ring.size), repeat=len(s_blocks)):
        mx = _mul_sequence(ring, fx)
        if not mx:
            continue
        px = sum(perv[f] for f in fx) + shift_x
        for fy in iproduct(range(ring.size), repeat=len(t_blocks)):
            my = _mul_sequence(ring, fy)
            if not my:
                continue
            prod = ring.mul_class(mx, my)
            if g == 1:
                prod = ring.mul_class(prod, ring.euler)
            if not prod:
                continue
            split = diagonal_push(ring, len(st_blocks), prod)
            if not split:
                continue
            py = sum(perv[f] for f in fy) + shift_y
            top = max(sum(perv[f] for f in k2) for k2 in split) + shift_res
            excess = top - px - py
            if best is None or excess > best:
                best = excess
                arg = (fx, fy)
    result = (best, arg)
    cache[key] = result
    return result


def _assemble_factors(
    sigma: Perm, joint_blocks, local_args: list[tuple[int, ...]], ring: SurfaceRing
) -> tuple[int, ...]:
    """Merge per-joint-orbit local factor tuples back onto the global orbits."""
    blocks = _perm_orbit_blocks(sigma.images)
    factor_at: dict[int, int] = {}
    for block, fx in zip(joint_blocks, local_args):
        members = [b for b in blocks if b[0] in block]
        for b, f in zip(members, fx):
            factor_at[b[0]] = f
    return tuple(factor_at[b[0]] for b in blocks)


def _mult_pair_check(ring: SurfaceRing, n: int, sigma: Perm, tau: Perm) -> dict | None:
    """Worst violation witness among pairs with the given permutations, or None."""
    joint = orbits(n, [sigma, tau])
    total = 0
    args_x: list[tuple[int, ...]] = []
    args_y: list[tuple[int, ...]] = []
    for block in joint.blocks:
        best, arg = _local_mult_stats(
            ring, restrict_perm(sigma, block), restrict_perm(tau, block)
        )
        if best is None:
            return None  # every product through this orbit vanishes
        total += best
        args_x.append(arg[0])
        args_y.append(arg[1])
    if total <= 0:
        return None
    x = WreathElement(n, sigma, _assemble_factors(sigma, joint.blocks, args_x, ring))
    y = WreathElement(n, tau, _assemble_factors(tau, joint.blocks, args_y, ring))
    product_class = cup(ring, x, y)
    px = perversity(ring, x)
    py = perversity(ring, y)
    actual = perversity_class(ring, product_class)
    return {
        "x": render_element(ring, x),
        "y": render_element(ring, y),
        "perversity_x": px,
        "perversity_y": py,
        "bound": px + py,
        "actual": int(actual) if not isinstance(actual, _Bottom) else None,
        "excess": total,
    }


def _mult_estimate(ring: SurfaceRing, n: int) -> int:
    est = 0
    perms = list(enumerate_sn(n))
    for sigma in perms:
        s_blocks = _perm_orbit_blocks(sigma.images)
        for tau in perms:
            t_blocks = _perm_orbit_blocks(tau.images)
            for block in orbits(n, [sigma, tau]).blocks:
                a = sum(1 for b in s_blocks if b[0] in block)
                b2 = sum(1 for b in t_blocks if b[0] in block)
                est += ring.size ** (a + b2)
    return est


_WORKER_RING: SurfaceRing | None = None


def _mult_worker_init(doc: str) -> None:
    global _WORKER_RING
    _WORKER_RING = load_ring(doc)


def _mult_worker(task) -> list[dict]:
    n, pairs = task
    ring = _WORKER_RING
    out = []
    for sigma_images, tau_images in pairs:
        witness = _mult_pair_check(ring, n, Perm(sigma_images), Perm(tau_images))
        if witness is not None:
            out.append(witness)
    return out


def check_multiplicativity(
    ring: SurfaceRing,
    n: int,
    limit: int = DEFAULT_LIMIT,
    seed: int = 0,
    sample_size: int = 1_000_000,
    jobs: int = 1,
) -> CheckReport:
    """perversity(x.y) <= perversity(x) + perversity(y) over all basis pairs.

    Runs the orbit-factorized exhaustive check when its exact cost estimate
    fits the limit; otherwise falls back to a seeded random sample of basis
    pairs (which must still find zero violations to pass).
    """
    est = _mult_estimate(ring, n) * _MULT_STEP_COST
    witnesses: list[dict] = []
    if est <= limit:
        mode = "exhaustive"
        perms = list(enumerate_sn(n))
        pair_list = [(s.images, t.images) for s in perms for t in perms]
        if jobs > 1:
            chunks = [pair_list[i::jobs] for i in range(jobs)]
            with Pool(jobs, initializer=_mult_worker_init, initargs=(save_ring(ring),)) as pool:
                for part in pool.map(_mult_worker, [(n, chunk) for chunk in chunks]):
                    witnesses.extend(part)
        else:
            for s_images, t_images in pair_list:
                witness = _mult_pair_check(ring, n, Perm(s_images), Perm(t_images))
                if witness is not None:
                    witnesses.append(witness)
        checked = len(pair_list)
    else:
        mode = "sampled"
        rng = random.Random(seed)
        perms = list(enumerate_sn(n))
        weights = [ring.size ** len(_perm_orbit_blocks(p.images)) for p in perms]
        checked = sample_size
        for _ in range(sample_size):
            sigma, tau = rng.choices(perms, weights=weights, k=2)
            fx = tuple(
                rng.randrange(ring.size)
                for _ in range(len(_perm_orbit_blocks(sigma.images)))
            )
            fy = tuple(
                rng.randrange(ring.size)
                for _ in range(len(_perm_orbit_blocks(tau.images)))
            )
            x = WreathElement(n, sigma, fx)
            y = WreathElement(n, tau, fy)
            actual = perversity_class(ring, cup(ring, x, y))
            bound = perversity(ring, x) + perversity(ring, y)
            if actual > bound:
                witnesses.append(
                    {
                        "x": render_element(ring, x),
                        "y": render_element(ring, y),
                        "perversity_x": perversity(ring, x),
                        "perversity_y": perversity(ring, y),
                        "bound": bound,
                        "actual": int(actual),
                        "excess": int(actual) - bound,
                    }
                )
    witnesses.sort(key=lambda w: (-w["excess"], w["x"], w["y"]))
    info = {
        "ring": ring.name,
        "n": n,
        "mode": mode,
        "seed": seed,
        "estimate": est,
        "limit": limit,
        "checked": checked,
        "jobs": jobs,
    }
    return CheckReport("multiplicativity", not witnesses, witnesses, info)


# -- diagonal bound -------------------------------------------------------------


def check_diagonal_bound(ring: SurfaceRing, n_max: int = 4) -> CheckReport:
    """Every term of the m-fold diagonal pushforward of a basis class gamma has
    componentwise perversity sum <= p(gamma) + 2(m-1), for 2 <= m <= n_max."""
    witnesses = []
    for g in range(ring.size):
        pg = ring.perversities[g]
        for m in range(2, n_max + 1):
            pushed = diagonal_push(ring, m, g)
            bound = pg + 2 * (m - 1)
            for key, coeff in pushed.items():
                total = sum(ring.perversities[i] for i in key)
                if total > bound:
                    witnesses.append(
                        {
                            "gamma": ring.names[g],
                            "m": m,
                            "term": "(x)".join(ring.names[i] for i in key),
                            "coefficient": str(coeff),
                            "perversity_sum": total,
                            "bound": bound,
                            "excess": total - bound,
                        }
                    )
    witnesses.sort(key=lambda w: (-w["excess"], w["gamma"], w["m"]))
    return CheckReport(
        "diagonal-bound",
        not witnesses,
        witnesses,
        {"ring": ring.name, "n_max": n_max},
    )


# -- weight-filtration transport -------------------------------------------------


def pw_transport(perverse_dims: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    """Transport perverse graded dimensions to weight graded dimensions.

    The packaged identification W_{2k} = W_{2k+1} = cumulative P_k turns the
    graded pieces into Gr^W_{2k} = Gr^P_k with every odd weight graded piece
    zero, so the table simply doubles the filtration index.
    """
    out: dict[int, dict[int, int]] = {}
    for p, row in perverse_dims.items():
        for d, dim in row.items():
            if dim:
                out.setdefault(2 * p, {})[d] = dim
    return out


# -- small exact matrix checks ----------------------------------------------------


MONODROMY_MATRICES: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = (
    ((-1, 0), (0, -1)),
    ((0, -1), (1, -1)),
    ((0, -1), (1, 0)),
    ((0, -1), (1, 1)),
)

TRIANGLE_MATRIX: tuple[tuple[int, int, int], ...] = (
    (-1, 1, 1),
    (1, -1, 1),
    (1, 1, -1),
)


def _int_det(m) -> int:
    from . import linalg

    return int(linalg.det([[Fraction(x) for x in row] for row in m]))


def check_monodromy_vanishing(matrix) -> CheckReport:
    """No invariants or coinvariants of the rank-2 monodromy: det(M - I) != 0."""
    rows = [list(r) for r in matrix]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise UsageError("monodromy check expects a 2x2 integer matrix")
    shifted = [
        [rows[i][j] - (1 if i == j else 0) for j in range(2)] for i in range(2)
    ]
    d = _int_det(shifted)
    witnesses = [] if d != 0 else [{"matrix": str(rows), "det_m_minus_i": 0, "excess": 1}]
    return CheckReport(
        "monodromy-vanishing",
        d != 0,
        witnesses,
        {"matrix": str(rows), "det_m_minus_i": d},
    )


def check_intersection_nondegenerate(matrix) -> CheckReport:
    """Pass iff the intersection matrix has nonzero determinant."""
    rows = [list(r) for r in matrix]
    if any(len(r) != len(rows) for r in rows):
        raise UsageError("intersection check expects a square matrix")
    d = _int_det(rows)
    witnesses = [] if d != 0 else [{"matrix": str(rows), "determinant": 0, "excess": 1}]
    return CheckReport(
        "intersection-nondegenerate",
        d != 0,
        witnesses,
        {"matrix": str(rows), "determinant": d},
    )


def check_monodromy_suite() -> CheckReport:
    """The four rank-2 monodromy matrices plus the triangle intersection matrix."""
    reports = [check_monodromy_vanishing(m) for m in MONODROMY_MATRICES]
    reports.append(check_intersection_nondegenerate(TRIANGLE_MATRIX))
    witnesses = [w for r in reports for w in r.witnesses]
    info = {
        "monodromy_determinants": [r.info["det_m_minus_i"] for r in reports[:-1]],
        "triangle_determinant": reports[-1].info["determinant"],
    }
    return CheckReport(
        "monodromy", all(r.passed for r in reports), witnesses, info
    )
