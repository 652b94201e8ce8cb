"""Finite graded-commutative surface algebras with perversity data.

A SurfaceRing is the input datum for everything downstream: a finite basis
with a degree in {0,...,4} and a perversity in {0,1,2} per element, exact
rational structure constants, an Euler class, and either a nondegenerate
Poincare pairing (compact mode) or an explicit table for the Gysin
pushforward along the diagonal (open mode).

Classes of the ring are sparse vectors `dict[int, Fraction]` over basis
indices; classes of m-fold tensor powers are `dict[tuple[int, ...], Fraction]`
over index tuples.  Tensor factors of odd degree obey Koszul signs; the
reordering sign of a permutation pi on homogeneous factors is

    (-1) ** #{ i < j : pi puts j before i and deg_i, deg_j both odd }.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping

from . import linalg
from .errors import DataError, ModeError, UsageError
from .report import CheckReport

Vec = dict[int, Fraction]
Tensor = dict[tuple[int, ...], Fraction]

PRESET_NAMES = ("a0", "d4", "e6", "e7", "e8", "k3", "abelian")


def norm_coeff(value):
    """Exact coefficient, as a plain int when integral (much faster arithmetic).

    ints and Fractions mix exactly under +, * and ==, so representing the
    (very common) integer coefficients as machine/long ints keeps every
    computation exact while avoiding Fraction normalization overhead.
    """
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else value

_DYNKIN_K = {"d4": 4, "e6": 6, "e7": 7, "e8": 8}


class SurfaceRing:
    """Finite graded-commutative algebra with bigraded basis.

    The constructor performs shape checks only; mathematical axioms
    (graded commutativity, associativity, degree additivity, perversity
    multiplicativity, pairing consistency) are the business of `validate`,
    which reports violations instead of raising, so deliberately broken
    rings can be built for testing.
    """

    def __init__(
        self,
        name: str,
        mode: str,
        names: Iterable[str],
        degrees: Iterable[int],
        perversities: Iterable[int],
        unit: int,
        mul: Mapping[tuple[int, int], Vec],
        pairing: list[list[Fraction]] | None = None,
        euler: Vec | None = None,
        diag2: Mapping[int, Tensor] | None = None,
    ):
        if mode not in ("compact", "open"):
            raise UsageError(f"mode must be compact or open, got {mode!r}")
        self.name = name
        self.mode = mode
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        self.perversities = tuple(int(p) for p in perversities)
        k = len(self.names)
        if len(set(self.names)) != k:
            raise UsageError("basis names must be distinct")
        for nm in self.names:
            if not nm or any(ch.isspace() for ch in nm) or "x" in nm:
                raise UsageError(
                    f"basis name {nm!r} invalid: no whitespace, no letter 'x'"
                )
        if not (len(self.degrees) == len(self.perversities) == k):
            raise UsageError("names/degrees/perversities length mismatch")
        if not 0 <= unit < k:
            raise UsageError("unit index out of range")
        self.unit = unit
        table: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        for (i, j), vec in mul.items():
            if not (0 <= i < k and 0 <= j < k):
                raise UsageError(f"mul index {(i, j)} out of range")
            entries = tuple(
                sorted((idx, norm_coeff(c)) for idx, c in vec.items() if c)
            )
            if entries:
                table[(i, j)] = entries
        self._mul = table
        if pairing is not None:
            if len(pairing) != k or any(len(row) != k for row in pairing):
                raise UsageError("pairing matrix must be square over the basis")
            self.pairing = [[norm_coeff(x) for x in row] for row in pairing]
        else:
            self.pairing = None
        self.euler: Vec = {i: norm_coeff(c) for i, c in (euler or {}).items() if c}
        if diag2 is not None:
            self.diag2: dict[int, Tensor] | None = {
                g: {pair: norm_coeff(c) for pair, c in tensor.items() if c}
                for g, tensor in diag2.items()
            }
        else:
            self.diag2 = None
        self._diag_cache: dict[tuple[int, int], Tensor] = {}
        self._dual_rows: list[Vec] | None = None
        self._caches: dict[str, dict] = {}

    # -- basic queries ---------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def is_compact(self) -> bool:
        return self.mode == "compact"

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"unknown basis element {name!r} in ring {self.name}")

    def mul_basis(self, i: int, j: int) -> tuple[tuple[int, Fraction], ...]:
        return self._mul.get((i, j), ())

    def mul_class(self, u: Vec, v: Vec) -> Vec:
        out: Vec = {}
        mul = self._mul
        for i, ci in u.items():
            for j, cj in v.items():
                entries = mul.get((i, j))
                if not entries:
                    continue
                c = ci * cj
                for k, ck in entries:
                    acc = out.get(k, 0) + c * ck
                    if acc:
                        out[k] = acc
                    else:
                        out.pop(k, None)
        return out

    def top_index(self) -> int:
        """The unique degree-4 basis element of a compact ring."""
        tops = [i for i, d in enumerate(self.degrees) if d == 4]
        if len(tops) != 1:
            raise DataError(
                f"compact ring {self.name} needs exactly one degree-4 class, found {len(tops)}"
            )
        return tops[0]

    def pairing_eval(self, x: Vec, y: Vec) -> Fraction:
        if self.pairing is None:
            raise ModeError(f"ring {self.name} carries no pairing (open mode)")
        total = 0
        for i, ci in x.items():
            row = self.pairing[i]
            for j, cj in y.items():
                total += ci * cj * row[j]
        return Fraction(total)

    def dual_rows(self) -> list[Vec]:
        """Rows alpha_i with <alpha_i, b_j> = delta_ij (Poincare-dual basis)."""
        if self._dual_rows is None:
            if self.pairing is None:
                raise ModeError(f"ring {self.name} carries no pairing (open mode)")
            inv = linalg.inverse([[Fraction(x) for x in row] for row in self.pairing])
            self._dual_rows = [
                {j: norm_coeff(c) for j, c in enumerate(row) if c}
                for j, row in enumerate(inv)
            ]
        return self._dual_rows

    def render_class(self, vec: Vec) -> str:
        if not vec:
            return "0"
        parts = []
        for i in sorted(vec):
            c = vec[i]
            parts.append(self.names[i] if c == 1 else f"{c}*{self.names[i]}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SurfaceRing({self.name!r}, mode={self.mode!r}, size={self.size})"


# -- Koszul helpers -------------------------------------------------------


def koszul_reorder_sign(degrees: Iterable[int], new_positions: Iterable[int]) -> int:
    """Sign for reordering homogeneous factors: factor at old slot i moves to
    new slot new_positions[i]; each inverted pair of odd factors contributes -1."""
    degs = list(degrees)
    pos = list(new_positions)
    sign = 1
    for i in range(len(degs)):
        if degs[i] % 2 == 0:
            continue
        for j in range(i + 1, len(degs)):
            if degs[j] % 2 and pos[i] > pos[j]:
                sign = -sign
    return sign


# -- validation -----------------------------------------------------------


def validate(ring: SurfaceRing) -> CheckReport:
    """Run every SurfaceRing axiom; violations become witnesses, not errors."""
    witnesses: list[dict] = []
    k = ring.size
    names = ring.names

    def w(axiom: str, **kwargs) -> None:
        witnesses.append({"axiom": axiom, **{k2: str(v) for k2, v in kwargs.items()}})

    for i in range(k):
        if not 0 <= ring.degrees[i] <= 4:
            w("degree-range", element=names[i], degree=ring.degrees[i])
        if not 0 <= ring.perversities[i] <= 2:
            w("perversity-range", element=names[i], perversity=ring.perversities[i])

    for i in range(k):
        if dict(ring.mul_basis(ring.unit, i)) != {i: Fraction(1)}:
            w("unit-left", element=names[i])
        if dict(ring.mul_basis(i, ring.unit)) != {i: Fraction(1)}:
            w("unit-right", element=names[i])

    for i in range(k):
        for j in range(k):
            lhs = dict(ring.mul_basis(i, j))
            sign = -1 if (ring.degrees[i] % 2 and ring.degrees[j] % 2) else 1
            rhs = {idx: sign * c for idx, c in ring.mul_basis(j, i)}
            if lhs != rhs:
                w("graded-commutativity", left=names[i], right=names[j])
            for idx, c in lhs.items():
                if ring.degrees[idx] != ring.degrees[i] + ring.degrees[j]:
                    w(
                        "degree-additivity",
                        left=names[i],
                        right=names[j],
                        term=names[idx],
                    )
                if ring.perversities[idx] > ring.perversities[i] + ring.perversities[j]:
                    w(
                        "perversity-multiplicativity",
                        left=names[i],
                        right=names[j],
                        term=names[idx],
                        perversity=ring.perversities[idx],
                        bound=ring.perversities[i] + ring.perversities[j],
                    )

    for i in range(k):
        for j in range(k):
            for l in range(k):
                left = ring.mul_class(dict(ring.mul_basis(i, j)), {l: Fraction(1)})
                right = ring.mul_class({i: Fraction(1)}, dict(ring.mul_basis(j, l)))
                if left != right:
                    w("associativity", triple=f"{names[i]},{names[j]},{names[l]}")

    has_pairing = ring.pairing is not None
    has_diag2 = ring.diag2 is not None
    if ring.is_compact and (not has_pairing or has_diag2):
        w("mode", detail="compact ring must carry a pairing and no diag2 table")
    if not ring.is_compact and (has_pairing or not has_diag2):
        w("mode", detail="open ring must carry a diag2 table and no pairing")

    if ring.is_compact and has_pairing:
        tops = [i for i, d in enumerate(ring.degrees) if d == 4]
        if len(tops) != 1:
            w("top-class", count=len(tops))
        else:
            top = tops[0]
            for i in range(k):
                for j in range(k):
                    expected = dict(ring.mul_basis(i, j)).get(top, Fraction(0))
                    if ring.pairing[i][j] != expected:
                        w(
                            "pairing-consistency",
                            left=names[i],
                            right=names[j],
                            pairing=ring.pairing[i][j],
                            product_top_coefficient=expected,
                        )
                    if ring.pairing[i][j] != 0 and ring.degrees[i] + ring.degrees[j] != 4:
                        w("pairing-degree", left=names[i], right=names[j])
        if linalg.det(ring.pairing) == 0:
            w("pairing-nondegenerate", determinant=0)

    for i, c in ring.euler.items():
        if ring.degrees[i] != 4:
            w("euler-degree", term=names[i], degree=ring.degrees[i])

    witnesses.sort(key=lambda d: sorted(d.items()).__repr__())
    return CheckReport(
        suite="ring-validate",
        passed=not witnesses,
        witnesses=witnesses,
        info={"ring": ring.name, "basis_size": k},
    )


# -- presets ---------------------------------------------------------------


def _e8_root_rows() -> list[list[Fraction]]:
    """Simple roots of E8 in the even coordinate model of R^8 (rows).

    The Gram matrix of these eight rational vectors under the standard dot
    product is the E8 Cartan matrix, and they form a Z-basis of the E8
    lattice; inverting the coordinate matrix therefore produces an exact
    rational orthonormalization of the Cartan form.
    """
    half = Fraction(1, 2)
    rows = [
        [half, -half, -half, -half, -half, -half, -half, half],
        [Fraction(x) for x in (1, 1, 0, 0, 0, 0, 0, 0)],
    ]
    for i in range(6):
        row = [Fraction(0)] * 8
        row[i] = Fraction(-1)
        row[i + 1] = Fraction(1)
        rows.append(row)
    return rows


def e8_cartan() -> list[list[Fraction]]:
    b = _e8_root_rows()
    return linalg.matmul(b, linalg.transpose(b))


def _e8_orthonormalizer() -> list[list[Fraction]]:
    """T with T^t C T = I for C the E8 Gram matrix above (columns = new vectors)."""
    b = _e8_root_rows()
    return linalg.inverse(linalg.transpose(b))


def _preset_a0() -> SurfaceRing:
    one = Fraction(1)
    mul = {
        (0, 0): {0: one},
        (0, 1): {1: one},
        (0, 2): {2: one},
        (0, 3): {3: one},
        (1, 0): {1: one},
        (2, 0): {2: one},
        (3, 0): {3: one},
        (1, 2): {3: one},
        (2, 1): {3: -one},
    }
    return SurfaceRing(
        name="a0",
        mode="open",
        names=("1", "a", "b", "w"),
        degrees=(0, 1, 1, 2),
        perversities=(0, 1, 1, 2),
        unit=0,
        mul=mul,
        diag2={},
        euler={},
    )


def _preset_dynkin(name: str) -> SurfaceRing:
    k = _DYNKIN_K[name]
    one = Fraction(1)
    names = ("1",) + tuple(f"E{i}" for i in range(1, k + 1)) + ("S",)
    size = k + 2
    mul: dict[tuple[int, int], Vec] = {}
    for i in range(size):
        mul[(0, i)] = {i: one}
        mul[(i, 0)] = {i: one}
    mul[(0, 0)] = {0: one}
    diag2 = {0: {(i, i): -one for i in range(1, k + 1)}}
    return SurfaceRing(
        name=name,
        mode="open",
        names=names,
        degrees=(0,) + (2,) * (k + 1),
        perversities=(0,) + (1,) * k + (2,),
        unit=0,
        mul=mul,
        diag2=diag2,
        euler={},
    )


def _preset_k3() -> SurfaceRing:
    one = Fraction(1)
    names = ("1", "f", "s") + tuple(f"m{i}" for i in range(1, 21)) + ("pt",)
    degrees = (0, 2, 2) + (2,) * 20 + (4,)
    perversities = (0, 0, 2) + (1,) * 20 + (2,)
    size = 24
    top = 23
    # Gram matrix of H^2 in basis f, s, m1..m20: the section pairs the fiber,
    # the middle block is two negated E8 Gram matrices plus two hyperbolic planes.
    gram = [[Fraction(0)] * 22 for _ in range(22)]
    gram[0][1] = gram[1][0] = one
    gram[1][1] = Fraction(-2)
    cartan = e8_cartan()
    for copy in range(2):
        base = 2 + 8 * copy
        for i in range(8):
            for j in range(8):
                gram[base + i][base + j] = -cartan[i][j]
    for base in (18, 20):
        gram[base][base + 1] = gram[base + 1][base] = one
    mul: dict[tuple[int, int], Vec] = {}
    for i in range(size):
        mul[(0, i)] = {i: one}
        mul[(i, 0)] = {i: one}
    mul[(0, 0)] = {0: one}
    for i in range(22):
        for j in range(22):
            if gram[i][j]:
                mul[(1 + i, 1 + j)] = {top: gram[i][j]}
    pairing = [[Fraction(0)] * size for _ in range(size)]
    pairing[0][top] = pairing[top][0] = one
    for i in range(22):
        for j in range(22):
            pairing[1 + i][1 + j] = gram[i][j]
    return SurfaceRing(
        name="k3",
        mode="compact",
        names=names,
        degrees=degrees,
        perversities=perversities,
        unit=0,
        mul=mul,
        pairing=pairing,
        euler={top: Fraction(24)},
    )


def _preset_abelian() -> SurfaceRing:
    """Exterior algebra on a1, a2 (perversity 0) and b1, b2 (perversity 1).

    A basis element is a subset of the four odd generators taken in the fixed
    order a1 < a2 < b1 < b2; the product of disjoint subsets carries the
    Koszul sign of merging the two sorted sequences.
    """
    gens = ("a1", "a2", "b1", "b2")
    subsets: list[tuple[int, ...]] = []
    for mask in range(16):
        subsets.append(tuple(i for i in range(4) if mask >> i & 1))
    subsets.sort(key=lambda s: (len(s), s))
    names = tuple("".join(gens[i] for i in s) if s else "1" for s in subsets)
    degrees = tuple(len(s) for s in subsets)
    perversities = tuple(sum(1 for i in s if i >= 2) for s in subsets)
    index_of = {s: i for i, s in enumerate(subsets)}

    def merge_sign(s: tuple[int, ...], t: tuple[int, ...]) -> int:
        inversions = sum(1 for a in s for b in t if b < a)
        return -1 if inversions % 2 else 1

    one = Fraction(1)
    mul: dict[tuple[int, int], Vec] = {}
    for si, s in enumerate(subsets):
        for ti, t in enumerate(subsets):
            if set(s) & set(t):
                continue
            merged = tuple(sorted(s + t))
            mul[(si, ti)] = {index_of[merged]: Fraction(merge_sign(s, t))}
    size = 16
    top = index_of[(0, 1, 2, 3)]
    pairing = [[Fraction(0)] * size for _ in range(size)]
    for si in range(size):
        for ti in range(size):
            pairing[si][ti] = mul.get((si, ti), {}).get(top, Fraction(0))
    return SurfaceRing(
        name="abelian",
        mode="compact",
        names=names,
        degrees=degrees,
        perversities=perversities,
        unit=0,
        mul=mul,
        pairing=pairing,
        euler={},
    )


_PRESET_BUILDERS = {
    "a0": _preset_a0,
    "d4": lambda: _preset_dynkin("d4"),
    "e6": lambda: _preset_dynkin("e6"),
    "e7": lambda: _preset_dynkin("e7"),
    "e8": lambda: _preset_dynkin("e8"),
    "k3": _preset_k3,
    "abelian": _preset_abelian,
}

_PRESET_CACHE: dict[str, SurfaceRing] = {}


def preset(name: str) -> SurfaceRing:
    """One of the named rings: a0 | d4 | e6 | e7 | e8 | k3 | abelian."""
    if name not in _PRESET_BUILDERS:
        raise UsageError(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")
    if name not in _PRESET_CACHE:
        _PRESET_CACHE[name] = _PRESET_BUILDERS[name]()
    return _PRESET_CACHE[name]


# -- serialization ----------------------------------------------------------


def _render_sum(ring: SurfaceRing, vec: Vec) -> str:
    return " + ".join(f"{vec[i]}*{ring.names[i]}" for i in sorted(vec))


def _render_tensor_sum(ring: SurfaceRing, tensor: Tensor) -> str:
    return " + ".join(
        f"{tensor[key]}*{ring.names[key[0]]}x{ring.names[key[1]]}"
        for key in sorted(tensor)
    )


def save_ring(ring: SurfaceRing) -> str:
    lines = [f"ring name={ring.name} mode={ring.mode}"]
    for nm, d, p in zip(ring.names, ring.degrees, ring.perversities):
        lines.append(f"basis {nm} degree={d} perversity={p}")
    lines.append(f"unit {ring.names[ring.unit]}")
    for i in range(ring.size):
        for j in range(ring.size):
            entries = ring.mul_basis(i, j)
            if entries:
                lines.append(
                    f"mul {ring.names[i]} {ring.names[j]} = "
                    + _render_sum(ring, dict(entries))
                )
    if ring.pairing is not None:
        for i in range(ring.size):
            for j in range(ring.size):
                if ring.pairing[i][j]:
                    lines.append(
                        f"pairing {ring.names[i]} {ring.names[j]} = {ring.pairing[i][j]}"
                    )
    if ring.diag2 is not None:
        for g in sorted(ring.diag2):
            if ring.diag2[g]:
                lines.append(
                    f"diag2 {ring.names[g]} = "
                    + _render_tensor_sum(ring, ring.diag2[g])
                )
    lines.append(f"euler = {_render_sum(ring, ring.euler)}".rstrip())
    return "\n".join(lines) + "\n"


def _parse_sum(text: str, index_of: dict[str, int]) -> Vec:
    text = text.strip()
    if not text:
        return {}
    out: Vec = {}
    for term in text.split("+"):
        term = term.strip()
        if "*" not in term:
            raise UsageError(f"malformed term {term!r}; expected <coeff>*<name>")
        coeff_text, name = term.split("*", 1)
        name = name.strip()
        if name not in index_of:
            raise UsageError(f"unknown basis element {name!r}")
        try:
            coeff = Fraction(coeff_text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed coefficient in {term!r}") from exc
        idx = index_of[name]
        out[idx] = out.get(idx, Fraction(0)) + coeff
    return {i: c for i, c in out.items() if c}


def _split_tensor_name(token: str, index_of: dict[str, int]) -> tuple[int, int]:
    candidates = []
    for pos, ch in enumerate(token):
        if ch != "x":
            continue
        left, right = token[:pos], token[pos + 1 :]
        if left in index_of and right in index_of:
            candidates.append((index_of[left], index_of[right]))
    if len(candidates) != 1:
        raise UsageError(f"cannot split tensor term {token!r} into two basis names")
    return candidates[0]


def _parse_tensor_sum(text: str, index_of: dict[str, int]) -> Tensor:
    text = text.strip()
    if not text:
        return {}
    out: Tensor = {}
    for term in text.split("+"):
        term = term.strip()
        if "*" not in term:
            raise UsageError(f"malformed tensor term {term!r}")
        coeff_text, name = term.split("*", 1)
        key = _split_tensor_name(name.strip(), index_of)
        try:
            coeff = Fraction(coeff_text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed coefficient in {term!r}") from exc
        out[key] = out.get(key, Fraction(0)) + coeff
    return {k: c for k, c in out.items() if c}


def load_ring(text: str) -> SurfaceRing:
    """Parse and validate a ring document; any axiom violation rejects it.

    The per-element perversities must describe a filtered basis (the span of
    the elements with perversity <= p realizes the p-th filtration step);
    downstream perversity bookkeeping is defined through basis support and no
    change-of-basis search is attempted.
    """
    header = None
    basis: list[tuple[str, int, int]] = []
    unit_name = None
    mul_lines: list[tuple[str, str, str]] = []
    pairing_lines: list[tuple[str, str, str]] = []
    diag2_lines: list[tuple[str, str]] = []
    euler_text = ""
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, _, rest = line.partition(" ")
        if kind == "ring":
            fields = dict(part.split("=", 1) for part in rest.split() if "=" in part)
            if "name" not in fields or "mode" not in fields:
                raise UsageError(f"malformed ring header: {line!r}")
            header = (fields["name"], fields["mode"])
        elif kind == "basis":
            parts = rest.split()
            if len(parts) != 3:
                raise UsageError(f"malformed basis line: {line!r}")
            nm = parts[0]
            fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
            try:
                basis.append((nm, int(fields["degree"]), int(fields["perversity"])))
            except (KeyError, ValueError) as exc:
                raise UsageError(f"malformed basis line: {line!r}") from exc
        elif kind == "unit":
            unit_name = rest.strip()
        elif kind == "mul":
            left, rhs = rest.split("=", 1)
            a, b = left.split()
            mul_lines.append((a, b, rhs))
        elif kind == "pairing":
            left, rhs = rest.split("=", 1)
            a, b = left.split()
            pairing_lines.append((a, b, rhs))
        elif kind == "diag2":
            left, rhs = rest.split("=", 1)
            diag2_lines.append((left.strip(), rhs))
        elif kind == "euler":
            euler_text = rest.split("=", 1)[1] if "=" in rest else ""
        else:
            raise UsageError(f"unknown ring document line: {line!r}")
    if header is None:
        raise UsageError("missing `ring name=... mode=...` header")
    if unit_name is None:
        raise UsageError("missing `unit <name>` line")
    name, mode = header
    names = [b[0] for b in basis]
    index_of = {nm: i for i, nm in enumerate(names)}
    if unit_name not in index_of:
        raise UsageError(f"unit {unit_name!r} is not a basis element")
    mul: dict[tuple[int, int], Vec] = {}
    for a, b, rhs in mul_lines:
        if a not in index_of or b not in index_of:
            raise UsageError(f"mul line references unknown element: {a} {b}")
        mul[(index_of[a], index_of[b])] = _parse_sum(rhs, index_of)
    pairing = None
    if mode == "compact" or pairing_lines:
        pairing = [[Fraction(0)] * len(names) for _ in names]
        for a, b, rhs in pairing_lines:
            try:
                pairing[index_of[a]][index_of[b]] = Fraction(rhs.strip())
            except (KeyError, ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"malformed pairing line for {a} {b}") from exc
    diag2 = None
    if mode == "open" or diag2_lines:
        diag2 = {}
        for g, rhs in diag2_lines:
            if g not in index_of:
                raise UsageError(f"diag2 line references unknown element {g!r}")
            diag2[index_of[g]] = _parse_tensor_sum(rhs, index_of)
    ring = SurfaceRing(
        name=name,
        mode=mode,
        names=names,
        degrees=[b[1] for b in basis],
        perversities=[b[2] for b in basis],
        unit=index_of[unit_name],
        mul=mul,
        pairing=pairing,
        euler=_parse_sum(euler_text, index_of),
        diag2=diag2,
    )
    report = validate(ring)
    if not report.passed:
        raise DataError(
            "ring document failed validation:\n" + report.render_text()
        )
    return ring


# -- diagonal pushforward ----------------------------------------------------


def diagonal_push(ring: SurfaceRing, m: int, gamma: Vec | int) -> Tensor:
    """Gysin pushforward of gamma along the small diagonal into m tensor slots.

    m = 1 returns gamma itself.  In compact mode m = 2 is the dual-basis
    formula

        Delta_2(gamma) = sum_i (-1)^deg(b_i) alpha_i (x) (b_i . gamma)

    with {alpha_i} Poincare-dual to the basis {b_i}; the sign makes the
    adjunction  <Delta_2(gamma), x (x) y> = <gamma, x.y>  hold with the Koszul
    convention on the tensor-square pairing.  In open mode m = 2 comes from
    the ring's diag2 table, extended linearly.  Higher m iterates the m = 2
    map on the first tensor slot; the degree shift of Delta_2 is even, so the
    iteration inserts no signs.
    """
    if m < 1:
        raise UsageError("diagonal_push needs m >= 1")
    if isinstance(gamma, int):
        gamma = {gamma: 1}
    gamma = {i: c for i, c in gamma.items() if c}
    if m == 1:
        return dict(((i,), c) for i, c in gamma.items())
    out: Tensor = {}
    for g, coeff in gamma.items():
        for key, c in _diag_push_basis(ring, m, g).items():
            acc = out.get(key, 0) + coeff * c
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
    return out


def _diag_push_basis(ring: SurfaceRing, m: int, g: int) -> Tensor:
    cached = ring._diag_cache.get((m, g))
    if cached is not None:
        return cached
    if m == 2:
        out: Tensor = {}
        if ring.is_compact:
            duals = ring.dual_rows()
            for i in range(ring.size):
                sign = -1 if ring.degrees[i] % 2 else 1
                prod = ring.mul_class({i: 1}, {g: 1})
                if not prod:
                    continue
                for a, ca in duals[i].items():
                    for b, cb in prod.items():
                        c = sign * ca * cb
                        acc = out.get((a, b), 0) + c
                        if acc:
                            out[(a, b)] = acc
                        else:
                            out.pop((a, b), None)
        else:
            if ring.diag2 is None:
                raise ModeError(f"open ring {ring.name} carries no diag2 table")
            out = dict(ring.diag2.get(g, {}))
    else:
        out = {}
        for key, c in _diag_push_basis(ring, m - 1, g).items():
            head = _diag_push_basis(ring, 2, key[0])
            for (a, b), c2 in head.items():
                new_key = (a, b) + key[1:]
                acc = out.get(new_key, 0) + c * c2
                if acc:
                    out[new_key] = acc
                else:
                    out.pop(new_key, None)
    ring._diag_cache[(m, g)] = out
    return out


# -- filtered basis (signed orthonormal) --------------------------------------


@dataclass(frozen=True)
class FilteredBasisEntry:
    perversity: int
    degree: int
    vector: tuple[tuple[int, Fraction], ...]

    def as_vec(self) -> Vec:
        return dict(self.vector)


@dataclass(frozen=True)
class FilteredBasis:
    """Basis adapted to the perverse filtration, signed orthonormal.

    Entries are grouped by (perversity, degree) blocks in lexicographic
    order.  For complementary blocks A before B (deg_A + deg_B = 4 and
    perv_A + perv_B = 2) the pairing of matched entries, evaluated in the
    order (A, B), is +1; the middle block (perversity 1, degree 2) pairs
    diagonally with signs recorded in middle_signs; every other pairing
    vanishes.  For odd-degree pairs the reversed evaluation order flips the
    sign, which is forced by graded commutativity of the product.
    """

    ring_name: str
    entries: tuple[FilteredBasisEntry, ...]
    middle_signs: tuple[int, ...]

    def blocks(self) -> dict[tuple[int, int], list[FilteredBasisEntry]]:
        out: dict[tuple[int, int], list[FilteredBasisEntry]] = {}
        for e in self.entries:
            out.setdefault((e.perversity, e.degree), []).append(e)
        return out


def _gram(ring: SurfaceRing, rows: list[Vec], cols: list[Vec]) -> list[list[Fraction]]:
    return [[ring.pairing_eval(r, c) for c in cols] for r in rows]


def _perfect_sqrt(n: int) -> int | None:
    r = isqrt(n)
    return r if r * r == n else None


def _is_pm_square(c: Fraction) -> tuple[bool, Fraction, int]:
    """c = sign * r^2 with r rational?  Returns (ok, r, sign)."""
    if c == 0:
        return (False, Fraction(0), 0)
    sign = 1 if c > 0 else -1
    a = abs(c)
    rn = _perfect_sqrt(a.numerator)
    rd = _perfect_sqrt(a.denominator)
    if rn is None or rd is None:
        return (False, Fraction(0), 0)
    return (True, Fraction(rn, rd), sign)


def _vec_sub(u: Vec, v: Vec, c: Fraction) -> Vec:
    out = dict(u)
    for i, x in v.items():
        acc = out.get(i, Fraction(0)) - c * x
        if acc:
            out[i] = acc
        else:
            out.pop(i, None)
    return out


def diagonalize_pm1(
    ring: SurfaceRing, vectors: list[Vec]
) -> tuple[list[Vec], list[int]]:
    """Rewrite the span of `vectors` with a basis whose Gram matrix is
    diagonal with entries +-1 under the ring pairing.

    Strategy: peel off vectors whose self-pairing is +- a rational square;
    split hyperbolic planes off at isotropic basis vectors; finally match
    residual connected blocks against the E8 Gram matrix (whose rational
    orthonormalization is explicit via the coordinate model).  A block this
    procedure cannot reduce raises DataError: not every rational form is
    +-1-diagonalizable, and this implementation does not attempt general
    quadratic-form classification.
    """
    work = [dict(v) for v in vectors]
    done: list[Vec] = []
    signs: list[int] = []

    def g(u: Vec, v: Vec) -> Fraction:
        return ring.pairing_eval(u, v)

    progress = True
    while work and progress:
        progress = False
        # square-norm pivots
        i = 0
        while i < len(work):
            ok, r, sign = _is_pm_square(g(work[i], work[i]))
            if ok:
                v = work.pop(i)
                c = g(v, v)
                unit = {k: x / r for k, x in v.items()}
                done.append(unit)
                signs.append(sign)
                work = [_vec_sub(w, v, g(w, v) / c) for w in work]
                progress = True
            else:
                i += 1
        # hyperbolic planes at isotropic vectors
        i = 0
        while i < len(work):
            if g(work[i], work[i]) != 0:
                i += 1
                continue
            j = next(
                (j for j in range(len(work)) if j != i and g(work[i], work[j]) != 0),
                None,
            )
            if j is None:
                i += 1
                continue
            e = work[i]
            f = work[j]
            c = g(e, f)
            f = _vec_sub(f, e, g(f, f) / (2 * c))
            f = {k: x / c for k, x in f.items()}
            half = Fraction(1, 2)
            x_vec = {k: f.get(k, Fraction(0)) * half + e.get(k, Fraction(0)) for k in set(e) | set(f)}
            y_vec = {k: e.get(k, Fraction(0)) - f.get(k, Fraction(0)) * half for k in set(e) | set(f)}
            x_vec = {k: v for k, v in x_vec.items() if v}
            y_vec = {k: v for k, v in y_vec.items() if v}
            done.extend([x_vec, y_vec])
            signs.extend([1, -1])
            rest = [w for idx, w in enumerate(work) if idx not in (i, j)]
            work = [
                _vec_sub(_vec_sub(w, e, g(w, f)), f, g(w, e)) for w in rest
            ]
            progress = True
            i = 0

    if work:
        # residual definite blocks: match connected components against E8
        gram = _gram(ring, work, work)
        n = len(work)
        seen: set[int] = set()
        cartan = e8_cartan()
        t8 = _e8_orthonormalizer()
        for start in range(n):
            if start in seen:
                continue
            component = [start]
            seen.add(start)
            queue = [start]
            while queue:
                cur = queue.pop()
                for other in range(n):
                    if other not in seen and gram[cur][other] != 0:
                        seen.add(other)
                        component.append(other)
                        queue.append(other)
            component.sort()
            sub = [[gram[a][b] for b in component] for a in component]
            for block_sign in (1, -1):
                if sub == [[block_sign * c for c in row] for row in cartan]:
                    for col in range(8):
                        vec: Vec = {}
                        for row in range(8):
                            coeff = t8[row][col]
                            if coeff:
                                base = work[component[row]]
                                for k, x in base.items():
                                    acc = vec.get(k, Fraction(0)) + coeff * x
                                    if acc:
                                        vec[k] = acc
                                    else:
                                        vec.pop(k, None)
                        done.append(vec)
                        signs.append(block_sign)
                    break
            else:
                raise DataError(
                    "cannot rationally +-1-diagonalize the middle pairing block; "
                    f"residual Gram component of size {len(component)} is neither "
                    "square-normalizable, hyperbolic, nor an E8 block"
                )

    # exact verification of the produced diagonalization
    for i, u in enumerate(done):
        for j, v in enumerate(done):
            expected = Fraction(signs[i]) if i == j else Fraction(0)
            if g(u, v) != expected:
                raise DataError("middle-block diagonalization verification failed")
    return done, signs


def filtered_basis(ring: SurfaceRing) -> FilteredBasis:
    """Signed-orthonormal basis adapted to the filtration (compact rings only).

    Blocks (p, d) are processed in lexicographic order.  A block whose
    complementary block (2-p, 4-d) comes later is taken raw; the middle block
    (1, 2) is +-1-diagonalized; a block whose complement is already built is
    dual-normalized against it and then corrected, by adding same-degree
    elements of strictly lower perversity, until it pairs to zero with every
    non-complementary block.  A final pass evaluates every pairing of the
    output and raises DataError if the signed-orthonormality pattern fails,
    which happens exactly when the input's graded pairing is degenerate or
    not rationally normalizable.
    """
    if not ring.is_compact:
        raise ModeError(f"filtered basis requires a compact ring, {ring.name} is open")
    blocks_raw: dict[tuple[int, int], list[int]] = {}
    for i in range(ring.size):
        blocks_raw.setdefault((ring.perversities[i], ring.degrees[i]), []).append(i)
    order = sorted(blocks_raw)
    out: dict[tuple[int, int], list[Vec]] = {}
    middle_signs: tuple[int, ...] = ()
    for (p, d) in order:
        q, e = 2 - p, 4 - d
        raw: list[Vec] = [{i: Fraction(1)} for i in blocks_raw[(p, d)]]
        if (p, d) == (q, e):
            vecs, signs = diagonalize_pm1(ring, raw)
            out[(p, d)] = vecs
            middle_signs = tuple(signs)
            continue
        if (p, d) < (q, e):
            out[(p, d)] = raw
            continue
        partner = out.get((q, e))
        if partner is None or len(partner) != len(raw):
            raise DataError(
                f"graded pairing degenerate: block (p={p}, d={d}) has no matching "
                f"complement (p={q}, d={e})"
            )
        # dual-normalize: pairing(partner_l, new_i) = delta_li
        pmat = _gram(ring, partner, raw)
        try:
            pinv = linalg.transpose(linalg.inverse(pmat))
        except ValueError:
            raise DataError(
                f"graded pairing degenerate on blocks (p={p}, d={d}) x (p={q}, d={e})"
            )
        vecs = [
            _combine(raw, [pinv[i][l] for l in range(len(raw))])
            for i in range(len(raw))
        ]
        # kill pairings against other same-degree-e blocks with j > q
        for j in range(q + 1, 3):
            if (j, e) not in out or (j, e) == (p, d):
                continue
            target = out[(j, e)]
            killer = out[(2 - j, d)]
            kmat = _gram(ring, killer, target)
            rmat = _gram(ring, vecs, target)
            try:
                kinv = linalg.inverse(kmat)
            except ValueError:
                raise DataError(
                    f"graded pairing degenerate on blocks (p={2-j}, d={d}) x (p={j}, d={e})"
                )
            coeffs = linalg.matmul(rmat, kinv)
            vecs = [
                _vec_sub_many(v, killer, coeffs[i])
                for i, v in enumerate(vecs)
            ]
        # self-orthogonality inside degree 2 for the top block (p=2, d=2)
        if d == e and (p, d) != (q, e):
            smat = _gram(ring, vecs, vecs)
            half = Fraction(1, 2)
            vecs = [
                _vec_sub_many(v, partner, [half * smat[i][l] for l in range(len(partner))])
                for i, v in enumerate(vecs)
            ]
        out[(p, d)] = vecs

    entries: list[FilteredBasisEntry] = []
    for (p, d) in order:
        for vec in out[(p, d)]:
            entries.append(
                FilteredBasisEntry(
                    perversity=p,
                    degree=d,
                    vector=tuple(sorted(vec.items())),
                )
            )
    basis = FilteredBasis(
        ring_name=ring.name, entries=tuple(entries), middle_signs=middle_signs
    )
    _verify_filtered_basis(ring, basis)
    return basis


def _combine(vectors: list[Vec], coeffs: list[Fraction]) -> Vec:
    out: Vec = {}
    for c, v in zip(coeffs, vectors):
        if not c:
            continue
        for i, x in v.items():
            acc = out.get(i, Fraction(0)) + c * x
            if acc:
                out[i] = acc
            else:
                out.pop(i, None)
    return out


def _vec_sub_many(v: Vec, basis_vecs: list[Vec], coeffs: list[Fraction]) -> Vec:
    out = dict(v)
    for c, b in zip(coeffs, basis_vecs):
        if not c:
            continue
        for i, x in b.items():
            acc = out.get(i, Fraction(0)) - c * x
            if acc:
                out[i] = acc
            else:
                out.pop(i, None)
    return out


def _verify_filtered_basis(ring: SurfaceRing, basis: FilteredBasis) -> None:
    blocks = basis.blocks()
    keys = sorted(blocks)
    for ka in keys:
        for kb in keys:
            if kb < ka:
                continue
            pa, da = ka
            pb, db = kb
            complementary = pa + pb == 2 and da + db == 4
            for i, ea in enumerate(blocks[ka]):
                for j, eb in enumerate(blocks[kb]):
                    value = ring.pairing_eval(ea.as_vec(), eb.as_vec())
                    if not complementary:
                        expected = Fraction(0)
                    elif ka == kb:
                        expected = (
                            Fraction(basis.middle_signs[i]) if i == j else Fraction(0)
                        )
                    else:
                        expected = Fraction(1) if i == j else Fraction(0)
                    if value != expected:
                        raise DataError(
                            "filtered basis verification failed at "
                            f"blocks {ka} x {kb}, entries {i}, {j}: "
                            f"pairing {value}, expected {expected}"
                        )
