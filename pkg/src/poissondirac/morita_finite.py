"""Morita calculus for finite groups: bispaces, tensor products, Picard groups.

A (G,H)-bispace is a finite set with commuting left G- and right H-actions.
The tensor product ``X * Y`` is the orbit set of ``X x Y`` under
``(x, y) -> (x h, h^-1 y)``.  A bispace is invertible when both actions are
free and transitive; the invertible (G,G)-bispaces up to isomorphism form
Pic(G), which is compared against Out(G) = Aut(G)/Inn(G) from a separate
automorphism search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

__all__ = [
    "FiniteGroup",
    "Bispace",
    "tensor",
    "is_invertible",
    "bispace_iso",
    "automorphisms",
    "inner_automorphisms",
    "outer_automorphism_order",
    "groups_isomorphic",
    "PicardResult",
    "picard_group",
    "left_transitive_bispaces",
    "small_groups",
    "CensusResult",
    "invertibility_census",
    "CapExceeded",
]

Perm = tuple[int, ...]


class CapExceeded(ValueError):
    code = "cap_exceeded"


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """Group given by its multiplication table on ``0..n-1``; validated on construction."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = ""):
        n = len(table)
        t = tuple(tuple(int(v) for v in row) for row in table)
        if n == 0 or any(len(r) != n for r in t):
            raise ValueError("multiplication table must be a non-empty square")
        if any(not 0 <= v < n for r in t for v in r):
            raise ValueError("table entries out of range")
        ident = [e for e in range(n) if all(t[e][x] == x and t[x][e] == x for x in range(n))]
        if not ident:
            raise ValueError("no identity element")
        e = ident[0]
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise ValueError(f"not associative at ({a}, {b}, {c})")
        inv = []
        for a in range(n):
            r = [b for b in range(n) if t[a][b] == e]
            if len(r) != 1 or t[r[0]][a] != e:
                raise ValueError(f"element {a} has no inverse")
            inv.append(r[0])
        self.table = t
        self.order = n
        self.identity = e
        self.inverse = tuple(inv)
        self.name = name or f"group of order {n}"

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r})"

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        sub = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            a = frontier.pop()
            for s in gens:
                b = self.table[a][s]
                if b not in sub:
                    sub.add(b)
                    frontier.append(b)
        return frozenset(sub)

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily by descending element order."""
        gens: list[int] = []
        sub = frozenset([self.identity])
        for a in sorted(range(self.order), key=lambda a: (-self.element_order(a), a)):
            if a not in sub:
                gens.append(a)
                sub = self.closure(gens)
            if len(sub) == self.order:
                break
        return gens

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in range(self.order) for b in range(a))

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, by closing under joins starting from cyclic ones."""
        subs = {self.closure([a]) for a in range(self.order)}
        frontier = list(subs)
        while frontier:
            new = []
            for s in frontier:
                for a in range(self.order):
                    if a not in s:
                        j = self.closure(list(s) + [a])
                        if j not in subs:
                            subs.add(j)
                            new.append(j)
            frontier = new
        return sorted(subs, key=lambda s: (len(s), sorted(s)))

    def conjugate_set(self, s: Iterable[int], g: int) -> frozenset[int]:
        gi = self.inverse[g]
        return frozenset(self.table[self.table[g][x]][gi] for x in s)

    def subgroups_up_to_conjugacy(self) -> list[frozenset[int]]:
        reps: list[frozenset[int]] = []
        seen: set[frozenset[int]] = set()
        for s in self.subgroups():
            if s in seen:
                continue
            reps.append(s)
            seen.update(self.conjugate_set(s, g) for g in range(self.order))
        return reps

    def normalizer(self, s: frozenset[int]) -> list[int]:
        return [g for g in range(self.order) if self.conjugate_set(s, g) == s]

    def to_json(self) -> dict:
        return {"name": self.name, "table": [list(r) for r in self.table]}

    # presets -----------------------------------------------------------------

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise ValueError("cyclic group needs n >= 1")
        return cls([[(a + b) % n for b in range(n)] for a in range(n)], f"Z{n}")

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of the n-gon, order 2n; element ``2i + j`` is ``r^i s^j``."""
        if n < 1:
            raise ValueError("dihedral group needs n >= 1")

        def mul(a, b):
            i, j = divmod(a, 2)
            k, l = divmod(b, 2)
            # r^i s^j r^k s^l = r^(i + (-1)^j k) s^(j + l)
            return 2 * ((i + (k if j == 0 else -k)) % n) + (j + l) % 2

        return cls([[mul(a, b) for b in range(2 * n)] for a in range(2 * n)], f"D{n}")

    @classmethod
    def from_permutations(cls, gens: Sequence[Perm], name: str = "") -> "FiniteGroup":
        """Permutation group generated by ``gens`` (composition: apply left factor last)."""
        ident = tuple(range(len(gens[0])))
        elems = [ident]
        index = {ident: 0}
        k = 0
        while k < len(elems):
            for g in gens:
                h = tuple(g[v] for v in elems[k])
                if h not in index:
                    index[h] = len(elems)
                    elems.append(h)
            k += 1
        table = [[index[tuple(a[v] for v in b)] for b in elems] for a in elems]
        return cls(table, name)

    @classmethod
    def symmetric3(cls) -> "FiniteGroup":
        return cls.from_permutations([(1, 0, 2), (1, 2, 0)], "S3")

    @classmethod
    def quaternion(cls) -> "FiniteGroup":
        """Q8 from the unit quaternions; element ``2u + s`` is ``(-1)^s * unit_u``."""
        # unit products: i j = k, j k = i, k i = j, squares = -1
        units = "1ijk"
        prod = {
            ("1", u): (u, 0) for u in units
        }
        prod.update({(u, "1"): (u, 0) for u in units})
        prod.update({(u, u): ("1", 1) for u in "ijk"})
        prod.update({("i", "j"): ("k", 0), ("j", "k"): ("i", 0), ("k", "i"): ("j", 0)})
        prod.update({("j", "i"): ("k", 1), ("k", "j"): ("i", 1), ("i", "k"): ("j", 1)})

        def mul(a, b):
            ua, sa = divmod(a, 2)
            ub, sb = divmod(b, 2)
            u, s = prod[(units[ua], units[ub])]
            return 2 * units.index(u) + (s + sa + sb) % 2

        return cls([[mul(a, b) for b in range(8)] for a in range(8)], "Q8")

    @classmethod
    def direct_product(cls, g: "FiniteGroup", h: "FiniteGroup", name: str = "") -> "FiniteGroup":
        m = h.order
        table = [
            [g.table[a // m][b // m] * m + h.table[a % m][b % m] for b in range(g.order * m)]
            for a in range(g.order * m)
        ]
        return cls(table, name or f"{g.name}x{h.name}")

    @classmethod
    def klein(cls) -> "FiniteGroup":
        return cls.direct_product(cls.cyclic(2), cls.cyclic(2), "Z2xZ2")

    @classmethod
    def from_spec(cls, spec: str | Mapping[str, Any]) -> "FiniteGroup":
        """Preset name (``cyclic:n``, ``dihedral:n``, ``s3``, ``q8``, ``klein``) or ``{"table": ...}``."""
        if isinstance(spec, Mapping):
            if "table" not in spec:
                raise ValueError("group JSON needs a 'table'")
            return cls(spec["table"], spec.get("name", ""))
        s = spec.strip().lower()
        if s in ("s3", "sym3"):
            return cls.symmetric3()
        if s == "q8":
            return cls.quaternion()
        if s in ("klein", "v4", "z2xz2"):
            return cls.klein()
        kind, _, n = s.partition(":")
        if kind in ("cyclic", "dihedral") and n.isdigit():
            return cls.cyclic(int(n)) if kind == "cyclic" else cls.dihedral(int(n))
        raise ValueError(f"unknown group preset {spec!r}")


def small_groups() -> list[FiniteGroup]:
    """One group from each isomorphism class of order at most 8."""
    z = FiniteGroup.cyclic
    return [
        z(1), z(2), z(3), z(4), FiniteGroup.klein(), z(5), z(6), FiniteGroup.symmetric3(), z(7), z(8),
        FiniteGroup.direct_product(z(4), z(2), "Z4xZ2"),
        FiniteGroup.direct_product(FiniteGroup.klein(), z(2), "Z2xZ2xZ2"),
        FiniteGroup.dihedral(4), FiniteGroup.quaternion(),
    ]


# ---------------------------------------------------------------------------
# homomorphism and automorphism searches


def _hom_images(g: FiniteGroup, h: FiniteGroup, images: Sequence[int], gens: Sequence[int]) -> list[int] | None:
    """Extend generator images to a map G -> H, or None if that is not a homomorphism."""
    phi = [-1] * g.order
    phi[g.identity] = h.identity
    frontier = [g.identity]
    while frontier:
        a = frontier.pop()
        for s, t in zip(gens, images):
            b, v = g.table[a][s], h.table[phi[a]][t]
            if phi[b] == -1:
                phi[b] = v
                frontier.append(b)
            elif phi[b] != v:
                return None
    for a in range(g.order):
        for b in range(g.order):
            if phi[g.table[a][b]] != h.table[phi[a]][phi[b]]:
                return None
    return phi


def _isomorphisms(g: FiniteGroup, h: FiniteGroup, first_only: bool = False) -> list[tuple[int, ...]]:
    if g.order != h.order:
        return []
    gens = g.generators()
    orders_h = [h.element_order(b) for b in range(h.order)]
    choices = [[b for b in range(h.order) if orders_h[b] == g.element_order(s)] for s in gens]
    out = []
    for images in itertools.product(*choices):
        phi = _hom_images(g, h, images, gens)
        if phi is not None and len(set(phi)) == g.order:
            out.append(tuple(phi))
            if first_only:
                break
    return out


def automorphisms(g: FiniteGroup) -> list[tuple[int, ...]]:
    """All automorphisms, by searching images of a generating set."""
    return _isomorphisms(g, g)


def inner_automorphisms(g: FiniteGroup) -> set[tuple[int, ...]]:
    return {tuple(g.table[g.table[c][x]][g.inverse[c]] for x in range(g.order)) for c in range(g.order)}


def outer_automorphism_order(g: FiniteGroup) -> tuple[int, int, int]:
    """``(|Aut|, |Inn|, |Out|)``."""
    aut, inn = automorphisms(g), inner_automorphisms(g)
    if len(aut) % len(inn):
        raise AssertionError("|Inn| does not divide |Aut|")
    return len(aut), len(inn), len(aut) // len(inn)


def groups_isomorphic(g: FiniteGroup, h: FiniteGroup) -> bool:
    return bool(_isomorphisms(g, h, first_only=True))


# ---------------------------------------------------------------------------
# bispaces


@dataclass(frozen=True, eq=False)
class Bispace:
    """``l_act[g][x]`` is ``g . x``; ``r_act[x][h]`` is ``x . h``."""

    left: FiniteGroup
    right: FiniteGroup
    points: int
    l_act: tuple[tuple[int, ...], ...]
    r_act: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g, h, n = self.left, self.right, self.points
        la = tuple(tuple(r) for r in self.l_act)
        ra = tuple(tuple(r) for r in self.r_act)
        object.__setattr__(self, "l_act", la)
        object.__setattr__(self, "r_act", ra)
        if len(la) != g.order or any(len(r) != n for r in la):
            raise ValueError("left action table has the wrong shape")
        if len(ra) != n or any(len(r) != h.order for r in ra):
            raise ValueError("right action table has the wrong shape")
        for x in range(n):
            if la[g.identity][x] != x or ra[x][h.identity] != x:
                raise ValueError("identity does not act trivially")
        for a in range(g.order):
            for b in range(g.order):
                ab = g.table[a][b]
                if any(la[ab][x] != la[a][la[b][x]] for x in range(n)):
                    raise ValueError("left action is not an action")
        for a in range(h.order):
            for b in range(h.order):
                ab = h.table[a][b]
                if any(ra[x][ab] != ra[ra[x][a]][b] for x in range(n)):
                    raise ValueError("right action is not an action")
        for a in range(g.order):
            for b in range(h.order):
                if any(ra[la[a][x]][b] != la[a][ra[x][b]] for x in range(n)):
                    raise ValueError("left and right actions do not commute")

    @classmethod
    def regular(cls, g: FiniteGroup) -> "Bispace":
        """G acting on itself by left and right multiplication: the unit for the tensor product."""
        return cls(g, g, g.order, g.table, g.table)

    @classmethod
    def from_homomorphism(cls, g: FiniteGroup, h: FiniteGroup, phi: Sequence[int]) -> "Bispace":
        """Points G, left multiplication, right action ``x . k = x phi(k)`` for ``phi: H -> G``."""
        ra = [[g.table[x][phi[k]] for k in range(h.order)] for x in range(g.order)]
        return cls(g, h, g.order, g.table, ra)

    def flip(self) -> "Bispace":
        """The (H,G)-bispace with ``h . x = x h^-1`` and ``x . g = g^-1 x``."""
        g, h = self.left, self.right
        la = [[self.r_act[x][h.inverse[k]] for x in range(self.points)] for k in range(h.order)]
        ra = [[self.l_act[g.inverse[a]][x] for a in range(g.order)] for x in range(self.points)]
        return Bispace(h, g, self.points, la, ra)

    def disjoint_union(self, other: "Bispace") -> "Bispace":
        _same_groups(self, other)
        n = self.points
        la = [list(self.l_act[a]) + [y + n for y in other.l_act[a]] for a in range(self.left.order)]
        ra = [list(r) for r in self.r_act] + [[y + n for y in r] for r in other.r_act]
        return Bispace(self.left, self.right, n + other.points, la, ra)

    def orbits(self) -> list[list[int]]:
        """Orbits of the combined G x H action."""
        seen, out = set(), []
        for x in range(self.points):
            if x in seen:
                continue
            orb = {self.r_act[self.l_act[a][x]][b] for a in range(self.left.order) for b in range(self.right.order)}
            seen |= orb
            out.append(sorted(orb))
        return out

    def descriptor(self) -> str:
        return f"({self.left.name},{self.right.name})-bispace on {self.points} points"

    def to_json(self) -> dict:
        return {
            "left": self.left.name,
            "right": self.right.name,
            "points": self.points,
            "l_act": [list(r) for r in self.l_act],
            "r_act": [list(r) for r in self.r_act],
        }


def _same_groups(x: Bispace, y: Bispace) -> None:
    if x.left != y.left or x.right != y.right:
        raise ValueError("bispaces are over different group pairs")


def tensor(x: Bispace, y: Bispace) -> Bispace:
    """``(X x Y) / H``; the induced actions are checked to be well defined."""
    if x.right != y.left:
        raise ValueError("group mismatch: right group of X is not the left group of Y")
    h = x.right
    label: dict[tuple[int, int], int] = {}
    reps: list[tuple[int, int]] = []
    for a in range(x.points):
        for b in range(y.points):
            if (a, b) in label:
                continue
            k = len(reps)
            reps.append((a, b))
            for t in range(h.order):
                label[(x.r_act[a][t], y.l_act[h.inverse[t]][b])] = k
    members: list[list[tuple[int, int]]] = [[] for _ in reps]
    for pair, k in label.items():
        members[k].append(pair)
    g, kk = x.left, y.right
    la = [[label[(x.l_act[s][a], b)] for (a, b) in reps] for s in range(g.order)]
    ra = [[label[(a, y.r_act[b][t])] for t in range(kk.order)] for (a, b) in reps]
    for k, mem in enumerate(members):
        for a, b in mem:
            for s in range(g.order):
                if label[(x.l_act[s][a], b)] != la[s][k]:
                    raise AssertionError("left action on the orbit space is not well defined")
            for t in range(kk.order):
                if label[(a, y.r_act[b][t])] != ra[k][t]:
                    raise AssertionError("right action on the orbit space is not well defined")
    return Bispace(g, kk, len(reps), la, ra)


def _free_transitive_left(x: Bispace) -> bool:
    if x.points != x.left.order:
        return False
    return len({x.l_act[a][0] for a in range(x.left.order)}) == x.points


def _free_transitive_right(x: Bispace) -> bool:
    if x.points != x.right.order:
        return False
    return len({x.r_act[0][b] for b in range(x.right.order)}) == x.points


def is_invertible(x: Bispace, check_inverse: bool = True) -> bool:
    """Free and transitive on both sides.

    When true (and ``check_inverse``), the flipped bispace is confirmed to be
    a two-sided inverse up to isomorphism.
    """
    ok = x.points > 0 and _free_transitive_left(x) and _free_transitive_right(x)
    if ok and check_inverse:
        xf = x.flip()
        if bispace_iso(tensor(x, xf), Bispace.regular(x.left)) is None:
            raise AssertionError("X * flip(X) is not the unit bispace")
        if bispace_iso(tensor(xf, x), Bispace.regular(x.right)) is None:
            raise AssertionError("flip(X) * X is not the unit bispace")
    return ok


def bispace_iso(x: Bispace, y: Bispace) -> list[int] | None:
    """An equivariant bijection ``X -> Y`` as a list, or None.

    Backtracking over one representative per orbit; the image of a
    representative fixes the map on its whole orbit.
    """
    if x.left != y.left or x.right != y.right or x.points != y.points:
        return None
    g, h = x.left, x.right
    phi = [-1] * x.points
    used = [False] * y.points
    orbits = x.orbits()
    y_orbit_size = {}
    for orb in y.orbits():
        for p in orb:
            y_orbit_size[p] = len(orb)

    def extend(rep: int, img: int) -> list[int] | None:
        assigned = []
        for a in range(g.order):
            for b in range(h.order):
                p = x.r_act[x.l_act[a][rep]][b]
                q = y.r_act[y.l_act[a][img]][b]
                if phi[p] == -1:
                    if used[q]:
                        _undo(assigned)
                        return None
                    phi[p] = q
                    used[q] = True
                    assigned.append(p)
                elif phi[p] != q:
                    _undo(assigned)
                    return None
        return assigned

    def _undo(assigned):
        for p in assigned:
            used[phi[p]] = False
            phi[p] = -1

    def search(k: int) -> bool:
        if k == len(orbits):
            return True
        rep = orbits[k][0]
        for img in range(y.points):
            if used[img] or y_orbit_size[img] != len(orbits[k]):
                continue
            assigned = extend(rep, img)
            if assigned is None:
                continue
            if search(k + 1):
                return True
            _undo(assigned)
        return False

    return list(phi) if search(0) else None


# ---------------------------------------------------------------------------
# right actions commuting with a transitive left action


def _right_actions(h: FiniteGroup, perms: Sequence[Perm]) -> list[list[Perm]]:
    """All maps ``k -> P_k`` into ``perms`` with ``P_{ab} = P_b o P_a`` (a right action).

    Backtracking over the elements of H; each assignment is propagated
    through products with everything already assigned.
    """
    n = len(perms[0])
    ident = tuple(range(n))
    pset = set(perms)

    def then(p: Perm, q: Perm) -> Perm:  # apply p, then q
        return tuple(q[p[v]] for v in range(n))

    out: list[list[Perm]] = []
    order = [h.identity] + [k for k in range(h.order) if k != h.identity]

    def propagate(assign: dict[int, Perm]) -> dict[int, Perm] | None:
        changed = True
        while changed:
            changed = False
            for a, pa in list(assign.items()):
                for b, pb in list(assign.items()):
                    ab = h.table[a][b]
                    p = then(pa, pb)
                    if ab in assign:
                        if assign[ab] != p:
                            return None
                    else:
                        if p not in pset:
                            return None
                        assign[ab] = p
                        changed = True
        return assign

    def search(assign: dict[int, Perm]) -> None:
        free = [k for k in order if k not in assign]
        if not free:
            out.append([assign[k] for k in range(h.order)])
            return
        k = free[0]
        for p in perms:
            trial = propagate({**assign, k: p})
            if trial is not None:
                search(trial)

    start = propagate({h.identity: ident})
    if start is not None:
        search(start)
    return out


def left_transitive_bispaces(g: FiniteGroup, h: FiniteGroup) -> list[Bispace]:
    """Every (G,H)-bispace with transitive left action, up to isomorphism of the left G-set.

    Points are the cosets G/S for S up to conjugacy; a commuting right action
    is a right action through the maps ``gS -> g n S`` with n in N(S).
    """
    out = []
    for s in g.subgroups_up_to_conjugacy():
        cosets: list[frozenset[int]] = []
        index: dict[int, int] = {}
        for a in range(g.order):
            if a in index:
                continue
            c = frozenset(g.table[a][t] for t in s)
            for v in c:
                index[v] = len(cosets)
            cosets.append(c)
        reps = [min(c) for c in cosets]
        la = [[index[g.table[a][r]] for r in reps] for a in range(g.order)]
        perms = sorted({tuple(index[g.table[r][m]] for r in reps) for m in g.normalizer(s)})
        for action in _right_actions(h, perms):
            ra = [[action[k][i] for k in range(h.order)] for i in range(len(reps))]
            out.append(Bispace(g, h, len(reps), la, ra))
    return out


# ---------------------------------------------------------------------------
# Picard group


@dataclass(frozen=True)
class PicardResult:
    group: FiniteGroup
    order: int
    classes: list[Bispace]
    table: list[list[int]]
    generators: list[int]
    aut_order: int
    inn_order: int
    out_order: int

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "picard_order": self.order,
            "aut_order": self.aut_order,
            "inn_order": self.inn_order,
            "out_order": self.out_order,
            "table": self.table,
            "generators": [
                {"class": k, "descriptor": self.classes[k].descriptor(), "right_twist": list(self.classes[k].r_act[self.group.identity])}
                for k in self.generators
            ],
        }


def picard_group(g: FiniteGroup, cap: int = 24) -> PicardResult:
    """Invertible (G,G)-bispaces up to isomorphism, with the tensor product as group law.

    Every invertible bispace is isomorphic to one on the set G with left
    multiplication, so the enumeration runs over commuting right actions
    on G.  The result is checked against Aut(G)/Inn(G).
    """
    if g.order > cap:
        raise CapExceeded(f"group order {g.order} exceeds the cap {cap}")
    right_mults = [tuple(g.table[x][c] for x in range(g.order)) for c in range(g.order)]
    classes: list[Bispace] = []
    for action in _right_actions(g, right_mults):
        ra = [[action[k][x] for k in range(g.order)] for x in range(g.order)]
        b = Bispace(g, g, g.order, g.table, ra)
        if not is_invertible(b, check_inverse=False):
            continue
        if all(bispace_iso(b, c) is None for c in classes):
            classes.append(b)
    unit = next(k for k, c in enumerate(classes) if bispace_iso(c, Bispace.regular(g)) is not None)
    classes.insert(0, classes.pop(unit))

    def lookup(b: Bispace) -> int:
        for k, c in enumerate(classes):
            if bispace_iso(b, c) is not None:
                return k
        raise AssertionError("tensor of invertible bispaces left the enumerated classes")

    table = [[lookup(tensor(a, b)) for b in classes] for a in classes]
    for k, c in enumerate(classes):
        if lookup(c.flip()) not in [j for j in range(len(classes)) if table[k][j] == 0]:
            raise AssertionError("flip is not the inverse class")

    aut_order, inn_order, out_order = outer_automorphism_order(g)
    if out_order != len(classes):
        raise AssertionError(f"|Pic| = {len(classes)} but |Out| = {out_order}")
    # class of x -> x phi(h) corresponds to phi Inn; tensor matches composition
    inn = inner_automorphisms(g)
    twist = [tuple(c.r_act[g.identity]) for c in classes]

    def out_class(phi):
        return frozenset(tuple(phi[i[v]] for v in range(g.order)) for i in inn)

    cls = [out_class(t) for t in twist]
    if len(set(cls)) != len(classes):
        raise AssertionError("two Picard classes map to the same outer automorphism")
    for a in range(len(classes)):
        for b in range(len(classes)):
            comp = tuple(twist[a][twist[b][v]] for v in range(g.order))
            if out_class(comp) != cls[table[a][b]]:
                raise AssertionError("tensor product does not match composition in Out(G)")

    gens: list[int] = []
    reach = {0}
    for k in range(len(classes)):
        if k in reach:
            continue
        gens.append(k)
        frontier = list(reach)
        while frontier:
            a = frontier.pop()
            for s in gens:
                c = table[a][s]
                if c not in reach:
                    reach.add(c)
                    frontier.append(c)
    return PicardResult(g, len(classes), classes, table, gens, aut_order, inn_order, out_order)


# ---------------------------------------------------------------------------
# invertibility census


@dataclass(frozen=True)
class CensusResult:
    pairs: int
    bispaces: int
    invertible: int
    disagreements: list[str]
    existence_mismatches: list[str]

    @property
    def passed(self) -> bool:
        return not self.disagreements and not self.existence_mismatches


def _has_inverse(x: Bispace) -> bool:
    """Definition-level test: the flip is a two-sided inverse up to isomorphism."""
    xf = x.flip()
    return (
        bispace_iso(tensor(x, xf), Bispace.regular(x.left)) is not None
        and bispace_iso(tensor(xf, x), Bispace.regular(x.right)) is not None
    )


def invertibility_census(groups: Sequence[FiniteGroup] | None = None) -> CensusResult:
    """For all ordered pairs from ``groups`` and every left-transitive bispace,
    compare free-and-transitive with the tensor-inverse test, and check that an
    invertible bispace exists exactly when the groups are isomorphic.
    """
    groups = list(groups or small_groups())
    count = inv = 0
    bad: list[str] = []
    exist_bad: list[str] = []
    for g in groups:
        for h in groups:
            found = False
            for x in left_transitive_bispaces(g, h):
                count += 1
                ft = is_invertible(x, check_inverse=False)
                if ft != _has_inverse(x):
                    bad.append(f"{x.descriptor()}: free-transitive={ft}")
                found |= ft
                inv += ft
            if found != groups_isomorphic(g, h):
                exist_bad.append(f"{g.name} vs {h.name}")
    return CensusResult(len(groups) ** 2, count, inv, bad, exist_bad)
