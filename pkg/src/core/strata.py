"""Splitting types and dimension counts for sheaves on Hirzebruch surfaces.

For a sheaf F of rank r with c1 = 0 and c2 = n on Y_ell that is trivial on the
generic fiber, R^1 pi_* F(-1) splits as a sum of O(-a_j)^{r_j}; the splitting
type and the number n_F = sum a_j r_j stratify the moduli space.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from core.errors import InvalidInput, RankOutOfRange


@dataclass(frozen=True, order=True)
class SplitType:
    """A splitting type ((a_1, r_1), ..., (a_p, r_p)) with a_1 < ... < a_p."""

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        """Validate the increasing degrees and positive multiplicities."""
        degrees = [a for a, _ in self.parts]
        if not self.parts:
            raise InvalidInput("a splitting type needs at least one summand")
        if degrees[0] < 0 or any(x >= y for x, y in zip(degrees, degrees[1:])):
            raise InvalidInput(f"degrees must be 0 <= a_1 < a_2 < ..., got {degrees}")
        if any(r < 1 for _, r in self.parts):
            raise InvalidInput("multiplicities must be positive")

    @property
    def rank(self) -> int:
        """Return r = sum r_j."""
        return sum(r for _, r in self.parts)

    @property
    def n_f(self) -> int:
        """Return n_F = sum a_j r_j."""
        return sum(a * r for a, r in self.parts)

    def __str__(self) -> str:
        """Return the bundle, e.g. `O(-2)^2 + O(-3)`."""
        return " + ".join(
            f"O({-a})" + (f"^{r}" if r > 1 else "") for a, r in self.parts
        )


@dataclass(frozen=True)
class BVector:
    """A composition b_1 + ... + b_{n_F} = n into positive parts."""

    b: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate positivity."""
        if any(x < 1 for x in self.b):
            raise InvalidInput(f"entries must be positive, got {self.b}")

    @property
    def n(self) -> int:
        """Return the sum of the entries."""
        return sum(self.b)


def _split_types(
    rank_left: int, degree_left: int, min_a: int
) -> Iterator[tuple[tuple[int, int], ...]]:
    if rank_left == 0:
        if degree_left == 0:
            yield ()
        return
    for a in range(min_a, degree_left + 1):
        for r in range(1, rank_left + 1):
            if a * r > degree_left:
                break
            for rest in _split_types(rank_left - r, degree_left - a * r, a + 1):
                yield ((a, r), *rest)


def enumerate_split_types(r: int, n_f: int) -> list[SplitType]:
    """Return every splitting type of rank r and degree n_F, lexicographically."""
    if r < 1 or n_f < 0:
        raise InvalidInput(f"need r >= 1 and n_F >= 0, got {r}, {n_f}")
    return sorted(SplitType(parts) for parts in _split_types(r, n_f, 0))


def generic_split(r: int, n_f: int) -> SplitType:
    """Return the most balanced splitting type of rank r and degree n_F.

    Notes
    -----
    a_1 = floor(n_F / r), r_1 = r + r*a_1 - n_F, a_2 = a_1 + 1,
    r_2 = n_F - r*a_1; the second summand is dropped when r divides n_F.

    """
    if r < 1 or n_f < 0:
        raise InvalidInput(f"need r >= 1 and n_F >= 0, got {r}, {n_f}")
    a1 = n_f // r
    r1 = r + r * a1 - n_f
    r2 = n_f - r * a1
    if r2 == 0:
        return SplitType(((a1, r1),))
    return SplitType(((a1, r1), (a1 + 1, r2)))


def dim_end(t: SplitType) -> int:
    """Return dim End of the split bundle: sum over i' >= i of r_i' r_i (a_i' - a_i + 1)."""
    total = 0
    for i, (a_i, r_i) in enumerate(t.parts):
        for a_j, r_j in t.parts[i:]:
            total += r_j * r_i * (a_j - a_i + 1)
    return total


def ext1_q_pil(r: int, n: int, n_f: int) -> int:
    """Return ext^1(Q_F, F) = r(n + n_F)."""
    if not n >= n_f >= 0:
        raise InvalidInput(f"need n >= n_F >= 0, got {n}, {n_f}")
    return r * (n + n_f)


@dataclass(frozen=True)
class ModuliDims:
    """Dimension counts of the moduli space and the Hilbert-map picture."""

    moduli_dim: int
    hilb_fiber_dim: int
    group_dim: int
    extension_space_dim: int
    framed_dim: int
    h1_stable: int

    @property
    def consistent(self) -> bool:
        """Return True when extension space minus group equals the fiber."""
        return self.extension_space_dim - self.group_dim == self.hilb_fiber_dim


def check_rank_range(r: int, n: int) -> None:
    """Raise RankOutOfRange unless n >= r >= 2."""
    if r < 2 or n < r:
        raise RankOutOfRange(f"need n >= r >= 2, got r={r}, n={n}")


def moduli_dims(r: int, n: int) -> ModuliDims:
    """Return the dimension table for rank r and c2 = n.

    Returns
    -------
    ModuliDims
        2rn - r^2 + 1, 2rn - r^2 - n + 1, r^2 + n - 1, 2nr, the framed
        moduli dimension 2nr and h^1(F) = n - r.

    """
    check_rank_range(r, n)
    return ModuliDims(
        moduli_dim=2 * r * n - r * r + 1,
        hilb_fiber_dim=2 * r * n - r * r - n + 1,
        group_dim=r * r + n - 1,
        extension_space_dim=2 * n * r,
        framed_dim=framed_moduli_dim(r, n),
        h1_stable=h1_stable(r, n),
    )


def check_ineq_fg(r: int, n: int, r_prime: int, n_prime: int) -> bool:
    """Return 2rn - r^2 + 1 > 2r'n' - r'^2 + 1 for a destabilizing quotient."""
    if not (1 <= r_prime < r and 0 <= n_prime <= n and n_prime >= r_prime):
        raise InvalidInput(
            f"need 1 <= r' < r, r' <= n' <= n, got {(r, n, r_prime, n_prime)}"
        )
    return 2 * r * n - r * r + 1 > 2 * r_prime * n_prime - r_prime**2 + 1


def enumerate_bvectors(n: int, n_f: int) -> list[BVector]:
    """Return the compositions of n into n_F positive parts, lexicographically."""
    if not 1 <= n_f <= n:
        raise InvalidInput(f"need 1 <= n_F <= n, got {n_f}, {n}")
    vectors = []
    for cuts in combinations(range(1, n), n_f - 1):
        edges = (0, *cuts, n)
        vectors.append(BVector(tuple(y - x for x, y in zip(edges, edges[1:]))))
    vectors.sort(key=lambda v: v.b)
    return vectors


def ext1_pil_lower_bound(r: int, n: int, n_f: int) -> int:
    """Return the lower bound r(n - n_F) for ext^1(pi^*L, F)."""
    return r * (n - n_f)


def chi_pil_f(r: int, n: int, n_f: int) -> int:
    """Return chi(pi^*L, F) = r^2 - r(n - n_F) for L of generic type."""
    return r * r - r * (n - n_f)


def stratum_dim_bound(r: int, n: int, n_f: int) -> int:
    """Return ext^1(F,F) - r(n - n_F) with ext^1(F,F) = 2rn - r^2 + 1."""
    check_rank_range(r, n)
    if not n >= n_f >= 0:
        raise InvalidInput(f"need n >= n_F >= 0, got {n}, {n_f}")
    return 2 * r * n - r * r + 1 - ext1_pil_lower_bound(r, n, n_f)


@dataclass(frozen=True)
class StratumRow:
    """One row of the stratification table."""

    n_f: int
    generic: SplitType
    split_types: int
    dim_end_generic: int
    ext1_q: int
    pushforward_degree: int
    dim_bound: int


def strata_table(r: int, n: int) -> list[StratumRow]:
    """Return the per-n_F rows 0 <= n_F <= n for rank r and c2 = n."""
    check_rank_range(r, n)
    return [
        StratumRow(
            n_f=n_f,
            generic=generic_split(r, n_f),
            split_types=len(enumerate_split_types(r, n_f)),
            dim_end_generic=dim_end(generic_split(r, n_f)),
            ext1_q=ext1_q_pil(r, n, n_f),
            pushforward_degree=pushforward_degree(n, n_f),
            dim_bound=stratum_dim_bound(r, n, n_f),
        )
        for n_f in range(n + 1)
    ]


def framed_moduli_dim(r: int, n: int) -> int:
    """Return 2nr, the dimension of the framed moduli space."""
    check_rank_range(r, n)
    return 2 * n * r


def h1_stable(r: int, n: int) -> int:
    """Return h^1(F) = n - r for a stable F with c1 = 0, c2 = n."""
    check_rank_range(r, n)
    return n - r


def pushforward_degree(n: int, n_f: int) -> int:
    """Return deg R^1 pi_* F = n - n_F."""
    if not n >= n_f >= 0:
        raise InvalidInput(f"need n >= n_F >= 0, got {n}, {n_f}")
    return n - n_f
