from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product
from math import factorial, prod
from typing import Iterator, List, Optional, Sequence
import logging

from app.core.config import settings
from app.core.errors import CapExceededError, InvalidStructureError
from app.models.permutation import (
    Coloring,
    MapInstance,
    Matching,
    Permutation,
    compose,
    cycle_count,
    enumerate_matchings,
    is_transitive_pair,
    permutation_with_cycle_type,
)
from app.schemas.mapcount import BoundReport, GeneratingTableRow, MapCountReport


def kahuna_bound(lengths: Sequence[int]) -> Fraction:
    """p n^(k-2) 2^(n-2k+2) 1{n >= 2k-2} for cycle lengths n_1..n_k, p = prod n_i."""
    k = len(lengths)
    n = sum(lengths)
    if n < 2 * k - 2:
        return Fraction(0)
    return prod(lengths) * Fraction(n) ** (k - 2) * 2 ** (n - 2 * k + 2)


def majorant_coefficient(shape: Sequence[int], orders: Sequence[int]) -> Fraction:
    """Coefficient of z^nu in the series majorizing the generating function."""
    degree = sum(v * m for v, m in zip(orders, shape))
    weight = prod((m * 2 ** m) ** v for v, m in zip(orders, shape))
    return Fraction(degree ** sum(orders) * weight, prod(factorial(v) for v in orders))


class MapCountService:
    """Brute-force enumeration of colored maps and their genus"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def enumerate_maps(self, inst: MapInstance) -> Iterator[Matching]:
        """Matchings iota with gamma o iota = gamma acting transitively together with theta."""
        for iota in enumerate_matchings(inst.n, inst.gamma):
            if is_transitive_pair(inst.theta, iota):
                yield iota

    def genus(self, theta: Permutation, iota: Matching) -> int:
        if not is_transitive_pair(theta, iota):
            raise InvalidStructureError(
                f"genus needs a transitive pair; {theta} and {iota} have several orbits"
            )
        n = theta.n
        twice = 2 + n - cycle_count(theta) - n // 2 - cycle_count(compose(theta, iota))
        if twice % 2 or twice < 0:
            raise InvalidStructureError(f"internal error: 2g = {twice} for {theta}, {iota}")
        return twice // 2

    def _check_degree(self, n: int, override_caps: bool):
        if n > settings.DEGREE_CAP and not override_caps:
            raise CapExceededError(
                f"degree n={n} exceeds the cap {settings.DEGREE_CAP}",
                "pass --override-caps or raise PLANARMAP_DEGREE_CAP",
            )

    def count_map0(self, inst: MapInstance, override_caps: bool = False) -> MapCountReport:
        self._check_degree(inst.n, override_caps)
        histogram: Counter = Counter()
        for iota in self.enumerate_maps(inst):
            histogram[self.genus(inst.theta, iota)] += 1
        total = sum(histogram.values())
        self.logger.debug(f"count_map0 {inst.theta} gamma={inst.gamma.to_text()}: total={total}, planar={histogram[0]}")
        return MapCountReport(
            theta=inst.theta.to_cycle_notation(),
            gamma=inst.gamma.to_text(),
            n=inst.n,
            total=total,
            planar=histogram[0],
            genus_histogram=dict(sorted(histogram.items())),
        )

    def check_kahuna_bound(self, inst: MapInstance, override_caps: bool = False) -> BoundReport:
        if not inst.gamma.is_constant():
            raise InvalidStructureError("the counting bound is stated for monochrome colorings")
        planar = self.count_map0(inst, override_caps).planar
        bound = kahuna_bound([len(c) for c in inst.theta.cycles()])
        holds = planar <= bound
        if not holds:
            self.logger.warning(f"counting bound violated for {inst.theta}: {planar} > {bound}")
        return BoundReport(
            name="kahuna-bound", theta=inst.theta.to_cycle_notation(), lhs=str(planar), rhs=str(bound), holds=holds
        )

    def generating_table(
        self,
        shape: Sequence[int],
        max_orders: Sequence[int],
        degree_cap: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> List[GeneratingTableRow]:
        """Coefficients |Map_0(theta_nu)| / prod nu_i! for 1 <= nu_i <= max_orders[i]."""
        cap = degree_cap or settings.DEGREE_CAP
        grid = list(product(*(range(1, m + 1) for m in max_orders)))
        for orders in grid:
            degree = sum(v * m for v, m in zip(orders, shape))
            if degree > cap:
                raise CapExceededError(
                    f"table entry nu={list(orders)} has degree {degree} > {cap}",
                    "lower max_orders or raise PLANARMAP_DEGREE_CAP",
                )
        workers = workers or settings.WORKERS
        if workers > 1 and len(grid) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_table_row, [list(shape)] * len(grid), grid))
        else:
            rows = [_table_row(list(shape), orders) for orders in grid]
        self.logger.info(f"Generating table for shape {list(shape)}: {len(rows)} rows")
        return rows


def _table_row(shape: List[int], orders: Sequence[int]) -> GeneratingTableRow:
    lengths = [m for v, m in zip(orders, shape) for _ in range(v)]
    degree = sum(lengths)
    if degree % 2:
        planar = 0
    else:
        inst = MapInstance(permutation_with_cycle_type(lengths), Coloring.constant(degree))
        planar = MapCountService().count_map0(inst, override_caps=True).planar
    coefficient = Fraction(planar, prod(factorial(v) for v in orders))
    majorant = majorant_coefficient(shape, orders)
    return GeneratingTableRow(
        shape=shape,
        orders=list(orders),
        degree=degree,
        planar=planar,
        coefficient=str(coefficient),
        majorant=str(majorant),
        bound_holds=coefficient <= majorant,
    )


def instances_of_degree(n: int) -> Iterator[Permutation]:
    """One permutation per cycle type of degree n, i.e. per integer partition."""

    def partitions(remaining: int, largest: int) -> Iterator[List[int]]:
        if remaining == 0:
            yield []
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in partitions(remaining - part, part):
                yield [part] + rest

    for lengths in partitions(n, n):
        yield permutation_with_cycle_type(lengths)
