"""Reference caustics with known periods and windings, shared by the CLI and tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cayley import Flavor, closed_form_lambdas, find_caustics
from .conics import ConfocalFamily


@dataclass(frozen=True)
class Fixture:
    ident: str
    a: float
    b: float
    n: int
    lambda0: float
    winding: tuple[int, int]
    flavor: Flavor = Flavor.PERIODIC

    @property
    def family(self) -> ConfocalFamily:
        return ConfocalFamily(self.a, self.b)

    @property
    def periodic(self) -> bool:
        return self.flavor is Flavor.PERIODIC


def periodic_fixtures() -> list[Fixture]:
    r2 = math.sqrt(2.0)
    five = closed_form_lambdas(ConfocalFamily(2.0, 1.0), 5)
    return [
        Fixture("n3-2-1", 2.0, 1.0, 3, -6.0 + 4.0 * math.sqrt(3.0), (3, 2)),
        Fixture("n4-2-1", 2.0, 1.0, 4, 2.0 / 3.0, (4, 2)),
        Fixture("n4-3-1-ellipse", 3.0, 1.0, 4, 0.75, (4, 2)),
        Fixture("n4-3-1-hyperbola", 3.0, 1.0, 4, 1.5, (4, 2)),
        Fixture("n5-2-1-a", 2.0, 1.0, 5, five[0], (5, 2)),
        Fixture("n5-2-1-b", 2.0, 1.0, 5, five[1], (5, 4)),
        Fixture("n6-2-1-ellipse", 2.0, 1.0, 6, 2.0 / (r2 + 1.0) ** 2, (6, 2)),
        Fixture("n6-2-1-hyperbola", 2.0, 1.0, 6, (2.0 + 4.0 * r2) / 7.0, (6, 4)),
        Fixture("n6-4.5-1-hyperbola", 4.5, 1.0, 6, 4.5 / (math.sqrt(4.5) - 1.0) ** 2, (6, 2)),
    ]


def elliptic_fixtures() -> list[Fixture]:
    """Caustics that are periodic in elliptic coordinates with an odd or half period.

    The winding is that of the Cartesian trajectory, whose period is 2n.
    """
    r2 = math.sqrt(2.0)
    return [
        Fixture("e2-2-1", 2.0, 1.0, 2, 2.0 / 3.0, (4, 2), Flavor.ELLIPTIC_A),
        Fixture("e3-2-1-ellipse", 2.0, 1.0, 3, 2.0 / (r2 + 1.0) ** 2, (6, 2), Flavor.ELLIPTIC_A),
        Fixture("e3-2-1-hyperbola", 2.0, 1.0, 3, (2.0 + 4.0 * r2) / 7.0, (6, 4), Flavor.ELLIPTIC_C),
    ]


def all_fixtures() -> list[Fixture]:
    return periodic_fixtures() + elliptic_fixtures()


# caustics closer than this (relative) to b or a are near-degenerate: p_hat grows
# so large in the gap (c3, c2) that the absolute Pell residual loses all digits
DEGENERACY_MARGIN = 0.02


def random_odd_caustics(count: int, seed: int = 0) -> list[Fixture]:
    """Caustics of random families for odd n in {3, 5}, over all flavors.

    Winding is left as (0, 0); callers that need it use the rotation number.
    """
    rng = np.random.default_rng(seed)
    flavors = list(Flavor)
    out: list[Fixture] = []
    while len(out) < count:
        b = float(rng.uniform(0.3, 1.5))
        a = b * float(rng.uniform(1.2, 6.0))
        n = int(rng.choice([3, 5]))
        flavor = flavors[int(rng.integers(len(flavors)))]
        for sol in find_caustics(ConfocalFamily(a, b), n, flavor, density=2000, validate=False):
            lam = sol.lambda0
            if abs(lam - b) < DEGENERACY_MARGIN * b or abs(lam - a) < DEGENERACY_MARGIN * a:
                continue
            out.append(Fixture(f"random-{len(out)}", a, b, n, lam, (0, 0), flavor))
    return out[:count]
