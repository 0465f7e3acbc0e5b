"""Regenerate the fixture corpus: ``python3 tests/fixtures/make_fixtures.py``."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from rigidmetric import formats
from rigidmetric.family import SpaceFamily
from rigidmetric.samples import random_grid_space, random_hub_family
from rigidmetric.space import MetricSpace, restrict

HERE = Path(__file__).parent
GRID = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def main() -> None:
    rng = random.Random(20240501)
    for old in HERE.glob("*.json"):
        old.unlink()
    for i in range(20):
        fam = random_hub_family(rng, GRID, max_points=8)
        formats.dump(formats.family_to_json(fam), HERE / f"hub_{i:02d}.family.json")
    for i in range(10):
        master = random_grid_space(rng.randint(4, 7), GRID, rng, "m")
        members = []
        while len({p for m in members for p in m.points}) < len(master) or len(members) < 2:
            members.append(restrict(master, sorted(rng.sample(master.points, rng.randint(2, 4)))))
        formats.dump(formats.family_to_json(SpaceFamily(tuple(members))), HERE / f"general_{i:02d}.family.json")
    for i in range(10):
        X = random_grid_space(rng.randint(1, 4), GRID, rng, "b")
        formats.dump(formats.space_to_json(X), HERE / f"base_{i:02d}.space.json")

    one, three = Fraction(1), Fraction(3)
    tri = [
        MetricSpace.from_fraction_matrix(["0", "1"], [[0, one], [one, 0]]),
        MetricSpace.from_fraction_matrix(["0", "2"], [[0, one], [one, 0]]),
        MetricSpace.from_fraction_matrix(["1", "2"], [[0, three], [three, 0]]),
    ]
    formats.dump(formats.family_to_json(SpaceFamily(tuple(tri))), HERE / "triangle.family.json")
    hedgehog = [
        MetricSpace.discrete(["h"]),
        MetricSpace.discrete(["a", "h"]),
        MetricSpace.discrete(["b", "h"]),
    ]
    formats.dump(formats.family_to_json(SpaceFamily(tuple(hedgehog), hub=0)), HERE / "hedgehog.family.json")
    bad = {"kind": "metric", "points": ["p", "q", "r"], "dist": {"p|q": "1", "q|r": "1", "p|r": "3"}}
    formats.dump(bad, HERE / "tri.space.json")


if __name__ == "__main__":
    main()
