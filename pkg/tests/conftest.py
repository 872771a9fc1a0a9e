from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest

from lipsnakes.errors import SnakeError
from lipsnakes.models import ContactEdge, LinkModel, PancakeSpec, Topology
from lipsnakes.puiseux import Series, make_arc
from lipsnakes.snk import load_snk
from lipsnakes.zones import SurfaceClass, recognize

MODELS = Path(__file__).resolve().parent.parent / "models"


def circular(*arcs: str, contacts=(), beta=1) -> LinkModel:
    """One single-interval pancake X_i per consecutive pair of arcs, closing the cycle."""
    n = len(arcs)
    pancakes = tuple(
        PancakeSpec(f"X{i + 1}", (arcs[i - 1], arcs[i]), (Fraction(beta),)) for i in range(n)
    )
    edges = tuple(ContactEdge(a, b, Fraction(q)) for a, b, q in contacts)
    return LinkModel(Fraction(beta), Topology.CIRCULAR, pancakes, edges)


@pytest.fixture
def models_dir() -> Path:
    return MODELS


@pytest.fixture
def cs2() -> LinkModel:
    return load_snk(MODELS / "cs2.snk")


@pytest.fixture
def bubble() -> LinkModel:
    return load_snk(MODELS / "bubble.snk")


@pytest.fixture
def horn() -> LinkModel:
    return load_snk(MODELS / "horn.snk")


@pytest.fixture
def eight() -> LinkModel:
    return load_snk(MODELS / "eight_segments.snk")


@pytest.fixture
def cusp_snake() -> LinkModel:
    return load_snk(MODELS / "cusp_snake.snk")


CONTACT_QS = (Fraction(3, 2), Fraction(2), Fraction(3))


def chord_pairs(p: int):
    """Unordered pairs of non-adjacent gluing arcs on a cycle of p pancakes."""
    return [(i, j) for i in range(p) for j in range(i + 1, p) if (j - i) % p not in (1, p - 1)]


def chord_models(max_p: int = 6, max_contacts: int = 3):
    """Every circular model on g0..g{p-1} whose contacts form a matching of non-adjacent arcs."""

    def matchings(pairs, used, k):
        if k == 0:
            yield ()
            return
        for n, (i, j) in enumerate(pairs):
            if i in used or j in used:
                continue
            for rest in matchings(pairs[n + 1:], used | {i, j}, k - 1):
                yield ((i, j),) + rest

    for p in range(2, max_p + 1):
        arcs = [f"g{i}" for i in range(p)]
        pairs = chord_pairs(p)
        for k in range(1, max_contacts + 1):
            for chosen in matchings(pairs, frozenset(), k):
                for qs in itertools.product(CONTACT_QS, repeat=k):
                    yield circular(*arcs, contacts=[(arcs[i], arcs[j], q) for (i, j), q in zip(chosen, qs)])


def random_circular(rng: random.Random) -> LinkModel:
    """A random circular model: gluing arcs, occasional interior arcs, contacts between gluing arcs."""
    p = rng.randint(2, 6)
    glue = [f"g{i}" for i in range(p)]
    pancakes = []
    for i in range(p):
        arcs = [glue[i - 1]]
        if rng.random() < 0.3:
            arcs.append(f"h{i}")
        arcs.append(glue[i])
        pancakes.append(PancakeSpec(f"X{i + 1}", tuple(arcs), (Fraction(1),) * (len(arcs) - 1)))
    pairs = chord_pairs(p) or [(0, 1)]
    chosen = rng.sample(pairs, min(len(pairs), rng.randint(1, 3)))
    edges = tuple(ContactEdge(glue[i], glue[j], rng.choice(CONTACT_QS)) for i, j in chosen)
    return LinkModel(Fraction(1), Topology.CIRCULAR, tuple(pancakes), edges)


def random_circular_snakes(seed: int, count: int, attempts: int = 20000):
    """`count` seeded random circular snakes; fails when too few turn up."""
    rng = random.Random(seed)
    out = []
    for _ in range(attempts):
        model = random_circular(rng)
        try:
            if recognize(model).surface_class == SurfaceClass.CIRCULAR_SNAKE:
                out.append(model)
        except SnakeError:
            continue
        if len(out) == count:
            return out
    pytest.fail(f"only {len(out)} circular snakes in {attempts} draws")


@pytest.fixture(scope="session")
def random_snakes():
    return random_circular_snakes(seed=20240611, count=200)


def random_arcs(rng: random.Random, count: int, exponents, dim: int = 3):
    """Arcs sharing a random base, each bent by random terms at the given exponents."""
    base = [Series.of([(1, 1)])] + [
        Series.of([(e, rng.randint(-3, 3)) for e in exponents if rng.random() < 0.5]) for _ in range(dim - 1)
    ]
    out = []
    for i in range(count):
        coords = [base[0]]
        for c in base[1:]:
            coords.append(c + Series.of([(e, rng.choice((-2, -1, 1, 2))) for e in exponents if rng.random() < 0.3]))
        out.append(make_arc(f"a{i}", coords))
    return out
