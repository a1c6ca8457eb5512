import logging
import random

import pytest

from gapcover.model import SetCoverInstance, equal_partition

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _quiet_warnings(caplog):
    # gadget/pipeline precondition warnings are expected at these sizes
    caplog.set_level(logging.ERROR, logger="gapcover")


@pytest.fixture
def record():
    """Record one acceptance line; also printed in the terminal summary."""

    def _record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_instance(rng: random.Random, n_sets: int, n_elems: int, density: float = 0.4, partition=None):
    uids = tuple(f"u{x}" for x in range(1, n_elems + 1))
    sids = tuple(f"s{x}" for x in range(1, n_sets + 1))
    inc = tuple(tuple(u for u in uids if rng.random() < density) for _ in sids)
    return SetCoverInstance(sids, uids, inc, partition)


def random_partitioned(rng: random.Random, k: int, n: int, n_elems: int, density: float = 0.4):
    return random_instance(rng, k * n, n_elems, density, equal_partition([n] * k))


def planted_rainbow(rng: random.Random, k: int, n: int, n_elems: int, density: float = 0.3):
    """Random partitioned instance plus one set per part that jointly cover U."""
    inst = random_partitioned(rng, k, n, n_elems, density)
    picks = [j * n + rng.randrange(n) for j in range(k)]
    rows = [list(r) for r in inst.incidence]
    for u in inst.universe_ids:
        p = rng.choice(picks)
        if u not in rows[p]:
            rows[p].append(u)
    order = {u: i for i, u in enumerate(inst.universe_ids)}
    inc = tuple(tuple(sorted(r, key=order.__getitem__)) for r in rows)
    return SetCoverInstance(inst.set_ids, inst.universe_ids, inc, inst.partition), tuple(picks)
