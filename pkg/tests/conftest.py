import pytest

from indexq.groups import make_group


def small_groups(max_size: int) -> list:
    """Every product of cyclic factors (orders >= 2, non-decreasing) up to max_size, plus Z1."""
    out = [make_group([1])]

    def grow(prefix, lo, size):
        if prefix:
            out.append(make_group(prefix))
        for n in range(lo, max_size // size + 1):
            grow(prefix + [n], n, size * n)

    grow([], 2, 1)
    return out


@pytest.fixture(scope="session")
def groups_upto_16():
    return small_groups(16)


def closed_subsets_bruteforce(G) -> set[frozenset]:
    """All nonempty subsets closed under addition.

    Include/exclude search over the elements in order: including an element
    closes the set under pairwise sums, and a branch dies as soon as the
    closure swallows an excluded element. Independent of the library's
    subgroup code.
    """
    elems = G.elements
    n = len(elems)
    table = [[G.index(G.add(a, b)) for b in elems] for a in elems]

    def close(members: frozenset, g: int) -> frozenset:
        current, frontier = set(members) | {g}, [g]
        while frontier:
            x = frontier.pop()
            for y in list(current):
                z = table[x][y]
                if z not in current:
                    current.add(z)
                    frontier.append(z)
        return frozenset(current)

    found = set()

    def search(i, inc, exc):
        if i == n:
            if inc:
                found.add(frozenset(elems[j] for j in inc))
            return
        if i in inc:
            search(i + 1, inc, exc)
            return
        search(i + 1, inc, exc | {i})
        grown = close(inc, i)
        if not grown & exc:
            search(i + 1, grown, exc)

    search(0, frozenset(), frozenset())
    return found


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
