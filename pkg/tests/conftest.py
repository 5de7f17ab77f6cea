"""Shared fixtures and independent oracles.

The oracles here are deliberately written with plain dictionaries and
``fractions`` so they share no code path with the library's vectorized
scan; tests compare the two.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

import wcauth

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def oracle_asu2(table, num_tags, epsilon) -> dict:
    """Dictionary-counting check of both universality conditions.

    Returns condition-1 cell counts, the worst condition-2 cell, and
    whether each condition holds at the declared epsilon.  Independent
    of the library scan: nested dicts, exact Fractions, no numpy.
    """
    num_keys = len(table)
    num_messages = len(table[0])
    per_cell = Fraction(num_keys, num_tags)
    cap = Fraction(epsilon) * num_keys / num_tags

    cell_counts: dict[tuple[int, int], int] = {}
    for key in range(num_keys):
        for m in range(num_messages):
            cell = (m, int(table[key][m]))
            cell_counts[cell] = cell_counts.get(cell, 0) + 1
    cond1_ok = per_cell.denominator == 1 and all(
        cell_counts.get((m, t), 0) == per_cell
        for m in range(num_messages)
        for t in range(num_tags)
    )

    worst = 0
    worst_cell = None
    for m1 in range(num_messages):
        for m2 in range(num_messages):
            if m1 == m2:
                continue
            pair_counts: dict[tuple[int, int], int] = {}
            for key in range(num_keys):
                pair = (int(table[key][m1]), int(table[key][m2]))
                pair_counts[pair] = pair_counts.get(pair, 0) + 1
            for (t1, t2), count in pair_counts.items():
                if count > worst:
                    worst = count
                    worst_cell = (m1, t1, m2, t2)
    return {
        "cell_counts": cell_counts,
        "cond1_ok": cond1_ok,
        "worst_cond2": worst,
        "worst_cell": worst_cell,
        "cond2_ok": Fraction(worst) <= cap,
        "holds": cond1_ok and Fraction(worst) <= cap,
    }


def poly_table(p: int) -> np.ndarray:
    """Two-symbol polynomial evaluation over GF(p).

    Key (a, b) indexed a*p+b, message (m1, m2) indexed m1*p+m2, tag
    (b + a*m1 + a^2*m2) mod p.  Gives 2/p-ASU2 with p^2 messages, the
    smallest concrete family whose message space fits payload||salt.
    """
    a, b = np.divmod(np.arange(p * p), p)
    m1, m2 = np.divmod(np.arange(p * p), p)
    tab = (
        b[:, None]
        + a[:, None] * m1[None, :]
        + (a[:, None] ** 2 % p) * m2[None, :]
    ) % p
    return tab.astype(np.uint16)


@pytest.fixture(scope="session")
def affine5():
    return wcauth.build_affine_family(5)


@pytest.fixture(scope="session")
def affine7():
    return wcauth.build_affine_family(7)


@pytest.fixture(scope="session")
def poly7():
    return wcauth.build_table_family(poly_table(7).tolist(), Fraction(2, 7))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(12345)))
