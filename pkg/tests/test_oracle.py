import math

import numpy as np
import pytest

from conftest import brute_force_min
from minergy.errors import TooLarge
from minergy.graphs import DIRECT, NEXT_HOP, enumerate_extended, realize
from minergy.model import Monomial, NetworkInstance, TwoTerm, check_feasible, total_energy
from minergy.oracle import CAP_ENV, RoutingTree, enumerate_trees, oracle_cap, oracle_min, tree_count


def test_single_sensor():
    assert [t.next_hop for t in enumerate_trees(1)] == [(0,)]


def test_two_sensors():
    assert {t.next_hop for t in enumerate_trees(2)} == {(0, 0), (0, 1), (2, 0)}


@pytest.mark.parametrize("n", range(1, 7))
def test_counts_and_uniqueness(n):
    trees = [t.next_hop for t in enumerate_trees(n)]
    assert len(trees) == tree_count(n) == (n + 1) ** (n - 1)
    assert len(set(trees)) == len(trees)


@pytest.mark.parametrize("n", range(1, 6))
def test_trees_match_brute_force_set(n):
    _, _, count = brute_force_min(tuple(range(1, n + 1)), (1,) * n, lambda d: d)
    assert count == tree_count(n)


def test_deterministic_order():
    assert list(enumerate_trees(4)) == list(enumerate_trees(4))


def test_every_tree_feasible():
    inst = NetworkInstance((0.3, 1.0, 1.1, 2.5), (1.0, 0.2, 2.0, 0.7))
    for t in enumerate_trees(4):
        assert check_feasible(inst, t.flow(inst), tol=1e-12)


def test_routing_tree_rejects_cycles():
    with pytest.raises(ValueError):
        RoutingTree((2, 1))
    with pytest.raises(ValueError):
        RoutingTree((1,))


class TestOracleMin:
    def test_square(self):
        sol = oracle_min(NetworkInstance.regular(3), Monomial(2))
        assert sol.energy == 6.0
        assert sol.graph == NEXT_HOP
        assert [t.next_hop for t in sol.trees] == [(0, 1, 2)]

    def test_linear_ties(self):
        sol = oracle_min(NetworkInstance.regular(3), Monomial(1))
        assert sol.energy == pytest.approx(6.0)
        # every forward tree: sensor i picks any of 0..i-1
        assert len(sol.trees) == math.factorial(3)

    def test_sqrt(self):
        sol = oracle_min(NetworkInstance.regular(3), Monomial(0.5))
        assert sol.energy == pytest.approx(1 + math.sqrt(2) + math.sqrt(3), rel=1e-12)
        assert sol.graph == DIRECT

    def test_energies_sorted(self):
        inst = NetworkInstance.regular(4)
        sol = oracle_min(inst, Monomial(0.5), with_energies=True)
        assert len(sol.energies) == 125
        assert np.all(np.diff(sol.energies) >= 0)
        assert sol.energies[0] == pytest.approx(sol.energy, rel=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        pos = tuple(np.cumsum(rng.uniform(0.1, 2.0, n)))
        data = tuple(rng.uniform(0.1, 2.0, n))
        a, b, lam = rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 3)
        ref, tied, _ = brute_force_min(pos, data, lambda d: d ** a + lam * d ** b)
        sol = oracle_min(NetworkInstance(pos, data), TwoTerm(a, b, lam))
        assert sol.energy == pytest.approx(ref, rel=1e-9)
        assert sol.trees[0].next_hop in tied

    @pytest.mark.parametrize("a", [-2.0, 0.3, 1.0, 2.5])
    def test_never_above_named_graphs(self, a):
        inst = NetworkInstance((0.4, 1.0, 1.7, 2.0, 3.9), (1.0, 2.0, 0.5, 1.0, 1.5))
        model = Monomial(a)
        best = oracle_min(inst, model).energy
        for g in enumerate_extended(inst):
            assert best <= total_energy(inst, model, realize(inst, g)) * (1 + 1e-12)


class TestCap:
    def test_too_large(self):
        with pytest.raises(TooLarge):
            oracle_min(NetworkInstance.regular(9), Monomial(2))
        with pytest.raises(TooLarge):
            next(enumerate_trees(9))

    def test_explicit_cap(self):
        with pytest.raises(TooLarge):
            oracle_min(NetworkInstance.regular(4), Monomial(2), cap=3)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(CAP_ENV, "3")
        assert oracle_cap() == 3
        with pytest.raises(TooLarge):
            oracle_min(NetworkInstance.regular(4), Monomial(2))
        monkeypatch.delenv(CAP_ENV)
        assert oracle_cap() == 8
