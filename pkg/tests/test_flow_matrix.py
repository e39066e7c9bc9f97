import numpy as np
import pytest

from nocflow.errors import InputError
from nocflow.flow_matrix import (
    Protocol,
    Scenario,
    build,
    build_snf,
    build_vct,
    column_replaced_determinant,
    determinant,
    dump_matrix,
)
from nocflow.topology import Topology, injection_at, level_profile

SIGMA_GRID = [i / 20 for i in range(1, 20)]


def profile_of(topo, node=0):
    return level_profile(topo, injection_at(topo, node))


class TestVctEntries:
    def test_2x2_layout(self):
        fm = build_vct([1, 2, 1], 0.5)
        expected = np.array([
            [1.0, 2.0, 1.0],
            [1.0, -1.0, 0.0],
            [0.0, -0.5, 1.0],
        ])
        assert np.array_equal(fm.entries, expected)
        assert np.array_equal(fm.rhs, [1.0, 0.0, 0.0])

    def test_single_level(self):
        fm = build_vct([1], 0.3)
        assert np.array_equal(fm.entries, [[1.0]])
        assert np.array_equal(fm.rhs, [1.0])

    def test_row_pattern_any_depth(self):
        # row d >= 2: sigma-1 under level 1, sigma under 2..d-1, 1 under d
        sigma = 0.3
        for counts in [(1, 2, 3, 4, 5, 4, 3, 2, 1), (1, 2, 3, 3, 3, 3, 3, 3, 2, 1)]:
            fm = build_vct(counts, sigma)
            k = len(counts)
            expected = np.zeros((k, k))
            expected[0] = counts
            expected[1, 0], expected[1, 1] = 1.0, -1.0
            for d in range(2, k):
                expected[d, 1] = sigma - 1.0
                for j in range(2, d):
                    expected[d, j] = sigma
                expected[d, d] = 1.0
            assert np.array_equal(fm.entries, expected)

    def test_nonzero_structure(self):
        fm = build_vct(profile_of(Topology.mesh(5, 5)), 0.7)
        for d in range(2, fm.k):
            row = fm.entries[d]
            assert np.count_nonzero(row) == d
            assert np.count_nonzero(row[:1]) == 0
            assert np.count_nonzero(row[d + 1:]) == 0


class TestSnfEntries:
    def test_2x2_layout(self):
        fm = build_snf([1, 2, 1], 0.5)
        expected = np.array([
            [1.0, 2.0, 1.0],
            [1.0, -1.5, 0.0],
            [1.0, -0.5, -1.5],
        ])
        assert np.array_equal(fm.entries, expected)

    def test_four_level_row(self):
        fm = build_snf([1, 2, 2, 1], 0.5)
        assert np.array_equal(fm.entries[3], [1.0, -0.5, -0.5, -1.5])

    def test_nonzero_structure(self):
        fm = build_snf(profile_of(Topology.mesh(3, 8)), 0.4)
        for d in range(1, fm.k):
            row = fm.entries[d]
            assert np.count_nonzero(row) == d + 1
            assert row[0] == 1.0
            assert row[d] == -1.4
            assert np.count_nonzero(row[d + 1:]) == 0


class TestDeterminants:
    def test_vct_2x2_free_link(self):
        assert determinant(build_vct([1, 2, 1], 0.0)) == pytest.approx(-4.0, abs=1e-12)

    def test_vct_2x2_grid(self):
        for s in SIGMA_GRID:
            assert determinant(build_vct([1, 2, 1], s)) == pytest.approx(s - 4.0, abs=1e-12)

    def test_snf_2x2_grid(self):
        for s in SIGMA_GRID:
            fm = build_snf([1, 2, 1], s)
            assert determinant(fm) == pytest.approx((s + 2.0) ** 2, rel=1e-12)
            assert abs(column_replaced_determinant(fm, 0)) == \
                pytest.approx((s + 1.0) ** 2, rel=1e-12)

    def test_vct_root_cofactor_is_unit(self):
        for topo in [Topology.mesh(2, 2), Topology.mesh(3, 8), Topology.mesh(6, 6),
                     Topology.torus(4, 4), Topology.hypercube(4)]:
            profile = profile_of(topo)
            for s in (0.1, 0.5, 0.9):
                fm = build_vct(profile, s)
                assert abs(column_replaced_determinant(fm, 0)) == \
                    pytest.approx(1.0, abs=1e-9)

    def test_singular_at_sigma_four(self):
        assert determinant(build_vct([1, 2, 1], 4.0)) == 0.0

    def test_full_rank_inside_regime(self):
        for topo in [Topology.mesh(2, 2), Topology.mesh(5, 5), Topology.hypercube(5)]:
            profile = profile_of(topo)
            for proto in Protocol:
                for s in SIGMA_GRID:
                    assert determinant(build(proto, profile, s)) != 0.0

    def test_single_level(self):
        assert determinant(build_vct([1], 0.5)) == 1.0

    def test_column_bounds(self):
        fm = build_vct([1, 2, 1], 0.5)
        with pytest.raises(InputError):
            column_replaced_determinant(fm, 3)


class TestScenario:
    def test_sigma_derivation(self):
        s = Scenario(omega=2.0, z=1.2, tcp=1.0, tcm=1.0)
        assert s.sigma == pytest.approx(0.6, rel=1e-15)

    def test_from_sigma(self):
        s = Scenario.from_sigma(0.37)
        assert s.sigma == 0.37
        assert (s.omega, s.tcp, s.tcm) == (1.0, 1.0, 1.0)

    def test_with_sigma_keeps_compute_side(self):
        base = Scenario(omega=3.0, z=1.0, tcp=2.0, tcm=4.0)
        rescaled = base.with_sigma(0.25)
        assert rescaled.sigma == pytest.approx(0.25, rel=1e-15)
        assert (rescaled.omega, rescaled.tcp, rescaled.tcm) == (3.0, 2.0, 4.0)

    def test_validation(self):
        with pytest.raises(InputError):
            Scenario(omega=0.0)
        with pytest.raises(InputError):
            Scenario(tcp=-1.0)
        with pytest.raises(InputError):
            Scenario(z=-0.1)
        with pytest.raises(InputError):
            Scenario(z=float("inf"))
        with pytest.raises(InputError):
            Scenario.from_sigma(-0.5)
        with pytest.raises(InputError):
            Scenario.from_sigma(float("nan"))


class TestBuilderValidation:
    def test_bad_sigma(self):
        with pytest.raises(InputError):
            build_vct([1, 2, 1], -0.1)
        with pytest.raises(InputError):
            build_snf([1, 2, 1], float("nan"))

    def test_bad_counts(self):
        with pytest.raises(InputError):
            build_vct([], 0.5)
        with pytest.raises(InputError):
            build_vct([2, 2], 0.5)

    def test_entries_read_only(self):
        fm = build_vct([1, 2, 1], 0.5)
        with pytest.raises(ValueError):
            fm.entries[0, 0] = 9.0

    def test_profile_carried(self):
        profile = profile_of(Topology.mesh(2, 3))
        fm = build_snf(profile, 0.5)
        assert fm.profile is profile
        assert fm.sigma == 0.5
        assert fm.protocol is Protocol.SNF


class TestDump:
    def test_2x2_dump(self):
        fm = build_vct([1, 2, 1], 0.5)
        assert dump_matrix(fm) == "1.0 2.0 1.0\n1.0 -1.0 0.0\n0.0 -0.5 1.0\n"

    def test_round_trips_through_float(self):
        fm = build_snf(profile_of(Topology.mesh(3, 8)), 0.37)
        parsed = [[float(v) for v in line.split()] for line in dump_matrix(fm).splitlines()]
        assert np.array_equal(np.array(parsed), fm.entries)
