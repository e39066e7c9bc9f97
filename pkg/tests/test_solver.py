from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nocflow.errors import InputError, SingularMatrixError
from nocflow.flow_matrix import Protocol, build, build_snf, build_vct
from nocflow.solver import (
    RESIDUAL_RTOL,
    check_feasibility,
    closed_form_2x2,
    cramer_fraction,
    per_node_fractions,
    solve,
    solve_with_truncation,
)
from nocflow.topology import Topology, injection_at, level_profile

from oracles import (
    snf_fractions_geometric,
    snf_system,
    solve_exact,
    vct_fractions_geometric,
    vct_system,
)

SIGMA_TENTHS = [Fraction(i, 10) for i in range(1, 10)]


def profile_of(topo, node=0):
    return level_profile(topo, injection_at(topo, node))


def assert_close(actual, exact, tol=1e-12):
    assert len(actual) == len(exact)
    for a, e in zip(actual, exact):
        assert abs(a - float(e)) <= tol


class TestKnownSolutions:
    def test_vct_2x2_half(self):
        alloc = solve(build_vct([1, 2, 1], 0.5))
        assert_close(alloc.fractions, [Fraction(2, 7), Fraction(2, 7), Fraction(1, 7)])

    def test_snf_2x2_half(self):
        alloc = solve(build_snf([1, 2, 1], 0.5))
        assert_close(alloc.fractions, [0.36, 0.24, 0.16])

    def test_vct_four_levels_half(self):
        alloc = solve(build_vct([1, 2, 2, 1], 0.5))
        assert_close(alloc.fractions,
                     [Fraction(4, 17), Fraction(4, 17), Fraction(2, 17), Fraction(1, 17)])

    def test_snf_four_levels_half(self):
        alloc = solve(build_snf([1, 2, 2, 1], 0.5))
        assert_close(alloc.fractions,
                     [Fraction(27, 95), Fraction(18, 95), Fraction(12, 95), Fraction(8, 95)])

    def test_single_level(self):
        alloc = solve(build_vct([1], 0.9))
        assert alloc.fractions == (1.0,)
        assert alloc.residual_norm == 0.0

    def test_equal_link_and_compute_cost(self):
        # at sigma=1 the deepest vct level gets nothing, snf keeps shipping
        vct = solve(build_vct([1, 2, 1], 1.0))
        assert_close(vct.fractions, [Fraction(1, 3), Fraction(1, 3), Fraction(0)])
        snf = solve(build_snf([1, 2, 1], 1.0))
        assert_close(snf.fractions, [Fraction(4, 9), Fraction(2, 9), Fraction(1, 9)])


class TestClosedForm2x2:
    def test_matches_solver_across_grid(self):
        for proto in Protocol:
            for s in [0.0, 1.0] + [i / 10 for i in range(1, 10)]:
                formula = closed_form_2x2(proto, s)
                solved = solve(build(proto, [1, 2, 1], s))
                assert_close(solved.fractions, formula.fractions)

    def test_vct_values(self):
        alloc = closed_form_2x2(Protocol.VCT, 0.5)
        assert alloc.fractions == pytest.approx((2 / 7, 2 / 7, 1 / 7), rel=1e-15)

    def test_snf_values(self):
        alloc = closed_form_2x2(Protocol.SNF, 0.5)
        assert alloc.fractions == pytest.approx((0.36, 0.24, 0.16), rel=1e-15)


class TestOracleAgreement:
    TOPOLOGIES = [
        Topology.mesh(2, 2), Topology.mesh(2, 3), Topology.mesh(3, 3),
        Topology.mesh(3, 8), Topology.mesh(5, 5), Topology.torus(3, 3),
        Topology.torus(4, 4), Topology.hypercube(3),
    ]

    @pytest.mark.parametrize("protocol", list(Protocol))
    def test_exact_rational_oracle(self, protocol):
        builder = vct_system if protocol is Protocol.VCT else snf_system
        for topo in self.TOPOLOGIES:
            counts = list(profile_of(topo).counts)
            for s in SIGMA_TENTHS:
                a, b = builder(counts, s)
                exact = solve_exact(a, b)
                alloc = solve(build(protocol, counts, float(s)))
                assert_close(alloc.fractions, exact)

    @pytest.mark.parametrize("protocol", list(Protocol))
    def test_geometric_form(self, protocol):
        closed = vct_fractions_geometric if protocol is Protocol.VCT \
            else snf_fractions_geometric
        for counts in [[1, 3, 2, 5, 1], [1, 1, 1, 1], [1, 6]]:
            for s in SIGMA_TENTHS:
                alloc = solve(build(protocol, counts, float(s)))
                assert_close(alloc.fractions, closed(counts, s))


class TestDiagnostics:
    def test_residual_bound(self):
        for topo in [Topology.mesh(6, 6), Topology.hypercube(5)]:
            profile = profile_of(topo)
            for proto in Protocol:
                alloc = solve(build(proto, profile, 0.85))
                assert alloc.rank_ok
                assert alloc.residual_norm <= RESIDUAL_RTOL * profile.k

    def test_normalization(self):
        for proto in Protocol:
            for s in (0.05, 0.5, 0.95):
                profile = profile_of(Topology.mesh(4, 5))
                alloc = solve(build(proto, profile, s))
                total = sum(c * f for c, f in zip(profile.counts, alloc.fractions))
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_singular_names_column(self):
        with pytest.raises(SingularMatrixError) as err:
            solve(build_vct([1, 2, 1], 4.0))
        assert err.value.column == 2
        assert "column 2" in str(err.value)


class TestCramer:
    def test_agrees_with_elimination(self):
        for topo in [Topology.mesh(2, 2), Topology.mesh(5, 5), Topology.hypercube(4)]:
            profile = profile_of(topo)
            for proto in Protocol:
                fm = build(proto, profile, 0.6)
                alloc = solve(fm)
                for i, f in enumerate(alloc.fractions):
                    assert cramer_fraction(fm, i) == pytest.approx(f, rel=1e-9)

    def test_snf_2x2_unit_sigma_deepest(self):
        assert cramer_fraction(build_snf([1, 2, 1], 1.0), 2) == \
            pytest.approx(1 / 9, rel=1e-12)

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            cramer_fraction(build_vct([1, 2, 1], 4.0), 0)

    def test_level_bounds(self):
        with pytest.raises(InputError):
            cramer_fraction(build_vct([1, 2, 1], 0.5), 5)


class TestFeasibility:
    def test_inside_regime(self):
        fm = build_vct([1, 2, 1], 0.5)
        report = check_feasibility(solve(fm), fm)
        assert report.feasible
        assert report.violations == ()
        assert report.sigma_in_regime

    def test_slow_link_vct(self):
        fm = build_vct([1, 2, 1], 1.2)
        report = check_feasibility(solve(fm), fm)
        assert not report.feasible
        assert not report.sigma_in_regime
        assert len(report.violations) == 1
        level, value = report.violations[0]
        assert level == 2
        assert value == pytest.approx(-1 / 14, rel=1e-12)

    def test_snf_always_feasible(self):
        for counts in [[1, 2, 1], [1, 2, 3, 4, 5, 4, 3, 2, 1]]:
            for s in (0.5, 1.0, 2.0, 10.0):
                fm = build_snf(counts, s)
                assert check_feasibility(solve(fm), fm).feasible

    def test_regime_boundaries(self):
        fm = build_snf([1, 2, 1], 1.0)
        assert not check_feasibility(solve(fm), fm).sigma_in_regime
        fm = build_snf([1, 2, 1], 0.0)
        assert not check_feasibility(solve(fm), fm).sigma_in_regime


class TestTruncation:
    def test_drops_starved_level(self):
        alloc, used = solve_with_truncation([1, 2, 1], 1.2, Protocol.VCT)
        assert used == 2
        assert_close(alloc.fractions, [Fraction(1, 3), Fraction(1, 3), Fraction(0)])

    def test_keeps_feasible_system_whole(self):
        alloc, used = solve_with_truncation([1, 2, 1], 0.5, Protocol.VCT)
        assert used == 3
        assert_close(alloc.fractions, [Fraction(2, 7), Fraction(2, 7), Fraction(1, 7)])

    def test_skips_singular_prefix(self):
        # the full system is singular at sigma=4; the 2-level prefix is not
        alloc, used = solve_with_truncation([1, 2, 1], 4.0, Protocol.VCT)
        assert used == 2
        assert_close(alloc.fractions, [Fraction(1, 3), Fraction(1, 3), Fraction(0)])

    def test_single_level_profile(self):
        alloc, used = solve_with_truncation([1], 5.0, Protocol.VCT)
        assert used == 1
        assert alloc.fractions == (1.0,)

    def test_snf_never_truncates(self):
        alloc, used = solve_with_truncation([1, 2, 2, 1], 7.0, Protocol.SNF)
        assert used == 4
        assert all(f > 0 for f in alloc.fractions)

    def test_deep_truncation(self):
        profile = profile_of(Topology.mesh(5, 5))
        alloc, used = solve_with_truncation(profile, 1.5, Protocol.VCT)
        assert used == 2
        assert sum(c * f for c, f in zip(profile.counts, alloc.fractions)) == \
            pytest.approx(1.0, abs=1e-12)


class TestPerNode:
    def test_mesh_2x2(self):
        profile = profile_of(Topology.mesh(2, 2))
        alloc = solve(build_vct(profile, 0.5))
        per_node = per_node_fractions(alloc, profile)
        assert per_node == pytest.approx(
            (2 / 7, 2 / 7, 2 / 7, 1 / 7), rel=1e-12)

    def test_requires_distance_map(self):
        from nocflow.topology import LevelProfile
        alloc = solve(build_vct([1, 2, 1], 0.5))
        with pytest.raises(InputError):
            per_node_fractions(alloc, LevelProfile.from_counts([1, 2, 1]))


@st.composite
def counts_and_sigma(draw):
    tail = draw(st.lists(st.integers(min_value=1, max_value=9), min_size=0, max_size=7))
    sigma = Fraction(draw(st.integers(min_value=1, max_value=99)), 100)
    return [1] + tail, sigma


class TestProperties:
    @given(counts_and_sigma())
    @settings(max_examples=120, deadline=None)
    def test_random_profiles_match_oracle(self, case):
        counts, sigma = case
        for protocol, system, closed in (
            (Protocol.VCT, vct_system, vct_fractions_geometric),
            (Protocol.SNF, snf_system, snf_fractions_geometric),
        ):
            a, b = system(counts, sigma)
            exact = solve_exact(a, b)
            assert exact == closed(counts, sigma)
            fm = build(protocol, counts, float(sigma))
            alloc = solve(fm)
            assert_close(alloc.fractions, exact)
            assert check_feasibility(alloc, fm).feasible
            total = sum(c * f for c, f in zip(counts, alloc.fractions))
            assert abs(total - 1.0) <= 1e-12
