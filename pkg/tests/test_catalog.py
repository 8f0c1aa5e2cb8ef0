"""Fixture catalog: equilibrium residuals, closed forms, analytic families,
tabulated one-ring thresholds."""

import math
import os

import numpy as np
import pytest

from vortexcert import catalog as cat
from vortexcert import continuation as cont
from vortexcert import model as md
from vortexcert.intervals import DomainError, Interval

SEED = int(os.environ.get("VORTEX_CERT_SEED", "0"))
RNG = np.random.default_rng(SEED)


class TestFixtures:
    def test_unknown_name(self):
        with pytest.raises(cat.NotFound):
            cat.fixture("dodecahedron99")

    def test_octahedron_supports_three_reductions(self):
        entry = cat.fixture_entry("octahedron")
        assert set(entry.labels) == {(2, 3, 0), (3, 2, 0), (4, 1, 2)}

    def test_antiprism8_height(self):
        ring = cat.fixture("antiprism8")
        z = ring.generators[0][2]
        assert math.isclose(z, math.sqrt((2 * math.sqrt(58) - 13) / 7), rel_tol=1e-15)
        assert abs(z - 0.564616) <= 1e-6

    def test_every_equilibrium_entry_is_an_equilibrium(self):
        for name in cat.list_fixtures():
            entry = cat.fixture_entry(name)
            tol = 1e-9 if not entry.needs_recertification else 50 * entry.coordinate_tolerance + 1e-9
            for label in entry.labels:
                full = md.lift_rho(cat.fixture(name, label))
                rhs = np.asarray(md.vortex_rhs(full), dtype=float)
                if entry.is_equilibrium:
                    assert np.max(np.abs(rhs)) <= tol, (name, label)
                    phi = np.asarray(md.momentum_Phi(full), dtype=float)
                    assert np.linalg.norm(phi) <= 1e-10 + 10 * entry.coordinate_tolerance, name
                else:
                    expect = entry.omega * np.array([md.J3 @ v for v in np.asarray(full.vectors, dtype=float)])
                    assert np.max(np.abs(rhs - expect)) <= 200 * entry.coordinate_tolerance, name

    def test_interval_fixtures_enclose_floats(self):
        for name in ("antiprism8", "triaugmented9", "gyro10", "icosahedron"):
            ring_f = cat.fixture(name)
            ring_i = cat.fixture_interval(name)
            for j in range(ring_f.n):
                for c in range(3):
                    assert ring_i.generators[j][c].contains(float(ring_f.generators[j][c]))

    def test_n9_quartic_root(self):
        enc = cat.certified_poly_root((64, 105, -87, -45, 27), 0.4, 0.6)
        assert enc.width <= 1e-14
        assert abs(enc.mid - 0.494365) <= 1e-6  # z0^2
        assert abs(math.sqrt(enc.mid) - 0.703111) <= 1e-6

    def test_decimal_entries_recertified_on_load(self):
        """The decimal fixtures admit a point validation within their
        published coordinate tolerance."""
        for name in ("eq11", "collision12"):
            entry = cat.fixture_entry(name)
            ring = cat.fixture(name)
            pt = cont.seed_point(ring, entry.omega)
            b0 = np.asarray(pt.u, dtype=float)
            x = cont.newton_polish(pt.flat(), entry.omega, b0, ring.m, ring.p)
            pc = cont.nk_validate_point(cont.AugmentedPoint.from_flat(x, entry.omega), b0, ring.m, ring.p)
            shift = np.max(np.abs(x[: 3 * ring.n] - pt.flat()[: 3 * ring.n]))
            assert shift + pc.coordinate_tolerance() <= entry.coordinate_tolerance


class TestOneRingFamily:
    def test_tetrahedron_member(self):
        ring, omega = cat.one_ring_family(3, 1, -1.0 / 3.0)
        assert abs(omega) <= 1e-15
        full = md.lift_rho(ring)
        assert np.max(np.abs(np.asarray(md.vortex_rhs(full), dtype=float))) <= 1e-12

    def test_pentagon_omega(self):
        _, omega = cat.one_ring_family(5, 2, 0.1)
        assert math.isclose(omega, 0.3 / 0.99, rel_tol=1e-14)

    def test_antipodal_pair(self):
        _, omega = cat.one_ring_family(2, 0, 0.0)
        assert omega == 0.0

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            cat.one_ring_family(4, 1, 1.0)

    def test_zeroes_augmented_map(self):
        """Every family member is a zero of F after solving the multipliers."""
        for (k, p) in ((3, 0), (4, 1), (5, 2), (7, 1)):
            z = float(RNG.uniform(-0.6, 0.6))
            if p == 0 and abs(z) < 0.05:
                z += 0.1
            ring, omega = cat.one_ring_family(k, p, z)
            pt = cont.seed_point(ring, omega)
            F = cont.augmented_map_F(pt.flat(), omega, np.asarray(pt.u, dtype=float), k, p)
            assert np.max(np.abs(np.asarray(F, dtype=float))) <= 1e-10

    def test_interval_variant(self):
        ring, omega = cat.one_ring_family(5, 2, Interval(0.1))
        assert isinstance(omega, Interval)
        assert omega.contains(0.3 / 0.99)


class TestThresholds:
    def test_tabulated_rows(self):
        assert math.isclose(cat.threshold("p1", 8), 5.0 / 7.0, rel_tol=1e-15)
        assert math.isclose(cat.threshold("p0", 4), 1.0 / math.sqrt(3.0), rel_tol=1e-15)
        assert math.isclose(cat.threshold("p1", 6), (math.sqrt(6) - 1) / 5, rel_tol=1e-15)
        assert math.isclose(cat.threshold("p1", 4), -1.0 / 3.0, rel_tol=1e-15)
        assert math.isclose(
            cat.threshold("p2", 7), math.sqrt((43 - 4 * math.sqrt(109)) / 35), rel_tol=1e-15
        )
        assert abs(cat.threshold("p2", 7) - 0.188132) <= 1e-6

    def test_missing_rows(self):
        with pytest.raises(cat.NotFound):
            cat.threshold("p0", 7)
        with pytest.raises(cat.NotFound):
            cat.threshold("p1", 10)
        with pytest.raises(cat.NotFound):
            cat.threshold("bogus", 5)
