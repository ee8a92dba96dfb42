import math

import numpy as np
import pytest

from hypercone import (
    Arc,
    IfsSystem,
    Mat2,
    Multicone,
    arc_image,
    elliptic_certificate,
    find_multicone,
    hyperbolicity_constants,
    verify_strict_invariance,
)
from hypercone.multicone import SearchParams, scan_traces
from hypercone.projective import project_act, project_derivative

from conftest import random_positive_sl2

ATTRACTOR_LO = math.atan(3.0)  # ~1.2490
ATTRACTOR_HI = math.pi / 2


def gauss_legendre_arc_length(m, arc, nodes=64):
    """Independent oracle: integral of |phi'| over the arc by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid = arc.start + arc.length / 2.0
    half = arc.length / 2.0
    total = 0.0
    for xi, wi in zip(x, w):
        total += wi * project_derivative(m, mid + half * xi)
    return total * half


class TestArc:
    def test_validation(self):
        with pytest.raises(ValueError):
            Arc(0.0, 0.0)
        with pytest.raises(ValueError):
            Arc(0.0, math.pi)

    def test_wrapping_containment(self):
        arc = Arc(3.0, 0.5)  # wraps past pi
        assert arc.contains_point(3.1)
        assert arc.contains_point(0.2)
        assert not arc.contains_point(1.0)

    def test_multicone_rejects_overlap(self):
        with pytest.raises(ValueError):
            Multicone((Arc(0.0, 1.0), Arc(0.5, 1.0)))

    def test_multicone_rejects_improper(self):
        with pytest.raises(ValueError):
            Multicone((Arc(0.0, 1.6), Arc(1.7, 1.5)))


class TestArcImage:
    def test_identity(self):
        arc = Arc(0.3, 0.9)
        img = arc_image(Mat2.identity(), arc)
        assert img.isclose(arc)

    def test_rotation_translates(self):
        arc = Arc(0.3, 0.9)
        img = arc_image(Mat2.rotation(0.5), arc)
        assert img.isclose(Arc(0.8, 0.9))

    def test_diagonal_endpoints(self):
        arc = Arc(math.pi / 4, math.pi / 4)
        img = arc_image(Mat2.diagonal(2.0, 0.5), arc)
        assert img.start == pytest.approx(math.atan(0.25), abs=1e-12)
        assert img.end == pytest.approx(math.pi / 2, abs=1e-12)
        assert img.length == pytest.approx(math.pi / 2 - math.atan(0.25), abs=1e-12)

    def test_length_matches_quadrature(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            m = random_positive_sl2(rng)
            arc = Arc(float(rng.uniform(0, math.pi)), float(rng.uniform(0.1, 1.2)))
            img = arc_image(m, arc)
            assert img.length == pytest.approx(
                gauss_legendre_arc_length(m, arc), abs=1e-9
            )

    def test_composition(self, oracle_system):
        arc = Arc(1.3, 0.2)
        m1 = oracle_system.matrix("1")
        m2 = oracle_system.matrix("2")
        one_shot = arc_image(m1 @ m2, arc)
        two_step = arc_image(m1, arc_image(m2, arc))
        assert abs(one_shot.start - two_step.start) <= 1e-9
        assert abs(one_shot.length - two_step.length) <= 1e-9


class TestVerify:
    def test_single_contraction_verified(self):
        sys1 = IfsSystem.from_matrices([("1", [[0.5, 0.0], [0.0, 2.0]])])
        cert = verify_strict_invariance(sys1, Multicone.single(1.2, 0.7))
        assert cert.verified
        assert cert.margin > 0.0

    def test_rotation_refuted(self):
        sys1 = IfsSystem.from_matrices([("1", Mat2.rotation(0.3))])
        cert = verify_strict_invariance(sys1, Multicone.single(0.5, 1.0))
        assert not cert.verified
        assert cert.offending is not None

    def test_oracle_pair_verified(self, oracle_system, oracle_multicone):
        cert = verify_strict_invariance(oracle_system, oracle_multicone)
        assert cert.verified
        assert cert.margin > 0.0
        # Attractor bracket from the chart: images must cover [atan 3, pi/2].
        for arcs in cert.images.values():
            for arc in arcs:
                assert arc.start >= ATTRACTOR_LO - 1e-9
                assert arc.end <= ATTRACTOR_HI + 1e-9

    def test_nesting(self, oracle_system, oracle_multicone):
        cert = verify_strict_invariance(oracle_system, oracle_multicone)
        eps = cert.margin / 2.0
        dilated = sorted(
            (a.dilated(eps) for arcs in cert.images.values() for a in arcs),
            key=lambda a: a.start,
        )
        merged = [dilated[0]]
        for arc in dilated[1:]:
            last = merged[-1]
            if arc.start <= last.start + last.length:
                merged[-1] = Arc(
                    last.start,
                    max(last.length, arc.start + arc.length - last.start),
                )
            else:
                merged.append(arc)
        inner = Multicone(tuple(merged))
        assert verify_strict_invariance(oracle_system, inner).verified


class TestEllipticCertificate:
    def test_rotation_word(self):
        sys1 = IfsSystem.from_matrices([("1", Mat2.rotation(math.pi / 3))])
        assert elliptic_certificate(sys1, 3) == ("1",)

    def test_triangular_pair_clean(self, oracle_system):
        assert elliptic_certificate(oracle_system, 12) is None

    def test_inverse_pair_parabolic_flag(self, inverse_pair):
        scan = scan_traces(inverse_pair, 4)
        assert scan.elliptic_word is None
        assert ("1", "2") in scan.parabolic_words


class TestFindMulticone:
    def test_oracle_pair_found(self, oracle_system):
        res = find_multicone(oracle_system)
        assert res.found
        cone = res.multicone
        assert res.certificate.verified
        for t in (ATTRACTOR_LO + 1e-6, 1.4, ATTRACTOR_HI - 1e-6):
            assert cone.contains_point(t)

    def test_rotation_absent_with_certificate(self, rotation_system):
        res = find_multicone(rotation_system)
        assert not res.found
        assert res.elliptic_word == ("1",)

    def test_inverse_pair_absent_with_parabolic_note(self, inverse_pair):
        res = find_multicone(inverse_pair, SearchParams(depth=10, retries=2))
        assert not res.found
        assert res.elliptic_word is None
        assert ("1", "2") in res.parabolic_words

    def test_mutual_exclusion_randomized(self):
        rng = np.random.default_rng(2024)
        for trial in range(50):
            if trial % 2 == 0:
                mats = [(str(i + 1), random_positive_sl2(rng)) for i in range(2)]
            else:
                mats = [
                    ("1", Mat2.rotation(float(rng.uniform(0.2, math.pi - 0.2)))),
                    ("2", random_positive_sl2(rng)),
                ]
            system = IfsSystem.from_matrices(mats)
            res = find_multicone(system, SearchParams(depth=20, retries=3))
            cert = elliptic_certificate(system, 6)
            assert not (cert is not None and res.found)


class TestHyperbolicityConstants:
    def test_single_diagonal(self):
        sys1 = IfsSystem.from_matrices([("1", [[2.0, 0.0], [0.0, 0.5]])])
        c, lam = hyperbolicity_constants(sys1, None, 8)
        assert lam == pytest.approx(2.0, rel=1e-12)
        assert c == pytest.approx(1.0, rel=1e-12)

    def test_triangular_pair(self, oracle_system, oracle_multicone):
        c, lam = hyperbolicity_constants(oracle_system, oracle_multicone, 12)
        assert lam == pytest.approx(2.0, rel=0.01)
        assert 0.0 < c <= 1.0 + 1e-12

    def test_rotation_warns(self, rotation_system):
        with pytest.warns(UserWarning):
            c, lam = hyperbolicity_constants(rotation_system, None, 6)
        assert lam <= 1.0 + 1e-12

    def test_axis_of_long_words_outside_multicone(self, oracle_system, oracle_multicone):
        # Strong contractions must have their axis neighborhood outside U.
        from hypercone.enumeration import iter_products
        from hypercone.projective import contraction_axis

        cert = verify_strict_invariance(oracle_system, oracle_multicone)
        eps = cert.margin / 2.0
        for word, a, b, c, d, logs in iter_products(oracle_system, 8):
            t = float(contraction_axis(Mat2(a, b, c, d)))
            neighborhood = Arc(t - eps, 2.0 * eps)
            assert oracle_multicone.clearance_of(neighborhood) is None
