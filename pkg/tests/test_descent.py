import random
from fractions import Fraction

import pytest

from conftest import SEED, random_rs_invariants
from orbitlab.descent import (LocalImage, MarkedCurve, descent_class,
                              local_image, local_mw_size, sel12_local,
                              two_torsion_size)
from orbitlab.errors import PrecisionError, PreconditionError, UsageError
from orbitlab.etale import square_class
from orbitlab.orbits import algebra_of
from orbitlab.rings import GF, QQ, RR, Qp
from orbitlab.thetarep import Invariants


def _neg_gamma_class(c, place=None):
    L = algebra_of(c)
    ring = c.ring
    ng = L.mul(L.gamma(), L.scalar(ring.neg(ring.one)))
    return square_class(L, ng, place)


class TestMarkedCurve:
    def test_validation(self):
        with pytest.raises(PreconditionError):
            MarkedCurve(Invariants(QQ, (Fraction(0), Fraction(0)),
                                   Fraction(0)), 1)
        with pytest.raises(UsageError):
            MarkedCurve(Invariants(QQ, (Fraction(0), Fraction(-1)),
                                   Fraction(1)), 3)

    def test_genus(self):
        c = Invariants(QQ, (Fraction(0), Fraction(-1)), Fraction(1))
        assert MarkedCurve(c, 1).genus == 1
        assert MarkedCurve(c, 2).genus == 1

    def test_hpoly(self):
        c = Invariants(QQ, (Fraction(0), Fraction(-1)), Fraction(1))
        f = MarkedCurve(c, 1).hpoly()
        xf = MarkedCurve(c, 2).hpoly()
        t = Fraction(3)
        assert xf.eval(t) == t * f.eval(t)


class TestDescentClass:
    @pytest.mark.parametrize("ring", [GF(5), Qp(3, 20), RR])
    def test_marked_point_maps_to_neg_gamma(self, ring):
        rng = random.Random(SEED + 30)
        for _ in range(15):
            if ring is RR:
                c = random_rs_invariants(QQ, rng, span=5)
                cc = Invariants(RR, tuple(RR.from_fraction(a) for a in c.a),
                                RR.from_fraction(c.e))
            else:
                cc = random_rs_invariants(ring, rng, span=5)
            try:
                for which in (1, 2):
                    curve = MarkedCurve(cc, which)
                    cls = descent_class("marked", curve)
                    assert cls.labels == _neg_gamma_class(cc).labels
            except (PreconditionError, PrecisionError):
                # inseparable reduction mod p: the factor layer declines
                continue
            # N(-gamma) = f(0) = e^2, a square
            L = algebra_of(cc)
            ng = L.mul(L.gamma(), L.scalar(cc.ring.neg(cc.ring.one)))
            norm = L.norm(ng)
            assert cc.ring.eq(norm, cc.ring.mul(cc.e, cc.e))
            assert cc.ring.is_square(norm)

    def test_affine_point_class(self, f5):
        # y^2 = f(x) over F_5 with f = x^3+4x^2+x+4: find a point and map it
        c = Invariants(f5, (f5.from_int(4), f5.from_int(1)), f5.from_int(2))
        curve = MarkedCurve(c, 1)
        f = curve.fpoly()
        found = 0
        for x0 in range(5):
            fx = f.eval(f5.from_int(x0))
            if f5.is_zero(fx) or not f5.is_square(fx):
                continue
            y0 = f5.sqrt(fx)
            cls = descent_class((f5.from_int(x0), y0), curve)
            assert all(lab in (0, 1) for lab in cls.labels)
            found += 1
        assert found > 0

    def test_bad_point_rejected(self, f5):
        c = Invariants(f5, (f5.from_int(4), f5.from_int(1)), f5.from_int(2))
        curve = MarkedCurve(c, 1)
        with pytest.raises(PreconditionError):
            descent_class((f5.from_int(0), f5.from_int(1)), curve)


class TestLocalSizes:
    def test_two_torsion(self, base_c_f5, base_c_q):
        assert two_torsion_size(base_c_f5) == 4
        assert two_torsion_size(base_c_q) == 1
        assert two_torsion_size(base_c_q, place=GF(5)) == 2

    def test_bv_factors(self, base_c_q):
        # |J/2J| = b_v * |J[2]|: 1 at odd p, 2^g at 2, 2^-g over R
        assert local_mw_size(base_c_q, Qp(5, 20), 1) == 2
        assert local_mw_size(base_c_q, Qp(2, 24), 1) == \
            2 * two_torsion_size(base_c_q, place=Qp(2, 24))
        tsr = two_torsion_size(base_c_q, place=RR)
        assert local_mw_size(base_c_q, RR, 1) == tsr // 2


class TestLocalImage:
    def test_gf_full_group(self, base_c_f5):
        im = local_image(base_c_f5, None, 1)
        assert im.complete and len(im.classes) == 4

    def test_good_reduction_unramified(self, base_c_q):
        im = local_image(base_c_q, Qp(7, 20), 1)
        assert im.complete
        assert len(im.classes) == im.target
        for cls in im.classes:
            assert all(lab[0] == 0 for lab in cls.labels)

    def test_real_image(self, base_c_q):
        im = local_image(base_c_q, RR, 1)
        assert im.complete and len(im.classes) == im.target

    def test_two_adic_image(self, base_c_q):
        im = local_image(base_c_q, Qp(2, 24), 1)
        assert im.complete
        assert len(im.classes) == im.target

    def test_group_closure(self, base_c_q):
        im = local_image(base_c_q, Qp(7, 20), 1)
        classes = im.classes
        for c1 in classes:
            for c2 in classes:
                assert im.contains(c1 * c2)

    def test_contains_marked_class(self, base_c_q):
        for place in (Qp(7, 20), RR):
            im = local_image(base_c_q, place, 2)
            assert im.contains(_neg_gamma_class(base_c_q, place))

    def test_serialize_shape(self, base_c_q):
        im = local_image(base_c_q, Qp(7, 20), 1)
        data = im.serialize()
        assert data["place"] == "Qp:7"
        assert data["complete"] is True
        assert sorted(data["classes"]) == data["classes"]


class TestSel12:
    def test_intersection_subset(self, base_c_q):
        place = Qp(7, 20)
        inter = sel12_local(base_c_q, place)
        im1 = local_image(base_c_q, place, 1)
        im2 = local_image(base_c_q, place, 2)
        for cls in inter.classes:
            assert im1.contains(cls) and im2.contains(cls)
        assert inter.complete

    def test_strict_inclusion_family_member(self):
        # f = x(x-1)(x-4) + 25 at p = 5: the two-curve intersection is a
        # proper subgroup of the first curve's image
        c = Invariants(QQ, (Fraction(-5), Fraction(4)), Fraction(5))
        K = Qp(5, 20)
        # 5 * f(5) = 225 is a 5-adic square
        assert K.is_square(K.from_fraction(Fraction(5)
                                           * c.fpoly().eval(Fraction(5))))
        im1 = local_image(c, K, 1)
        inter = sel12_local(c, K)
        assert im1.complete and inter.complete
        assert len(inter.classes) < len(im1.classes)
        assert inter.contains(_neg_gamma_class(c, K))
