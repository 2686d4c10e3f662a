import math

import numpy as np
import pytest

from ricci_lab import spherical_family as sf
from ricci_lab import warped_geometry as wg
from ricci_lab.errors import (
    DegenerateProfile,
    DomainError,
    InvalidScale,
    NonFiniteDerivative,
)
from ricci_lab.phase_portrait import RicciParams
from ricci_lab.spherical_family import SphericalParams


def sin_profile():
    return wg.MetricProfile(
        f=math.sin, df=math.cos, d2f=lambda s: -math.sin(s),
        domain=(0.0, math.pi), provenance="closed-form",
    )


def flat_profile():
    one = lambda s: 1.0
    zero = lambda s: 0.0
    return wg.MetricProfile(f=one, df=zero, d2f=zero,
                            domain=(-math.inf, math.inf))


class TestGaussianCurvature:
    def test_sine_profile_has_unit_curvature(self):
        assert wg.gaussian_curvature(sin_profile(), math.pi / 2) == pytest.approx(1.0, abs=1e-14)

    def test_flat_cylinder_has_zero_curvature(self):
        assert wg.gaussian_curvature(flat_profile(), 0.3) == 0.0

    def test_family_curvature_at_origin(self):
        # K(0) = c - m / f(0)^4 with f(0)^2 = ell
        params = SphericalParams(c=1.0, m=0.51, ell=0.73)
        profile = sf.metric_profile(params)
        k = wg.gaussian_curvature(profile, 0.0)
        assert k == pytest.approx(1.0 - 0.51 / 0.73**2, abs=1e-12)

    def test_curvature_gap_identity_on_grid(self):
        rng = np.random.default_rng(7)
        for c in (0.5, 1.0, 2.0):
            m = rng.uniform(0.1, 1.5)
            ell = math.sqrt(c * m) + rng.uniform(0.05, 1.0)
            params = SphericalParams(c=c, m=m, ell=ell)
            profile = sf.metric_profile(params)
            for s in np.linspace(-1.0, 4.0, 33):
                k = wg.gaussian_curvature(profile, float(s))
                f = profile.f(float(s))
                assert abs(k - (c - m * f**-4)) <= 1e-10 * (1.0 + abs(c))

    def test_outside_domain_raises(self):
        with pytest.raises(DomainError):
            wg.gaussian_curvature(sin_profile(), 4.0)

    def test_nonpositive_f_raises(self):
        bad = wg.MetricProfile(f=math.cos, df=lambda s: -math.sin(s),
                               d2f=lambda s: -math.cos(s), domain=(0.0, math.pi))
        with pytest.raises(DegenerateProfile):
            wg.gaussian_curvature(bad, 2.0)


class TestLaplacian:
    def test_constant_scalar(self):
        u = wg.ScalarProfile(u=lambda s: 5.0, du=lambda s: 0.0, d2u=lambda s: 0.0)
        assert wg.laplacian_rotinv(sin_profile(), u, 1.0) == 0.0

    def test_flat_metric_s_squared(self):
        u = wg.ScalarProfile(u=lambda s: s * s, du=lambda s: 2.0 * s,
                             d2u=lambda s: 2.0)
        assert wg.laplacian_rotinv(flat_profile(), u, 0.7) == pytest.approx(2.0)

    def test_log_curvature_gap_satisfies_linear_equation(self):
        # for the a=4 family, Lap log(c - K) = 4 K with b = 0
        params = SphericalParams(c=1.0, m=0.51, ell=0.73)
        profile = sf.metric_profile(params)

        def du(s):
            f, f1, _, _, _ = sf.f_derivs(params, s)
            return -4.0 * f1 / f

        def d2u(s):
            f, f1, f2, _, _ = sf.f_derivs(params, s)
            return -4.0 * (f2 / f - (f1 / f) ** 2)

        u = wg.ScalarProfile(u=lambda s: math.log(0.51) - 4.0 * math.log(profile.f(s)),
                             du=du, d2u=d2u)
        for s in np.linspace(0.0, math.pi, 17):
            lap = wg.laplacian_rotinv(profile, u, float(s))
            k = wg.gaussian_curvature(profile, float(s))
            assert lap == pytest.approx(4.0 * k, abs=1e-11)


class TestRicciResidual:
    def test_constant_curvature_chart(self):
        profile = wg.MetricProfile(
            f=math.sin, df=math.cos, d2f=lambda s: -math.sin(s),
            domain=(0.0, math.pi),
        )
        grid = np.linspace(0.3, math.pi - 0.3, 32)
        report = wg.ricci_residual(profile, wg.RicciType(a=4.0, c=1.0), grid)
        assert report.max_normalized <= 1e-10

    def test_flat_cylinder(self):
        report = wg.ricci_residual(flat_profile(), wg.RicciType(a=4.0, c=1.0),
                                   np.linspace(-2.0, 2.0, 16))
        assert report.max_normalized == 0.0

    def test_closed_form_family_residual(self):
        params = SphericalParams(c=1.0, m=0.5, ell=0.8)
        profile = sf.metric_profile(params)
        grid = np.linspace(0.0, math.pi, 512)
        report = wg.ricci_residual(profile, wg.RicciType(a=4.0, c=1.0), grid)
        assert report.max_normalized <= 1e-8

    def test_finite_difference_fallback_matches_closed_form(self):
        params = SphericalParams(c=1.0, m=0.5, ell=0.8)
        full = sf.metric_profile(params)
        fd_only = wg.MetricProfile(f=full.f, df=full.df, d2f=full.d2f,
                                   domain=full.domain)
        grid = np.linspace(0.0, math.pi, 64)
        rtype = wg.RicciType(a=4.0, c=1.0)
        a = wg.ricci_residual(full, rtype, grid)
        b = wg.ricci_residual(fd_only, rtype, grid)
        # fallback is noisier but must agree on the verdict scale
        assert a.max_normalized <= 1e-10
        assert b.max_normalized <= 1e-5

    def test_fd_stencil_at_domain_edge_raises(self):
        profile = wg.MetricProfile(
            f=math.sin, df=math.cos, d2f=lambda s: -math.sin(s),
            domain=(0.0, math.pi),
        )
        with pytest.raises(NonFiniteDerivative):
            wg.ricci_residual(profile, wg.RicciType(a=4.0, c=1.0), [1e-7])


class TestRescale:
    def test_identity(self):
        p = RicciParams(a=4.0, c=1.0, m=0.51, ell=0.73)
        assert wg.rescale_params(p, 1.0) == p

    def test_example_image(self):
        p = wg.rescale_params(RicciParams(a=4.0, c=1.0, m=0.51, ell=0.73), 4.0)
        assert (p.a, p.c, p.m, p.ell) == (4.0, 0.25, 2.04, 0.73)
        assert math.sqrt(p.c * p.m) < p.ell  # admissibility preserved

    def test_rescaled_profile_solves_rescaled_equation(self):
        # f~(s~) = sqrt(eta) f(s~ / sqrt(eta)) must satisfy
        # f~'' = m~ f~^(1-a) - c~ f~ for the image parameters
        eta = 4.0
        base = SphericalParams(c=1.0, m=0.51, ell=0.73)
        img = wg.rescale_params(RicciParams(a=4.0, c=1.0, m=0.51, ell=0.73), eta)
        root = math.sqrt(eta)
        for st in np.linspace(0.0, 2.0 * math.pi, 25):
            f, _, f2, _, _ = sf.f_derivs(base, st / root)
            ft = root * f
            ft2 = f2 / root
            assert ft2 == pytest.approx(img.m * ft ** (1.0 - img.a) - img.c * ft,
                                        abs=1e-12)

    def test_composition_law(self):
        p = RicciParams(a=4.0, c=1.0, m=1.0, ell=2.0)
        once = wg.rescale_params(wg.rescale_params(p, 2.0), 3.0)
        joint = wg.rescale_params(p, 6.0)
        assert once == joint

    def test_composition_law_fractional_exponent(self):
        p = RicciParams(a=3.0, c=1.0, m=1.0, ell=2.0)
        once = wg.rescale_params(wg.rescale_params(p, 2.0), 3.0)
        joint = wg.rescale_params(p, 6.0)
        assert once.c == pytest.approx(joint.c, rel=1e-15)
        assert once.m == pytest.approx(joint.m, rel=1e-15)
        assert (once.a, once.ell) == (joint.a, joint.ell)

    def test_product_of_circles_scaling_chain(self):
        # metric scaling by eta changes c by 1/eta^2 (two rescale steps);
        # eta = 1/(2 r1 sqrt(c_new)) carries c = 1/(4 r1^2) onto c_new
        r1 = 0.7
        c = 1.0 / (4.0 * r1 * r1)
        c_new = 2.0
        eta = 1.0 / (2.0 * r1 * math.sqrt(c_new))
        p = RicciParams(a=4.0, c=c, m=0.3, ell=math.sqrt(c * 0.3) + 0.2)
        img = wg.rescale_params(wg.rescale_params(p, eta), eta)
        assert img.c == pytest.approx(c_new, rel=1e-14)
        assert math.sqrt(img.c * img.m) < img.ell

    def test_invalid_scale(self):
        p = RicciParams(a=4.0, c=1.0, m=0.51, ell=0.73)
        with pytest.raises(InvalidScale):
            wg.rescale_params(p, 0.0)
        with pytest.raises(InvalidScale):
            wg.rescale_params(p, -2.0)


class TestTypes:
    def test_ricci_type_requires_finite_fields(self):
        with pytest.raises(DomainError):
            wg.RicciType(a=math.nan, c=1.0)

    def test_lattice_validation(self):
        with pytest.raises(DomainError):
            wg.TorusLattice(T=0.0, gamma1=0.0, gamma2=1.0)
        with pytest.raises(DomainError):
            wg.TorusLattice(T=1.0, gamma1=0.0, gamma2=0.0)

    def test_closed_form_derivatives_match_finite_differences(self):
        params = SphericalParams(c=1.0, m=0.51, ell=0.73)
        profile = sf.metric_profile(params)
        h1, h2 = 1e-6, 1e-4
        for s in np.linspace(0.1, math.pi, 64):
            s = float(s)
            fd1 = (profile.f(s + h1) - profile.f(s - h1)) / (2.0 * h1)
            fd2 = (profile.f(s + h2) - 2.0 * profile.f(s)
                   + profile.f(s - h2)) / (h2 * h2)
            assert abs(profile.df(s) - fd1) <= 1e-6 * max(1.0, abs(fd1))
            assert abs(profile.d2f(s) - fd2) <= 1e-6 * max(1.0, abs(fd2))
