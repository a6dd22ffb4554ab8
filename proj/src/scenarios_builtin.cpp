#include "dwarp/runner.hpp"

namespace dwarp {

namespace {

constexpr const char* kCommonChecks = R"dw(
[checks]
check = composition
check = isometry
check = metric_blocks
check = u_field
check = connection_closed_form
check = curvature_closed_form
check = mixed_sectional
check = sff_invariants
check = gauss_equation
check = classification
check = mixed_totally_geodesic
check = h_decomposition
check = norm_identity
check = factor_geodesy
check = umbilical
check = minimality
check = partial_mean_curvature
check = shape_operator_closed_form
check = max_sectional
check = fundamental_inequality
)dw";

constexpr const char* kSpaceFormChecks = R"dw(check = space_form_inequality
check = h1_dot_h2
check = a_h_closed_form
check = perpendicularity_criterion
)dw";

const std::string kCircleFactors = R"dw(
[manifold circle_n]
dim = 1
coords = al
g 1 1 = "1"
bound al = (0.1, 6.2)

[manifold circle_m]
dim = 1
coords = be
g 1 1 = "1"
bound be = (0.05, 6.25)

[immersion circle_id]
source = circle_n
target = circle_m
comp 1 = "al"
)dw";

std::string direct_product() {
  return std::string(R"dw(# Direct product of two flat intervals, identity factor maps, unit warps.

[manifold m1]
dim = 1
coords = x
g 1 1 = "1"
bound x = (0.45, 2.55)

[manifold m2]
dim = 1
coords = y
g 1 1 = "1"
bound y = (0.45, 2.55)

[manifold n1]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.5, 2.5)

[manifold n2]
dim = 1
coords = v
g 1 1 = "1"
bound v = (0.5, 2.5)

[warp flat_ambient]
factor1 = m1
factor2 = m2
f1 = "1"
f2 = "1"

[immersion id1]
source = n1
target = m1
comp 1 = "u"

[immersion id2]
source = n2
target = m2
comp 1 = "v"

[scenario direct_product]
phi1 = id1
phi2 = id2
ambient = flat_ambient
c = 0
hypothesis = harmonic
hypothesis = minimal
samples = random 12
)dw") + kCommonChecks + kSpaceFormChecks +
         "check = eigenfunction_perpendicularity\ncheck = harmonic_perpendicularity\ncheck = obstruction\n";
}

std::string polar_plane() {
  return std::string(R"dw(# The flat plane in polar coordinates as a singly warped product (f2 = 1).

[manifold rline]
dim = 1
coords = r
g 1 1 = "1"
bound r = (0.3, 5.0)

[manifold profile_dom]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.4, 4.8)
)dw") + kCircleFactors + R"dw(
[warp polar]
factor1 = rline
factor2 = circle_m
f1 = "r"
f2 = "1"

[immersion radial_id]
source = profile_dom
target = rline
comp 1 = "u"

[scenario polar_plane]
phi1 = radial_id
phi2 = circle_id
ambient = polar
c = 0
hypothesis = harmonic
hypothesis = minimal
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks +
         "check = eigenfunction_perpendicularity\ncheck = harmonic_perpendicularity\ncheck = obstruction\n";
}

std::string sphere_warped() {
  return std::string(R"dw(# The unit sphere as the warped product (0,pi) x_{sin} S^1; c = 1.

[manifold theta_line]
dim = 1
coords = th
g 1 1 = "1"
bound th = (0.1, 3.04)

[manifold profile_dom]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.15, 2.99)
)dw") + kCircleFactors + R"dw(
[warp sphere]
factor1 = theta_line
factor2 = circle_m
f1 = "sin(th)"
f2 = "1"

[immersion meridian_id]
source = profile_dom
target = theta_line
comp 1 = "u"

[scenario sphere_warped]
phi1 = meridian_id
phi2 = circle_id
ambient = sphere
c = 1
hypothesis = minimal
hypothesis = eigenfunction 1 0
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks + "check = obstruction\n";
}

std::string flat_doubly_warped() {
  return std::string(R"dw(# The flat chart s^2 dr^2 + r^2 ds^2: a genuinely doubly warped c = 0
# representation with identity factor maps; the equality case of the
# fundamental inequality.

[manifold aline]
dim = 1
coords = a
g 1 1 = "1"
bound a = (0.35, 3.7)

[manifold bline]
dim = 1
coords = b
g 1 1 = "1"
bound b = (0.35, 3.7)

[manifold n1]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.4, 3.6)

[manifold n2]
dim = 1
coords = v
g 1 1 = "1"
bound v = (0.4, 3.6)

[warp flat_rep]
factor1 = aline
factor2 = bline
f1 = "a"
f2 = "b"

[immersion id1]
source = n1
target = aline
comp 1 = "u"

[immersion id2]
source = n2
target = bline
comp 1 = "v"

[scenario flat_doubly_warped]
phi1 = id1
phi2 = id2
ambient = flat_rep
c = 0
hypothesis = harmonic
hypothesis = minimal
samples = random 12
)dw") + kCommonChecks + kSpaceFormChecks +
         "check = eigenfunction_perpendicularity\ncheck = harmonic_perpendicularity\ncheck = obstruction\n";
}

std::string catenoid() {
  return std::string(R"dw(# The catenoid in flat 3-space (cylindrical chart dt^2 + dz^2 + t^2 dbe^2),
# profile parametrized by arc length: t = sqrt(1+s^2), z = asinh(s).

[manifold profile_dom]
dim = 1
coords = s
g 1 1 = "1"
bound s = (-1.2, 1.2)

[manifold halfplane]
dim = 2
coords = t z
g 1 1 = "1"
g 2 2 = "1"
bound t = (0.2, 4.0)
bound z = (-3.0, 3.0)
)dw") + kCircleFactors + R"dw(
[warp cylindrical3]
factor1 = halfplane
factor2 = circle_m
f1 = "t"
f2 = "1"

[immersion profile]
source = profile_dom
target = halfplane
comp 1 = "sqrt(1 + s^2)"
comp 2 = "log(s + sqrt(1 + s^2))"

[scenario surface_of_revolution_catenoid]
phi1 = profile
phi2 = circle_id
ambient = cylindrical3
c = 0
hypothesis = minimal
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks + "check = obstruction\n";
}

std::string cylinder() {
  return std::string(R"dw(# A non-minimal cylinder of revolution: vertical profile line at t = 1/2,
# so the composite is a radius-1/2 cylinder with |H| = 1.

[manifold profile_dom]
dim = 1
coords = s
g 1 1 = "1"
bound s = (-1.5, 1.5)

[manifold halfplane]
dim = 2
coords = t z
g 1 1 = "1"
g 2 2 = "1"
bound t = (0.2, 4.0)
bound z = (-3.0, 3.0)
)dw") + kCircleFactors + R"dw(
[warp cylindrical3]
factor1 = halfplane
factor2 = circle_m
f1 = "t"
f2 = "1"

[immersion vertical_line]
source = profile_dom
target = halfplane
comp 1 = "1/2"
comp 2 = "s"

[scenario cylinder_of_revolution]
phi1 = vertical_line
phi2 = circle_id
ambient = cylindrical3
c = 0
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks + "check = eigenfunction_perpendicularity\ncheck = harmonic_perpendicularity\n";
}

std::string sphere_of_revolution() {
  return std::string(R"dw(# The unit sphere as a surface of revolution: arc-length half-circle profile
# t = sin(s), z = -cos(s). Totally umbilical, and an equality case of the
# fundamental inequality with nonzero mean curvature.

[manifold profile_dom]
dim = 1
coords = s
g 1 1 = "1"
bound s = (0.35, 2.79)

[manifold halfplane]
dim = 2
coords = t z
g 1 1 = "1"
g 2 2 = "1"
bound t = (0.05, 4.0)
bound z = (-3.0, 3.0)
)dw") + kCircleFactors + R"dw(
[warp cylindrical3]
factor1 = halfplane
factor2 = circle_m
f1 = "t"
f2 = "1"

[immersion half_circle]
source = profile_dom
target = halfplane
comp 1 = "sin(s)"
comp 2 = "-cos(s)"

[scenario sphere_of_revolution]
phi1 = half_circle
phi2 = circle_id
ambient = cylindrical3
c = 0
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks;
}

std::string generic_4d() {
  return std::string(R"dw(# Seed-pinned generic scenario: polynomial curves immersed into the
# two-dimensional factors of a curved 4-dimensional doubly warped ambient.
# The source factor metrics are the exact symbolic pullbacks, so the maps
# are isometric by construction. No space-form constant.

[manifold mfac1]
dim = 2
coords = a b
g 1 1 = "1"
g 2 2 = "1"
bound a = (-1.0, 1.0)
bound b = (-1.0, 1.0)

[manifold mfac2]
dim = 2
coords = w y
g 1 1 = "1"
g 2 2 = "1"
bound w = (-1.0, 1.0)
bound y = (-1.0, 1.0)

[manifold curve1_dom]
dim = 1
coords = u
g 1 1 = "(0.6 + 0.2*u)^2 + (0.3 - 0.4*u)^2"
bound u = (-0.8, 0.8)

[manifold curve2_dom]
dim = 1
coords = v
g 1 1 = "(0.5 - 0.2*v)^2 + (0.4 + 0.3*v)^2"
bound v = (-0.8, 0.8)

[warp generic_ambient]
factor1 = mfac1
factor2 = mfac2
f1 = "2 + 0.3*a + 0.2*b^2"
f2 = "2 + 0.25*w - 0.15*y"

[immersion curve1]
source = curve1_dom
target = mfac1
comp 1 = "0.6*u + 0.1*u^2"
comp 2 = "0.3*u - 0.2*u^2"

[immersion curve2]
source = curve2_dom
target = mfac2
comp 1 = "0.5*v - 0.1*v^2"
comp 2 = "0.4*v + 0.15*v^2"

[scenario generic_4d_doubly_warped]
phi1 = curve1
phi2 = curve2
ambient = generic_ambient
samples = random 12
)dw") + kCommonChecks;
}

std::string eigenfunction_case() {
  return std::string(R"dw(# The radius-1/2 sphere as a warped product representation with c = 4; the
# induced warp f1 = sin(2u)/2 is a Laplace eigenfunction with eigenvalue 4.

[manifold theta_line]
dim = 1
coords = th
g 1 1 = "1"
bound th = (0.06, 1.51)

[manifold profile_dom]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.1, 1.47)
)dw") + kCircleFactors + R"dw(
[warp half_sphere]
factor1 = theta_line
factor2 = circle_m
f1 = "sin(2*th)/2"
f2 = "1"

[immersion meridian_id]
source = profile_dom
target = theta_line
comp 1 = "u"

[scenario eigenfunction_case]
phi1 = meridian_id
phi2 = circle_id
ambient = half_sphere
c = 4
hypothesis = minimal
hypothesis = eigenfunction 4 0
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks + "check = obstruction\n";
}

std::string harmonic_case() {
  return std::string(R"dw(# A flat plane slice z = 1 inside flat 3-space, realized as a doubly warped
# product immersion with harmonic induced warp f1 = u; minimal, c = 0, and an
# equality case of the fundamental inequality.

[manifold profile_dom]
dim = 1
coords = u
g 1 1 = "1"
bound u = (0.4, 3.4)

[manifold halfplane]
dim = 2
coords = t z
g 1 1 = "1"
g 2 2 = "1"
bound t = (0.2, 4.0)
bound z = (-3.0, 3.0)
)dw") + kCircleFactors + R"dw(
[warp cylindrical3]
factor1 = halfplane
factor2 = circle_m
f1 = "t"
f2 = "1"

[immersion horizontal_line]
source = profile_dom
target = halfplane
comp 1 = "u"
comp 2 = "1"

[scenario harmonic_case]
phi1 = horizontal_line
phi2 = circle_id
ambient = cylindrical3
c = 0
hypothesis = harmonic
hypothesis = minimal
samples = random 12
)dw" + kCommonChecks + kSpaceFormChecks +
         "check = eigenfunction_perpendicularity\ncheck = harmonic_perpendicularity\ncheck = obstruction\n";
}

}  // namespace

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> scenarios = {
      {"direct_product", direct_product()},
      {"polar_plane", polar_plane()},
      {"sphere_warped", sphere_warped()},
      {"flat_doubly_warped", flat_doubly_warped()},
      {"surface_of_revolution_catenoid", catenoid()},
      {"cylinder_of_revolution", cylinder()},
      {"sphere_of_revolution", sphere_of_revolution()},
      {"generic_4d_doubly_warped", generic_4d()},
      {"eigenfunction_case", eigenfunction_case()},
      {"harmonic_case", harmonic_case()},
  };
  return scenarios;
}

}  // namespace dwarp
