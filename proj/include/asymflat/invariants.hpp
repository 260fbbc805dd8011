#pragma once

#include <string>
#include <vector>

#include "asymflat/extrapolate.hpp"
#include "asymflat/metric.hpp"
#include "asymflat/surface.hpp"

namespace asymflat {

// mass flux through the centered coordinate sphere (hemisphere for half-spaces)
double flux_mass(const MetricSpec& spec, double r, int lquad = 32);

// center flux; the third component is zero for half-spaces
Vector3d flux_center(const MetricSpec& spec, double r, int lquad = 32);

struct ScalarSeries {
  std::vector<double> radii;
  std::vector<double> values;
  PowerFit fit;
};

struct VectorSeries {
  std::vector<double> radii;
  std::vector<Vector3d> values;
  std::array<PowerFit, 3> fit;
  Vector3d limit() const { return Vector3d(fit[0].limit, fit[1].limit, fit[2].limit); }
};

// two_term adds an r^-(rate+1) correction to the fit
ScalarSeries mass_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad = 32,
                         bool two_term = false);
VectorSeries center_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad = 32,
                           bool two_term = false);

enum class DeficitKind { J32, J31, J21, RelJ32 };
std::string to_string(DeficitKind k);
DeficitKind deficit_from_string(const std::string& s);

double deficit_value(DeficitKind kind, double r, const Measures& m);
double deficit(const MetricSpec& spec, DeficitKind kind, double r, int lquad = 24,
               std::optional<double> r0 = std::nullopt);
ScalarSeries deficit_series(const MetricSpec& spec, DeficitKind kind, const std::vector<double>& radii,
                            int lquad = 24, std::optional<double> r0 = std::nullopt, bool two_term = false);

enum class SpaceForm { S3, H3 };
// quotients of volume, area and integrated mean curvature: (3,2), (3,1), (2,1)
struct SmallSphere {
  double c32 = 0.0, c31 = 0.0, c21 = 0.0;
};
SmallSphere small_sphere(SpaceForm model);
// the three quotient ratios I_r / I for a geodesic ball of radius r
std::array<double, 3> small_sphere_ratios(SpaceForm model, double r);

// -(1 / 8 pi mass) * integral of x_alpha H dS_flat over the centered hemisphere
Vector2d center_from_H(const MetricSpec& spec, double r, double mass, int lquad = 32);
VectorSeries center_from_H_series(const MetricSpec& spec, const std::vector<double>& radii, int lquad = 32,
                                  bool two_term = false);

}  // namespace asymflat
