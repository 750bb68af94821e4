#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "vesselfuse/centerline.hpp"

namespace {

using namespace vesselfuse;
using vftest::kPi;

Centerline line_z(double from, double to, double step) {
  std::vector<Vec3> pts;
  const int n = static_cast<int>(std::lround((to - from) / step));
  for (int k = 0; k <= n; ++k) pts.push_back({0.0, 0.0, from + step * k});
  return centerline_from_points(pts);
}

// Quarter circle of radius r in the x-z plane, 1 degree apart.
std::vector<Vec3> quarter_arc(double r) {
  std::vector<Vec3> pts;
  for (int d = 0; d <= 90; ++d) {
    const double t = d * kPi / 180.0;
    pts.push_back({r - r * std::cos(t), 0.0, r * std::sin(t)});
  }
  return pts;
}

double dist(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 mean3(const Contour& c) {
  Vec3 m;
  for (const auto& p : c.points()) {
    m.x += p.x;
    m.y += p.y;
    m.z += p.z;
  }
  const double n = static_cast<double>(c.size());
  return {m.x / n, m.y / n, m.z / n};
}

// Landmarks of frame 0 as they land on a straight +z centerline through the origin, rolled by `deg`.
struct Landmarks {
  Vec3 aortic, upper, lower;
};

Landmarks landmarks(const GeometryPair& pair, double deg) {
  const Contour& c = pair.dia_geom.contours.front();
  const Vec3 o = c.centroid();
  const double r = deg * kPi / 180.0;
  auto place = [&](Vec3 p) {
    const double dx = p.x - o.x;
    const double dy = p.y - o.y;
    return Vec3{dx * std::cos(r) - dy * std::sin(r), dx * std::sin(r) + dy * std::cos(r), 0.0};
  };
  const auto far = find_farthest_points(c);
  return {place(pair.dia_geom.reference_point->position()), place(far.points.first.position()),
          place(far.points.second.position())};
}

TEST(CenterlineFromPoints, StraightLine) {
  const Centerline cl = line_z(0.0, 5.0, 1.0);
  ASSERT_EQ(cl.size(), 6u);
  for (const auto& p : cl.points) {
    EXPECT_EQ(p.normal.x, 0.0);
    EXPECT_EQ(p.normal.y, 0.0);
    EXPECT_EQ(p.normal.z, 1.0);
  }
  EXPECT_DOUBLE_EQ(centerline_length(cl), 5.0);
  EXPECT_EQ(cl.points[3].contour_point.frame_index, 3);
}

TEST(CenterlineFromPoints, TwoPointsShareNormal) {
  const std::vector<Vec3> pts{{0, 0, 0}, {3, 4, 0}};
  const Centerline cl = centerline_from_points(pts);
  EXPECT_EQ(cl.points[0].normal, cl.points[1].normal);
  EXPECT_DOUBLE_EQ(cl.points[0].normal.x, 0.6);
  EXPECT_DOUBLE_EQ(cl.points[0].normal.y, 0.8);
}

TEST(CenterlineFromPoints, QuarterArcNormalsFollowTangent) {
  const auto pts = quarter_arc(10.0);
  const Centerline cl = centerline_from_points(pts);
  for (std::size_t k = 0; k < cl.size(); ++k) {
    const double t = static_cast<double>(k) * kPi / 180.0;
    const Vec3 tangent{std::sin(t), 0.0, std::cos(t)};
    EXPECT_NEAR(cl.points[k].normal.x, tangent.x, 1e-2) << k;
    EXPECT_NEAR(cl.points[k].normal.z, tangent.z, 1e-2) << k;
    EXPECT_NEAR(std::hypot(cl.points[k].normal.x, cl.points[k].normal.y, cl.points[k].normal.z), 1.0, 1e-12);
  }
  EXPECT_NEAR(centerline_length(cl), 10.0 * kPi / 2.0, 1e-3);
}

TEST(CenterlineFromPoints, Errors) {
  const std::vector<Vec3> one{{0, 0, 0}};
  EXPECT_THROW(centerline_from_points(one), std::invalid_argument);
  const std::vector<Vec3> dup{{0, 0, 0}, {1, 0, 0}, {1, 0, 0}};
  EXPECT_THROW(centerline_from_points(dup), std::invalid_argument);
}

TEST(Resample, EvenSpacing) {
  const Centerline cl = resample_centerline(line_z(0.0, 10.0, 2.5), 1.0);
  ASSERT_EQ(cl.size(), 11u);
  for (std::size_t k = 0; k < cl.size(); ++k) EXPECT_NEAR(cl.position(k).z, static_cast<double>(k), 1e-12);
}

TEST(Resample, SpacingLongerThanCurveKeepsEnds) {
  const Centerline cl = resample_centerline(line_z(0.0, 1.0, 0.5), 5.0);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl.position(0).z, 0.0);
  EXPECT_EQ(cl.position(1).z, 1.0);
}

TEST(Resample, ArcStationsAreEquidistantAlongCurve) {
  const Centerline src = centerline_from_points(quarter_arc(10.0));
  const double spacing = 0.5;
  const Centerline cl = resample_centerline(src, spacing);
  EXPECT_NEAR(centerline_length(cl), centerline_length(src), spacing);
  for (std::size_t k = 1; k < cl.size(); ++k) {
    EXPECT_LE(dist(cl.position(k), cl.position(k - 1)), spacing + 1e-9);
    EXPECT_GT(dist(cl.position(k), cl.position(k - 1)), spacing * 0.99);
  }
}

TEST(Resample, RejectsNonPositiveSpacing) {
  const Centerline cl = line_z(0.0, 1.0, 0.5);
  EXPECT_THROW(resample_centerline(cl, 0.0), std::invalid_argument);
  EXPECT_THROW(resample_centerline(cl, -1.0), std::invalid_argument);
}

TEST(TiltToTangent, KeepsLengthAndMapsZAxis) {
  const Vec3 t{0.36, 0.48, 0.8};
  const Vec3 z = tilt_to_tangent({0, 0, 1}, t);
  EXPECT_NEAR(z.x, t.x, 1e-12);
  EXPECT_NEAR(z.y, t.y, 1e-12);
  EXPECT_NEAR(z.z, t.z, 1e-12);
  const Vec3 v{1.5, -2.0, 0.0};
  const Vec3 w = tilt_to_tangent(v, t);
  EXPECT_NEAR(dot(w, t), 0.0, 1e-12);
  EXPECT_NEAR(std::hypot(w.x, w.y, w.z), 2.5, 1e-12);
}

TEST(ThreePoint, IdentityRoll) {
  const GeometryPair pair = vftest::pullback_pair(10);
  const Landmarks lm = landmarks(pair, 0.0);
  const auto out = align_three_point(line_z(0.0, 10.0, 0.5), pair, lm.aortic, lm.upper, lm.lower);
  EXPECT_EQ(out.roll_deg, 0.0);
  EXPECT_TRUE(out.warnings.empty());
}

TEST(ThreePoint, RecoversQuarterTurn) {
  const GeometryPair pair = vftest::pullback_pair(10);
  const Landmarks lm = landmarks(pair, 90.0);
  const auto out = align_three_point(line_z(0.0, 10.0, 0.5), pair, lm.aortic, lm.upper, lm.lower, 1.0);
  EXPECT_NEAR(out.roll_deg, 90.0, 1.0);
  const auto placed = out.pair.dia_geom.reference_point->position();
  EXPECT_NEAR(dist(placed, lm.aortic), 0.0, 1e-9);
}

TEST(ThreePoint, OffGridRollLandsWithinOneStep) {
  const GeometryPair pair = vftest::pullback_pair(10);
  const Landmarks lm = landmarks(pair, 212.4);
  const auto out = align_three_point(line_z(0.0, 10.0, 0.5), pair, lm.aortic, lm.upper, lm.lower, 2.0);
  EXPECT_NEAR(out.roll_deg, 212.4, 2.0);
}

TEST(ThreePoint, RoundReferenceWarns) {
  GeometryPair pair;
  for (int k = 0; k < 4; ++k) {
    pair.dia_geom.contours.push_back(vftest::circle(k, 1.5, {4.5, 4.5}, 0.5 * k, 90));
    pair.sys_geom.contours.push_back(vftest::circle(k, 1.4, {4.5, 4.5}, 0.5 * k, 90));
  }
  pair.dia_geom.reference_point = ContourPoint{0, 0, 6.5, 4.5, 0.0, true};
  const auto out = align_three_point(line_z(0.0, 5.0, 0.5), pair, {2, 0, 0}, {0, 1.5, 0}, {0, -1.5, 0});
  EXPECT_EQ(out.warnings.size(), 1u);
}

TEST(ThreePoint, Errors) {
  GeometryPair pair = vftest::pullback_pair(10);
  const Landmarks lm = landmarks(pair, 0.0);
  EXPECT_THROW(align_three_point(line_z(0.0, 1.0, 0.5), pair, lm.aortic, lm.upper, lm.lower),
               std::invalid_argument);
  EXPECT_THROW(align_three_point(line_z(0.0, 10.0, 0.5), pair, lm.aortic, lm.upper, lm.lower, 0.0),
               std::invalid_argument);
  pair.dia_geom.reference_point.reset();
  EXPECT_THROW(align_three_point(line_z(0.0, 10.0, 0.5), pair, lm.aortic, lm.upper, lm.lower),
               std::invalid_argument);
}

TEST(Manual, ReversedCenterlineFlipsFrames) {
  const GeometryPair pair = vftest::pullback_pair(6);
  const auto out = align_manual(line_z(0.0, -5.0, -0.5), pair, 0.0, {0, 0, 0});
  for (std::size_t k = 0; k < pair.dia_geom.frame_count(); ++k) {
    const Contour& src = pair.dia_geom.contours[k];
    const Contour& dst = out.pair.dia_geom.contours[k];
    const Vec3 o = src.centroid();
    for (std::size_t i = 0; i < src.size(); ++i) {
      EXPECT_NEAR(dst.points()[i].x, src.points()[i].x - o.x, 1e-9);
      EXPECT_NEAR(dst.points()[i].y, -(src.points()[i].y - o.y), 1e-9);
      EXPECT_NEAR(dst.points()[i].z, -0.5 * static_cast<double>(k), 1e-9);
    }
  }
}

TEST(Manual, StartPointTrimsCenterline) {
  const GeometryPair pair = vftest::pullback_pair(6);
  const auto out = align_manual(line_z(-5.0, 10.0, 0.5), pair, 0.0, {0.1, 0.0, 0.1});
  EXPECT_NEAR(dist(out.centerline.position(0), {0, 0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(centerline_length(out.centerline), 10.0, 1e-9);
}

TEST(Manual, ReproducesThreePointPlacement) {
  const GeometryPair pair = vftest::pullback_pair(10);
  const Landmarks lm = landmarks(pair, 37.0);
  const Centerline cl = line_z(0.0, 10.0, 0.5);
  const auto three = align_three_point(cl, pair, lm.aortic, lm.upper, lm.lower);
  const auto manual = align_manual(cl, pair, three.roll_deg, lm.aortic);
  EXPECT_EQ(manual.pair, three.pair);
  EXPECT_EQ(manual.centerline, three.centerline);
}

// Placement on a curved centerline is rigid per frame.
TEST(Placement, FramesSitOnCenterlineAndStayRigid) {
  GeometryPair pair = vftest::pullback_pair(20);
  pair.dia_geom = create_catheter_geometry(pair.dia_geom);
  const auto out = align_manual(centerline_from_points(quarter_arc(20.0)), pair, 25.0, {0, 0, 0});
  ASSERT_EQ(out.pair.dia_geom.catheters.size(), 20u);
  for (std::size_t k = 0; k < 20; ++k) {
    const Contour& src = pair.dia_geom.contours[k];
    const Contour& dst = out.pair.dia_geom.contours[k];
    const Vec3 station = out.centerline.position(k);
    const Vec3 normal = out.centerline.points[k].normal;
    EXPECT_NEAR(dist(mean3(dst), station), 0.0, 1e-9) << k;
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const Vec3 p = dst.points()[i].position();
      const Vec3 rel{p.x - station.x, p.y - station.y, p.z - station.z};
      EXPECT_NEAR(dot(rel, normal), 0.0, 1e-9);
      const std::size_t j = (i + 7) % dst.size();
      EXPECT_NEAR(dist(p, dst.points()[j].position()),
                  dist(src.points()[i].position(), src.points()[j].position()), 1e-9);
    }
    // Catheter keeps its offset from the lumen.
    const Contour& cat = out.pair.dia_geom.catheters[k];
    EXPECT_NEAR(dist(cat.points()[0].position(), dst.points()[0].position()),
                dist(pair.dia_geom.catheters[k].points()[0].position(), src.points()[0].position()), 1e-9);
  }
  // Un-tilting a frame back into its own plane gives the original area.
  for (std::size_t k = 0; k < 20; ++k) {
    const Contour& dst = out.pair.sys_geom.contours[k];
    const Vec3 station = out.centerline.position(k);
    const Vec3 n = out.centerline.points[k].normal;
    const Vec3 back{-n.x, -n.y, n.z};  // inverse tilt for a tangent with no y part
    std::vector<ContourPoint> flat;
    for (const auto& p : dst.points()) {
      const Vec3 q = tilt_to_tangent({p.x - station.x, p.y - station.y, p.z - station.z}, back);
      EXPECT_NEAR(q.z, 0.0, 1e-9);
      flat.push_back({p.frame_index, p.point_index, q.x, q.y, 0.0, false});
    }
    EXPECT_NEAR(vftest::oracle::fan_area(Contour(dst.id(), flat)), vftest::oracle::fan_area(pair.sys_geom.contours[k]),
                1e-9);
    EXPECT_EQ(dst.id(), pair.sys_geom.contours[k].id());
  }
}

}  // namespace
