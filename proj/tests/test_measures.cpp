#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "covfield/errors.hpp"
#include "covfield/measure.hpp"
#include "covfield/rng.hpp"

using namespace covfield;

namespace {

constexpr double kPi = std::numbers::pi;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("covfield_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST(Quadrature, SegmentMassIsLength) {
  Point a(2), b(2);
  a << -3, 0;
  b << 3, 0;
  const auto m = quadrature_segment(a, b, 1e-4);
  EXPECT_NEAR(m.total_mass(), 6.0, 1e-9);
  EXPECT_EQ(m.size(), 60000);
  // Midpoints of the cells.
  EXPECT_NEAR(m.atoms(0, 0), -3 + 0.5e-4, 1e-12);
}

TEST(Quadrature, SegmentLastCellShortened) {
  Point a(1), b(1);
  a << 0;
  b << 1.05;
  const auto m = quadrature_segment(a, b, 0.1);
  EXPECT_NEAR(m.total_mass(), 1.05, 1e-12);
  EXPECT_NEAR(m.weights[m.size() - 1], 0.05, 1e-12);
  EXPECT_NEAR(m.atoms(0, m.size() - 1), 1.025, 1e-12);
}

TEST(Quadrature, CircleMassAndRadius) {
  const auto m = quadrature_circle(2.0, 1000, 0.3);
  EXPECT_NEAR(m.total_mass(), 4 * kPi, 1e-10);
  for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_NEAR(m.atom(i).norm(), 2.0, 1e-12);
}

TEST(Quadrature, SphereAreaConverges) {
  const auto m = quadrature_sphere(1.5, 200, 400);
  EXPECT_NEAR(m.total_mass(), 4 * kPi * 2.25, 1e-4 * 4 * kPi * 2.25);
}

TEST(Quadrature, DiskIsProbability) {
  const auto m = quadrature_disk(1.0, 0.01);
  EXPECT_TRUE(m.normalized);
  EXPECT_NEAR(m.total_mass(), 1.0, 1e-12);
  // Second moment of the uniform disk is R²/4 per axis.
  double sxx = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) sxx += m.weights[i] * m.atoms(0, i) * m.atoms(0, i);
  EXPECT_NEAR(sxx, 0.25, 2e-3);
}

TEST(Measure, RejectsNegativeWeight) {
  Eigen::MatrixXd atoms(2, 2);
  atoms << 0, 1, 0, 1;
  Eigen::VectorXd w(2);
  w << 0.5, -0.5;
  EXPECT_THROW(make_measure(atoms, w), std::invalid_argument);
}

TEST(Measure, RejectsNonFiniteAtom) {
  Eigen::MatrixXd atoms(1, 2);
  atoms << 0, std::nan("");
  EXPECT_THROW(make_empirical(atoms), std::invalid_argument);
}

TEST(Measure, NormalizedFlag) {
  Eigen::MatrixXd atoms(1, 3);
  atoms << 0, 1, 2;
  Eigen::VectorXd w(3);
  w << 1, 1, 2;
  const auto m = make_measure(atoms, w);
  EXPECT_FALSE(m.normalized);
  const auto n = normalized_copy(m);
  EXPECT_TRUE(n.normalized);
  EXPECT_DOUBLE_EQ(n.weights[2], 0.5);
}

TEST(Measure, SampleCircleDeterministic) {
  const auto a = sample_circle_uniform(1.0, 50, 7);
  const auto b = sample_circle_uniform(1.0, 50, 7);
  const auto c = sample_circle_uniform(1.0, 50, 8);
  EXPECT_EQ(a.atoms, b.atoms);
  EXPECT_NE(a.atoms, c.atoms);
}

TEST(Measure, ConcatenateChecksDimension) {
  const auto a = quadrature_circle(1.0, 10);
  Point p(3), q(3);
  p << 0, 0, 0;
  q << 1, 0, 0;
  const auto b = quadrature_segment(p, q, 0.5);
  EXPECT_THROW(concatenate({a, b}), std::invalid_argument);
  const auto c = concatenate({a, a});
  EXPECT_EQ(c.size(), 20);
}

TEST(Rng, UniformMomentsAndReproducibility) {
  Rng r(42), s(42);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_EQ(u, s.uniform());
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
  EXPECT_NEAR(sum2 / n - std::pow(sum / n, 2), 1.0 / 12, 5e-3);
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-2);
  EXPECT_NEAR(sum2 / n, 1.0, 1e-2);
}

TEST(Generators, LineArrangementCountsAndLabels) {
  Point a(2), b(2);
  a << 0, 0;
  b << 1, 0;
  Point c(2), d(2);
  c << 0, 1;
  d << 1, 1;
  BoundingBox box{Point::Constant(2, -1), Point::Constant(2, 2)};
  const auto ds = gen_line_arrangement({{a, b, 10}, {c, d, 5}}, 0.0, 4, box, 1);
  ASSERT_EQ(ds.measure.size(), 19);
  EXPECT_EQ(ds.labels[0], 0);
  EXPECT_EQ(ds.labels[10], 1);
  EXPECT_EQ(ds.labels[18], kOutlierLabel);
  EXPECT_NEAR(ds.measure.atoms(0, 9), 1.0, 1e-15);
  for (int i = 15; i < 19; ++i) {
    EXPECT_GE(ds.measure.atoms(0, i), -1.0);
    EXPECT_LE(ds.measure.atoms(1, i), 2.0);
  }
}

TEST(Generators, SuitesHaveExpectedShape) {
  const auto lines = gen_arrangement_suite(ArrangementKind::lines2d, 2, 5);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].measure.dim, 2);
  EXPECT_EQ(lines[0].measure.size(), 300);
  const auto mixed = gen_arrangement_suite(ArrangementKind::mixed_curves2d, 1, 5);
  EXPECT_EQ(mixed[0].measure.size(), 400);
  const auto planes = gen_arrangement_suite(ArrangementKind::planes3d, 1, 5);
  EXPECT_EQ(planes[0].measure.dim, 3);
  EXPECT_EQ(planes[0].measure.size(), 3 * 144);
  EXPECT_THROW(parse_arrangement_kind("spirals"), std::invalid_argument);
  EXPECT_EQ(parse_arrangement_kind(to_string(ArrangementKind::planes3d)), ArrangementKind::planes3d);
}

TEST(Io, CsvRoundTripIsExact) {
  auto ds = gen_arrangement_suite(ArrangementKind::lines2d, 1, 9)[0];
  ds.labels[3] = kOutlierLabel;
  const auto path = temp_path("roundtrip.csv");
  save_csv(ds, path);
  const auto back = load_csv(path);
  EXPECT_EQ(back.measure.atoms, ds.measure.atoms);
  EXPECT_EQ(back.measure.weights, ds.measure.weights);
  EXPECT_EQ(back.labels, ds.labels);
  std::filesystem::remove(path);
}

TEST(Io, JsonRoundTripIsExact) {
  const auto ds = gen_arrangement_suite(ArrangementKind::planes3d, 1, 2)[0];
  const auto path = temp_path("roundtrip.json");
  save_json(ds, path);
  const auto back = load_json(path);
  EXPECT_EQ(back.measure.atoms, ds.measure.atoms);
  EXPECT_EQ(back.measure.weights, ds.measure.weights);
  EXPECT_EQ(back.labels, ds.labels);
  std::filesystem::remove(path);
}

TEST(Io, UnlabeledCsv) {
  const auto path = temp_path("unlabeled.csv");
  write_file(path, "x_1,x_2,weight\n0,0,0.5\n1,2,0.5\n");
  const auto ds = load_csv(path);
  EXPECT_TRUE(ds.labels.empty());
  EXPECT_EQ(ds.measure.size(), 2);
  EXPECT_DOUBLE_EQ(ds.measure.atoms(1, 1), 2.0);
  std::filesystem::remove(path);
}

TEST(Io, RaggedRowReportsLine) {
  const auto path = temp_path("ragged.csv");
  write_file(path, "x_1,x_2,weight\n0,0,0.5\n1,0.5\n");
  try {
    load_csv(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::filesystem::remove(path);
}

TEST(Io, NegativeWeightRejected) {
  const auto path = temp_path("negative.csv");
  write_file(path, "x_1,weight\n0,0.5\n1,-0.5\n");
  EXPECT_THROW(load_csv(path), ParseError);
  std::filesystem::remove(path);
}

TEST(Io, NonNumericCell) {
  const auto path = temp_path("nan.csv");
  write_file(path, "x_1,weight\nabc,1\n");
  EXPECT_THROW(load_csv(path), ParseError);
  std::filesystem::remove(path);
}

TEST(Io, MissingFile) { EXPECT_THROW(load_dataset(temp_path("does_not_exist.csv")), std::runtime_error); }

TEST(Io, FormatDoubleRoundTrips) {
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = r.normal() * std::pow(10.0, r.uniform(-20, 20));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
