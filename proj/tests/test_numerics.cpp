#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "tubular/io.hpp"
#include "tubular/numerics.hpp"

using namespace tubular;

TEST_CASE("adaptive quadrature") {
  auto f = [](double x) { return std::sin(x); };
  CHECK(integrate_adaptive(f, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
  auto g = [](double x) { return std::exp(-x * x); };
  // erf(2) * sqrt(pi) / 2
  CHECK(integrate_adaptive(g, -2.0, 2.0) ==
        doctest::Approx(1.764162781524843).epsilon(1e-12));
}

TEST_CASE("finite difference weights") {
  std::vector<double> xs = {-2, -1, 0, 1, 2};
  auto w = fd_weights(0.0, xs, 1);
  CHECK(w[0] == doctest::Approx(1.0 / 12));
  CHECK(w[1] == doctest::Approx(-8.0 / 12));
  CHECK(w[2] == doctest::Approx(0.0));
  CHECK(w[3] == doctest::Approx(8.0 / 12));
  CHECK(w[4] == doctest::Approx(-1.0 / 12));

  // one-sided stencil, d/dx sin at 0
  double h = 1e-2;
  std::vector<double> pos(7);
  for (int i = 0; i < 7; ++i) pos[i] = i * h;
  auto ws = fd_weights(0.0, pos, 1);
  double d = 0;
  for (int i = 0; i < 7; ++i) d += ws[i] * std::sin(pos[i]);
  CHECK(d == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fourier differentiation matrix") {
  for (int n : {32, 31}) {
    Eigen::MatrixXd D = fourier_diff_matrix(n);
    CHECK((D + D.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    Eigen::VectorXd f(n), expect(n);
    for (int j = 0; j < n; ++j) {
      double x = 2 * M_PI * j / n;
      f(j) = std::sin(3 * x);
      expect(j) = 3 * std::cos(3 * x);
    }
    CHECK((D * f - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
  // only the constant vector is blind to an odd-size derivative
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fourier_diff_matrix(31));
  CHECK(lu.dimensionOfKernel() == 1);
}

TEST_CASE("fits") {
  std::vector<double> x = {1, 2, 3, 4}, y = {3.0, 5.0, 7.0, 9.0};
  auto [a, b] = linear_fit(x, y);
  CHECK(a == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(2.0));

  std::vector<double> h = {0.1, 0.05, 0.025, 0.0125}, e;
  for (double v : h) e.push_back(7.0 * v * v);
  CHECK(loglog_slope(h, e) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("levenshtein") {
  CHECK(levenshtein("twist", "twst") == 1);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.404825557695773, -1e-17, 6.02e23, 0.0}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("csv round trip") {
  CsvTable t;
  t.header = {"epsilon", "value"};
  t.rows = {{"0.1", "2.404825557695773"}, {"0.05", "-3"}};
  auto path = std::filesystem::temp_directory_path() / "tubular_csv_test.csv";
  write_csv(path.string(), t);
  CsvTable r = read_csv(path.string());
  CHECK(r.header == t.header);
  CHECK(r.rows == t.rows);
  std::filesystem::remove(path);
}
