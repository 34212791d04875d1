#include <doctest.h>

#include <cmath>

#include "espf/errors.hpp"
#include "espf/possibility.hpp"

using namespace espf;

namespace {

SupportCloud line_cloud(std::initializer_list<double> poss) {
  Points p(static_cast<Eigen::Index>(poss.size()), 1);
  Vector v(static_cast<Eigen::Index>(poss.size()));
  Eigen::Index i = 0;
  for (double x : poss) {
    p(i, 0) = static_cast<double>(i);
    v[i++] = x;
  }
  return SupportCloud(p, v);
}

}  // namespace

TEST_CASE("alpha cuts") {
  const SupportCloud u = SupportCloud::uniform(Points::Random(5, 2));
  CHECK(alpha_cut(u, 0.3).members.size() == 5);
  const SupportCloud c = line_cloud({1.0, 0.6, 0.2});
  CHECK(alpha_cut(c, 0.5).members == std::vector<std::size_t>{0, 1});
  CHECK(alpha_cut(c, 1.0).members == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(alpha_cut(c, 0.0), Error);
  CHECK_THROWS_AS(alpha_cut(c, 1.5), Error);
}

TEST_CASE("cloud construction validates possibilities") {
  Vector bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(SupportCloud(Points::Zero(2, 1), bad), Error);
  CHECK_THROWS_AS(SupportCloud(Points::Zero(3, 1), Vector::Ones(2)), Error);
}

TEST_CASE("conjunctive update") {
  const SupportCloud c = line_cloud({1.0, 0.8});
  Vector comp(2);
  comp << 0.5, 0.9;
  const ConjunctiveResult r = conjunctive_update(c, comp);
  CHECK(r.unnormalized[0] == doctest::Approx(0.5));
  CHECK(r.unnormalized[1] == doctest::Approx(0.8));
  CHECK(r.cloud.poss()[0] == doctest::Approx(0.625));
  CHECK(r.cloud.poss()[1] == doctest::Approx(1.0));

  const ConjunctiveResult same = conjunctive_update(c, Vector::Ones(2));
  CHECK(same.cloud.poss() == c.poss());

  CHECK_THROWS_AS(conjunctive_update(c, Vector::Zero(2)), AllZero);
}

TEST_CASE("max-min kernel extension") {
  Points pts(2, 1);
  pts << 0.0, 1.0;
  Vector poss(2);
  poss << 1.0, 0.5;
  const SupportCloud s(pts, poss);
  Points x(1, 1);
  x << 1.0;
  const ProximityFn table = [](const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    return b[0] == 0.0 ? 0.2 : 1.0;
    (void)a;
  };
  CHECK(kernel_extend(s, x, table)[0] == doctest::Approx(0.5));

  GaussianKernel k{Matrix::Identity(1, 1)};
  Points at(1, 1);
  at << 0.0;
  CHECK(kernel_extend(s, at, k)[0] == doctest::Approx(1.0));

  const ProximityFn zero = [](const Eigen::Ref<const Vector>&, const Eigen::Ref<const Vector>&) { return 0.0; };
  CHECK(kernel_extend(s, x, zero)[0] == 0.0);
}

TEST_CASE("anchor takes the first maximum") {
  CHECK(anchor(line_cloud({0.3, 1.0, 0.7})) == 1);
  CHECK(anchor(line_cloud({1.0, 1.0})) == 0);
}

TEST_CASE("max normalize") {
  Vector v(3);
  v << 0.2, 0.4, 0.1;
  const Vector n = max_normalize(v);
  CHECK(n.maxCoeff() == 1.0);
  CHECK(n[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(max_normalize(Vector::Zero(3)), AllZero);
}

TEST_CASE("subset keeps the requested order") {
  const SupportCloud c = line_cloud({1.0, 0.6, 0.2});
  const SupportCloud s = c.subset({2, 0});
  CHECK(s.points()(0, 0) == 2.0);
  CHECK(s.poss()[1] == 1.0);
}
