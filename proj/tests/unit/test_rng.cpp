#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "airink/rng.hpp"
#include "oracles.hpp"

using namespace airink;

TEST_CASE("derived seeds are deterministic and distinct per name and index") {
  CHECK(derive_seed(1, "generator") == derive_seed(1, "generator"));
  CHECK(derive_seed(1, "generator") != derive_seed(2, "generator"));
  CHECK(derive_seed(1, "generator") != derive_seed(1, "ensemble"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("a stream depends only on its key and draw count") {
  RandomStream a(7), b(7), c(8);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 100; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(a.counter() == 100);
  CHECK(RandomStream(3, "x").key() == derive_seed(3, "x"));
}

TEST_CASE("uniform draws lie in [0,1) with the right moments") {
  RandomStream rng(11);
  std::vector<double> v(100000);
  for (auto& x : v) {
    x = rng.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  CHECK(oracle::mean(v) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(oracle::variance(v) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("below is uniform over its range (chi-square at alpha 0.01)") {
  RandomStream rng(5);
  constexpr std::uint64_t k = 7;
  constexpr int n = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(k);
    REQUIRE(v < k);
    ++counts[v];
  }
  double chi = 0.0;
  const double expected = static_cast<double>(n) / k;
  for (int c : counts) chi += (c - expected) * (c - expected) / expected;
  CHECK(chi < oracle::chi_square_critical(k - 1, oracle::kZ01));
}

TEST_CASE("normal draws have zero mean and unit variance") {
  RandomStream rng(9);
  std::vector<double> v(200000);
  for (auto& x : v) x = rng.normal();
  CHECK(std::abs(oracle::mean(v)) < 0.01);
  CHECK(oracle::variance(v) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shuffle is a deterministic permutation") {
  std::vector<int> a(50), b;
  for (int i = 0; i < 50; ++i) a[i] = i;
  b = a;
  RandomStream r1(3), r2(3);
  shuffle(a.begin(), a.end(), r1);
  shuffle(b.begin(), b.end(), r2);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  std::vector<int> identity(50);
  for (int i = 0; i < 50; ++i) identity[i] = i;
  CHECK(a != identity);
}
