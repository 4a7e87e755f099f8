#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "zigzag/continuous_kernels.hpp"
#include "zigzag/finite_solver.hpp"
#include "zigzag/lattice_ext.hpp"
#include "zigzag/simulator.hpp"
#include "zigzag/stats.hpp"

using namespace zigzag;

namespace {

ModelInstance gaussian_model(std::uint64_t seed, bool diag = false) {
  const GaussianPcaParams p(3, 1);
  ModelInstance m;
  m.kernel = PcaKernel::from_density(diag ? gaussian_diag_kernel_density(p) : gaussian_kernel_density(p));
  m.seed = seed;
  return m;
}

std::vector<double> gaussian_line(std::size_t width, std::uint64_t seed) {
  CounterRng rng(seed, kStreamLine, 0);
  return even_entries(sample_hzmc_line(gaussian_invariant_hzmc(GaussianPcaParams(3, 1)).chain, 2 * width - 1, rng));
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Fraction of `hits` with its batch-means standard error.
std::pair<double, double> frequency(const std::vector<double>& hits) {
  const LineSummary s = summarize_line(hits);
  return {s.mean, s.mean_se};
}

}  // namespace

TEST_SUITE("zigzag line sampling") {
  TEST_CASE("identity kernels give a constant line") {
    HzmcSpec h;
    h.d = Matrix::Identity(3, 3);
    h.u = Matrix::Identity(3, 3);
    h.rho0 = Vector::Constant(3, 1.0 / 3);
    for (std::uint64_t s = 0; s < 5; ++s) {
      CounterRng rng(s, kStreamLine, 0);
      const auto line = sample_hzmc_line(h, 101, rng);
      for (double v : line) CHECK(v == line[0]);
    }
  }

  TEST_CASE("two-letter chain: first-line marginal is uniform") {
    const HzmcSolution sol = solve_hzmc(fixture::two_letter());
    CounterRng rng(3, kStreamLine, 0);
    const auto xs = even_entries(sample_hzmc_line(sol.spec, 200001, rng));
    const auto [f, se] = frequency(xs);  // letters 0/1, so the mean is the frequency of the second letter
    CHECK(std::abs(f - 0.5) < 3 * se);
  }

  TEST_CASE("gaussian chain: zigzag lag-1 correlation is phi") {
    const GaussianInvariant g = gaussian_invariant_hzmc(GaussianPcaParams(3, 1));
    CounterRng rng(4, kStreamLine, 0);
    const LineSummary s = summarize_line(sample_hzmc_line(g.chain, 100000, rng));
    CHECK(std::abs(s.autocorrelation[0] - g.phi) < 3 * s.autocorrelation_se[0]);
    CHECK(std::abs(s.variance - g.stationary_sd * g.stationary_sd) < 3 * s.variance_se);
  }

  TEST_CASE("cyclic sampler reproduces the cyclic law") {
    const Matrix d = fixture::two_letter_d(), u = fixture::two_letter_u();
    for (std::size_t n : {1u, 2u, 3u}) {
      CAPTURE(n);
      const ChzmcSpec spec{d, u, n, partition_function(d, u, n)};
      const auto law = oracle::cyclic_law(d, u, n);
      const std::size_t draws = 40000;
      std::vector<double> counts(law.size(), 0.0);
      for (std::uint64_t r = 0; r < draws; ++r) {
        CounterRng rng(8, kStreamLine, r);
        const auto line = sample_chzmc_line(spec, rng);
        REQUIRE(line.size() == 2 * n);
        std::size_t idx = 0;
        for (double v : line) idx = idx * 2 + static_cast<std::size_t>(v);
        counts[idx] += 1;
      }
      for (std::size_t i = 0; i < law.size(); ++i) {
        const double f = counts[i] / draws, se = std::sqrt(law[i] * (1 - law[i]) / draws);
        CHECK(std::abs(f - law[i]) <= 4 * se + 1e-12);
      }
    }
  }
}

TEST_SUITE("synchronous update") {
  TEST_CASE("copy-left kernel truncates the line") {
    ModelInstance m;
    m.kernel.sample = [](double a, double, CounterRng&) { return a; };
    const std::vector<double> line{3, 1, 4, 1, 5};
    CHECK(step_pca(line, m, 0) == std::vector<double>{3, 1, 4, 1});
    m.boundary = Boundary::Cycle;
    CHECK(step_pca(line, m, 0) == line);
    m.boundary = Boundary::ResampleRightEdge;
    CHECK_THROWS_AS(step_pca(line, m, 0), InputError);
    m.right_edge = [](double a, CounterRng&) { return a + 10; };
    CHECK(step_pca(line, m, 0) == std::vector<double>{3, 1, 4, 1, 15});
    m.boundary = Boundary::Shrink;
    CHECK_THROWS_AS(step_pca(std::vector<double>{1}, m, 0), InputError);
  }

  TEST_CASE("uniform finite kernel ignores its input") {
    const TransitionTensor t(FiniteAlphabet::indexed(3), std::vector<double>(27, 1.0 / 3));
    ModelInstance m;
    m.kernel = PcaKernel::from_tensor(t);
    m.seed = 12;
    std::vector<double> zeros(30001, 0.0), twos(30001, 2.0);
    const auto a = step_pca(zeros, m, 0), b = step_pca(twos, m, 0);
    CHECK(a == b);
    for (double letter : {0.0, 1.0, 2.0}) {
      std::vector<double> hits;
      for (double v : a) hits.push_back(v == letter ? 1.0 : 0.0);
      const auto [f, se] = frequency(hits);
      CHECK(std::abs(f - 1.0 / 3) < 3 * se);
    }
    CHECK_THROWS_AS(step_pca(std::vector<double>{0, 3}, m, 0), InputError);
  }

  TEST_CASE("two-letter chain: pair law after one step") {
    const HzmcSolution sol = solve_hzmc(fixture::two_letter());
    CounterRng rng(5, kStreamLine, 0);
    const auto line = even_entries(sample_hzmc_line(sol.spec, 200001, rng));
    ModelInstance m;
    m.kernel = PcaKernel::from_tensor(fixture::two_letter());
    m.seed = 6;
    const auto next = step_pca(line, m, 0);
    const Matrix du = sol.spec.d * sol.spec.u;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        std::vector<double> hits;
        for (std::size_t i = 0; i + 1 < next.size(); ++i) hits.push_back(next[i] == a && next[i + 1] == b ? 1.0 : 0.0);
        const auto [f, se] = frequency(hits);
        CHECK(std::abs(f - sol.spec.rho0(a) * du(a, b)) < 3 * se);
      }
  }

  TEST_CASE("zero steps echo the initial line") {
    const auto init = gaussian_line(50, 1);
    const SpaceTimeDiagram d = simulate_diagram(gaussian_model(1), init, 0);
    CHECK(d.steps == 0);
    CHECK(bitwise_equal(d.states, init));
  }

  TEST_CASE("gaussian and its diagonal modification give identical diagrams") {
    const auto init = gaussian_line(300, 2);
    const SpaceTimeDiagram a = simulate_diagram(gaussian_model(9), init, 100);
    const SpaceTimeDiagram b = simulate_diagram(gaussian_model(9, true), init, 100);
    CHECK(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(double)) == 0);
    CHECK(std::isnan(a.at(100, 299)));
    CHECK(std::isfinite(a.at(100, 199)));
  }

  TEST_CASE("results do not depend on the thread count") {
    const auto init = gaussian_line(20000, 3);
    ModelInstance one = gaussian_model(4), many = gaussian_model(4);
    many.threads = 8;
    const SpaceTimeDiagram a = simulate_diagram(one, init, 5);
    const SpaceTimeDiagram b = simulate_diagram(many, init, 5);
    CHECK(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(double)) == 0);
    const SpaceTimeDiagram c = simulate_diagram(gaussian_model(5), init, 5);
    CHECK(std::memcmp(a.states.data(), c.states.data(), a.states.size() * sizeof(double)) != 0);
  }

  TEST_CASE("a perturbation spreads one site per step to the left") {
    auto init = gaussian_line(80, 7);
    const SpaceTimeDiagram base = simulate_diagram(gaussian_model(8), init, 20);
    const std::size_t j0 = 50;
    init[j0] += 0.25;
    const SpaceTimeDiagram pert = simulate_diagram(gaussian_model(8), init, 20);
    for (std::size_t t = 0; t <= 20; ++t)
      for (std::size_t j = 0; j + t < 80; ++j) {
        const bool in_cone = j <= j0 && j + t >= j0;
        CHECK((base.at(t, j) != pert.at(t, j)) == in_cone);
      }
  }

  TEST_CASE("shrinking windows need enough width") {
    CHECK_THROWS_AS(simulate_diagram(gaussian_model(1), gaussian_line(10, 1), 10), InputError);
    ModelInstance m = gaussian_model(1);
    m.lattice = Lattice::Cycle;
    CHECK_THROWS_AS(simulate_diagram(m, gaussian_line(10, 1), 2), InputError);
  }
}

TEST_SUITE("exclusion process") {
  TEST_CASE("the frozen configuration is invariant") {
    const double r = 0.5;
    for (double v : {1.0, 2.0, 3.0}) {
      const TasepConfig c = tasep_frozen(40, r, v, 0.7);
      const TasepConfig next = tasep_step(c, 3, 0);
      for (std::size_t i = 0; i + 1 < 40; ++i) CHECK(next.positions[i] == c.positions[i]);
      ModelInstance m;
      m.kernel = tasep_kernel(r, v, 0.7);
      m.seed = 3;
      const SpaceTimeDiagram d = simulate_diagram(m, c.positions, 30);
      for (std::size_t t = 0; t <= 30; ++t)
        for (std::size_t j = 0; j + t < 40; ++j) CHECK(d.at(t, j) == c.positions[j]);
    }
  }

  TEST_CASE("p = 1 with room to move shifts every particle by v") {
    TasepConfig c{{0, 10, 20, 30}, 0.5, 2, 1};
    const TasepConfig next = tasep_step(c, 1, 0);
    CHECK(next.positions == std::vector<double>{2, 12, 22, 32});
  }

  TEST_CASE("p = 1 with touching particles: the left one is blocked") {
    const double r = 0.5;
    TasepConfig c{{0, 2 * r}, r, 3, 1};
    const TasepConfig next = tasep_step(c, 1, 0);
    CHECK(next.positions[0] == 0.0);
    CHECK(next.positions[1] == 2 * r + 3);
  }

  TEST_CASE("move fraction matches p") {
    const double r = 0.5;
    TasepConfig c{{}, r, r, 0.5};
    for (int i = 0; i < 10000; ++i) c.positions.push_back(10 * r * i);
    const TasepConfig next = tasep_step(c, 21, 0);
    std::vector<double> moved;
    for (std::size_t i = 0; i < c.positions.size(); ++i) moved.push_back(next.positions[i] != c.positions[i] ? 1 : 0);
    const auto [f, se] = frequency(moved);
    CHECK(std::abs(f - 0.5) < 3 * se);
  }

  TEST_CASE("no overlap and no overtaking over many steps") {
    const double r = 0.5;
    TasepConfig c{{}, r, 1.7, 0.6};
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> gap(2 * r, 4 * r);
    double x = 0;
    for (int i = 0; i < 500; ++i) c.positions.push_back(x += gap(gen));
    for (std::size_t t = 0; t < 200; ++t) {
      const TasepConfig next = tasep_step(c, 5, t);
      for (std::size_t i = 0; i + 1 < next.positions.size(); ++i) {
        CHECK(next.positions[i] + 2 * r <= next.positions[i + 1]);
        CHECK(next.positions[i] >= c.positions[i]);
      }
      c = next;
    }
  }

  TEST_CASE("inadmissible lines are rejected") {
    CHECK_THROWS_AS(tasep_step(TasepConfig{{0, 0.5}, 0.5, 1, 0.5}, 1, 0), InputError);
    CHECK_THROWS_AS(tasep_step(TasepConfig{{0, 5}, 0.5, 1, 0}, 1, 0), InputError);
    ModelInstance m;
    m.kernel = tasep_kernel(0.5, 1, 0.5);
    CHECK_THROWS_AS(step_pca(std::vector<double>{0, 0.9, 3}, m, 0), InputError);
  }
}

TEST_SUITE("first-passage percolation") {
  TEST_CASE("constant weights add the weight") {
    const std::vector<double> row(20, 0.0);
    const auto next = fpp_step(row, WeightLaw{WeightLaw::Kind::Constant, 1.5, 1.5}, 1, 0);
    CHECK(next == std::vector<double>(19, 1.5));
  }

  TEST_CASE("shifting the row shifts the output") {
    const WeightLaw law{WeightLaw::Kind::Exponential, 1.0, 1.0};
    std::vector<double> row{0, 1, 0.5, 2, 0.25, 3};
    const auto a = fpp_step(row, law, 4, 2);
    for (double& v : row) v += 0.75;
    const auto b = fpp_step(row, law, 4, 2);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i] + 0.75).epsilon(1e-15));
  }

  TEST_CASE("outputs are monotone in inputs and weights") {
    const WeightLaw slow{WeightLaw::Kind::Exponential, 1.0, 1.0}, fast{WeightLaw::Kind::Exponential, 2.0, 1.0};
    const std::vector<double> row{0, 1, 0.5, 2, 0.25, 3, 1};
    const auto base = fpp_step(row, slow, 6, 0);
    for (std::size_t k = 0; k < row.size(); ++k) {
      auto bumped = row;
      bumped[k] += 0.5;
      const auto out = fpp_step(bumped, slow, 6, 0);
      for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] >= base[i]);
    }
    const auto quicker = fpp_step(row, fast, 6, 0);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(quicker[i] <= base[i]);
  }

  TEST_CASE("exponential weights from a flat row: mean of the minimum is 1/2") {
    const auto next = fpp_step(std::vector<double>(10001, 0.0), WeightLaw{WeightLaw::Kind::Exponential, 1.0, 1.0}, 7, 0);
    const LineSummary s = summarize_line(next);
    CHECK(std::abs(s.mean - 0.5) < 3 * s.mean_se);
  }

  TEST_CASE("negative travel times and bad laws are rejected") {
    CHECK_THROWS_AS(fpp_step(std::vector<double>{0, -1}, WeightLaw{}, 1, 0), InputError);
    CHECK_THROWS_AS(fpp_kernel(WeightLaw{WeightLaw::Kind::Exponential, 0.0, 1.0}), InputError);
    CHECK_THROWS_AS(fpp_kernel(WeightLaw{WeightLaw::Kind::Uniform, 2.0, 1.0}), InputError);
  }
}

TEST_SUITE("diagram files") {
  TEST_CASE("binary round trip is exact, csv leaves dropped cells empty") {
    const SpaceTimeDiagram d = simulate_diagram(gaussian_model(2), gaussian_line(6, 2), 2);
    std::stringstream bin;
    write_diagram_binary(d, bin);
    CHECK(bin.str().size() == 16 + 18 * 8);
    const SpaceTimeDiagram back = read_diagram_binary(bin);
    CHECK(back.width == 6);
    CHECK(back.steps == 2);
    CHECK(std::memcmp(back.states.data(), d.states.data(), d.states.size() * sizeof(double)) == 0);

    std::stringstream csv;
    write_diagram_csv(d, csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].substr(rows[2].size() - 2) == ",,");
    CHECK(std::stod(rows[0].substr(0, rows[0].find(','))) == d.at(0, 0));

    std::stringstream truncated(bin.str().substr(0, 20));
    CHECK_THROWS_AS(read_diagram_binary(truncated), InputError);
  }
}
