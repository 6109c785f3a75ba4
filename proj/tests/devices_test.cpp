#include "qwnet/assembly.hpp"
#include "qwnet/devices.hpp"
#include "qwnet/solver.hpp"
#include "support/random_networks.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace qwnet {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Devices, GroverFourMatchesPrinted) {
  CMatrix expected(4, 4);
  expected << -1, 1, 1, 1, 1, -1, 1, 1, 1, 1, -1, 1, 1, 1, 1, -1;
  expected *= 0.5;
  EXPECT_EQ(grover_coin(4), expected);
}

TEST(Devices, GroverTwoIsSwap) {
  CMatrix expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_EQ(grover_coin(2), expected);
}

TEST(Devices, GroverInvolutionAndSymmetry) {
  for (int n = 2; n <= 16; ++n) {
    const CMatrix g = grover_coin(n);
    EXPECT_LT((g * g - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-14) << n;
    EXPECT_EQ(g, g.transpose());
    EXPECT_EQ(g, g.adjoint());
  }
  EXPECT_THROW(grover_coin(1), ValidationError);
}

TEST(Devices, BeamSplitterUnitary) {
  const CMatrix b = beamsplitter_5050();
  EXPECT_EQ(b.rows(), 4);
  EXPECT_LT(unitarity_defect(b), 1e-15);
  EXPECT_NEAR(std::abs(b(2, 0)), 1.0 / std::sqrt(2.0), 1e-16);
  EXPECT_EQ(b(0, 0), Complex(0.0, 0.0));
}

TEST(Devices, PhaseNode) {
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_EQ(phase_node(0.0), swap);
  const CMatrix full = phase_node(2 * kPi);
  EXPECT_NEAR(std::abs(full(0, 1) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(full(1, 0) + 1.0), 0.0, 1e-15);
  EXPECT_EQ(full(0, 0), Complex(0.0, 0.0));
}

TEST(Devices, PhaseAndMirrorDoublePass) {
  // Phase node on (1, 2), mirror on 2: one round trip collects e^{i phi} and the mirror's -1.
  for (double phi : {0.3, 1.7, 4.0}) {
    const NetworkGraph g(2, {testing::make_node(1, phase_node(phi), {1, 2}),
                             testing::make_node(2, mirror(), {2})});
    const auto sol = solve_steady_state(assemble(g, 1));
    EXPECT_LT(std::abs(sol.amplitude(1) + std::polar(1.0, phi)), 1e-15);
  }
}

TEST(Devices, Mirror) {
  EXPECT_EQ(mirror()(0, 0), Complex(-1.0, 0.0));
  EXPECT_EQ((mirror() * mirror())(0, 0), Complex(1.0, 0.0));
}

TEST(Devices, AnalyticAtPiPi) {
  const auto c = gm_analytic(kPi, kPi);
  EXPECT_LT(std::abs(c.B + 1.0), 1e-15);
  EXPECT_LT(std::abs(c.C), 1e-15);
  EXPECT_LT(std::abs(c.t - 1.0), 1e-15);
  EXPECT_LT(std::abs(c.r), 1e-15);
}

TEST(Devices, AnalyticIdentities) {
  for (int i = 0; i < 41; ++i) {
    for (int j = 0; j < 41; ++j) {
      const double p1 = 0.3 + i * (2 * kPi - 0.6) / 40;
      const double p2 = 0.3 + j * (2 * kPi - 0.6) / 40;
      const auto c = gm_analytic(p1, p2);
      EXPECT_NEAR(std::norm(c.r) + std::norm(c.t), 1.0, 1e-12);
      EXPECT_LT(std::abs(c.B * c.B - c.C * c.C - std::polar(1.0, p1 + p2)), 1e-12);
    }
  }
}

TEST(Devices, AnalyticEqualArms) {
  for (double phi : {0.1, 1.0, 2.5, 3.9, 6.0}) {
    const auto c = gm_analytic(phi, phi);
    EXPECT_NEAR(std::norm(c.t), std::pow(std::sin(phi / 2), 2), 1e-12);
  }
}

TEST(Devices, AnalyticSingularPoint) {
  EXPECT_THROW(gm_analytic(0.0, 0.0), SingularSystemError);
  EXPECT_THROW(gm_analytic(2 * kPi, 0.0), SingularSystemError);
  EXPECT_NO_THROW(gm_analytic(0.0, 0.5));
}

TEST(Devices, GroverMichelsonTopology) {
  const NetworkGraph g = build_grover_michelson(0.4, 1.1);
  EXPECT_EQ(g.node_count(), 5);
  EXPECT_EQ(g.edge_count(), 6);
  const auto inc = build_incidence(g);
  EXPECT_EQ(inc.internal_edge_count(), 4);
  EXPECT_EQ(inc.open_edges(), (std::vector<EdgeId>{1, 2}));
  EXPECT_TRUE(detect_simultaneity_hazard(g).empty());
  for (const auto& z : g.phase()) EXPECT_EQ(z, Complex(1.0, 0.0));
}

TEST(Devices, PipelineMatchesAnalyticGrid) {
  double worst = 0.0;
  for (int i = 0; i < 41; ++i) {
    for (int j = 0; j < 41; ++j) {
      const double p1 = 0.3 + i * (2 * kPi - 0.6) / 40;
      const double p2 = 0.3 + j * (2 * kPi - 0.6) / 40;
      const auto c = gm_analytic(p1, p2);
      const auto sol = solve_steady_state(assemble(build_grover_michelson(p1, p2), 1));
      worst = std::max({worst, std::abs(sol.amplitude(2) - c.t), std::abs(sol.amplitude(1) - c.r)});
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Devices, GroverMichelsonPortSymmetry) {
  for (auto [p1, p2] : {std::pair{0.7, 2.2}, std::pair{kPi, kPi}, std::pair{5.0, 1.0}}) {
    const CMatrix s = full_scattering_matrix(build_grover_michelson(p1, p2));
    EXPECT_LT(std::abs(s(0, 0) - s(1, 1)), 1e-12);
    EXPECT_LT(std::abs(s(1, 0) - s(0, 1)), 1e-12);
  }
  const CMatrix s = full_scattering_matrix(build_grover_michelson(kPi, kPi));
  EXPECT_NEAR(std::abs(s(1, 0)), 1.0, 1e-12);
}

TEST(Devices, MichelsonWithBeamSplitter) {
  for (auto [p1, p2] : {std::pair{0.0, 1.0}, std::pair{0.7, 2.9}, std::pair{3.0, 3.0}}) {
    const NetworkGraph g(6, {testing::make_node(1, beamsplitter_5050(), {1, 2, 3, 4}),
                             testing::make_node(2, phase_node(p1), {3, 5}),
                             testing::make_node(3, phase_node(p2), {4, 6}),
                             testing::make_node(4, mirror(), {5}),
                             testing::make_node(5, mirror(), {6})});
    const auto sol = solve_steady_state(assemble(g, 1));
    const double expected = std::norm((std::polar(1.0, p1) - std::polar(1.0, p2)) / 2.0);
    EXPECT_NEAR(std::norm(sol.amplitude(2)), expected, 1e-12);
  }
}

TEST(Devices, SpecParsing) {
  EXPECT_EQ(make_device("grover:3"), grover_coin(3));
  EXPECT_EQ(make_device("bs5050"), beamsplitter_5050());
  EXPECT_EQ(make_device("mirror"), mirror());
  EXPECT_EQ(make_device("pass"), pass_through());
  EXPECT_EQ(make_device("identity:3"), CMatrix(CMatrix::Identity(3, 3)));
  EXPECT_EQ(make_device("phase:0.25"), phase_node(0.25));
  const DeviceSpec spec = DeviceSpec::parse("phase:$phi1");
  EXPECT_TRUE(spec.is_parametric());
  EXPECT_EQ(spec.parameters(), (std::vector<std::string>{"phi1"}));
  std::string canonical;
  EXPECT_EQ(spec.build({{"phi1", 0.5}}, &canonical), phase_node(0.5));
  EXPECT_EQ(canonical, "phase:0.5");
  EXPECT_THROW(spec.build(), ValidationError);
  EXPECT_THROW(make_device("grover"), ValidationError);
  EXPECT_THROW(make_device("laser:1"), ValidationError);
  EXPECT_THROW(make_device("phase:abc"), ValidationError);
}

TEST(Devices, FormatDoubleRoundTrips) {
  testing::Rng rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

}  // namespace
}  // namespace qwnet
