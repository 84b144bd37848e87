#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "gwsteer/state.hpp"
#include "gwsteer/symplectic.hpp"
#include "oracles.hpp"

using namespace gwsteer;

TEST_CASE("symplectic form") {
  SECTION("single mode block") {
    Eigen::MatrixXd expected(2, 2);
    expected << 0, 1, -1, 0;
    REQUIRE((symplectic_form(1) - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("two modes is the direct sum") {
    const Eigen::MatrixXd omega = symplectic_form(2);
    REQUIRE(omega.block<2, 2>(0, 0) == symplectic_form(1));
    REQUIRE(omega.block<2, 2>(2, 2) == symplectic_form(1));
    REQUIRE(omega.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("defining identities") {
    for (int n : {1, 2, 3, 4, 7}) {
      const Eigen::MatrixXd omega = symplectic_form(n);
      REQUIRE((omega * omega + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() ==
              0.0);
      REQUIRE((omega.transpose() + omega).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SECTION("rejects zero modes") { REQUIRE_THROWS_AS(symplectic_form(0), std::domain_error); }
}

TEST_CASE("covariance matrix validation") {
  REQUIRE_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);

  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(4, 4);
  asym(0, 2) = 1e-3;
  REQUIRE_THROWS_AS(CovarianceMatrix(asym), std::invalid_argument);

  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(4, 4);
  indefinite(0, 0) = -1.0;
  REQUIRE_THROWS_AS(CovarianceMatrix(indefinite), std::invalid_argument);

  // Symmetric positive definite but below the vacuum limit.
  REQUIRE_THROWS_AS(CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(4, 4)),
                    std::invalid_argument);

  REQUIRE(CovarianceMatrix::vacuum(3).n_modes() == 3);
}

TEST_CASE("symplectic eigenvalues") {
  SECTION("vacuum of any size gives all ones") {
    for (int n : {1, 2, 4}) {
      const auto nus = symplectic_eigenvalues(CovarianceMatrix::vacuum(n));
      REQUIRE(nus.size() == static_cast<std::size_t>(n));
      for (double nu : nus) REQUIRE_THAT(nu, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
  }
  SECTION("single-mode squeezed state stays pure") {
    const double r = 0.7;
    Eigen::MatrixXd sq(2, 2);
    sq << std::exp(-2 * r), 0, 0, std::exp(2 * r);
    const auto nus = symplectic_eigenvalues(CovarianceMatrix(sq));
    REQUIRE_THAT(nus[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  SECTION("thermal state returns the uniform variance") {
    const auto nus = symplectic_eigenvalues(CovarianceMatrix(3.0 * Eigen::MatrixXd::Identity(2, 2)));
    REQUIRE_THAT(nus[0], Catch::Matchers::WithinAbs(3.0, 1e-12));
  }
  SECTION("rejects non-symmetric input") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 0, 1;
    REQUIRE_THROWS_AS(symplectic_eigenvalues(m), std::invalid_argument);
  }
  SECTION("matches the independent eigensolver on random states") {
    std::mt19937 rng(7151);
    for (int trial = 0; trial < 30; ++trial) {
      const Eigen::MatrixXd sigma = oracle::random_covariance(3, rng);
      const auto nus = symplectic_eigenvalues(CovarianceMatrix(sigma));
      const auto expected = oracle::symplectic_eigenvalues(sigma);
      for (std::size_t k = 0; k < nus.size(); ++k)
        REQUIRE_THAT(nus[k], Catch::Matchers::WithinAbs(expected[k], 1e-9));
    }
  }
  SECTION("invariant under symplectic transformations") {
    std::mt19937 rng(40923);
    for (int trial = 0; trial < 30; ++trial) {
      const Eigen::MatrixXd sigma = oracle::random_covariance(3, rng);
      const Eigen::MatrixXd s = oracle::random_symplectic(3, rng);
      Eigen::MatrixXd moved = s * sigma * s.transpose();
      moved = 0.5 * (moved + moved.transpose());
      const auto before = symplectic_eigenvalues(CovarianceMatrix(sigma));
      const auto after = symplectic_eigenvalues(CovarianceMatrix(moved));
      for (std::size_t k = 0; k < before.size(); ++k)
        REQUIRE_THAT(after[k], Catch::Matchers::WithinAbs(before[k], 1e-8));
    }
  }
}

TEST_CASE("schur complement") {
  SECTION("product state returns the steered block unchanged") {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(4, 4);
    sigma(0, 0) = 2.0;
    sigma(1, 1) = 2.0;
    sigma(2, 2) = 3.0;
    sigma(3, 3) = 3.0;
    const auto schur = schur_complement(CovarianceMatrix(sigma), Bipartition({0}, {1}));
    REQUIRE_FALSE(schur.regularized);
    REQUIRE((schur.matrix - 3.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("two-mode vacuum gives the identity") {
    const auto schur = schur_complement(CovarianceMatrix::vacuum(2), Bipartition({0}, {1}));
    REQUIRE((schur.matrix - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("tripartite family state matches direct block arithmetic") {
    const CovarianceMatrix sigma = closed_form_tripartite_cov(0.5, 0.345);
    const auto schur = schur_complement(sigma, Bipartition({0}, {1}));
    const Eigen::MatrixXd expected = oracle::schur_complement(sigma.entries(), {0}, {1});
    REQUIRE((schur.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
    // Frozen values from the block formula on the closed-form state.
    REQUIRE_THAT(schur.matrix(0, 0), Catch::Matchers::WithinAbs(0.7513106349559169, 1e-12));
    REQUIRE_THAT(schur.matrix(1, 1), Catch::Matchers::WithinAbs(1.3310073802677838, 1e-12));
    REQUIRE(std::abs(schur.matrix(0, 1)) < 1e-13);
  }
  SECTION("multi-mode steering party against the oracle") {
    const CovarianceMatrix sigma = closed_form_fourmode_cov(0.3, 0.345);
    const auto schur = schur_complement(sigma, Bipartition({2, 3}, {0}));
    const Eigen::MatrixXd expected = oracle::schur_complement(sigma.entries(), {2, 3}, {0});
    REQUIRE((schur.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("ill-conditioned steering block switches to the flagged pseudo-inverse") {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(4, 4);
    sigma(0, 0) = 1e-7;
    sigma(1, 1) = 1e7;
    const auto schur = schur_complement(CovarianceMatrix(sigma), Bipartition({0}, {1}));
    REQUIRE(schur.regularized);
    REQUIRE((schur.matrix - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("out-of-range bipartition is rejected") {
    REQUIRE_THROWS_AS(schur_complement(CovarianceMatrix::vacuum(2), Bipartition({0}, {2})),
                      std::invalid_argument);
  }
}

TEST_CASE("bipartition validation") {
  REQUIRE_THROWS_AS(Bipartition({0}, {0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Bipartition({}, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(Bipartition({0, 0}, {1}), std::invalid_argument);
  REQUIRE_THROWS_AS(Bipartition({-1}, {1}), std::invalid_argument);
  const Bipartition part({2, 0}, {1});
  REQUIRE(part.all_modes() == std::vector<int>{2, 0, 1});
  REQUIRE(part.swapped().steering_modes() == std::vector<int>{1});
}

TEST_CASE("unitary to symplectic") {
  SECTION("identity maps to identity") {
    const auto s = unitary_to_symplectic(ModeUnitary(Eigen::MatrixXcd::Identity(3, 3)));
    REQUIRE((s.entries() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("a 90 degree phase becomes the quadrature rotation") {
    Eigen::MatrixXcd u(1, 1);
    u(0, 0) = std::complex<double>(0.0, 1.0);
    const auto s = unitary_to_symplectic(ModeUnitary(u));
    Eigen::MatrixXd expected(2, 2);
    expected << 0, -1, 1, 0;
    REQUIRE((s.entries() - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("network unitaries give symplectic matrices") {
    const auto s = unitary_to_symplectic(tripartite_network_unitary(0.5));
    const Eigen::MatrixXd omega = symplectic_form(3);
    REQUIRE((s.entries() * omega * s.entries().transpose() - omega).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("rejects non-unitary input") {
    REQUIRE_THROWS_AS(ModeUnitary(2.0 * Eigen::MatrixXcd::Identity(2, 2)),
                      std::invalid_argument);
  }
  SECTION("is a homomorphism") {
    std::mt19937 rng(90125);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXcd u = oracle::random_unitary(3, rng);
      const Eigen::MatrixXcd v = oracle::random_unitary(3, rng);
      const Eigen::MatrixXd product =
          unitary_to_symplectic(ModeUnitary(u * v)).entries();
      const Eigen::MatrixXd composed = unitary_to_symplectic(ModeUnitary(u)).entries() *
                                       unitary_to_symplectic(ModeUnitary(v)).entries();
      REQUIRE((product - composed).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("apply symplectic") {
  SECTION("identity leaves the state untouched") {
    const CovarianceMatrix sigma = closed_form_tripartite_cov(0.4, 0.3);
    const SymplecticMatrix identity(Eigen::MatrixXd::Identity(6, 6));
    REQUIRE((apply_symplectic(identity, sigma).entries() - sigma.entries())
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  SECTION("passive networks preserve the vacuum") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = unitary_to_symplectic(ModeUnitary(oracle::random_unitary(3, rng)));
      const auto out = apply_symplectic(s, CovarianceMatrix::vacuum(3));
      REQUIRE((out.entries() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("network propagation reproduces the closed form") {
    const StateFamily family = tripartite_family(0.3, 0.345);
    Eigen::MatrixXd sigma_in = Eigen::MatrixXd::Zero(6, 6);
    const auto inputs = family.inputs();
    for (int k = 0; k < 3; ++k) sigma_in.block<2, 2>(2 * k, 2 * k) = inputs[k].covariance();
    const auto s = unitary_to_symplectic(tripartite_network_unitary(0.3));
    const auto out = apply_symplectic(s, CovarianceMatrix(sigma_in));
    REQUIRE((out.entries() - closed_form_tripartite_cov(0.3, 0.345).entries())
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
  SECTION("rejects mismatched dimensions") {
    const SymplecticMatrix identity(Eigen::MatrixXd::Identity(4, 4));
    REQUIRE_THROWS_AS(apply_symplectic(identity, CovarianceMatrix::vacuum(3)),
                      std::invalid_argument);
  }
}

TEST_CASE("partial transpose") {
  SECTION("vacuum is unchanged") {
    const auto pt = partial_transpose(CovarianceMatrix::vacuum(2), {0, 1});
    REQUIRE((pt - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("applying twice restores the state and keeps symmetry") {
    std::mt19937 rng(5150);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd sigma = oracle::random_covariance(3, rng);
      const CovarianceMatrix cov(sigma);
      const Eigen::MatrixXd once = partial_transpose(cov, {1, 2});
      REQUIRE((once - once.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::MatrixXd twice = once;
      for (int m : {1, 2}) {
        twice.row(2 * m + 1) *= -1.0;
        twice.col(2 * m + 1) *= -1.0;
      }
      REQUIRE((twice - cov.entries()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SECTION("two-mode squeezed state exposes e^{-2r} after transposition") {
    const double r = 0.345;
    const CovarianceMatrix tmss(oracle::two_mode_squeezed(r));
    const Eigen::MatrixXd pt = partial_transpose(tmss, {1});
    const auto nus = oracle::symplectic_eigenvalues(pt);
    REQUIRE_THAT(nus.front(), Catch::Matchers::WithinAbs(std::exp(-2.0 * r), 1e-12));
  }
  SECTION("rejects out-of-range modes") {
    REQUIRE_THROWS_AS(partial_transpose(CovarianceMatrix::vacuum(2), {2}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(partial_transpose(CovarianceMatrix::vacuum(2), {}),
                      std::invalid_argument);
  }
}

TEST_CASE("reduce keeps the requested modes") {
  const CovarianceMatrix sigma = closed_form_fourmode_cov(0.4, 0.345);
  const CovarianceMatrix reduced = reduce(sigma, {1, 3});
  REQUIRE(reduced.n_modes() == 2);
  REQUIRE(reduced.entries().block<2, 2>(0, 0) == sigma.entries().block<2, 2>(2, 2));
  REQUIRE(reduced.entries().block<2, 2>(2, 2) == sigma.entries().block<2, 2>(6, 6));
  REQUIRE(reduced.entries().block<2, 2>(0, 2) == sigma.entries().block<2, 2>(2, 6));
  REQUIRE_THROWS_AS(reduce(sigma, {0, 4}), std::invalid_argument);
}

TEST_CASE("schur complement restriction commutes with tracing") {
  // Tracing out the bystander first, or restricting the full Schur complement
  // afterwards, must produce the same steered block.
  const CovarianceMatrix sigma = closed_form_tripartite_cov(0.35, 0.345);
  const auto direct = schur_complement(sigma, Bipartition({0}, {1}));
  const auto full = schur_complement(sigma, Bipartition({0}, {1, 2}));
  REQUIRE((direct.matrix - full.matrix.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}
