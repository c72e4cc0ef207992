#include "toadwave/analysis.hpp"
#include "toadwave/slab.hpp"
#include "toadwave/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

using namespace toadwave;

namespace {

const SpectralParams kSpectral{1.0, 1.0};

SlabParams slab_params(double tau, const TraitGrid& tr) {
    const auto ms = minimize_speed(tau, kSpectral, tr, {0.05, 20.0, 1e-8});
    return SlabParams{1.0, 1.0, ms.c_star, ms.lambda_star, 1e-3};
}

TrigPolynomial single_mode(int k, double period) {
    std::vector<std::complex<double>> c(2 * static_cast<std::size_t>(k) + 1);
    c[static_cast<std::size_t>(2 * k)] = 0.5;   // cos(k t)
    return TrigPolynomial(std::move(c), period);
}

} // namespace

TEST_CASE("harnack ratios: scaling, floors, skipped columns") {
    Array2D mu(5, 4, 0.0);
    DeterministicRng rng(3);
    for (auto& v : mu.flat()) v = 1.0 + rng.uniform();
    for (std::size_t j = 0; j < 4; ++j) mu(4, j) = 0.0;   // a Dirichlet column

    const HarnackReport rep = harnack_ratios(mu);
    CHECK(rep.skipped_columns == 1);
    CHECK(std::isnan(rep.per_xi_ratio[4]));
    CHECK(rep.global_ratio >= 1.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(rep.per_xi_ratio[i] >= 1.0);

    Array2D scaled = mu;
    for (auto& v : scaled.flat()) v *= 123.456;
    CHECK(harnack_ratios(scaled).global_ratio ==
          doctest::Approx(rep.global_ratio).epsilon(1e-13));
}

TEST_CASE("harnack ratio is trivial for trait-flat slab solutions") {
    TraitGrid tr = make_trait_grid(1.0, 2.0, 15);
    SlabGrid g(10.0, 81, tr);
    const SlabSolution sol = solve_slab(0.0, 0.01, g, slab_params(0.0, tr));
    const HarnackReport rep = harnack_ratios(sol.mu);
    CHECK(rep.skipped_columns >= 1);     // the right Dirichlet column
    CHECK(std::abs(rep.global_ratio - 1.0) <= 1e-8);
}

TEST_CASE("harnack ratio is stable under refinement at tau = 1") {
    auto global = [](std::size_t per_unit, std::size_t n_theta) {
        TraitGrid tr = make_trait_grid(1.0, 2.0, n_theta);
        SlabGrid g(15.0, static_cast<std::size_t>(30 * per_unit) + 1, tr);
        const SlabSolution sol = solve_slab(1.0, 0.01, g, slab_params(1.0, tr));
        return harnack_ratios(sol.mu).global_ratio;
    };
    const double coarse = global(4, 21);
    const double fine = global(8, 41);
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(fine - coarse) / coarse < 0.10);
}

TEST_CASE("sobolev norms of a single cosine mode") {
    const int k = 7;
    const TrigPolynomial g = single_mode(k, 1.0);
    const SobolevNorms n = sobolev_norms(g);
    CHECK(n.h32 == doctest::Approx(std::sqrt(std::pow(7.0, 3) / 2.0)).epsilon(1e-12));
    CHECK(n.linf == doctest::Approx(1.0).epsilon(1e-6));
    // int |cos| over one period, scaled to the trait measure
    CHECK(n.l1 == doctest::Approx(2.0 / M_PI).epsilon(1e-4));
}

TEST_CASE("sobolev norms: constants and homogeneity") {
    std::vector<std::complex<double>> cc(3);
    cc[1] = 4.2;
    const TrigPolynomial constant(cc, 1.0);
    const SobolevNorms n = sobolev_norms(constant);
    CHECK(n.h32 == 0.0);                       // the k = 0 mode is excluded
    CHECK(n.linf == doctest::Approx(4.2));
    CHECK(n.l1 == doctest::Approx(4.2).epsilon(1e-12));

    const TrigPolynomial g = TrigPolynomial::random(99, 16, 1.0);
    std::vector<std::complex<double>> doubled;
    for (int k = -16; k <= 16; ++k) doubled.push_back(2.0 * g.coefficient(k));
    const SobolevNorms a = sobolev_norms(g);
    const SobolevNorms b = sobolev_norms(TrigPolynomial(doubled, 1.0));
    CHECK(b.l1 == doctest::Approx(2.0 * a.l1).epsilon(1e-12));
    CHECK(b.linf == doctest::Approx(2.0 * a.linf).epsilon(1e-12));
    CHECK(b.h32 == doctest::Approx(2.0 * a.h32).epsilon(1e-12));
}

TEST_CASE("triangle inequality for the coefficient norm") {
    DeterministicRng rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto f = TrigPolynomial::random(rng.next_u64(), 24, 1.0);
        const auto g = TrigPolynomial::random(rng.next_u64(), 24, 1.0);
        std::vector<std::complex<double>> sum;
        for (int k = -24; k <= 24; ++k)
            sum.push_back(f.coefficient(k) + g.coefficient(k));
        CHECK(sobolev_norms(TrigPolynomial(sum, 1.0)).h32 <=
              sobolev_norms(f).h32 + sobolev_norms(g).h32 + 1e-10);
    }
}

TEST_CASE("constant signals land in the plain-L1 branch") {
    std::vector<std::complex<double>> cc(3);
    cc[1] = 3.0;
    const TrigPolynomial constant(cc, 1.0);
    const InterpolationCheck chk = interpolation_check(constant, 1.0);   // C = 1/|Theta|
    CHECK(chk.branch == 2);
    CHECK(chk.pass);
    CHECK(chk.slack == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(interpolation_check(constant, 0.9).pass);
}

TEST_CASE("interpolation slack is scale invariant in both branches") {
    const double C = default_interpolation_constant();
    const TrigPolynomial rough = TrigPolynomial::random(5, 64, 1.0);
    std::vector<std::complex<double>> cc(3);
    cc[1] = 2.0;
    cc[2] = {1e-5, 2e-5};
    const TrigPolynomial gentle(cc, 1.0);
    for (const TrigPolynomial* g : {&rough, &gentle}) {
        const InterpolationCheck base = interpolation_check(*g, C);
        std::vector<std::complex<double>> scaled;
        for (int k = -g->k_max(); k <= g->k_max(); ++k)
            scaled.push_back(0.37 * g->coefficient(k));
        const InterpolationCheck other =
            interpolation_check(TrigPolynomial(scaled, 1.0), C);
        CHECK(other.branch == base.branch);
        CHECK(other.slack == doctest::Approx(base.slack).epsilon(1e-9));
    }
}

TEST_CASE("seeded random family passes at the frozen constant") {
    const double C = default_interpolation_constant();
    DeterministicRng master(default_analysis_seed());
    double min_slack = 1e300;
    for (int i = 0; i < 1000; ++i) {
        const auto g = TrigPolynomial::random(master.next_u64(), 64, 1.0);
        const InterpolationCheck chk = interpolation_check(g, C);
        CHECK(chk.pass);
        min_slack = std::min(min_slack, chk.slack);
    }
    // frozen margin: the sweep constant times 1.1 leaves exactly 10% slack
    CHECK(min_slack == doctest::Approx(1.1).epsilon(1e-6));

    const double c_min = interpolation_constant_sweep(default_analysis_seed(), 1000, 64, 1.0);
    CHECK(C == doctest::Approx(1.1 * c_min).epsilon(1e-9));
}

TEST_CASE("log-Holder display holds on the sampled pairs") {
    DeterministicRng master(default_analysis_seed());
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto g = TrigPolynomial::random(master.next_u64(), 64, 1.0);
        const HolderCheck chk = log_holder_check(g, 7777, 200);
        CHECK(chk.pass);
        worst = std::max(worst, chk.worst_ratio);
    }
    CHECK(worst <= 1.0);
    CHECK(worst > 0.0);
}

TEST_CASE("trig polynomial construction enforces symmetry and rejects garbage") {
    std::vector<std::complex<double>> cc(5);
    cc[0] = {1.0, 2.0};
    cc[1] = {0.5, -0.25};
    cc[2] = {3.0, 4.0};   // imaginary part of k = 0 must be dropped
    cc[3] = {7.0, 7.0};
    cc[4] = {9.0, 9.0};
    const TrigPolynomial g(cc, 1.0);
    CHECK(g.coefficient(0).imag() == 0.0);
    CHECK(g.coefficient(-1) == std::conj(g.coefficient(1)));
    CHECK(g.coefficient(-2) == std::conj(g.coefficient(2)));
    const double v = g.value_at_angle(0.37);
    CHECK(std::abs(std::imag(std::complex<double>(v))) == 0.0);

    std::vector<std::complex<double>> even(4);
    CHECK_THROWS_AS(TrigPolynomial(even, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TrigPolynomial(cc, 0.0), std::invalid_argument);
}

TEST_CASE("wave limit checks across increasing slabs") {
    TraitGrid tr = make_trait_grid(1.0, 2.0, 21);
    const auto ms = minimize_speed(1.0, kSpectral, tr, {0.05, 20.0, 1e-8});
    SlabParams p{1.0, 1.0, ms.c_star, ms.lambda_star, 1e-3};

    std::vector<SlabSolution> seq;
    for (double a : {10.0, 20.0, 30.0}) {
        SlabGrid g(a, static_cast<std::size_t>(8 * a) + 1, tr);
        seq.push_back(solve_slab(1.0, 0.01, g, p));
    }
    const WaveLimitReport rep = wave_limit_checks(seq, ms);
    CHECK(rep.gap_decreasing);
    CHECK(rep.m_lower > 0.0);
    CHECK(rep.nu_far < 0.001);
    CHECK(std::abs(rep.decay_rel_err) < 0.15);
    CHECK(rep.extrapolated_c > seq.back().c);
    CHECK(rep.extrapolated_c < ms.c_star + 0.01);

    // m is a true minimum: exhaustive rescan in the opposite loop order
    double m2 = 1e300;
    const SlabSolution& big = seq.back();
    for (std::size_t j = 0; j < tr.size(); ++j)
        for (std::size_t i = 0; i <= big.grid.center_index(); ++i)
            m2 = std::min(m2, big.mu(i, j) / ms.Q_star[j]);
    CHECK(rep.m_lower == m2);

    std::vector<SlabSolution> bad;
    bad.push_back(seq[1]);
    bad.push_back(seq[0]);   // widths out of order
    CHECK_THROWS_AS(wave_limit_checks(bad, ms), std::invalid_argument);
}
