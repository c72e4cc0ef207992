#include "toadwave/analysis.hpp"

#include "toadwave/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toadwave {

std::uint64_t DeterministicRng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double DeterministicRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DeterministicRng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double DeterministicRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    cached_ = rad * std::sin(ang);
    has_cached_ = true;
    return rad * std::cos(ang);
}

HarnackReport harnack_ratios(const Array2D& mu, double floor) {
    if (!mu.all_finite())
        throw std::invalid_argument("harnack_ratios: field must be finite");
    HarnackReport rep;
    rep.floor = floor;
    rep.per_xi_ratio.assign(mu.rows(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < mu.rows(); ++i) {
        const auto row = mu.row(i);
        const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
        if (*mn > floor) {
            rep.per_xi_ratio[i] = *mx / *mn;
            rep.global_ratio = std::max(rep.global_ratio, rep.per_xi_ratio[i]);
        } else {
            ++rep.skipped_columns;
        }
    }
    return rep;
}

TrigPolynomial::TrigPolynomial(std::vector<std::complex<double>> coeffs, double period)
    : coeffs_(std::move(coeffs)), period_(period) {
    if (coeffs_.empty() || coeffs_.size() % 2 == 0)
        throw std::invalid_argument("trig polynomial: need 2 k_max + 1 coefficients");
    if (!(period > 0.0))
        throw std::invalid_argument("trig polynomial: period must be positive");
    k_max_ = static_cast<int>(coeffs_.size() / 2);
    // enforce Hermitian symmetry so samples are real
    coeffs_[static_cast<std::size_t>(k_max_)] =
        std::complex<double>(coeffs_[static_cast<std::size_t>(k_max_)].real(), 0.0);
    for (int k = 1; k <= k_max_; ++k)
        coeffs_[static_cast<std::size_t>(k_max_ - k)] =
            std::conj(coeffs_[static_cast<std::size_t>(k_max_ + k)]);
}

TrigPolynomial TrigPolynomial::random(std::uint64_t seed, int k_max, double period) {
    DeterministicRng rng(seed);
    std::vector<std::complex<double>> coeffs(2 * static_cast<std::size_t>(k_max) + 1);
    coeffs[static_cast<std::size_t>(k_max)] = rng.normal();
    for (int k = 1; k <= k_max; ++k) {
        const double re = rng.normal();
        const double im = rng.normal();
        coeffs[static_cast<std::size_t>(k_max + k)] = {re, im};
    }
    return TrigPolynomial(std::move(coeffs), period);
}

double TrigPolynomial::value_at_angle(double t) const {
    double v = coeffs_[static_cast<std::size_t>(k_max_)].real();
    for (int k = 1; k <= k_max_; ++k) {
        const auto& c = coeffs_[static_cast<std::size_t>(k_max_ + k)];
        v += 2.0 * (c.real() * std::cos(k * t) - c.imag() * std::sin(k * t));
    }
    return v;
}

SobolevNorms sobolev_norms(const TrigPolynomial& g, std::size_t n_samples) {
    SobolevNorms out;
    for (int k = -g.k_max(); k <= g.k_max(); ++k) {
        if (k == 0) continue;
        const double ak = std::abs(g.coefficient(k));
        out.h32 += std::pow(std::abs(static_cast<double>(k)), 3.0) * ak * ak;
    }
    out.h32 = std::sqrt(out.h32);

    const double dt_angle = 2.0 * M_PI / static_cast<double>(n_samples);
    const double dtheta = g.period() / static_cast<double>(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double v = std::abs(g.value_at_angle(dt_angle * static_cast<double>(i)));
        out.l1 += v * dtheta;
        out.linf = std::max(out.linf, v);
    }
    return out;
}

InterpolationCheck interpolation_check(const TrigPolynomial& g, double constant_C) {
    if (!(constant_C > 0.0))
        throw std::invalid_argument("interpolation_check: constant must be positive");
    const SobolevNorms n = sobolev_norms(g);
    InterpolationCheck chk;
    const bool first_branch = n.h32 > 0.0 && n.l1 / n.h32 <= 1.0 / constant_C;
    if (first_branch) {
        chk.branch = 1;
        chk.lhs = n.linf * n.linf * n.linf;
        chk.rhs = constant_C * n.l1 * n.h32 * n.h32;
    } else {
        chk.branch = 2;
        chk.lhs = n.linf;
        chk.rhs = constant_C * n.l1;
    }
    chk.pass = chk.lhs <= chk.rhs;
    chk.slack = chk.lhs > 0.0 ? chk.rhs / chk.lhs
                              : std::numeric_limits<double>::infinity();
    return chk;
}

HolderCheck log_holder_check(const TrigPolynomial& g, std::uint64_t seed,
                             std::size_t n_pairs) {
    const SobolevNorms n = sobolev_norms(g);
    DeterministicRng rng(seed);
    HolderCheck chk;
    chk.pairs = n_pairs;
    const double log_dmin = std::log(1e-6);
    const double log_dmax = -4.0;    // the display is asserted for d <= e^-4
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const double d = std::exp(log_dmin + (log_dmax - log_dmin) * rng.uniform());
        const double t = rng.uniform() * 2.0 * M_PI;
        const double diff = std::abs(g.value_at_angle(t) - g.value_at_angle(t + d));
        const double bound = 0.5 * n.h32 * d * std::log(1.0 / d);
        if (bound > 0.0)
            chk.worst_ratio = std::max(chk.worst_ratio, diff / bound);
        else if (diff > 1e-14 * std::max(1.0, n.linf))
            chk.worst_ratio = std::numeric_limits<double>::infinity();
    }
    chk.pass = chk.worst_ratio <= 1.0;
    return chk;
}

double interpolation_constant_sweep(std::uint64_t seed, int n_polys, int k_max,
                                    double period) {
    DeterministicRng master(seed);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_polys));
    for (auto& s : seeds) s = master.next_u64();

    std::vector<SobolevNorms> norms(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        norms[i] = sobolev_norms(TrigPolynomial::random(seeds[i], k_max, period));
    });

    auto feasible = [&](double C) {
        for (const auto& n : norms) {
            const bool first = n.h32 > 0.0 && n.l1 / n.h32 <= 1.0 / C;
            if (first) {
                if (n.linf * n.linf * n.linf > C * n.l1 * n.h32 * n.h32) return false;
            } else {
                if (n.linf > C * n.l1) return false;
            }
        }
        return true;
    };

    double lo = 1e-9, hi = 1e9;
    if (!feasible(hi))
        throw std::runtime_error("interpolation sweep: no feasible constant below 1e9");
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-12; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::uint64_t default_analysis_seed() { return 20240817ull; }

double default_interpolation_constant() {
    // interpolation_constant_sweep(default_analysis_seed(), 1000, 64, 1.0) * 1.1
    return 2.445404072161e-3;
}

WaveLimitReport wave_limit_checks(std::span<const SlabSolution> slabs,
                                  const MinSpeedResult& min_speed) {
    if (slabs.empty())
        throw std::invalid_argument("wave_limit_checks: need at least one slab");
    for (std::size_t k = 0; k + 1 < slabs.size(); ++k) {
        if (!(slabs[k].grid.half_width() < slabs[k + 1].grid.half_width()))
            throw std::invalid_argument("wave_limit_checks: half-widths must increase");
        if (slabs[k].tau != slabs[k + 1].tau || slabs[k].epsilon != slabs[k + 1].epsilon)
            throw std::invalid_argument("wave_limit_checks: mixed tau or epsilon");
    }
    const SlabSolution& big = slabs.back();
    const SlabGrid& big_grid = big.grid;
    if (min_speed.Q_star.size() != big_grid.trait().size())
        throw std::invalid_argument(
            "wave_limit_checks: min_speed was not computed on the slab trait grid");

    WaveLimitReport rep;
    rep.c_star = min_speed.c_star;
    for (const SlabSolution& s : slabs) {
        rep.a_values.push_back(s.grid.half_width());
        rep.c_values.push_back(s.c);
    }
    rep.gap_decreasing = true;
    for (std::size_t k = 0; k + 1 < rep.c_values.size(); ++k)
        if (!(std::abs(rep.c_values[k + 1] - rep.c_star) <
              std::abs(rep.c_values[k] - rep.c_star)))
            rep.gap_decreasing = false;
    if (rep.c_values.size() >= 3) {
        const double c0 = rep.c_values[rep.c_values.size() - 3];
        const double c1 = rep.c_values[rep.c_values.size() - 2];
        const double c2 = rep.c_values[rep.c_values.size() - 1];
        const double den = c0 - 2.0 * c1 + c2;
        rep.extrapolated_c = den != 0.0 ? (c0 * c2 - c1 * c1) / den : c2;
    } else {
        rep.extrapolated_c = rep.c_values.back();
    }

    // lower envelope behind the front: exhaustive scan over xi <= 0
    rep.m_lower = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= big_grid.center_index(); ++i)
        for (std::size_t j = 0; j < big_grid.trait().size(); ++j)
            rep.m_lower = std::min(rep.m_lower, big.mu(i, j) / min_speed.Q_star[j]);

    const double a = big_grid.half_width();
    std::size_t far_idx = big_grid.center_index();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < big_grid.n_xi(); ++i) {
        const double d = std::abs(big_grid.xi(i) - 0.8 * a);
        if (d < best) {
            best = d;
            far_idx = i;
        }
    }
    rep.nu_far = big.nu[far_idx];
    rep.far_bound = big.epsilon / 10.0;

    // decay slope of log nu over xi in [0.1 a, 0.5 a]
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < big_grid.n_xi(); ++i) {
        const double xi = big_grid.xi(i);
        if (xi > 0.1 * a && xi < 0.5 * a && big.nu[i] > 1e-250) {
            const double y = std::log(big.nu[i]);
            st += xi;
            sy += y;
            stt += xi * xi;
            sty += xi * y;
            ++cnt;
        }
    }
    if (cnt < 5)
        throw std::invalid_argument("wave_limit_checks: decay window too short");
    const double slope = (static_cast<double>(cnt) * sty - st * sy) /
                         (static_cast<double>(cnt) * stt - st * st);
    rep.decay_rate = -slope;
    rep.decay_rel_err = rep.decay_rate / min_speed.lambda_star - 1.0;
    return rep;
}

} // namespace toadwave
