#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace toadwave {

/// Tridiagonal system solved by the Thomas algorithm. The factorization is
/// kept so the same matrix can be applied to many right-hand sides (one
/// factorization per time step / per shift, thousands of solves).
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;

    // lower[i] multiplies x[i-1] in row i (lower[0] unused), upper[i]
    // multiplies x[i+1] (upper[n-1] unused).
    TridiagonalFactor(std::span<const double> lower,
                      std::span<const double> diag,
                      std::span<const double> upper) {
        factor(lower, diag, upper);
    }

    void factor(std::span<const double> lower,
                std::span<const double> diag,
                std::span<const double> upper) {
        const std::size_t n = diag.size();
        if (n == 0 || lower.size() != n || upper.size() != n)
            throw std::invalid_argument("tridiagonal factor: band size mismatch");
        lower_.assign(lower.begin(), lower.end());
        upper_.assign(upper.begin(), upper.end());
        inv_piv_.resize(n);
        double piv = diag[0];
        if (piv == 0.0) throw std::runtime_error("tridiagonal factor: zero pivot");
        inv_piv_[0] = 1.0 / piv;
        for (std::size_t i = 1; i < n; ++i) {
            const double m = lower_[i] * inv_piv_[i - 1];
            lower_[i] = m;                       // store the elimination multiplier
            piv = diag[i] - m * upper_[i - 1];
            if (piv == 0.0) throw std::runtime_error("tridiagonal factor: zero pivot");
            inv_piv_[i] = 1.0 / piv;
        }
    }

    std::size_t size() const { return inv_piv_.size(); }

    // Solve in place. No pivoting: callers assemble diagonally dominant
    // (M-matrix) systems for which Thomas is stable.
    void solve(std::span<double> x) const {
        const std::size_t n = inv_piv_.size();
        for (std::size_t i = 1; i < n; ++i) x[i] -= lower_[i] * x[i - 1];
        x[n - 1] *= inv_piv_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            x[i] = (x[i] - upper_[i] * x[i + 1]) * inv_piv_[i];
    }

private:
    std::vector<double> lower_;    // multipliers after factor()
    std::vector<double> upper_;
    std::vector<double> inv_piv_;
};

// One-shot convenience for small systems.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::vector<double> rhs) {
    TridiagonalFactor f(lower, diag, upper);
    f.solve(rhs);
    return rhs;
}

} // namespace toadwave
