#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qkgeo/quat.hpp"

namespace qkgeo {

// SplitMix64: x_{k+1} = x_k + 0x9E3779B97F4A7C15, output mixed by two
// xor-shift-multiply rounds (Steele, Lea, Flood 2014). Chosen because the
// whole sequence is pinned down by these few lines, so reports are
// reproducible across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // standard normal via Box-Muller
    double gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // uniform in the closed ball of the given radius (gaussian direction,
    // radius by the u^{1/d} volume rule)
    std::vector<double> ball_point(int dim, double radius) {
        std::vector<double> x(dim);
        double norm2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            x[i] = gaussian();
            norm2 += x[i] * x[i];
        }
        const double norm = std::sqrt(norm2);
        const double r = radius * std::pow(next_double(), 1.0 / dim);
        const double scale = norm > 0 ? r / norm : 0.0;
        for (double& c : x) c *= scale;
        return x;
    }

private:
    std::uint64_t state_;
};

inline SqMat<double> random_matrix(Rng& rng, int dim, double scale = 1.0) {
    SqMat<double> m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

inline BilinearForm random_bilinear(Rng& rng, int dim) { return BilinearForm(random_matrix(rng, dim)); }

inline BilinearForm random_symmetric(Rng& rng, int dim) {
    SqMat<double> m = random_matrix(rng, dim);
    return BilinearForm(0.5 * (m + transpose(m)));
}

inline BilinearForm random_skew(Rng& rng, int dim) {
    SqMat<double> m = random_matrix(rng, dim);
    return BilinearForm(0.5 * (m - transpose(m)));
}

// random element of S^2 E: skew and H-Hermitian
inline BilinearForm random_s2e(Rng& rng, int dim) {
    return project_hhermitian(random_skew(rng, dim));
}

}  // namespace qkgeo
