#ifndef QLIM_CHECK_ORACLES_HPP
#define QLIM_CHECK_ORACLES_HPP

// Reference computations that share no code path with the library routines
// they are compared against.

#include <qlim/dense_matrix.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qlim::oracle {

/// counts[j] = #{w in {-1,1}^n : #{k : w_1+...+w_k > 0} = j}, by enumeration.
inline std::vector<std::uint64_t> walk_counts_brute_force(unsigned n)
{
    if (n < 1 || n > 24) {
        throw std::invalid_argument("brute force limited to 1 <= n <= 24");
    }
    std::vector<std::uint64_t> counts(n + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        int sum = 0;
        unsigned positive = 0;
        for (unsigned k = 0; k < n; ++k) {
            sum += (mask >> k) & 1U ? 1 : -1;
            if (sum > 0) {
                ++positive;
            }
        }
        ++counts[positive];
    }
    return counts;
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending.
inline std::array<double, 2> hermitian_2x2_roots(const DenseMatrix& a)
{
    const double p = a(0, 0).real();
    const double q = a(1, 1).real();
    const double mid = 0.5 * (p + q);
    const double rad = std::hypot(0.5 * (p - q), std::abs(a(0, 1)));
    return {mid - rad, mid + rad};
}

/// Eigenvalues of a 3x3 Hermitian matrix, ascending: trigonometric solution of
/// the characteristic cubic, polished by Newton steps on the same cubic.
inline std::array<double, 3> hermitian_3x3_roots(const DenseMatrix& a)
{
    const double a00 = a(0, 0).real();
    const double a11 = a(1, 1).real();
    const double a22 = a(2, 2).real();
    const std::complex<double> a01 = a(0, 1);
    const std::complex<double> a02 = a(0, 2);
    const std::complex<double> a12 = a(1, 2);

    // lambda^3 - c2 lambda^2 + c1 lambda - c0
    const double c2 = a00 + a11 + a22;
    const double c1 = a00 * a11 + a00 * a22 + a11 * a22 - std::norm(a01) - std::norm(a02) - std::norm(a12);
    const double c0 = a00 * a11 * a22 + 2.0 * (a01 * a12 * std::conj(a02)).real() - a00 * std::norm(a12)
        - a11 * std::norm(a02) - a22 * std::norm(a01);

    const double shift = c2 / 3.0;
    const double off = std::norm(a01) + std::norm(a02) + std::norm(a12);
    const double spread = (a00 - shift) * (a00 - shift) + (a11 - shift) * (a11 - shift)
        + (a22 - shift) * (a22 - shift) + 2.0 * off;
    std::array<double, 3> roots{shift, shift, shift};
    if (spread > 0.0) {
        const double p = std::sqrt(spread / 6.0);
        // det((A - shift I)/p) / 2 from the shifted cubic.
        const double s = shift;
        const double det_shifted = c0 - c1 * s + c2 * s * s - s * s * s;
        const double r = std::clamp(det_shifted / (2.0 * p * p * p), -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        roots[2] = shift + 2.0 * p * std::cos(phi);
        roots[0] = shift + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        roots[1] = 3.0 * shift - roots[0] - roots[2];
    }
    for (double& x : roots) {
        for (int it = 0; it < 3; ++it) {
            const double f = ((x - c2) * x + c1) * x - c0;
            const double df = (3.0 * x - 2.0 * c2) * x + c1;
            if (df == 0.0) {
                break;
            }
            const double step = f / df;
            if (!std::isfinite(step) || std::abs(step) > 1e-6 * (1.0 + std::abs(x))) {
                break;
            }
            x -= step;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace qlim::oracle

#endif // QLIM_CHECK_ORACLES_HPP
