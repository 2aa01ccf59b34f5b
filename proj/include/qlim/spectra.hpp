#ifndef QLIM_SPECTRA_HPP
#define QLIM_SPECTRA_HPP

#include <qlim/dense_matrix.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qlim {

/// Raised when the Jacobi iteration exhausts its sweep budget.
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SpectrumKind { eigenvalues, singular_values };

/// Ascending eigenvalues or singular values, with multiplicity.
struct Spectrum {
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::eigenvalues;
    double residual = 0.0;  // off-diagonal Frobenius mass at termination
    int sweeps = 0;
};

inline constexpr double jacobi_relative_tolerance = 1e-12;
inline constexpr int jacobi_max_sweeps = 64;
inline constexpr double hermitian_tolerance = 1e-12;

namespace detail {

inline double off_diagonal_norm(const DenseMatrix& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

// Annihilates a(p,q) with J = diag-phase * real rotation, a <- J^H a J.
inline void jacobi_rotate(DenseMatrix& a, std::size_t p, std::size_t q)
{
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) {
        return;
    }
    const Complex phase = apq / r;  // e^{i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * r);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // J restricted to (p,q): [[c, s], [-s conj(phase), c conj(phase)]].
    const Complex jpp = c;
    const Complex jpq = s;
    const Complex jqp = -s * std::conj(phase);
    const Complex jqq = c * std::conj(phase);

    const std::size_t n = a.dim();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * jpp + akq * jqp;
        a(k, q) = akp * jpq + akq * jqq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
        a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = app - t * r;
    a(q, q) = aqq + t * r;
}

// Cyclic Jacobi on a Hermitian workspace; returns unsorted diagonal.
inline Spectrum jacobi_eigenvalues(DenseMatrix work)
{
    const std::size_t n = work.dim();
    const double threshold = jacobi_relative_tolerance * work.frobenius_norm();
    Spectrum out;
    double off = off_diagonal_norm(work);
    while (off > threshold) {
        if (out.sweeps == jacobi_max_sweeps) {
            throw NoConvergence("no convergence");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                jacobi_rotate(work, p, q);
            }
        }
        ++out.sweeps;
        off = off_diagonal_norm(work);
    }
    out.residual = off;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = work(i, i).real();
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

} // namespace detail

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized as (A + A^H)/2 before the solve; matrices further
/// than 1e-12 * max(1, max|a_ij|) from Hermitian are rejected.
inline Spectrum hermitian_eigenvalues(const DenseMatrix& a)
{
    if (!a.is_finite()) {
        throw std::invalid_argument("non-finite matrix entry");
    }
    if (a.hermitian_defect() > hermitian_tolerance * std::max(1.0, a.max_abs())) {
        throw std::invalid_argument("matrix not Hermitian");
    }
    DenseMatrix sym(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        sym(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < a.dim(); ++j) {
            const Complex v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            sym(i, j) = v;
            sym(j, i) = std::conj(v);
        }
    }
    Spectrum out = detail::jacobi_eigenvalues(std::move(sym));
    out.kind = SpectrumKind::eigenvalues;
    return out;
}

/// Singular values, ascending, as square roots of the eigenvalues of A^H A.
/// Negative eigenvalues from roundoff are clamped to zero; the largest
/// clamped magnitude is folded into the residual.
inline Spectrum singular_values(const DenseMatrix& a)
{
    if (!a.is_finite()) {
        throw std::invalid_argument("non-finite matrix entry");
    }
    const std::size_t n = a.dim();
    DenseMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Complex s{};
            for (std::size_t k = 0; k < n; ++k) {
                s += std::conj(a(k, i)) * a(k, j);
            }
            gram(i, j) = s;
            gram(j, i) = std::conj(s);
        }
        gram(i, i) = gram(i, i).real();
    }
    Spectrum out = detail::jacobi_eigenvalues(std::move(gram));
    out.kind = SpectrumKind::singular_values;
    double clamped = 0.0;
    for (double& v : out.values) {
        if (v < 0.0) {
            clamped = std::max(clamped, -v);
            v = 0.0;
        }
        v = std::sqrt(v);
    }
    out.residual = std::max(out.residual, clamped);
    return out;
}

} // namespace qlim

#endif // QLIM_SPECTRA_HPP
