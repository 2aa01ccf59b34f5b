#ifndef QLIM_DENSE_MATRIX_HPP
#define QLIM_DENSE_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlim {

using Complex = std::complex<double>;

inline constexpr std::size_t default_max_dense_dim = 4096;

/// Cap on dense matrix order; QLIM_MAX_DIM overrides the default of 4096.
inline std::size_t max_dense_dim()
{
    if (const char* env = std::getenv("QLIM_MAX_DIM")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return default_max_dense_dim;
}

/// Square complex matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

    static DenseMatrix identity(std::size_t dim)
    {
        DenseMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static DenseMatrix diagonal(const std::vector<double>& diag)
    {
        DenseMatrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) {
            m(i, i) = diag[i];
        }
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    const std::vector<Complex>& entries() const noexcept { return entries_; }

    DenseMatrix adjoint() const
    {
        DenseMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                out(j, i) = std::conj((*this)(i, j));
            }
        }
        return out;
    }

    DenseMatrix& operator+=(const DenseMatrix& rhs)
    {
        check_same(rhs);
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            entries_[k] += rhs.entries_[k];
        }
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b)
    {
        a.check_same(b);
        const std::size_t n = a.dim_;
        DenseMatrix out(n);
        // i-k-j order keeps the inner loop on contiguous rows.
        for (std::size_t i = 0; i < n; ++i) {
            Complex* row = &out.entries_[i * n];
            for (std::size_t k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) {
                    continue;
                }
                const Complex* brow = &b.entries_[k * n];
                for (std::size_t j = 0; j < n; ++j) {
                    row[j] += aik * brow[j];
                }
            }
        }
        return out;
    }

    double frobenius_norm() const
    {
        double s = 0.0;
        for (const Complex& z : entries_) {
            s += std::norm(z);
        }
        return std::sqrt(s);
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const Complex& z : entries_) {
            m = std::max(m, std::abs(z));
        }
        return m;
    }

    Complex trace() const
    {
        Complex t{};
        for (std::size_t i = 0; i < dim_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    bool is_finite() const
    {
        return std::all_of(entries_.begin(), entries_.end(),
                           [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    /// Largest |a_ij - conj(a_ji)|.
    double hermitian_defect() const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = i; j < dim_; ++j) {
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return worst;
    }

    bool is_hermitian(double tol) const { return hermitian_defect() <= tol; }

    /// Rows in reverse order (a permutation, so singular values are unchanged).
    DenseMatrix rows_reversed() const
    {
        DenseMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            std::copy_n(&entries_[(dim_ - 1 - i) * dim_], dim_, &out.entries_[i * dim_]);
        }
        return out;
    }

private:
    void check_same(const DenseMatrix& rhs) const
    {
        if (rhs.dim_ != dim_) {
            throw std::invalid_argument("matrix dimensions differ");
        }
    }

    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

} // namespace qlim

#endif // QLIM_DENSE_MATRIX_HPP
