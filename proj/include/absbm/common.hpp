#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace absbm {

// Thrown when input data violates a documented precondition.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the file parsers; carries a human-readable position.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense L x L matrix of doubles, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix constant(std::size_t n, double v) { return Matrix(n, n, v); }
    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool is_symmetric(double tol) const {
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = r + 1; c < cols_; ++c)
                if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// splitmix64 mixing step, used to derive independent trial seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ mix64(v));
}

// Normalizes a log-domain vector in place into a probability vector.
// Max-subtraction keeps the exponentials representable.
inline void log_normalize(std::vector<double>& logv) {
    double mx = logv[0];
    for (double v : logv) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logv) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logv) v /= sum;
}

inline void normalize(std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
}

}  // namespace absbm
