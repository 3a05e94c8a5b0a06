#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace racetrack {

/// Dense row-major square matrix. Small R only; no BLAS.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, double fill = 0.0)
        : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

    int size() const noexcept { return n_; }

    double& operator()(int row, int col) noexcept {
        assert(row >= 0 && row < n_ && col >= 0 && col < n_);
        return data_[index(row, col)];
    }
    double operator()(int row, int col) const noexcept {
        assert(row >= 0 && row < n_ && col >= 0 && col < n_);
        return data_[index(row, col)];
    }

    std::span<const double> row(int r) const noexcept {
        return {data_.data() + index(r, 0), static_cast<std::size_t>(n_)};
    }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t index(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
    }

    int n_ = 0;
    std::vector<double> data_;
};

/// p(x, y): price in destination y of a variety produced in origin x.
class PriceMatrix : public SquareMatrix {
public:
    using SquareMatrix::SquareMatrix;
};

/// q(x, y): per-consumer demand in destination y for a variety from origin x.
class DemandMatrix : public SquareMatrix {
public:
    using SquareMatrix::SquareMatrix;
};

struct WageVector {
    std::vector<double> values;
};

struct RealWageVector {
    std::vector<double> values;
};

}  // namespace racetrack
