#pragma once

// Shared helpers for the test suites.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace acdl::test {

template <class T>
Tensor<T> random_tensor(Shape shape, RandomSource& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<T> v(static_cast<size_t>(numel(shape)));
    for (T& x : v) x = static_cast<T>(rng.uniform(lo, hi));
    return Tensor<T>::from_data(std::move(shape), std::move(v));
}

// Random tensor whose values are all distinct and bounded away from zero
// (safe for finite differences through relu/maxpool kinks).
template <class T>
Tensor<T> random_distinct_tensor(Shape shape, RandomSource& rng) {
    const int64_t n = numel(shape);
    std::vector<T> v(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        const double mag = static_cast<double>(i + 1) * 0.05 + rng.uniform(0.0, 0.02);
        v[static_cast<size_t>(i)] = static_cast<T>(rng.bernoulli(0.5) ? mag : -mag);
    }
    // Deterministic Fisher-Yates so placement is shuffled but values stay apart.
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(i)));
        std::swap(v[i - 1], v[j]);
    }
    return Tensor<T>::from_data(std::move(shape), std::move(v));
}

// Copy of a tensor's values; safe to call on temporaries.
template <class T>
std::vector<T> vals(const Tensor<T>& t) {
    return std::vector<T>(t.values().begin(), t.values().end());
}

template <class T>
bool all_close(std::span<const T> a, std::span<const T> b, double tol) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])) > tol) return false;
    }
    return true;
}

template <class T>
double max_abs_diff(std::span<const T> a, std::span<const T> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    }
    return m;
}

// Unique scratch directory under the build tree; removed eagerly.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("acdl_test_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace acdl::test
