#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "herb/error.hpp"

namespace herb {

using Vector = std::vector<double>;

inline double l2_norm(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return std::sqrt(sum);
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("vector length mismatch in distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// Arithmetic mean of equally sized vectors, accumulated in list order.
inline Vector centroid(std::span<const Vector> vectors) {
    if (vectors.empty()) throw ValidationError("centroid of an empty cluster");
    Vector out(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        if (v.size() != out.size()) throw ValidationError("vector length mismatch in centroid");
        for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
    }
    const double k = static_cast<double>(vectors.size());
    for (auto& x : out) x /= k;
    return out;
}

/// Numerically stable softmax (max-shifted).
inline Vector softmax(std::span<const double> logits) {
    if (logits.empty()) return {};
    double top = logits.front();
    for (double x : logits) top = std::max(top, x);
    Vector out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        total += out[i];
    }
    for (auto& x : out) x /= total;
    return out;
}

} // namespace herb
