#include "symlearn/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symlearn/errors.hpp"

namespace symlearn {

Vector softmax(std::span<const double> v) {
    if (v.empty()) throw DomainError("softmax: empty input");
    if (!all_finite(v)) throw NumericError("softmax: non-finite input");
    const double m = *std::max_element(v.begin(), v.end());
    Vector out(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) throw DomainError("log_sum_exp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

double gumbel_from_uniform(double u) {
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    return -std::log(-std::log(u));
}

double standard_gumbel(RngState& rng) {
    return gumbel_from_uniform(rng.next_uniform());
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace symlearn
