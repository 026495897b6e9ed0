// Copyright 2026 The qudsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qud/stats.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qud {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double log_normal_upper_tail(double x) {
    if (x < 25.0) {
        return std::log(normal_cdf(-x));
    }
    // Mills ratio asymptotic series.
    double inv2 = 1.0 / (x * x);
    double series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
    return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

Interval wilson_interval(uint64_t k, uint64_t n, double z) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    double nn = static_cast<double>(n);
    double p = static_cast<double>(k) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // The bounds are exactly 0 and 1 at the extremes; round-off would leave crumbs.
    double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    double hi = k == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

double binomial_sigma(double p, uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

double Moments::mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }

double Moments::variance() const {
    if (count < 2) {
        return 0.0;
    }
    double n = static_cast<double>(count);
    double m = sum / n;
    return std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
}

double Moments::standard_error() const {
    return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)> &cdf) {
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    size_t i = 0;
    size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    if (n % 2 != 0) {
        ++n;
    }
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int k = 1; k < n; ++k) {
        acc += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace qud
