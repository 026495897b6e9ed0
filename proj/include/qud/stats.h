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

#ifndef QUD_STATS_H
#define QUD_STATS_H

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qud {

double normal_cdf(double x);
double normal_pdf(double x);
/// log(Phi(-x)), accurate for large positive x where Phi(-x) underflows.
double log_normal_upper_tail(double x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Wilson score interval for k successes in n trials at normal quantile z.
Interval wilson_interval(uint64_t k, uint64_t n, double z = 1.959963984540054);

/// sqrt(p (1 - p) / n).
double binomial_sigma(double p, uint64_t n);

/// Sum-based moments; merging is exact up to floating-point association,
/// so callers merge in a fixed order.
struct Moments {
    uint64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++count;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const Moments &other) {
        count += other.count;
        sum += other.sum;
        sum_sq += other.sum_sq;
    }
    double mean() const;
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const;
    double standard_error() const;
};

/// sup |F_n - F| for the sample against a continuous CDF. Sorts a copy.
double ks_statistic(std::vector<double> sample, const std::function<double(double)> &cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Composite Simpson rule on [a, b] with n (rounded up to even) intervals.
double simpson(const std::function<double(double)> &f, double a, double b, int n);

}  // namespace qud

#endif
