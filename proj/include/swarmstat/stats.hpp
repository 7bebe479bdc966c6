#pragma once

#include <span>
#include <vector>

namespace swarmstat::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double sd(std::span<const double> xs);

double median(std::span<const double> xs);

/// One-pass Welford mean/SD used by report assembly. The test suite checks it
/// against an independent two-pass computation.
struct RunningStats {
    void add(double x);
    double mean() const { return mean_; }
    double sd() const;
    std::size_t count() const { return n_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Two-sided Mann-Whitney / Wilcoxon rank-sum p-value. Exact enumeration when
/// n_a + n_b <= 12 and the pooled sample is tie-free; otherwise the normal
/// approximation with midranks, tie correction, and continuity correction.
double wilcoxon_rank_sum(std::span<const double> sample_a,
                         std::span<const double> sample_b);

/// Normal-approximation branch, exposed for the exact-vs-approximate check.
double wilcoxon_rank_sum_normal(std::span<const double> sample_a,
                                std::span<const double> sample_b);

} // namespace swarmstat::stats
