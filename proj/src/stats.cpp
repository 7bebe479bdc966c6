#include "swarmstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "swarmstat/errors.hpp"

namespace swarmstat::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean of empty sample");
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sd(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("sd of empty sample");
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (const double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double median(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("median of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void RunningStats::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

double RunningStats::sd() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(m2_ / static_cast<double>(n_ - 1));
}

namespace {

// midranks of the pooled sample, a first then b
std::vector<double> pooled_midranks(std::span<const double> a, std::span<const double> b,
                                    bool& has_ties) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> pooled(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = {a[i], i};
    for (std::size_t i = 0; i < b.size(); ++i) pooled[a.size() + i] = {b[i], a.size() + i};
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    has_ties = false;
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0; // midrank, 1-based
        if (j > i) has_ties = true;
        for (std::size_t k = i; k <= j; ++k) ranks[pooled[k].second] = r;
        i = j + 1;
    }
    return ranks;
}

double rank_sum_a(std::span<const double> a, const std::vector<double>& ranks) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];
    return w;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// exact two-sided p by counting rank subsets with the classic DP
double exact_p(std::size_t na, std::size_t nb, double w_obs) {
    const std::size_t n = na + nb;
    const std::size_t max_sum = n * (n + 1) / 2;
    // ways[k][s]: subsets of size k of {1..n} summing to s
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
        for (std::size_t k = std::min(r, na); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= r; --s) {
                if (ways[k - 1][s - r] > 0.0) ways[k][s] += ways[k - 1][s - r];
            }
        }
    }
    double total = 0.0, le = 0.0, ge = 0.0;
    const auto w = static_cast<std::size_t>(std::llround(w_obs)); // tie-free: integer
    for (std::size_t s = 0; s <= max_sum; ++s) {
        total += ways[na][s];
        if (s <= w) le += ways[na][s];
        if (s >= w) ge += ways[na][s];
    }
    return std::min(1.0, 2.0 * std::min(le / total, ge / total));
}

} // namespace

double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("wilcoxon: empty sample");
    bool has_ties = false;
    const std::vector<double> ranks = pooled_midranks(a, b, has_ties);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double w = rank_sum_a(a, ranks);
    const double u = w - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;

    // tie correction: sum over tie groups of (t^3 - t)
    double tie_term = 0.0;
    {
        std::map<double, std::size_t> counts;
        for (const double x : a) ++counts[x];
        for (const double x : b) ++counts[x];
        for (const auto& [value, t] : counts) {
            (void)value;
            const double td = static_cast<double>(t);
            tie_term += td * td * td - td;
        }
    }
    const double var =
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0; // fully tied pooled sample
    double diff = u - mu;
    // continuity correction toward the null
    if (diff > 0.5)
        diff -= 0.5;
    else if (diff < -0.5)
        diff += 0.5;
    else
        diff = 0.0;
    const double z = diff / std::sqrt(var);
    return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
}

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("wilcoxon: empty sample");
    bool has_ties = false;
    const std::vector<double> ranks = pooled_midranks(a, b, has_ties);
    if (!has_ties && a.size() + b.size() <= 12)
        return exact_p(a.size(), b.size(), rank_sum_a(a, ranks));
    return wilcoxon_rank_sum_normal(a, b);
}

} // namespace swarmstat::stats
