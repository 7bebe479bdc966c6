#include "swarmstat/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"

namespace swarmstat::renewal {

namespace {

double dot(std::span<const double> a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) s += a[k] * b[k];
    return s;
}

// events and risk entries of one (from, to) channel
struct Channel {
    struct Event {
        double sojourn;
        std::size_t individual;
    };
    struct RiskItem {
        double sojourn;
        std::size_t individual;
    };
    std::vector<Event> events;     // sorted by sojourn descending, stable
    std::vector<RiskItem> at_risk; // sorted by sojourn descending, stable
};

// channel decomposition is beta-independent, so it is built once and reused
// across objective evaluations
struct Prepared {
    const Sample* sample = nullptr;
    std::vector<Channel> channels; // indexed like structure.allowed
};

Prepared prepare(const Sample& sample) {
    sample.structure.validate();
    const auto& allowed = sample.structure.allowed;
    Prepared prep;
    prep.sample = &sample;
    prep.channels.resize(allowed.size());

    for (std::size_t m = 0; m < sample.paths.size(); ++m) {
        const Path& path = sample.paths[m];
        for (std::size_t n = 1; n < path.states.size(); ++n) {
            const int from = path.states[n - 1];
            const int to = path.states[n];
            const double w = path.times[n] - path.times[n - 1];
            const int ci = sample.structure.pair_index(from, to);
            if (ci < 0)
                throw DomainError("renewal: path contains a disallowed transition " +
                                  std::to_string(from) + "->" + std::to_string(to));
            prep.channels[static_cast<std::size_t>(ci)].events.push_back({w, m});
            // a completed sojourn in `from` puts the individual at risk for
            // every channel leaving `from`
            for (std::size_t c = 0; c < allowed.size(); ++c)
                if (allowed[c].first == from)
                    prep.channels[c].at_risk.push_back({w, m});
        }
    }
    for (auto& ch : prep.channels) {
        std::stable_sort(ch.events.begin(), ch.events.end(),
                         [](const auto& a, const auto& b) { return a.sojourn > b.sojourn; });
        std::stable_sort(ch.at_risk.begin(), ch.at_risk.end(),
                         [](const auto& a, const auto& b) { return a.sojourn > b.sojourn; });
    }
    return prep;
}

// one descending-sojourn sweep per channel; accumulates U and the partial NLL
// simultaneously. Risk weights are exp-shifted by the channel max to stay
// finite in high dimension.
void sweep(const Prepared& prep, std::span<const double> beta, std::vector<double>* u_out,
           double* nll_out) {
    const Sample& sample = *prep.sample;
    const std::size_t d = sample.covariates.dim;
    if (beta.size() != d) throw DomainError("renewal: beta dimension mismatch");

    if (u_out) u_out->assign(d, 0.0);
    if (nll_out) *nll_out = 0.0;

    std::vector<double> s1(d);
    for (std::size_t c = 0; c < prep.channels.size(); ++c) {
        const Channel& ch = prep.channels[c];
        if (ch.events.empty()) continue;

        // per-individual linear predictor and shift for this channel
        double shift = -std::numeric_limits<double>::infinity();
        std::vector<double> eta(sample.paths.size());
        for (std::size_t m = 0; m < sample.paths.size(); ++m) {
            eta[m] = dot(beta, sample.covariates.at(m, static_cast<int>(c)));
            shift = std::max(shift, eta[m]);
        }

        double s0 = 0.0;
        std::fill(s1.begin(), s1.end(), 0.0);
        std::size_t r = 0;
        for (const auto& ev : ch.events) {
            while (r < ch.at_risk.size() && ch.at_risk[r].sojourn >= ev.sojourn) {
                const std::size_t m = ch.at_risk[r].individual;
                const double w = std::exp(eta[m] - shift);
                s0 += w;
                const auto& z = sample.covariates.at(m, static_cast<int>(c));
                for (std::size_t k = 0; k < d; ++k) s1[k] += w * z[k];
                ++r;
            }
            if (s0 <= 0.0)
                throw DomainError("renewal: empty risk set at an event time");
            const auto& z_event = sample.covariates.at(ev.individual, static_cast<int>(c));
            if (u_out)
                for (std::size_t k = 0; k < d; ++k)
                    (*u_out)[k] += z_event[k] - s1[k] / s0;
            if (nll_out) *nll_out -= eta[ev.individual] - (std::log(s0) + shift);
        }
    }
}

} // namespace

void TransitionStructure::validate() const {
    if (states < 2) throw DomainError("renewal: need at least two states");
    bool any_outgoing = false;
    for (const auto& [i, j] : allowed) {
        if (i == j) throw DomainError("renewal: self-transitions are not allowed");
        if (i < 0 || j < 0 || i >= states || j >= states)
            throw DomainError("renewal: transition references an invalid state");
        any_outgoing = true;
    }
    if (!any_outgoing) throw DomainError("renewal: no allowed transitions");
}

bool TransitionStructure::is_absorbing(int state) const {
    for (const auto& [i, j] : allowed)
        if (i == state) return false;
    return true;
}

std::vector<int> TransitionStructure::targets_of(int state) const {
    std::vector<int> out;
    for (const auto& [i, j] : allowed)
        if (i == state) out.push_back(j);
    return out;
}

int TransitionStructure::pair_index(int from, int to) const {
    for (std::size_t c = 0; c < allowed.size(); ++c)
        if (allowed[c].first == from && allowed[c].second == to)
            return static_cast<int>(c);
    return -1;
}

TransitionStructure preset(const std::string& name) {
    TransitionStructure s;
    if (name == "complete3") {
        s.states = 3;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) s.allowed.emplace_back(i, j);
    } else if (name == "bmt5") {
        // 0=TX, 1=AGVHD, 2=CGVHD, 3=Relapse, 4=Death in remission
        s.states = 5;
        s.allowed = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2},
                     {1, 3}, {1, 4}, {2, 3}, {2, 4}};
    } else if (name == "twostate") {
        s.states = 2;
        s.allowed = {{0, 1}};
    } else {
        throw ConfigError("unknown topology preset: " + name);
    }
    return s;
}

Path simulate_individual(const TransitionStructure& s, double baseline_rate,
                         std::span<const double> beta,
                         const std::vector<std::vector<double>>& z_individual,
                         double horizon, int start_state, Rng& rng) {
    s.validate();
    if (baseline_rate <= 0.0) throw DomainError("renewal: baseline rate must be positive");
    if (horizon <= 0.0) throw DomainError("renewal: horizon must be positive");

    Path path;
    path.states.push_back(start_state);
    path.times.push_back(0.0);
    int state = start_state;
    double now = 0.0;

    while (!s.is_absorbing(state)) {
        // per-target rates lambda0 * exp(beta' Z)
        std::vector<std::pair<int, double>> rates;
        double total = 0.0;
        for (std::size_t c = 0; c < s.allowed.size(); ++c) {
            if (s.allowed[c].first != state) continue;
            const double r = baseline_rate * std::exp(dot(beta, z_individual[c]));
            rates.emplace_back(s.allowed[c].second, r);
            total += r;
        }
        if (total <= 0.0)
            throw DomainError("renewal: non-absorbing state with zero total rate");

        const double sojourn = rng.exponential(total);
        if (now + sojourn > horizon) {
            path.terminated_by = Termination::horizon;
            return path;
        }
        double u = rng.uniform() * total;
        int next = rates.back().first;
        for (const auto& [target, r] : rates) {
            if (u < r) {
                next = target;
                break;
            }
            u -= r;
        }
        now += sojourn;
        path.states.push_back(next);
        path.times.push_back(now);
        state = next;
    }
    path.terminated_by = Termination::absorption;
    return path;
}

Sample simulate_sample(const TransitionStructure& s, std::size_t individuals,
                       std::size_t covariate_dim, double baseline_rate,
                       std::span<const double> beta, double horizon,
                       std::uint64_t seed, int start_state) {
    s.validate();
    Sample sample;
    sample.structure = s;
    sample.paths.reserve(individuals);
    sample.covariates.dim = covariate_dim;
    sample.covariates.z.resize(individuals);

    for (std::size_t m = 0; m < individuals; ++m) {
        // per-individual stream so simulation order never matters
        Rng rng(mix_seed(seed ^ mix_seed(m + 1)));
        auto& z_m = sample.covariates.z[m];
        z_m.resize(s.allowed.size());
        for (auto& z : z_m) {
            z.resize(covariate_dim);
            for (auto& v : z) v = rng.uniform(-1.0, 1.0);
        }
        sample.paths.push_back(simulate_individual(s, baseline_rate, beta, z_m,
                                                   horizon, start_state, rng));
    }
    return sample;
}

std::vector<double> score(std::span<const double> beta, const Sample& sample) {
    const Prepared prep = prepare(sample);
    std::vector<double> u;
    sweep(prep, beta, &u, nullptr);
    return u;
}

double mnorm_objective(std::span<const double> beta, const Sample& sample, double p) {
    if (p < 1.0) throw DomainError("renewal: norm order must be >= 1");
    const std::vector<double> u = score(beta, sample);
    if (std::isinf(p)) {
        double m = 0.0;
        for (const double v : u) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (const double v : u) s += std::abs(v);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (const double v : u) s += v * v;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (const double v : u) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

double cox_partial_nll(std::span<const double> beta, const Sample& sample) {
    const Prepared prep = prepare(sample);
    double nll = 0.0;
    sweep(prep, beta, nullptr, &nll);
    return nll;
}

Objective make_mnorm_objective(const Sample& sample, double p) {
    if (p < 1.0) throw DomainError("renewal: norm order must be >= 1");
    auto prep = std::make_shared<Prepared>(prepare(sample));
    auto data = std::make_shared<Sample>(sample);
    prep->sample = data.get();
    return Objective::pure("renewal-mnorm", [prep, data, p](std::span<const double> beta) {
        std::vector<double> u;
        sweep(*prep, beta, &u, nullptr);
        if (std::isinf(p)) {
            double m = 0.0;
            for (const double v : u) m = std::max(m, std::abs(v));
            return m;
        }
        double s = 0.0;
        if (p == 1.0) {
            for (const double v : u) s += std::abs(v);
            return s;
        }
        if (p == 2.0) {
            for (const double v : u) s += v * v;
            return std::sqrt(s);
        }
        for (const double v : u) s += std::pow(std::abs(v), p);
        return std::pow(s, 1.0 / p);
    });
}

Objective make_partial_nll_objective(const Sample& sample) {
    auto prep = std::make_shared<Prepared>(prepare(sample));
    auto data = std::make_shared<Sample>(sample);
    prep->sample = data.get();
    return Objective::pure("renewal-partial-nll",
                           [prep, data](std::span<const double> beta) {
                               double nll = 0.0;
                               sweep(*prep, beta, nullptr, &nll);
                               return nll;
                           });
}

std::string paths_to_csv(const Sample& sample) {
    std::ostringstream os;
    os << "m,n,from,to,time\n";
    for (std::size_t m = 0; m < sample.paths.size(); ++m) {
        const Path& p = sample.paths[m];
        for (std::size_t n = 1; n < p.states.size(); ++n)
            os << m << "," << n << "," << p.states[n - 1] << "," << p.states[n] << ","
               << csv::format_double(p.times[n]) << "\n";
    }
    return os.str();
}

std::vector<Path> paths_from_csv(const std::string& text) {
    const auto table = csv::parse(text, true);
    const std::size_t mc = table.column("m");
    const std::size_t fc = table.column("from");
    const std::size_t tc = table.column("to");
    const std::size_t wc = table.column("time");

    std::vector<Path> paths;
    for (const auto& row : table.rows) {
        const auto m = csv::to_number(row.at(mc));
        const auto from = csv::to_number(row.at(fc));
        const auto to = csv::to_number(row.at(tc));
        const auto time = csv::to_number(row.at(wc));
        if (!m || !from || !to || !time) throw DomainError("renewal: malformed path row");
        const auto mi = static_cast<std::size_t>(*m);
        if (mi >= paths.size()) paths.resize(mi + 1);
        Path& p = paths[mi];
        if (p.states.empty()) {
            p.states.push_back(static_cast<int>(*from));
            p.times.push_back(0.0);
        }
        p.states.push_back(static_cast<int>(*to));
        p.times.push_back(*time);
    }
    return paths;
}

} // namespace swarmstat::renewal
