#include "swarmstat/design.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <memory>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::design {

namespace {

constexpr double kSingularSentinel = -1e10;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// coded value of one factor coordinate
double code(const Factor& f, double v, bool coded_units) {
    if (f.kind == FactorKind::binary || !coded_units) return v;
    return 2.0 * (v - f.lower) / (f.upper - f.lower) - 1.0;
}

Eigen::MatrixXd info_matrix_eigen(const ApproximateDesign& design, const ModelSpec& spec) {
    const auto p = static_cast<Eigen::Index>(spec.num_terms());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd f(p);
    for (std::size_t i = 0; i < design.size(); ++i) {
        const auto fv = model_vector(design.points[i], spec);
        for (Eigen::Index r = 0; r < p; ++r) f(r) = fv[static_cast<std::size_t>(r)];
        double eta = 0.0;
        for (std::size_t r = 0; r < fv.size(); ++r) eta += spec.theta0[r] * fv[r];
        const double s = logistic(eta);
        m.noalias() += design.weights[i] * s * (1.0 - s) * f * f.transpose();
    }
    return m;
}

struct Factorized {
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    double log_det = 0.0;
    bool singular = true;
};

Factorized factorize(const Eigen::MatrixXd& m) {
    Factorized out;
    out.ldlt.compute(m);
    const Eigen::VectorXd d = out.ldlt.vectorD();
    double max_pivot = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) max_pivot = std::max(max_pivot, d(i));
    if (max_pivot <= 0.0) return out;
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) < 1e-12 * max_pivot) return out; // singular
        log_det += std::log(d(i));
    }
    out.log_det = log_det;
    out.singular = false;
    return out;
}

// design decode shared by design_search's objective and its final extraction
ApproximateDesign decode_particle(std::span<const double> x, int k,
                                  const ModelSpec& spec) {
    const std::size_t nf = spec.num_factors();
    ApproximateDesign d;
    d.points.resize(static_cast<std::size_t>(k));
    d.weights.resize(static_cast<std::size_t>(k));
    double weight_sum = 0.0;
    for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        d.points[ui].assign(x.begin() + static_cast<std::ptrdiff_t>(ui * nf),
                            x.begin() + static_cast<std::ptrdiff_t>((ui + 1) * nf));
        const double w = x[static_cast<std::size_t>(k) * nf + ui];
        d.weights[ui] = w;
        weight_sum += w;
    }
    if (weight_sum < 1e-8) {
        std::fill(d.weights.begin(), d.weights.end(),
                  1.0 / static_cast<double>(k));
    } else {
        for (auto& w : d.weights) w /= weight_sum;
    }
    return d;
}

std::vector<double> coded_point(const std::vector<double>& point, const ModelSpec& spec) {
    std::vector<double> c(point.size());
    for (std::size_t q = 0; q < point.size(); ++q)
        c[q] = code(spec.factors[q], point[q], spec.coded_units);
    return c;
}

// hot-path objective for design_search: builds M straight from the particle
// encoding with preallocated buffers, no per-call validation
struct SearchEvaluator {
    ModelSpec spec;
    int k;
    Eigen::MatrixXd m;
    Eigen::VectorXd f;
    std::vector<double> coded;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;

    SearchEvaluator(ModelSpec s, int k_)
        : spec(std::move(s)),
          k(k_),
          m(static_cast<Eigen::Index>(spec.num_terms()),
            static_cast<Eigen::Index>(spec.num_terms())),
          f(static_cast<Eigen::Index>(spec.num_terms())),
          coded(spec.num_factors()) {}

    double operator()(std::span<const double> x) {
        const std::size_t nf = spec.num_factors();
        const auto uk = static_cast<std::size_t>(k);
        double wsum = 0.0;
        for (std::size_t i = 0; i < uk; ++i) wsum += x[uk * nf + i];
        const bool uniform = wsum < 1e-8;

        m.setZero();
        for (std::size_t i = 0; i < uk; ++i) {
            const double w =
                uniform ? 1.0 / static_cast<double>(k) : x[uk * nf + i] / wsum;
            if (w == 0.0) continue;
            const double* pt = x.data() + i * nf;
            for (std::size_t q = 0; q < nf; ++q)
                coded[q] = code(spec.factors[q], pt[q], spec.coded_units);
            double eta = 0.0;
            for (std::size_t t = 0; t < spec.terms.size(); ++t) {
                double v = 1.0;
                for (const int idx : spec.terms[t])
                    v *= coded[static_cast<std::size_t>(idx)];
                f(static_cast<Eigen::Index>(t)) = v;
                eta += spec.theta0[t] * v;
            }
            const double s = logistic(eta);
            m.selfadjointView<Eigen::Lower>().rankUpdate(f, w * s * (1.0 - s));
        }
        ldlt.compute(m.selfadjointView<Eigen::Lower>());
        const Eigen::VectorXd d = ldlt.vectorD();
        double max_pivot = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            max_pivot = std::max(max_pivot, d(i));
        if (max_pivot <= 0.0) return -kSingularSentinel;
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (d(i) < 1e-12 * max_pivot) return -kSingularSentinel;
            log_det += std::log(d(i));
        }
        return -log_det; // engine minimizes
    }
};

} // namespace

void ModelSpec::validate() const {
    if (factors.empty()) throw DomainError("design: no factors");
    if (terms.empty() || !terms[0].empty())
        throw DomainError("design: term list must start with the intercept");
    for (const auto& t : terms)
        for (const int idx : t)
            if (idx < 0 || static_cast<std::size_t>(idx) >= factors.size())
                throw DomainError("design: term references an invalid factor");
    if (theta0.size() != terms.size())
        throw DomainError("design: theta0 length must match the term count");
    for (const auto& f : factors) {
        if (!(f.lower < f.upper)) throw DomainError("design: empty factor range");
        if (f.kind == FactorKind::binary && (f.lower != -1.0 || f.upper != 1.0))
            throw DomainError("design: binary factors span exactly [-1, 1]");
    }
}

void ApproximateDesign::validate(const ModelSpec& spec) const {
    if (points.size() != weights.size())
        throw DomainError("design: point/weight count mismatch");
    double sum = 0.0;
    for (const double w : weights) {
        if (w < 0.0) throw DomainError("design: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw DomainError("design: weights must sum to one");
    for (const auto& pt : points) {
        if (pt.size() != spec.num_factors())
            throw DomainError("design: point dimension mismatch");
        for (std::size_t q = 0; q < pt.size(); ++q) {
            const auto& f = spec.factors[q];
            if (pt[q] < f.lower - 1e-12 || pt[q] > f.upper + 1e-12)
                throw DomainError("design: point outside factor range");
            if (f.kind == FactorKind::binary && pt[q] != -1.0 && pt[q] != 1.0)
                throw DomainError("design: binary coordinate must be +-1");
        }
    }
}

std::vector<double> model_vector(std::span<const double> point, const ModelSpec& spec) {
    spec.validate();
    if (point.size() != spec.num_factors())
        throw DomainError("design: point dimension mismatch");
    for (std::size_t q = 0; q < point.size(); ++q)
        if (point[q] < spec.factors[q].lower - 1e-9 ||
            point[q] > spec.factors[q].upper + 1e-9)
            throw DomainError("design: point outside factor range");

    std::vector<double> coded(point.size());
    for (std::size_t q = 0; q < point.size(); ++q)
        coded[q] = code(spec.factors[q], point[q], spec.coded_units);

    std::vector<double> f(spec.num_terms());
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
        double v = 1.0;
        for (const int idx : spec.terms[t]) v *= coded[static_cast<std::size_t>(idx)];
        f[t] = v;
    }
    return f;
}

std::vector<double> information_matrix(const ApproximateDesign& design,
                                       const ModelSpec& spec) {
    design.validate(spec);
    const Eigen::MatrixXd m = info_matrix_eigen(design, spec);
    std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return out;
}

double Criterion::value() const { return singular ? kSingularSentinel : log_det; }

Criterion d_criterion(const ApproximateDesign& design, const ModelSpec& spec) {
    design.validate(spec);
    const Factorized f = factorize(info_matrix_eigen(design, spec));
    Criterion c;
    c.singular = f.singular;
    c.log_det = f.singular ? kSingularSentinel : f.log_det;
    return c;
}

double sensitivity(std::span<const double> point, const ApproximateDesign& design,
                   const ModelSpec& spec) {
    design.validate(spec);
    const Factorized fact = factorize(info_matrix_eigen(design, spec));
    if (fact.singular) throw DomainError("design: singular information matrix");

    const auto fv = model_vector(point, spec);
    Eigen::VectorXd f(static_cast<Eigen::Index>(fv.size()));
    for (std::size_t r = 0; r < fv.size(); ++r) f(static_cast<Eigen::Index>(r)) = fv[r];
    double eta = 0.0;
    for (std::size_t r = 0; r < fv.size(); ++r) eta += spec.theta0[r] * fv[r];
    const double s = logistic(eta);
    return s * (1.0 - s) * f.dot(fact.ldlt.solve(f));
}

ApproximateDesign design_search(const ModelSpec& spec, int k, const OptConfig& config) {
    spec.validate();
    if (k < 1) throw ConfigError("design: k must be positive");

    const std::size_t nf = spec.num_factors();
    SearchSpace box;
    box.lower.reserve(static_cast<std::size_t>(k) * (nf + 1));
    box.upper.reserve(static_cast<std::size_t>(k) * (nf + 1));
    box.kind.reserve(static_cast<std::size_t>(k) * (nf + 1));
    for (int i = 0; i < k; ++i) {
        for (const auto& f : spec.factors) {
            box.lower.push_back(f.lower);
            box.upper.push_back(f.upper);
            box.kind.push_back(f.kind == FactorKind::binary ? CoordKind::binary
                                                            : CoordKind::continuous);
        }
    }
    for (int i = 0; i < k; ++i) {
        box.lower.push_back(0.0);
        box.upper.push_back(1.0);
        box.kind.push_back(CoordKind::continuous);
    }

    auto eval = std::make_shared<SearchEvaluator>(spec, k);
    const Objective obj = Objective::pure(
        "d-criterion", [eval](std::span<const double> x) { return (*eval)(x); });

    const OptResult res = minimize(obj, box, config);
    ApproximateDesign raw = decode_particle(res.best_position, k, spec);

    // merge support points within coded distance 1e-2, weight-averaged
    std::vector<std::vector<double>> merged_pts;
    std::vector<double> merged_w;
    std::vector<bool> used(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        std::vector<double> acc = raw.points[i];
        for (auto& v : acc) v *= raw.weights[i];
        double w = raw.weights[i];
        const auto ci = coded_point(raw.points[i], spec);
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (used[j]) continue;
            const auto cj = coded_point(raw.points[j], spec);
            double dist2 = 0.0;
            for (std::size_t q = 0; q < ci.size(); ++q)
                dist2 += (ci[q] - cj[q]) * (ci[q] - cj[q]);
            if (std::sqrt(dist2) <= 1e-2) {
                used[j] = true;
                for (std::size_t q = 0; q < acc.size(); ++q)
                    acc[q] += raw.weights[j] * raw.points[j][q];
                w += raw.weights[j];
            }
        }
        if (w > 0.0)
            for (auto& v : acc) v /= w;
        else
            acc = raw.points[i];
        // binary coordinates snap back to a legal level after averaging
        for (std::size_t q = 0; q < acc.size(); ++q)
            if (spec.factors[q].kind == FactorKind::binary)
                acc[q] = (acc[q] < 0.0) ? -1.0 : 1.0;
        merged_pts.push_back(std::move(acc));
        merged_w.push_back(w);
    }

    // drop negligible weights, then renormalize
    ApproximateDesign out;
    double sum = 0.0;
    for (std::size_t i = 0; i < merged_pts.size(); ++i) {
        if (merged_w[i] < 1e-3) continue;
        out.points.push_back(merged_pts[i]);
        out.weights.push_back(merged_w[i]);
        sum += merged_w[i];
    }
    if (out.points.empty()) { // fully degenerate search; keep the raw design
        out = raw;
        sum = 0.0;
        for (const double w : out.weights) sum += w;
    }
    for (auto& w : out.weights) w /= sum;
    return out;
}

EfficiencyBound d_efficiency_lower_bound(const ApproximateDesign& design,
                                         const ModelSpec& spec,
                                         const OptConfig& inner_config) {
    design.validate(spec);
    const Factorized fact = factorize(info_matrix_eigen(design, spec));
    if (fact.singular) throw DomainError("design: singular information matrix");
    const double p = static_cast<double>(spec.num_terms());

    // shared fast evaluator against the prefactorized matrix
    auto d_of = [&](std::span<const double> point) {
        const auto fv = model_vector(point, spec);
        Eigen::VectorXd f(static_cast<Eigen::Index>(fv.size()));
        for (std::size_t r = 0; r < fv.size(); ++r)
            f(static_cast<Eigen::Index>(r)) = fv[r];
        double eta = 0.0;
        for (std::size_t r = 0; r < fv.size(); ++r) eta += spec.theta0[r] * fv[r];
        const double s = logistic(eta);
        return s * (1.0 - s) * f.dot(fact.ldlt.solve(f));
    };

    // swarm maximization of the sensitivity over the factor space
    SearchSpace box;
    for (const auto& f : spec.factors) {
        box.lower.push_back(f.lower);
        box.upper.push_back(f.upper);
        box.kind.push_back(f.kind == FactorKind::binary ? CoordKind::binary
                                                        : CoordKind::continuous);
    }
    const Objective obj = Objective::pure(
        "sensitivity", [&d_of](std::span<const double> x) { return -d_of(x); });
    OptConfig cfg = inner_config;
    cfg.seed = mix_seed(inner_config.seed ^ 0x5eed5eedULL);
    const OptResult res = minimize(obj, box, cfg);

    EfficiencyBound out;
    out.d_max = -res.best_value;
    out.argmax = res.best_position;

    // coarse-grid cross-check: every binary sign pattern x 5 levels per
    // continuous factor
    std::vector<std::size_t> binary_idx, cont_idx;
    for (std::size_t q = 0; q < spec.num_factors(); ++q)
        (spec.factors[q].kind == FactorKind::binary ? binary_idx : cont_idx).push_back(q);

    const int levels = 5;
    std::vector<double> point(spec.num_factors(), 0.0);
    const std::size_t patterns = std::size_t{1} << binary_idx.size();
    std::vector<int> ticks(cont_idx.size(), 0);
    for (std::size_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t b = 0; b < binary_idx.size(); ++b)
            point[binary_idx[b]] = (mask >> b) & 1 ? 1.0 : -1.0;
        std::fill(ticks.begin(), ticks.end(), 0);
        for (;;) {
            for (std::size_t c = 0; c < cont_idx.size(); ++c) {
                const auto& f = spec.factors[cont_idx[c]];
                point[cont_idx[c]] =
                    f.lower + (f.upper - f.lower) * ticks[c] / double(levels - 1);
            }
            const double d = d_of(point);
            if (d > out.d_max) {
                out.d_max = d;
                out.argmax = point;
            }
            std::size_t c = 0;
            for (; c < ticks.size(); ++c) {
                if (++ticks[c] < levels) break;
                ticks[c] = 0;
            }
            if (c == ticks.size()) break;
        }
    }

    out.atwood = std::min(1.0, p / out.d_max);
    out.exponential = std::min(1.0, std::exp(1.0 - out.d_max / p));
    return out;
}

ModelSpec car_refuel_spec() {
    ModelSpec spec;
    spec.factors = {
        {"x1", FactorKind::binary, -1.0, 1.0},        // ring type
        {"x2", FactorKind::binary, -1.0, 1.0},        // lighting
        {"x3", FactorKind::binary, -1.0, 1.0},        // sharpening
        {"x4", FactorKind::binary, -1.0, 1.0},        // smoothing
        {"x5", FactorKind::continuous, 50.0, 90.0},   // lighting angle
        {"x6", FactorKind::continuous, 30.0, 55.0},   // gas-cap angle 1
        {"x7", FactorKind::continuous, 0.0, 10.0},    // gas-cap angle 2
        {"x8", FactorKind::continuous, 18.0, 48.0},   // can distance
        {"x9", FactorKind::continuous, 0.125, 0.425}, // ring thickness
        {"x10", FactorKind::continuous, 5.0, 15.0},   // threshold step
    };
    spec.terms = {{},     {0},       {1},    {2},    {3},    {4},
                  {5},    {6},       {7},    {8},    {9},    {0, 8},
                  {1, 4}, {3, 7},    {5, 6, 7}, {2, 3, 9}};
    spec.theta0 = {3.0, 0.5, 0.75, 1.25, 0.8,  0.5,  0.8,  -0.4,
                   -1.0, 2.65, 0.65, 1.1, -0.2, 0.9, -0.36, 1.07};
    spec.coded_units = true;
    spec.validate();
    return spec;
}

ModelSpec logistic2_spec() {
    ModelSpec spec;
    spec.factors = {{"x", FactorKind::continuous, -5.0, 5.0}};
    spec.terms = {{}, {0}};
    spec.theta0 = {0.0, 1.0};
    // natural units so the linear predictor equals the factor itself
    spec.coded_units = false;
    spec.validate();
    return spec;
}

ModelSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("design: cannot open " + path);
    ModelSpec spec;
    std::string line;
    auto factor_index = [&spec](const std::string& name) {
        for (std::size_t q = 0; q < spec.factors.size(); ++q)
            if (spec.factors[q].name == name) return static_cast<int>(q);
        throw DomainError("design: unknown factor '" + name + "' in term");
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "factor") {
            Factor f;
            std::string kind;
            if (!(ls >> f.name >> kind >> f.lower >> f.upper))
                throw DomainError("design: malformed factor line: " + line);
            if (kind == "binary")
                f.kind = FactorKind::binary;
            else if (kind == "continuous")
                f.kind = FactorKind::continuous;
            else
                throw DomainError("design: unknown factor kind '" + kind + "'");
            spec.factors.push_back(f);
        } else if (key == "term") {
            std::string expr;
            if (!(ls >> expr)) throw DomainError("design: malformed term line: " + line);
            std::vector<int> term;
            if (expr != "1") {
                std::istringstream ts(expr);
                std::string name;
                while (std::getline(ts, name, '*')) term.push_back(factor_index(name));
            }
            spec.terms.push_back(std::move(term));
        } else if (key == "theta") {
            double v;
            while (ls >> v) spec.theta0.push_back(v);
        } else if (key == "coded") {
            std::string v;
            ls >> v;
            spec.coded_units = (v == "true" || v == "1");
        } else {
            throw DomainError("design: unknown spec keyword '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

std::string spec_to_string(const ModelSpec& spec) {
    std::ostringstream os;
    for (const auto& f : spec.factors)
        os << "factor " << f.name << " "
           << (f.kind == FactorKind::binary ? "binary" : "continuous") << " " << f.lower
           << " " << f.upper << "\n";
    for (const auto& t : spec.terms) {
        os << "term ";
        if (t.empty()) {
            os << "1";
        } else {
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i) os << "*";
                os << spec.factors[static_cast<std::size_t>(t[i])].name;
            }
        }
        os << "\n";
    }
    os << "theta";
    for (const double v : spec.theta0) os << " " << v;
    os << "\ncoded " << (spec.coded_units ? "true" : "false") << "\n";
    return os.str();
}

std::string design_to_csv(const ApproximateDesign& design, const ModelSpec& spec) {
    std::ostringstream os;
    for (const auto& f : spec.factors) os << f.name << ",";
    os << "w\n";
    for (std::size_t i = 0; i < design.size(); ++i) {
        for (const double v : design.points[i]) os << csv::format_double(v) << ",";
        os << csv::format_double(design.weights[i]) << "\n";
    }
    return os.str();
}

} // namespace swarmstat::design
