#include "ks/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace ks {

namespace {

// Probabilities this close to 0 or 1 are exact in the model (orthogonal or
// identical states); snapping them keeps deterministic outcomes deterministic.
constexpr double kSnap = 1e-14;

double snapped(double p)
{
    if (p < kSnap)
        return 0.0;
    if (p > 1.0 - kSnap)
        return 1.0;
    return p;
}

nlohmann::json counts_json(const EnsembleCounts& c)
{
    return {{"theta_deg", radians_to_degrees(c.theta)},
            {"n_plus", c.n_plus},
            {"n_minus", c.n_minus},
            {"n_zero", c.n_zero},
            {"N", c.total}};
}

double binomial_variance_of_average(double p_plus, std::uint64_t n)
{
    return p_plus * (1.0 - p_plus) / static_cast<double>(n);
}

double plus_probability(const Preparation& p, double theta)
{
    if (p.unpolarized)
        return 0.5;
    return transition_probability_spin_half(p.theta, p.sign, theta).plus;
}

} // namespace

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string describe(const Preparation& p)
{
    if (p.unpolarized)
        return "unpolarized";
    std::ostringstream out;
    out << (p.sign == Sign::Plus ? "up@" : "down@") << std::setprecision(9) << radians_to_degrees(p.theta);
    return out.str();
}

nlohmann::json to_json(const SequenceResult& r)
{
    nlohmann::json stages = nlohmann::json::array();
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        auto s = counts_json(r.stages[i]);
        s["stage"] = i + 1;
        stages.push_back(s);
    }
    return {{"generator", kGeneratorName},
            {"seed", r.spec.seed},
            {"preparation", describe(r.spec.preparation)},
            {"N", r.spec.size},
            {"stages", stages},
            {"repeat_flips", r.repeat_flips}};
}

SequenceResult run_sequence(const EnsembleSpec& spec, const std::vector<double>& apparatuses)
{
    if (apparatuses.empty())
        throw Error("run_sequence: apparatus list is empty");
    if (spec.size == 0)
        throw Error("run_sequence: ensemble size must be at least 1");
    if (!spec.preparation.unpolarized && !std::isfinite(spec.preparation.theta))
        throw Error("run_sequence: preparation angle must be finite");
    for (double t : apparatuses)
        if (!std::isfinite(t))
            throw Error("run_sequence: apparatus angles must be finite");

    SequenceResult result;
    result.spec = spec;
    result.apparatuses = apparatuses;
    result.stages.resize(apparatuses.size());
    for (std::size_t s = 0; s < apparatuses.size(); ++s) {
        result.stages[s].theta = apparatuses[s];
        result.stages[s].total = spec.size;
    }

    // Stay probabilities depend only on the previous angle and branch, so
    // they are worked out once per stage.
    std::vector<std::array<double, 2>> plus_given(apparatuses.size()); // [prev plus, prev minus]
    for (std::size_t s = 0; s < apparatuses.size(); ++s) {
        const double prev = s == 0 ? spec.preparation.theta : apparatuses[s - 1];
        if (s == 0 && spec.preparation.unpolarized) {
            plus_given[s] = {0.5, 0.5};
            continue;
        }
        plus_given[s] = {snapped(transition_probability_spin_half(prev, Sign::Plus, apparatuses[s]).plus),
                         snapped(transition_probability_spin_half(prev, Sign::Minus, apparatuses[s]).plus)};
    }

    Rng rng(spec.seed);
    for (std::uint64_t i = 0; i < spec.size; ++i) {
        Sign branch = spec.preparation.sign;
        for (std::size_t s = 0; s < apparatuses.size(); ++s) {
            const double p = plus_given[s][branch == Sign::Plus ? 0 : 1];
            const Sign next = rng.uniform() < p ? Sign::Plus : Sign::Minus;
            if (s > 0 && apparatuses[s] == apparatuses[s - 1] && next != branch)
                ++result.repeat_flips;
            branch = next;
            if (branch == Sign::Plus)
                ++result.stages[s].n_plus;
            else
                ++result.stages[s].n_minus;
        }
    }
    return result;
}

double empirical_spin_average(const EnsembleCounts& c)
{
    return 0.5 * (static_cast<double>(c.n_plus) - static_cast<double>(c.n_minus)) / static_cast<double>(c.total);
}

double expected_spin_average(const Preparation& p, double theta)
{
    const double plus = plus_probability(p, theta);
    return 0.5 * (plus - (1.0 - plus));
}

nlohmann::json to_json(const AdditivityReport& r)
{
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& c : r.counts)
        counts.push_back(counts_json(c));
    return {{"generator", kGeneratorName}, {"seed", r.seed},          {"N", r.n},
            {"counts", counts},            {"S_0", r.s0},             {"S_45", r.s45},
            {"S_90", r.s90},               {"residual", r.residual},  {"sigma", r.sigma},
            {"exact_residual", r.exact_residual}};
}

AdditivityReport check_additivity_relation(const EnsembleSpec& spec, std::uint64_t n)
{
    const std::array<double, 3> angles = {0.0, kPi / 4.0, kPi / 2.0};
    AdditivityReport r;
    r.n = n;
    r.seed = spec.seed;
    for (std::size_t k = 0; k < 3; ++k) {
        EnsembleSpec sub = spec;
        sub.size = n;
        sub.seed = derived_seed(spec.seed, k);
        r.counts[k] = run_sequence(sub, {angles[k]}).stages.front();
    }
    r.s0 = empirical_spin_average(r.counts[0]);
    r.s45 = empirical_spin_average(r.counts[1]);
    r.s90 = empirical_spin_average(r.counts[2]);
    r.residual = r.s45 - (r.s0 + r.s90) / std::sqrt(2.0);

    const auto& p = spec.preparation;
    const double v0 = binomial_variance_of_average(plus_probability(p, angles[0]), n);
    const double v45 = binomial_variance_of_average(plus_probability(p, angles[1]), n);
    const double v90 = binomial_variance_of_average(plus_probability(p, angles[2]), n);
    r.sigma = std::sqrt(v45 + (v0 + v90) / 2.0);
    r.exact_residual = expected_spin_average(p, angles[1]) -
                       (expected_spin_average(p, angles[0]) + expected_spin_average(p, angles[2])) / std::sqrt(2.0);
    return r;
}

nlohmann::json to_json(const VnAdditivityReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"a", row.a}, {"b", row.b}, {"value", row.value}, {"consistent", row.consistent}});
    return {{"rows", rows}, {"consistent_count", r.consistent_count}, {"summary", r.summary}};
}

VnAdditivityReport vn_value_additivity_failure()
{
    VnAdditivityReport r;
    std::size_t k = 0;
    for (double a : {0.5, -0.5}) {
        for (double b : {0.5, -0.5}) {
            auto& row = r.rows[k++];
            row.a = a;
            row.b = b;
            row.value = (a + b) / std::sqrt(2.0);
            row.consistent = row.value == 0.5 || row.value == -0.5;
            if (row.consistent)
                ++r.consistent_count;
        }
    }
    r.summary = std::to_string(r.consistent_count) + " of 4 value combinations consistent";
    return r;
}

std::vector<double> vn_continuity_scan(double psi_theta, const std::vector<double>& grid)
{
    if (grid.empty())
        throw Error("vn_continuity_scan: grid is empty");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double phi : grid) {
        const double c = std::cos(0.5 * (phi - psi_theta));
        out.push_back(c * c);
    }
    return out;
}

std::vector<double> linear_grid(double first, double last, std::size_t count)
{
    if (count == 0)
        throw Error("linear_grid: count must be positive");
    if (count == 1)
        return {first};
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.back() = last;
    return out;
}

bool ContextValueTable::rows_sum_to_one() const
{
    for (const auto& row : values)
        if (row[0] + row[1] + row[2] != 1)
            return false;
    return true;
}

ContextValueTable contextual_hv_sample(const Ray3& preparation, const std::vector<Context>& contexts, Rng& rng)
{
    ContextValueTable table;
    table.values.reserve(contexts.size());
    for (const auto& ctx : contexts) {
        std::array<double, 3> w{};
        double total = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            w[i] = snapped(spin1_overlap(preparation, ctx.triad()[i]));
            total += w[i];
        }
        const double u = rng.uniform() * total;
        std::size_t pick = 2;
        double acc = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            acc += w[i];
            if (w[i] > 0.0 && u < acc) {
                pick = i;
                break;
            }
        }
        // Rounding can leave u just above the running sum; fall back to the
        // last ray that carries weight.
        if (w[pick] == 0.0)
            for (std::size_t i = 3; i-- > 0;)
                if (w[i] > 0.0) {
                    pick = i;
                    break;
                }
        std::array<int, 3> row{};
        row[pick] = 1;
        table.values.push_back(row);
    }
    return table;
}

ContextValueTable contextual_hv_sample(const Ray3& preparation, const std::vector<Context>& contexts,
                                       std::uint64_t seed)
{
    Rng rng(seed);
    return contextual_hv_sample(preparation, contexts, rng);
}

nlohmann::json to_json(const ContextualSummary& s)
{
    return {{"generator", kGeneratorName}, {"seed", s.seed},   {"samples", s.samples},
            {"bad_rows", s.bad_rows},      {"ones", s.ones},   {"predicted", s.predicted}};
}

ContextualSummary sample_contextual_model(const Ray3& preparation, const std::vector<Context>& contexts,
                                          std::uint64_t samples, std::uint64_t seed)
{
    ContextualSummary s;
    s.samples = samples;
    s.seed = seed;
    s.ones.assign(contexts.size(), {0, 0, 0});
    for (const auto& ctx : contexts)
        s.predicted.push_back({spin1_overlap(preparation, ctx.triad()[0]), spin1_overlap(preparation, ctx.triad()[1]),
                               spin1_overlap(preparation, ctx.triad()[2])});
    Rng rng(seed);
    for (std::uint64_t n = 0; n < samples; ++n) {
        const auto table = contextual_hv_sample(preparation, contexts, rng);
        for (std::size_t c = 0; c < contexts.size(); ++c) {
            const auto& row = table.values[c];
            if (row[0] + row[1] + row[2] != 1)
                ++s.bad_rows;
            for (std::size_t i = 0; i < 3; ++i)
                s.ones[c][i] += static_cast<std::uint64_t>(row[i]);
        }
    }
    return s;
}

SharedRayPair shared_ray_context_pair(double theta, double separation)
{
    return {Context::stern_gerlach(theta), Context::stern_gerlach(theta - separation), 1, 1};
}

nlohmann::json to_json(const SharedRayStats& s)
{
    return {{"generator", kGeneratorName},
            {"seed", s.seed},
            {"samples", s.samples},
            {"differ", s.differ},
            {"differ_fraction", static_cast<double>(s.differ) / static_cast<double>(s.samples)},
            {"p_shared", s.p_shared},
            {"predicted_differ", s.predicted_differ},
            {"sigma", s.sigma}};
}

SharedRayStats sample_shared_ray_pair(const Ray3& preparation, const SharedRayPair& pair, std::uint64_t samples,
                                      std::uint64_t seed)
{
    SharedRayStats s;
    s.samples = samples;
    s.seed = seed;
    s.p_shared = spin1_overlap(preparation, pair.first.triad()[pair.shared_first]);
    s.predicted_differ = 2.0 * s.p_shared * (1.0 - s.p_shared);
    s.sigma = std::sqrt(s.predicted_differ * (1.0 - s.predicted_differ) / static_cast<double>(samples));
    const std::vector<Context> contexts = {pair.first, pair.second};
    Rng rng(seed);
    for (std::uint64_t n = 0; n < samples; ++n) {
        const auto table = contextual_hv_sample(preparation, contexts, rng);
        if (table.values[0][pair.shared_first] != table.values[1][pair.shared_second])
            ++s.differ;
    }
    return s;
}

} // namespace ks
