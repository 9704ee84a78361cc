#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ks/linalg.hpp"

namespace ks {

inline constexpr std::string_view kGeneratorName = "mt19937_64";

// splitmix64 finalizer of seed and index; used to give each sub-ensemble its
// own stream.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index);

// Uniform doubles in [0, 1) from the top 53 bits, so values do not depend on
// the standard library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct Preparation {
    bool unpolarized = true;
    double theta = 0.0;
    Sign sign = Sign::Plus;

    static Preparation polarized(double theta, Sign sign) { return {false, theta, sign}; }
    static Preparation unprepared() { return {}; }
};

std::string describe(const Preparation& p); // "up@0", "down@90", "unpolarized"

struct EnsembleSpec {
    std::uint64_t size = 0;
    Preparation preparation;
    std::uint64_t seed = 0;
};

struct EnsembleCounts {
    double theta = 0.0;
    std::uint64_t n_plus = 0;
    std::uint64_t n_minus = 0;
    std::uint64_t n_zero = 0;
    std::uint64_t total = 0;
};

struct SequenceResult {
    EnsembleSpec spec;
    std::vector<double> apparatuses;
    std::vector<EnsembleCounts> stages;
    // Particles whose branch changed between two consecutive apparatuses at
    // the same angle.
    std::uint64_t repeat_flips = 0;
};

nlohmann::json to_json(const SequenceResult& r);

// Passes every particle through the apparatuses in order. A particle keeps
// its current branch and angle; at the next apparatus it stays on the same
// sign with probability cos^2(phi/2). Unpolarized particles split 50/50 at
// the first apparatus. Throws Error on an empty list or N = 0.
SequenceResult run_sequence(const EnsembleSpec& spec, const std::vector<double>& apparatuses);

// (n+ - n-) / 2N.
double empirical_spin_average(const EnsembleCounts& c);

// Exact ensemble average <S_theta> for a preparation.
double expected_spin_average(const Preparation& p, double theta);

struct AdditivityReport {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::array<EnsembleCounts, 3> counts; // 0, pi/4, pi/2
    double s0 = 0.0, s45 = 0.0, s90 = 0.0;
    double residual = 0.0;       // s45 - (s0 + s90)/sqrt(2)
    double sigma = 0.0;          // propagated binomial standard deviation
    double exact_residual = 0.0; // same relation on exact averages
};

nlohmann::json to_json(const AdditivityReport& r);

// Three disjoint ensembles of size n (seeds derived from spec.seed with
// index 0, 1, 2), one measured at each of 0, pi/4, pi/2.
AdditivityReport check_additivity_relation(const EnsembleSpec& spec, std::uint64_t n);

struct VnAdditivityRow {
    double a = 0.0, b = 0.0;
    double value = 0.0; // (a + b)/sqrt(2)
    bool consistent = false;
};

struct VnAdditivityReport {
    std::array<VnAdditivityRow, 4> rows;
    int consistent_count = 0;
    std::string summary;
};

nlohmann::json to_json(const VnAdditivityReport& r);

// Tries every pair of eigenvalues (a, b) in {+1/2, -1/2}^2 as values of S_0
// and S_pi/2 and checks whether (a + b)/sqrt(2) is itself an eigenvalue.
VnAdditivityReport vn_value_additivity_failure();

// <phi|W_psi|phi> = cos^2((phi - psi)/2) for each phi in the grid.
std::vector<double> vn_continuity_scan(double psi_theta, const std::vector<double>& grid);

// count evenly spaced points from first to last inclusive.
std::vector<double> linear_grid(double first, double last, std::size_t count);

struct ContextValueTable {
    std::vector<std::array<int, 3>> values; // one row per context

    bool rows_sum_to_one() const;
};

// One value assignment per context, drawn independently: the ray valued 1 is
// chosen with probability spin1_overlap(preparation, ray).
ContextValueTable contextual_hv_sample(const Ray3& preparation, const std::vector<Context>& contexts, Rng& rng);
ContextValueTable contextual_hv_sample(const Ray3& preparation, const std::vector<Context>& contexts,
                                       std::uint64_t seed);

struct ContextualSummary {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t bad_rows = 0;                          // rows not summing to 1
    std::vector<std::array<std::uint64_t, 3>> ones;      // per context, per ray
    std::vector<std::array<double, 3>> predicted;        // spin1_overlap
};

nlohmann::json to_json(const ContextualSummary& s);

ContextualSummary sample_contextual_model(const Ray3& preparation, const std::vector<Context>& contexts,
                                          std::uint64_t samples, std::uint64_t seed);

// Two apparatuses whose fields differ by `separation` about the lab y-axis.
// Both contexts contain the rotation axis, at index 1 of each triad.
struct SharedRayPair {
    Context first;
    Context second;
    std::size_t shared_first = 1;
    std::size_t shared_second = 1;
};

SharedRayPair shared_ray_context_pair(double theta, double separation);

struct SharedRayStats {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t differ = 0;     // samples where the shared ray got different values
    double p_shared = 0.0;        // overlap with the shared ray
    double predicted_differ = 0.0; // 2 p (1 - p)
    double sigma = 0.0;            // binomial sd of the differ fraction
};

nlohmann::json to_json(const SharedRayStats& s);

SharedRayStats sample_shared_ray_pair(const Ray3& preparation, const SharedRayPair& pair, std::uint64_t samples,
                                      std::uint64_t seed);

} // namespace ks
