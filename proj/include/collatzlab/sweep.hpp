#pragma once

#include "collatzlab/det.hpp"
#include "collatzlab/orbits.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace collatzlab {

// Range sweeps. Each k is independent, so the parallel kernels split the k range
// across OpenMP threads; the serial versions are the reference the tests compare
// against. Both produce identical, k-ordered output.

enum class SweepEngine { BruteForce, Elimination, Cycle, Both };
const char* to_string(SweepEngine e);
std::optional<SweepEngine> parse_sweep_engine(const std::string& s);

struct SweepOptions {
    SweepEngine engine = SweepEngine::Cycle;
    /// With engine Cycle, elimination also runs (and must agree) for k <= this.
    Index cross_check_below = 300;
    /// Fraction of k values that also get integer-evaluation checks.
    double eval_sample_rate = 0.0;
    int eval_points = 10;
    std::uint64_t seed = 0xC011A72;
    int jobs = 0;  // 0: OpenMP default
};

struct VerifyItem {
    Index k = 0;
    Poly det;
    std::string engines;  // e.g. "cycle+elim"
    bool engines_agree = true;
    int eval_checks = 0;
    bool eval_agree = true;
    bool pass = false;
    std::string error;
};

VerifyItem verify_one(Index k, const SweepOptions& opts);
std::vector<VerifyItem> verify_range_serial(Index k_min, Index k_max, const SweepOptions& opts);
std::vector<VerifyItem> verify_range_parallel(Index k_min, Index k_max, const SweepOptions& opts);
std::vector<VerifyItem> verify_list_serial(std::span<const Index> ks, const SweepOptions& opts);
std::vector<VerifyItem> verify_list_parallel(std::span<const Index> ks, const SweepOptions& opts);

struct MtildeItem {
    Index k = 0;
    OrbitStatus status = OrbitStatus::Inconclusive;
    std::optional<Poly> det;  // exact det M~_{k-1} when k <= det_limit
    int eval_checks = 0;
    std::uint64_t nodes = 0;
    /// Rendered search paths, filled when MtildeOptions::keep_trace is set.
    std::vector<std::string> trace;
    std::optional<std::vector<Index>> cycle;
    /// False only on a contradiction: ZeroCertified with a nonzero determinant, or a
    /// CycleFound whose permutation term vanishes.
    bool consistent = true;
    std::string error;
};

struct MtildeOptions {
    Index det_limit = 300;
    /// Integer-evaluation points used above det_limit (0 disables).
    int eval_points = 0;
    std::uint64_t seed = 0xC011A72;
    std::uint64_t node_budget = kDefaultNodeBudget;
    bool keep_trace = false;
    bool trace_tags = false;
    int jobs = 0;
};

MtildeItem check_mtilde(Index k, const MtildeOptions& opts);
std::vector<MtildeItem> mtilde_sweep_serial(std::span<const Index> ks, const MtildeOptions& opts);
std::vector<MtildeItem> mtilde_sweep_parallel(std::span<const Index> ks, const MtildeOptions& opts);

/// Random evaluation points for k: |t| in [2, 64] with random sign. Deterministic in (seed, k).
std::vector<BigInt> eval_points_for(Index k, int count, std::uint64_t seed);
bool sampled_for_eval(Index k, double rate, std::uint64_t seed);

} // namespace collatzlab
