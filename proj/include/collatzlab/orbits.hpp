#pragma once

#include "collatzlab/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace collatzlab {

/// The shortcut Collatz map f(n) = (3n+1)/2 (odd n), n/2 (even n), restricted to
/// {1..k}. Points whose image leaves the range have no successor. Its graph is
/// exactly the pattern of x entries of M_k.
class TruncatedCollatzMap {
public:
    explicit TruncatedCollatzMap(Index k);

    [[nodiscard]] Index k() const { return k_; }
    [[nodiscard]] std::optional<Index> successor(Index i) const;

private:
    Index k_;
};

/// Every cycle of TruncatedCollatzMap(k). Each cycle starts at its smallest element
/// and follows f; cycles are ordered by that element.
std::vector<std::vector<Index>> cycles(Index k);

/// Rows of M~_{k-1} other than (2k-1)/3 that carry an x in column v: 2v when
/// 2v <= k-1, and (2v-1)/3 when integral. Ascending.
std::vector<Index> inverse_preimages(Index v, Index k);

enum class OrbitStatus { ZeroCertified, CycleFound, Inconclusive };
enum class InverseStep { Forced, Double, Tri };
enum class StepFate { Expanded, DeadEnd, ClosesCycle, Revisit, Budget };

const char* to_string(OrbitStatus s);
const char* to_string(InverseStep s);

struct TraceStep {
    Index value = 0;
    InverseStep via = InverseStep::Forced;
    int depth = 0;
    StepFate fate = StepFate::Expanded;
};

struct OrbitDecision {
    Index k = 0;
    OrbitStatus status = OrbitStatus::Inconclusive;
    /// DFS visit order. trace[0] is k/2 (depth 0), trace[1] is (2k-1)/3.
    std::vector<TraceStep> trace;
    /// For CycleFound: the sigma^{-1} sequence k/2, (2k-1)/3, ... closing back on k/2.
    std::optional<std::vector<Index>> cycle;
    std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Decides det M~_{k-1} = 0 by searching for a simple cycle of sigma^{-1} through k/2.
/// ZeroCertified means no such cycle exists, hence every permutation term vanishes.
/// Throws NotApplicable when M~_{k-1} is undefined.
OrbitDecision decide_mtilde_zero(Index k, std::uint64_t node_budget = kDefaultNodeBudget);

/// One line per root-to-leaf path, e.g. "4 → 5 [tri] → 3 [tri] → 6 [double] → ✕".
/// With tags = false the bracketed step labels are omitted.
std::vector<std::string> render_trace(const OrbitDecision& d, bool tags = true);

/// For a CycleFound decision: the permutation (1-based, perm[i-1] = sigma(i)) made of
/// the cycle and the identity elsewhere.
std::vector<Index> cycle_permutation(const OrbitDecision& d);

} // namespace collatzlab
