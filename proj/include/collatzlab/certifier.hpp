#pragma once

#include "collatzlab/matrix.hpp"
#include "collatzlab/orbits.hpp"
#include "collatzlab/poly.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace collatzlab {

/// a + b*l in the current class parameter l.
struct AffineValue {
    BigInt a;
    BigInt b;

    [[nodiscard]] BigInt at(const BigInt& l) const { return a + b * l; }
    /// Rewrites in l' where l = residue + modulus * l'.
    [[nodiscard]] AffineValue substitute(const BigInt& residue, const BigInt& modulus) const {
        return {a + b * residue, b * modulus};
    }
    [[nodiscard]] std::string to_string(const std::string& param = "l") const;

    friend bool operator==(const AffineValue&, const AffineValue&) = default;
};

/// Records l_old = residue + modulus * l_new.
struct Substitution {
    int residue = 0;
    int modulus = 3;

    friend bool operator==(const Substitution&, const Substitution&) = default;
    friend auto operator<=>(const Substitution&, const Substitution&) = default;
};

/// A residue class of the family, expressed in its own parameter.
struct ClassContext {
    AffineValue k;
    AffineValue half_k;
    BigInt l_min;
    std::vector<Substitution> substitutions;

    /// Family k = a0 + m0*l restricted to l >= l_min.
    static ClassContext family(const BigInt& a0, const BigInt& m0, const BigInt& l_min);

    [[nodiscard]] ClassContext refine(int residue, int modulus = 3) const;
    /// Maps a value of the current parameter back to the family parameter.
    [[nodiscard]] BigInt original_param(const BigInt& current) const;
    [[nodiscard]] int depth() const { return static_cast<int>(substitutions.size()); }
};

enum class StepVerdict { Admissible, Rejected, ThresholdSplit, ResidueSplit };
const char* to_string(StepVerdict v);

struct DoubleStep {
    StepVerdict verdict;
    AffineValue candidate;
    /// ThresholdSplit: first parameter value where the verdict becomes tail_verdict.
    std::optional<BigInt> threshold;
    StepVerdict tail_verdict = StepVerdict::Rejected;
};

struct TriStep {
    StepVerdict verdict;
    /// 2v - 1 as an affine form in the current parameter.
    AffineValue numerator;
    /// Admissible: (2v-1)/3. ResidueSplit: (2v-1)/3 in the refined parameter.
    std::optional<AffineValue> candidate;
    int residue = -1;
};

enum class TargetVerdict { Clear, TargetHit, ExceptionalL };

struct TargetCheck {
    TargetVerdict verdict;
    std::optional<BigInt> exceptional;  // in the current parameter
};

/// 2v against the bound 2v < k over the whole class.
DoubleStep step_double(const AffineValue& v, const ClassContext& ctx);
/// (2v-1)/3 and the residue of l (mod 3) that makes it integral.
TriStep step_tri(const AffineValue& v, const ClassContext& ctx);
/// Whether v coincides with k/2 identically or at a single parameter value.
TargetCheck target_check(const AffineValue& v, const ClassContext& ctx);

struct CertifierConfig {
    int max_depth = 32;
    std::int64_t max_modulus = 354294;  // 3^8 * 54
    BigInt l_min = 1;
    std::uint64_t max_nodes = 1'000'000;
    /// Largest finite prefix of a threshold split that is handed to concrete checks.
    std::int64_t max_concrete = 4096;
    std::uint64_t concrete_node_budget = kDefaultNodeBudget;
};

enum class Applied { Root, Double, Tri };
enum class NodeOutcome { DeadEnd, Continue, Split, TargetHit, BudgetExceeded, Revisit, Unexplored };
const char* to_string(Applied a);
const char* to_string(NodeOutcome o);

struct RejectedStep {
    Applied applied;
    /// Double: the out-of-range candidate. Tri: the numerator 2v - 1 that 3 does not divide.
    AffineValue value;
};

struct CertificateNode {
    AffineValue value;
    Applied applied = Applied::Root;
    std::vector<Substitution> substitutions;
    int depth = 0;
    NodeOutcome outcome = NodeOutcome::DeadEnd;
    /// Split: residues of the next parameter for which the tri step is integral.
    std::vector<int> live_residues;
    std::vector<int> dead_residues;
    /// Family-parameter values handed to the concrete decision procedure.
    std::vector<BigInt> exceptional_l;
    std::vector<RejectedStep> rejected;
    std::vector<CertificateNode> children;
};

enum class ClassStatus { Certified, Undecided, CycleCandidate };
const char* to_string(ClassStatus s);

struct ConcreteCheck {
    BigInt l;  // family parameter
    Index k = 0;
    OrbitStatus status = OrbitStatus::Inconclusive;
};

struct ClassSummary {
    std::vector<Substitution> substitutions;
    AffineValue k;
    BigInt param_min;
    ClassStatus status = ClassStatus::Undecided;
    std::string reason;
    std::vector<ConcreteCheck> concrete;

    /// E.g. "l=2+3l1, l1=3l2, 3|(l2-1)"; "all l >= 1" for the unsplit family.
    [[nodiscard]] std::string description(const BigInt& family_l_min) const;
};

struct Certificate {
    BigInt a0;
    BigInt m0;
    CertifierConfig config;
    CertificateNode root;
    std::vector<ClassSummary> summary;  // sorted by substitution chain

    [[nodiscard]] bool fully_certified() const;
    [[nodiscard]] bool has_cycle_candidate() const;
};

/// Explores the inverse-orbit case tree of k = a0 + m0*l symbolically, refining
/// l by residues mod 3 whenever a tri step is integral on one residue only.
/// Throws InvalidFamily unless a0, m0 are even and 3 divides 2*a0 - 1 and m0.
Certificate certify_family(const BigInt& a0, const BigInt& m0, const CertifierConfig& config = {});

/// Concrete k values of the n smallest members of a class.
std::vector<Index> class_members(const Certificate& cert, const ClassSummary& cls, std::size_t n);

} // namespace collatzlab
