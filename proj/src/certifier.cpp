#include "collatzlab/certifier.hpp"

#include "collatzlab/errors.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace collatzlab {

namespace {

BigInt mod3(const BigInt& v) {
    BigInt r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), 3);
    return r;
}

BigInt ceil_div(const BigInt& num, const BigInt& den) {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

std::string param_name(int depth) { return depth == 0 ? "l" : "l" + std::to_string(depth); }

} // namespace

std::string AffineValue::to_string(const std::string& param) const {
    std::ostringstream out;
    if (b == 0) {
        out << a.get_str();
    } else if (a == 0) {
        out << (b == 1 ? "" : b.get_str()) << param;
    } else {
        out << a.get_str() << (b < 0 ? "-" : "+") << (abs(b) == 1 ? "" : BigInt(abs(b)).get_str()) << param;
    }
    return out.str();
}

ClassContext ClassContext::family(const BigInt& a0, const BigInt& m0, const BigInt& l_min) {
    ClassContext ctx;
    ctx.k = {a0, m0};
    ctx.half_k = {a0 / 2, m0 / 2};
    ctx.l_min = l_min;
    return ctx;
}

ClassContext ClassContext::refine(int residue, int modulus) const {
    ClassContext out;
    out.k = k.substitute(residue, modulus);
    out.half_k = half_k.substitute(residue, modulus);
    out.l_min = ceil_div(l_min - residue, modulus);
    out.substitutions = substitutions;
    out.substitutions.push_back({residue, modulus});
    return out;
}

BigInt ClassContext::original_param(const BigInt& current) const {
    BigInt l = current;
    for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it) {
        l = BigInt(it->residue) + BigInt(it->modulus) * l;
    }
    return l;
}

const char* to_string(StepVerdict v) {
    switch (v) {
    case StepVerdict::Admissible: return "admissible";
    case StepVerdict::Rejected: return "rejected";
    case StepVerdict::ThresholdSplit: return "threshold_split";
    case StepVerdict::ResidueSplit: return "residue_split";
    }
    return "?";
}

DoubleStep step_double(const AffineValue& v, const ClassContext& ctx) {
    DoubleStep out{StepVerdict::Rejected, {2 * v.a, 2 * v.b}, std::nullopt, StepVerdict::Rejected};
    // Admissible where gap(l) = k(l) - 2v(l) >= 1.
    const BigInt gap0 = ctx.k.at(ctx.l_min) - out.candidate.at(ctx.l_min);
    const BigInt slope = ctx.k.b - out.candidate.b;
    if (gap0 >= 1 && slope >= 0) {
        out.verdict = StepVerdict::Admissible;
    } else if (gap0 <= 0 && slope <= 0) {
        out.verdict = StepVerdict::Rejected;
    } else if (gap0 >= 1) {
        out.verdict = StepVerdict::ThresholdSplit;
        out.threshold = ctx.l_min + ceil_div(gap0, -slope);
        out.tail_verdict = StepVerdict::Rejected;
    } else {
        out.verdict = StepVerdict::ThresholdSplit;
        out.threshold = ctx.l_min + ceil_div(1 - gap0, slope);
        out.tail_verdict = StepVerdict::Admissible;
    }
    return out;
}

TriStep step_tri(const AffineValue& v, const ClassContext& /*ctx*/) {
    TriStep out{StepVerdict::Rejected, {2 * v.a - 1, 2 * v.b}, std::nullopt, -1};
    const AffineValue& n = out.numerator;
    if (mod3(n.b) == 0) {
        if (mod3(n.a) == 0) {
            out.verdict = StepVerdict::Admissible;
            out.candidate = AffineValue{n.a / 3, n.b / 3};
        }
        return out;
    }
    // n.b is a unit mod 3, so exactly one residue r of l makes n.a + n.b*r vanish.
    for (int r = 0; r < 3; ++r) {
        if (mod3(n.a + n.b * r) == 0) {
            out.verdict = StepVerdict::ResidueSplit;
            out.residue = r;
            const AffineValue sub = n.substitute(r, 3);
            out.candidate = AffineValue{sub.a / 3, sub.b / 3};
            break;
        }
    }
    return out;
}

TargetCheck target_check(const AffineValue& v, const ClassContext& ctx) {
    if (v == ctx.half_k) return {TargetVerdict::TargetHit, std::nullopt};
    if (v.b == ctx.half_k.b) return {TargetVerdict::Clear, std::nullopt};
    const BigInt num = ctx.half_k.a - v.a;
    const BigInt den = v.b - ctx.half_k.b;
    if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) return {TargetVerdict::Clear, std::nullopt};
    const BigInt l = num / den;
    if (l < ctx.l_min) return {TargetVerdict::Clear, std::nullopt};
    return {TargetVerdict::ExceptionalL, l};
}

const char* to_string(Applied a) {
    switch (a) {
    case Applied::Root: return "root";
    case Applied::Double: return "double";
    case Applied::Tri: return "tri";
    }
    return "?";
}

const char* to_string(NodeOutcome o) {
    switch (o) {
    case NodeOutcome::DeadEnd: return "dead_end";
    case NodeOutcome::Continue: return "continue";
    case NodeOutcome::Split: return "split";
    case NodeOutcome::TargetHit: return "target_hit";
    case NodeOutcome::BudgetExceeded: return "budget_exceeded";
    case NodeOutcome::Revisit: return "revisit";
    case NodeOutcome::Unexplored: return "unexplored";
    }
    return "?";
}

const char* to_string(ClassStatus s) {
    switch (s) {
    case ClassStatus::Certified: return "certified";
    case ClassStatus::Undecided: return "undecided";
    case ClassStatus::CycleCandidate: return "cycle-candidate";
    }
    return "?";
}

std::string ClassSummary::description(const BigInt& family_l_min) const {
    if (substitutions.empty()) return "all l >= " + family_l_min.get_str();
    std::ostringstream out;
    const int n = static_cast<int>(substitutions.size());
    for (int i = 0; i < n; ++i) {
        const auto& s = substitutions[i];
        const std::string outer = param_name(i);
        if (i > 0) out << ", ";
        if (i + 1 < n) {
            out << outer << '=';
            if (s.residue != 0) out << s.residue << '+';
            out << s.modulus << param_name(i + 1);
        } else if (s.residue == 0) {
            out << s.modulus << '|' << outer;
        } else {
            out << s.modulus << "|(" << outer << '-' << s.residue << ')';
        }
    }
    return out.str();
}

bool Certificate::fully_certified() const {
    return std::all_of(summary.begin(), summary.end(),
                       [](const ClassSummary& c) { return c.status == ClassStatus::Certified; });
}

bool Certificate::has_cycle_candidate() const {
    return std::any_of(summary.begin(), summary.end(),
                       [](const ClassSummary& c) { return c.status == ClassStatus::CycleCandidate; });
}

namespace {

struct WorkNode {
    CertificateNode data;  // children left empty until assembly
    std::ptrdiff_t parent = -1;
    std::vector<std::size_t> kids;
};

struct Pending {
    std::size_t node;
    int residue;
    AffineValue child;  // in the refined parameter
};

class Explorer {
public:
    Explorer(BigInt a0, BigInt m0, const CertifierConfig& cfg) : a0_(std::move(a0)), m0_(std::move(m0)), cfg_(cfg) {}

    Certificate run() {
        const ClassContext ctx = ClassContext::family(a0_, m0_, cfg_.l_min);
        WorkNode root;
        root.data.value = ctx.half_k;
        root.data.applied = Applied::Root;
        root.data.outcome = NodeOutcome::Continue;
        nodes_.push_back(std::move(root));
        ++created_;

        const AffineValue forced{(2 * a0_ - 1) / 3, 2 * m0_ / 3};
        explore(ctx, {{0, 0, forced}}, Applied::Tri);

        Certificate cert;
        cert.a0 = a0_;
        cert.m0 = m0_;
        cert.config = cfg_;
        cert.root = assemble(0);
        attach_concrete();
        std::sort(summary_.begin(), summary_.end(),
                  [](const ClassSummary& x, const ClassSummary& y) { return x.substitutions < y.substitutions; });
        cert.summary = std::move(summary_);
        return cert;
    }

private:
    // Re-expresses a node's value in the parameter of ctx.
    AffineValue in_context(const WorkNode& n, const ClassContext& ctx) const {
        AffineValue v = n.data.value;
        for (std::size_t i = n.data.substitutions.size(); i < ctx.substitutions.size(); ++i) {
            v = v.substitute(ctx.substitutions[i].residue, ctx.substitutions[i].modulus);
        }
        return v;
    }

    bool revisits_ancestor(std::size_t parent, const AffineValue& v, const ClassContext& ctx) const {
        for (std::ptrdiff_t a = static_cast<std::ptrdiff_t>(parent); a >= 0; a = nodes_[a].parent) {
            if (in_context(nodes_[a], ctx) == v) return true;
        }
        return false;
    }

    void delegate(const ClassContext& ctx, const BigInt& param, std::size_t node) {
        const BigInt l = ctx.original_param(param);
        nodes_[node].data.exceptional_l.push_back(l);
        concrete_l_.push_back(l);
    }

    void explore(const ClassContext& ctx, const std::vector<Pending>& seeds, Applied seed_step) {
        std::deque<std::size_t> queue;
        std::vector<Pending> pending;
        bool target_hit = false;
        bool budget_hit = false;
        std::string budget_reason;

        auto add_child = [&](std::size_t parent, const AffineValue& value, Applied applied) {
            WorkNode child;
            child.data.value = value;
            child.data.applied = applied;
            child.data.substitutions = ctx.substitutions;
            child.data.depth = nodes_[parent].data.depth + 1;
            child.data.outcome = NodeOutcome::Continue;
            child.parent = static_cast<std::ptrdiff_t>(parent);
            const std::size_t id = nodes_.size();
            nodes_.push_back(std::move(child));
            nodes_[parent].kids.push_back(id);
            ++created_;

            const TargetCheck tc = target_check(value, ctx);
            if (tc.verdict == TargetVerdict::TargetHit) {
                nodes_[id].data.outcome = NodeOutcome::TargetHit;
                target_hit = true;
                return;
            }
            if (tc.verdict == TargetVerdict::ExceptionalL) delegate(ctx, *tc.exceptional, id);
            if (revisits_ancestor(parent, value, ctx)) {
                nodes_[id].data.outcome = NodeOutcome::Revisit;
                return;
            }
            queue.push_back(id);
        };

        for (const auto& s : seeds) add_child(s.node, s.child, seed_step);

        while (!queue.empty()) {
            const std::size_t id = queue.front();
            queue.pop_front();
            if (nodes_[id].data.depth >= cfg_.max_depth || created_ >= cfg_.max_nodes) {
                nodes_[id].data.outcome = NodeOutcome::BudgetExceeded;
                budget_hit = true;
                budget_reason = nodes_[id].data.depth >= cfg_.max_depth ? "max_depth reached" : "max_nodes reached";
                continue;
            }
            const AffineValue v = nodes_[id].data.value;
            bool split = false;

            DoubleStep ds = step_double(v, ctx);
            StepVerdict dv = ds.verdict;
            if (dv == StepVerdict::ThresholdSplit) {
                const BigInt count = *ds.threshold - ctx.l_min;
                if (count > cfg_.max_concrete) {
                    budget_hit = true;
                    budget_reason = "threshold prefix exceeds max_concrete";
                } else {
                    for (BigInt p = ctx.l_min; p < *ds.threshold; ++p) delegate(ctx, p, id);
                }
                dv = ds.tail_verdict;
            }
            if (dv == StepVerdict::Admissible) {
                add_child(id, ds.candidate, Applied::Double);
            } else {
                nodes_[id].data.rejected.push_back({Applied::Double, ds.candidate});
            }

            const TriStep ts = step_tri(v, ctx);
            if (ts.verdict == StepVerdict::Admissible) {
                add_child(id, *ts.candidate, Applied::Tri);
            } else if (ts.verdict == StepVerdict::ResidueSplit) {
                pending.push_back({id, ts.residue, *ts.candidate});
                nodes_[id].data.live_residues = {ts.residue};
                for (int r = 0; r < 3; ++r) {
                    if (r != ts.residue) nodes_[id].data.dead_residues.push_back(r);
                }
                split = true;
            } else {
                nodes_[id].data.rejected.push_back({Applied::Tri, ts.numerator});
            }

            // A target hit or revisit child has already set its own outcome.
            if (split) {
                nodes_[id].data.outcome = NodeOutcome::Split;
            } else if (nodes_[id].kids.empty()) {
                nodes_[id].data.outcome = NodeOutcome::DeadEnd;
            } else {
                nodes_[id].data.outcome = NodeOutcome::Continue;
            }
        }

        auto close_pending = [&] {
            for (const auto& p : pending) nodes_[p.node].data.outcome = NodeOutcome::Unexplored;
        };

        if (target_hit) {
            close_pending();
            record(ctx, ClassStatus::CycleCandidate, "inverse orbit returns to k/2 identically");
            return;
        }
        if (budget_hit) {
            close_pending();
            record(ctx, ClassStatus::Undecided, budget_reason);
            return;
        }
        if (pending.empty()) {
            record(ctx, ClassStatus::Certified, "every branch dies");
            return;
        }
        if (BigInt(3) * ctx.k.b > cfg_.max_modulus) {
            close_pending();
            record(ctx, ClassStatus::Undecided, "residue split beyond max_modulus");
            return;
        }
        for (int r = 0; r < 3; ++r) {
            const ClassContext sub = ctx.refine(r);
            std::vector<Pending> seeds;
            for (const auto& p : pending) {
                if (p.residue == r) seeds.push_back(p);
            }
            if (seeds.empty()) {
                record(sub, ClassStatus::Certified, "every branch dies");
            } else {
                explore(sub, seeds, Applied::Tri);
            }
        }
    }

    void record(const ClassContext& ctx, ClassStatus status, std::string reason) {
        ClassSummary s;
        s.substitutions = ctx.substitutions;
        s.k = ctx.k;
        s.param_min = ctx.l_min;
        s.status = status;
        s.reason = std::move(reason);
        summary_.push_back(std::move(s));
    }

    void attach_concrete() {
        for (const BigInt& l : concrete_l_) {
            ConcreteCheck check;
            check.l = l;
            const BigInt k = a0_ + m0_ * l;
            if (!k.fits_slong_p()) {
                check.status = OrbitStatus::Inconclusive;
            } else {
                check.k = k.get_si();
                check.status = decide_mtilde_zero(check.k, cfg_.concrete_node_budget).status;
            }
            for (auto& cls : summary_) {
                // l = R + M * l_n with l_n >= param_min
                BigInt R = 0;
                BigInt M = 1;
                for (const auto& s : cls.substitutions) {
                    R += M * s.residue;
                    M *= s.modulus;
                }
                BigInt diff = l - R;
                if (!mpz_divisible_p(diff.get_mpz_t(), M.get_mpz_t()) || diff / M < cls.param_min) continue;
                if (std::any_of(cls.concrete.begin(), cls.concrete.end(),
                                [&](const ConcreteCheck& c) { return c.l == l; })) {
                    break;
                }
                cls.concrete.push_back(check);
                if (check.status == OrbitStatus::CycleFound) {
                    cls.status = ClassStatus::CycleCandidate;
                    cls.reason = "concrete cycle at l = " + l.get_str();
                } else if (check.status == OrbitStatus::Inconclusive && cls.status == ClassStatus::Certified) {
                    cls.status = ClassStatus::Undecided;
                    cls.reason = "concrete check inconclusive at l = " + l.get_str();
                }
                break;
            }
        }
        for (auto& cls : summary_) {
            std::sort(cls.concrete.begin(), cls.concrete.end(),
                      [](const ConcreteCheck& x, const ConcreteCheck& y) { return x.l < y.l; });
        }
    }

    CertificateNode assemble(std::size_t id) const {
        CertificateNode out = nodes_[id].data;
        for (std::size_t kid : nodes_[id].kids) out.children.push_back(assemble(kid));
        return out;
    }

    BigInt a0_;
    BigInt m0_;
    CertifierConfig cfg_;
    std::vector<WorkNode> nodes_;
    std::vector<ClassSummary> summary_;
    std::vector<BigInt> concrete_l_;
    std::uint64_t created_ = 0;
};

} // namespace

Certificate certify_family(const BigInt& a0, const BigInt& m0, const CertifierConfig& config) {
    const auto fail = [&](const std::string& why) {
        throw InvalidFamily("family k = " + a0.get_str() + " + " + m0.get_str() + "l: " + why);
    };
    if (m0 <= 0) fail("modulus must be positive");
    if (config.l_min < 0) fail("parameter lower bound must be nonnegative");
    if (a0 % 2 != 0 || m0 % 2 != 0) fail("k must be even for every l");
    if (mod3(2 * a0 - 1) != 0 || mod3(m0) != 0) fail("(2k-1)/3 must be integral for every l");
    if (a0 + m0 * config.l_min < 2) fail("k must be at least 2 on the class");
    return Explorer(a0, m0, config).run();
}

std::vector<Index> class_members(const Certificate& cert, const ClassSummary& cls, std::size_t n) {
    BigInt R = 0;
    BigInt M = 1;
    for (const auto& s : cls.substitutions) {
        R += M * s.residue;
        M *= s.modulus;
    }
    std::vector<Index> out;
    for (BigInt p = cls.param_min; out.size() < n; ++p) {
        const BigInt k = cert.a0 + cert.m0 * (R + M * p);
        if (!k.fits_slong_p()) break;
        out.push_back(k.get_si());
    }
    return out;
}

} // namespace collatzlab
