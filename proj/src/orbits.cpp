#include "collatzlab/orbits.hpp"

#include "collatzlab/errors.hpp"

#include <algorithm>
#include <unordered_set>
#include <cstdint>
#include <sstream>

namespace collatzlab {

TruncatedCollatzMap::TruncatedCollatzMap(Index k) : k_(k) {
    if (k < 1) throw InvalidSize("truncated Collatz map needs k >= 1");
}

std::optional<Index> TruncatedCollatzMap::successor(Index i) const {
    if (i < 1 || i > k_) throw OutOfRange("point " + std::to_string(i) + " outside 1..k");
    const Index next = (i % 2 == 0) ? i / 2 : (3 * i + 1) / 2;
    if (next > k_) return std::nullopt;
    return next;
}

std::vector<std::vector<Index>> cycles(Index k) {
    if (k < 2) throw InvalidSize("cycles needs k >= 2");
    // stamp[i] = id of the walk that first reached i; 0 = unvisited.
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(k) + 1, 0);
    std::vector<std::vector<Index>> out;
    std::uint32_t walk = 0;
    for (Index start = 1; start <= k; ++start) {
        if (stamp[start] != 0) continue;
        ++walk;
        Index i = start;
        while (true) {
            stamp[i] = walk;
            const Index next = (i % 2 == 0) ? i / 2 : (3 * i + 1) / 2;
            if (next > k) break;
            if (stamp[next] == walk) {
                std::vector<Index> cyc{next};
                for (Index j = (next % 2 == 0) ? next / 2 : (3 * next + 1) / 2; j != next;
                     j = (j % 2 == 0) ? j / 2 : (3 * j + 1) / 2) {
                    cyc.push_back(j);
                }
                std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
                out.push_back(std::move(cyc));
                break;
            }
            if (stamp[next] != 0) break;
            i = next;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

std::vector<Index> inverse_preimages(Index v, Index k) {
    if (v < 1 || v > k - 1) {
        throw OutOfRange("inverse_preimages: v = " + std::to_string(v) + " outside 1.." +
                         std::to_string(k - 1));
    }
    std::vector<Index> out;
    if ((2 * v - 1) % 3 == 0 && (2 * v - 1) / 3 >= 1) out.push_back((2 * v - 1) / 3);
    if (2 * v <= k - 1) out.push_back(2 * v);
    return out;
}

const char* to_string(OrbitStatus s) {
    switch (s) {
    case OrbitStatus::ZeroCertified: return "ZeroCertified";
    case OrbitStatus::CycleFound: return "CycleFound";
    case OrbitStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(InverseStep s) {
    switch (s) {
    case InverseStep::Forced: return "forced";
    case InverseStep::Double: return "double";
    case InverseStep::Tri: return "tri";
    }
    return "?";
}

OrbitDecision decide_mtilde_zero(Index k, std::uint64_t node_budget) {
    if (!m_tilde_applicable(k)) {
        throw NotApplicable("M~_{k-1} is not defined for k = " + std::to_string(k));
    }
    const Index root = k / 2;
    const Index forced = (2 * k - 1) / 3;

    OrbitDecision d;
    d.k = k;
    d.trace.push_back({root, InverseStep::Forced, 0, StepFate::Expanded});
    d.nodes = 1;

    if (forced == root) {
        // k = 2: the special row carries its x on the diagonal.
        d.trace.push_back({forced, InverseStep::Forced, 1, StepFate::ClosesCycle});
        d.status = OrbitStatus::CycleFound;
        d.cycle = std::vector<Index>{root};
        return d;
    }

    struct Frame {
        Index value;
        std::vector<Index> pending;
    };
    // Paths stay short next to k, so a set beats a k-sized table.
    std::unordered_set<Index> on_path{root};
    std::vector<Frame> stack;

    auto enter = [&](Index v, InverseStep via) {
        d.trace.push_back({v, via, static_cast<int>(stack.size()) + 1, StepFate::Expanded});
        ++d.nodes;
        on_path.insert(v);
        auto pre = inverse_preimages(v, k);
        std::reverse(pre.begin(), pre.end());  // pop_back yields ascending order
        stack.push_back({v, std::move(pre)});
    };

    enter(forced, InverseStep::Forced);
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.pending.empty()) {
            // Leaf if nothing was pushed after it.
            if (d.trace.back().value == top.value && d.trace.back().fate == StepFate::Expanded &&
                static_cast<std::size_t>(d.trace.back().depth) == stack.size()) {
                d.trace.back().fate = StepFate::DeadEnd;
            }
            on_path.erase(top.value);
            stack.pop_back();
            continue;
        }
        const Index c = top.pending.back();
        top.pending.pop_back();
        const InverseStep via = (c == 2 * top.value) ? InverseStep::Double : InverseStep::Tri;
        const int depth = static_cast<int>(stack.size()) + 1;
        if (c == root) {
            d.trace.push_back({c, via, depth, StepFate::ClosesCycle});
            std::vector<Index> cyc{root};
            for (const auto& f : stack) cyc.push_back(f.value);
            d.cycle = std::move(cyc);
            d.status = OrbitStatus::CycleFound;
            return d;
        }
        if (on_path.contains(c)) {
            d.trace.push_back({c, via, depth, StepFate::Revisit});
            continue;
        }
        if (d.nodes >= node_budget) {
            d.trace.push_back({c, via, depth, StepFate::Budget});
            d.status = OrbitStatus::Inconclusive;
            return d;
        }
        enter(c, via);
    }
    d.status = OrbitStatus::ZeroCertified;
    return d;
}

std::vector<std::string> render_trace(const OrbitDecision& d, bool tags) {
    std::vector<std::string> lines;
    std::vector<const TraceStep*> path;
    auto emit = [&](StepFate fate) {
        std::ostringstream out;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) out << " → ";
            out << path[i]->value;
            if (tags && i > 0) {
                // The forced step is the tri-map applied to k itself.
                const InverseStep via = path[i]->via == InverseStep::Forced ? InverseStep::Tri : path[i]->via;
                out << " [" << to_string(via) << ']';
            }
        }
        switch (fate) {
        case StepFate::DeadEnd: out << " → ✕"; break;
        case StepFate::ClosesCycle: out << " ↺"; break;
        case StepFate::Revisit: out << " (revisit)"; break;
        case StepFate::Budget: out << " …"; break;
        case StepFate::Expanded: break;
        }
        lines.push_back(out.str());
    };
    for (const auto& step : d.trace) {
        while (path.size() > static_cast<std::size_t>(step.depth)) path.pop_back();
        path.push_back(&step);
        if (step.fate != StepFate::Expanded) emit(step.fate);
    }
    return lines;
}

std::vector<Index> cycle_permutation(const OrbitDecision& d) {
    if (!d.cycle) throw Error("cycle_permutation: decision has no cycle");
    const Index n = d.k - 1;
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 1; i <= n; ++i) perm[i - 1] = i;
    const auto& c = *d.cycle;
    // c lists sigma^{-1} iterates, so sigma(c[j+1]) = c[j].
    for (std::size_t j = 0; j < c.size(); ++j) {
        const Index row = c[(j + 1) % c.size()];
        perm[row - 1] = c[j];
    }
    return perm;
}

} // namespace collatzlab
