#include "collatzlab/sweep.hpp"

#include "collatzlab/errors.hpp"

#include <omp.h>

#include <random>

namespace collatzlab {

const char* to_string(SweepEngine e) {
    switch (e) {
    case SweepEngine::BruteForce: return "bruteforce";
    case SweepEngine::Elimination: return "elim";
    case SweepEngine::Cycle: return "cycle";
    case SweepEngine::Both: return "both";
    }
    return "?";
}

std::optional<SweepEngine> parse_sweep_engine(const std::string& s) {
    if (s == "bruteforce") return SweepEngine::BruteForce;
    if (s == "elim") return SweepEngine::Elimination;
    if (s == "cycle") return SweepEngine::Cycle;
    if (s == "both") return SweepEngine::Both;
    return std::nullopt;
}

namespace {

std::mt19937_64 rng_for(Index k, std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(k), stream};
    return std::mt19937_64(seq);
}

} // namespace

bool sampled_for_eval(Index k, double rate, std::uint64_t seed) {
    if (rate <= 0.0) return false;
    if (rate >= 1.0) return true;
    auto rng = rng_for(k, seed, 1);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate;
}

std::vector<BigInt> eval_points_for(Index k, int count, std::uint64_t seed) {
    auto rng = rng_for(k, seed, 2);
    std::uniform_int_distribution<long> mag(2, 64);
    std::bernoulli_distribution neg(0.5);
    std::vector<BigInt> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const long t = mag(rng);
        out.emplace_back(neg(rng) ? -t : t);
    }
    return out;
}

VerifyItem verify_one(Index k, const SweepOptions& opts) {
    VerifyItem item;
    item.k = k;
    try {
        switch (opts.engine) {
        case SweepEngine::BruteForce:
            item.det = det_bruteforce(build_collatz(k)).value;
            item.engines = "bruteforce";
            break;
        case SweepEngine::Elimination:
            item.det = det_fraction_free(build_collatz(k)).value;
            item.engines = "elim";
            break;
        case SweepEngine::Cycle:
        case SweepEngine::Both:
            item.det = det_cycle_formula(k).value;
            item.engines = "cycle";
            if (opts.engine == SweepEngine::Both || k <= opts.cross_check_below) {
                item.engines += "+elim";
                item.engines_agree = det_fraction_free(build_collatz(k)).value == item.det;
            }
            break;
        }
        if (sampled_for_eval(k, opts.eval_sample_rate, opts.seed)) {
            const CollatzMatrix m = build_collatz(k);
            for (const BigInt& t : eval_points_for(k, opts.eval_points, opts.seed)) {
                ++item.eval_checks;
                if (eval_int(item.det, t) != det_at(m, t)) item.eval_agree = false;
            }
        }
        item.pass = item.engines_agree && item.eval_agree && item.det == one_minus_x_squared();
    } catch (const std::exception& e) {
        item.error = e.what();
        item.pass = false;
    }
    return item;
}

std::vector<VerifyItem> verify_range_serial(Index k_min, Index k_max, const SweepOptions& opts) {
    std::vector<VerifyItem> out;
    for (Index k = k_min; k <= k_max; ++k) out.push_back(verify_one(k, opts));
    return out;
}

std::vector<VerifyItem> verify_range_parallel(Index k_min, Index k_max, const SweepOptions& opts) {
    if (k_max < k_min) return {};
    const Index n = k_max - k_min + 1;
    std::vector<VerifyItem> out(static_cast<std::size_t>(n));
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = verify_one(k_min + i, opts);
    }
    return out;
}

std::vector<VerifyItem> verify_list_serial(std::span<const Index> ks, const SweepOptions& opts) {
    std::vector<VerifyItem> out;
    out.reserve(ks.size());
    for (Index k : ks) out.push_back(verify_one(k, opts));
    return out;
}

std::vector<VerifyItem> verify_list_parallel(std::span<const Index> ks, const SweepOptions& opts) {
    std::vector<VerifyItem> out(ks.size());
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = verify_one(ks[static_cast<std::size_t>(i)], opts);
    }
    return out;
}

MtildeItem check_mtilde(Index k, const MtildeOptions& opts) {
    MtildeItem item;
    item.k = k;
    try {
        const OrbitDecision d = decide_mtilde_zero(k, opts.node_budget);
        item.status = d.status;
        item.nodes = d.nodes;
        item.cycle = d.cycle;
        if (opts.keep_trace) item.trace = render_trace(d, opts.trace_tags);
        // M~ itself is only built when a determinant or a permutation check needs it.
        const bool exact = k <= opts.det_limit;
        const bool evaluate = !exact && opts.eval_points > 0 && d.status == OrbitStatus::ZeroCertified;
        if (!exact && !evaluate && d.status != OrbitStatus::CycleFound) return item;
        const CollatzMatrix tilde = build_m_tilde(k);
        if (exact) item.det = det_fraction_free(tilde).value;
        if (d.status == OrbitStatus::ZeroCertified) {
            if (item.det && !item.det->is_zero()) item.consistent = false;
            if (evaluate) {
                for (const BigInt& t : eval_points_for(k, opts.eval_points, opts.seed)) {
                    ++item.eval_checks;
                    if (det_at(tilde, t) != 0) item.consistent = false;
                }
            }
        } else if (d.status == OrbitStatus::CycleFound) {
            const auto perm = cycle_permutation(d);
            for (Index i = 1; i <= tilde.size(); ++i) {
                if (tilde.at(i, perm[i - 1]) == Cell::Zero) item.consistent = false;
            }
        }
    } catch (const std::exception& e) {
        item.error = e.what();
        item.consistent = false;
    }
    return item;
}

std::vector<MtildeItem> mtilde_sweep_serial(std::span<const Index> ks, const MtildeOptions& opts) {
    std::vector<MtildeItem> out;
    out.reserve(ks.size());
    for (Index k : ks) out.push_back(check_mtilde(k, opts));
    return out;
}

std::vector<MtildeItem> mtilde_sweep_parallel(std::span<const Index> ks, const MtildeOptions& opts) {
    std::vector<MtildeItem> out(ks.size());
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = check_mtilde(ks[static_cast<std::size_t>(i)], opts);
    }
    return out;
}

} // namespace collatzlab
