#include "collatzlab/det.hpp"

#include "collatzlab/errors.hpp"
#include "collatzlab/orbits.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace collatzlab {

namespace {

// Scalar hooks for the elimination template. All three update a in place:
//   scale:   a <- a * p / prev
//   combine: a <- (p * a - e * b) / prev
//   fresh:   returns -(e * b) / prev
template <class T>
struct ScalarOps;

template <>
struct ScalarOps<Poly> {
    static std::size_t size_of(const Poly& p) { return p.degree().value_or(0); }
    static bool is_zero(const Poly& p) { return p.is_zero(); }
    static void scale(Poly& a, const Poly& p, const Poly& prev) {
        if (p == prev) return;
        a = exact_div(a * p, prev);
    }
    static void combine(Poly& a, const Poly& p, const Poly& e, const Poly& b, const Poly& prev) {
        a = exact_div(p * a - e * b, prev);
    }
    static Poly fresh(const Poly& e, const Poly& b, const Poly& prev) { return exact_div(-(e * b), prev); }
};

template <>
struct ScalarOps<BigInt> {
    static std::size_t size_of(const BigInt& v) { return mpz_sizeinbase(v.get_mpz_t(), 2); }
    static bool is_zero(const BigInt& v) { return mpz_sgn(v.get_mpz_t()) == 0; }
    static void divide(mpz_ptr a, const BigInt& prev) {
        if (mpz_cmp_ui(prev.get_mpz_t(), 1) == 0) return;
        if (!mpz_divisible_p(a, prev.get_mpz_t())) throw NotDivisible("integer elimination: inexact division");
        mpz_divexact(a, a, prev.get_mpz_t());
    }
    static void scale(BigInt& a, const BigInt& p, const BigInt& prev) {
        if (mpz_cmp(p.get_mpz_t(), prev.get_mpz_t()) == 0) return;
        mpz_mul(a.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
        divide(a.get_mpz_t(), prev);
    }
    static void combine(BigInt& a, const BigInt& p, const BigInt& e, const BigInt& b, const BigInt& prev) {
        mpz_mul(a.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
        mpz_submul(a.get_mpz_t(), e.get_mpz_t(), b.get_mpz_t());
        divide(a.get_mpz_t(), prev);
    }
    static BigInt fresh(const BigInt& e, const BigInt& b, const BigInt& prev) {
        BigInt out;
        mpz_mul(out.get_mpz_t(), e.get_mpz_t(), b.get_mpz_t());
        mpz_neg(out.get_mpz_t(), out.get_mpz_t());
        divide(out.get_mpz_t(), prev);
        return out;
    }
};

template <class T>
T bareiss(SparseMatrix<T> input) {
    using Ops = ScalarOps<T>;
    using Row = typename SparseMatrix<T>::Row;
    const Index n = input.n;
    if (n == 0) return T(1);

    std::vector<Row> rows = std::move(input.rows);
    // pivots[s] is the pivot of step s - 1; pivots[0] = 1. Row i was last brought up
    // to date at step stamp[i], so its true Bareiss value is
    // rows[i] * pivots[current] / pivots[stamp[i]].
    std::vector<T> pivots;
    pivots.reserve(static_cast<std::size_t>(n) + 1);
    pivots.emplace_back(1);
    std::vector<Index> stamp(static_cast<std::size_t>(n), 0);
    // Unpivoted rows holding a nonzero in each column; lists stay short.
    std::vector<std::vector<Index>> col_rows(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        for (const auto& entry : rows[i]) col_rows[entry.first].push_back(i);
    }
    auto unlink = [&](Index col, Index i) {
        auto& v = col_rows[col];
        auto it = std::find(v.begin(), v.end(), i);
        *it = v.back();
        v.pop_back();
    };

    std::vector<Index> pivot_of_step(static_cast<std::size_t>(n));

    auto materialize = [&](Index i, Index step) {
        if (stamp[i] == step) return;
        for (auto& entry : rows[i]) Ops::scale(entry.second, pivots[step], pivots[stamp[i]]);
        stamp[i] = step;
    };
    auto find_col = [](Row& r, Index c) {
        return std::lower_bound(r.begin(), r.end(), c, [](const auto& e, Index col) { return e.first < col; });
    };

    std::vector<Index> cands;
    Row merged;
    for (Index c = 0; c < n; ++c) {
        const T& prev = pivots[c];
        if (col_rows[c].empty()) return T(0);
        cands = col_rows[c];
        std::sort(cands.begin(), cands.end());
        Index pivot = -1;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (Index i : cands) {
            materialize(i, c);
            const std::size_t s = Ops::size_of(find_col(rows[i], c)->second);
            if (s < best) {
                best = s;
                pivot = i;
            }
        }
        pivots.push_back(find_col(rows[pivot], c)->second);
        const T& pivot_value = pivots.back();
        const Row& prow = rows[pivot];

        for (Index i : cands) {
            if (i == pivot) continue;
            Row& r = rows[i];
            auto at_c = find_col(r, c);
            const T e = std::move(at_c->second);
            r.erase(at_c);
            unlink(c, i);
            // Merge with the pivot row: shared columns combine, columns only in r
            // rescale, columns only in the pivot row fill in.
            merged.clear();
            auto it = r.begin();
            auto pit = prow.begin();
            while (it != r.end() || pit != prow.end()) {
                if (pit != prow.end() && pit->first == c) {
                    ++pit;
                } else if (pit == prow.end() || (it != r.end() && it->first < pit->first)) {
                    Ops::scale(it->second, pivot_value, prev);
                    merged.push_back(std::move(*it));
                    ++it;
                } else if (it == r.end() || pit->first < it->first) {
                    T v = Ops::fresh(e, pit->second, prev);
                    if (!Ops::is_zero(v)) {
                        merged.emplace_back(pit->first, std::move(v));
                        col_rows[pit->first].push_back(i);
                    }
                    ++pit;
                } else {
                    Ops::combine(it->second, pivot_value, e, pit->second, prev);
                    if (Ops::is_zero(it->second)) {
                        unlink(it->first, i);
                    } else {
                        merged.push_back(std::move(*it));
                    }
                    ++it;
                    ++pit;
                }
            }
            r.swap(merged);
            stamp[i] = c + 1;
        }
        for (const auto& entry : prow) {
            if (entry.first != c) unlink(entry.first, pivot);
        }
        col_rows[c].clear();
        pivot_of_step[c] = pivot;
    }

    // pivot_of_step is a permutation; the result is det of the matrix with its rows
    // taken in that order.
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    Index transpositions = 0;
    for (Index s = 0; s < n; ++s) {
        if (seen[s]) continue;
        Index len = 0;
        for (Index j = s; !seen[j]; j = pivot_of_step[j]) {
            seen[j] = 1;
            ++len;
        }
        transpositions += len - 1;
    }
    return (transpositions % 2 == 0) ? pivots.back() : T(-pivots.back());
}

} // namespace

PolyMatrix to_poly_matrix(const CollatzMatrix& m) {
    PolyMatrix out;
    out.n = m.size();
    out.rows.resize(static_cast<std::size_t>(out.n));
    for (Index i = 1; i <= m.size(); ++i) {
        const MatrixRow& r = m.row(i);
        auto& row = out.rows[i - 1];
        if (r.one_column) row.emplace_back(*r.one_column - 1, Poly(1));
        if (r.x_column) row.emplace_back(*r.x_column - 1, Poly::x());
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return out;
}

IntMatrix to_int_matrix(const CollatzMatrix& m, const BigInt& t) {
    IntMatrix out;
    out.n = m.size();
    out.rows.resize(static_cast<std::size_t>(out.n));
    for (Index i = 1; i <= m.size(); ++i) {
        const MatrixRow& r = m.row(i);
        auto& row = out.rows[i - 1];
        if (r.one_column) row.emplace_back(*r.one_column - 1, BigInt(1));
        if (r.x_column && t != 0) row.emplace_back(*r.x_column - 1, t);
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return out;
}

Poly permutation_expansion(const PolyMatrix& m) {
    if (m.n > kBruteForceLimit) {
        throw TooLarge("permutation expansion limited to size " + std::to_string(kBruteForceLimit));
    }
    const Index n = m.n;
    Poly total;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::vector<Poly> partial(static_cast<std::size_t>(n) + 1);
    partial[0] = Poly(1);

    // Row i picks column j; a term is nonzero only through nonzero entries, so
    // zero entries are skipped. Inversions accumulate as columns are chosen.
    auto recurse = [&](auto&& self, Index i, Index inversions) -> void {
        if (i == n) {
            total += (inversions % 2 == 0) ? partial[n] : -partial[n];
            return;
        }
        for (const auto& [j, v] : m.rows[i]) {
            if (used[j]) continue;
            Index added = 0;
            for (Index c = j + 1; c < n; ++c) added += used[c];
            used[j] = 1;
            partial[i + 1] = partial[i] * v;
            self(self, i + 1, inversions + added);
            used[j] = 0;
        }
    };
    recurse(recurse, 0, 0);
    return total;
}

Poly fraction_free_det(const PolyMatrix& m) { return bareiss(m); }
BigInt fraction_free_det(const IntMatrix& m) { return bareiss(m); }
Poly fraction_free_det(PolyMatrix&& m) { return bareiss(std::move(m)); }
BigInt fraction_free_det(IntMatrix&& m) { return bareiss(std::move(m)); }

const char* to_string(Engine e) {
    switch (e) {
    case Engine::BruteForce: return "bruteforce";
    case Engine::FractionFree: return "elim";
    case Engine::CycleFormula: return "cycle";
    }
    return "?";
}

DetResult det_bruteforce(const CollatzMatrix& m) {
    return {permutation_expansion(to_poly_matrix(m)), Engine::BruteForce, m.size()};
}

DetResult det_fraction_free(const CollatzMatrix& m) {
    return {fraction_free_det(to_poly_matrix(m)), Engine::FractionFree, m.size()};
}

DetResult det_cycle_formula(Index k) {
    if (k < 2) throw InvalidSize("det_cycle_formula needs k >= 2");
    Poly det(1);
    for (const auto& c : cycles(k)) {
        const auto len = c.size();
        const BigInt sign = (len % 2 == 1) ? 1 : -1;
        det *= Poly(1) + Poly::monomial(sign, len);
    }
    return {det, Engine::CycleFormula, k};
}

BigInt det_at(const CollatzMatrix& m, const BigInt& t) { return fraction_free_det(to_int_matrix(m, t)); }

bool laplace_check(Index k) {
    const Index r = special_row(k);  // throws NotApplicable
    const Poly dk = det_fraction_free(build_collatz(k)).value;
    // M_1 = (1) sits below the matrix builder's k >= 2 domain.
    const Poly dk1 = (k - 1 >= 2) ? det_fraction_free(build_collatz(k - 1)).value : Poly(1);
    const Poly dprime = det_fraction_free(build_m_prime(k)).value;
    const Poly sign = ((k + r) % 2 == 0) ? Poly(1) : Poly(-1);
    return dk == dk1 + Poly::x() * sign * dprime;
}

const Poly& one_minus_x_squared() {
    static const Poly p{1, 0, -1};
    return p;
}

} // namespace collatzlab
