#pragma once

// Reference implementations used only by the tests. They share no code with the
// library beyond Poly/BigInt arithmetic and are deliberately naive.

#include "collatzlab/matrix.hpp"
#include "collatzlab/poly.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using collatzlab::BigInt;
using collatzlab::Index;
using collatzlab::Poly;

template <class T>
using Dense = std::vector<std::vector<T>>;

inline int inversions(const std::vector<int>& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j] ? 1 : 0;
    }
    return inv;
}

/// Leibniz formula over every permutation.
template <class T>
T leibniz(const Dense<T>& m) {
    const int n = static_cast<int>(m.size());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    T total = T(0);
    do {
        T term = T(1);
        for (int i = 0; i < n && !(term == T(0)); ++i) term = term * m[i][p[i]];
        if (inversions(p) % 2) {
            total = total - term;
        } else {
            total = total + term;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

/// Lines of space-separated cells: "0", "1" or "x".
inline Dense<char> parse_grid(std::istream& in) {
    Dense<char> grid;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<char> row;
        std::string cell;
        while (ls >> cell) {
            if (cell != "0" && cell != "1" && cell != "x") throw std::runtime_error("bad cell " + cell);
            row.push_back(cell[0]);
        }
        if (!row.empty()) grid.push_back(row);
    }
    return grid;
}

inline Dense<char> read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_grid(in);
}

inline Dense<char> grid_of(const collatzlab::CollatzMatrix& m) {
    Dense<char> g(static_cast<std::size_t>(m.size()), std::vector<char>(static_cast<std::size_t>(m.size()), '0'));
    for (Index i = 1; i <= m.size(); ++i) {
        for (Index j = 1; j <= m.size(); ++j) {
            const auto c = m.at(i, j);
            g[i - 1][j - 1] = c == collatzlab::Cell::One ? '1' : c == collatzlab::Cell::X ? 'x' : '0';
        }
    }
    return g;
}

inline Dense<Poly> poly_of(const Dense<char>& g) {
    Dense<Poly> m(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (char c : g[i]) m[i].push_back(c == '1' ? Poly(1) : c == 'x' ? Poly::x() : Poly(0));
    }
    return m;
}

/// The shortcut Collatz step.
inline Index collatz_step(Index n) { return n % 2 == 0 ? n / 2 : (3 * n + 1) / 2; }

/// M_k straight from the definition: 1 on the diagonal, x at (i, step(i)) when in range.
inline Dense<char> collatz_grid(Index k) {
    Dense<char> g(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), '0'));
    for (Index i = 1; i <= k; ++i) {
        g[i - 1][i - 1] = '1';
        const Index j = collatz_step(i);
        if (j <= k) g[i - 1][j - 1] = j == i ? '1' : 'x';
    }
    return g;
}

/// Cycles of the step map on {1..k}, each as a sorted set, found by iterating from
/// every start point until the orbit leaves the range or repeats.
inline std::set<std::set<Index>> cycle_sets(Index k) {
    std::set<std::set<Index>> out;
    for (Index s = 1; s <= k; ++s) {
        Index v = s;
        bool back = false;
        for (Index steps = 0; steps < k; ++steps) {
            v = collatz_step(v);
            if (v > k) break;
            if (v == s) {
                back = true;
                break;
            }
        }
        if (!back) continue;
        std::set<Index> c{s};
        for (Index w = collatz_step(s); w != s; w = collatz_step(w)) c.insert(w);
        out.insert(c);
    }
    return out;
}

/// Whether sigma^{-1} can close a cycle through k/2 in M~_{k-1}: iterate the step
/// map forward from k/2 inside {1..k-1}; the special row (2k-1)/3 sends back to k/2.
inline bool mtilde_has_cycle(Index k) {
    const Index half = k / 2;
    const Index r = (2 * k - 1) / 3;
    std::set<Index> seen{half};
    Index v = half;
    while (true) {
        if (v == r) return true;
        v = collatz_step(v);
        if (v > k - 1 || !seen.insert(v).second) return false;
    }
}

inline Poly random_poly(std::mt19937_64& rng, int max_degree, long bound) {
    std::uniform_int_distribution<int> deg(-1, max_degree);
    std::uniform_int_distribution<long> coef(-bound, bound);
    const int d = deg(rng);
    std::vector<BigInt> c;
    for (int i = 0; i <= d; ++i) c.emplace_back(coef(rng));
    return Poly(std::move(c));
}

} // namespace oracle
