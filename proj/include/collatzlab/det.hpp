#pragma once

#include "collatzlab/matrix.hpp"
#include "collatzlab/poly.hpp"

#include <utility>
#include <vector>

namespace collatzlab {

/// Square matrix stored by rows; each row lists (column, value) pairs with
/// 0-based, strictly increasing columns and nonzero values.
template <class T>
struct SparseMatrix {
    using Row = std::vector<std::pair<Index, T>>;
    Index n = 0;
    std::vector<Row> rows;
};

using PolyMatrix = SparseMatrix<Poly>;
using IntMatrix = SparseMatrix<BigInt>;

PolyMatrix to_poly_matrix(const CollatzMatrix& m);
/// Substitutes x := t.
IntMatrix to_int_matrix(const CollatzMatrix& m, const BigInt& t);

inline constexpr Index kBruteForceLimit = 10;

/// Signed sum over all permutations. Throws TooLarge above kBruteForceLimit.
Poly permutation_expansion(const PolyMatrix& m);

/// Fraction-free (Bareiss) elimination with minimal-size pivoting. Rows untouched
/// by a step are rescaled lazily, so cost follows the fill rather than n^3.
Poly fraction_free_det(const PolyMatrix& m);
BigInt fraction_free_det(const IntMatrix& m);
Poly fraction_free_det(PolyMatrix&& m);
BigInt fraction_free_det(IntMatrix&& m);

enum class Engine { BruteForce, FractionFree, CycleFormula };
const char* to_string(Engine e);

struct DetResult {
    Poly value;
    Engine engine;
    Index size;
};

DetResult det_bruteforce(const CollatzMatrix& m);
DetResult det_fraction_free(const CollatzMatrix& m);

/// det M_k as the product over cycles C of the truncated Collatz map of
/// 1 + (-1)^{|C|-1} x^{|C|}.
DetResult det_cycle_formula(Index k);

/// Integer determinant of m with x := t.
BigInt det_at(const CollatzMatrix& m, const BigInt& t);

/// Checks det M_k = det M_{k-1} + x (-1)^{k + (2k-1)/3} det M'_{k-1} with every
/// determinant from elimination. Throws NotApplicable when M'_{k-1} is undefined.
bool laplace_check(Index k);

/// The polynomial 1 - x^2.
const Poly& one_minus_x_squared();

} // namespace collatzlab
