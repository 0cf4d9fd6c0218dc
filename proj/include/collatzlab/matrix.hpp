#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace collatzlab {

using Index = std::int64_t;

enum class MatrixKind { Standard, MinorPrime, Tilde };
enum class Cell { Zero, One, X };

const char* to_string(MatrixKind kind);

/// A row of a Collatz-type matrix: at most one entry equal to 1 and at most one
/// equal to x. Columns are 1-based.
struct MatrixRow {
    std::optional<Index> one_column;
    std::optional<Index> x_column;

    friend bool operator==(const MatrixRow&, const MatrixRow&) = default;
};

/// Sparse square matrix over {0, 1, x}. Holds M_k, the Laplace minor M'_{k-1}
/// and its row-rotated form M~_{k-1}. Immutable once built; indices are 1-based.
class CollatzMatrix {
public:
    CollatzMatrix(MatrixKind kind, Index origin_k, std::vector<MatrixRow> rows);

    [[nodiscard]] Index size() const { return static_cast<Index>(rows_.size()); }
    [[nodiscard]] MatrixKind kind() const { return kind_; }
    /// The k this matrix was derived from (equal to size() for Standard).
    [[nodiscard]] Index origin_k() const { return origin_k_; }

    [[nodiscard]] const MatrixRow& row(Index i) const;
    [[nodiscard]] const std::vector<MatrixRow>& rows() const { return rows_; }
    [[nodiscard]] Cell at(Index i, Index j) const;
    [[nodiscard]] bool has_diagonal_one(Index i) const;

    /// One line per row: "i: diag=1, x@j". An off-diagonal 1 prints as "one@j";
    /// a row without entries prints as "i: -".
    [[nodiscard]] std::string dump() const;

    friend bool operator==(const CollatzMatrix&, const CollatzMatrix&) = default;

private:
    MatrixKind kind_;
    Index origin_k_;
    std::vector<MatrixRow> rows_;
};

/// M_k: 1 on the diagonal, x at (i, i/2) for even i and at (i, (3i+1)/2) for odd i
/// when that column is in range.
CollatzMatrix build_collatz(Index k);

/// Rows of M_k holding a nonzero in column k.
std::set<Index> last_column_profile(Index k);

/// True when k is even and column k of M_k has two nonzeros, i.e. M'_{k-1} and
/// M~_{k-1} are defined.
bool m_tilde_applicable(Index k);

/// The row (2k-1)/3 whose x sits in column k. Requires m_tilde_applicable(k).
Index special_row(Index k);

/// Length of the row rotation taking M'_{k-1} to M~_{k-1}: (k-1) - (2k-1)/3 + 1.
Index rotation_length(Index k);

/// M_k with row (2k-1)/3 and column k deleted.
CollatzMatrix build_m_prime(Index k);

/// M'_{k-1} with its last row rotated up to position (2k-1)/3.
CollatzMatrix build_m_tilde(Index k);

} // namespace collatzlab
