#include "collatzlab/matrix.hpp"

#include "collatzlab/errors.hpp"

#include <sstream>
#include <utility>

namespace collatzlab {

const char* to_string(MatrixKind kind) {
    switch (kind) {
    case MatrixKind::Standard: return "standard";
    case MatrixKind::MinorPrime: return "prime";
    case MatrixKind::Tilde: return "tilde";
    }
    return "?";
}

CollatzMatrix::CollatzMatrix(MatrixKind kind, Index origin_k, std::vector<MatrixRow> rows)
    : kind_(kind), origin_k_(origin_k), rows_(std::move(rows)) {
    const Index n = size();
    for (const auto& r : rows_) {
        if ((r.one_column && (*r.one_column < 1 || *r.one_column > n)) ||
            (r.x_column && (*r.x_column < 1 || *r.x_column > n))) {
            throw OutOfRange("CollatzMatrix: column index outside 1.." + std::to_string(n));
        }
        if (r.one_column && r.x_column && *r.one_column == *r.x_column) {
            throw InvalidSize("CollatzMatrix: 1 and x share a cell");
        }
    }
}

const MatrixRow& CollatzMatrix::row(Index i) const {
    if (i < 1 || i > size()) throw OutOfRange("row index " + std::to_string(i) + " outside matrix");
    return rows_[static_cast<std::size_t>(i - 1)];
}

Cell CollatzMatrix::at(Index i, Index j) const {
    if (j < 1 || j > size()) throw OutOfRange("column index " + std::to_string(j) + " outside matrix");
    const MatrixRow& r = row(i);
    if (r.one_column == j) return Cell::One;
    if (r.x_column == j) return Cell::X;
    return Cell::Zero;
}

bool CollatzMatrix::has_diagonal_one(Index i) const { return row(i).one_column == i; }

std::string CollatzMatrix::dump() const {
    std::ostringstream out;
    for (Index i = 1; i <= size(); ++i) {
        const MatrixRow& r = row(i);
        out << i << ':';
        bool any = false;
        if (r.one_column) {
            if (*r.one_column == i) {
                out << " diag=1";
            } else {
                out << " one@" << *r.one_column;
            }
            any = true;
        }
        if (r.x_column) {
            out << (any ? ", " : " ") << "x@" << *r.x_column;
            any = true;
        }
        if (!any) out << " -";
        out << '\n';
    }
    return out.str();
}

namespace {

MatrixRow standard_row(Index i, Index k) {
    MatrixRow r;
    r.one_column = i;
    if (i % 2 == 0) {
        r.x_column = i / 2;
    } else if ((3 * i + 1) / 2 <= k) {
        r.x_column = (3 * i + 1) / 2;
    }
    return r;
}

void require_applicable(Index k) {
    if (!m_tilde_applicable(k)) {
        throw NotApplicable("k = " + std::to_string(k) +
                            ": last column of M_k has a single nonzero or k is odd");
    }
}

} // namespace

CollatzMatrix build_collatz(Index k) {
    if (k < 2) throw InvalidSize("Collatz matrix needs k >= 2, got " + std::to_string(k));
    std::vector<MatrixRow> rows;
    rows.reserve(static_cast<std::size_t>(k));
    for (Index i = 1; i <= k; ++i) rows.push_back(standard_row(i, k));
    return {MatrixKind::Standard, k, std::move(rows)};
}

std::set<Index> last_column_profile(Index k) {
    if (k < 2) throw InvalidSize("Collatz matrix needs k >= 2, got " + std::to_string(k));
    std::set<Index> out;
    for (Index i = 1; i <= k; ++i) {
        const MatrixRow r = standard_row(i, k);
        if (r.one_column == k || r.x_column == k) out.insert(i);
    }
    return out;
}

bool m_tilde_applicable(Index k) {
    if (k < 2 || k % 2 != 0) return false;
    return last_column_profile(k).size() == 2;
}

Index special_row(Index k) {
    require_applicable(k);
    return (2 * k - 1) / 3;
}

Index rotation_length(Index k) { return (k - 1) - special_row(k) + 1; }

CollatzMatrix build_m_prime(Index k) {
    require_applicable(k);
    const Index r = (2 * k - 1) / 3;
    std::vector<MatrixRow> rows;
    rows.reserve(static_cast<std::size_t>(k - 1));
    for (Index i = 1; i <= k; ++i) {
        if (i == r) continue;
        MatrixRow row = standard_row(i, k);
        // Deleting row r and column k shifts nothing to the left of k, so only
        // entries in column k disappear.
        if (row.one_column == k) row.one_column.reset();
        if (row.x_column == k) row.x_column.reset();
        rows.push_back(row);
    }
    return {MatrixKind::MinorPrime, k, std::move(rows)};
}

CollatzMatrix build_m_tilde(Index k) {
    CollatzMatrix prime = build_m_prime(k);
    const Index r = (2 * k - 1) / 3;
    std::vector<MatrixRow> rows = prime.rows();
    // Last row moves to position r; rows r..k-2 shift down by one.
    MatrixRow last = rows.back();
    rows.pop_back();
    rows.insert(rows.begin() + (r - 1), last);
    return {MatrixKind::Tilde, k, std::move(rows)};
}

} // namespace collatzlab
