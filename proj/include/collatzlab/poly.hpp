#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace collatzlab {

using BigInt = mpz_class;

/// Univariate polynomial in x with arbitrary-precision integer coefficients.
///
/// Coefficients are stored densely in ascending degree. The stored sequence
/// never ends in a zero; the zero polynomial is the empty sequence.
class Poly {
public:
    Poly() = default;
    Poly(long c);  // NOLINT(google-explicit-constructor): constants promote
    Poly(const BigInt& c);  // NOLINT(google-explicit-constructor)
    Poly(std::initializer_list<long> coeffs);
    explicit Poly(std::vector<BigInt> coeffs);

    static Poly x() { return Poly{0, 1}; }
    static Poly monomial(const BigInt& c, std::size_t degree);

    /// Degree, or nullopt for the zero polynomial.
    [[nodiscard]] std::optional<std::size_t> degree() const;
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    [[nodiscard]] const std::vector<BigInt>& coeffs() const { return coeffs_; }
    /// Coefficient of x^i; zero past the end.
    [[nodiscard]] BigInt coeff(std::size_t i) const;

    [[nodiscard]] BigInt eval(const BigInt& t) const;

    /// "c0 + c1*x + c2*x^2" with zero terms dropped, e.g. "1 - x^2".
    [[nodiscard]] std::string to_string() const;

    Poly& operator+=(const Poly& q);
    Poly& operator-=(const Poly& q);
    Poly& operator*=(const Poly& q);

    friend Poly operator+(Poly p, const Poly& q) { return p += q; }
    friend Poly operator-(Poly p, const Poly& q) { return p -= q; }
    friend Poly operator*(const Poly& p, const Poly& q);
    friend Poly operator-(Poly p);
    friend bool operator==(const Poly& p, const Poly& q) { return p.coeffs_ == q.coeffs_; }

private:
    void normalize();

    std::vector<BigInt> coeffs_;
};

/// Returns r with r * q == p. Throws NotDivisible if q does not divide p in Z[x],
/// and std::domain_error if q is zero.
Poly exact_div(const Poly& p, const Poly& q);

inline BigInt eval_int(const Poly& p, const BigInt& t) { return p.eval(t); }

} // namespace collatzlab
