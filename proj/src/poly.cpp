#include "collatzlab/poly.hpp"

#include "collatzlab/errors.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace collatzlab {

Poly::Poly(long c) {
    if (c != 0) coeffs_.emplace_back(c);
}

Poly::Poly(const BigInt& c) {
    if (c != 0) coeffs_.push_back(c);
}

Poly::Poly(std::initializer_list<long> coeffs) {
    coeffs_.reserve(coeffs.size());
    for (long c : coeffs) coeffs_.emplace_back(c);
    normalize();
}

Poly::Poly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

Poly Poly::monomial(const BigInt& c, std::size_t degree) {
    if (c == 0) return {};
    std::vector<BigInt> v(degree + 1);
    v[degree] = c;
    return Poly(std::move(v));
}

std::optional<std::size_t> Poly::degree() const {
    if (coeffs_.empty()) return std::nullopt;
    return coeffs_.size() - 1;
}

BigInt Poly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigInt(0); }

void Poly::normalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt Poly::eval(const BigInt& t) const {
    BigInt acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc *= t;
        acc += *it;
    }
    return acc;
}

std::string Poly::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const BigInt& c = coeffs_[i];
        if (c == 0) continue;
        BigInt mag = abs(c);
        if (first) {
            if (c < 0) out << '-';
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (i == 0) {
            out << mag.get_str();
            continue;
        }
        if (mag != 1) out << mag.get_str() << '*';
        out << 'x';
        if (i > 1) out << '^' << i;
    }
    return out.str();
}

Poly& Poly::operator+=(const Poly& q) {
    if (q.coeffs_.size() > coeffs_.size()) coeffs_.resize(q.coeffs_.size());
    for (std::size_t i = 0; i < q.coeffs_.size(); ++i) coeffs_[i] += q.coeffs_[i];
    normalize();
    return *this;
}

Poly& Poly::operator-=(const Poly& q) {
    if (q.coeffs_.size() > coeffs_.size()) coeffs_.resize(q.coeffs_.size());
    for (std::size_t i = 0; i < q.coeffs_.size(); ++i) coeffs_[i] -= q.coeffs_[i];
    normalize();
    return *this;
}

Poly& Poly::operator*=(const Poly& q) {
    *this = *this * q;
    return *this;
}

Poly operator*(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return {};
    std::vector<BigInt> out(p.coeffs_.size() + q.coeffs_.size() - 1);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
        if (p.coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < q.coeffs_.size(); ++j) {
            mpz_addmul(out[i + j].get_mpz_t(), p.coeffs_[i].get_mpz_t(), q.coeffs_[j].get_mpz_t());
        }
    }
    return Poly(std::move(out));
}

Poly operator-(Poly p) {
    for (auto& c : p.coeffs_) c = -c;
    return p;
}

Poly exact_div(const Poly& p, const Poly& q) {
    if (q.is_zero()) throw std::domain_error("exact_div: division by the zero polynomial");
    if (p.is_zero()) return {};
    const auto& qc = q.coeffs();
    const std::size_t dq = qc.size() - 1;
    std::vector<BigInt> rem = p.coeffs();
    if (rem.size() < qc.size()) throw NotDivisible("exact_div: divisor degree exceeds dividend degree");

    const BigInt& lead = qc.back();
    std::vector<BigInt> quot(rem.size() - dq);
    BigInt r;
    for (std::size_t i = rem.size(); i-- > dq;) {
        if (rem[i] == 0) continue;
        mpz_fdiv_qr(quot[i - dq].get_mpz_t(), r.get_mpz_t(), rem[i].get_mpz_t(), lead.get_mpz_t());
        if (r != 0) throw NotDivisible("exact_div: non-integer quotient coefficient");
        const BigInt& f = quot[i - dq];
        for (std::size_t j = 0; j <= dq; ++j) {
            mpz_submul(rem[i - dq + j].get_mpz_t(), f.get_mpz_t(), qc[j].get_mpz_t());
        }
    }
    for (std::size_t i = 0; i < dq; ++i) {
        if (rem[i] != 0) throw NotDivisible("exact_div: nonzero remainder");
    }
    return Poly(std::move(quot));
}

} // namespace collatzlab
