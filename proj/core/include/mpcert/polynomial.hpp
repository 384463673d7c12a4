#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mpcert {

/// Sparse multivariate polynomial with real coefficients.
///
/// Exponents are packed four bits per variable into one 64-bit key, so at
/// most 16 variables and an exponent of at most 15 per variable are
/// representable. Terms are kept sorted by key with no zero coefficients.
class Polynomial {
public:
    static constexpr int kMaxVars = 16;
    static constexpr int kMaxExponent = 15;

    struct Term {
        std::uint64_t key;
        double coeff;
    };

    Polynomial() = default;
    explicit Polynomial(int nvars);

    static Polynomial constant(int nvars, double c);
    /// p(θ) = coeffsᵀθ + c.
    static Polynomial affine(std::span<const double> coeffs, double c);

    /// Dense coefficients over the graded monomial basis of (nvars, degree);
    /// see monomial_basis().
    static Polynomial from_dense(int nvars, int degree, std::span<const double> coeffs);
    std::vector<double> to_dense() const;

    int nvars() const { return nvars_; }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term> &terms() const { return terms_; }

    double eval(std::span<const double> x) const;
    /// Writes ∇p(x) into grad (size nvars).
    void gradient(std::span<const double> x, std::span<double> grad) const;

    /// For degree <= 1: p(θ) = aᵀθ + c.
    void affine_parts(std::span<double> a, double &c) const;

    /// Drops terms with |coeff| <= rel_tol * max |coeff|.
    Polynomial &prune(double rel_tol = 1e-14);
    double max_abs_coeff() const;

    Polynomial operator-() const;
    Polynomial &operator+=(const Polynomial &o);
    Polynomial &operator-=(const Polynomial &o);
    Polynomial &operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial &a, const Polynomial &b);

    friend bool operator==(const Polynomial &a, const Polynomial &b);

    static std::uint64_t pack(std::span<const int> exponents);
    static int exponent(std::uint64_t key, int var) { return static_cast<int>((key >> (4 * var)) & 0xF); }
    static int key_degree(std::uint64_t key, int nvars);

private:
    void add_term(std::uint64_t key, double c);
    void normalize();

    int nvars_ = 0;
    std::vector<Term> terms_;
};

/// Exponent keys of all monomials of degree <= `degree` in `nvars`
/// variables, ordered by total degree, then lexicographically with larger
/// exponents of earlier variables first. For two variables and degree 2:
/// 1, x0, x1, x0², x0·x1, x1².
std::vector<std::uint64_t> monomial_basis(int nvars, int degree);

/// Number of monomials of degree <= `degree` in `nvars` variables.
std::size_t monomial_count(int nvars, int degree);

}  // namespace mpcert
