#include "mpcert/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mpcert {

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0 || nvars > kMaxVars) throw std::invalid_argument("Polynomial: unsupported variable count");
}

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(0, c);
    return p;
}

Polynomial Polynomial::affine(std::span<const double> coeffs, double c) {
    Polynomial p(static_cast<int>(coeffs.size()));
    p.terms_.reserve(coeffs.size() + 1);
    if (c != 0.0) p.terms_.push_back({0, c});
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0.0) p.terms_.push_back({std::uint64_t{1} << (4 * i), coeffs[i]});
    p.normalize();
    return p;
}

std::uint64_t Polynomial::pack(std::span<const int> exponents) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 0 || exponents[i] > kMaxExponent)
            throw std::invalid_argument("Polynomial: exponent out of range");
        key |= static_cast<std::uint64_t>(exponents[i]) << (4 * i);
    }
    return key;
}

int Polynomial::key_degree(std::uint64_t key, int nvars) {
    int d = 0;
    for (int v = 0; v < nvars; ++v) d += exponent(key, v);
    return d;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto &t : terms_) d = std::max(d, key_degree(t.key, nvars_));
    return d;
}

void Polynomial::add_term(std::uint64_t key, double c) {
    if (c == 0.0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term &t, std::uint64_t k) { return t.key < k; });
    if (it != terms_.end() && it->key == key) {
        it->coeff += c;
        if (it->coeff == 0.0) terms_.erase(it);
    } else {
        terms_.insert(it, {key, c});
    }
}

void Polynomial::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term &a, const Term &b) { return a.key < b.key; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto &t : terms_) {
        if (!merged.empty() && merged.back().key == t.key)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term &t) { return t.coeff == 0.0; });
    terms_ = std::move(merged);
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto &t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

Polynomial &Polynomial::prune(double rel_tol) {
    const double thr = rel_tol * max_abs_coeff();
    std::erase_if(terms_, [thr](const Term &t) { return std::abs(t.coeff) <= thr; });
    return *this;
}

double Polynomial::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("Polynomial::eval: dimension mismatch");
    double acc = 0.0;
    for (const auto &t : terms_) {
        double m = t.coeff;
        std::uint64_t key = t.key;
        for (int v = 0; key != 0; ++v, key >>= 4) {
            const int e = static_cast<int>(key & 0xF);
            for (int k = 0; k < e; ++k) m *= x[v];
        }
        acc += m;
    }
    return acc;
}

void Polynomial::gradient(std::span<const double> x, std::span<double> grad) const {
    if (static_cast<int>(x.size()) != nvars_ || grad.size() != x.size())
        throw std::invalid_argument("Polynomial::gradient: dimension mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto &t : terms_) {
        for (int v = 0; v < nvars_; ++v) {
            const int ev = exponent(t.key, v);
            if (ev == 0) continue;
            double m = t.coeff * ev;
            for (int w = 0; w < nvars_; ++w) {
                const int e = exponent(t.key, w) - (w == v ? 1 : 0);
                for (int k = 0; k < e; ++k) m *= x[w];
            }
            grad[v] += m;
        }
    }
}

void Polynomial::affine_parts(std::span<double> a, double &c) const {
    if (static_cast<int>(a.size()) != nvars_) throw std::invalid_argument("Polynomial::affine_parts: dimension mismatch");
    if (degree() > 1) throw std::logic_error("Polynomial::affine_parts: degree > 1");
    std::fill(a.begin(), a.end(), 0.0);
    c = 0.0;
    for (const auto &t : terms_) {
        if (t.key == 0) {
            c = t.coeff;
            continue;
        }
        for (int v = 0; v < nvars_; ++v)
            if (exponent(t.key, v) == 1) a[v] = t.coeff;
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto &t : r.terms_) t.coeff = -t.coeff;
    return r;
}

Polynomial &Polynomial::operator+=(const Polynomial &o) {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].key < o.terms_[j].key)) {
            out.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].key < terms_[i].key) {
            out.push_back(o.terms_[j++]);
        } else {
            const double c = terms_[i].coeff + o.terms_[j].coeff;
            if (c != 0.0) out.push_back({terms_[i].key, c});
            ++i;
            ++j;
        }
    }
    terms_ = std::move(out);
    return *this;
}

Polynomial &Polynomial::operator-=(const Polynomial &o) { return *this += -o; }

Polynomial &Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto &t : terms_) t.coeff *= s;
    return *this;
}

Polynomial operator*(const Polynomial &a, const Polynomial &b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    Polynomial r(a.nvars_);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.degree() + b.degree() > Polynomial::kMaxExponent)
        throw std::overflow_error("Polynomial: product degree exceeds representable range");
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto &ta : a.terms_)
        for (const auto &tb : b.terms_) r.terms_.push_back({ta.key + tb.key, ta.coeff * tb.coeff});
    r.normalize();
    return r;
}

bool operator==(const Polynomial &a, const Polynomial &b) {
    if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].key != b.terms_[i].key || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    return true;
}

namespace {
void enumerate_degree(int nvars, int var, int remaining, std::vector<int> &exps, std::vector<std::uint64_t> &out) {
    if (var == nvars - 1) {
        exps[var] = remaining;
        out.push_back(Polynomial::pack(exps));
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        exps[var] = e;
        enumerate_degree(nvars, var + 1, remaining - e, exps, out);
    }
}
}  // namespace

std::vector<std::uint64_t> monomial_basis(int nvars, int degree) {
    std::vector<std::uint64_t> out;
    if (nvars == 0) {
        out.push_back(0);
        return out;
    }
    std::vector<int> exps(nvars, 0);
    for (int d = 0; d <= degree; ++d) enumerate_degree(nvars, 0, d, exps, out);
    return out;
}

std::size_t monomial_count(int nvars, int degree) {
    // C(nvars + degree, degree)
    std::size_t r = 1;
    for (int i = 1; i <= degree; ++i) r = r * static_cast<std::size_t>(nvars + i) / static_cast<std::size_t>(i);
    return r;
}

Polynomial Polynomial::from_dense(int nvars, int degree, std::span<const double> coeffs) {
    const auto basis = monomial_basis(nvars, degree);
    if (coeffs.size() != basis.size())
        throw std::invalid_argument("Polynomial::from_dense: coefficient count does not match monomial basis");
    Polynomial p(nvars);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (coeffs[i] != 0.0) p.terms_.push_back({basis[i], coeffs[i]});
    p.normalize();
    return p;
}

std::vector<double> Polynomial::to_dense() const {
    const int d = std::max(degree(), 0);
    const auto basis = monomial_basis(nvars_, d);
    std::unordered_map<std::uint64_t, std::size_t> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) pos.emplace(basis[i], i);
    std::vector<double> out(basis.size(), 0.0);
    for (const auto &t : terms_) out[pos.at(t.key)] = t.coeff;
    return out;
}

}  // namespace mpcert
