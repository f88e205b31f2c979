#include "fracexp/poly.hpp"

#include "fracexp/errors.hpp"

#include <algorithm>
#include <sstream>

namespace fracexp {

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Poly::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Poly(std::move(d));
}

Poly Poly::shifted(double c) const {
    // Repeated synthetic division (Taylor shift), O(n^2).
    std::vector<double> a = c_;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = n - 1; k > i; --k) a[k - 1] += c * a[k];
    return Poly(std::move(a));
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Poly& Poly::operator*=(double s) {
    for (double& v : c_) v *= s;
    trim();
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(r));
}

PiecewisePoly::PiecewisePoly(std::vector<double> breakpoints, std::vector<Poly> pieces)
    : x_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
        x_.clear();
        return;
    }
    if (x_.size() != pieces_.size() + 1)
        throw DomainError("PiecewisePoly: need exactly one more breakpoint than pieces");
    for (std::size_t k = 1; k < x_.size(); ++k)
        if (!(x_[k] > x_[k - 1])) throw DomainError("PiecewisePoly: breakpoints must be strictly ascending");
}

PiecewisePoly PiecewisePoly::on(double lo, double hi, Poly p) {
    if (!(hi > lo) || p.is_zero()) return {};
    return PiecewisePoly({lo, hi}, {std::move(p)});
}

double PiecewisePoly::operator()(double u) const noexcept {
    if (pieces_.empty() || u < x_.front() || u > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - x_.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= pieces_.size()) k = pieces_.size() - 1;
    return pieces_[k](u);
}

PiecewisePoly PiecewisePoly::restricted(double lo, double hi) const {
    if (pieces_.empty() || !(hi > lo)) return {};
    std::vector<double> x;
    std::vector<Poly> p;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const double a = std::max(lo, x_[k]);
        const double b = std::min(hi, x_[k + 1]);
        if (!(b > a)) continue;
        if (x.empty()) x.push_back(a);
        else if (x.back() != a) {
            // gap: insert a zero piece
            p.emplace_back();
            x.push_back(a);
        }
        p.push_back(pieces_[k]);
        x.push_back(b);
    }
    if (p.empty()) return {};
    return PiecewisePoly(std::move(x), std::move(p)).simplified();
}

PiecewisePoly PiecewisePoly::simplified() const {
    if (pieces_.empty()) return {};
    std::vector<double> x{x_.front()};
    std::vector<Poly> p{pieces_.front()};
    for (std::size_t k = 1; k < pieces_.size(); ++k) {
        if (pieces_[k] == p.back()) {
            x.back() = x_[k + 1];
            continue;
        }
        // x currently ends at the right end of the previous merged piece
        if (x.size() == p.size()) x.push_back(x_[k]);
        else x.back() = x_[k];
        p.push_back(pieces_[k]);
        x.push_back(x_[k + 1]);
    }
    if (x.size() == p.size()) x.push_back(x_.back());
    // rebuild properly: x holds left ends and the final right end
    // trim zero pieces at both ends
    std::size_t first = 0, last = p.size();
    while (first < last && p[first].is_zero()) ++first;
    while (last > first && p[last - 1].is_zero()) --last;
    if (first == last) return {};
    std::vector<double> xs(x.begin() + static_cast<std::ptrdiff_t>(first),
                           x.begin() + static_cast<std::ptrdiff_t>(last + 1));
    std::vector<Poly> ps(p.begin() + static_cast<std::ptrdiff_t>(first),
                         p.begin() + static_cast<std::ptrdiff_t>(last));
    return PiecewisePoly(std::move(xs), std::move(ps));
}

namespace {

std::vector<double> merged_breakpoints(std::span<const double> a, std::span<const double> b) {
    std::vector<double> x(a.begin(), a.end());
    x.insert(x.end(), b.begin(), b.end());
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    return x;
}

// Piece of `f` that covers the open cell (a, b), or zero.
Poly piece_on(const PiecewisePoly& f, double a, double b) {
    if (f.empty()) return {};
    const double mid = 0.5 * (a + b);
    if (mid < f.lo() || mid > f.hi()) return {};
    auto xs = f.breakpoints();
    auto it = std::upper_bound(xs.begin(), xs.end(), mid);
    std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (k >= f.num_pieces()) return {};
    return f.pieces()[k];
}

template <class Op>
PiecewisePoly combine(const PiecewisePoly& a, const PiecewisePoly& b, Op op) {
    const auto x = merged_breakpoints(a.breakpoints(), b.breakpoints());
    if (x.size() < 2) return {};
    std::vector<Poly> p;
    p.reserve(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k)
        p.push_back(op(piece_on(a, x[k], x[k + 1]), piece_on(b, x[k], x[k + 1])));
    return PiecewisePoly(x, std::move(p)).simplified();
}

}  // namespace

PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return combine(a, b, [](const Poly& p, const Poly& q) { return p + q; });
}

PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b) {
    if (a.empty() || b.empty()) return {};
    return combine(a, b, [](const Poly& p, const Poly& q) { return p * q; });
}

PiecewisePoly operator*(double s, PiecewisePoly a) {
    if (s == 0.0) return {};
    for (auto& p : a.pieces_) p *= s;
    return a;
}

std::string PiecewisePoly::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "(pw";
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        os << " [" << x_[k] << " " << x_[k + 1] << ":";
        for (double c : pieces_[k].coeffs()) os << " " << c;
        os << "]";
    }
    os << ")";
    return os.str();
}

}  // namespace fracexp
