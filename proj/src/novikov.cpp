#include "nov/novikov.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nov/errors.hpp"

namespace nov {

std::optional<Rat> min_precision(const std::optional<Rat>& a, const std::optional<Rat>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

Series Series::constant(const Scalar& c) { return monomial(c, Rat(0)); }

Series Series::monomial(const Scalar& c, const Rat& exponent) {
    Series s(c.field());
    if (!c.is_zero()) s.terms_.push_back({exponent, c});
    return s;
}

Series Series::from_terms(const Field& f, std::vector<Term> terms, std::optional<Rat> precision) {
    Series s(f);
    s.terms_ = std::move(terms);
    s.precision_ = std::move(precision);
    s.normalize();
    return s;
}

Series Series::big_o(const Field& f, const Rat& precision) {
    Series s(f);
    s.precision_ = precision;
    return s;
}

void Series::normalize() {
    for (const auto& t : terms_)
        if (t.second.field() != field_) fail(ErrorCode::FieldMismatch, "series term outside the series field");
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().first == t.first) merged.back().second += t.second;
        else merged.push_back(std::move(t));
    }
    terms_.clear();
    for (auto& t : merged) {
        if (t.second.is_zero()) continue;
        if (precision_ && t.first >= *precision_) continue;
        terms_.push_back(std::move(t));
    }
}

ExtRat Series::valuation() const {
    if (!terms_.empty()) return ExtRat::of(terms_.front().first);
    if (is_exact()) return ExtRat::infinity();
    fail(ErrorCode::IndeterminateValuation, "valuation only known to be at least " + nov::to_string(*precision_));
}

ExtRat Series::valuation_lower_bound() const {
    if (!terms_.empty()) return ExtRat::of(terms_.front().first);
    if (precision_) return ExtRat::of(*precision_);
    return ExtRat::infinity();
}

const Scalar& Series::leading_coefficient() const {
    if (terms_.empty()) fail(ErrorCode::IndeterminateValuation, "no leading coefficient");
    return terms_.front().second;
}

ExtRat Series::max_exponent() const {
    if (terms_.empty()) return ExtRat::infinity();
    return ExtRat::of(terms_.back().first);
}

Series Series::operator+(const Series& o) const {
    if (field_ != o.field_) fail(ErrorCode::FieldMismatch, "adding series over " + describe(field_) + " and " + describe(o.field_));
    Series r(field_);
    r.precision_ = min_precision(precision_, o.precision_);
    r.terms_.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) r.terms_.push_back(terms_[i++]);
        else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) r.terms_.push_back(o.terms_[j++]);
        else {
            Scalar c = terms_[i].second + o.terms_[j].second;
            if (!c.is_zero()) r.terms_.push_back({terms_[i].first, c});
            ++i;
            ++j;
        }
    }
    if (r.precision_) {
        auto cut = std::find_if(r.terms_.begin(), r.terms_.end(), [&](const Term& t) { return t.first >= *r.precision_; });
        r.terms_.erase(cut, r.terms_.end());
    }
    return r;
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    if (field_ != o.field_) fail(ErrorCode::FieldMismatch, "multiplying series over " + describe(field_) + " and " + describe(o.field_));
    Series r(field_);
    const ExtRat va = valuation_lower_bound(), vb = o.valuation_lower_bound();
    std::optional<Rat> prec;
    if (o.precision_ && !va.is_infinite()) prec = va.get() + *o.precision_;
    if (precision_ && !vb.is_infinite()) prec = min_precision(prec, vb.get() + *precision_);
    r.precision_ = prec;
    if (terms_.empty() || o.terms_.empty()) return r;
    std::map<Rat, Scalar> acc;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            Rat e = a.first + b.first;
            if (prec && e >= *prec) continue;
            auto it = acc.find(e);
            if (it == acc.end()) acc.emplace(e, a.second * b.second);
            else it->second += a.second * b.second;
        }
    for (auto& [e, c] : acc)
        if (!c.is_zero()) r.terms_.push_back({e, c});
    return r;
}

Series Series::scaled(const Scalar& c) const {
    if (c.field() != field_) fail(ErrorCode::FieldMismatch, "scalar outside the series field");
    Series r(field_);
    r.precision_ = precision_;
    if (c.is_zero()) {
        // 0·(... + O(T^P)) is exactly zero.
        r.precision_.reset();
        return r;
    }
    for (const auto& t : terms_) r.terms_.push_back({t.first, t.second * c});
    return r;
}

Series Series::shifted(const Rat& e) const {
    Series r = *this;
    for (auto& t : r.terms_) t.first += e;
    if (r.precision_) *r.precision_ += e;
    return r;
}

Series Series::pow(long e, const Rat& target) const {
    if (e < 0) return invert(target).pow(-e, target);
    Series result = one(field_);
    Series base = *this;
    while (e > 0) {
        if (e & 1) result = (result * base).with_precision(target);
        e >>= 1;
        if (e) base = (base * base).with_precision(target);
    }
    return result;
}

Series Series::invert(const Rat& target) const {
    if (terms_.empty()) {
        if (is_exact()) fail(ErrorCode::NotInvertible, "inverse of the zero series");
        fail(ErrorCode::IndeterminateValuation, "inverse of a series with unknown leading term");
    }
    const Rat v = terms_.front().first;
    const Scalar cinv = terms_.front().second.inverse();
    // Normalised tail u with s = c T^v (1 + u).
    Series u(field_);
    for (size_t k = 1; k < terms_.size(); ++k) u.terms_.push_back({terms_[k].first - v, terms_[k].second * cinv});
    if (precision_) u.precision_ = *precision_ - v;
    // Absolute precision wanted for 1/(1+u) before the final shift by -v.
    Rat want = target + v;
    if (precision_) want = std::min(want, Rat(*precision_ - v));
    Series sum = one(field_);
    if (!u.terms_.empty() || u.precision_) {
        Series term = one(field_);
        const Series neg_u = -u;
        sum.precision_ = want;
        for (int guard = 0; guard < 100000; ++guard) {
            term = (term * neg_u).with_precision(want);
            if (term.terms_.empty()) break;
            sum = sum + term;
        }
        sum = sum.with_precision(want);
    }
    Series r = sum.scaled(cinv).shifted(-v);
    return r;
}

Series Series::truncate(const Rat& Z) const {
    Series r(field_);
    for (const auto& t : terms_)
        if (t.first <= Z) r.terms_.push_back(t);
    if (precision_ && *precision_ <= Z) r.precision_ = precision_;
    return r;
}

Series Series::with_precision(const Rat& P) const {
    Series r(field_);
    r.precision_ = precision_ ? std::min(*precision_, P) : P;
    for (const auto& t : terms_)
        if (t.first < *r.precision_) r.terms_.push_back(t);
    return r;
}

Series Series::rescale_p(long p) const {
    Series r = *this;
    for (auto& t : r.terms_) t.first /= p;
    if (r.precision_) *r.precision_ /= p;
    return r;
}

Series Series::reduce_mod_p(std::int64_t p) const {
    const Reduction& red = reduction_for(field_, p);
    Series r(red.target);
    r.precision_ = precision_;
    for (const auto& t : terms_) {
        Scalar c = red.apply(t.second);
        if (!c.is_zero()) r.terms_.push_back({t.first, c});
    }
    return r;
}

Series Series::map(const Embedding& e) const {
    if (e.from != field_) fail(ErrorCode::FieldMismatch, "embedding source differs from series field");
    Series r(e.to);
    r.precision_ = precision_;
    for (const auto& t : terms_) r.terms_.push_back({t.first, e.apply(t.second)});
    return r;
}

bool Series::agrees_with(const Series& o) const {
    if (field_ != o.field_) return false;
    const auto P = min_precision(precision_, o.precision_);
    auto below = [&](const std::vector<Term>& ts) {
        std::vector<Term> out;
        for (const auto& t : ts)
            if (!P || t.first < *P) out.push_back(t);
        return out;
    };
    auto a = below(terms_), b = below(o.terms_);
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || a[i].second != b[i].second) return false;
    return true;
}

bool Series::operator==(const Series& o) const {
    if (field_ != o.field_ || precision_ != o.precision_ || terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].first != o.terms_[i].first || terms_[i].second != o.terms_[i].second) return false;
    return true;
}

std::string Series::to_string(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        std::string cs = c.to_string();
        bool compound = cs.find_first_of(" +") != std::string::npos || (cs.size() > 1 && cs.find('-', 1) != std::string::npos);
        if (e == 0) os << cs;
        else {
            if (cs == "-1") os << "-";
            else if (cs != "1") os << (compound ? "(" + cs + ")" : cs) << "*";
            os << var;
            if (e != 1) os << "^" << (e.get_den() == 1 ? nov::to_string(e) : "(" + nov::to_string(e) + ")");
        }
        first = false;
    }
    if (precision_) {
        if (!first) os << " + ";
        os << "O(" << var << "^" << (precision_->get_den() == 1 ? nov::to_string(*precision_) : "(" + nov::to_string(*precision_) + ")") << ")";
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace nov
