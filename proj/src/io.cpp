#include "blochlab/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace blochlab {

GaussianRational rational_from_json(const json& j) {
    if (j.is_string()) return GaussianRational::parse(j.get<std::string>());
    if (j.is_number_integer()) return GaussianRational(j.get<long>());
    if (j.is_object() && j.contains("re")) {
        const GaussianRational re = rational_from_json(j.at("re"));
        const GaussianRational im = j.contains("im") ? rational_from_json(j.at("im")) : GaussianRational(0);
        if (!re.is_real() || !im.is_real()) throw ParseError("re/im parts must be real rationals");
        return GaussianRational(re.re(), im.re());
    }
    throw ParseError("expected a rational string or {re, im}");
}

json rational_to_json(const GaussianRational& q) { return q.to_string(); }

json laurent_to_json(const LaurentPoly& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms())
        out.push_back({{"exponents", e.z},
                       {"lambda_power", e.lambda},
                       {"coeff_re", rational_to_string(c.re())},
                       {"coeff_im", rational_to_string(c.im())}});
    return out;
}

LaurentPoly laurent_from_json(const json& j, int dimension) {
    LaurentPoly p(dimension);
    if (!j.is_array()) throw ParseError("Laurent polynomial must be a list of terms");
    for (const auto& t : j) {
        auto exps = t.at("exponents").get<std::vector<int>>();
        if (static_cast<int>(exps.size()) != dimension) throw DimensionMismatch("term exponent arity");
        const int m = t.value("lambda_power", 0);
        if (m < 0) throw ParseError("negative lambda power");
        const GaussianRational re = GaussianRational::parse(t.at("coeff_re").get<std::string>());
        const GaussianRational im = GaussianRational::parse(t.value("coeff_im", std::string("0")));
        p.add_term(Exponent{exps, m}, GaussianRational(re.re(), im.re()));
    }
    return p;
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError("expected a complex number [re, im]");
}

json numeric_poly_to_json(const NumericPoly& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms())
        out.push_back({{"exponents", e.z}, {"lambda_power", e.lambda}, {"coeff", complex_to_json(c)}});
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

namespace {

class ExprParser {
public:
    ExprParser(const std::string& text, int d) : s_(text), d_(d) {}

    LaurentPoly parse() {
        LaurentPoly p = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    bool at_factor_start() {
        skip();
        if (pos_ >= s_.size()) return false;
        const unsigned char c = s_[pos_];
        return std::isalnum(c) || c == '(' || c >= 0x80;
    }

    LaurentPoly sum() {
        LaurentPoly acc(d_);
        bool first = true;
        for (;;) {
            int sign = 1;
            if (eat("+")) {
            } else if (eat("-")) {
                sign = -1;
            } else if (!first) {
                break;
            }
            LaurentPoly t = product();
            acc += sign < 0 ? -t : t;
            first = false;
        }
        return acc;
    }

    LaurentPoly product() {
        LaurentPoly acc = power();
        for (;;) {
            if (eat("*")) {
                acc *= power();
            } else if (at_factor_start()) {
                acc *= power();  // implicit multiplication
            } else {
                break;
            }
        }
        return acc;
    }

    LaurentPoly power() {
        LaurentPoly base = atom();
        if (eat("^")) {
            skip();
            std::size_t start = pos_;
            if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == start || !std::isdigit(static_cast<unsigned char>(s_[pos_ - 1]))) fail("expected an integer exponent");
            const int e = std::stoi(s_.substr(start, pos_ - start));
            if (e >= 0) return base.pow(e);
            // Negative powers only for monomials in z.
            if (base.size() != 1 || base.terms().begin()->first.lambda != 0) fail("negative power of a non-monomial");
            const auto& [ex, c] = *base.terms().begin();
            std::vector<int> inv = ex.z;
            for (auto& v : inv) v = -v;
            LaurentPoly m = LaurentPoly::monomial(d_, inv, 0, GaussianRational(1) / c);
            return m.pow(-e);
        }
        return base;
    }

    LaurentPoly atom() {
        skip();
        if (eat("(")) {
            LaurentPoly p = sum();
            if (!eat(")")) fail("expected ')'");
            return p;
        }
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
                ++pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
            return LaurentPoly::constant(d_, GaussianRational::parse(s_.substr(start, pos_ - start)));
        }
        if (eat("λ") || eat("lambda")) return LaurentPoly::lambda(d_);
        // Variable names, longest first so z12 is not read as z1.
        std::string best;
        int axis = -1;
        for (int i = 0; i < d_; ++i) {
            const std::string v = variable_name(d_, i);
            if (s_.compare(pos_, v.size(), v) == 0 && v.size() > best.size()) {
                const std::size_t after = pos_ + v.size();
                if (d_ > 2 && after < s_.size() && std::isdigit(static_cast<unsigned char>(s_[after]))) continue;
                best = v;
                axis = i;
            }
        }
        if (axis >= 0) {
            pos_ += best.size();
            return LaurentPoly::variable(d_, axis);
        }
        if (eat("i")) return LaurentPoly::constant(d_, GaussianRational::i());
        fail("expected a number, variable or '('");
    }

    std::string s_;
    int d_;
    std::size_t pos_ = 0;
};

}  // namespace

LaurentPoly parse_laurent(const std::string& text, int dimension) { return ExprParser(text, dimension).parse(); }

}  // namespace blochlab
