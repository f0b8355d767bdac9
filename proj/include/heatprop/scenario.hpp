#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "heatprop/diffusivity.hpp"
#include "heatprop/errors.hpp"
#include "heatprop/estimates.hpp"
#include "heatprop/grid.hpp"
#include "heatprop/kernel.hpp"
#include "heatprop/mollifier.hpp"
#include "heatprop/oracle.hpp"
#include "heatprop/propagator.hpp"
#include "heatprop/veryweak.hpp"

namespace heatprop {

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& s, int line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'", line);
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

inline std::vector<double> parse_number_list(const std::string& s, int line) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        out.push_back(parse_number(tok, line));
    }
    return out;
}

/// Matrix literal [[a, b], [c, d]].
inline SymMat parse_matrix(const std::string& text, int line) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.size() < 4 || s.front() != '[' || s.back() != ']')
        throw ParseError("matrix literal must look like [[a,b],[c,d]]", line);
    std::vector<std::vector<double>> rows;
    size_t i = 1;
    while (i < s.size() - 1) {
        if (s[i] == ',') {
            ++i;
            continue;
        }
        if (s[i] != '[') throw ParseError("expected '[' starting a matrix row", line);
        size_t close = s.find(']', i);
        if (close == std::string::npos)
            throw ParseError("unterminated matrix row", line);
        std::vector<double> row;
        for (const std::string& item : split(s.substr(i + 1, close - i - 1), ','))
            if (!item.empty()) row.push_back(parse_number(item, line));
        rows.push_back(row);
        i = close + 1;
    }
    const int n = static_cast<int>(rows.size());
    if (n < 1 || n > kMaxDim) throw ParseError("matrix dimension must be 1..4", line);
    SymMat m(n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n)
            throw ParseError("matrix rows must all have length " + std::to_string(n),
                             line);
        for (int c = 0; c < n; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

/// Recursive-descent parser for the closed-form scalar family:
/// sums of c, c*t^k, c*sin(w*t), c*cos(w*t), c*exp(w*t).
class ExprParser {
public:
    ExprParser(const std::string& text, int line) : s_(text), line_(line) {}

    ScalarExpr parse() {
        ScalarExpr e;
        skip_ws();
        bool first = true;
        while (pos_ < s_.size()) {
            double sign = 1.0;
            skip_ws();
            if (pos_ >= s_.size()) break;
            if (s_[pos_] == '+' || s_[pos_] == '-') {
                sign = s_[pos_] == '-' ? -1.0 : 1.0;
                ++pos_;
            } else if (!first) {
                fail("expected '+' or '-' between terms");
            }
            e.terms.push_back(parse_term(sign));
            first = false;
            skip_ws();
        }
        if (e.terms.empty()) fail("empty expression");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("expression '" + s_ + "': " + msg, line_);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool peek_number() {
        return pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
    }

    double read_number() {
        size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        try {
            size_t used = 0;
            double v = std::stod(s_.substr(pos_, end - pos_), &used);
            if (used != end - pos_) fail("bad number");
            pos_ = end;
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("bad number");
        }
    }

    std::string read_ident() {
        size_t end = pos_;
        while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end])))
            ++end;
        std::string id = s_.substr(pos_, end - pos_);
        pos_ = end;
        return id;
    }

    ScalarTerm parse_term(double sign) {
        skip_ws();
        double coef = sign;
        bool have_coef = false;
        if (peek_number()) {
            coef *= read_number();
            have_coef = true;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '*') {
                ++pos_;
                skip_ws();
            } else {
                return {ScalarTerm::Kind::Poly, coef, 0.0};
            }
        }
        if (pos_ >= s_.size()) {
            if (have_coef) return {ScalarTerm::Kind::Poly, coef, 0.0};
            fail("dangling operator");
        }
        if (s_[pos_] == 't') {
            ++pos_;
            double power = 1.0;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '^') {
                ++pos_;
                skip_ws();
                power = read_number();
                if (power < 0.0 || power != std::floor(power))
                    fail("powers of t must be nonnegative integers");
            }
            return {ScalarTerm::Kind::Poly, coef, power};
        }
        const std::string id = read_ident();
        ScalarTerm::Kind kind;
        if (id == "sin")
            kind = ScalarTerm::Kind::Sin;
        else if (id == "cos")
            kind = ScalarTerm::Kind::Cos;
        else if (id == "exp")
            kind = ScalarTerm::Kind::Exp;
        else
            fail("unknown function or symbol '" + id + "'");
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '(' after " + id);
        ++pos_;
        skip_ws();
        double rate = 1.0;
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            neg = s_[pos_] == '-';
            ++pos_;
            skip_ws();
        }
        if (peek_number()) {
            rate = read_number();
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '*') {
                ++pos_;
                skip_ws();
            }
        }
        if (neg) rate = -rate;
        if (pos_ < s_.size() && s_[pos_] == 't') {
            ++pos_;
            skip_ws();
        } else {
            fail("argument of " + id + " must mention t");
        }
        if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
        ++pos_;
        return {kind, coef, rate};
    }

    std::string s_;
    int line_;
    size_t pos_ = 0;
};

inline ScalarExpr parse_expr(const std::string& text, int line) {
    return ExprParser(text, line).parse();
}

}  // namespace detail

struct InitialSpec {
    enum class Kind { Gaussian, Plateau, OneHot, File };
    Kind kind = Kind::Gaussian;
    std::optional<SpdMatrix> sigma;
    double amplitude = 1.0;
    double height = 1.0;
    double radius = 1.0;
    std::string path;

    Field build(const SpatialGrid& grid) const {
        switch (kind) {
            case Kind::Gaussian: {
                SpdMatrix s = sigma ? *sigma : SpdMatrix::identity(grid.dim);
                return field_from_gaussian(grid, GaussianState{s, amplitude});
            }
            case Kind::Plateau:
                return sample_field(grid, [&](std::span<const double> x) {
                    for (double c : x)
                        if (std::abs(c) > radius) return 0.0;
                    return height;
                });
            case Kind::OneHot: {
                Field f(grid);
                std::size_t flat = 0;
                for (int d = 0; d < grid.dim; ++d)
                    flat = flat * static_cast<std::size_t>(grid.n) +
                           static_cast<std::size_t>(grid.n / 2);
                f.values[flat] = 1.0 / grid.cell_volume();
                return f;
            }
            case Kind::File: {
                Field f = read_field(path);
                if (!(f.grid == grid))
                    throw ValidationError("initial field file grid differs from [grid]");
                return f;
            }
        }
        throw ValidationError("unreachable initial kind");
    }
};

struct SourceSpec {
    enum class Kind { Zero, SeparableGaussian };
    Kind kind = Kind::Zero;
    std::optional<SpdMatrix> sigma;
    ScalarExpr modulation = ScalarExpr::constant(1.0);

    bool active() const { return kind != Kind::Zero; }

    SourceFn build(const SpatialGrid& grid) const {
        if (kind == Kind::Zero) return {};
        SpdMatrix s = sigma ? *sigma : SpdMatrix::identity(grid.dim);
        Field shape = field_from_gaussian(grid, GaussianState{s, 1.0});
        ScalarExpr mod = modulation;
        return [shape, mod](double t) {
            Field f = shape;
            const double m = mod.value(t);
            for (double& v : f.values) v *= m;
            return f;
        };
    }
};

struct LpLqTuple {
    double p = 1.0, q = 1.0, r = 1.0;
};

struct VerifySpec {
    std::vector<double> energy_qs{1.5, 2.0, 4.0};
    std::vector<LpLqTuple> lplq;
    std::vector<DecayParams> decay;
};

struct NetSpec {
    std::vector<double> epsilons = default_epsilon_grid();
    MollifierSpec mollifier_a{MollifierSpec::Kind::QuarticBump};
    MollifierSpec mollifier_b{MollifierSpec::Kind::SexticBump};
    std::vector<SeminormKind> seminorms{SeminormKind::SupL2, SeminormKind::SupH1};
};

struct CertifySpec {
    std::vector<double> norm_ps{1.0, 1.5, 2.0, 3.0,
                                std::numeric_limits<double>::infinity()};
    std::vector<double> delta_eps{1e-1, 3.16227766016838e-2, 1e-2,
                                  3.16227766016838e-3, 1e-3};
    double residual_h = 1e-4;
    double residual_time = 1.0;
};

/// Parsed scenario: grid, model, data, times, and per-subcommand settings.
struct Scenario {
    std::uint64_t seed = 42;
    SpatialGrid grid{1, 256, 12.0};
    std::optional<DiffusivityModel> model;
    InitialSpec initial;
    SourceSpec source;
    std::vector<double> times{0.0, 0.5, 1.0};
    int panels = 16;
    VerifySpec verify;
    NetSpec net;
    CertifySpec certify;

    const DiffusivityModel& require_model() const {
        if (!model) throw ValidationError("scenario has no [diffusivity] section");
        return *model;
    }
};

namespace detail {

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using RawSection = std::map<std::string, RawEntry>;

inline std::vector<double> parse_times_value(const std::string& v, int line) {
    const std::string t = trim(v);
    if (t.rfind("linspace(", 0) == 0 && t.back() == ')') {
        auto args = split(t.substr(9, t.size() - 10), ',');
        if (args.size() != 3) throw ParseError("linspace needs (start, stop, count)", line);
        const double a = parse_number(args[0], line);
        const double b = parse_number(args[1], line);
        const int count = static_cast<int>(parse_number(args[2], line));
        if (count < 2 || !(b > a)) throw ParseError("bad linspace range", line);
        std::vector<double> out(count);
        for (int i = 0; i < count; ++i)
            out[i] = a + (b - a) * static_cast<double>(i) / (count - 1);
        return out;
    }
    return parse_number_list(t, line);
}

inline std::vector<double> parse_eps_value(const std::string& v, int line) {
    const std::string t = trim(v);
    if (t.rfind("geometric(", 0) == 0 && t.back() == ')') {
        auto args = split(t.substr(10, t.size() - 11), ',');
        if (args.size() != 3)
            throw ParseError("geometric needs (start, stop, count)", line);
        const double a = parse_number(args[0], line);
        const double b = parse_number(args[1], line);
        const int count = static_cast<int>(parse_number(args[2], line));
        if (count < 2 || !(a > b) || !(b > 0.0))
            throw ParseError("geometric needs start > stop > 0", line);
        std::vector<double> out(count);
        const double ratio = std::pow(b / a, 1.0 / (count - 1));
        for (int i = 0; i < count; ++i) out[i] = a * std::pow(ratio, i);
        return out;
    }
    return parse_number_list(t, line);
}

inline Rotation parse_rotation(const std::string& text, int dim, int line) {
    const std::string t = trim(text);
    if (t.find("givens") == std::string::npos) {
        if (dim != 2)
            throw ParseError("a bare rotation angle is only defined for dim 2; use "
                             "givens(i,j,theta) terms",
                             line);
        return Rotation::givens(2, 0, 1, parse_number(t, line));
    }
    Rotation rot = Rotation::identity(dim);
    size_t pos = 0;
    while (pos < t.size()) {
        size_t g = t.find("givens(", pos);
        if (g == std::string::npos) break;
        size_t close = t.find(')', g);
        if (close == std::string::npos) throw ParseError("unterminated givens(...)", line);
        auto args = split(t.substr(g + 7, close - g - 7), ',');
        if (args.size() != 3) throw ParseError("givens needs (i, j, theta)", line);
        const int i = static_cast<int>(parse_number(args[0], line));
        const int j = static_cast<int>(parse_number(args[1], line));
        if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
            throw ParseError("givens axes out of range", line);
        rot.premultiply(Rotation::givens(dim, i, j, parse_number(args[2], line)));
        pos = close + 1;
    }
    return rot;
}

inline DiffusivityModel build_model(RawSection& sec) {
    auto get = [&](const std::string& key) -> RawEntry* {
        auto it = sec.find(key);
        if (it == sec.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };
    RawEntry* kind = get("kind");
    if (!kind) throw ValidationError("[diffusivity] needs a 'kind' key");
    const std::string k = trim(kind->value);
    try {
        if (k == "constant") {
            RawEntry* m = get("matrix");
            if (!m) throw ValidationError("[diffusivity] constant needs 'matrix'");
            return DiffusivityModel::constant(
                SpdMatrix(parse_matrix(m->value, m->line)));
        }
        if (k == "piecewise") {
            RawEntry* b = get("breakpoints");
            RawEntry* v = get("values");
            if (!b || !v)
                throw ValidationError("[diffusivity] piecewise needs 'breakpoints' and 'values'");
            std::vector<double> bps = parse_number_list(b->value, b->line);
            std::vector<SpdMatrix> vals;
            for (const std::string& item : split(v->value, ';'))
                vals.emplace_back(parse_matrix(item, v->line));
            return DiffusivityModel::piecewise_constant(std::move(bps), std::move(vals));
        }
        if (k == "smooth") {
            RawEntry* d = get("diag");
            if (!d) throw ValidationError("[diffusivity] smooth needs 'diag'");
            std::vector<ScalarExpr> diag;
            for (const std::string& item : split(d->value, ';'))
                diag.push_back(parse_expr(item, d->line));
            RawEntry* r = get("rotation");
            if (r)
                return DiffusivityModel::smooth_parametric(
                    std::move(diag),
                    parse_rotation(r->value, static_cast<int>(diag.size()), r->line));
            return DiffusivityModel::smooth_parametric(std::move(diag));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("[diffusivity] " + std::string(e.what()));
    }
    throw ValidationError("[diffusivity] unknown kind '" + k + "'");
}

}  // namespace detail

/// Parse scenario text.  Unknown sections or keys, malformed values, and
/// semantically invalid settings all throw with the offending line.
inline Scenario parse_scenario(const std::string& text) {
    using detail::RawEntry;
    std::map<std::string, detail::RawSection> sections;
    std::map<std::string, RawEntry> top;
    {
        std::istringstream is(text);
        std::string raw;
        int lineno = 0;
        std::string current;
        while (std::getline(is, raw)) {
            ++lineno;
            const size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string line = detail::trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ParseError("unterminated section header", lineno);
                current = detail::trim(line.substr(1, line.size() - 2));
                if (current.empty()) throw ParseError("empty section name", lineno);
                sections[current];
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected 'key = value'", lineno);
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError("empty key", lineno);
            RawEntry entry{value, lineno, false};
            if (current.empty())
                top[key] = entry;
            else
                sections[current][key] = entry;
        }
    }

    static const std::map<std::string, std::vector<std::string>> known = {
        {"grid", {"dim", "points", "half_width"}},
        {"diffusivity", {"kind", "matrix", "breakpoints", "values", "diag", "rotation"}},
        {"initial", {"kind", "sigma", "amplitude", "height", "radius", "file"}},
        {"source", {"kind", "sigma", "modulation"}},
        {"times", {"times"}},
        {"duhamel", {"panels"}},
        {"verify", {"energy_q", "lplq", "decay"}},
        {"net", {"epsilons", "mollifier", "mollifier_b", "seminorms"}},
        {"certify", {"norm_p", "delta_eps", "residual_h", "residual_time"}},
    };
    for (const auto& [name, sec] : sections) {
        auto it = known.find(name);
        if (it == known.end()) {
            int line = sec.empty() ? 0 : sec.begin()->second.line;
            throw ParseError("unknown section [" + name + "]", line);
        }
        for (const auto& [key, entry] : sec) {
            if (std::find(it->second.begin(), it->second.end(), key) ==
                it->second.end())
                throw ParseError("unknown key '" + key + "' in [" + name + "]",
                                 entry.line);
        }
    }
    for (const auto& [key, entry] : top)
        if (key != "seed")
            throw ParseError("unknown top-level key '" + key + "'", entry.line);

    Scenario sc;
    if (auto it = top.find("seed"); it != top.end())
        sc.seed = static_cast<std::uint64_t>(
            detail::parse_number(it->second.value, it->second.line));

    if (auto git = sections.find("grid"); git != sections.end()) {
        auto& g = git->second;
        int dim = 1;
        std::int64_t n = 256;
        double half_width = 12.0;
        if (auto it = g.find("dim"); it != g.end())
            dim = static_cast<int>(detail::parse_number(it->second.value, it->second.line));
        if (auto it = g.find("points"); it != g.end())
            n = static_cast<std::int64_t>(
                detail::parse_number(it->second.value, it->second.line));
        if (auto it = g.find("half_width"); it != g.end())
            half_width = detail::parse_number(it->second.value, it->second.line);
        sc.grid = SpatialGrid(dim, n, half_width);
    }

    if (auto dit = sections.find("diffusivity"); dit != sections.end()) {
        sc.model = detail::build_model(dit->second);
        if (sc.model->dim() != sc.grid.dim)
            throw ValidationError("[diffusivity] dimension does not match [grid]");
    }

    if (auto iit = sections.find("initial"); iit != sections.end()) {
        auto& sec = iit->second;
        if (auto it = sec.find("kind"); it != sec.end()) {
            const std::string k = detail::trim(it->second.value);
            if (k == "gaussian")
                sc.initial.kind = InitialSpec::Kind::Gaussian;
            else if (k == "plateau")
                sc.initial.kind = InitialSpec::Kind::Plateau;
            else if (k == "one_hot")
                sc.initial.kind = InitialSpec::Kind::OneHot;
            else if (k == "file")
                sc.initial.kind = InitialSpec::Kind::File;
            else
                throw ParseError("unknown initial kind '" + k + "'", it->second.line);
        }
        if (auto it = sec.find("sigma"); it != sec.end()) {
            try {
                sc.initial.sigma =
                    SpdMatrix(detail::parse_matrix(it->second.value, it->second.line));
            } catch (const NotSpd& e) {
                throw ValidationError("[initial] sigma: " + std::string(e.what()));
            }
        }
        if (auto it = sec.find("amplitude"); it != sec.end())
            sc.initial.amplitude = detail::parse_number(it->second.value, it->second.line);
        if (auto it = sec.find("height"); it != sec.end())
            sc.initial.height = detail::parse_number(it->second.value, it->second.line);
        if (auto it = sec.find("radius"); it != sec.end())
            sc.initial.radius = detail::parse_number(it->second.value, it->second.line);
        if (auto it = sec.find("file"); it != sec.end())
            sc.initial.path = detail::trim(it->second.value);
        if (sc.initial.kind == InitialSpec::Kind::File && sc.initial.path.empty())
            throw ValidationError("[initial] kind file needs a 'file' key");
        if (sc.initial.sigma && sc.initial.sigma->dim() != sc.grid.dim)
            throw ValidationError("[initial] sigma dimension does not match [grid]");
    }

    if (auto sit = sections.find("source"); sit != sections.end()) {
        auto& sec = sit->second;
        if (auto it = sec.find("kind"); it != sec.end()) {
            const std::string k = detail::trim(it->second.value);
            if (k == "zero")
                sc.source.kind = SourceSpec::Kind::Zero;
            else if (k == "gaussian")
                sc.source.kind = SourceSpec::Kind::SeparableGaussian;
            else
                throw ParseError("unknown source kind '" + k + "'", it->second.line);
        }
        if (auto it = sec.find("sigma"); it != sec.end()) {
            try {
                sc.source.sigma =
                    SpdMatrix(detail::parse_matrix(it->second.value, it->second.line));
            } catch (const NotSpd& e) {
                throw ValidationError("[source] sigma: " + std::string(e.what()));
            }
        }
        if (auto it = sec.find("modulation"); it != sec.end())
            sc.source.modulation = detail::parse_expr(it->second.value, it->second.line);
        if (sc.source.sigma && sc.source.sigma->dim() != sc.grid.dim)
            throw ValidationError("[source] sigma dimension does not match [grid]");
    }

    if (auto tit = sections.find("times"); tit != sections.end()) {
        if (auto it = tit->second.find("times"); it != tit->second.end()) {
            sc.times = detail::parse_times_value(it->second.value, it->second.line);
            if (sc.times.empty())
                throw ValidationError("[times] list must not be empty");
            for (size_t i = 0; i < sc.times.size(); ++i) {
                if (!(sc.times[i] >= 0.0))
                    throw ValidationError("[times] entries must be nonnegative");
                if (i > 0 && !(sc.times[i] > sc.times[i - 1]))
                    throw ValidationError("[times] entries must be strictly increasing");
            }
        }
    }

    if (auto pit = sections.find("duhamel"); pit != sections.end()) {
        if (auto it = pit->second.find("panels"); it != pit->second.end()) {
            sc.panels = static_cast<int>(
                detail::parse_number(it->second.value, it->second.line));
            if (sc.panels < 1 || sc.panels > 4096)
                throw ValidationError("[duhamel] panels must lie in 1..4096");
        }
    }

    if (auto vit = sections.find("verify"); vit != sections.end()) {
        auto& sec = vit->second;
        if (auto it = sec.find("energy_q"); it != sec.end()) {
            sc.verify.energy_qs =
                detail::parse_number_list(it->second.value, it->second.line);
            for (double q : sc.verify.energy_qs)
                if (!(q >= 1.0))
                    throw ValidationError("[verify] energy_q entries must be >= 1");
        }
        if (auto it = sec.find("lplq"); it != sec.end()) {
            for (const std::string& item : detail::split(it->second.value, ';')) {
                auto nums = detail::parse_number_list(item, it->second.line);
                if (nums.size() != 3)
                    throw ValidationError("[verify] lplq entries are 'p q r' triples");
                try {
                    require_young(nums[0], nums[1], nums[2]);
                } catch (const Error& e) {
                    throw ValidationError("[verify] lplq: " + std::string(e.what()));
                }
                sc.verify.lplq.push_back({nums[0], nums[1], nums[2]});
            }
        }
        if (auto it = sec.find("decay"); it != sec.end()) {
            for (const std::string& item : detail::split(it->second.value, ';')) {
                auto nums = detail::parse_number_list(item, it->second.line);
                if (nums.size() != 4)
                    throw ValidationError("[verify] decay entries are 'p q r alpha'");
                try {
                    require_young(nums[0], nums[1], nums[2]);
                    if (!(nums[3] > 1.0))
                        throw BadExponent("alpha must exceed 1");
                } catch (const Error& e) {
                    throw ValidationError("[verify] decay: " + std::string(e.what()));
                }
                sc.verify.decay.push_back({nums[0], nums[1], nums[2], nums[3]});
            }
        }
    }

    if (auto nit = sections.find("net"); nit != sections.end()) {
        auto& sec = nit->second;
        if (auto it = sec.find("epsilons"); it != sec.end()) {
            sc.net.epsilons = detail::parse_eps_value(it->second.value, it->second.line);
        }
        if (auto it = sec.find("mollifier"); it != sec.end()) {
            try {
                sc.net.mollifier_a = MollifierSpec::parse(detail::trim(it->second.value));
            } catch (const BadMollifier& e) {
                throw ValidationError("[net] mollifier: " + std::string(e.what()));
            }
        }
        if (auto it = sec.find("mollifier_b"); it != sec.end()) {
            try {
                sc.net.mollifier_b = MollifierSpec::parse(detail::trim(it->second.value));
            } catch (const BadMollifier& e) {
                throw ValidationError("[net] mollifier_b: " + std::string(e.what()));
            }
        }
        if (auto it = sec.find("seminorms"); it != sec.end()) {
            sc.net.seminorms.clear();
            std::istringstream is(it->second.value);
            std::string tok;
            while (is >> tok) {
                if (tok == "l2")
                    sc.net.seminorms.push_back(SeminormKind::SupL2);
                else if (tok == "h1")
                    sc.net.seminorms.push_back(SeminormKind::SupH1);
                else
                    throw ParseError("unknown seminorm '" + tok + "' (use l2, h1)",
                                     it->second.line);
            }
            if (sc.net.seminorms.empty())
                throw ValidationError("[net] seminorms must not be empty");
        }
    }

    if (auto cit = sections.find("certify"); cit != sections.end()) {
        auto& sec = cit->second;
        if (auto it = sec.find("norm_p"); it != sec.end()) {
            sc.certify.norm_ps.clear();
            std::istringstream is(it->second.value);
            std::string tok;
            while (is >> tok) {
                if (tok == "inf")
                    sc.certify.norm_ps.push_back(std::numeric_limits<double>::infinity());
                else
                    sc.certify.norm_ps.push_back(detail::parse_number(tok, it->second.line));
            }
        }
        if (auto it = sec.find("delta_eps"); it != sec.end())
            sc.certify.delta_eps = detail::parse_eps_value(it->second.value, it->second.line);
        if (auto it = sec.find("residual_h"); it != sec.end())
            sc.certify.residual_h = detail::parse_number(it->second.value, it->second.line);
        if (auto it = sec.find("residual_time"); it != sec.end())
            sc.certify.residual_time = detail::parse_number(it->second.value, it->second.line);
    }

    return sc;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open scenario file " + path.string());
    std::string text((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    return parse_scenario(text);
}

}  // namespace heatprop
