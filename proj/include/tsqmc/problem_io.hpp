#pragma once

// Plain-text fixture format for two-stage problems. Blank lines and lines
// starting with '#' are ignored. Each block starts with a keyword line:
//
//   name <identifier>
//   W <r> <mbar>          followed by r rows of mbar numbers
//   q <mbar>              followed by one line of numbers
//   T <r> <m>             followed by r rows of m numbers
//   hbar <k>              deterministic tail of h(xi); d = r - k
//   c <m>
//   x_lower <m> / x_upper <m>
//   G <g> <m>, g_lower <g>, g_upper <g>     optional range rows on x
//   y_lower <mbar> / y_upper <mbar>         optional, default [0, inf)
//   mean <d> / factor <d> <d>               optional, default N(0, I)
//
// Numbers use 17 significant digits on output; "inf" and "-inf" are allowed.

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/linalg.hpp"
#include "tsqmc/lp.hpp"
#include "tsqmc/recourse.hpp"

namespace tsqmc {

namespace detail {

inline double parse_number(const std::string& tok) {
    if (tok == "inf" || tok == "+inf") return kInf;
    if (tok == "-inf") return -kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("fixture: bad number '" + tok + "'");
    }
    if (used != tok.size()) throw InvalidArgument("fixture: bad number '" + tok + "'");
    return v;
}

class FixtureReader {
public:
    explicit FixtureReader(std::istream& in) : in_(in) {}

    bool next_line(std::vector<std::string>& toks) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            std::istringstream ss(line);
            toks.clear();
            for (std::string t; ss >> t;) toks.push_back(t);
            if (!toks.empty()) return true;
        }
        return false;
    }

    std::vector<double> numbers(std::size_t count) {
        std::vector<double> out;
        std::vector<std::string> toks;
        while (out.size() < count) {
            if (!next_line(toks)) fail("unexpected end of file");
            for (const auto& t : toks) {
                try {
                    out.push_back(parse_number(t));
                } catch (const InvalidArgument& e) {
                    fail(e.what());
                }
            }
        }
        if (out.size() != count) fail("expected " + std::to_string(count) + " numbers");
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("fixture line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline void write_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
    out << key << ' ' << v.size() << '\n';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
}

inline void write_matrix(std::ostream& out, const char* key, const Matrix& m) {
    out << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

}  // namespace detail

inline TwoStageProblem read_problem(std::istream& in) {
    detail::FixtureReader rd(in);
    std::map<std::string, std::vector<double>> vecs;
    std::map<std::string, Matrix> mats;
    std::string name = "unnamed";
    std::vector<std::string> toks;
    auto count = [&](const std::string& s) {
        try {
            return static_cast<std::size_t>(std::stoul(s));
        } catch (const std::exception&) {
            rd.fail("bad size '" + s + "'");
        }
    };
    while (rd.next_line(toks)) {
        const std::string& key = toks[0];
        if (key == "name") {
            if (toks.size() != 2) rd.fail("name takes one word");
            name = toks[1];
        } else if (key == "W" || key == "T" || key == "G" || key == "factor") {
            if (toks.size() != 3) rd.fail(key + " needs rows and columns");
            const std::size_t r = count(toks[1]), c = count(toks[2]);
            const auto vals = rd.numbers(r * c);
            Matrix m(r, c);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) m(i, j) = vals[i * c + j];
            mats[key] = std::move(m);
        } else if (key == "q" || key == "hbar" || key == "c" || key == "x_lower" || key == "x_upper" ||
                   key == "g_lower" || key == "g_upper" || key == "y_lower" || key == "y_upper" || key == "mean") {
            if (toks.size() != 2) rd.fail(key + " needs a length");
            vecs[key] = rd.numbers(count(toks[1]));
        } else {
            rd.fail("unknown keyword '" + key + "'");
        }
    }
    for (const char* k : {"W", "T"})
        if (!mats.count(k)) throw InvalidArgument(std::string("fixture: missing block ") + k);
    for (const char* k : {"q", "c", "x_lower", "x_upper"})
        if (!vecs.count(k)) throw InvalidArgument(std::string("fixture: missing block ") + k);

    TwoStageProblem p;
    p.name = name;
    p.w = mats["W"];
    p.t = mats["T"];
    p.q = vecs["q"];
    p.hbar = vecs.count("hbar") ? vecs["hbar"] : std::vector<double>{};
    p.c = vecs["c"];
    p.x_set = FirstStageSet::box(vecs["x_lower"], vecs["x_upper"]);
    if (mats.count("G")) {
        p.x_set.g = mats["G"];
        p.x_set.row_lower = vecs.count("g_lower") ? vecs["g_lower"] : std::vector<double>(p.x_set.g.rows(), -kInf);
        p.x_set.row_upper = vecs.count("g_upper") ? vecs["g_upper"] : std::vector<double>(p.x_set.g.rows(), kInf);
    }
    const std::size_t mbar = p.w.cols();
    p.y_lower = vecs.count("y_lower") ? vecs["y_lower"] : std::vector<double>(mbar, 0.0);
    p.y_upper = vecs.count("y_upper") ? vecs["y_upper"] : std::vector<double>(mbar, kInf);
    if (p.hbar.size() > p.w.rows()) throw InvalidArgument("fixture: hbar longer than the rows of W");
    p.set_standard_normal();
    if (vecs.count("mean")) p.mean = vecs["mean"];
    if (mats.count("factor")) p.factor = mats["factor"];
    p.validate();
    return p;
}

inline void write_problem(std::ostream& out, const TwoStageProblem& p) {
    const auto old = out.precision(17);
    out << "name " << p.name << '\n';
    detail::write_matrix(out, "W", p.w);
    detail::write_vector(out, "q", p.q);
    detail::write_matrix(out, "T", p.t);
    detail::write_vector(out, "hbar", p.hbar);
    detail::write_vector(out, "c", p.c);
    detail::write_vector(out, "x_lower", p.x_set.lower);
    detail::write_vector(out, "x_upper", p.x_set.upper);
    if (p.x_set.g.rows() > 0) {
        detail::write_matrix(out, "G", p.x_set.g);
        detail::write_vector(out, "g_lower", p.x_set.row_lower);
        detail::write_vector(out, "g_upper", p.x_set.row_upper);
    }
    if (!p.standard_recourse()) {
        detail::write_vector(out, "y_lower", p.y_lower);
        detail::write_vector(out, "y_upper", p.y_upper);
    }
    detail::write_vector(out, "mean", p.mean);
    detail::write_matrix(out, "factor", p.factor);
    out.precision(old);
}

/// Strike-price model: W = (w, -w), q = (1, 0), so Phi(x, xi) = max(0, xi - x) / w.
/// The first-stage cost is positive here (a premium per unit of strike) so
/// that the problem over X = [0, 10] has an interior minimiser; with xi ~ N(2, 1)
/// and w = 1 it sits at x = 2.
inline TwoStageProblem strike_example(double w = 1.0, double cost = 0.5) {
    if (!(w > 0.0)) throw InvalidArgument("strike_example: w must be positive");
    TwoStageProblem p;
    p.name = "strike_example";
    p.w = Matrix{{w, -w}};
    p.q = {1.0, 0.0};
    p.t = Matrix{{1.0}};
    p.c = {cost};
    p.x_set = FirstStageSet::box({0.0}, {10.0});
    p.y_lower = {0.0, 0.0};
    p.y_upper = {kInf, kInf};
    p.mean = {2.0};
    p.factor = Matrix{{1.0}};
    p.validate();
    return p;
}

namespace detail {
inline TwoStageProblem two_dim_example(std::string name, Matrix w, std::vector<double> q) {
    TwoStageProblem p;
    p.name = std::move(name);
    p.w = std::move(w);
    p.q = std::move(q);
    p.t = Matrix::identity(2);
    p.c = {0.25, 0.25};
    p.x_set = FirstStageSet::box({-1.0, -1.0}, {1.0, 1.0});
    p.y_lower.assign(p.q.size(), 0.0);
    p.y_upper.assign(p.q.size(), kInf);
    p.set_standard_normal();
    p.validate();
    return p;
}
}  // namespace detail

/// Dual vertices (1,0), (-1,0), (0,1): phi(t) = max(|t1|, t2). Adjacent
/// vertices share a component.
inline TwoStageProblem kinked_example() {
    return detail::two_dim_example("kinked_example", Matrix{{-1.0, 1.0, 0.0}, {1.0, 1.0, -1.0}}, {1.0, 1.0, 0.0});
}

/// Dual vertices (2,-1), (-1,0), (0,1): phi(t) = max(2 t1 - t2, -t1, t2).
/// The third inequality is -z1 - 3 z2 <= 1; written as z1 + 3 z2 <= -1 the
/// set would be unbounded with only two vertices.
inline TwoStageProblem smooth_example() {
    return detail::two_dim_example("smooth_example", Matrix{{-1.0, 1.0, -1.0}, {1.0, 1.0, -3.0}}, {1.0, 1.0, 1.0});
}

}  // namespace tsqmc
