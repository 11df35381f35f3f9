#include "vsa/problem_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vsa {

namespace {

const std::vector<std::string> kCurveVars{"r"};
const std::vector<std::string> kKernelVars{"r", "s"};
const std::vector<std::string> kTransformVars{"w"};

Segment make_segment(const std::string& lo, const std::string& hi, const std::string& ker) {
    return Segment{Expr::parse(lo, kCurveVars), Expr::parse(hi, kCurveVars),
                   Expr::parse(ker, kKernelVars)};
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (...) {
    }
    throw LoadError(line, std::string("invalid number for ") + what + ": '" + s + "'");
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ProblemSpec builtin_example(int id) {
    ProblemSpec p;
    p.a = 0.0;
    p.c = 0.0;
    switch (id) {
        case 1:
            p.label = "Example 1";
            p.b = 2.0;
            p.default_point = 0.2;
            p.segments.push_back(make_segment("0", "r/8", "1+r+s"));
            p.segments.push_back(make_segment("r/8", "r/2", "2+r*s"));
            p.segments.push_back(make_segment("r/2", "3*r/4", "r+s-1"));
            p.segments.push_back(make_segment("3*r/4", "r", "-4"));
            p.rhs = Expr::parse(
                "(1/128)*(-4 - (1/8)*(16*r + 69*r^2 + 15*r^3)"
                " - exp(r/4)*(r^2 - 13*r + 12)"
                " + exp(r)*(4*r^2 - 16*r + 28)"
                " + exp(3*r/2)*(14*r + 20) - 32*exp(2*r))",
                kCurveVars);
            p.exact = Expr::parse("(exp(2*r)-1)/8", kCurveVars);
            break;
        case 2:
            p.label = "Example 2";
            p.b = 4.71238898038468986;  // 3*pi/2
            p.default_point = 0.5;
            p.segments.push_back(make_segment("0", "sin(r/2)", "2"));
            p.segments.push_back(make_segment("sin(r/2)", "2*sin(r/3)", "-1"));
            p.segments.push_back(make_segment("2*sin(r/3)", "r", "1"));
            p.rhs = Expr::parse("r^3/3 + sin(r/2)^3 - (16/3)*sin(r/3)^3", kCurveVars);
            p.exact = Expr::parse("r^2", kCurveVars);
            break;
        case 3:
            p.label = "Example 3";
            p.b = 2.0;
            p.default_point = 0.7;
            p.segments.push_back(make_segment("0", "r/4", "1+r+s"));
            p.segments.push_back(make_segment("r/4", "r/2", "2+r*s"));
            p.segments.push_back(make_segment("r/2", "r", "1+r+s"));
            p.rhs = Expr::parse("31*r^6/40960 + 1099*r^5/20480 + 271*r^4/8192", kCurveVars);
            p.exact = Expr::parse("r^3/8", kCurveVars);
            break;
        case 4:
            p.label = "Example 4";
            p.b = 2.0;
            p.default_point = 0.1;
            p.weight = QuadConfig::Weight::Abel;
            p.segments.push_back(make_segment("0", "r", "1"));
            p.rhs = Expr::parse("(2/3)*pi*r^3", kCurveVars);
            p.exact = Expr::parse("pi*r^3", kCurveVars);
            break;
        case 5:
            p.label = "Example 5";
            p.b = 2.0;
            p.default_point = 0.4;
            p.weight = QuadConfig::Weight::Abel;
            p.segments.push_back(make_segment("0", "r", "1"));
            p.rhs = Expr::parse("pi + r", kCurveVars);
            p.transform = Expr::parse("sin(w)", kTransformVars);
            p.exact = Expr::parse("sin(r+2)", kCurveVars);
            break;
        default:
            throw std::invalid_argument("builtin_example: id must be 1..5");
    }
    return p;
}

ProblemSpec parse_problem_text(const std::string& text) {
    ProblemSpec p;
    bool have_interval = false, have_point = false, have_rhs = false, have_segment = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (line.rfind("segment:", 0) == 0) {
            std::string body = line.substr(8);
            std::string lo, hi, ker;
            std::istringstream parts(body);
            std::string item;
            while (std::getline(parts, item, ';')) {
                std::size_t eq = item.find('=');
                if (eq == std::string::npos)
                    throw LoadError(lineno, "segment items must look like key=expr");
                std::string key = trim(item.substr(0, eq));
                std::string val = trim(item.substr(eq + 1));
                if (key == "rho_lo") lo = val;
                else if (key == "rho_hi") hi = val;
                else if (key == "kernel") ker = val;
                else throw LoadError(lineno, "unknown segment item '" + key + "'");
            }
            if (lo.empty() || hi.empty() || ker.empty())
                throw LoadError(lineno, "segment needs rho_lo, rho_hi and kernel");
            try {
                p.segments.push_back(make_segment(lo, hi, ker));
            } catch (const ParseError& e) {
                throw LoadError(lineno, e.what());
            }
            have_segment = true;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw LoadError(lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "interval") {
                std::istringstream iv(val);
                std::string sa_, sb_;
                if (!(iv >> sa_ >> sb_)) throw LoadError(lineno, "interval needs two numbers");
                p.a = parse_number(sa_, lineno, "interval");
                p.b = parse_number(sb_, lineno, "interval");
                have_interval = true;
            } else if (key == "center") {
                p.c = parse_number(val, lineno, "center");
            } else if (key == "point") {
                p.default_point = parse_number(val, lineno, "point");
                have_point = true;
            } else if (key == "rhs") {
                p.rhs = Expr::parse(val, kCurveVars);
                have_rhs = true;
            } else if (key == "weight") {
                if (val == "abel") p.weight = QuadConfig::Weight::Abel;
                else if (val == "none") p.weight = QuadConfig::Weight::None;
                else throw LoadError(lineno, "weight must be 'abel' or 'none'");
            } else if (key == "transform") {
                p.transform = Expr::parse(val, kTransformVars);
            } else if (key == "exact") {
                p.exact = Expr::parse(val, kCurveVars);
            } else if (key == "label") {
                p.label = val;
            } else {
                throw LoadError(lineno, "unknown key '" + key + "'");
            }
        } catch (const ParseError& e) {
            throw LoadError(lineno, std::string(e.what()));
        }
    }
    if (!have_interval) throw LoadError("missing required key 'interval'");
    if (!have_point) throw LoadError("missing required key 'point'");
    if (!have_rhs) throw LoadError("missing required key 'rhs'");
    if (!have_segment) throw LoadError("missing required 'segment:' line");
    auto errs = validate(p);
    if (!errs.empty()) throw LoadError(errs.front());
    return p;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw LoadError("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_problem_text(ss.str());
}

std::string serialize_problem(const ProblemSpec& p) {
    std::ostringstream out;
    out << "# problem definition\n";
    if (!p.label.empty()) out << "label = " << p.label << "\n";
    out << "interval = " << fmt_num(p.a) << " " << fmt_num(p.b) << "\n";
    out << "center = " << fmt_num(p.c) << "\n";
    out << "point = " << fmt_num(p.default_point) << "\n";
    if (p.weight == QuadConfig::Weight::Abel) out << "weight = abel\n";
    for (const Segment& s : p.segments) {
        out << "segment: rho_lo=" << s.rho_lo.to_string() << "; rho_hi=" << s.rho_hi.to_string()
            << "; kernel=" << s.kernel.to_string() << "\n";
    }
    out << "rhs = " << p.rhs.to_string() << "\n";
    if (p.transform) out << "transform = " << p.transform->to_string() << "\n";
    if (p.exact) out << "exact = " << p.exact->to_string() << "\n";
    return out.str();
}

bool problems_equal(const ProblemSpec& x, const ProblemSpec& y) {
    if (x.a != y.a || x.b != y.b || x.c != y.c || x.default_point != y.default_point ||
        x.weight != y.weight || x.label != y.label || x.segments.size() != y.segments.size())
        return false;
    if (x.transform.has_value() != y.transform.has_value()) return false;
    if (x.exact.has_value() != y.exact.has_value()) return false;
    for (std::size_t i = 0; i < x.segments.size(); ++i) {
        if (!x.segments[i].rho_lo.same_structure(y.segments[i].rho_lo)) return false;
        if (!x.segments[i].rho_hi.same_structure(y.segments[i].rho_hi)) return false;
        if (!x.segments[i].kernel.same_structure(y.segments[i].kernel)) return false;
    }
    if (!x.rhs.same_structure(y.rhs)) return false;
    if (x.transform && !x.transform->same_structure(*y.transform)) return false;
    if (x.exact && !x.exact->same_structure(*y.exact)) return false;
    return true;
}

}  // namespace vsa
