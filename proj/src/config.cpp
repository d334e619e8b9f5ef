#include "gvx/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gvx {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw InvalidArgument("config: bad number for " + key + ": '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size())
        throw InvalidArgument("config: bad integer for " + key + ": '" + s + "'");
    return v;
}

// Complex literal: "inf", "a", "bi", "a+bi", "a-bi", with "i"/"-i" for the
// unit imaginary part.
cplx parse_complex(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw InvalidArgument("empty complex literal");
    if (s.back() != 'i') {  // purely real
        char* end = nullptr;
        const double re = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size())
            throw InvalidArgument("bad complex literal: '" + s + "'");
        return cplx(re, 0.0);
    }
    // strip the trailing 'i', then split at the last +/- that is not an
    // exponent sign and not the leading sign
    std::string body = s.substr(0, s.size() - 1);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') &&
            !(body[i - 1] == 'e' || body[i - 1] == 'E')) {
            split = i;
            break;
        }
    }
    auto parse_part = [](std::string p, double dflt) {
        p = trim(p);
        if (p.empty() || p == "+") return dflt;
        if (p == "-") return -dflt;
        char* end = nullptr;
        const double v = std::strtod(p.c_str(), &end);
        if (end != p.c_str() + p.size())
            throw InvalidArgument("bad complex literal part: '" + p + "'");
        return v;
    };
    if (split == std::string::npos) return cplx(0.0, parse_part(body, 1.0));
    const double re = parse_part(body.substr(0, split), 0.0);
    const double im = parse_part(body.substr(split), 1.0);
    return cplx(re, im);
}

std::string fmt_complex(cplx z) {
    if (z.imag() == 0.0) return fmt_double(z.real());
    std::string out;
    if (z.real() != 0.0) {
        out += fmt_double(z.real());
        if (z.imag() >= 0.0) out += "+";
    }
    out += fmt_double(z.imag());
    out += "i";
    return out;
}

} // namespace

Divisor parse_divisor(const std::string& text) {
    std::vector<DivisorPoint> pts;
    std::string term;
    std::vector<std::string> terms;
    int depth = 0;
    for (char ch : text) {
        if (ch == '[') ++depth;
        if (ch == ']') --depth;
        if (ch == '+' && depth == 0) {
            terms.push_back(term);
            term.clear();
        } else {
            term += ch;
        }
    }
    terms.push_back(term);
    for (const auto& raw : terms) {
        const std::string t = trim(raw);
        if (t.empty()) throw InvalidDivisor("empty divisor term");
        const size_t star = t.find('*');
        if (star == std::string::npos || t[t.size() - 1] != ']')
            throw InvalidDivisor("divisor term must look like m*[point]: '" + t + "'");
        const size_t open = t.find('[', star);
        if (open == std::string::npos)
            throw InvalidDivisor("divisor term must look like m*[point]: '" + t + "'");
        DivisorPoint p;
        p.multiplicity = static_cast<int>(parse_long(trim(t.substr(0, star)), "multiplicity"));
        const std::string point = trim(t.substr(open + 1, t.size() - open - 2));
        if (point == "inf") {
            p.at_infinity = true;
        } else {
            p.z = parse_complex(point);
        }
        pts.push_back(p);
    }
    return Divisor(pts);
}

std::string serialize_divisor(const Divisor& d) {
    std::string out;
    for (size_t i = 0; i < d.points().size(); ++i) {
        const auto& p = d.points()[i];
        if (i) out += " + ";
        out += std::to_string(p.multiplicity) + "*[";
        out += p.at_infinity ? "inf" : fmt_complex(p.z);
        out += "]";
    }
    return out;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "command = " << c.command << "\n";
    o << "surface = " << c.surface << "\n";
    o << "n1 = " << c.n1 << "\n";
    o << "n2 = " << c.n2 << "\n";
    o << "lattice_re = " << fmt_double(c.lattice_re) << "\n";
    o << "lattice_im = " << fmt_double(c.lattice_im) << "\n";
    o << "divisor = " << c.divisor << "\n";
    o << "tau = " << fmt_double(c.tau) << "\n";
    o << "alpha = " << fmt_double(c.alpha) << "\n";
    o << "futaki_n = " << c.futaki_n << "\n";
    o << "futaki_l = " << c.futaki_l << "\n";
    o << "solver = " << c.solver << "\n";
    o << "tol = " << fmt_double(c.tol) << "\n";
    o << "max_iter = " << c.max_iter << "\n";
    o << "step_init = " << fmt_double(c.step_init) << "\n";
    o << "step_min = " << fmt_double(c.step_min) << "\n";
    o << "out = " << c.out << "\n";
    o << "seed = " << c.seed << "\n";
    o << "verbose = " << (c.verbose ? "true" : "false") << "\n";
    o << "sweep_param = " << c.sweep_param << "\n";
    o << "sweep_values = " << c.sweep_values << "\n";
    return o.str();
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config: expected 'key = value': '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "command") c.command = val;
        else if (key == "surface") c.surface = val;
        else if (key == "n1") c.n1 = static_cast<int>(parse_long(val, key));
        else if (key == "n2") c.n2 = static_cast<int>(parse_long(val, key));
        else if (key == "lattice_re") c.lattice_re = parse_double(val, key);
        else if (key == "lattice_im") c.lattice_im = parse_double(val, key);
        else if (key == "divisor") c.divisor = val;
        else if (key == "tau") c.tau = parse_double(val, key);
        else if (key == "alpha") c.alpha = parse_double(val, key);
        else if (key == "futaki_n") c.futaki_n = static_cast<int>(parse_long(val, key));
        else if (key == "futaki_l") c.futaki_l = static_cast<int>(parse_long(val, key));
        else if (key == "solver") c.solver = val;
        else if (key == "tol") c.tol = parse_double(val, key);
        else if (key == "max_iter") c.max_iter = static_cast<int>(parse_long(val, key));
        else if (key == "step_init") c.step_init = parse_double(val, key);
        else if (key == "step_min") c.step_min = parse_double(val, key);
        else if (key == "out") c.out = val;
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_long(val, key));
        else if (key == "verbose") c.verbose = (val == "true" || val == "1");
        else if (key == "sweep_param") c.sweep_param = val;
        else if (key == "sweep_values") c.sweep_values = val;
        else throw InvalidArgument("config: unknown key '" + key + "'");
    }
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> errs;
    auto bad = [&errs](const std::string& m) { errs.push_back(m); };
    if (c.command != "classify" && c.command != "solve" && c.command != "futaki" &&
        c.command != "sweep" && c.command != "audit")
        bad("command must be classify|solve|futaki|sweep|audit");
    if (c.surface != "torus" && c.surface != "sphere") bad("surface must be torus|sphere");
    if (c.n1 < 8 || c.n2 < 8) bad("resolution too small: need n1, n2 >= 8");
    if (c.surface == "sphere" && c.n2 % 2 != 0) bad("sphere n2 must be even");
    if (c.surface == "torus" && !(c.lattice_im > 0.0)) bad("lattice_im must be positive");
    if (!(c.tau > 0.0)) bad("tau must be positive");
    if (c.alpha < 0.0) bad("alpha must be >= 0");
    if (!(c.tol > 0.0)) bad("tol must be positive");
    if (c.max_iter < 1) bad("max_iter must be >= 1");
    if (!(c.step_init > 0.0) || !(c.step_min > 0.0)) bad("steps must be positive");
    if (c.command == "futaki") {
        if (c.futaki_n < 1 || c.futaki_l < 0 || c.futaki_l >= c.futaki_n)
            bad("futaki needs 0 <= l < N");
    }
    if (c.command == "classify" || c.command == "solve" || c.command == "audit" ||
        c.command == "sweep") {
        try {
            Divisor d = parse_divisor(c.divisor);
            if (c.surface == "torus" && d.has_infinity())
                bad("torus divisors cannot contain inf");
        } catch (const Error& e) {
            bad(std::string("divisor: ") + e.what());
        }
    }
    return errs;
}

} // namespace gvx
