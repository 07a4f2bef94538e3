#include "floquet/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace floquet {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void malformed(const std::string& what) { fail(ErrorCode::MalformedInput, what); }

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        malformed(std::string("not valid JSON: ") + e.what());
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) malformed(where + " must be an object");
    auto it = j.find(key);
    if (it == j.end()) malformed(where + ": missing field '" + key + "'");
    return *it;
}

template <class T>
T get_as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        malformed(where + " has the wrong type");
    }
}

Interval interval_of_string(const std::string& s, const std::string& where) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return parse_decimal(s);
        Interval p = parse_decimal(s.substr(0, slash));
        Interval q = parse_decimal(s.substr(slash + 1));
        return p / q;
    } catch (const Error&) {
        malformed(where + ": cannot parse '" + s + "' as a number");
    }
}

double endpoint(const json& j, bool up, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        Interval v = interval_of_string(j.get<std::string>(), where);
        return up ? v.hi : v.lo;
    }
    if (j.is_null()) return up ? rnd::kInf : -rnd::kInf;
    malformed(where + ": endpoint must be a number or string");
}

Interval read_interval(const json& j, const std::string& where) {
    if (j.is_number()) return Interval(j.get<double>());
    if (j.is_string()) return interval_of_string(j.get<std::string>(), where);
    if (j.is_object()) {
        double lo = endpoint(need(j, "lo", where), false, where);
        double hi = endpoint(need(j, "hi", where), true, where);
        if (!(lo <= hi)) malformed(where + ": lo > hi");
        return Interval(lo, hi);
    }
    if (j.is_array() && j.size() == 2) {
        double lo = endpoint(j[0], false, where), hi = endpoint(j[1], true, where);
        if (!(lo <= hi)) malformed(where + ": lo > hi");
        return Interval(lo, hi);
    }
    malformed(where + ": expected an interval");
}

json write_interval(const Interval& v) {
    if (v.is_point()) return exact_decimal(v.lo);
    return json{{"lo", exact_decimal(v.lo)}, {"hi", exact_decimal(v.hi)}};
}

// Doubles are written in shortest round-trip form; non-finite values become strings.
json write_double(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double read_double(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return rnd::kInf;
        if (s == "-inf") return -rnd::kInf;
        return interval_of_string(s, where).mid();
    }
    malformed(where + ": expected a number");
}

IntervalMatrix read_interval_matrix(const json& j, std::size_t n, const std::string& where) {
    if (!j.is_array() || j.size() != n) malformed(where + ": expected " + std::to_string(n) + " rows");
    IntervalMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) malformed(where + ": row " + std::to_string(i) + " has wrong length");
        for (std::size_t c = 0; c < n; ++c) M(i, c) = read_interval(j[i][c], where);
    }
    return M;
}

json write_interval_matrix(const IntervalMatrix& M) {
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (std::size_t c = 0; c < M.cols(); ++c) r.push_back(write_interval(M(i, c)));
        rows.push_back(r);
    }
    return rows;
}

Eigen::MatrixXd read_point_matrix(const json& j, std::size_t n, const std::string& where) {
    if (!j.is_array() || j.size() != n) malformed(where + ": expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) malformed(where + ": row " + std::to_string(i) + " has wrong length");
        for (std::size_t c = 0; c < n; ++c)
            M(Eigen::Index(i), Eigen::Index(c)) = read_double(j[i][c], where);
    }
    return M;
}

json write_point_matrix(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) r.push_back(M(i, c));
        rows.push_back(r);
    }
    return rows;
}

json write_complex(const ComplexInterval& z) { return json{{"re", write_interval(z.re)}, {"im", write_interval(z.im)}}; }

VectorFieldSpec read_field(const json& j) {
    const std::string kind = get_as<std::string>(need(j, "kind", "field"), "field.kind");
    if (kind == "polynomial") {
        std::size_t n = get_as<std::size_t>(need(j, "n", "field"), "field.n");
        std::vector<PolyTerm> terms;
        for (const auto& t : need(j, "terms", "field")) {
            PolyTerm p;
            p.component = get_as<std::size_t>(need(t, "component", "field.terms[]"), "field.terms[].component");
            p.coeff = read_interval(need(t, "coeff", "field.terms[]"), "field.terms[].coeff");
            p.powers = get_as<std::vector<int>>(need(t, "powers", "field.terms[]"), "field.terms[].powers");
            terms.push_back(std::move(p));
        }
        return VectorFieldSpec::polynomial(n, std::move(terms));
    }
    const json& params = need(j, "params", "field");
    auto par = [&](const char* name) { return read_interval(need(params, name, "field.params"), name); };
    if (kind == "lorenz") return VectorFieldSpec::lorenz(par("sigma"), par("rho"), par("beta"));
    if (kind == "zeta3") return VectorFieldSpec::zeta3(par("alpha"), par("beta"));
    fail(ErrorCode::UnsupportedField, "unknown field kind '" + kind + "'");
}

json write_field(const VectorFieldSpec& f) {
    json j;
    j["kind"] = f.kind_name();
    if (f.kind == VectorFieldSpec::Kind::Polynomial) {
        j["n"] = f.n;
        json terms = json::array();
        for (const auto& t : f.terms)
            terms.push_back(json{{"component", t.component}, {"coeff", write_interval(t.coeff)}, {"powers", t.powers}});
        j["terms"] = terms;
    } else {
        json p = json::object();
        for (const auto& [k, v] : f.params) p[k] = write_interval(v);
        j["params"] = p;
    }
    return j;
}

OrbitEnclosure read_orbit(const json& j) {
    OrbitEnclosure o;
    o.field = read_field(need(j, "field", "orbit"));
    o.tau = read_interval(need(j, "tau", "orbit"), "orbit.tau");
    o.s_star = j.contains("s_star") ? read_double(j["s_star"], "orbit.s_star") : 2.0;
    o.r_gamma = read_double(need(j, "r_gamma", "orbit"), "orbit.r_gamma");
    o.conditional = j.value("conditional", true);
    o.note = j.value("note", std::string());
    const json& xi = need(j, "xi", "orbit");
    if (!xi.is_array() || xi.empty()) malformed("orbit.xi must be a nonempty array");
    const std::size_t n = o.field.n;
    long kmax = -1;
    for (const auto& e : xi) kmax = std::max(kmax, get_as<long>(need(e, "k", "orbit.xi[]"), "orbit.xi[].k"));
    if (kmax < 0) malformed("orbit.xi: negative index");
    o.M_gamma = j.contains("M_gamma") ? get_as<long>(j["M_gamma"], "orbit.M_gamma") : kmax;
    if (o.M_gamma < kmax) malformed("orbit.M_gamma is smaller than the largest stored index");
    o.xi.assign(std::size_t(o.M_gamma + 1), std::vector<ComplexInterval>(n));
    for (const auto& e : xi) {
        const long k = e["k"].get<long>();
        const std::string where = "orbit.xi[k=" + std::to_string(k) + "]";
        const json& re = need(e, "re", where);
        if (!re.is_array() || re.size() != n) malformed(where + ".re has wrong length");
        const json* im = e.contains("im") ? &e["im"] : nullptr;
        if (im && (!im->is_array() || im->size() != n)) malformed(where + ".im has wrong length");
        for (std::size_t i = 0; i < n; ++i) {
            o.xi[std::size_t(k)][i].re = read_interval(re[i], where);
            o.xi[std::size_t(k)][i].im = im ? read_interval((*im)[i], where) : Interval(0.0);
        }
    }
    try {
        o.validate();
    } catch (const Error& e) {
        malformed(std::string("orbit: ") + e.what());
    }
    return o;
}

json write_orbit(const OrbitEnclosure& o) {
    json j;
    j["field"] = write_field(o.field);
    j["tau"] = write_interval(o.tau);
    j["s_star"] = o.s_star;
    j["M_gamma"] = o.M_gamma;
    j["r_gamma"] = o.r_gamma;
    j["conditional"] = o.conditional;
    if (!o.note.empty()) j["note"] = o.note;
    json xi = json::array();
    for (std::size_t k = 0; k < o.xi.size(); ++k) {
        json re = json::array(), im = json::array();
        for (const auto& c : o.xi[k]) {
            re.push_back(write_interval(c.re));
            im.push_back(write_interval(c.im));
        }
        xi.push_back(json{{"k", k}, {"re", re}, {"im", im}});
    }
    j["xi"] = xi;
    return j;
}

MatrixFourierSeq read_sequence(const json& j) {
    const std::size_t n = get_as<std::size_t>(need(j, "n", "sequence"), "sequence.n");
    if (n == 0) malformed("sequence.n must be positive");
    Interval tau = read_interval(need(j, "half_period", "sequence"), "sequence.half_period");
    const json& coeffs = need(j, "coeffs", "sequence");
    if (!coeffs.is_array() || coeffs.empty()) malformed("sequence.coeffs must be a nonempty array");
    long kmax = -1;
    for (const auto& e : coeffs) kmax = std::max(kmax, get_as<long>(need(e, "k", "sequence.coeffs[]"), "k"));
    if (kmax < 0) malformed("sequence.coeffs: negative index");
    MatrixFourierSeq A(n, tau, std::size_t(kmax + 1));
    for (const auto& e : coeffs) {
        const long k = e["k"].get<long>();
        const std::string where = "sequence.coeffs[k=" + std::to_string(k) + "]";
        A.coeffs[std::size_t(k)].re = read_interval_matrix(need(e, "re", where), n, where + ".re");
        if (e.contains("im")) A.coeffs[std::size_t(k)].im = read_interval_matrix(e["im"], n, where + ".im");
    }
    if (j.contains("tail")) {
        A.tail.C = read_double(need(j["tail"], "C", "sequence.tail"), "sequence.tail.C");
        A.tail.s = read_double(need(j["tail"], "s", "sequence.tail"), "sequence.tail.s");
    } else {
        A.tail.C = 0.0;
        A.tail.s = 2.0;
    }
    A.odd_vanish = j.value("odd_vanish", false);
    try {
        A.validate();
    } catch (const Error& e) {
        malformed(std::string("sequence: ") + e.what());
    }
    return A;
}

json write_sequence(const MatrixFourierSeq& A) {
    json j;
    j["n"] = A.n;
    j["half_period"] = write_interval(A.half_period);
    json coeffs = json::array();
    for (std::size_t k = 0; k < A.size(); ++k)
        coeffs.push_back(json{{"k", k},
                              {"re", write_interval_matrix(A.coeffs[k].re)},
                              {"im", write_interval_matrix(A.coeffs[k].im)}});
    j["coeffs"] = coeffs;
    j["tail"] = json{{"C", write_double(A.tail.C)}, {"s", write_double(A.tail.s)}};
    j["odd_vanish"] = A.odd_vanish;
    return j;
}

FloquetCandidate read_candidate(const json& j) {
    const std::size_t n = get_as<std::size_t>(need(j, "n", "candidate"), "candidate.n");
    const std::size_t m = get_as<std::size_t>(need(j, "m", "candidate"), "candidate.m");
    if (n == 0 || m == 0) malformed("candidate: n and m must be positive");
    FloquetCandidate x(n, m, read_interval(need(j, "tau", "candidate"), "candidate.tau"));
    x.R = read_point_matrix(need(j, "R", "candidate"), n, "candidate.R");
    for (const auto& e : need(j, "Q", "candidate")) {
        const long k = get_as<long>(need(e, "k", "candidate.Q[]"), "candidate.Q[].k");
        if (k < 0 || std::size_t(k) >= m) malformed("candidate.Q: index out of range");
        const std::string where = "candidate.Q[k=" + std::to_string(k) + "]";
        x.Q1[std::size_t(k)] = read_point_matrix(need(e, "re", where), n, where + ".re");
        if (k > 0 && e.contains("im")) x.Q2[std::size_t(k)] = read_point_matrix(e["im"], n, where + ".im");
    }
    return x;
}

json write_candidate(const FloquetCandidate& x) {
    json j;
    j["n"] = x.n;
    j["m"] = x.m;
    j["tau"] = write_interval(x.tau);
    j["R"] = write_point_matrix(x.R);
    json Q = json::array();
    for (std::size_t k = 0; k < x.m; ++k)
        Q.push_back(json{{"k", k}, {"re", write_point_matrix(x.Q1[k])}, {"im", write_point_matrix(x.Q2[k])}});
    j["Q"] = Q;
    return j;
}

json write_params(const VerifierParams& p) {
    json j;
    j["s"] = p.s;
    j["m"] = p.m;
    j["M"] = p.M;
    j["l_policy"] = l_policy_name(p);
    j["sharp_tails"] = sharp_name(p.sharp);
    if (!p.l_override.empty()) {
        json o = json::object();
        for (const auto& [k, L] : p.l_override) o[std::to_string(k)] = L;
        j["l_override"] = o;
    }
    return j;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

ProblemInput problem_from_json(const std::string& text) {
    json j = parse_text(text);
    ProblemInput p;
    if (j.is_object() && j.contains("field")) {
        p.orbit = read_orbit(j);
        p.A = jacobian_coeffs(*p.orbit);
        p.conditional = p.orbit->conditional;
    } else if (j.is_object() && j.contains("coeffs")) {
        p.A = read_sequence(j);
        p.conditional = j.value("conditional", false);
    } else {
        malformed("input has neither 'field' (orbit) nor 'coeffs' (sequence)");
    }
    return p;
}

ProblemInput load_problem(const std::string& path) { return problem_from_json(read_file(path)); }

OrbitEnclosure orbit_from_json(const std::string& text) { return read_orbit(parse_text(text)); }
std::string orbit_to_json(const OrbitEnclosure& orbit) { return write_orbit(orbit).dump(2) + "\n"; }
VectorFieldSpec field_from_json(const std::string& text) { return read_field(parse_text(text)); }

MatrixFourierSeq sequence_from_json(const std::string& text) { return read_sequence(parse_text(text)); }
std::string sequence_to_json(const MatrixFourierSeq& seq) { return write_sequence(seq).dump(2) + "\n"; }

FloquetCandidate candidate_from_json(const std::string& text) {
    json j = parse_text(text);
    if (j.is_object() && j.contains("candidate")) return read_candidate(j["candidate"]);
    return read_candidate(j);
}
std::string candidate_to_json(const FloquetCandidate& x) { return write_candidate(x).dump(2) + "\n"; }

VerifiedFloquetForm form_from_json(const std::string& text) {
    json j = parse_text(text);
    VerifiedFloquetForm f;
    f.x = read_candidate(need(j, "candidate", "form"));
    f.r = read_double(need(j, "r", "form"), "form.r");
    f.s = read_double(need(j, "s", "form"), "form.s");
    f.conditional = j.value("conditional", false);
    if (!(f.r >= 0)) malformed("form.r must be nonnegative");
    return f;
}

std::string form_to_json(const VerifiedFloquetForm& form) {
    json j;
    j["r"] = form.r;
    j["s"] = form.s;
    j["conditional"] = form.conditional;
    j["R_enclosure"] = write_interval_matrix(form.R_enclosure());
    j["candidate"] = write_candidate(form.x);
    return j.dump(2) + "\n";
}

std::string report_to_json(const VerificationReport& rep, const std::string& config_json) {
    json j;
    j["success"] = rep.success;
    j["conditional"] = rep.conditional;
    j["message"] = rep.message;
    j["n"] = rep.n;
    j["params"] = write_params(rep.params);
    j["s_star"] = write_double(rep.s_star);
    j["residual"] = write_double(rep.residual);
    j["K"] = rep.K;
    j["C_Lambda"] = write_double(rep.C_Lambda);
    j["C1"] = write_double(rep.C1);
    j["K1"] = write_double(rep.K1);
    j["K1_route"] = rep.K1_route;
    j["sharp_tails_used"] = rep.sharp_used;
    j["tail"] = json{{"Y_M", write_double(rep.Y_M)}, {"Z1_M", write_double(rep.z1_M)}, {"Z2_M", write_double(rep.z2_M)}};
    if (rep.has_interval)
        j["r_interval"] = json::array({write_double(rep.r_min), write_double(rep.r_max)});
    else
        j["r_interval"] = nullptr;
    j["r"] = rep.success ? write_double(rep.r) : json(nullptr);
    json margins = json::array();
    for (const auto& m : rep.margins) {
        json e{{"k", m.k}, {"worst_entry", m.worst_entry}, {"value_at_rmin", write_double(m.value_at_rmin)}};
        if (m.has_interval)
            e["interval"] = json::array({write_double(m.r_lo), write_double(m.r_hi)});
        else
            e["interval"] = nullptr;
        margins.push_back(e);
    }
    j["margins"] = margins;
    if (!config_json.empty()) {
        try {
            j["config"] = json::parse(config_json);
        } catch (const json::parse_error&) {
            j["config"] = config_json;
        }
    }
    return j.dump(2) + "\n";
}

std::string eigen_to_json(const BundleEnclosure& b, const Interval& tau) {
    const auto& cls = b.classification;
    json j;
    j["tau"] = write_interval(tau);
    json exps = json::array();
    for (std::size_t i = 0; i < cls.pairs.size(); ++i) {
        const auto& p = cls.pairs[i];
        json e;
        e["label"] = label_name(cls.labels[i]);
        e["kind"] = p.kind == EigenPairEnclosure::Kind::Real ? "real" : "complex";
        e["mu"] = write_complex(p.mu);
        e["lyapunov"] = write_interval(cls.lyapunov[i]);
        e["lyapunov_center"] = cls.lyapunov[i].mid();
        e["lyapunov_radius"] = cls.lyapunov[i].rad();
        json v = json::array();
        for (const auto& c : p.v) v.push_back(write_complex(c));
        e["eigenvector"] = v;
        if (i < b.multipliers.size()) e["multiplier_modulus"] = write_interval(b.multipliers[i]);
        if (i < b.signs.size() && b.signs[i].sign != 0) {
            e["multiplier_sign"] = b.signs[i].sign;
            e["multiplier_ratio"] = b.signs[i].ratio;
        }
        if (i < b.orientation.size()) e["orientation"] = orientation_name(b.orientation[i]);
        exps.push_back(e);
    }
    j["exponents"] = exps;
    return j.dump(2) + "\n";
}

}  // namespace floquet
