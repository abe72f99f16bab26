#pragma once

// Job runner behind the hypsing command line tool. Kept separate from main()
// so tests can drive it in-process.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypsing/frobenius.hpp"
#include "hypsing/germ.hpp"
#include "hypsing/metric.hpp"
#include "hypsing/mobius.hpp"
#include "hypsing/normalform.hpp"
#include "hypsing/schwarzian.hpp"
#include "hypsing/series.hpp"

namespace hypsing::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kInvariantViolation = 3,
    kInconsistent = 4,
    kToleranceFailure = 5,
};

struct Options {
    int order = kDefaultOrder;
    double tol = 1e-10;
};

struct Outcome {
    int exit_code = kOk;
    /// JSON report, or CSV for the grid command.
    std::string text;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump(const Json& j, std::ostringstream& os, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(k).dump() << ": ";
            dump(v, os, indent + 2);
        }
        os << "\n" << close << "}";
    } else if (j.is_array()) {
        // short numeric arrays ([re, im] pairs, matrices rows) stay on one line
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        if (flat) {
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                dump(j[i], os, indent);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            dump(j[i], os, indent + 2);
        }
        os << "\n" << close << "]";
    } else if (j.is_number_float()) {
        const double v = j.get<double>();
        os << (std::isfinite(v) ? format_double(v) : "null");
    } else {
        os << j.dump();
    }
}

} // namespace detail

/// Deterministic JSON text: insertion-ordered keys, floats as %.17g.
inline std::string to_text(const Json& j)
{
    std::ostringstream os;
    detail::dump(j, os, 0);
    os << "\n";
    return os.str();
}

// ---- parsing ---------------------------------------------------------------

inline const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline Complex parse_complex(const Json& j)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ParseError("expected a number or [re, im], got " + j.dump());
}

inline Real parse_real(const Json& j)
{
    if (j.is_number_integer()) return Real(static_cast<int>(j.get<long long>()));
    if (j.is_number()) return Real(j.get<double>());
    if (j.is_string()) {
        try {
            return Real::parse(j.get<std::string>());
        } catch (const Error& e) {
            throw ParseError(e.what());
        }
    }
    throw ParseError("expected a real number or \"p/q\", got " + j.dump());
}

inline MobiusMap parse_matrix(const Json& j)
{
    if (!j.is_array() || j.size() != 4) throw ParseError("a matrix is [a, b, c, d]");
    return {parse_complex(j[0]), parse_complex(j[1]), parse_complex(j[2]), parse_complex(j[3])};
}

inline TruncSeries parse_series(const Json& j)
{
    if (!j.is_array()) throw ParseError("a series is an array of coefficients");
    std::vector<Complex> c;
    for (const auto& e : j) c.push_back(parse_complex(e));
    if (c.empty()) c.push_back(0.0);
    return TruncSeries(std::move(c));
}

inline Model parse_model(const Json& j)
{
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "disk") return Model::Disk;
    if (s == "halfplane") return Model::HalfPlane;
    throw ParseError("model must be \"disk\" or \"halfplane\"");
}

inline DevelopingGerm parse_germ(const Json& job)
{
    const MobiusMap m = parse_matrix(field(job, "moebius"));
    const Json& b = field(job, "branch");
    CanonicalBranch branch;
    if (b.is_string() && b.get<std::string>() == "log") branch = LogBranch{};
    else if (b.is_object() && b.contains("power")) branch = PowerBranch{parse_real(b.at("power"))};
    else throw ParseError("branch must be \"log\" or {\"power\": alpha}");
    std::optional<MobiusMap> declared;
    if (job.contains("monodromy")) declared = parse_matrix(job.at("monodromy"));
    return {m, branch, parse_model(field(job, "model")), declared};
}

inline void check_mode(const Json& job, const char* expected)
{
    if (!job.is_object()) throw ParseError("a job is a JSON object");
    if (job.contains("mode") && job.at("mode") != expected) {
        throw ParseError(std::string("this command expects mode \"") + expected + "\"");
    }
}

// ---- report pieces ---------------------------------------------------------

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const MobiusMap& m)
{
    Json out = Json::array();
    for (const auto& e : m.entries()) out.push_back(to_json(e));
    return out;
}

inline Json to_json(const TruncSeries& s)
{
    Json out = Json::array();
    for (const auto& c : s.coeffs()) out.push_back(to_json(c));
    return out;
}

inline Json real_json(const Real& r)
{
    if (r.is_exact()) return r.to_string();
    return r.value();
}

inline Json class_json(const MobiusMap& m, Model model)
{
    const IsometryClass cls = classify(m, model);
    Json out;
    out["matrix"] = to_json(m);
    out["class"] = to_string(cls.kind);
    out["parameter"] = cls.parameter;
    if (cls.warning) out["warning"] = *cls.warning;
    return out;
}

inline Json warnings_json(const std::vector<std::string>& w)
{
    Json out = Json::array();
    for (const auto& s : w) out.push_back(s);
    return out;
}

// ---- modes -----------------------------------------------------------------

inline Outcome run_germ(const Json& job, bool normalize, const Options& opt)
{
    const DevelopingGerm germ = parse_germ(job);
    const Classification cls = classify_singularity(germ);
    Json report;
    report["mode"] = "germ";
    report["model"] = to_string(germ.model());
    report["monodromy"] = class_json(germ.declared_monodromy().value_or(germ_monodromy(germ)), germ.model());

    Json c;
    if (const auto* con = std::get_if<Conical>(&cls)) {
        c["kind"] = "Conical";
        c["alpha"] = real_json(con->alpha);
    } else if (std::holds_alternative<Cusp>(cls)) {
        c["kind"] = "Cusp";
    } else {
        c["kind"] = "Inconsistency";
        c["reason"] = to_string(std::get<Inconsistency>(cls).reason);
        report["classification"] = c;
        return {kInconsistent, to_text(report)};
    }
    report["classification"] = c;

    int code = kOk;
    if (normalize || job.contains("check_coord")) {
        const NormalForm nf = normal_coordinate(germ, opt.order);
        if (normalize) {
            const double residual = verify_normal_form(nf, germ);
            Json n;
            n["coord"] = to_json(nf.coord);
            n["residual"] = residual;
            n["warnings"] = warnings_json(nf.warnings);
            report["normal_form"] = n;
            if (!(residual < opt.tol)) code = kToleranceFailure;
        }
        if (job.contains("check_coord")) {
            const NormalForm given{nf.kind, parse_series(job.at("check_coord")), {}};
            const double residual = verify_normal_form(given, germ);
            report["check_coord"] = Json{{"residual", residual}};
            if (!(residual < opt.tol)) code = kToleranceFailure;
        }
    }
    return {code, to_text(report)};
}

inline Outcome run_schwarzian(const Json& job, const Options& opt)
{
    const Real theta = parse_real(field(job, "theta"));
    const Complex d = job.contains("d") ? parse_complex(job.at("d")) : Complex{};
    const TruncSeries phi = job.contains("phi") ? parse_series(job.at("phi")) : TruncSeries::zero(0);
    const SingularityData data(theta, d, phi);
    const SchwarzianReport rep = analyze_schwarzian(data, opt.order);

    Json report;
    report["mode"] = "schwarzian";
    report["theta"] = real_json(theta);
    report["d"] = to_json(d);
    const auto& ind = rep.basis.indicial;
    report["indicial"] = Json{{"s1", real_json(ind.s1)}, {"s2", real_json(ind.s2)},
                              {"integer_difference", ind.integer_difference}};
    static const char* kCases[] = {"PowerSolution", "LogSolution", "EqualRootsLog"};
    report["solution_case"] = kCases[rep.basis.second.index()];
    report["rm"] = rep.basis.rm ? to_json(*rep.basis.rm) : Json(nullptr);
    const double residual = ode_residual(rep.basis);
    report["ode_residual"] = residual;

    Json ratio;
    if (const auto* p = std::get_if<PowerRatio>(&rep.ratio)) {
        ratio = Json{{"kind", "PowerRatio"}, {"alpha", real_json(p->alpha)}, {"unit", to_json(p->unit)}};
    } else if (const auto* l = std::get_if<LogRatio>(&rep.ratio)) {
        ratio = Json{{"kind", "LogRatio"}, {"psi", to_json(l->psi)}};
    } else {
        const auto& o = std::get<ObstructedLogRatio>(rep.ratio);
        ratio = Json{{"kind", "ObstructedLogRatio"}, {"m", o.m}, {"phi", to_json(o.phi)}};
    }
    report["ratio"] = ratio;
    report["local_monodromy"] = to_json(rep.monodromy);

    int code = residual <= opt.tol ? kOk : kToleranceFailure;
    if (const auto* cone = std::get_if<ConeCandidate>(&rep.verdict)) {
        report["verdict"] = Json{{"kind", "ConeCandidate"}, {"alpha", real_json(cone->alpha)}};
    } else if (std::holds_alternative<CuspCandidate>(rep.verdict)) {
        report["verdict"] = Json{{"kind", "CuspCandidate"}};
    } else {
        report["verdict"] = Json{{"kind", "NeverDiskValued"}};
        Complex a = 1.0, c = 1.0, dd = 0.0;
        if (job.contains("witness")) {
            const Json& w = job.at("witness");
            a = parse_complex(field(w, "a"));
            c = parse_complex(field(w, "c"));
            dd = parse_complex(field(w, "d"));
        }
        const auto& o = std::get<ObstructedLogRatio>(rep.ratio);
        const Complex x = escape_witness(o.m, o.phi, a, c, dd);
        const Complex fx = escape_value(o.m, o.phi, a, c, dd, x);
        report["witness"] = Json{{"x", to_json(x)}, {"F", to_json(fx)}, {"abs_F", std::abs(fx)}};
        if (code == kOk) code = kInconsistent;
    }
    report["warnings"] = warnings_json(rep.basis.warnings);
    return {code, to_text(report)};
}

inline Outcome run_grid(const Json& job, const Options&)
{
    const Json& kind = field(job, "kind");
    SingularityKind sk;
    if (kind.is_string() && kind.get<std::string>() == "cusp") sk = CuspKind{};
    else if (kind.is_object() && kind.contains("conical")) sk = ConicalKind{parse_real(kind.at("conical")).value()};
    else throw ParseError("kind must be \"cusp\" or {\"conical\": alpha}");

    auto range = [&](const char* key) {
        const Json& r = field(job, key);
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw ParseError(std::string(key) + " must be [min, max]");
        }
        return std::pair{r[0].get<double>(), r[1].get<double>()};
    };
    const auto [re0, re1] = range("re");
    const auto [im0, im1] = range("im");
    const Json& n = field(job, "n");
    if (!n.is_array() || n.size() != 2 || !n[0].is_number_integer() || !n[1].is_number_integer()) {
        throw ParseError("n must be [nx, ny]");
    }
    const int nx = n[0].get<int>();
    const int ny = n[1].get<int>();
    if (nx < 1 || ny < 1) throw ParseError("grid needs at least one point per axis");
    const double h = job.contains("h") ? field(job, "h").get<double>() : 1e-3;

    const DensityField density = [sk](Complex z) {
        if (const auto* c = std::get_if<ConicalKind>(&sk)) return conical_density(c->alpha, z);
        return cusp_density(z);
    };
    auto coord = [](double lo, double hi, int count, int i) {
        return count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    };

    std::string csv = "re,im,density,curvature\n";
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Complex z(coord(re0, re1, nx, ix), coord(im0, im1, ny, iy));
            double rho = std::nan("");
            double k = std::nan("");
            try {
                rho = density(z);
                k = curvature_fd(density, z, h);
            } catch (const Error&) {
                // out-of-domain points are reported as nan
            }
            csv += format_double(z.real()) + "," + format_double(z.imag()) + "," + format_double(rho) + "," +
                   format_double(k) + "\n";
        }
    }
    return {kOk, csv};
}

inline Outcome run_gauss_bonnet(const Json& job)
{
    const Json& g = field(job, "genus");
    if (!g.is_number_integer()) throw ParseError("genus must be an integer");
    std::vector<Real> thetas;
    const Json& ts = field(job, "thetas");
    if (!ts.is_array()) throw ParseError("thetas must be an array");
    for (const auto& t : ts) thetas.push_back(parse_real(t));
    const GaussBonnetVerdict v = gauss_bonnet_admissible(Divisor(g.get<int>(), thetas));
    Json report;
    report["mode"] = "gauss-bonnet";
    report["genus"] = g.get<int>();
    report["sum"] = real_json(v.sum);
    report["sum_value"] = v.sum.value();
    report["admissible"] = v.admissible;
    return {kOk, to_text(report)};
}

inline int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::WitnessNotFound: return kToleranceFailure;
    case ErrorCode::NotNormalizable: return kInconsistent;
    default: return kInvariantViolation;
    }
}

inline Outcome error_outcome(int code, const std::string& kind, const std::string& message)
{
    Json report;
    report["status"] = "error";
    report["error"] = kind;
    report["message"] = message;
    return {code, to_text(report)};
}

/// Runs one job. `command` is one of classify, normalize, analyze, grid,
/// admissible; `input` is the job file's text.
inline Outcome run(const std::string& command, const std::string& input, const Options& opt = {})
{
    try {
        Json job;
        try {
            job = Json::parse(input);
        } catch (const Json::exception& e) {
            throw ParseError(e.what());
        }
        if (opt.order < 4) throw ParseError("--order must be at least 4");
        if (command == "classify" || command == "normalize") {
            check_mode(job, "germ");
            return run_germ(job, command == "normalize", opt);
        }
        if (command == "analyze") {
            check_mode(job, "schwarzian");
            return run_schwarzian(job, opt);
        }
        if (command == "grid") {
            check_mode(job, "metric-grid");
            return run_grid(job, opt);
        }
        if (command == "admissible") {
            check_mode(job, "gauss-bonnet");
            return run_gauss_bonnet(job);
        }
        throw ParseError("unknown command '" + command + "'");
    } catch (const ParseError& e) {
        return error_outcome(kParseError, "ParseError", e.what());
    } catch (const Error& e) {
        return error_outcome(exit_code_for(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const Json::exception& e) {
        return error_outcome(kParseError, "ParseError", e.what());
    }
}

} // namespace hypsing::cli
