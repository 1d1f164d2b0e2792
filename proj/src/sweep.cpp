#include "udw/sweep.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace udw {

namespace {

using json = nlohmann::ordered_json;
constexpr double pi = std::numbers::pi;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep) parts.push_back("");
    return parts;
}

// Plain numbers, plus "pi", "pi/N" and "N*pi" for angles.
double parse_number(const std::string& token) {
    const std::string t = trim(token);
    require(!t.empty(), "empty number in range");
    if (t == "pi") return pi;
    if (t.rfind("pi/", 0) == 0) return pi / parse_number(t.substr(3));
    if (t.size() > 3 && t.substr(t.size() - 3) == "*pi") return parse_number(t.substr(0, t.size() - 3)) * pi;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    require(used == t.size(), "not a number: '" + t + "'");
    return v;
}

std::array<cplx, 2> mix_pair(double w) { return {cplx(std::sqrt(w)), cplx(std::sqrt(1.0 - w))}; }

void set_amplitudes_from_mix(const FieldModel& model, double w, WavepacketSpec& wp) {
    wp.alpha = {};
    wp.beta = {};
    const auto pair = mix_pair(w);
    switch (model.kind) {
        case FieldKind::RealScalar: break;
        case FieldKind::Vector: wp.alpha = pair; break;
        case FieldKind::Fermion:
        case FieldKind::ComplexScalar:
            wp.beta[0] = pair[0];
            wp.alpha[0] = pair[1];
            break;
    }
}

bool is_anchor_angle(double theta) {
    return std::fabs(theta) <= 1e-12 || std::fabs(theta - 0.5 * pi) <= 1e-12;
}

std::string model_label(const FieldModel& model) {
    if (model.kind == FieldKind::ComplexScalar) return "complex-" + to_string(model.statistics);
    return to_string(model.kind);
}

template <class Fn>
void parallel_for(std::size_t count, int workers, const Fn& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

cplx parse_amplitude(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    require(j.is_array() && j.size() == 2, "amplitude must be a number or [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Range parse_range_json(const json& j, const std::string& key) {
    if (j.is_number()) return Range::single(j.get<double>());
    if (j.is_string()) return Range::parse(j.get<std::string>());
    if (j.is_array()) {
        Range r;
        for (const auto& v : j) r.values.push_back(v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>());
        return r;
    }
    require(j.is_object(), "grid." + key + " must be a number, string, list or table");
    for (const auto& [k, v] : j.items())
        require(k == "start" || k == "stop" || k == "count" || k == "scale", "unknown key grid." + key + "." + k);
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const int count = j.at("count").get<int>();
    const std::string scale = j.value("scale", "linear");
    require(scale == "linear" || scale == "log", "grid." + key + ".scale must be linear or log");
    return scale == "log" ? Range::logarithmic(start, stop, count) : Range::linear(start, stop, count);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : j.items())
        require(allowed.count(k) > 0, "unknown configuration key " + where + k);
}

json amplitude_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

Range Range::linear(double start, double stop, int count) {
    require(count >= 1, "range count must be >= 1");
    Range r;
    if (count == 1) return single(start);
    for (int i = 0; i < count; ++i)
        r.values.push_back(i == count - 1 ? stop : start + (stop - start) * i / (count - 1));
    return r;
}

Range Range::logarithmic(double start, double stop, int count) {
    require(start > 0.0 && stop > 0.0, "log range needs positive endpoints");
    Range r = linear(std::log(start), std::log(stop), count);
    for (auto& v : r.values) v = std::exp(v);
    r.values.front() = start;
    if (count > 1) r.values.back() = stop;
    return r;
}

Range Range::parse(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return {};
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        require(parts.size() == 3 || parts.size() == 4, "range must be start:stop:count[:log]");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double count = parse_number(parts[2]);
        require(count >= 1 && count == std::floor(count), "range count must be a positive integer");
        if (parts.size() == 4) {
            require(parts[3] == "log" || parts[3] == "linear", "range scale must be linear or log");
            if (parts[3] == "log") return logarithmic(start, stop, static_cast<int>(count));
        }
        return linear(start, stop, static_cast<int>(count));
    }
    Range r;
    for (const auto& p : split(t, ',')) r.values.push_back(parse_number(p));
    return r;
}

void apply_default_amplitudes(SweepConfig& cfg) {
    double sum = 0.0;
    for (const auto& z : cfg.alpha) sum += std::norm(z);
    for (const auto& z : cfg.beta) sum += std::norm(z);
    if (sum > 0.0 || !cfg.mix.values.empty()) return;
    switch (cfg.model.kind) {
        case FieldKind::RealScalar: break;
        case FieldKind::Vector: cfg.alpha[0] = 1.0; break;
        case FieldKind::Fermion:
        case FieldKind::ComplexScalar: cfg.beta[0] = 1.0; break;
    }
}

std::vector<GridPoint> expand_grid(const SweepConfig& cfg) {
    const std::vector<double> mixes = cfg.mix.values.empty() ? std::vector<double>{-1.0} : cfg.mix.values;
    std::vector<GridPoint> points;
    for (double sigma : cfg.sigma.values)
        for (double m : cfg.mass.values)
            for (double theta : cfg.theta.values)
                for (double w : mixes)
                    for (double omega : cfg.omega.values) {
                        GridPoint g;
                        g.omega = omega;
                        g.sigma = sigma;
                        g.m = m;
                        g.theta = theta;
                        g.det.omega = omega;
                        g.det.lambda = cfg.lambda;
                        g.det.delta = cfg.delta;
                        g.det.theta = theta;
                        g.det.spinor = cfg.spinor;
                        g.wp.n = cfg.model.n;
                        g.wp.m = m;
                        g.wp.k0 = cfg.k0;
                        g.wp.sigma = sigma;
                        if (w >= 0.0) {
                            set_amplitudes_from_mix(cfg.model, w, g.wp);
                        } else {
                            g.wp.alpha = cfg.alpha;
                            g.wp.beta = cfg.beta;
                        }
                        points.push_back(g);
                    }
    return points;
}

void validate(const SweepConfig& cfg) {
    const FieldModel& model = cfg.model;
    if (model.kind == FieldKind::Vector || model.kind == FieldKind::Fermion)
        require(model.n == 3, to_string(model.kind) + " model is 3+1 dimensional");
    require(model.n >= 1, "spatial dimension must be >= 1");
    require(!cfg.omega.values.empty() && !cfg.sigma.values.empty() && !cfg.mass.values.empty() &&
                !cfg.theta.values.empty(),
            "empty grid");
    for (double v : cfg.omega.values) require(std::isfinite(v), "omega values must be finite");
    for (double v : cfg.sigma.values) require(std::isfinite(v) && v > 0.0, "sigma values must be positive");
    for (double v : cfg.mass.values) require(std::isfinite(v) && v >= 0.0, "mass values must be non-negative");
    for (double v : cfg.theta.values) require(std::isfinite(v), "theta values must be finite");
    for (double v : cfg.mix.values) require(v >= 0.0 && v <= 1.0, "mix values must lie in [0, 1]");
    if (model.kind == FieldKind::RealScalar) require(cfg.mix.values.empty(), "the real scalar model has no amplitudes");
    if (model.kind == FieldKind::Vector)
        for (double v : cfg.mass.values) require(v == 0.0, "vector model is massless");
    require(std::isfinite(cfg.k0) && cfg.k0 > 0.0, "k0 must be positive");
    require(cfg.workers >= 1, "workers must be >= 1");
    if (cfg.oracle) {
        const auto& o = *cfg.oracle;
        require(o.tol > 0.0 && o.tol < 1.0, "oracle tolerance must lie in (0, 1)");
        require(!o.start_T || *o.start_T > 0.0, "oracle start T must be positive");
        require(o.max_doublings >= 1, "oracle doubling budget must be >= 1");
        require(o.quadrature.relative_tolerance > 0.0 && o.quadrature.relative_tolerance < 1.0,
                "quadrature tolerance must lie in (0, 1)");
        if (model.kind == FieldKind::Vector && o.quadrature.tier == OracleTier::AnalyticAngular)
            for (double v : cfg.theta.values)
                require(is_anchor_angle(v), "vector verification needs theta = 0 or pi/2");
    }
    for (const auto& g : expand_grid(cfg)) {
        validate(g.wp, model);
        validate(g.det, model);
    }
}

std::vector<SweepRow> run_scan(const SweepConfig& cfg) {
    validate(cfg);
    const auto points = expand_grid(cfg);
    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        const auto r = closed_form(cfg.model, points[i].det, points[i].wp);
        rows[i].point = points[i];
        rows[i].probability = r.value();
        rows[i].gated = r.gated;
    });
    return rows;
}

std::vector<SweepRow> run_verify(const SweepConfig& cfg) {
    require(cfg.oracle.has_value(), "verify needs oracle settings");
    validate(cfg);
    const OracleSettings settings = *cfg.oracle;
    const auto points = expand_grid(cfg);
    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        const GridPoint& g = points[i];
        SweepRow& row = rows[i];
        row.point = g;
        row.verified = true;
        const auto r = closed_form(cfg.model, g.det, g.wp);
        row.probability = r.value();
        row.gated = r.gated;
        try {
            const double T0 = settings.start_T ? *settings.start_T : default_start_T(g.wp);
            const auto limit = adiabatic_limit(
                [&](double T) { return finite_t(cfg.model, g.det, g.wp, SwitchingSpec{T}, settings.quadrature); }, T0,
                settings.tol, settings.max_doublings);
            row.oracle_total = limit.probability;
            row.vacuum = limit.last.vacuum;
            row.co_rotating = limit.last.co_rotating;
            row.counter_rotating = limit.last.counter_rotating;
            row.final_T = limit.T_sequence.back();
            if (row.probability == 0.0) {
                row.deviation_absolute = true;
                row.deviation = std::fabs(row.oracle_total);
            } else {
                row.deviation = std::fabs(row.oracle_total - row.probability) / std::fabs(row.probability);
            }
        } catch (const NonConvergenceError& e) {
            row.converged = false;
            row.error = e.what();
        }
    });
    return rows;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string format_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    const bool verify = !rows.empty() && rows.front().verified;
    std::ostringstream out;
    out << "model,n,omega,sigma,m,k0,theta,alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta1_re,beta1_im,beta2_re,"
           "beta2_im,probability,gated";
    if (verify) out << ",oracle_total,vacuum,co_rotating,counter_rotating,final_T,deviation,deviation_kind,converged";
    out << '\n';
    const std::string label = model_label(cfg.model);
    for (const auto& r : rows) {
        const auto& g = r.point;
        out << label << ',' << g.wp.n << ',' << format_number(g.omega) << ',' << format_number(g.sigma) << ','
            << format_number(g.m) << ',' << format_number(g.wp.k0) << ',' << format_number(g.theta);
        for (const auto& z : g.wp.alpha) out << ',' << format_number(z.real()) << ',' << format_number(z.imag());
        for (const auto& z : g.wp.beta) out << ',' << format_number(z.real()) << ',' << format_number(z.imag());
        out << ',' << format_number(r.probability) << ',' << (r.gated ? 1 : 0);
        if (verify) {
            out << ',' << format_number(r.oracle_total) << ',' << format_number(r.vacuum) << ','
                << format_number(r.co_rotating) << ',' << format_number(r.counter_rotating) << ','
                << format_number(r.final_T) << ',' << format_number(r.deviation) << ','
                << (r.deviation_absolute ? "absolute" : "relative") << ',' << (r.converged ? 1 : 0);
        }
        out << '\n';
    }
    return out.str();
}

std::string format_json(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    json doc;
    doc["model"] = model_label(cfg.model);
    doc["n"] = cfg.model.n;
    json arr = json::array();
    for (const auto& r : rows) {
        const auto& g = r.point;
        json row;
        row["omega"] = g.omega;
        row["sigma"] = g.sigma;
        row["m"] = g.m;
        row["k0"] = g.wp.k0;
        row["theta"] = g.theta;
        row["alpha"] = json::array({amplitude_json(g.wp.alpha[0]), amplitude_json(g.wp.alpha[1])});
        row["beta"] = json::array({amplitude_json(g.wp.beta[0]), amplitude_json(g.wp.beta[1])});
        row["probability"] = r.probability;
        row["gated"] = r.gated;
        if (r.verified) {
            row["oracle_total"] = r.oracle_total;
            row["vacuum"] = r.vacuum;
            row["co_rotating"] = r.co_rotating;
            row["counter_rotating"] = r.counter_rotating;
            row["final_T"] = r.final_T;
            row["deviation"] = r.deviation;
            row["deviation_kind"] = r.deviation_absolute ? "absolute" : "relative";
            row["converged"] = r.converged;
            if (!r.error.empty()) row["error"] = r.error;
        }
        arr.push_back(row);
    }
    doc["rows"] = arr;
    return doc.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
    }
}

SweepConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("configuration is not valid JSON: ") + e.what());
    }
    require(j.is_object(), "configuration must be a table");
    check_keys(j,
               {"model", "n", "statistics", "grid", "k0", "lambda", "delta", "amplitudes", "spinor", "output",
                "workers", "oracle"},
               "");
    SweepConfig cfg;
    try {
        if (j.contains("model")) {
            const auto& m = j["model"];
            if (m.is_string()) {
                cfg.model.kind = parse_field_kind(m.get<std::string>());
            } else {
                check_keys(m, {"kind", "n", "statistics"}, "model.");
                cfg.model.kind = parse_field_kind(m.at("kind").get<std::string>());
                if (m.contains("n")) cfg.model.n = m["n"].get<int>();
                if (m.contains("statistics")) cfg.model.statistics = parse_statistics(m["statistics"].get<std::string>());
            }
        }
        if (j.contains("n")) cfg.model.n = j["n"].get<int>();
        if (j.contains("statistics")) cfg.model.statistics = parse_statistics(j["statistics"].get<std::string>());
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            check_keys(g, {"omega", "sigma", "mass", "theta", "mix"}, "grid.");
            if (g.contains("omega")) cfg.omega = parse_range_json(g["omega"], "omega");
            if (g.contains("sigma")) cfg.sigma = parse_range_json(g["sigma"], "sigma");
            if (g.contains("mass")) cfg.mass = parse_range_json(g["mass"], "mass");
            if (g.contains("theta")) cfg.theta = parse_range_json(g["theta"], "theta");
            if (g.contains("mix")) cfg.mix = parse_range_json(g["mix"], "mix");
        }
        if (j.contains("k0")) cfg.k0 = j["k0"].get<double>();
        if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
        if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
        if (j.contains("amplitudes")) {
            const auto& a = j["amplitudes"];
            check_keys(a, {"alpha", "beta"}, "amplitudes.");
            for (const char* key : {"alpha", "beta"}) {
                if (!a.contains(key)) continue;
                auto& dst = std::string(key) == "alpha" ? cfg.alpha : cfg.beta;
                const auto& src = a[key];
                require(src.is_array() && src.size() <= 2, std::string("amplitudes.") + key + " takes up to two entries");
                for (std::size_t i = 0; i < src.size(); ++i) dst[i] = parse_amplitude(src[i]);
            }
        }
        if (j.contains("spinor")) {
            const auto& s = j["spinor"];
            require(s.is_array() && s.size() == 4, "spinor takes four entries (A1, A2, B1, B2)");
            for (std::size_t i = 0; i < 4; ++i) cfg.spinor[i] = parse_amplitude(s[i]);
        }
        if (j.contains("output")) {
            const auto& o = j["output"];
            check_keys(o, {"path", "format"}, "output.");
            if (o.contains("path")) cfg.output_path = o["path"].get<std::string>();
            if (o.contains("format")) {
                const auto f = o["format"].get<std::string>();
                require(f == "csv" || f == "json", "output.format must be csv or json");
                cfg.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
            }
        }
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("oracle")) {
            const auto& o = j["oracle"];
            check_keys(o, {"tol", "T0", "max_doublings", "tier", "relative_tolerance", "cutoff", "max_depth"},
                       "oracle.");
            OracleSettings s;
            if (o.contains("tol")) s.tol = o["tol"].get<double>();
            if (o.contains("T0")) s.start_T = o["T0"].get<double>();
            if (o.contains("max_doublings")) s.max_doublings = o["max_doublings"].get<int>();
            if (o.contains("relative_tolerance")) s.quadrature.relative_tolerance = o["relative_tolerance"].get<double>();
            if (o.contains("cutoff")) s.quadrature.radial_cutoff_multiplier = o["cutoff"].get<double>();
            if (o.contains("max_depth")) s.quadrature.max_depth = o["max_depth"].get<unsigned>();
            if (o.contains("tier")) {
                const auto t = o["tier"].get<std::string>();
                require(t == "analytic" || t == "numeric", "oracle.tier must be analytic or numeric");
                s.quadrature.tier = t == "analytic" ? OracleTier::AnalyticAngular : OracleTier::FullyNumeric;
            }
            cfg.oracle = s;
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad configuration value: ") + e.what());
    }
    if (cfg.model.kind == FieldKind::Vector || cfg.model.kind == FieldKind::Fermion) cfg.model.n = 3;
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), "cannot read configuration file " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_json(buf.str());
}

namespace {

int emit(const SweepConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out) {
    const std::string content = cfg.format == OutputFormat::Csv ? format_csv(cfg, rows) : format_json(cfg, rows);
    if (cfg.output_path.empty() || cfg.output_path == "-")
        out << content;
    else
        write_atomically(cfg.output_path, content);
    return exit_success;
}

}  // namespace

int cmd_scan(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<SweepRow> rows;
    try {
        rows = run_scan(cfg);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    for (const auto& r : rows) {
        if (!std::isfinite(r.probability) || r.probability < 0.0) {
            err << "error: non-finite or negative probability at omega = " << r.point.omega << '\n';
            return exit_nonconvergence;
        }
    }
    try {
        return emit(cfg, rows, out);
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
}

int cmd_verify(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.oracle) {
        err << "error: verify needs oracle settings (--oracle-tol or an oracle table)\n";
        return exit_validation;
    }
    std::vector<SweepRow> rows;
    try {
        rows = run_verify(cfg);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    try {
        emit(cfg, rows, out);
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    const double tol = cfg.oracle->tol;
    int nonconverged = 0;
    int failed = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        if (!r.converged) {
            ++nonconverged;
            err << "non-convergence at omega = " << r.point.omega << ", sigma = " << r.point.sigma << ": " << r.error
                << '\n';
            continue;
        }
        const double limit = r.deviation_absolute ? zero_reference_tolerance : tol;
        if (!(r.deviation < limit)) ++failed;
        if (!r.deviation_absolute) worst = std::max(worst, r.deviation);
    }
    err << "verify: " << rows.size() << " points, max relative deviation " << format_number(worst) << ", "
        << failed << " over tolerance, " << nonconverged << " not converged\n";
    if (nonconverged > 0) return exit_nonconvergence;
    return failed > 0 ? exit_validation : exit_success;
}

namespace {

struct IdentityRow {
    std::string name;
    int cases = 0;
    double worst = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

double log_relative_gap(const LogValue& a, const LogValue& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero() ? 0.0 : 1.0;
    return std::fabs(std::expm1(a.log_magnitude - b.log_magnitude));
}

}  // namespace

int cmd_identities(int max_n, std::ostream& out) {
    if (max_n < 2 || max_n > 6) {
        out << "error: --max-n must lie in [2, 6]\n";
        return exit_validation;
    }
    std::vector<IdentityRow> table;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    {
        IdentityRow row{"angular integral vs quadrature (n=2.." + std::to_string(max_n) + ")", 0, 0.0, 1e-8};
        for (int n = 2; n <= max_n; ++n)
            for (double a : {0.0, 0.1, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0}) {
                const double exact = angular_exp_integral(n, a).value();
                const double numeric = angular_integral_numeric(n, a);
                row.worst = std::max(row.worst, std::fabs(numeric - exact) / exact);
                ++row.cases;
            }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }
    {
        IdentityRow row{"n=3 general form vs sinh form", 0, 0.0, 1e-10};
        for (int i = 0; i < 1000; ++i) {
            WavepacketSpec wp;
            wp.m = 2.0 * unit(rng);
            wp.k0 = 0.2 + 1.8 * unit(rng);
            wp.sigma = 0.05 + 0.95 * unit(rng);
            DetectorSpec det;
            det.omega = wp.m + 3.0 * unit(rng) + 1e-6;
            const auto a = prob_real_scalar(3, det, wp).probability;
            const auto b = prob_real_scalar_3d(det, wp).probability;
            row.worst = std::max(row.worst, log_relative_gap(a, b));
            ++row.cases;
        }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }
    for (const bool perpendicular : {false, true}) {
        IdentityRow row{perpendicular ? "vector general(pi/2) vs perpendicular" : "vector general(0) vs parallel", 0,
                        0.0, 1e-10};
        for (double sigma : {0.05, 0.1, 0.3, 1.0})
            for (double omega : {0.1, 0.5, 0.9, 1.0, 1.2, 2.0}) {
                WavepacketSpec wp;
                wp.sigma = sigma;
                wp.alpha = {cplx(1.0), cplx(0.0)};
                DetectorSpec det;
                det.omega = omega;
                det.theta = perpendicular ? 0.5 * pi : 0.0;
                const auto g = prob_vector_general(det, wp).probability;
                const auto s = perpendicular ? prob_vector_perp(det, wp).probability
                                             : prob_vector_parallel(det, wp).probability;
                row.worst = std::max(row.worst, log_relative_gap(g, s));
                ++row.cases;
            }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }
    {
        IdentityRow row{"complex Bose == Fermi (adiabatic)", 0, 0.0, 0.0};
        for (double omega : {0.5, 1.0, 1.5})
            for (double w : {0.0, 0.3, 1.0}) {
                WavepacketSpec wp;
                wp.alpha[0] = std::sqrt(1.0 - w);
                wp.beta[0] = std::sqrt(w);
                DetectorSpec det;
                det.omega = omega;
                const auto b = prob_complex(3, Statistics::Bose, det, wp).probability;
                const auto f = prob_complex(3, Statistics::Fermi, det, wp).probability;
                const bool same = b.sign == f.sign && (b.is_zero() || b.log_magnitude == f.log_magnitude);
                if (!same) row.worst = 1.0;
                ++row.cases;
            }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }
    {
        IdentityRow row{"finite-T Fermi < Bose, Fermi >= 0", 0, 0.0, 0.0};
        for (double T : {1.0, 2.0, 4.0})
            for (double w : {0.0, 0.5, 0.9}) {
                WavepacketSpec wp;
                wp.alpha[0] = std::sqrt(1.0 - w);
                wp.beta[0] = std::sqrt(w);
                DetectorSpec det;
                det.omega = 1.0;
                const auto b = finite_t_complex(3, Statistics::Bose, det, wp, {T});
                const auto f = finite_t_complex(3, Statistics::Fermi, det, wp, {T});
                if (!(f.total < b.total) || f.total < 0.0) row.worst = 1.0;
                ++row.cases;
            }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }
    {
        IdentityRow row{"counter-rotating <= vacuum (finite T)", 0, 0.0, 0.0};
        for (double T : {1.0, 2.0, 5.0}) {
            WavepacketSpec s;
            DetectorSpec d;
            d.omega = 0.7;
            const auto real = finite_t_real_scalar(3, d, s, {T});
            WavepacketSpec v;
            v.alpha = {cplx(1.0), cplx(0.0)};
            const auto vec = finite_t_vector(d, v, {T});
            WavepacketSpec f;
            f.m = 0.5;
            f.alpha = {cplx(std::sqrt(0.5)), cplx(0.0, std::sqrt(0.5))};
            DetectorSpec df = d;
            df.spinor = {cplx(0.5), cplx(0.5), cplx(0.5), cplx(0.0, 0.5)};
            const auto fer = finite_t_fermion(df, f, {T});
            for (const auto* b : {&real, &vec, &fer}) {
                if (b->counter_rotating > b->vacuum) row.worst = 1.0;
                ++row.cases;
            }
        }
        row.pass = row.worst <= row.threshold;
        table.push_back(row);
    }

    bool all = true;
    out << std::left << std::setw(48) << "identity" << std::setw(8) << "cases" << std::setw(26) << "max deviation"
        << "result\n";
    for (const auto& r : table) {
        out << std::left << std::setw(48) << r.name << std::setw(8) << r.cases << std::setw(26)
            << format_number(r.worst) << (r.pass ? "PASS" : "FAIL") << '\n';
        all = all && r.pass;
    }
    return all ? exit_success : exit_validation;
}

}  // namespace udw
