// stokes_lattice command-line front end
//
// Exit codes: 0 ok, 1 config error, 2 accuracy not met / failed checks, 3 I/O.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stokes_lattice/stokes_lattice.hpp"

namespace sl = stokes_lattice;
using json = nlohmann::json;
using cd = std::complex<double>;

namespace {

enum Exit { ok = 0, config_error = 1, accuracy_error = 2, io_error = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

struct Config {
    bool channel = true;
    double period_l = 2 * sl::pi_v<double>;
    double height_h = 0;
    std::vector<sl::PhysicalSingularity<double>> sings;
    double eta = 1;
    double tolerance = 1e-12;
};

cd read_pair(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(what + " must be a [re, im] pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    Config c;
    try {
        const auto& g = j.at("geometry");
        const auto dom = g.at("domain").get<std::string>();
        if (dom == "channel")
            c.channel = true;
        else if (dom == "halfplane")
            c.channel = false;
        else
            throw ConfigError("geometry.domain must be \"channel\" or \"halfplane\"");
        c.period_l = g.value("period_l", c.period_l);
        if (c.channel) c.height_h = g.at("height_h").get<double>();
        c.eta = j.value("eta", 1.0);
        c.tolerance = j.value("tolerance", 1e-12);
        if (j.contains("singularities")) {
            std::size_t i = 0;
            for (const auto& s : j.at("singularities")) {
                const std::string tag = "singularities[" + std::to_string(i++) + "]";
                sl::Kind k;
                try {
                    k = sl::parse_kind(s.at("kind").get<std::string>());
                } catch (const sl::validation_error& e) {
                    throw ConfigError(tag + ": " + e.what());
                }
                c.sings.push_back({k, read_pair(s.at("mu"), tag + ".mu"), read_pair(s.at("z0"), tag + ".z0")});
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(c.eta > 0) || !std::isfinite(c.eta)) throw ConfigError("eta must be positive");
    if (!(c.tolerance > 0 && c.tolerance < 1)) throw ConfigError("tolerance must lie in (0, 1)");
    return c;
}

// Built problem in canonical units (period 2 pi).  Lengths scale by c,
// velocities are unchanged, pressure and vorticity scale by c.
struct Problem {
    Config cfg;
    double c = 1;
    double canonical_h = 0;
    std::vector<sl::SingularitySpec<double>> specs;
    std::vector<sl::ChannelSolution<double>> ch;
    std::vector<sl::HalfPlaneSolution<double>> hp;
    sl::GoursatParts<double> parts;
    double achieved = 0;

    void rebuild_parts() {
        parts = {};
        if (cfg.channel) {
            parts.rho = std::exp(-canonical_h);
            parts.top = canonical_h;
            for (const auto& s : ch) parts = sl::superpose(parts, s.parts);
        } else {
            for (const auto& s : hp) parts = sl::superpose(parts, s.parts);
        }
    }
};

Problem build_problem(const Config& cfg) {
    Problem p;
    p.cfg = cfg;
    try {
        if (cfg.channel) {
            auto cp = sl::canonicalize(cfg.period_l, cfg.height_h, cfg.sings);
            p.c = cp.geometry.scale_c;
            p.canonical_h = cp.geometry.canonical_h;
            p.specs = cp.specs;
            for (const auto& s : p.specs) {
                p.ch.push_back(sl::build_channel_solution(s.kind, s.mu, s.z0, cp.geometry, cfg.tolerance));
                p.achieved = std::max(p.achieved, p.ch.back().built_tolerance);
            }
        } else {
            auto cp = sl::canonicalize_halfplane(cfg.period_l, cfg.sings);
            p.c = cp.geometry.scale_c;
            p.specs = cp.specs;
            for (const auto& s : p.specs) {
                p.hp.push_back(sl::build_halfplane_solution(s.kind, s.mu, s.z0));
                p.achieved = std::max(p.achieved, double(sl::wall_residual(p.hp.back().parts, 512)));
            }
        }
    } catch (const sl::validation_error& e) {
        throw ConfigError(e.what());
    }
    p.rebuild_parts();
    return p;
}

json meta_of(const Problem& p, const std::string& cmd) {
    json m;
    m["tool"] = "stokes_lattice";
    m["version"] = sl::version;
    m["command"] = cmd;
    m["domain"] = p.cfg.channel ? "channel" : "halfplane";
    m["period_l"] = p.cfg.period_l;
    if (p.cfg.channel) {
        m["height_h"] = p.cfg.height_h;
        m["canonical_h"] = p.canonical_h;
    }
    m["eta"] = p.cfg.eta;
    m["tolerance"] = p.cfg.tolerance;
    m["achieved_tolerance"] = p.achieved;
    json ks = json::array(), ns = json::array();
    for (const auto& s : p.cfg.sings) ks.push_back(sl::kind_name(s.kind));
    for (const auto& s : p.ch) ns.push_back(s.N);
    m["kinds"] = ks;
    if (p.cfg.channel) m["truncation"] = ns;
    m["threads"] = sl::resolve_threads(sl::threads_from_env());
    return m;
}

// output sink: file or stdout
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw IoError("cannot open output '" + path + "'");
        os = &file;
    }
    void finish() {
        os->flush();
        if (!*os) throw IoError("write failed");
    }
};

double window_top(const Problem& p) { return p.cfg.channel ? p.cfg.height_h : p.cfg.period_l; }

// ---- field

struct FieldOpts {
    std::string config, out, format = "csv";
    int nx = 101, ny = 51;
    double exclusion = sl::default_exclusion;
    std::optional<double> tol;
};

int cmd_field(const FieldOpts& o) {
    Config cfg = load_config(o.config);
    if (o.tol) cfg.tolerance = *o.tol;
    if (o.nx < 1 || o.ny < 1) throw ConfigError("--nx and --ny must be positive");
    if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
    Problem p = build_problem(cfg);
    const double L = p.cfg.period_l, top = window_top(p);
    sl::GridSpec<double> g{0, L * p.c, o.nx, 0, top * p.c, o.ny};
    const auto nodes = sl::sample_grid(p.parts, g, o.exclusion, sl::threads_from_env());
    Sink sink(o.out);
    auto& os = *sink.os;
    if (o.format == "csv") {
        os << "x,y,u,v,p_over_eta,omega,masked\n";
        for (const auto& n : nodes) {
            os << num(n.x / p.c) << ',' << num(n.y / p.c) << ',';
            if (n.masked)
                os << ",,,,1\n";
            else
                os << num(n.sample.u) << ',' << num(n.sample.v) << ',' << num(n.sample.p_over_eta * p.c) << ','
                   << num(n.sample.omega * p.c) << ",0\n";
        }
    } else {
        json j;
        j["meta"] = meta_of(p, "field");
        j["meta"]["nx"] = o.nx;
        j["meta"]["ny"] = o.ny;
        j["meta"]["exclusion_radius"] = o.exclusion / p.c;
        json rows = json::array();
        for (const auto& n : nodes) {
            json r{{"x", n.x / p.c}, {"y", n.y / p.c}, {"masked", n.masked}};
            if (n.masked) {
                r["u"] = r["v"] = r["p_over_eta"] = r["omega"] = nullptr;
            } else {
                r["u"] = n.sample.u;
                r["v"] = n.sample.v;
                r["p_over_eta"] = n.sample.p_over_eta * p.c;
                r["omega"] = n.sample.omega * p.c;
            }
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        os << j.dump() << '\n';
    }
    sink.finish();
    return ok;
}

// ---- streamlines

struct StreamOpts {
    std::string config, out, format = "csv", seeds = "auto";
    int nx = 4, ny = 6;
    double step = 1e-2;
    int max_steps = 20000;
    std::optional<double> tol;
};

std::vector<cd> parse_seeds(const std::string& s, const Problem& p, int nx, int ny) {
    std::vector<cd> out;
    if (s == "auto") {
        const double L = p.cfg.period_l, top = window_top(p);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) out.emplace_back(L * (i + 0.5) / nx, top * (j + 0.5) / ny);
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto comma = item.find(',');
        if (comma == std::string::npos) throw ConfigError("--seeds entries must be x,y separated by ';'");
        double x, y;
        auto a = std::from_chars(item.data(), item.data() + comma, x);
        auto b = std::from_chars(item.data() + comma + 1, item.data() + item.size(), y);
        if (a.ec != std::errc() || b.ec != std::errc() || a.ptr != item.data() + comma ||
            b.ptr != item.data() + item.size())
            throw ConfigError("cannot parse seed '" + item + "'");
        out.emplace_back(x, y);
    }
    if (out.empty()) throw ConfigError("--seeds: no seeds given");
    return out;
}

int cmd_streamlines(const StreamOpts& o) {
    Config cfg = load_config(o.config);
    if (o.tol) cfg.tolerance = *o.tol;
    if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
    if (!(o.step > 0) || o.max_steps < 1) throw ConfigError("--step and --max-steps must be positive");
    if (o.nx < 1 || o.ny < 1) throw ConfigError("--nx and --ny must be positive");
    Problem p = build_problem(cfg);
    const auto seeds = parse_seeds(o.seeds, p, o.nx, o.ny);
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (!sl::in_domain(p.parts, seeds[i] * p.c))
            throw ConfigError("seed " + std::to_string(i) + " lies outside the fluid domain");
    std::vector<sl::Streamline<double>> lines(seeds.size());
    sl::parallel_for(seeds.size(), sl::threads_from_env(), [&](std::size_t i) {
        lines[i] = sl::trace_streamline(p.parts, seeds[i] * p.c, o.step, o.max_steps);
    });

    // stagnation count on the line midway between images of the first singularity
    double xm = 0;
    if (!p.specs.empty()) xm = sl::wrap_period(p.specs.front().z0.real() - sl::pi_v<double>);
    const int changes = sl::midline_sign_changes(p.parts, xm, 0.0, window_top(p) * p.c);

    Sink sink(o.out);
    auto& os = *sink.os;
    if (o.format == "csv") {
        os << "line,x,y,reason\n";
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (const auto& z : lines[i].points)
                os << i << ',' << num(z.real() / p.c) << ',' << num(z.imag() / p.c) << ','
                   << sl::stop_reason_name(lines[i].reason) << '\n';
        std::cerr << "midline x=" << num(xm / p.c) << " stagnation points (v sign changes): " << changes << '\n';
    } else {
        json j;
        j["meta"] = meta_of(p, "streamlines");
        j["meta"]["step"] = o.step / p.c;
        j["meta"]["max_steps"] = o.max_steps;
        j["meta"]["seed_count"] = seeds.size();
        j["meta"]["midline_x"] = xm / p.c;
        j["meta"]["midline_sign_changes"] = changes;
        json rows = json::array();
        for (std::size_t i = 0; i < lines.size(); ++i) {
            json pts = json::array();
            for (const auto& z : lines[i].points) pts.push_back({z.real() / p.c, z.imag() / p.c});
            rows.push_back({{"line", i},
                            {"seed", {seeds[i].real(), seeds[i].imag()}},
                            {"reason", sl::stop_reason_name(lines[i].reason)},
                            {"points", std::move(pts)}});
        }
        j["rows"] = std::move(rows);
        os << j.dump() << '\n';
    }
    sink.finish();
    return ok;
}

// ---- coeffs

struct CoeffOpts {
    std::string config, out, format = "csv";
    double zeta = std::exp(-1.0);
    int n_max = 60;
    std::optional<double> tol;
};

int cmd_coeffs(const CoeffOpts& o) {
    Config cfg = load_config(o.config);
    if (o.tol) cfg.tolerance = *o.tol;
    if (!cfg.channel) throw ConfigError("coeffs needs a channel configuration");
    if (cfg.sings.size() != 1) throw ConfigError("coeffs needs exactly one singularity");
    if (o.n_max < 1) throw ConfigError("--nmax must be at least 1");
    if (o.format != "csv" && o.format != "json") throw ConfigError("--format must be csv or json");
    Problem p = build_problem(cfg);
    const auto& s0 = p.ch.front();
    if (!(o.zeta > s0.geometry.rho && o.zeta <= 1)) throw ConfigError("--zeta must lie in (rho, 1]");
    // extend the series if the requested range exceeds the built truncation
    const auto s = s0.N >= o.n_max ? s0 : sl::build_channel_solution_fixed(s0.spec, s0.geometry, o.n_max);
    const double rho = s.geometry.rho, z = o.zeta;
    Sink sink(o.out);
    auto& os = *sink.os;
    json rows = json::array();
    if (o.format == "csv") os << "n,abs_FH,abs_GK\n";
    for (int n = 1; n <= o.n_max; ++n) {
        const double zn = std::pow(z, n), rn = std::pow(rho / z, n);
        const double fh = std::abs(s.F[n - 1] * zn + s.H[n - 1] * rn);
        const double gk = std::abs(s.G[n - 1] * zn + s.K[n - 1] * rn);
        if (o.format == "csv")
            os << n << ',' << num(fh) << ',' << num(gk) << '\n';
        else
            rows.push_back({{"n", n}, {"abs_FH", fh}, {"abs_GK", gk}});
    }
    if (o.format == "json") {
        json j;
        j["meta"] = meta_of(p, "coeffs");
        j["meta"]["zeta"] = z;
        j["meta"]["n_max"] = o.n_max;
        j["rows"] = std::move(rows);
        os << j.dump() << '\n';
    }
    sink.finish();
    return ok;
}

// ---- verify / compare

struct CheckRow {
    std::string context;
    sl::ValidationReport r;
};

json report_json(const Problem& p, const std::string& cmd, const std::vector<CheckRow>& rows) {
    json j;
    j["meta"] = meta_of(p, cmd);
    j["meta"]["seed"] = sl::default_seed;
    json checks = json::array();
    bool all = true;
    for (const auto& c : rows) {
        all = all && c.r.pass;
        checks.push_back({{"context", c.context},
                          {"name", c.r.name},
                          {"max_residual", std::isfinite(c.r.max_residual) ? json(c.r.max_residual) : json(nullptr)},
                          {"tolerance", c.r.tolerance},
                          {"samples", c.r.samples},
                          {"pass", c.r.pass}});
    }
    j["checks"] = std::move(checks);
    j["pass"] = all;
    return j;
}

void print_table(std::ostream& os, const std::vector<CheckRow>& rows) {
    char line[256];
    for (const auto& c : rows) {
        std::snprintf(line, sizeof line, "%-28s %-30s %11.3e  tol %9.2e  %s\n", c.context.c_str(), c.r.name.c_str(),
                      c.r.max_residual, c.r.tolerance, c.r.pass ? "PASS" : "FAIL");
        os << line;
    }
}

int emit_report(const Problem& p, const std::string& cmd, const std::vector<CheckRow>& rows, bool as_json,
                const std::string& out) {
    Sink sink(out);
    if (as_json)
        *sink.os << report_json(p, cmd, rows).dump(2) << '\n';
    else
        print_table(*sink.os, rows);
    sink.finish();
    for (const auto& c : rows)
        if (!c.r.pass) return accuracy_error;
    return ok;
}

struct VerifyOpts {
    std::string config, out;
    bool json = false;
    bool inject_fault = false;
    std::optional<double> tol;
};

int cmd_verify(const VerifyOpts& o) {
    Config cfg = load_config(o.config);
    if (o.tol) cfg.tolerance = *o.tol;
    Problem p = build_problem(cfg);
    if (o.inject_fault) {
        // test hook: corrupt one coefficient so the wall condition breaks
        if (!p.ch.empty() && !p.ch.front().parts.F.empty())
            p.ch.front().parts.F.front() += cd(1e-3, 0);
        else if (!p.hp.empty())
            p.hp.front().parts.Gc += cd(1e-3, 0);
        else
            p.parts.Gc += cd(1e-3, 0);
        if (!p.ch.empty() || !p.hp.empty()) p.rebuild_parts();
    }
    std::vector<CheckRow> rows;
    auto add = [&](const std::string& ctx, const std::vector<sl::ValidationReport>& v) {
        for (const auto& r : v) rows.push_back({ctx, r});
    };
    auto ctx_of = [&](std::size_t i) {
        return "singularity " + std::to_string(i) + " " + sl::kind_name(p.specs[i].kind);
    };
    const double tol_wall = p.cfg.channel ? std::max(1e-11, 10 * cfg.tolerance) : 1e-13;
    for (std::size_t i = 0; i < p.ch.size(); ++i) {
        const auto& s = p.ch[i];
        auto v = sl::validation_battery(s, cfg.eta);
        v.front() = sl::noslip_residual(s, 512, tol_wall);
        v.push_back(sl::make_report("coefficient_system", s.system_residual, std::size_t(s.N), 1e-13));
        bool positive = true;
        for (int n = 1; n <= s.N; ++n) positive = positive && sl::channel_denominator(n, s.geometry.canonical_h) > 0;
        v.push_back(sl::make_report("denominator_positivity", positive ? 0.0 : 1.0, std::size_t(s.N), 0.0));
        add(ctx_of(i), v);
    }
    for (std::size_t i = 0; i < p.hp.size(); ++i) add(ctx_of(i), sl::validation_battery(p.hp[i], cfg.eta));
    if (p.specs.size() != 1) {
        std::vector<sl::ValidationReport> v{sl::noslip_residual(p.parts, 512, tol_wall)};
        for (auto& r : sl::periodicity_residual(p.parts)) v.push_back(r);
        add("superposition", v);
    }
    return emit_report(p, "verify", rows, o.json, o.out);
}

struct CompareOpts {
    std::string config, out;
    bool json = false;
    int M = 24;
    int nx = 20, ny = 10;
    std::optional<double> tol;
};

int cmd_compare(const CompareOpts& o) {
    Config cfg = load_config(o.config);
    if (o.tol) cfg.tolerance = *o.tol;
    if (!cfg.channel) throw ConfigError("compare needs a channel configuration");
    if (cfg.sings.empty()) throw ConfigError("compare needs at least one singularity");
    if (o.nx < 2 || o.ny < 2) throw ConfigError("--nx and --ny must be at least 2");
    for (std::size_t i = 0; i < cfg.sings.size(); ++i)
        if (cfg.sings[i].kind != sl::Kind::stokeslet && cfg.sings[i].kind != sl::Kind::stresslet)
            throw ConfigError("singularities[" + std::to_string(i) +
                              "]: the transform oracle supports stokeslet and stresslet only");
    Problem p = build_problem(cfg);
    sl::oracle::OracleOptions opt;
    opt.M = o.M;
    opt.threads = sl::threads_from_env();
    std::vector<CheckRow> rows;
    for (std::size_t i = 0; i < p.ch.size(); ++i) {
        const auto& s = p.ch[i];
        sl::oracle::SpectralSystem sys;
        try {
            sys = sl::oracle::assemble_and_solve(s.spec.kind, sl::oracle::CL(s.spec.mu.real(), s.spec.mu.imag()),
                                                 sl::oracle::CL(s.spec.z0.real(), s.spec.z0.imag()),
                                                 sl::oracle::LD(s.geometry.canonical_h), opt);
        } catch (const sl::validation_error& e) {
            throw ConfigError(e.what());
        }
        const std::string ctx = "singularity " + std::to_string(i) + " " + sl::kind_name(s.spec.kind);
        rows.push_back({ctx, sl::cross_method_compare(s, sys, sl::oracle_grid<double>(sys, o.nx, o.ny))});
        rows.push_back({ctx, sl::root_residual_report(sys)});
        for (auto& r : sl::global_relation_check(sys)) rows.push_back({ctx, r});
        std::cerr << ctx << ": oracle residual " << num(double(sys.residual)) << ", condition "
                  << num(double(sys.cond)) << ", rank " << sys.rank << "/" << sys.equations << '\n';
        if (sys.ill_conditioned) std::cerr << ctx << ": warning: oracle system is ill-conditioned\n";
    }
    return emit_report(p, "compare", rows, o.json, o.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singly periodic Stokes singularity arrays in a channel or above a wall"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sl::version));

    FieldOpts fo;
    auto* field = app.add_subcommand("field", "sample u, v, p/eta, omega on a grid over one period window");
    field->add_option("--config", fo.config, "problem file (JSON)")->required();
    field->add_option("--out", fo.out, "output path (default stdout)");
    field->add_option("--format", fo.format, "csv or json");
    field->add_option("--nx", fo.nx, "grid nodes in x");
    field->add_option("--ny", fo.ny, "grid nodes in y");
    field->add_option("--exclusion", fo.exclusion, "mask radius around singularities (canonical units)");
    field->add_option("--tol", fo.tol, "build tolerance (overrides the config)");

    StreamOpts so;
    auto* stream = app.add_subcommand("streamlines", "trace streamlines with RK4");
    stream->add_option("--config", so.config, "problem file (JSON)")->required();
    stream->add_option("--out", so.out, "output path (default stdout)");
    stream->add_option("--format", so.format, "csv or json");
    stream->add_option("--seeds", so.seeds, "'auto' or 'x,y;x,y;...' in physical units");
    stream->add_option("--nx", so.nx, "auto seed columns");
    stream->add_option("--ny", so.ny, "auto seed rows");
    stream->add_option("--step", so.step, "RK4 step (canonical units)");
    stream->add_option("--max-steps", so.max_steps, "step budget per line");
    stream->add_option("--tol", so.tol, "build tolerance (overrides the config)");

    CoeffOpts co;
    auto* coeffs = app.add_subcommand("coeffs", "Laurent term magnitudes at a probe radius");
    coeffs->add_option("--config", co.config, "problem file (JSON)")->required();
    coeffs->add_option("--out", co.out, "output path (default stdout)");
    coeffs->add_option("--format", co.format, "csv or json");
    coeffs->add_option("--zeta", co.zeta, "probe |zeta| (default e^-1)");
    coeffs->add_option("--nmax", co.n_max, "largest n");
    coeffs->add_option("--tol", co.tol, "build tolerance (overrides the config)");

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "run the validation battery");
    verify->add_option("--config", vo.config, "problem file (JSON)")->required();
    verify->add_option("--out", vo.out, "report path (default stdout)");
    verify->add_flag("--json", vo.json, "machine-readable report");
    verify->add_option("--tol", vo.tol, "build tolerance (overrides the config)");
    verify->add_flag("--inject-fault", vo.inject_fault, "corrupt a coefficient (test hook)")->group("");

    CompareOpts cmo;
    auto* compare = app.add_subcommand("compare", "series solution vs transform-method oracle");
    compare->add_option("--config", cmo.config, "problem file (JSON)")->required();
    compare->add_option("--out", cmo.out, "report path (default stdout)");
    compare->add_flag("--json", cmo.json, "machine-readable report");
    compare->add_option("--M", cmo.M, "Chebyshev basis size");
    compare->add_option("--nx", cmo.nx, "comparison grid nodes in x");
    compare->add_option("--ny", cmo.ny, "comparison grid nodes in y");
    compare->add_option("--tol", cmo.tol, "build tolerance (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (*field) return cmd_field(fo);
        if (*stream) return cmd_streamlines(so);
        if (*coeffs) return cmd_coeffs(co);
        if (*verify) return cmd_verify(vo);
        if (*compare) return cmd_compare(cmo);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const sl::validation_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const sl::accuracy_error& e) {
        std::cerr << "accuracy not met: " << e.what() << '\n';
        return accuracy_error;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const sl::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return accuracy_error;
    }
    return ok;
}
