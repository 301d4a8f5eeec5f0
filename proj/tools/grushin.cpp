// Command-line front end: every library operation is reachable from one
// of the eight subcommands (see --ops). Reports are JSON, point clouds
// and tables are CSV; identical flags and seed give byte-identical bytes.
//
// Exit codes: 0 success, 1 failed check or numerical error (structured
// JSON error object on stdout), 2 usage error (message on stderr).

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grushin/calculus.hpp"
#include "grushin/errors.hpp"
#include "grushin/flows.hpp"
#include "grushin/metric.hpp"
#include "grushin/plane_maps.hpp"
#include "grushin/profile.hpp"
#include "grushin/symmetry.hpp"

using nlohmann::ordered_json;
using namespace grushin;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> parse_doubles(const std::string& text, std::size_t min_n,
                                  std::size_t max_n, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (!text.empty() && pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError(what + ": bad number '" + tok + "' in '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.size() < min_n || out.size() > max_n)
        throw UsageError(what + ": expected " + std::to_string(min_n) +
                         (max_n > min_n ? ".." + std::to_string(max_n) : "") +
                         " comma-separated numbers, got '" + text + "'");
    return out;
}

GrushinPoint parse_point(const std::string& text, const std::string& what) {
    const auto v = parse_doubles(text, 2, 2, what);
    return {v[0], v[1]};
}

Box parse_box(const std::string& text, const std::string& what) {
    const auto v = parse_doubles(text, 4, 4, what);
    if (!(v[0] < v[1]) || !(v[2] < v[3]))
        throw UsageError(what + ": box must satisfy u_lo < u_hi and v_lo < v_hi");
    return {v[0], v[1], v[2], v[3]};
}

Region parse_region(const std::string& text, const std::string& what) {
    const auto v = parse_doubles(text, 4, 6, what);
    if (v.size() == 5) throw UsageError(what + ": give 4 bounds or 4 bounds + 2 counts");
    Region reg{v[0], v[1], v[2], v[3], 25, 25};
    if (v.size() == 6) {
        reg.nu = static_cast<int>(v[4]);
        reg.nv = static_cast<int>(v[5]);
        if (static_cast<double>(reg.nu) != v[4] || static_cast<double>(reg.nv) != v[5] ||
            reg.nu < 2 || reg.nv < 2)
            throw UsageError(what + ": grid counts must be integers >= 2");
    }
    if (!(reg.u_lo < reg.u_hi) || !(reg.v_lo < reg.v_hi))
        throw UsageError(what + ": region must satisfy u_lo < u_hi and v_lo < v_hi");
    return reg;
}

ProfileFamily family_from_string(const std::string& name) {
    if (name == "classical") return ProfileFamily::classical;
    if (name == "power") return ProfileFamily::power;
    if (name == "log_power" || name == "log") return ProfileFamily::log_power;
    throw UsageError("profile file: unknown family '" + name +
                     "' (expected classical, power, or log_power)");
}

/// "classical" | "power:3" | "log:2" | "@profile.json"
Profile resolve_profile(const std::string& desc) {
    if (!desc.empty() && desc[0] == '@') {
        const std::string path = desc.substr(1);
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open profile file '" + path + "'");
        try {
            const auto j = ordered_json::parse(in);
            const auto family = family_from_string(j.at("family").get<std::string>());
            std::map<std::string, double> params;
            if (j.contains("params"))
                for (const auto& [key, val] : j.at("params").items())
                    params[key] = val.get<double>();
            return make_profile(family, params);
        } catch (const ordered_json::exception& e) {
            throw UsageError("profile file '" + path + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("profile file: ") + e.what());
        }
    }
    try {
        return parse_profile(desc);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

PlaneMap resolve_map(const std::string& desc) {
    try {
        return parse_plane_map(desc);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

ordered_json point_json(GrushinPoint w) { return ordered_json::array({w.u, w.v}); }

ordered_json complex_json(std::complex<double> z) {
    return ordered_json::array({z.real(), z.imag()});
}

int emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + out_path + "'");
    f << payload;
    return 0;
}

int emit_json(const ordered_json& j, const std::string& out_path, int exit_code = 0) {
    emit(j.dump(2) + "\n", out_path);
    return exit_code;
}

ordered_json certificate_json(const ConformalityCertificate& cert,
                              const std::string& map_name) {
    ordered_json j;
    j["map"] = map_name;
    j["passed"] = cert.passed;
    j["max_diag_dev"] = cert.max_diag_dev;
    j["max_offdiag_dev"] = cert.max_offdiag_dev;
    j["min_det"] = cert.min_det;
    j["max_abs_nu"] = cert.max_abs_nu;
    j["worst"] = point_json(cert.worst);
    j["n_grid"] = cert.n_grid;
    j["n_skipped"] = cert.n_skipped;
    j["n_probes"] = cert.n_probes;
    j["failures"] = cert.failures;
    j["h"] = cert.fd_step;
    j["tube_margin"] = cert.tube_margin;
    j["tol"] = cert.tol;
    return j;
}

/// Step-doubling on top of the fixed-step integrator: double the step
/// count until two consecutive answers agree to 1e-9 relative.
GrushinPoint integrate_adaptive(const FlowSpec& spec, GrushinPoint w, int start_steps) {
    int n = std::max(1, start_steps);
    GrushinPoint prev = integrate_flow(spec, w, n);
    for (int round = 0; round < 16; ++round) {
        n *= 2;
        const GrushinPoint next = integrate_flow(spec, w, n);
        const double gap =
            std::max(std::abs(prev.u - next.u), std::abs(prev.v - next.v));
        const double mag = std::max(std::abs(next.u), std::abs(next.v));
        if (gap <= 1e-9 * (1.0 + mag)) return next;
        prev = next;
    }
    throw DivergenceError(
        "adaptive integration: step doubling did not reach 1e-9 within 16 rounds");
}

// Operation -> owning subcommand, for scripted coverage audits.
constexpr const char* kOpsTable[][2] = {
    {"make_profile", "profile"},
    {"estimate_beta", "profile"},
    {"estimate_doubling", "profile"},
    {"validate_profile", "profile"},
    {"solve_M", "dist"},
    {"quasidistance", "dist"},
    {"path_length", "ccdist"},
    {"cc_upper_lshape", "ccdist"},
    {"cc_estimate", "ccdist"},
    {"comparability_check", "ccdist"},
    {"covering_number", "cover"},
    {"phi", "qscheck"},
    {"phi_inverse", "qscheck"},
    {"sup_norm_dist", "qscheck"},
    {"weak_qs_sample", "qscheck"},
    {"lemma32_check", "qscheck"},
    {"lemma33_check", "qscheck"},
    {"frame_derivative", "beltrami"},
    {"grushin_beltrami_nu", "beltrami"},
    {"classical_beltrami_mu", "beltrami"},
    {"conjugation_consistency", "beltrami"},
    {"conformality_test", "conformal"},
    {"xi_eta", "flow"},
    {"flow_rhs", "flow"},
    {"closed_form_flow", "flow"},
    {"integrate_flow", "flow"},
    {"branch_domain_contains", "flow"},
    {"flow_conformality_check", "conformal"},
};

struct ProfileArgs {
    std::string profile;
    std::string range = "1e-6,1e6";
    int samples = kDefaultCertSamples;
    std::string out;
};

int run_profile(const ProfileArgs& a) {
    Profile p = resolve_profile(a.profile);
    if (a.samples < 8) throw UsageError("--samples: need at least 8");
    const auto range = parse_doubles(a.range, 2, 2, "--range");
    if (!(range[0] > 0.0) || !(range[0] < range[1]))
        throw UsageError("--range: need 0 < lo < hi");
    const ProfileReport rep = validate_profile(p, {range[0], range[1]}, a.samples);

    ordered_json j;
    j["profile"] = rep.profile_name;
    j["family"] = to_string(p.family);
    j["admissible"] = rep.admissible;
    j["beta_hat"] = rep.beta_hat;
    j["m_hat"] = rep.m_hat;
    j["beta_certified"] = rep.beta_certified;
    j["m_certified"] = rep.m_certified;
    j["beta_diverging"] = rep.beta_diverging;
    j["m_diverging"] = rep.m_diverging;
    j["checks"] = ordered_json::array();
    for (const auto& c : rep.checks) {
        ordered_json cj;
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["warning"] = c.warning;
        cj["worst_value"] = c.worst_value;
        cj["worst_at"] = c.worst_at;
        cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    j["warnings"] = rep.warnings;
    return emit_json(j, a.out, rep.admissible ? 0 : 1);
}

struct DistArgs {
    std::string profile, from, to, out;
};

int run_dist(const DistArgs& a) {
    const Profile p = resolve_profile(a.profile);
    const auto res = quasidistance(p, parse_point(a.from, "--from"),
                                   parse_point(a.to, "--to"));
    ordered_json j;
    j["quasidistance"] = res.value;
    if (res.M)
        j["M"] = *res.M;
    else
        j["M"] = nullptr;
    j["branch"] = to_string(res.branch);
    return emit_json(j, a.out);
}

struct CcdistArgs {
    std::string profile, from, to, out;
    int nodes = 11;
    int iters = 3;
    bool compare = false;
};

int run_ccdist(const CcdistArgs& a) {
    Profile p = resolve_profile(a.profile);
    const GrushinPoint w = parse_point(a.from, "--from");
    const GrushinPoint w2 = parse_point(a.to, "--to");
    if (a.nodes < 4) throw UsageError("--nodes: need at least 4");
    if (a.iters < 0) throw UsageError("--iters: must be nonnegative");

    if (a.compare) {
        estimate_doubling(p);
        const ComparabilityReport rep = comparability_check(p, w, w2);
        ordered_json j;
        j["passed"] = rep.passed;
        j["quasidistance"] = rep.quasidistance;
        j["cc_estimate"] = rep.cc_estimate;
        j["cc_lshape"] = rep.cc_lshape;
        j["ratio_cc_over_d"] = rep.ratio_cc_over_d;
        j["ratio_d_over_cc"] = rep.ratio_d_over_cc;
        j["upper_factor"] = rep.upper_factor;
        j["lower_factor"] = rep.lower_factor;
        j["tol"] = rep.tol;
        return emit_json(j, a.out, rep.passed ? 0 : 1);
    }

    const auto lshape = cc_upper_lshape(p, w, w2);
    const auto refined = cc_estimate(p, w, w2, a.nodes, a.iters);
    ordered_json j;
    j["cc_estimate"] = refined.first;
    j["cc_lshape"] = lshape.first;
    j["path_length"] = path_length(p, refined.second);
    j["quasidistance"] = quasidistance(p, w, w2).value;
    j["path"] = ordered_json::array();
    for (const auto& node : refined.second.nodes) j["path"].push_back(point_json(node));
    return emit_json(j, a.out);
}

struct QscheckArgs {
    std::string profile;
    std::string box = "-5,5,-5,5";
    long long n = 1000;
    std::uint64_t seed = 1;
    std::string backend = "quasidistance";
    double axis_fraction = 0.1;
    int cc_top = 32;
    int threads = 1;
    int lemma = 0;
    std::string from, to, out;
};

int run_qscheck(const QscheckArgs& a) {
    Profile p = resolve_profile(a.profile);

    if (a.lemma != 0) {
        if (a.lemma != 32 && a.lemma != 33)
            throw UsageError("--lemma: expected 32 or 33");
        if (a.from.empty() || a.to.empty())
            throw UsageError("--lemma needs --from and --to");
        estimate_beta(p);
        estimate_doubling(p);
        const GrushinPoint w = parse_point(a.from, "--from");
        const GrushinPoint w2 = parse_point(a.to, "--to");
        const LemmaReport rep =
            a.lemma == 32 ? lemma32_check(p, w, w2) : lemma33_check(p, w, w2);
        ordered_json j;
        j["check"] = a.lemma == 32 ? "large_height_pairs" : "small_height_pairs";
        j["applicable"] = rep.applicable;
        j["passed"] = rep.passed;
        j["quasidistance"] = rep.quasidistance;
        j["middle"] = rep.middle;
        j["image_dist"] = rep.image_dist;
        j["ratio_mid_over_img"] = rep.ratio_mid_over_img;
        j["ratio_img_over_mid"] = rep.ratio_img_over_mid;
        j["bound"] = rep.bound;
        return emit_json(j, a.out, rep.passed ? 0 : 1);
    }

    WeakQsOptions opt;
    opt.box = parse_box(a.box, "--box");
    if (a.n < 1) throw UsageError("--n: need at least 1 triple");
    opt.n_triples = a.n;
    opt.seed = a.seed;
    const char* env = std::getenv("GRUSHIN_SEED");
    if (env && *env) {
        try {
            std::size_t used = 0;
            opt.seed = std::stoull(env, &used);
            if (used != std::strlen(env)) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("GRUSHIN_SEED: bad unsigned integer '") + env +
                             "'");
        }
    }
    if (a.backend == "quasidistance")
        opt.backend = QsBackend::quasidistance_scaled;
    else if (a.backend == "cc")
        opt.backend = QsBackend::cc_estimate;
    else
        throw UsageError("--backend: expected 'quasidistance' or 'cc'");
    if (!(a.axis_fraction >= 0.0 && a.axis_fraction <= 1.0))
        throw UsageError("--axis-fraction: must lie in [0, 1]");
    opt.axis_fraction = a.axis_fraction;
    if (a.cc_top < 1) throw UsageError("--cc-top: need at least 1");
    opt.cc_top = a.cc_top;
    if (a.threads < 1) throw UsageError("--threads: need at least 1");
    opt.threads = a.threads;

    const QSReport rep = weak_qs_sample(p, opt);
    ordered_json j;
    j["c_emp"] = rep.c_emp;
    j["n_triples"] = rep.n_triples;
    j["n_admitted"] = rep.n_admitted;
    j["n_skipped"] = rep.n_skipped;
    j["backend"] = to_string(rep.distance_backend);
    j["seed"] = opt.seed;
    if (rep.worst_triple) {
        ordered_json t;
        t["w"] = point_json(rep.worst_triple->w);
        t["a"] = point_json(rep.worst_triple->a);
        t["b"] = point_json(rep.worst_triple->b);
        t["ratio"] = rep.worst_triple->ratio;
        j["worst_triple"] = t;
    } else {
        j["worst_triple"] = nullptr;
    }
    return emit_json(j, a.out);
}

struct BeltramiArgs {
    std::string profile, map, at, grid, out;
    double h = 1e-4;
    double tube = 0.05;
    bool consistency = false;
};

int run_beltrami(const BeltramiArgs& a) {
    const Profile p = resolve_profile(a.profile);
    const PlaneMap f = resolve_map(a.map);
    const GrushinMap m = conjugated_map(p, f);
    if (!(a.h > 0.0)) throw UsageError("--h: must be positive");

    if (a.consistency) {
        const Region grid = parse_region(a.grid.empty() ? "0.2,2,-1,1" : a.grid, "--grid");
        const ConsistencyReport rep = conjugation_consistency(m, grid, a.h, a.tube);
        ordered_json j;
        j["map"] = f.name;
        j["max_deviation"] = rep.max_deviation;
        j["worst"] = point_json(rep.worst);
        j["n_evaluated"] = rep.n_evaluated;
        j["n_skipped"] = rep.n_skipped;
        j["h"] = rep.fd_step;
        j["tube_margin"] = rep.tube_margin;
        return emit_json(j, a.out);
    }

    if (a.at.empty()) throw UsageError("beltrami: need --at u,v (or --consistency)");
    const GrushinPoint at = parse_point(a.at, "--at");
    const DerivativeSample ds = frame_derivative(m, at, a.h);
    const auto mu = classical_beltrami_mu(f, phi(p, at), a.h);
    ordered_json j;
    j["map"] = f.name;
    j["at"] = point_json(at);
    j["h"] = a.h;
    ordered_json frame;
    frame["Ug1"] = ds.Ug1;
    frame["Vg1"] = ds.Vg1;
    frame["Ug2"] = ds.Ug2;
    frame["Vg2"] = ds.Vg2;
    j["frame"] = frame;
    j["W"] = complex_json(ds.W_tilde);
    j["Wbar"] = complex_json(ds.Wbar_tilde);
    j["nu"] = ds.nu ? complex_json(*ds.nu) : ordered_json(nullptr);
    j["mu_at_image"] = mu ? complex_json(*mu) : ordered_json(nullptr);
    if (ds.drg_defined)
        j["Drg"] = ordered_json::array(
            {ordered_json::array({ds.Drg.a11, ds.Drg.a12}),
             ordered_json::array({ds.Drg.a21, ds.Drg.a22})});
    else
        j["Drg"] = nullptr;
    j["r_prime_g1"] = ds.r_prime_g1;
    return emit_json(j, a.out);
}

struct ConformalArgs {
    std::string profile, map, flow, region, out;
    double h = 1e-4;
    double tol = 1e-5;
    double tube = 0.05;
};

int run_conformal(const ConformalArgs& a) {
    const Profile p = resolve_profile(a.profile);
    if (a.map.empty() == a.flow.empty())
        throw UsageError("conformal: need exactly one of --map or --flow");
    const Region region =
        parse_region(a.region.empty() ? "0.2,2,-1,1" : a.region, "--region");
    if (!(a.h > 0.0)) throw UsageError("--h: must be positive");

    if (!a.map.empty()) {
        const PlaneMap f = resolve_map(a.map);
        const auto cert =
            conformality_test(conjugated_map(p, f), region, a.h, a.tol, a.tube);
        return emit_json(certificate_json(cert, f.name), a.out, cert.passed ? 0 : 1);
    }

    const auto kv = parse_doubles(a.flow, 2, 2, "--flow");
    const int k = static_cast<int>(kv[0]);
    if (static_cast<double>(k) != kv[0]) throw UsageError("--flow: k must be an integer");
    const FlowSpec spec{k, kv[1], p};
    const auto cert = flow_conformality_check(spec, region, a.h);
    char name[64];
    std::snprintf(name, sizeof(name), "payne_flow:%d,%g", k, kv[1]);
    return emit_json(certificate_json(cert, name), a.out, cert.passed ? 0 : 1);
}

struct FlowArgs {
    std::string profile, from, out;
    int k = 1;
    double s = 0.0;
    std::string method = "closed";
    int steps = 64;
    int traj = 0;
};

int run_flow(const FlowArgs& a) {
    const Profile p = resolve_profile(a.profile);
    const GrushinPoint w = parse_point(a.from, "--from");
    if (a.method != "closed" && a.method != "rk4" && a.method != "adaptive")
        throw UsageError("--method: expected closed, rk4, or adaptive");
    if (a.steps < 1) throw UsageError("--steps: need at least 1");
    const FlowSpec spec{a.k, a.s, p};

    auto advance = [&](double s_part, GrushinPoint from) {
        const FlowSpec sub{a.k, s_part, p};
        if (a.method == "closed") return closed_form_flow(sub, from);
        if (a.method == "rk4") return integrate_flow(sub, from, a.steps);
        return integrate_adaptive(sub, from, a.steps);
    };

    if (a.traj > 0) {
        std::string csv = "s,u,v,x,y\n";
        for (int i = 0; i <= a.traj; ++i) {
            const double si = a.s * i / a.traj;
            const GrushinPoint q = advance(si, w);
            const PlanePoint z = phi(p, q);
            csv += fmt17(si) + "," + fmt17(q.u) + "," + fmt17(q.v) + "," + fmt17(z.x) +
                   "," + fmt17(z.y) + "\n";
        }
        return emit(csv, a.out);
    }

    const auto rhs = flow_rhs(spec, w);
    const bool safe = branch_domain_contains(spec, w);
    const GrushinPoint to = advance(a.s, w);
    ordered_json j;
    j["k"] = a.k;
    j["s"] = a.s;
    j["from"] = point_json(w);
    j["method"] = a.method;
    j["branch_safe"] = safe;
    j["rhs"] = ordered_json::array({rhs.first, rhs.second});
    j["to"] = point_json(to);
    return emit_json(j, a.out);
}

struct CoverArgs {
    std::string profile, square, eps, out;
};

int run_cover(const CoverArgs& a) {
    const Profile p = resolve_profile(a.profile);
    const auto sq = parse_doubles(a.square, 3, 3, "--square");
    if (!(sq[2] > 0.0)) throw UsageError("--square: side must be positive");
    const auto eps_list = parse_doubles(a.eps, 1, 64, "--eps");
    for (double e : eps_list)
        if (!(e > 0.0)) throw UsageError("--eps: radii must be positive");

    std::string csv = "eps,count,ratio\n";
    for (double e : eps_list) {
        const long long count = covering_number(p, {{sq[0], sq[1]}, sq[2]}, e);
        const double ratio =
            static_cast<double>(count) * e * e / std::log(1.0 / e);
        csv += fmt17(e) + "," + std::to_string(count) + "," + fmt17(ratio) + "\n";
    }
    return emit(csv, a.out);
}

const char* error_type(const Error& e) {
    if (dynamic_cast<const RefusalError*>(&e)) return "refusal";
    if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    return "error";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for generalized Grushin planes"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(0, 1);
    bool ops = false;
    app.add_flag("--ops", ops, "print the operation coverage table (CSV) and exit");

    ProfileArgs pa;
    auto* sc_profile =
        app.add_subcommand("profile", "validate a profile and report its certificates");
    sc_profile->add_option("--profile", pa.profile, "profile descriptor")->required();
    sc_profile->add_option("--range", pa.range, "certificate range lo,hi");
    sc_profile->add_option("--samples", pa.samples, "samples per sweep");
    sc_profile->add_option("-o,--output", pa.out, "write the report to a file");

    DistArgs da;
    auto* sc_dist = app.add_subcommand("dist", "quasidistance between two points");
    sc_dist->add_option("--profile", da.profile, "profile descriptor")->required();
    sc_dist->add_option("--from", da.from, "first point u,v")->required();
    sc_dist->add_option("--to", da.to, "second point u,v")->required();
    sc_dist->add_option("-o,--output", da.out, "write the report to a file");

    CcdistArgs ca;
    auto* sc_ccdist =
        app.add_subcommand("ccdist", "path-length distance estimate and comparability");
    sc_ccdist->add_option("--profile", ca.profile, "profile descriptor")->required();
    sc_ccdist->add_option("--from", ca.from, "first point u,v")->required();
    sc_ccdist->add_option("--to", ca.to, "second point u,v")->required();
    sc_ccdist->add_option("--nodes", ca.nodes, "refined path node count");
    sc_ccdist->add_option("--iters", ca.iters, "coordinate descent sweeps");
    sc_ccdist->add_flag("--compare", ca.compare,
                        "emit the two-sided comparability report instead");
    sc_ccdist->add_option("-o,--output", ca.out, "write the report to a file");

    QscheckArgs qa;
    auto* sc_qscheck = app.add_subcommand(
        "qscheck", "sampled weak quasisymmetry constant or two-point distance checks");
    sc_qscheck->add_option("--profile", qa.profile, "profile descriptor")->required();
    sc_qscheck->add_option("--box", qa.box, "sampling box u_lo,u_hi,v_lo,v_hi");
    sc_qscheck->add_option("--n", qa.n, "number of sampled triples");
    sc_qscheck->add_option("--seed", qa.seed,
                           "RNG seed (environment GRUSHIN_SEED overrides)");
    sc_qscheck->add_option("--backend", qa.backend,
                           "admission distance: quasidistance or cc");
    sc_qscheck->add_option("--axis-fraction", qa.axis_fraction,
                           "share of coordinates snapped to the singular line");
    sc_qscheck->add_option("--cc-top", qa.cc_top, "worst triples re-checked by cc");
    sc_qscheck->add_option("--threads", qa.threads, "worker threads");
    sc_qscheck->add_option("--lemma", qa.lemma,
                           "run the 32 (large heights) or 33 (small heights) "
                           "two-point check instead");
    sc_qscheck->add_option("--from", qa.from, "first point u,v (lemma mode)");
    sc_qscheck->add_option("--to", qa.to, "second point u,v (lemma mode)");
    sc_qscheck->add_option("-o,--output", qa.out, "write the report to a file");

    BeltramiArgs ba;
    auto* sc_beltrami = app.add_subcommand(
        "beltrami", "frame derivatives and Beltrami quotients of a conjugated map");
    sc_beltrami->add_option("--profile", ba.profile, "profile descriptor")->required();
    sc_beltrami->add_option("--map", ba.map, "plane map descriptor")->required();
    sc_beltrami->add_option("--at", ba.at, "evaluation point u,v");
    sc_beltrami->add_flag("--consistency", ba.consistency,
                          "compare nu against mu over a grid");
    sc_beltrami->add_option("--grid", ba.grid,
                            "grid u_lo,u_hi,v_lo,v_hi[,nu,nv] (consistency mode)");
    sc_beltrami->add_option("--fd-step", ba.h, "finite difference step");
    sc_beltrami->add_option("--tube", ba.tube, "singular tube margin");
    sc_beltrami->add_option("-o,--output", ba.out, "write the report to a file");

    ConformalArgs fa;
    auto* sc_conformal =
        app.add_subcommand("conformal", "conformality certificate on a region");
    sc_conformal->add_option("--profile", fa.profile, "profile descriptor")->required();
    sc_conformal->add_option("--map", fa.map, "plane map descriptor");
    sc_conformal->add_option("--flow", fa.flow, "flow k,s instead of a plane map");
    sc_conformal->add_option("--region", fa.region,
                             "region u_lo,u_hi,v_lo,v_hi[,nu,nv]");
    sc_conformal->add_option("--fd-step", fa.h, "finite difference step");
    sc_conformal->add_option("--tol", fa.tol, "certificate tolerance (--map mode)");
    sc_conformal->add_option("--tube", fa.tube, "singular tube margin (--map mode)");
    sc_conformal->add_option("-o,--output", fa.out, "write the report to a file");

    FlowArgs fl;
    auto* sc_flow = app.add_subcommand("flow", "evaluate a flow map or trajectory");
    sc_flow->add_option("--profile", fl.profile, "profile descriptor")->required();
    sc_flow->add_option("--k", fl.k, "field index k >= 1")->required();
    sc_flow->add_option("--s", fl.s, "flow time s >= 0")->required();
    sc_flow->add_option("--from", fl.from, "initial point u,v")->required();
    sc_flow->add_option("--method", fl.method, "closed, rk4, or adaptive");
    sc_flow->add_option("--steps", fl.steps, "fixed step count (rk4/adaptive start)");
    sc_flow->add_option("--traj", fl.traj,
                        "emit a CSV trajectory with this many intervals");
    sc_flow->add_option("-o,--output", fl.out, "write the output to a file");

    CoverArgs cv;
    auto* sc_cover =
        app.add_subcommand("cover", "covering numbers of a square by metric balls");
    sc_cover->add_option("--profile", cv.profile, "profile descriptor")->required();
    sc_cover->add_option("--square", cv.square, "square corner_u,corner_v,side")
        ->required();
    sc_cover->add_option("--eps", cv.eps, "comma-separated ball radii")->required();
    sc_cover->add_option("-o,--output", cv.out, "write the CSV to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (ops) {
        std::string csv = "op,subcommand\n";
        for (const auto& row : kOpsTable)
            csv += std::string(row[0]) + "," + row[1] + "\n";
        std::cout << csv;
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (sc_profile->parsed()) return run_profile(pa);
        if (sc_dist->parsed()) return run_dist(da);
        if (sc_ccdist->parsed()) return run_ccdist(ca);
        if (sc_qscheck->parsed()) return run_qscheck(qa);
        if (sc_beltrami->parsed()) return run_beltrami(ba);
        if (sc_conformal->parsed()) return run_conformal(fa);
        if (sc_flow->parsed()) return run_flow(fl);
        if (sc_cover->parsed()) return run_cover(cv);
        std::cerr << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        ordered_json j;
        ordered_json detail;
        detail["type"] = error_type(e);
        detail["message"] = e.what();
        j["error"] = detail;
        std::cout << j.dump(2) << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
