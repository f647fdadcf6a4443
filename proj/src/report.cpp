#include "potlab/report.hpp"

#include "potlab/kernelcloud.hpp"
#include "potlab/mv.hpp"
#include "potlab/trace.hpp"
#include "potlab/weights.hpp"

#include <Eigen/Core>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace potlab {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
}

json parse_config(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("malformed config: " + std::string(e.what()));
    }
}

GraphSpace load_space(const json& cfg) {
    if (!cfg.contains("space")) throw InputError("config needs a \"space\" entry");
    const json& js = cfg.at("space");
    if (js.is_string()) return GraphSpace::from_json(read_file(js.get<std::string>()));
    if (js.is_object() && js.contains("dim"))
        return build_grid_space(js.at("dim").get<int>(), js.at("side").get<int>(),
                                js.value("dirichlet_shell", true));
    throw InputError("\"space\" must be a file path or a grid description");
}

MetricMeasureCloud load_cloud(const json& cfg) {
    if (!cfg.contains("cloud")) throw InputError("config needs a \"cloud\" entry");
    const json& jc = cfg.at("cloud");
    if (jc.is_string()) return MetricMeasureCloud::from_json(read_file(jc.get<std::string>()));
    if (jc.is_object() && jc.contains("lattice")) {
        const json& jl = jc.at("lattice");
        return make_lattice_cloud(jl.at("dim").get<int>(), jl.at("per_side").get<int>(),
                                  jl.at("nu_amb").get<double>());
    }
    throw InputError("\"cloud\" must be a file path or a lattice description");
}

std::vector<int> interior_set(const GraphSpace& s, const json& cfg) {
    if (cfg.contains("ball")) {
        const json& jb = cfg.at("ball");
        return s.ball_interior(jb.at("center").get<int>(), jb.at("radius").get<double>());
    }
    if (!cfg.contains("set")) throw InputError("config needs a \"set\" or \"ball\" entry");
    std::vector<int> out;
    for (int v : cfg.at("set").get<std::vector<int>>()) {
        if (v < 0 || v >= s.n()) throw InputError("set vertex out of range");
        int i = s.interior_index(v);
        if (i < 0) throw InputError("set must consist of interior vertices");
        out.push_back(i);
    }
    return out;
}

int deepest_interior_vertex(const GraphSpace& s) {
    Eigen::VectorXd bd = s.boundary_distance();
    int best = 0;
    for (int i = 1; i < s.interior_count(); ++i)
        if (bd[i] > bd[best]) best = i;
    return s.vertex_of(best);
}

ScalarField load_q(const GraphSpace& s, const json& cfg, Rng& rng) {
    if (!cfg.contains("q")) throw InputError("config needs a \"q\" entry");
    const json& jq = cfg.at("q");
    if (jq.is_array()) {
        std::vector<double> v = jq.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != s.interior_count())
            throw InputError("q must have one entry per interior vertex");
        return Eigen::Map<ScalarField>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (jq.is_object() && jq.contains("random")) {
        double scale = jq.at("random").value("scale", 1.0);
        return scale * rng.normal_vector(s.interior_count()).cwiseAbs();
    }
    throw InputError("\"q\" must be an array or {\"random\": {\"scale\": ...}}");
}

json vec_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json sweep_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const SweepRow& r : rows)
        out.push_back({{"delta", r.delta},
                       {"norm", r.norm},
                       {"bound", std::isfinite(r.bound) ? json(r.bound) : json("trend-only")},
                       {"slack", std::isfinite(r.slack) ? json(r.slack) : json("trend-only")}});
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream ss;
    ss << "delta,norm,bound,slack\n";
    ss.precision(17);
    for (const SweepRow& r : rows) {
        ss << r.delta << "," << r.norm << ",";
        if (std::isfinite(r.bound))
            ss << r.bound << "," << r.slack << "\n";
        else
            ss << ",\n";
    }
    return ss.str();
}

json verdicts_json(const std::vector<std::pair<std::string, bool>>& vs, std::string& failed) {
    json out = json::object();
    for (const auto& [name, ok] : vs) {
        out[name] = ok;
        if (!ok && failed.empty()) failed = name;
    }
    return out;
}

// ---- command pipelines (each returns the report body; `failed` names a violated
// invariant when nonempty) ----

json cmd_analyze(const json& cfg, std::uint64_t seed, std::string& failed) {
    GraphSpace s = load_space(cfg);
    std::vector<double> radii = cfg.value("radii", std::vector<double>{1.0, 2.0, 4.0});
    DoublingProfile prof = estimate_doubling(
        s, radii, cfg.contains("nu") ? std::optional<double>(cfg.at("nu").get<double>())
                                     : std::nullopt);
    json rep;
    rep["doubling"] = {{"kappa", prof.kappa},
                       {"nu", prof.nu},
                       {"gamma", prof.gamma},
                       {"nu_fitted", prof.nu_fitted}};
    bool want_poincare = cfg.value("poincare", s.interior_count() <= 1500);
    if (want_poincare) {
        PoincareResult pr = estimate_poincare(s, radii);
        rep["poincare"] = {{"lambda", pr.lambda},
                           {"worst_center", pr.worst_center},
                           {"worst_radius", pr.worst_radius}};
    }
    if (cfg.contains("faber_krahn")) {
        prof.lambda_poincare = rep.contains("poincare")
                                   ? std::optional<double>(rep["poincare"]["lambda"].get<double>())
                                   : std::nullopt;
        Rng rng(seed);
        std::vector<Ball> balls = separated_ball_family(s, 1.0, 8);
        double b = check_faber_krahn(s, prof, balls,
                                     cfg.at("faber_krahn").value("subsets_per_ball", 4), rng);
        rep["faber_krahn_b"] = b;
        if (b <= 0.0) failed = "faber-krahn-positivity";
    }
    (void)seed;
    return rep;
}

json cmd_green(const json& cfg, std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    double nu_amb = cfg.value("nu_amb", 3.0);
    int want = cfg.value("centers", 8);
    // deepest-first strided centers (away from the shell, where the tail law is honest)
    Eigen::VectorXd bd = s.boundary_distance();
    std::vector<int> order(static_cast<std::size_t>(s.interior_count()));
    for (int i = 0; i < s.interior_count(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return bd[a] > bd[b]; });
    std::vector<int> centers;
    int pool = std::max(want, static_cast<int>(order.size()) / 2);
    int stride = std::max(1, pool / want);
    for (int k = 0; k < pool && static_cast<int>(centers.size()) < want; k += stride)
        centers.push_back(order[static_cast<std::size_t>(k)]);
    GreenEstimateReport rep = check_green_estimates(ops, nu_amb, centers);
    if (!(rep.c > 0.0) || !std::isfinite(rep.C)) failed = "green-two-sided-bounds";
    return json{{"c", rep.c},        {"C", rep.C},
                {"ratio", rep.C / rep.c}, {"c3", rep.c3},
                {"c0", rep.c0},      {"kappa_max", rep.kappa_max},
                {"centers", centers}};
}

json cmd_capacity(const json& cfg, std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    std::vector<int> U = interior_set(s, cfg);
    EquilibriumData eq = capacity(ops, U);
    json rep;
    rep["cap"] = eq.cap;
    rep["set_size"] = U.size();
    rep["equilibrium_measure_total"] = eq.nu_U.sum();
    rep["equilibrium_measure_min"] = eq.nu_U.minCoeff();
    if (eq.nu_U.minCoeff() < -1e-9 * std::max(1.0, eq.cap)) failed = "equilibrium-measure-sign";
    if (cfg.contains("tau_list")) {
        json rows = json::array();
        for (double tau : cfg.at("tau_list").get<std::vector<double>>()) {
            HtauCheck hc = htau_energy_check(ops, eq, tau);
            rows.push_back({{"tau", tau}, {"lhs", hc.lhs}, {"rhs", hc.rhs}, {"ratio", hc.ratio}});
            if (hc.ratio > 1.0 + 1e-9) failed = "power-energy-bound";
        }
        rep["energy_checks"] = rows;
    }
    return rep;
}

json cmd_hodge_sweep(const json& cfg, std::uint64_t seed, const std::string& out_path,
                     std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    std::vector<int> U = interior_set(s, cfg);
    EquilibriumData eq = capacity(ops, U);
    std::vector<double> deltas =
        cfg.value("delta_list", std::vector<double>{0.0, 0.5, -0.5});
    Rng rng(seed);
    std::vector<SweepRow> rows;
    try {
        rows = weighted_hodge_sweep(ops, eq.h, deltas, rng);
    } catch (const AssertionError& e) {
        failed = e.invariant_name;
        throw;
    }
    if (!out_path.empty()) write_file(out_path + ".csv", sweep_csv(rows));
    return json{{"cap", eq.cap}, {"rows", sweep_json(rows)}};
}

json cmd_weights(const json& cfg, std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    int o = cfg.value("o", deepest_interior_vertex(s));
    int oi = s.interior_index(o);
    if (oi < 0) throw InputError("pole vertex must be interior");
    ScalarField G = ops.green_column(oi);
    double separation = cfg.value("separation", 1.5);
    std::vector<Ball> balls = separated_ball_family(s, separation, cfg.value("max_centers", 64));
    json rep;
    rep["pole"] = o;
    rep["balls"] = balls.size();
    json rows = json::array();
    for (double tau : cfg.value("tau_list", std::vector<double>{0.5, 1.0, 2.0})) {
        Weight w = G.array().pow(tau).matrix();
        double c = a1_constant(s, w, balls);
        rows.push_back({{"tau", tau}, {"a1", c}});
        if (c < 1.0) failed = "a1-lower-bound";
    }
    rep["a1_green_powers"] = rows;
    A1Derived der = a1_derived_properties(s, G, balls);
    rep["derived"] = {{"d_measure", der.d_measure}, {"d_inf", der.d_inf}, {"d_mean", der.d_mean}};
    if (cfg.contains("rh")) {
        double r = cfg.at("rh").value("r", 2.0);
        ReverseHolderReport rh = reverse_holder_check(s, G, r, balls);
        rep["reverse_holder"] = {{"r", r},
                                 {"value", rh.value},
                                 {"bound", rh.bound},
                                 {"ok", rh.ok}};
        if (!rh.ok) failed = "reverse-holder-bound";
    }
    return rep;
}

json cmd_trace(const json& cfg, std::uint64_t seed, std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    Rng rng(seed);
    ScalarField q = load_q(s, cfg, rng);
    TraceFamily family =
        trace_family_from_string(cfg.value("family", std::string("balls_and_sublevels")));
    json rep;
    rep["C1"] = trace_c1(ops, q);
    rep["C3"] = trace_c3(ops, q, family);
    auto [c4, c5] = trace_c4_c5(ops, q, family);
    rep["C4"] = c4;
    rep["C5"] = c5;
    rep["family"] = cfg.value("family", std::string("balls_and_sublevels"));
    TraceConstants tc = verify_trace_chain(ops, q);
    rep["chain"] = {{"C1", tc.C1},
                    {"opnorm_sq", tc.opnorm_sq},
                    {"C3_family", tc.C3_family},
                    {"C4", tc.C4},
                    {"C5", tc.C5},
                    {"family", tc.family_descriptor}};
    if (tc.C3_exhaustive) rep["chain"]["C3_exhaustive"] = *tc.C3_exhaustive;
    rep["verdicts"] = verdicts_json(tc.verdicts, failed);
    return rep;
}

json cmd_cloud(const json& cfg, std::uint64_t seed, std::string& failed) {
    MetricMeasureCloud cloud = load_cloud(cfg);
    KernelMatrix km = assemble_k(cloud);
    Rng rng(seed);
    json rep;
    rep["points"] = cloud.n();
    rep["gamma"] = km.gamma;
    KsReport ks = check_lemma_ks(cloud, km);
    rep["near_symmetry"] = {{"worst_sym_ratio", ks.worst_sym_ratio},
                            {"worst_half_ratio", ks.worst_half_ratio},
                            {"margin", ks.margin},
                            {"ok", ks.ok}};
    if (!ks.ok) failed = "kernel-near-symmetry";
    int n_f = cfg.value("f_samples", 20);
    std::vector<Eigen::VectorXd> fs;
    for (int k = 0; k < n_f; ++k) fs.push_back(rng.normal_vector(cloud.n()).cwiseAbs());
    KkReport kk = check_lemma_kk(cloud, km, fs);
    rep["kernel_square"] = {{"worst_margin", kk.worst_margin}, {"ok", kk.ok}};
    if (!kk.ok && failed.empty()) failed = "kernel-square-domination";
    Eigen::VectorXd q = Eigen::VectorXd::Ones(cloud.n());
    if (cfg.contains("q") && cfg.at("q").is_array()) {
        std::vector<double> qv = cfg.at("q").get<std::vector<double>>();
        if (static_cast<int>(qv.size()) != cloud.n())
            throw InputError("q must have one entry per point");
        q = Eigen::Map<Eigen::VectorXd>(qv.data(), static_cast<Eigen::Index>(qv.size()));
    }
    GenetraceReport gt = genetrace_conditions(cloud, km, q);
    std::string gt_failed;
    rep["testing_conditions"] = {{"opnorm_sq", gt.opnorm_sq},
                                 {"kq_norm", gt.kq_norm},
                                 {"C_iii", gt.C_iii},
                                 {"C_prime", gt.C_prime},
                                 {"qball_worst", gt.qball_worst},
                                 {"verdicts", verdicts_json(gt.verdicts, gt_failed)}};
    if (failed.empty()) failed = gt_failed;
    return rep;
}

json cmd_estikernel(const json& cfg, std::uint64_t seed, std::string& failed) {
    double D = cfg.value("D", 4.0), s_exp = cfg.value("s", 0.5);
    EstikernelReport rep{0, 0, 0, 0, 0, false};
    if (cfg.contains("cloud")) {
        MetricMeasureCloud cloud = load_cloud(cfg);
        Rng rng(seed);
        rep = estikernel_quadrature(cloud, D, s_exp, cfg.value("pairs", 100), rng);
    } else if (cfg.contains("profile")) {
        const json& jp = cfg.at("profile");
        double nu = jp.at("nu").get<double>();
        double rc = jp.value("R_cut", 1e-6);
        RadialProfile prof{{0.0}, {std::pow(rc, nu)}, rc, nu};
        std::vector<double> dists = cfg.value("dists", std::vector<double>{0.0, 0.5, 1.0, 2.0, 5.0});
        rep = estikernel_sandwich(prof, dists, D, s_exp);
    } else if (cfg.contains("space")) {
        GraphSpace sp = load_space(cfg);
        int center = cfg.value("center", deepest_interior_vertex(sp));
        RadialProfile prof = sp.ambient_profile(center, cfg.value("nu_amb", 3.0));
        Eigen::VectorXd d = sp.dist_from(center);
        Rng rng(seed);
        std::vector<double> dists;
        for (int k = 0; k < cfg.value("pairs", 100); ++k)
            dists.push_back(d[sp.vertex_of(static_cast<int>(
                rng.next_below(static_cast<std::uint64_t>(sp.interior_count()))))]);
        rep = estikernel_sandwich(prof, dists, D, s_exp);
    } else {
        throw InputError("estikernel needs a \"cloud\", \"profile\" or \"space\" entry");
    }
    if (!rep.ok) failed = "kernel-comparison-sandwich";
    return json{{"c", rep.c},
                {"C", rep.C},
                {"worst_lo", rep.worst_lo},
                {"worst_hi", rep.worst_hi},
                {"pairs", rep.pairs},
                {"ok", rep.ok}};
}

Potential load_potential(const GraphSpace& s, const Operators& ops, const json& cfg, Rng& rng) {
    if (!cfg.contains("potential")) throw InputError("config needs a \"potential\" entry");
    const json& jp = cfg.at("potential");
    std::string kind = jp.value("kind", std::string("function"));
    if (jp.contains("values")) {
        std::vector<double> v = jp.at("values").get<std::vector<double>>();
        Eigen::VectorXd vec = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        if (kind == "function") return Potential::function(vec);
        if (kind == "divergence_form") return Potential::divergence_form(vec);
        throw InputError("unknown potential kind: " + kind);
    }
    std::string gen = jp.value("generator", std::string(""));
    if (gen == "normal_function") return Potential::function(rng.normal_vector(s.interior_count()));
    if (gen == "nonneg_function")
        return Potential::function(rng.normal_vector(s.interior_count()).cwiseAbs());
    if (gen == "divergence_form")
        return Potential::divergence_form(rng.normal_vector(ops.nE()));
    throw InputError("potential needs \"values\" or a known \"generator\"");
}

json cmd_mv(const json& cfg, std::uint64_t seed, std::string& failed) {
    GraphSpace s = load_space(cfg);
    Operators ops(s);
    Rng rng(seed);
    Potential V = load_potential(s, ops, cfg, rng);
    std::vector<Ball> balls = separated_ball_family(s, 1.0, cfg.value("max_centers", 24));
    MVReport rep = mv_verify(ops, V, balls);
    if (rep.ratio_forward > 1.0 + 1e-9) failed = "forward-form-bound";
    return json{{"A", rep.A},
                {"B", rep.B},
                {"ratio_forward", rep.ratio_forward},
                {"ratio_reverse", rep.ratio_reverse},
                {"capacitary_Cprime", rep.capacitary_Cprime},
                {"theta_edges", rep.theta.size()}};
}

json cmd_suite(std::uint64_t seed, std::string& failed) {
    json rep;
    // a small fixed battery across all pipelines; everything is seeded and serial
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}}, {"radii", {1.0, 2.0}}};
        rep["analyze"] = cmd_analyze(c, seed, failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}},
                  {"ball", {{"center", 171}, {"radius", 1.0}}},
                  {"tau_list", {0.6, 1.0, 2.0}}};
        rep["capacity"] = cmd_capacity(c, failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}},
                  {"ball", {{"center", 171}, {"radius", 1.0}}},
                  {"delta_list", {0.0, 0.5, -0.5}}};
        rep["hodge_sweep"] = cmd_hodge_sweep(c, seed + 1, "", failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}},
                  {"q", {{"random", {{"scale", 1.0}}}}},
                  {"family", "balls_and_sublevels"}};
        rep["trace"] = cmd_trace(c, seed + 2, failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}}, {"tau_list", {1.0}}};
        rep["weights"] = cmd_weights(c, failed);
    }
    {
        json c = {{"cloud", {{"lattice", {{"dim", 2}, {"per_side", 6}, {"nu_amb", 2.5}}}}},
                  {"f_samples", 5}};
        rep["cloud"] = cmd_cloud(c, seed + 3, failed);
    }
    {
        json c = {{"cloud", {{"lattice", {{"dim", 2}, {"per_side", 6}, {"nu_amb", 2.5}}}}},
                  {"D", 4.0},
                  {"s", 0.5},
                  {"pairs", 20}};
        rep["estikernel"] = cmd_estikernel(c, seed + 4, failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}},
                  {"potential", {{"generator", "normal_function"}}}};
        rep["mv"] = cmd_mv(c, seed + 5, failed);
    }
    {
        json c = {{"space", {{"dim", 3}, {"side", 7}}}, {"nu_amb", 3.0}, {"centers", 4}};
        rep["green"] = cmd_green(c, failed);
    }
    return rep;
}

}  // namespace

int run(const RunConfig& cfg) {
    try {
        int threads = cfg.threads;
        if (threads <= 0) {
            const char* env = std::getenv("POTLAB_THREADS");
            threads = env ? std::max(1, std::atoi(env)) : 1;
        }
        Eigen::setNbThreads(threads);

        json config = parse_config(cfg.config_path);
        std::string failed;
        json body;
        if (cfg.command == "gen-space") {
            if (cfg.out_path.empty()) throw InputError("gen-space requires --out");
            GraphSpace s = build_grid_space(config.at("dim").get<int>(),
                                            config.at("side").get<int>(),
                                            config.value("dirichlet_shell", true));
            write_file(cfg.out_path, s.to_json());
            body = {{"vertices", s.n()},
                    {"interior", s.interior_count()},
                    {"edges", s.edge_count()},
                    {"written", cfg.out_path}};
        } else if (cfg.command == "analyze") {
            body = cmd_analyze(config, cfg.seed, failed);
        } else if (cfg.command == "green") {
            body = cmd_green(config, failed);
        } else if (cfg.command == "capacity") {
            body = cmd_capacity(config, failed);
        } else if (cfg.command == "hodge-sweep") {
            body = cmd_hodge_sweep(config, cfg.seed, cfg.out_path, failed);
        } else if (cfg.command == "weights") {
            body = cmd_weights(config, failed);
        } else if (cfg.command == "trace") {
            body = cmd_trace(config, cfg.seed, failed);
        } else if (cfg.command == "cloud") {
            body = cmd_cloud(config, cfg.seed, failed);
        } else if (cfg.command == "estikernel") {
            body = cmd_estikernel(config, cfg.seed, failed);
        } else if (cfg.command == "mv") {
            body = cmd_mv(config, cfg.seed, failed);
        } else if (cfg.command == "suite") {
            body = cmd_suite(cfg.seed, failed);
        } else {
            throw InputError("unknown command: " + cfg.command);
        }

        json envelope = {{"artifact_version", kArtifactVersion},
                         {"command", cfg.command},
                         {"seed", cfg.seed},
                         {"config", config},
                         {"report", body}};
        std::string text = envelope.dump(2) + "\n";
        if (cfg.command != "gen-space" && !cfg.out_path.empty())
            write_file(cfg.out_path, text);
        else
            std::cout << text;
        if (!failed.empty()) {
            std::cerr << "assertion failed: " << failed << "\n";
            return 2;
        }
        return 0;
    } catch (const AssertionError& e) {
        std::cerr << "assertion failed: " << e.invariant_name << " -- " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace potlab
