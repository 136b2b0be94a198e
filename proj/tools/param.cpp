// param: measure-aligned quasiconformal parameterization CLI.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "mqc/driver.hpp"
#include "mqc/error.hpp"
#include "mqc/mesh_io.hpp"
#include "mqc/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMetricsSchema = "mqc-metrics/1";

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("MQC_LOG");
    if (!env) return LogLevel::info;
    const std::string v = env;
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[param] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[param:debug] " << msg << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) mqc::fail_io("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        mqc::fail_io("config parse error in " + path + ": " + e.what());
    }
    return j;
}

mqc::DomainSpec parse_domain(const json& j) {
    mqc::DomainSpec d;
    const std::string kind = j.value("kind", "disk");
    if (kind == "disk") {
        d.kind = mqc::DomainSpec::Kind::disk;
        d.radius = j.value("radius", 1.0);
        if (d.radius <= 0.0) mqc::fail_validation("domain: radius must be positive");
    } else if (kind == "rectangle") {
        d.kind = mqc::DomainSpec::Kind::rectangle;
        d.width = j.value("width", 1.0);
        d.height = j.value("height", 1.0);
        if (d.width <= 0.0 || d.height <= 0.0)
            mqc::fail_validation("domain: rectangle sides must be positive");
    } else if (kind == "torus") {
        d.kind = mqc::DomainSpec::Kind::torus;
        if (j.contains("lattice")) {
            const auto& l = j.at("lattice");
            d.lattice = {mqc::Vec2{l.at(0).at(0), l.at(0).at(1)},
                         mqc::Vec2{l.at(1).at(0), l.at(1).at(1)}};
        }
        if (std::abs(d.lattice[0].cross(d.lattice[1])) <= 0.0)
            mqc::fail_validation("domain: lattice vectors are collinear");
    } else {
        mqc::fail_validation("domain: unknown kind '" + kind + "'");
    }
    return d;
}

mqc::FaceDensity parse_source_density(const json& j, const mqc::TriMesh& mesh,
                                      const fs::path& base) {
    const std::string kind = j.value("kind", "area");
    if (kind == "area") return mqc::FaceDensity::area_induced(mesh);
    if (kind == "uniform") return mqc::FaceDensity::uniform_per_face(mesh);
    if (kind == "file") {
        if (!j.contains("path")) mqc::fail_validation("source_density: file kind needs a path");
        return mqc::FaceDensity::from_file(mesh, (base / j.at("path").get<std::string>()).string());
    }
    mqc::fail_validation("source_density: unknown kind '" + kind + "'");
}

mqc::ReferenceDensity parse_reference_density(const json& j, const fs::path& base) {
    const std::string kind = j.value("kind", "uniform");
    if (kind == "uniform") return mqc::ReferenceDensity::uniform();
    if (kind == "gaussian") {
        mqc::Vec2 center{0.0, 0.0};
        if (j.contains("center")) center = {j.at("center").at(0), j.at("center").at(1)};
        return mqc::ReferenceDensity::gaussian(center, j.value("rate", 1.0));
    }
    if (kind == "grid") {
        if (!j.contains("path")) mqc::fail_validation("reference_density: grid kind needs a path");
        return mqc::ReferenceDensity::grid_from_file(
            (base / j.at("path").get<std::string>()).string());
    }
    mqc::fail_validation("reference_density: unknown kind '" + kind + "'");
}

mqc::FlowParams parse_flow_params(const json& j, const mqc::FlowParams& defaults) {
    mqc::FlowParams p = defaults;
    p.t1 = j.value("t1", p.t1);
    p.t2 = j.value("t2", p.t2);
    p.t3 = j.value("t3", p.t3);
    p.tau_fp = j.value("tau_fp", p.tau_fp);
    p.tau_smooth = j.value("tau_smooth", p.tau_smooth);
    p.cap_k = j.value("cap_k", p.cap_k);
    p.max_backtracks = j.value("max_backtracks", p.max_backtracks);
    return p;
}

mqc::Schedule parse_schedule(const json& j) {
    mqc::Schedule s;
    s.params.tau_fp = 0.0;  // default derived from t1 below
    s.params = parse_flow_params(j, s.params);
    if (s.params.tau_fp <= 0.0) s.params.tau_fp = std::max(s.params.t1 / 10.0, 1e-12);
    s.max_iterations = j.value("iterations", 50);
    s.stop_tol = j.value("stop_tol", 1e-8);
    s.alpha = j.value("alpha", 1.0);
    s.beta = j.value("beta", 1.0);
    if (j.contains("per_iteration"))
        for (const auto& jp : j.at("per_iteration"))
            s.per_iteration.push_back(parse_flow_params(jp, s.params));
    s.validate();
    return s;
}

json flow_params_json(const mqc::FlowParams& p) {
    return {{"t1", p.t1},           {"t2", p.t2},
            {"t3", p.t3},           {"tau_fp", p.tau_fp},
            {"tau_smooth", p.tau_smooth}, {"cap_k", p.cap_k},
            {"max_backtracks", p.max_backtracks}};
}

json record_json(const mqc::IterationRecord& r) {
    return {{"iter", r.iter}, {"H", r.H},
            {"mu_l2_sq", r.mu_l2_sq}, {"grad_mu_l2_sq", r.grad_mu_l2_sq},
            {"E", r.E},       {"mu_max", r.mu_max},
            {"flips", r.flips}, {"ms", r.ms},
            {"lbs_fallback", r.lbs_fallback}};
}

mqc::Embedding2D load_embedding(const mqc::TriMesh& parent, const std::string& path) {
    // raw positions: a stored map may contain inverted faces on purpose
    const auto verts = mqc::load_vertex_positions(path);
    if (static_cast<int>(verts.size()) != parent.num_vertices())
        mqc::fail_validation("embedding " + path + " does not match the surface vertex count");
    std::vector<mqc::Vec2> pos(verts.size());
    for (size_t v = 0; v < verts.size(); ++v) pos[v] = verts[v].xy();
    return {parent, std::move(pos)};
}

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    bool resume = false;
    // flag overrides (flags win over the config file)
    std::optional<int> iterations;
    std::optional<double> t1, t2, t3, tau_fp, cap_k;
    std::optional<std::string> input_mesh;
};

int cmd_run(const RunOptions& opt) {
    json cfg = load_json(opt.config_path);
    const fs::path base = fs::path(opt.config_path).parent_path();
    if (opt.input_mesh) cfg["input_mesh"] = *opt.input_mesh;
    json jsched = cfg.value("schedule", json::object());
    if (opt.iterations) jsched["iterations"] = *opt.iterations;
    if (opt.t1) jsched["t1"] = *opt.t1;
    if (opt.t2) jsched["t2"] = *opt.t2;
    if (opt.t3) jsched["t3"] = *opt.t3;
    if (opt.tau_fp) jsched["tau_fp"] = *opt.tau_fp;
    if (opt.cap_k) jsched["cap_k"] = *opt.cap_k;
    cfg["schedule"] = jsched;

    if (!cfg.contains("input_mesh")) mqc::fail_validation("config: input_mesh is required");
    const std::string mesh_path = (base / cfg.at("input_mesh").get<std::string>()).string();
    if (!fs::exists(mesh_path)) mqc::fail_validation("input mesh not found: " + mesh_path);

    const mqc::DomainSpec domain = parse_domain(cfg.value("domain", json::object()));
    const mqc::Schedule schedule = parse_schedule(cfg.value("schedule", json::object()));
    const std::string constraint_mode = cfg.value("constraint", "dirichlet");
    const std::string init_mode = cfg.value("init", "harmonic");
    const bool render = cfg.value("render", false);
    const bool checkpoint = cfg.value("checkpoint", false);

    fs::create_directories(opt.out_dir);
    const fs::path out = opt.out_dir;

    // resolved config echoed for reproducibility
    json resolved = cfg;
    resolved["schedule"] = flow_params_json(schedule.params);
    resolved["schedule"]["iterations"] = schedule.max_iterations;
    resolved["schedule"]["stop_tol"] = schedule.stop_tol;
    resolved["schedule"]["alpha"] = schedule.alpha;
    resolved["schedule"]["beta"] = schedule.beta;
    {
        std::ofstream rc(out / "resolved_config.json");
        rc << resolved.dump(2) << "\n";
    }

    const mqc::TriMesh mesh = mqc::load_mesh(mesh_path);
    log_info("loaded " + mesh_path + ": " + std::to_string(mesh.num_vertices()) + " vertices, " +
             std::to_string(mesh.num_faces()) + " faces");
    mqc::FaceDensity source =
        parse_source_density(cfg.value("source_density", json::object()), mesh, base);
    mqc::ReferenceDensity reference =
        parse_reference_density(cfg.value("reference_density", json::object()), base);

    std::ofstream metrics(out / "metrics.jsonl");
    if (!metrics) mqc::fail_io("cannot open metrics file");
    metrics << json{{"schema", kMetricsSchema}, {"config", resolved}}.dump() << "\n";

    if (domain.kind == mqc::DomainSpec::Kind::torus) {
        auto result = mqc::genus1_run(mesh, domain, source, std::move(reference), schedule);
        for (const auto& r : result.records) metrics << record_json(r).dump() << "\n";
        mqc::save_embedding(result.map, (out / "final.obj").string());
        if (render) mqc::render_svg(result.map, (out / "final.svg").string());
        log_info("wrote " + (out / "final.obj").string());
        return 0;
    }

    auto init = mqc::initial_map(
        mesh, domain,
        init_mode == "lscm" ? mqc::InitMode::lscm_free_boundary : mqc::InitMode::harmonic_dirichlet);

    mqc::PipelineState state;
    state.mesh = &mesh;
    state.chart = std::move(init.chart);
    state.map = std::move(init.f0);
    state.source = std::move(source);
    state.reference = std::move(reference);
    if (constraint_mode == "dirichlet")
        state.constraint = mqc::Constraint::dirichlet(mesh, state.map);
    else if (constraint_mode == "landmark") {
        state.constraint = mqc::Constraint::landmark(mqc::default_pins(mesh));
        state.domain_area = domain.area();
    } else
        mqc::fail_validation("config: unknown constraint '" + constraint_mode + "'");
    state.reference.normalize(state.map);
    state.prepare();

    int start_iter = 0;
    if (opt.resume && fs::exists(out / "checkpoint.json")) {
        const json ck = load_json((out / "checkpoint.json").string());
        if (ck.value("vertices", -1) != mesh.num_vertices())
            mqc::fail_validation("checkpoint does not match the input mesh");
        const auto& pos = ck.at("positions");
        for (int v = 0; v < mesh.num_vertices(); ++v)
            state.map.positions[v] = {pos.at(2 * v), pos.at(2 * v + 1)};
        start_iter = ck.value("iter", -1) + 1;
        log_info("resumed at iteration " + std::to_string(start_iter));
    }

    // same loop as the library driver, unrolled so metrics stream per
    // iteration and checkpoints can be written
    mqc::Embedding2D best = state.map;
    auto mu0 = state.measure_mu(state.map);
    double prev_E = state.entropy(state.map) + schedule.alpha * state.mu_weight_l2_sq(mu0) +
                    schedule.beta * state.graph.dirichlet_energy(mu0.values);
    double best_E = prev_E;
    int stall = 0;
    for (int k = start_iter; k < schedule.max_iterations; ++k) {
        mqc::IterationRecord rec = mqc::run_iteration(state, schedule.at(k), k);
        rec.E = rec.H + schedule.alpha * rec.mu_l2_sq + schedule.beta * rec.grad_mu_l2_sq;
        metrics << record_json(rec).dump() << "\n";
        metrics.flush();
        log_debug("iter " + std::to_string(k) + " H=" + std::to_string(rec.H) +
                  " E=" + std::to_string(rec.E));
        if (checkpoint) {
            json ck{{"iter", k}, {"vertices", mesh.num_vertices()}};
            auto& pos = ck["positions"] = json::array();
            for (const auto& p : state.map.positions) {
                pos.push_back(p.x);
                pos.push_back(p.y);
            }
            std::ofstream cks(out / "checkpoint.json");
            cks << ck.dump() << "\n";
        }
        if (rec.E < best_E) {
            best_E = rec.E;
            best = state.map;
        }
        if (prev_E - rec.E > schedule.stop_tol * std::abs(prev_E))
            stall = 0;
        else if (++stall >= 3) {
            log_info("energy stalled, stopping after iteration " + std::to_string(k));
            break;
        }
        prev_E = rec.E;
    }

    mqc::save_embedding(best, (out / "final.obj").string());
    if (render) {
        const auto mu = state.measure_mu(best);
        mqc::SvgOptions svg;
        svg.face_scalar.resize(mu.values.size());
        for (size_t f = 0; f < mu.values.size(); ++f) svg.face_scalar[f] = std::abs(mu.values[f]);
        mqc::render_svg(best, (out / "final.svg").string(), svg);
    }
    log_info("wrote " + (out / "final.obj").string());
    return 0;
}

int cmd_evaluate(const std::string& surface_path, const std::string& map_path,
                 const std::string& source_kind, const std::string& source_file,
                 const json& reference_cfg) {
    const mqc::TriMesh mesh = mqc::load_mesh(surface_path);
    const mqc::Embedding2D map = load_embedding(mesh, map_path);

    json out;
    out["flips"] = map.orientation_report();
    if (map.fold_free()) {
        json sj{{"kind", source_kind}};
        if (!source_file.empty()) sj["path"] = source_file;
        mqc::FaceDensity source = parse_source_density(sj, mesh, fs::path());
        mqc::ReferenceDensity reference = parse_reference_density(reference_cfg, fs::path());
        reference.normalize(map);

        const auto mu = mqc::compute_beltrami_intrinsic(map);
        const auto graph = mqc::DualGraph::build_intrinsic(mesh);
        out["H"] = mqc::relative_entropy(mqc::pushforward_density(source, map), map, reference);
        out["mu_l2_sq"] = mu.l2_sq(mesh);
        out["grad_mu_l2_sq"] = graph.dirichlet_energy(mu.values);
        out["mu_max"] = mu.max_abs();
    } else {
        out["H"] = nullptr;
        out["mu_l2_sq"] = nullptr;
        out["grad_mu_l2_sq"] = nullptr;
        out["mu_max"] = nullptr;
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_remesh(const std::string& surface_path, const std::string& map_path,
               const std::string& new_mesh_path, const std::string& out_path) {
    const mqc::TriMesh surface = mqc::load_mesh(surface_path);
    const mqc::Embedding2D map = load_embedding(surface, map_path);
    const mqc::TriMesh new_mesh = mqc::load_mesh(new_mesh_path);
    const mqc::TriMesh remeshed = mqc::compose_remesh(surface, map, new_mesh);
    mqc::save_mesh(remeshed, out_path);
    log_info("wrote " + out_path);
    return 0;
}

int cmd_render(const std::string& map_path, const std::string& out_path,
               const std::string& scalar_path, double width) {
    const mqc::TriMesh m = mqc::load_mesh(map_path);
    std::vector<mqc::Vec2> pos(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) pos[v] = m.vertex(v).xy();
    const mqc::Embedding2D map{m, std::move(pos)};

    mqc::SvgOptions options;
    options.pixel_width = width;
    if (!scalar_path.empty()) {
        std::ifstream in(scalar_path);
        if (!in) mqc::fail_io("cannot open scalar file " + scalar_path);
        double v;
        while (in >> v) options.face_scalar.push_back(v);
        if (options.face_scalar.size() != static_cast<size_t>(m.num_faces()))
            mqc::fail_validation("scalar file: expected one value per face");
    }
    mqc::render_svg(map, out_path, options);
    log_info("wrote " + out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measure-aligned quasiconformal parameterization"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run the parameterization pipeline");
    run->add_option("-c,--config", run_opt.config_path, "config file (JSON)")->required();
    run->add_option("-o,--out", run_opt.out_dir, "output directory")->required();
    run->add_flag("--resume", run_opt.resume, "resume from a checkpoint in the output directory");
    run->add_option("--mesh", [&run_opt](const auto& v) { run_opt.input_mesh = v[0]; return true; },
                    "override: input mesh path");
    run->add_option("--iterations",
                    [&run_opt](const auto& v) { run_opt.iterations = std::stoi(v[0]); return true; },
                    "override: iteration count");
    run->add_option("--t1", [&run_opt](const auto& v) { run_opt.t1 = std::stod(v[0]); return true; },
                    "override: transport time");
    run->add_option("--t2", [&run_opt](const auto& v) { run_opt.t2 = std::stod(v[0]); return true; },
                    "override: shrink time");
    run->add_option("--t3", [&run_opt](const auto& v) { run_opt.t3 = std::stod(v[0]); return true; },
                    "override: smoothing time");
    run->add_option("--tau-fp",
                    [&run_opt](const auto& v) { run_opt.tau_fp = std::stod(v[0]); return true; },
                    "override: transport sub-step");
    run->add_option("--cap-k",
                    [&run_opt](const auto& v) { run_opt.cap_k = std::stod(v[0]); return true; },
                    "override: Beltrami cap");

    std::string surface_path, map_path, new_mesh_path, out_path, scalar_path;
    std::string source_kind = "area", source_file;
    std::string ref_kind = "uniform", ref_path;
    std::vector<double> ref_center{0.0, 0.0};
    double ref_rate = 1.0, svg_width = 800.0;

    auto* evaluate = app.add_subcommand("evaluate", "report energies of a given map");
    evaluate->add_option("--surface", surface_path, "source surface mesh")->required();
    evaluate->add_option("--map", map_path, "planar embedding mesh")->required();
    evaluate->add_option("--source-density", source_kind, "area | uniform | file");
    evaluate->add_option("--source-density-file", source_file, "per-face density file");
    evaluate->add_option("--reference", ref_kind, "uniform | gaussian | grid");
    evaluate->add_option("--reference-center", ref_center, "gaussian center")->expected(2);
    evaluate->add_option("--reference-rate", ref_rate, "gaussian rate");
    evaluate->add_option("--reference-grid", ref_path, "density grid file");

    auto* remesh = app.add_subcommand("remesh", "lift a new planar mesh back to the surface");
    remesh->add_option("--surface", surface_path, "source surface mesh")->required();
    remesh->add_option("--map", map_path, "planar embedding mesh")->required();
    remesh->add_option("--new-mesh", new_mesh_path, "new planar mesh")->required();
    remesh->add_option("-o,--out", out_path, "output mesh path")->required();

    auto* render = app.add_subcommand("render", "render a planar embedding to SVG");
    render->add_option("--map", map_path, "planar embedding mesh")->required();
    render->add_option("-o,--out", out_path, "output SVG path")->required();
    render->add_option("--scalar", scalar_path, "per-face scalar file for coloring");
    render->add_option("--width", svg_width, "output pixel width");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(run_opt);
        if (*evaluate) {
            json ref{{"kind", ref_kind}, {"rate", ref_rate},
                     {"center", json::array({ref_center[0], ref_center[1]})}};
            if (!ref_path.empty()) ref["path"] = ref_path;
            return cmd_evaluate(surface_path, map_path, source_kind, source_file, ref);
        }
        if (*remesh) return cmd_remesh(surface_path, map_path, new_mesh_path, out_path);
        if (*render) return cmd_render(map_path, out_path, scalar_path, svg_width);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const mqc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
