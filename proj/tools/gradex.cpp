// Command-line front end: exploration runs and single-stage computations.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include <gradex/gradex.hpp>

namespace fs = std::filesystem;
using namespace gradex;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file (key = value lines)");
    cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set seed=4")
        ->take_all();
    cmd->add_option("--seed", opts.seed, "override the master random seed")
        ->each([&](const std::string&) { opts.has_seed = true; });
    cmd->add_option("--out", opts.out_dir, "override the output directory");
}

ScenarioConfig make_config(const CommonOpts& opts) {
    ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg.load_file(opts.config_path);
    for (const std::string& o : opts.overrides) cfg.apply_override(o);
    if (opts.has_seed) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    return cfg;
}

void write_path_csv(const fs::path& file, const Path& path) {
    std::ostringstream out;
    out << "x,y,theta\n";
    for (const ViewPoint& vp : path)
        out << fmt_double(vp.x) << "," << fmt_double(vp.y) << "," << fmt_double(vp.theta) << "\n";
    atomic_write_text(file, out.str());
}

Path load_path_csv(const std::string& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    Path path;
    bool first = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = ScenarioConfig::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (first && t.rfind("x,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream ls(t);
        std::string cell;
        double v[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error(file + ":" + std::to_string(line_no) +
                                         ": expected x,y,theta");
            v[c] = std::stod(cell);
        }
        path.push_back({v[0], v[1], v[2]});
    }
    return path;
}

void write_trace_csv(const fs::path& file, const std::vector<IterationTrace>& trace) {
    std::ostringstream out;
    out << "iteration,f,smoothness,info_gain,backtracks,accepted\n";
    for (const IterationTrace& t : trace)
        out << t.iteration << "," << fmt_double(t.total) << "," << fmt_double(t.smoothness) << ","
            << fmt_double(t.info_gain) << "," << t.backtracks << "," << (t.accepted ? 1 : 0)
            << "\n";
    atomic_write_text(file, out.str());
}

int run_explore(const CommonOpts& opts, bool no_opt, bool save_maps_flag) {
    ScenarioConfig cfg = make_config(opts);
    if (no_opt) cfg.optimize = false;
    if (save_maps_flag) cfg.save_maps = true;
    WorldMap world = WorldMap::load(cfg.map);
    fs::path out(cfg.out_dir);
    fs::create_directories(out);

    auto on_episode = [&](const EpisodeSnapshot& ep) {
        std::string k = std::to_string(ep.episode);
        write_path_csv(out / ("path_" + k + ".csv"), ep.record.executed);
        write_trace_csv(out / ("trace_" + k + ".csv"), ep.record.opt_trace);
        if (cfg.save_maps) {
            ep.odds.write_pgm(out / ("map_" + k + ".pgm"));
            write_boundariness_pgm(out / ("bd_" + k + ".pgm"), ep.bd);
        }
    };

    ExplorationResult result = run_exploration(world, cfg.start_pose(), cfg.exploration(),
                                               on_episode);
    const ExplorationReport& report = result.report;

    atomic_write_text(out / "report.json", report_json_string(report));
    {
        std::ostringstream cov;
        cov << "episode,coverage,cumulative_length\n";
        for (const EpisodeRecord& r : report.episodes)
            cov << r.episode << "," << fmt_double(r.coverage.free_correct) << ","
                << fmt_double(r.coverage.cumulative_path_length) << "\n";
        atomic_write_text(out / "coverage.csv", cov.str());
    }
    result.odds.write_pgm(out / "map_final.pgm");
    result.odds.write_csv(out / "map_final.csv");
    write_boundariness_pgm(out / "bd_final.pgm", result.bd);

    std::cout << "status: " << report.status << "\n"
              << "episodes: " << report.episodes_run << "\n"
              << "free-cell coverage: " << report.final_coverage.free_correct << "\n"
              << "cumulative path length: " << report.cumulative_path_length << " m\n"
              << "report: " << (out / "report.json").string() << "\n";
    return report.status == "terminated" || report.status == "complete" ? 0 : 3;
}

int run_gain(const CommonOpts& opts, const std::string& odds_file, const std::string& path_file) {
    ScenarioConfig cfg = make_config(opts);
    LogOddsMap odds = LogOddsMap::load_csv(odds_file, cfg.bbf());
    Grid<double> bd = compute_boundariness_map(odds, cfg.boundariness());
    Path path = load_path_csv(path_file);
    if (path.empty()) {
        std::cerr << "gain: empty path file\n";
        return 2;
    }
    SensorSpec spec = cfg.sensor();
    for (std::size_t i = 0; i < path.size(); ++i)
        std::cout << "view " << i << " gain: " << view_information_gain(path[i], bd, spec)
                  << "\n";
    std::mt19937_64 rng = make_stream(cfg.seed, "path-sample");
    PathGainResult res = path_information_gain(path, bd, spec, rng);
    std::cout << "path gain: " << res.gain << "\n"
              << "augmented view-points: " << res.sampled_points.size() << "\n"
              << "footprint cells: " << res.union_filter.footprint_size() << "\n";
    return 0;
}

int run_boundariness(const CommonOpts& opts, const std::string& odds_file,
                     const std::string& out_pgm) {
    ScenarioConfig cfg = make_config(opts);
    LogOddsMap odds = LogOddsMap::load_csv(odds_file, cfg.bbf());
    Grid<double> bd = compute_boundariness_map(odds, cfg.boundariness());
    write_boundariness_pgm(out_pgm, bd);
    std::cout << "boundary cells above " << cfg.term_bd_threshold << ": "
              << count_above(bd, cfg.term_bd_threshold) << "\n"
              << "wrote " << out_pgm << "\n";
    return 0;
}

int run_filter(const CommonOpts& opts, double x, double y, double theta_deg,
               const std::string& out_csv) {
    ScenarioConfig cfg = make_config(opts);
    WorldMap world = WorldMap::load(cfg.map);
    ViewPoint vp{x, y, theta_deg * kPi / 180.0};
    FuzzyFilter f = build_view_filter(vp, cfg.sensor(), world.width(), world.height(),
                                      world.resolution());
    f.write_csv(out_csv);
    std::cout << "footprint cells: " << f.footprint_size() << "\nwrote " << out_csv << "\n";
    return 0;
}

// Randomized audit comparing the reverse-sweep gradient against central
// finite differences, keeping instances a safe margin away from the
// objective's piecewise branch boundaries.
int run_gradcheck(const CommonOpts& opts, int instances) {
    ScenarioConfig cfg = make_config(opts);
    WorldMap world = WorldMap::load(cfg.map);
    SensorSpec spec = cfg.sensor();
    std::mt19937_64 rng = make_stream(cfg.seed, "gradcheck");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double res = world.resolution();
    const double margin = 1e-3;

    auto random_free_pose = [&]() {
        for (int tries = 0; tries < 1000; ++tries) {
            double x = uni(rng) * world.width_m();
            double y = uni(rng) * world.height_m();
            if (world.point_free(x, y)) return ViewPoint{x, y, (uni(rng) * 2.0 - 1.0) * kPi};
        }
        throw std::runtime_error("gradcheck: no free pose found");
    };

    double worst = 0.0;
    int done = 0;
    int attempts = 0;
    while (done < instances && attempts < instances * 50) {
        ++attempts;
        LogOddsMap odds(world.width(), world.height(), res, cfg.bbf());
        InverseSensorModel model(spec);
        int n_scans = 2 + static_cast<int>(uni(rng) * 3);
        for (int s = 0; s < n_scans; ++s)
            odds.integrate_scan(cast_scan(world, random_free_pose(), spec), model);
        Grid<double> bd = compute_boundariness_map(odds, cfg.boundariness());

        int n_vertices = 3 + static_cast<int>(uni(rng) * 6);
        Path path;
        for (int v = 0; v < n_vertices; ++v) {
            double fx = 0.06 + 0.88 * uni(rng);  // keep clear of cell edges
            double fy = 0.06 + 0.88 * uni(rng);
            int ci = 1 + static_cast<int>(uni(rng) * (world.width() - 2));
            int cj = 1 + static_cast<int>(uni(rng) * (world.height() - 2));
            path.push_back({(ci + fx) * res, (cj + fy) * res, (uni(rng) * 2.0 - 1.0) * kPi});
        }
        std::mt19937_64 plan_rng = make_stream(cfg.seed + done, "path-sample");
        PathSamplingPlan plan = make_sampling_plan(path, res, plan_rng);

        // Keep the instance a margin away from every piecewise boundary:
        // the distance/angle falloff breakpoints, near-ties in the
        // max-union, and the angle-wrap jump.
        std::vector<ViewPoint> views = augmented_interior_points(path, plan);
        const int half = filter_half_width(spec.r_max, res);
        const double cos_half = std::cos(spec.fov / 2.0);
        bool near_boundary = false;
        std::vector<PoseTerm<double>> terms;
        CellBox union_box;
        for (const ViewPoint& vp : views) {
            terms.push_back(make_pose_term(vp, res, half, world.width(), world.height()));
            union_box.include(terms.back().box);
        }
        for (int j = union_box.j_min; j <= union_box.j_max && !near_boundary; ++j)
            for (int i = union_box.i_min; i <= union_box.i_max && !near_boundary; ++i) {
                double top1 = -1.0, top2 = -1.0;
                for (const PoseTerm<double>& t : terms) {
                    if (!t.box.contains(i, j)) continue;
                    Vec2 c{(i + 0.5) * res, (j + 0.5) * res};
                    double dx = c.x - t.x, dy = c.y - t.y;
                    double delta = std::sqrt(dx * dx + dy * dy);
                    if (std::abs(delta - spec.r_max) < margin ||
                        std::abs(delta - 2.0 * spec.r_max) < margin) {
                        near_boundary = true;
                        break;
                    }
                    double phi;
                    if (i == t.own.i && j == t.own.j) {
                        phi = 1.0;
                    } else {
                        double dot = (t.cos_h * dx + t.sin_h * dy) / delta;
                        if (std::abs(dot - cos_half) < margin) {
                            near_boundary = true;
                            break;
                        }
                        phi = pose_cell_discount(t, c, spec, 1.0);
                    }
                    if (phi > top1) {
                        top2 = top1;
                        top1 = phi;
                    } else if (phi > top2) {
                        top2 = phi;
                    }
                }
                if (top2 >= 0.0 && top1 - top2 < margin && bd.at(i, j) > 0.0)
                    near_boundary = true;
            }
        for (std::size_t i = 1; i < path.size() && !near_boundary; ++i) {
            double d = std::abs(wrap_angle(path[i].theta - path[i - 1].theta));
            if (kPi - d < margin) near_boundary = true;
        }
        if (near_boundary) continue;

        Objective obj = Objective::for_path(path, plan, bd, spec, cfg.objective());
        std::vector<double> coords = Objective::pack_interior(path);
        std::vector<double> grad = obj.gradient(coords);
        const double h = 1e-6;
        for (std::size_t c = 0; c < coords.size(); ++c) {
            std::vector<double> cp = coords, cm = coords;
            cp[c] += h;
            cm[c] -= h;
            double fd = (obj.value(cp) - obj.value(cm)) / (2.0 * h);
            double rel = std::abs(fd - grad[c]) /
                         std::max({1.0, std::abs(fd), std::abs(grad[c])});
            if (rel > worst) worst = rel;
        }
        ++done;
    }
    std::cout << "instances: " << done << "\nmax relative error: " << worst << "\n";
    return worst < 1e-4 && done == instances ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradex: gradient-based 2D exploration simulator"};
    app.require_subcommand(0, 1);

    bool print_config = false;
    app.add_flag("--print-config", print_config, "print the effective configuration and exit");

    CommonOpts root_opts;
    app.add_option("--config", root_opts.config_path, "scenario config file");
    app.add_option("--set", root_opts.overrides, "override a config key")->take_all();

    CommonOpts explore_opts;
    bool no_opt = false, save_maps = false;
    CLI::App* explore = app.add_subcommand("explore", "run the closed exploration loop");
    add_common(explore, explore_opts);
    explore->add_flag("--no-opt", no_opt, "skip gradient optimization (sampling-only baseline)");
    explore->add_flag("--save-maps", save_maps, "write per-episode map/boundariness PGMs");

    CommonOpts gain_opts;
    std::string gain_odds, gain_path;
    CLI::App* gain = app.add_subcommand("gain", "information gain of a path against a snapshot");
    add_common(gain, gain_opts);
    gain->add_option("--map-odds", gain_odds, "log-odds CSV snapshot")->required();
    gain->add_option("--path", gain_path, "path CSV (x,y,theta rows)")->required();

    CommonOpts bd_opts;
    std::string bd_odds, bd_out = "bd.pgm";
    CLI::App* bdc = app.add_subcommand("boundariness", "boundariness heat map of a snapshot");
    add_common(bdc, bd_opts);
    bdc->add_option("--map-odds", bd_odds, "log-odds CSV snapshot")->required();
    bdc->add_option("--out-pgm", bd_out, "output PGM file");

    CommonOpts filter_opts;
    double fx = 0.0, fy = 0.0, ftheta = 0.0;
    std::string filter_out = "filter.csv";
    CLI::App* filter = app.add_subcommand("filter", "discount filter of a single view-point");
    add_common(filter, filter_opts);
    filter->add_option("--x", fx, "view-point x [m]")->required();
    filter->add_option("--y", fy, "view-point y [m]")->required();
    filter->add_option("--theta-deg", ftheta, "view-point heading [deg]");
    filter->add_option("--out-csv", filter_out, "output CSV file");

    CommonOpts gc_opts;
    int gc_instances = 20;
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    add_common(gradcheck, gc_opts);
    gradcheck->add_option("--instances", gc_instances, "number of random instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_config) {
            ScenarioConfig cfg = make_config(root_opts);
            std::cout << cfg.print();
            return 0;
        }
        if (*explore) return run_explore(explore_opts, no_opt, save_maps);
        if (*gain) return run_gain(gain_opts, gain_odds, gain_path);
        if (*bdc) return run_boundariness(bd_opts, bd_odds, bd_out);
        if (*filter) return run_filter(filter_opts, fx, fy, ftheta, filter_out);
        if (*gradcheck) return run_gradcheck(gc_opts, gc_instances);
        std::cout << app.help();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
