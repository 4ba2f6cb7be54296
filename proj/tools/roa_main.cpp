#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "roa/contour.hpp"
#include "roa/neuralverify.hpp"
#include "roa/pipeline.hpp"
#include "roa/prover.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roa;

namespace {

constexpr int kExitOk = 0, kExitVerification = 2, kExitConfig = 3, kExitBudget = 4;

DynamicalSystem system_from_config(const RunConfig& cfg) {
    SystemOptions opts;
    opts.equilibrium = cfg.equilibrium;
    opts.Q = cfg.Q;
    return build_system(cfg.system_name, cfg.f_texts, cfg.variables, cfg.domain, opts);
}

int cmd_run(const std::string& path, int jobs, bool resume, const std::string& out) {
    RunConfig cfg = load_config(path);
    if (jobs > 0) cfg.jobs = jobs;
    if (!out.empty()) cfg.out_dir = out;
    cfg.resolved["jobs"] = cfg.jobs;
    cfg.resolved["output"] = cfg.out_dir;
    RunReport report = run_pipeline(cfg, resume);
    std::cout << report.to_json().dump(2) << "\n";
    if (!report.success)
        return report.fail_kind == FailKind::Budget ? kExitBudget : kExitVerification;
    if (!report.nesting_ok) return kExitVerification;
    return kExitOk;
}

int cmd_verify_net(const std::string& sys_path, const std::string& net_path, double target) {
    std::ifstream in(sys_path);
    if (!in) throw ConfigError("", "cannot open " + sys_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("system")) {
        json wrapped;
        wrapped["system"] = doc;
        wrapped["stages"] = json::object();
        doc = wrapped;
    }
    if (!doc.contains("stages")) doc["stages"] = json::object();
    RunConfig cfg = parse_config(doc);
    DynamicalSystem sys = system_from_config(cfg);
    MlpNet net = load_net(net_path);
    NeuralLevels lv = neural_verifier(sys, net, target, cfg.verify);
    json out = {{"c1_V", lv.c1}, {"c2_V", lv.c2}, {"target", target}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_volume(const std::string& path, const std::string& region_spec, int jobs,
               const std::string& out) {
    RunConfig cfg = load_config(path);
    if (jobs > 0) cfg.jobs = jobs;
    if (!out.empty()) cfg.out_dir = out;
    auto colon = region_spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("--region", "expected quadratic:<c> or neural:<c>");
    std::string kind = region_spec.substr(0, colon);
    double level = 0.0;
    try {
        level = std::stod(region_spec.substr(colon + 1));
    } catch (...) {
        throw ConfigError("--region", "level is not a number");
    }
    DynamicalSystem sys = system_from_config(cfg);
    RegionPredicate region;
    if (kind == "quadratic") {
        Expr VP = quadratic_form_expr(sys.P);
        region = [VP, level](const std::vector<double>& x) { return VP.eval(x) <= level; };
    } else if (kind == "neural") {
        MlpNet net = load_net((fs::path(cfg.out_dir) / "net.txt").string());
        region = [net, level](const std::vector<double>& x) {
            return net.forward(x) <= level;
        };
    } else {
        throw ConfigError("--region", "expected quadratic:<c> or neural:<c>");
    }
    DoaSample doa = load_or_build_doa(cfg, sys);
    VolumeEstimate est = estimate_volume(doa, region);
    json j = {{"region", region_spec},
              {"fraction_of_doa", est.fraction},
              {"half_width", est.half_width},
              {"fraction_of_domain", est.domain_fraction},
              {"region_count", est.region_count},
              {"doa_count", est.doa_count},
              {"n_mc", est.n_mc}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& path, const std::string& out) {
    RunConfig cfg = load_config(path);
    if (!out.empty()) cfg.out_dir = out;
    DynamicalSystem sys = system_from_config(cfg);
    if (sys.dim() != 2) throw DimensionError(sys.dim());
    fs::path dir(cfg.out_dir);
    fs::path report_path = dir / "report.json";
    if (!fs::exists(report_path))
        throw ConfigError("", "no report.json in " + cfg.out_dir + "; run `roa run` first");
    json report;
    std::ifstream(report_path) >> report;
    const json& levels = report.at("levels");

    bool wrote = false;
    if (levels.contains("c1_P")) {
        Expr VP = quadratic_form_expr(sys.P);
        std::vector<double> ls = {levels["c1_P"].get<double>()};
        if (levels.contains("c2_P")) ls.push_back(levels["c2_P"].get<double>());
        auto f = [&](double x, double y) { return VP.eval({x, y}); };
        export_contours(f, sys.domain, ls, 400, (dir / "contours_quadratic.csv").string(),
                        (dir / "contours_quadratic.svg").string());
        wrote = true;
    }
    if (levels.contains("c2_V") && fs::exists(dir / "net.txt")) {
        MlpNet net = load_net((dir / "net.txt").string());
        std::vector<double> ls = {levels["c1_V"].get<double>(), levels["c2_V"].get<double>()};
        auto f = [&](double x, double y) { return net.forward({x, y}); };
        export_contours(f, sys.domain, ls, 400, (dir / "contours_neural.csv").string(),
                        (dir / "contours_neural.svg").string());
        wrote = true;
    }
    if (!wrote) throw ConfigError("", "report has no level constants to plot");
    std::cout << "wrote contour files to " << cfg.out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Region-of-attraction toolkit: neural Lyapunov training and verification"};
    app.require_subcommand(1);

    std::string config_path, out_dir, region_spec, sys_path, net_path;
    int jobs = 0;
    bool resume = false;
    double target = 0.0;

    auto* run = app.add_subcommand("run", "Execute the configured pipeline stages");
    run->add_option("config", config_path, "Run configuration JSON")->required();
    run->add_option("--jobs", jobs, "Worker threads");
    run->add_flag("--resume", resume, "Reuse artifacts from a previous identical run");
    run->add_option("--out", out_dir, "Override the output directory");

    auto* vnet = app.add_subcommand("verify-net", "Verify a serialized network");
    vnet->add_option("system", sys_path, "System JSON")->required();
    vnet->add_option("net", net_path, "Network text file")->required();
    vnet->add_option("--target", target, "Verified quadratic target level")->required();

    auto* vol = app.add_subcommand("volume", "Monte Carlo volume of a region vs the simulated DOA");
    vol->add_option("config", config_path, "Run configuration JSON")->required();
    vol->add_option("--region", region_spec, "quadratic:<c> or neural:<c>")->required();
    vol->add_option("--jobs", jobs, "Worker threads");
    vol->add_option("--out", out_dir, "Override the output directory");

    auto* plot = app.add_subcommand("plot", "Export level-set contours (2-d systems)");
    plot->add_option("config", config_path, "Run configuration JSON")->required();
    plot->add_option("--out", out_dir, "Override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, jobs, resume, out_dir);
        if (vnet->parsed()) return cmd_verify_net(sys_path, net_path, target);
        if (vol->parsed()) return cmd_volume(config_path, region_spec, jobs, out_dir);
        if (plot->parsed()) return cmd_plot(config_path, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoLevel& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return kExitVerification;
    } catch (const ResourceExhausted& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
