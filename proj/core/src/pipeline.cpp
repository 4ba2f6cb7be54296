#include "roa/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "roa/contour.hpp"
#include "roa/decomp.hpp"
#include "roa/local.hpp"
#include "roa/neuralverify.hpp"
#include "roa/prover.hpp"
#include "roa/reach.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace roa {

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError(path, "missing required field");
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::string s = cfg.resolved.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    if (!doc.is_object()) throw ConfigError("", "config root must be an object");

    const json& sys = require(doc, "system", "system");
    cfg.system_name = require(sys, "name", "system.name").get<std::string>();
    for (const auto& v : require(sys, "variables", "system.variables"))
        cfg.variables.push_back(v.get<std::string>());
    const json& f = require(sys, "f", "system.f");
    if (!f.is_array() || f.size() != cfg.variables.size())
        throw ConfigError("system.f", "must list one expression per variable");
    for (const auto& e : f) cfg.f_texts.push_back(e.get<std::string>());
    const json& dom = require(sys, "domain", "system.domain");
    if (!dom.is_array() || dom.size() != cfg.variables.size())
        throw ConfigError("system.domain", "must list one [lo, hi] pair per variable");
    std::vector<Interval> dims;
    for (std::size_t k = 0; k < dom.size(); ++k) {
        const std::string path = "system.domain[" + std::to_string(k) + "]";
        if (!dom[k].is_array() || dom[k].size() != 2)
            throw ConfigError(path, "expected [lo, hi]");
        double lo = as_number(dom[k][0], path), hi = as_number(dom[k][1], path);
        if (!(lo < hi)) throw ConfigError(path, "lo must be < hi");
        dims.emplace_back(lo, hi);
    }
    cfg.domain = Box(std::move(dims));
    if (sys.contains("equilibrium"))
        for (const auto& v : sys.at("equilibrium"))
            cfg.equilibrium.push_back(as_number(v, "system.equilibrium"));
    if (sys.contains("Q")) {
        const json& Q = sys.at("Q");
        int n = static_cast<int>(cfg.variables.size());
        if (!Q.is_array() || static_cast<int>(Q.size()) != n)
            throw ConfigError("system.Q", "expected an n x n matrix");
        cfg.Q = Matrix(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cfg.Q(i, j) = as_number(Q[i][j], "system.Q");
    }

    const json& stages = require(doc, "stages", "stages");
    for (auto it = stages.begin(); it != stages.end(); ++it) {
        const std::string& name = it.key();
        if (name != "local" && name != "reach" && name != "data" && name != "train" &&
            name != "neural_verify" && name != "compositional")
            throw ConfigError("stages." + name, "unknown stage");
    }
    cfg.has_local = stages.contains("local");
    cfg.has_reach = stages.contains("reach");
    cfg.has_data = stages.contains("data");
    cfg.has_train = stages.contains("train");
    cfg.has_neural = stages.contains("neural_verify");
    cfg.has_compositional = stages.contains("compositional");
    if (cfg.has_reach && !cfg.has_local)
        throw ConfigError("stages.reach", "requires the local stage");
    if (cfg.has_train && !cfg.has_data)
        throw ConfigError("stages.train", "requires the data stage");
    if (cfg.has_neural && !(cfg.has_train && cfg.has_local))
        throw ConfigError("stages.neural_verify", "requires local and train stages");

    if (cfg.has_data) {
        const json& d = stages.at("data");
        if (d.contains("n_samples")) {
            cfg.data_samples = static_cast<int>(as_number(d.at("n_samples"), "stages.data.n_samples"));
            if (cfg.data_samples <= 0)
                throw ConfigError("stages.data.n_samples", "must be positive");
        }
        if (d.contains("alpha")) cfg.data_alpha = as_number(d.at("alpha"), "stages.data.alpha");
    }
    if (cfg.has_train) {
        const json& t = stages.at("train");
        auto num = [&](const char* key, double dflt) {
            return t.contains(key) ? as_number(t.at(key), std::string("stages.train.") + key)
                                   : dflt;
        };
        cfg.train.lr = num("lr", 1e-3);
        cfg.train.layer = static_cast<int>(num("layer", 2));
        cfg.train.width = static_cast<int>(num("width", 30));
        cfg.train.num_colloc_pts = static_cast<int>(num("num_colloc_pts", 300000));
        cfg.train.max_epoch = static_cast<int>(num("max_epoch", 20));
        cfg.train.batch_size = static_cast<int>(num("batch_size", 32));
        cfg.train.alpha = num("alpha", cfg.data_alpha);
        if (cfg.train.lr <= 0) throw ConfigError("stages.train.lr", "must be positive");
        if (cfg.train.batch_size < 1)
            throw ConfigError("stages.train.batch_size", "must be at least 1");
        if (t.contains("loss_mode")) {
            std::string m = t.at("loss_mode").get<std::string>();
            if (m == "Zubov") cfg.train.loss_mode = LossMode::Zubov;
            else if (m == "Data") cfg.train.loss_mode = LossMode::Data;
            else if (m == "Lyapunov") cfg.train.loss_mode = LossMode::Lyapunov;
            else throw ConfigError("stages.train.loss_mode", "expected Zubov, Data or Lyapunov");
        }
        if (t.contains("sandwich")) {
            const json& s = t.at("sandwich");
            if (!s.is_array() || s.size() != 2)
                throw ConfigError("stages.train.sandwich", "expected [c1, c2]");
            cfg.train.sandwich = std::make_pair(as_number(s[0], "stages.train.sandwich"),
                                                as_number(s[1], "stages.train.sandwich"));
        }
    }
    if (cfg.has_neural) {
        const json& nv = stages.at("neural_verify");
        if (nv.contains("target")) {
            cfg.neural_target = nv.at("target").get<std::string>();
            if (cfg.neural_target != "c1_P" && cfg.neural_target != "c2_P")
                throw ConfigError("stages.neural_verify.target", "expected c1_P or c2_P");
            if (cfg.neural_target == "c2_P" && !cfg.has_reach)
                throw ConfigError("stages.neural_verify.target", "c2_P requires the reach stage");
        }
    }
    if (cfg.has_compositional) {
        const json& c = stages.at("compositional");
        const json& blocks = require(c, "blocks", "stages.compositional.blocks");
        if (!blocks.is_array() || blocks.empty())
            throw ConfigError("stages.compositional.blocks", "expected a non-empty partition");
        for (const auto& b : blocks) {
            std::vector<int> idx;
            for (const auto& v : b)
                idx.push_back(static_cast<int>(as_number(v, "stages.compositional.blocks")));
            cfg.blocks.push_back(std::move(idx));
        }
        if (c.contains("mode")) {
            cfg.comp_mode = c.at("mode").get<std::string>();
            if (cfg.comp_mode != "local" && cfg.comp_mode != "quadratic" &&
                cfg.comp_mode != "both")
                throw ConfigError("stages.compositional.mode", "expected local, quadratic or both");
        }
    }

    if (doc.contains("output")) cfg.out_dir = doc.at("output").get<std::string>();
    if (doc.contains("seed"))
        cfg.seed = static_cast<std::uint64_t>(as_number(doc.at("seed"), "seed"));
    if (doc.contains("jobs")) {
        cfg.jobs = static_cast<int>(as_number(doc.at("jobs"), "jobs"));
        if (cfg.jobs < 1) throw ConfigError("jobs", "must be at least 1");
    }
    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        if (v.contains("delta")) cfg.verify.delta = as_number(v.at("delta"), "verify.delta");
        if (v.contains("min_width"))
            cfg.verify.min_width = as_number(v.at("min_width"), "verify.min_width");
        if (v.contains("budget"))
            cfg.verify.budget = static_cast<std::uint64_t>(as_number(v.at("budget"), "verify.budget"));
        if (v.contains("epsilon"))
            cfg.verify.epsilon = as_number(v.at("epsilon"), "verify.epsilon");
        if (v.contains("bisect_tol"))
            cfg.verify.bisect_tol = as_number(v.at("bisect_tol"), "verify.bisect_tol");
        if (cfg.verify.delta <= 0) throw ConfigError("verify.delta", "must be positive");
    }
    cfg.train.seed = cfg.seed;

    // materialize resolved config with defaults
    json resolved = doc;
    resolved["output"] = cfg.out_dir;
    resolved["seed"] = cfg.seed;
    resolved["jobs"] = cfg.jobs;
    resolved["verify"] = {{"delta", cfg.verify.delta},
                          {"min_width", cfg.verify.min_width},
                          {"budget", cfg.verify.budget},
                          {"epsilon", cfg.verify.epsilon},
                          {"bisect_tol", cfg.verify.bisect_tol}};
    if (cfg.has_data)
        resolved["stages"]["data"] = {{"n_samples", cfg.data_samples}, {"alpha", cfg.data_alpha}};
    if (cfg.has_train) {
        json t = {{"lr", cfg.train.lr},           {"layer", cfg.train.layer},
                  {"width", cfg.train.width},     {"num_colloc_pts", cfg.train.num_colloc_pts},
                  {"max_epoch", cfg.train.max_epoch}, {"batch_size", cfg.train.batch_size},
                  {"alpha", cfg.train.alpha}};
        t["loss_mode"] = cfg.train.loss_mode == LossMode::Zubov
                             ? "Zubov"
                             : cfg.train.loss_mode == LossMode::Data ? "Data" : "Lyapunov";
        if (cfg.train.sandwich)
            t["sandwich"] = {cfg.train.sandwich->first, cfg.train.sandwich->second};
        resolved["stages"]["train"] = t;
    }
    if (cfg.has_neural) resolved["stages"]["neural_verify"] = {{"target", cfg.neural_target}};
    if (cfg.has_compositional)
        resolved["stages"]["compositional"] = {{"blocks", cfg.blocks}, {"mode", cfg.comp_mode}};
    cfg.resolved = std::move(resolved);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json RunReport::to_json() const {
    json j;
    j["success"] = success;
    j["fail_kind"] = fail_kind == FailKind::None
                         ? "none"
                         : fail_kind == FailKind::Verification ? "verification" : "budget";
    if (!error.empty()) j["error"] = error;
    j["globally_stable"] = globally_stable;
    json levels = json::object();
    if (c1_P) levels["c1_P"] = *c1_P;
    if (c2_P) levels["c2_P"] = *c2_P;
    if (c1_V) levels["c1_V"] = *c1_V;
    if (c2_V) levels["c2_V"] = *c2_V;
    if (comp_local_level) levels["compositional_local"] = *comp_local_level;
    if (comp_quadratic_level) levels["compositional_quadratic"] = *comp_quadratic_level;
    j["levels"] = levels;
    j["nesting_ok"] = nesting_ok;
    json st = json::array();
    for (const auto& s : stages)
        st.push_back({{"name", s.name},
                      {"status", s.status},
                      {"wall_time", s.wall_time},
                      {"details", s.details}});
    j["stages"] = st;
    j["environment"] = {{"version", "0.1.0"},
                        {"jobs", resolved_config.value("jobs", 1)},
                        {"delta", resolved_config.contains("verify")
                                      ? resolved_config["verify"]["delta"].get<double>()
                                      : 1e-5}};
    j["config"] = resolved_config;
    return j;
}

namespace {

struct StageRunner {
    const RunConfig& cfg;
    RunReport& report;
    bool reuse;  // artifacts valid for resume
    fs::path dir;

    bool try_load(const std::string& artifact, json& out) {
        if (!reuse) return false;
        fs::path p = dir / artifact;
        if (!fs::exists(p)) return false;
        std::ifstream in(p);
        try {
            in >> out;
        } catch (...) {
            return false;
        }
        return true;
    }

    // Runs one stage: body fills details and returns artifact JSON, or the
    // cached artifact is reused.
    template <class Body>
    void stage(const std::string& name, const std::string& artifact, Body&& body) {
        if (!report.success) return;
        StageReport sr;
        sr.name = name;
        double t0 = now_seconds();
        json cached;
        try {
            if (!artifact.empty() && try_load(artifact, cached)) {
                body(cached, true);
                sr.status = "resumed";
                sr.details = cached;
            } else {
                json fresh;
                body(fresh, false);
                sr.status = fresh.is_object() && fresh.value("resumed", false) ? "resumed" : "ok";
                sr.details = fresh;
                if (!artifact.empty())
                    atomic_write((dir / artifact).string(), fresh.dump(2) + "\n");
            }
        } catch (const NoLevel& e) {
            sr.status = "failed";
            report.success = false;
            report.fail_kind = FailKind::Verification;
            report.error = name + ": " + e.what();
        } catch (const ResourceExhausted& e) {
            sr.status = "failed";
            report.success = false;
            report.fail_kind = FailKind::Budget;
            report.error = name + ": " + e.what();
        } catch (const DivergedTraining& e) {
            sr.status = "failed";
            report.success = false;
            report.fail_kind = FailKind::Verification;
            report.error = name + ": " + e.what();
        }
        sr.wall_time = now_seconds() - t0;
        report.stages.push_back(std::move(sr));
    }
};

}  // namespace

RunReport run_pipeline(const RunConfig& cfg, bool resume) {
    RunReport report;
    report.resolved_config = cfg.resolved;

    SystemOptions sysopts;
    sysopts.equilibrium = cfg.equilibrium;
    sysopts.Q = cfg.Q;
    DynamicalSystem sys;
    try {
        sys = build_system(cfg.system_name, cfg.f_texts, cfg.variables, cfg.domain, sysopts);
    } catch (const std::exception& e) {
        throw ConfigError("system.f", e.what());
    }

    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::uint64_t hash = config_hash(cfg);
    fs::path hash_path = dir / "config.hash";
    bool reuse = false;
    if (resume && fs::exists(hash_path)) {
        std::uint64_t stored = 0;
        std::ifstream in(hash_path);
        in >> stored;
        reuse = stored == hash;
    }
    atomic_write(hash_path.string(), std::to_string(hash) + "\n");

    VerifyOptions vo = cfg.verify;
    vo.jobs = cfg.jobs;
    StageRunner runner{cfg, report, reuse, dir};

    if (cfg.has_local) {
        runner.stage("local", "local.json", [&](json& art, bool cached) {
            if (!cached) {
                LocalResult lr = local_stability_verifier(sys, vo);
                art = {{"globally_stable", lr.globally_stable}};
                if (!lr.globally_stable) art["c1_P"] = lr.level;
            }
            report.globally_stable = art.at("globally_stable").get<bool>();
            if (art.contains("c1_P")) report.c1_P = art.at("c1_P").get<double>();
        });
    }

    if (cfg.has_reach) {
        runner.stage("reach", "reach.json", [&](json& art, bool cached) {
            if (report.globally_stable) {
                art = {{"skipped", "globally stable"}};
                return;
            }
            if (!cached) {
                double c2 = quadratic_reach_verifier(sys, *report.c1_P, vo);
                art = {{"c2_P", c2}};
            }
            if (art.contains("c2_P")) report.c2_P = art.at("c2_P").get<double>();
        });
    }

    Dataset dataset;
    if (cfg.has_data) {
        runner.stage("data", "", [&](json& art, bool) {
            fs::path p = dir / "dataset.csv";
            if (reuse && fs::exists(p)) {
                dataset = load_dataset_csv(p.string());
                art = {{"points", dataset.points.size()}, {"resumed", true}};
                return;
            }
            dataset = generate_data(sys, cfg.data_samples, cfg.data_alpha, cfg.seed, cfg.jobs);
            save_dataset_csv(dataset, cfg.variables, (p.string() + ".tmp"));
            fs::rename(p.string() + ".tmp", p);
            art = {{"points", dataset.points.size()}};
        });
    }

    MlpNet net;
    if (cfg.has_train) {
        runner.stage("train", "", [&](json& art, bool) {
            fs::path p = dir / "net.txt";
            if (reuse && fs::exists(p)) {
                net = load_net(p.string());
                art = {{"resumed", true}};
                return;
            }
            auto tr = train(sys, dataset, cfg.train);
            net = std::move(tr.net);
            save_net(net, p.string() + ".tmp");
            fs::rename(p.string() + ".tmp", p);
            save_training_log(tr.log, (dir / "training_log.csv").string());
            art = {{"epochs", tr.log.size()}};
            if (!tr.log.empty()) art["final_loss"] = tr.log.back().total;
        });
    }

    if (cfg.has_neural) {
        runner.stage("neural_verify", "neural.json", [&](json& art, bool cached) {
            if (report.globally_stable) {
                art = {{"skipped", "globally stable"}};
                return;
            }
            if (!cached) {
                double target = cfg.neural_target == "c2_P" ? *report.c2_P : *report.c1_P;
                NeuralLevels lv = neural_verifier(sys, net, target, vo);
                art = {{"c1_V", lv.c1}, {"c2_V", lv.c2}, {"target", target}};
            }
            if (art.contains("c1_V")) report.c1_V = art.at("c1_V").get<double>();
            if (art.contains("c2_V")) report.c2_V = art.at("c2_V").get<double>();
        });
    }

    if (cfg.has_compositional) {
        runner.stage("compositional", "compositional.json", [&](json& art, bool cached) {
            if (!cached) {
                Decomposition d = decompose(sys, cfg.blocks);
                if (cfg.comp_mode != "quadratic")
                    art["local_level"] = compositional_local_stability_verifier(sys, d, vo);
                if (cfg.comp_mode != "local")
                    art["quadratic_level"] = compositional_quadratic_verifier(d, sys.domain, vo);
            }
            if (art.contains("local_level"))
                report.comp_local_level = art.at("local_level").get<double>();
            if (art.contains("quadratic_level"))
                report.comp_quadratic_level = art.at("quadratic_level").get<double>();
        });
    }

    // nesting of the verified chain: P1 within P2, V1 within V2
    if (report.success) {
        if (report.c1_P && report.c2_P && !(*report.c1_P <= *report.c2_P))
            report.nesting_ok = false;
        if (report.c1_V && report.c2_V && !(*report.c1_V <= *report.c2_V))
            report.nesting_ok = false;
    }

    atomic_write((dir / "report.json").string(), report.to_json().dump(2) + "\n");
    return report;
}

DoaSample load_or_build_doa(const RunConfig& cfg, const DynamicalSystem& sys, int n_mc) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    fs::path p = dir / ("doa_cache_" + std::to_string(cfg.seed) + ".csv");
    const std::size_t n = sys.dim();
    if (fs::exists(p)) {
        std::ifstream in(p);
        std::string header;
        std::getline(in, header);
        DoaSample s;
        s.seed = cfg.seed;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::vector<double> x(n);
            char comma;
            for (std::size_t k = 0; k < n; ++k) ss >> x[k] >> comma;
            int flag;
            ss >> flag;
            if (!ss) break;
            s.points.push_back(std::move(x));
            s.in_doa.push_back(static_cast<char>(flag));
            s.doa_count += flag;
        }
        if (static_cast<int>(s.points.size()) == n_mc) return s;
    }
    DoaSample s = simulate_doa(sys, n_mc, cfg.seed, cfg.jobs);
    std::ostringstream out;
    for (std::size_t k = 0; k < n; ++k) out << (k ? "," : "") << "x" << (k + 1);
    out << ",in_doa\n";
    char buf[48];
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", s.points[i][k]);
            out << buf << ",";
        }
        out << int(s.in_doa[i]) << "\n";
    }
    atomic_write(p.string(), out.str());
    return s;
}

}  // namespace roa
