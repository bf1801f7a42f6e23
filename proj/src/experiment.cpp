#include "qprobe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qprobe/parallel.hpp"

#ifndef QPROBE_VERSION
#define QPROBE_VERSION "unknown"
#endif

namespace qprobe {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopLevelKeys{
    "name",      "engines",         "observable",     "delta",      "coupling_strength", "gamma",
    "gamma_ratio", "coupling",      "chi",            "initial_state", "t_max",          "dt",
    "heom_depth", "heom_step",      "epsilon_rel",    "depth_tolerance", "step_tolerance", "depth_max",
    "sweep"};
const std::set<std::string> kSweepKeys{"gamma_ratio", "chi"};

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
    throw ConfigError("field '" + key + "': " + what);
}

double number(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number()) field_error(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) field_error(key, "must be finite");
    return d;
}

std::optional<double> optional_number(const json& doc, const std::string& key) {
    if (!doc.contains(key)) return std::nullopt;
    return number(doc, key);
}

double positive(const json& doc, const std::string& key, double fallback) {
    const double v = optional_number(doc, key).value_or(fallback);
    if (!(v > 0)) field_error(key, "must be positive");
    return v;
}

std::string text(const json& doc, const std::string& key, const std::string& fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_string()) field_error(key, "expected a string");
    return doc.at(key).get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
    if (!v.is_array()) field_error(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) field_error(key, "expected an array of numbers");
        out.push_back(e.get<double>());
        if (!std::isfinite(out.back())) field_error(key, "values must be finite");
    }
    return out;
}

BlochVector initial_state(const json& doc) {
    if (!doc.contains("initial_state")) return BlochVector(0, 0, 1);
    const json& v = doc.at("initial_state");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "sz_up") return BlochVector(0, 0, 1);
        if (s == "sz_down") return BlochVector(0, 0, -1);
        if (s == "plus") return BlochVector(1, 0, 0);
        if (s == "minus") return BlochVector(-1, 0, 0);
        field_error("initial_state", "unknown state '" + s + "' (expected sz_up, sz_down, plus, minus or [x, y, z])");
    }
    const auto r = number_list(v, "initial_state");
    if (r.size() != 3) field_error("initial_state", "a Bloch vector needs three components");
    try {
        return BlochVector(r[0], r[1], r[2]);
    } catch (const InvalidArgument&) {
        field_error("initial_state", "Bloch vector must satisfy |r| <= 1");
    }
}

json run_record(const EngineRun& run) {
    json out = json::object();
    for (const auto& [k, v] : run.trajectory.metadata) out[k] = v;
    if (run.depth) out["depth"] = *run.depth;
    if (run.step) out["step"] = *run.step;
    if (run.depth_delta) out["depth_delta"] = *run.depth_delta;
    if (run.step_delta) out["step_delta"] = *run.step_delta;
    return out;
}

// Files written by one invocation; removed again unless committed.
class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}
    ArtifactWriter(const ArtifactWriter&) = delete;
    ArtifactWriter& operator=(const ArtifactWriter&) = delete;
    ~ArtifactWriter() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
    }

    template <typename Writer>
    void write(const std::string& filename, Writer&& body) {
        const fs::path path = dir_ / filename;
        files_.push_back(path);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error("cannot open " + path.string() + " for writing");
        body(os);
        os.flush();
        if (!os) throw Error("failed writing " + path.string());
    }

    const std::vector<fs::path>& files() const { return files_; }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool committed_ = false;
};

std::string plotscript(const std::string& name, const std::vector<fs::path>& csvs) {
    std::ostringstream py;
    py << "# Plots the CSV outputs of '" << name << "'.  Requires pandas and matplotlib.\n"
       << "import pandas as pd\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "files = [\n";
    for (const auto& f : csvs) py << "    \"" << f.filename().string() << "\",\n";
    py << "]\n\n"
       << "for name in files:\n"
       << "    df = pd.read_csv(name)\n"
       << "    fig, ax = plt.subplots()\n"
       << "    if {'sx', 'sy', 'sz'} <= set(df.columns):\n"
       << "        for c in ('sx', 'sy', 'sz'):\n"
       << "            ax.plot(df['t'], df[c], label=c)\n"
       << "    elif {'gamma_ratio', 'chi', 't', 'qfi'} <= set(df.columns):\n"
       << "        for (g, c), cell in df.groupby(['gamma_ratio', 'chi']):\n"
       << "            ax.plot(cell['t'], cell['qfi'], label=f'gamma/Gamma={g:g}, chi={c:g}')\n"
       << "    elif {'t', 'qfi'} <= set(df.columns):\n"
       << "        ax.plot(df['t'], df['qfi'], label='F')\n"
       << "    else:\n"
       << "        plt.close(fig)\n"
       << "        continue\n"
       << "    ax.set_xlabel('t')\n"
       << "    ax.legend()\n"
       << "    fig.savefig(name.replace('.csv', '.png'), dpi=150)\n"
       << "    plt.close(fig)\n";
    return py.str();
}

std::vector<std::pair<double, double>> sweep_cells(const ExperimentConfig& c) {
    const double base_ratio = c.model.coupling_strength > 0 ? c.model.gamma_env / c.model.coupling_strength : 0.0;
    const std::vector<double> ratios = c.sweep.gamma_ratio.empty() ? std::vector<double>{base_ratio}
                                                                   : c.sweep.gamma_ratio;
    const std::vector<double> chis = c.sweep.chi.empty() ? std::vector<double>{c.model.chi} : c.sweep.chi;
    std::vector<std::pair<double, double>> cells;
    for (double r : ratios)
        for (double x : chis) cells.emplace_back(r, x);
    return cells;
}

}  // namespace

CouplingOperator ExperimentConfig::coupling_operator() const {
    return qprobe::coupling_operator(model.chi, coupling);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.14e", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory<BlochVector>& traj) {
    os << "t,sx,sy,sz\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& r = traj.states[i];
        os << format_number(traj.times[i]) << ',' << format_number(r.x()) << ',' << format_number(r.y()) << ','
           << format_number(r.z()) << '\n';
    }
}

void write_qfi_csv(std::ostream& os, const QfiCurve& curve) {
    os << "t,qfi\n";
    for (const auto& s : curve.samples) os << format_number(s.t) << ',' << format_number(s.value) << '\n';
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!kTopLevelKeys.count(key)) throw ConfigError("unknown key '" + key + "'");
    }

    ExperimentConfig c;
    c.source = doc;
    c.name = text(doc, "name", c.name);
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
        field_error("name", "must be a non-empty file-name stem");
    }

    if (doc.contains("engines")) {
        const json& e = doc.at("engines");
        if (!e.is_array() || e.empty()) field_error("engines", "expected a non-empty array of engine names");
        c.engines.clear();
        for (const auto& item : e) {
            if (!item.is_string()) field_error("engines", "expected engine names");
            try {
                const Engine engine = parse_engine(item.get<std::string>());
                if (std::find(c.engines.begin(), c.engines.end(), engine) != c.engines.end()) {
                    field_error("engines", "duplicate engine '" + item.get<std::string>() + "'");
                }
                c.engines.push_back(engine);
            } catch (const ConfigError& err) {
                if (std::string(err.what()).rfind("field", 0) == 0) throw;
                field_error("engines", err.what());
            }
        }
    }

    const std::string observable = text(doc, "observable", "trajectory");
    if (observable == "trajectory") {
        c.observable = Observable::Trajectory;
    } else if (observable == "qfi") {
        c.observable = Observable::Qfi;
    } else {
        field_error("observable", "expected 'trajectory' or 'qfi'");
    }

    c.model.delta = positive(doc, "delta", 1.0);
    c.model.coupling_strength = optional_number(doc, "coupling_strength").value_or(0.1);
    if (c.model.coupling_strength < 0) field_error("coupling_strength", "must be non-negative");
    if (doc.contains("gamma") && doc.contains("gamma_ratio")) {
        throw ConfigError("fields 'gamma' and 'gamma_ratio' are mutually exclusive");
    }
    if (doc.contains("gamma_ratio")) {
        const double ratio = positive(doc, "gamma_ratio", 1.0);
        if (!(c.model.coupling_strength > 0)) field_error("gamma_ratio", "needs coupling_strength > 0");
        c.model.gamma_env = ratio * c.model.coupling_strength;
    } else {
        c.model.gamma_env = positive(doc, "gamma", 1.0);
    }

    const std::string coupling = text(doc, "coupling", "sigma_z");
    if (coupling == "sigma_z") {
        c.coupling = CouplingKind::PerpendicularZ;
        if (doc.contains("chi")) field_error("chi", "only used with coupling 'mixed'");
    } else if (coupling == "mixed") {
        c.coupling = CouplingKind::Mixed;
        c.model.chi = optional_number(doc, "chi").value_or(0.0);
    } else {
        field_error("coupling", "expected 'sigma_z' or 'mixed'");
    }
    for (Engine e : c.engines) {
        if (!engine_supports(e, c.coupling_operator())) {
            field_error("engines", "engine '" + to_string(e) + "' does not support coupling '" + coupling + "'");
        }
    }

    c.initial = initial_state(doc);

    c.grid.t_max = positive(doc, "t_max", c.grid.t_max);
    c.grid.step = positive(doc, "dt", c.grid.step);
    const double intervals = c.grid.t_max / c.grid.step;
    if (std::abs(intervals - std::round(intervals)) > 1e-9 * std::max(1.0, intervals)) {
        field_error("dt", "must divide t_max");
    }
    if (intervals > 1e7) field_error("dt", "grid has more than 1e7 points");

    if (doc.contains("heom_depth")) {
        const json& d = doc.at("heom_depth");
        if (!d.is_number_integer() || d.get<long>() < 1 || d.get<long>() > 200) {
            field_error("heom_depth", "expected an integer in [1, 200]");
        }
        c.solver.heom_depth = d.get<int>();
    }
    if (doc.contains("heom_step")) {
        const double h = positive(doc, "heom_step", 1.0);
        const double ratio = c.grid.step / h;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 0.5) {
            field_error("heom_step", "must divide dt");
        }
        c.solver.heom_step = h;
    }
    c.epsilon_rel = positive(doc, "epsilon_rel", c.epsilon_rel);
    if (c.epsilon_rel > 0.1) field_error("epsilon_rel", "must not exceed 0.1");
    c.solver.convergence.depth_tolerance = positive(doc, "depth_tolerance", c.solver.convergence.depth_tolerance);
    c.solver.convergence.step_tolerance = positive(doc, "step_tolerance", c.solver.convergence.step_tolerance);
    if (doc.contains("depth_max")) {
        const json& d = doc.at("depth_max");
        if (!d.is_number_integer() || d.get<long>() < 1 || d.get<long>() > 200) {
            field_error("depth_max", "expected an integer in [1, 200]");
        }
        c.solver.convergence.max_depth = d.get<int>();
    }

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        if (!s.is_object()) field_error("sweep", "expected an object with 'gamma_ratio' and/or 'chi'");
        for (const auto& [key, value] : s.items()) {
            if (!kSweepKeys.count(key)) throw ConfigError("unknown key 'sweep." + key + "'");
        }
        if (s.contains("gamma_ratio")) c.sweep.gamma_ratio = number_list(s.at("gamma_ratio"), "sweep.gamma_ratio");
        if (s.contains("chi")) c.sweep.chi = number_list(s.at("chi"), "sweep.chi");
        for (double r : c.sweep.gamma_ratio)
            if (!(r > 0)) field_error("sweep.gamma_ratio", "values must be positive");
        if (!c.sweep.gamma_ratio.empty() && !(c.model.coupling_strength > 0)) {
            field_error("sweep.gamma_ratio", "needs coupling_strength > 0");
        }
        if (!c.sweep.chi.empty() && c.coupling != CouplingKind::Mixed) {
            field_error("sweep.chi", "requires coupling 'mixed'");
        }
        if (!c.sweep.empty() && c.observable != Observable::Qfi) {
            field_error("sweep", "sweeps require observable 'qfi'");
        }
    }

    try {
        c.model.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
        const std::string key = o.substr(0, eq);
        const std::string raw = o.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;

        json* node = &doc;
        std::size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
            if (!node->is_object()) throw ConfigError("override key '" + key + "' does not address an object");
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            if (node->is_null()) *node = json::object();
            start = dot + 1;
        }
    }
}

ExperimentConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
    apply_overrides(doc, overrides);
    return parse_config(doc);
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const CouplingOperator coupling = config.coupling_operator();
    const bool sweeping = !config.sweep.empty();

    RunReport report;
    for (Engine engine : config.engines) {
        EngineResult result{engine, std::nullopt, std::nullopt, {}};
        if (sweeping) {
            const auto axes = sweep_cells(config);
            result.cells.resize(axes.size());
            parallel_for(axes.size(), options.workers, [&](std::size_t i) {
                CellResult& cell = result.cells[i];
                cell.gamma_ratio = axes[i].first;
                cell.chi = axes[i].second;
                ModelParams model = config.model;
                if (!config.sweep.gamma_ratio.empty()) model.gamma_env = cell.gamma_ratio * model.coupling_strength;
                model.chi = cell.chi;
                QfiOptions qopts{config.epsilon_rel, config.solver, 1};
                try {
                    cell.curve = qfi_via_solver(engine, model, qprobe::coupling_operator(cell.chi, config.coupling),
                                                config.grid, config.initial, qopts);
                } catch (const Error& e) {
                    cell.error = e.what();
                }
            });
            std::size_t failed = 0;
            for (const auto& cell : result.cells) {
                if (!cell.curve) {
                    ++failed;
                    report.warnings.push_back(to_string(engine) + " cell gamma_ratio=" + format_number(cell.gamma_ratio) +
                                              " chi=" + format_number(cell.chi) + " failed: " + cell.error);
                } else {
                    for (const auto& w : cell.curve->warnings) report.warnings.push_back(to_string(engine) + ": " + w);
                }
            }
            if (failed == result.cells.size()) {
                throw NumericalError(to_string(engine) + ": every sweep cell failed; first error: " +
                                     result.cells.front().error);
            }
        } else if (config.observable == Observable::Trajectory) {
            result.trajectory = propagate_engine(engine, config.model, coupling, config.grid, config.initial,
                                                 config.solver);
        } else {
            QfiOptions qopts{config.epsilon_rel, config.solver, options.workers};
            result.qfi = qfi_via_solver(engine, config.model, coupling, config.grid, config.initial, qopts);
            for (const auto& w : result.qfi->warnings) report.warnings.push_back(to_string(engine) + ": " + w);
        }
        report.results.push_back(std::move(result));
    }

    // Single serializer: every file is written here, in a fixed order.
    fs::create_directories(options.out_dir);
    ArtifactWriter writer(options.out_dir);
    json meta;
    meta["tool"] = "qprobe";
    meta["version"] = QPROBE_VERSION;
    meta["command"] = options.command;
    meta["config"] = config.source;
    meta["resolved"] = {{"delta", config.model.delta},
                        {"coupling_strength", config.model.coupling_strength},
                        {"gamma", config.model.gamma_env},
                        {"chi", config.model.chi},
                        {"t_max", config.grid.t_max},
                        {"dt", config.grid.step},
                        {"epsilon_rel", config.epsilon_rel},
                        {"initial_state", {config.initial.x(), config.initial.y(), config.initial.z()}}};
    json engines = json::object();
    std::vector<fs::path> csvs;

    for (const auto& result : report.results) {
        const std::string stem = config.name + "_" + to_string(result.engine);
        json record = json::object();
        if (result.trajectory) {
            writer.write(stem + "_trajectory.csv", [&](std::ostream& os) {
                write_trajectory_csv(os, result.trajectory->trajectory);
            });
            record["trajectory"] = run_record(*result.trajectory);
        } else if (result.qfi) {
            writer.write(stem + "_qfi.csv", [&](std::ostream& os) { write_qfi_csv(os, *result.qfi); });
            record["qfi"] = run_record(result.qfi->central);
            record["qfi"]["fmax"] = result.qfi->max_value();
            record["qfi"]["t_at_max"] = result.qfi->argmax_time();
            record["qfi"]["warnings"] = result.qfi->warnings;
        } else {
            writer.write(stem + "_sweep.csv", [&](std::ostream& os) {
                os << "gamma_ratio,chi,t,qfi\n";
                for (const auto& cell : result.cells) {
                    if (!cell.curve) continue;
                    for (const auto& s : cell.curve->samples) {
                        os << format_number(cell.gamma_ratio) << ',' << format_number(cell.chi) << ','
                           << format_number(s.t) << ',' << format_number(s.value) << '\n';
                    }
                }
            });
            writer.write(stem + "_fmax.csv", [&](std::ostream& os) {
                os << "gamma_ratio,chi,t_at_max,fmax,status\n";
                for (const auto& cell : result.cells) {
                    os << format_number(cell.gamma_ratio) << ',' << format_number(cell.chi) << ',';
                    if (cell.curve) {
                        os << format_number(cell.curve->argmax_time()) << ',' << format_number(cell.curve->max_value())
                           << ",ok\n";
                    } else {
                        os << "nan,nan,missing\n";
                    }
                }
            });
            json cells = json::array();
            for (const auto& cell : result.cells) {
                json c = {{"gamma_ratio", cell.gamma_ratio}, {"chi", cell.chi}};
                if (cell.curve) {
                    c["status"] = "ok";
                    c["run"] = run_record(cell.curve->central);
                    c["fmax"] = cell.curve->max_value();
                    c["t_at_max"] = cell.curve->argmax_time();
                    c["warnings"] = cell.curve->warnings;
                } else {
                    c["status"] = "missing";
                    c["error"] = cell.error;
                }
                cells.push_back(std::move(c));
            }
            record["cells"] = std::move(cells);
        }
        engines[to_string(result.engine)] = std::move(record);
    }
    csvs = writer.files();

    if (options.emit_plotscript) {
        writer.write(config.name + "_plot.py", [&](std::ostream& os) { os << plotscript(config.name, csvs); });
    }
    meta["engines"] = std::move(engines);
    meta["warnings"] = report.warnings;
    json files = json::array();
    for (const auto& f : writer.files()) files.push_back(f.filename().string());
    meta["files"] = std::move(files);
    meta["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    writer.write(config.name + "_metadata.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });

    report.files = writer.files();
    writer.commit();
    return report;
}

RunReport run_sweep(const ExperimentConfig& config, const RunOptions& options) {
    if (config.sweep.empty()) throw ConfigError("field 'sweep': sweep needs at least one non-empty axis");
    return run_experiment(config, options);
}

}  // namespace qprobe
