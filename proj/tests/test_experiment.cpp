#include <doctest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "qprobe/experiment.hpp"
#include "qprobe/figures.hpp"

using namespace qprobe;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path = fs::temp_directory_path() / ("qprobe-test-" + std::to_string(stamp));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::size_t file_count() const {
        return static_cast<std::size_t>(std::distance(fs::directory_iterator(path), fs::directory_iterator{}));
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json base() {
    return {{"name", "t"}, {"engines", {"rwa"}}, {"delta", 1.0}, {"coupling_strength", 0.1},
            {"gamma", 1.0}, {"t_max", 2.0},      {"dt", 0.5}};
}

std::string config_error(json doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

RunOptions options_for(const TempDir& dir) {
    RunOptions o;
    o.out_dir = dir.path;
    return o;
}

}  // namespace

TEST_CASE("config parsing resolves parameters") {
    json doc = base();
    doc.erase("gamma");
    doc["gamma_ratio"] = 10.0;
    doc["initial_state"] = {1.0, 0.0, 0.0};
    const auto c = parse_config(doc);
    CHECK(c.model.gamma_env == doctest::Approx(1.0));
    CHECK(c.initial.x() == 1.0);
    CHECK(c.grid.size() == 5);
    CHECK(c.engines == std::vector<Engine>{Engine::Rwa});
    CHECK(c.sweep.empty());
}

TEST_CASE("config errors name the field") {
    auto with = [](const char* key, json value) {
        json d = base();
        d[key] = std::move(value);
        return d;
    };
    CHECK(config_error(with("colour", "red")).find("unknown key 'colour'") != std::string::npos);
    CHECK(config_error(with("engines", {"lindblad"})).find("engines") != std::string::npos);
    CHECK(config_error(with("engines", {"gbe", "gbe"})).find("duplicate") != std::string::npos);
    CHECK(config_error(with("gamma_ratio", 2.0)).find("mutually exclusive") != std::string::npos);
    CHECK(config_error(with("dt", 0.3)).find("field 'dt'") != std::string::npos);
    CHECK(config_error(with("delta", -1.0)).find("field 'delta'") != std::string::npos);
    CHECK(config_error(with("chi", 0.5)).find("field 'chi'") != std::string::npos);
    CHECK(config_error(with("observable", "entropy")).find("field 'observable'") != std::string::npos);
    CHECK(config_error(with("heom_depth", 2.5)).find("field 'heom_depth'") != std::string::npos);
    CHECK(config_error(with("heom_step", 0.3)).find("field 'heom_step'") != std::string::npos);
    CHECK(config_error(with("initial_state", {2.0, 0.0, 0.0})).find("initial_state") != std::string::npos);

    json mixed = with("coupling", "mixed");
    mixed["engines"] = {"gbe"};
    CHECK(config_error(mixed).find("does not support") != std::string::npos);

    json sweep = with("sweep", {{"chi", {0.0, 1.0}}});
    sweep["observable"] = "qfi";
    CHECK(config_error(sweep).find("sweep.chi") != std::string::npos);
    sweep["sweep"] = {{"gamma_ratio", {1.0}}, {"beta", {1.0}}};
    CHECK(config_error(sweep).find("sweep.beta") != std::string::npos);
    sweep["sweep"] = {{"gamma_ratio", {1.0}}};
    sweep["observable"] = "trajectory";
    CHECK(config_error(sweep).find("observable 'qfi'") != std::string::npos);
}

TEST_CASE("overrides") {
    json doc = base();
    apply_overrides(doc, {"t_max=4", "name=run_b", "engines=[\"gbe\",\"rwa\"]", "sweep.gamma_ratio=[0.5]"});
    CHECK(doc["t_max"] == 4);
    CHECK(doc["name"] == "run_b");
    CHECK(doc["engines"].size() == 2);
    CHECK(doc["sweep"]["gamma_ratio"][0] == 0.5);
    CHECK_THROWS_AS(apply_overrides(doc, {"novalue"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(doc, {"t_max.x=1"}), ConfigError);
}

TEST_CASE("number and CSV formatting") {
    CHECK(format_number(0.1) == "1.00000000000000e-01");
    CHECK(format_number(-1234.5) == "-1.23450000000000e+03");
    CHECK(format_number(0.0) == "0.00000000000000e+00");

    Trajectory<BlochVector> traj;
    traj.times = {0.0, 0.5};
    traj.states = {BlochVector(0, 0, 1), BlochVector(0.5, 0, 0)};
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    CHECK(os.str() ==
          "t,sx,sy,sz\n"
          "0.00000000000000e+00,0.00000000000000e+00,0.00000000000000e+00,1.00000000000000e+00\n"
          "5.00000000000000e-01,5.00000000000000e-01,0.00000000000000e+00,0.00000000000000e+00\n");
}

TEST_CASE("a single run writes one CSV per engine and no sweep files") {
    TempDir dir;
    json doc = base();
    doc["engines"] = {"heom", "gbe", "rwa"};
    const auto report = run_experiment(parse_config(doc), options_for(dir));
    CHECK(report.results.size() == 3);
    for (const char* e : {"heom", "gbe", "rwa"}) {
        const auto csv = slurp(dir.path / (std::string("t_") + e + "_trajectory.csv"));
        CHECK(csv.rfind("t,sx,sy,sz\n", 0) == 0);
        CHECK(csv.find('\r') == std::string::npos);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    }
    CHECK(fs::exists(dir.path / "t_metadata.json"));
    CHECK(dir.file_count() == 4);

    const auto meta = json::parse(slurp(dir.path / "t_metadata.json"));
    CHECK(meta["config"] == doc);
    CHECK(meta["engines"]["heom"]["trajectory"].contains("depth"));
    CHECK(meta.contains("wall_time_seconds"));
}

TEST_CASE("QFI run and plot script") {
    TempDir dir;
    json doc = base();
    doc["observable"] = "qfi";
    auto opts = options_for(dir);
    opts.emit_plotscript = true;
    run_experiment(parse_config(doc), opts);
    CHECK(slurp(dir.path / "t_rwa_qfi.csv").rfind("t,qfi\n", 0) == 0);
    CHECK(slurp(dir.path / "t_plot.py").find("t_rwa_qfi.csv") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical CSVs") {
    TempDir a, b;
    json doc = base();
    doc["engines"] = {"heom", "gbe"};
    doc["observable"] = "qfi";
    doc["coupling_strength"] = 0.2;
    run_experiment(parse_config(doc), options_for(a));
    auto opts = options_for(b);
    opts.workers = 4;
    run_experiment(parse_config(doc), opts);
    for (const char* f : {"t_heom_qfi.csv", "t_gbe_qfi.csv"}) CHECK(slurp(a.path / f) == slurp(b.path / f));
}

TEST_CASE("engine failure removes partial artifacts") {
    TempDir dir;
    json doc = base();
    doc["engines"] = {"rwa", "heom"};
    doc["coupling_strength"] = 0.5;
    doc["gamma"] = 50.0;
    doc["dt"] = 1.0;
    doc["t_max"] = 5.0;
    doc["heom_depth"] = 6;
    doc["heom_step"] = 1.0;
    CHECK_THROWS_AS(run_experiment(parse_config(doc), options_for(dir)), NumericalError);
    CHECK(dir.file_count() == 0);
}

TEST_CASE("2-D sweep yields a full reduction table") {
    TempDir dir;
    json doc = base();
    doc.erase("gamma");
    doc["engines"] = {"heom"};
    doc["observable"] = "qfi";
    doc["coupling"] = "mixed";
    doc["sweep"] = {{"gamma_ratio", {1.0, 2.0, 4.0}}, {"chi", {0.0, 0.5, 1.0}}};
    auto opts = options_for(dir);
    opts.workers = 3;
    run_sweep(parse_config(doc), opts);
    const auto table = slurp(dir.path / "t_heom_fmax.csv");
    CHECK(table.rfind("gamma_ratio,chi,t_at_max,fmax,status\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 10);
    CHECK(table.find("missing") == std::string::npos);
    const auto surface = slurp(dir.path / "t_heom_sweep.csv");
    CHECK(std::count(surface.begin(), surface.end(), '\n') == 1 + 9 * 5);

    // cell order and worker count do not change the surface
    TempDir serial;
    run_sweep(parse_config(doc), options_for(serial));
    CHECK(slurp(serial.path / "t_heom_sweep.csv") == surface);
}

TEST_CASE("failed sweep cells are marked missing") {
    TempDir dir;
    json doc = base();
    doc.erase("gamma");
    doc["engines"] = {"heom"};
    doc["observable"] = "qfi";
    doc["coupling_strength"] = 0.5;
    doc["dt"] = 1.0;
    doc["t_max"] = 5.0;
    doc["heom_depth"] = 6;
    doc["heom_step"] = 1.0;
    doc["sweep"] = {{"gamma_ratio", {0.1, 100.0}}};
    const auto report = run_sweep(parse_config(doc), options_for(dir));
    const auto& cells = report.results.front().cells;
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].curve.has_value());
    CHECK_FALSE(cells[1].curve.has_value());
    CHECK_FALSE(cells[1].error.empty());
    const auto table = slurp(dir.path / "t_heom_fmax.csv");
    CHECK(table.find("nan,nan,missing") != std::string::npos);
    const auto meta = json::parse(slurp(dir.path / "t_metadata.json"));
    CHECK(meta["engines"]["heom"]["cells"][1]["status"] == "missing");

    doc["sweep"] = {{"gamma_ratio", {100.0}}};
    TempDir none;
    CHECK_THROWS_AS(run_sweep(parse_config(doc), options_for(none)), NumericalError);
    CHECK(none.file_count() == 0);
}

TEST_CASE("sweep entry point needs axes") {
    TempDir dir;
    json doc = base();
    doc["observable"] = "qfi";
    CHECK_THROWS_AS(run_sweep(parse_config(doc), options_for(dir)), ConfigError);
}

TEST_CASE("figure presets parse and unknown ids list the valid ones") {
    for (const auto& id : figure_ids()) CHECK_NOTHROW(parse_config(figure_preset(id)));
    try {
        figure_preset("fig4");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("fig3cd") != std::string::npos);
    }
}

TEST_CASE("curve diagnostics") {
    CHECK(local_maxima({0, 1, 0, 2, 2, 0, 3}) == std::vector<std::size_t>{1});
    CHECK(has_collapse_and_revival({0, 5, 0.1, 10, 0}));
    CHECK_FALSE(has_collapse_and_revival({0, 5, 3, 10, 0}));
    CHECK_FALSE(has_collapse_and_revival({0, 1, 2, 3}));

    Trajectory<BlochVector> a, b;
    a.times = b.times = {0, 1};
    a.states = {BlochVector(0, 0, 1), BlochVector(0, 0, -1)};
    b.states = {BlochVector(0, 0, 0.5), BlochVector(0, 0, -1)};
    CHECK(sup_deviation_z(a, b) == doctest::Approx(0.5));
    CHECK(relative_rms_z(a, b) == doctest::Approx(std::sqrt(0.25 / 2.0)));
}

TEST_CASE("reproduce runs a preset with overrides") {
    TempDir dir;
    const auto report = reproduce_figure("fig2a", options_for(dir), {"t_max=150"});
    REQUIRE(report.checks.size() == 2);
    CHECK(report.all_passed());
    CHECK(fs::exists(dir.path / "fig2a_rwa_fmax.csv"));
    const auto meta = json::parse(slurp(dir.path / "fig2a_metadata.json"));
    CHECK(meta["command"] == "reproduce fig2a");
}
