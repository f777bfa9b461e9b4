#include "ltp/cli.hpp"

#include "ltp/cases.hpp"
#include "ltp/csv.hpp"
#include "ltp/hss_analysis.hpp"
#include "ltp/td_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace ltp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config sections: every field is addressable by name for JSON and --set.
// ---------------------------------------------------------------------------

template <class T>
struct Field {
    std::function<void(T&, const json&)> set;
    std::function<json(const T&)> get;
};

template <class T, class V>
Field<T> field_of(V T::*member) {
    return {[member](T& obj, const json& v) { obj.*member = v.get<V>(); },
            [member](const T& obj) { return json(obj.*member); }};
}

const std::map<std::string, Field<SolverConfig>>& solver_fields() {
    static const std::map<std::string, Field<SolverConfig>> f = {
        {"N", field_of(&SolverConfig::N)},
        {"h", field_of(&SolverConfig::h)},
        {"T", field_of(&SolverConfig::T)},
        {"tolerance", field_of(&SolverConfig::tolerance)},
        {"max_iterations", field_of(&SolverConfig::max_iterations)},
        {"damping", field_of(&SolverConfig::damping)},
        {"max_halvings", field_of(&SolverConfig::max_halvings)},
    };
    return f;
}

const std::map<std::string, Field<AnalysisConfig>>& analysis_fields() {
    static const std::map<std::string, Field<AnalysisConfig>> f = {
        {"marginal_band", field_of(&AnalysisConfig::marginal_band)},
        {"f_min", field_of(&AnalysisConfig::f_min)},
        {"f_max", field_of(&AnalysisConfig::f_max)},
        {"f_points", field_of(&AnalysisConfig::f_points)},
        {"log_spacing", field_of(&AnalysisConfig::log_spacing)},
        {"input_index", field_of(&AnalysisConfig::input_index)},
        {"output_index", field_of(&AnalysisConfig::output_index)},
        {"mirror_input_index", field_of(&AnalysisConfig::mirror_input_index)},
    };
    return f;
}

const std::map<std::string, Field<OracleConfig>>& oracle_fields() {
    static const std::map<std::string, Field<OracleConfig>> f = {
        {"horizon_periods", field_of(&OracleConfig::horizon_periods)},
        {"step", field_of(&OracleConfig::step)},
        {"start", field_of(&OracleConfig::start)},
        {"rms_tolerance", field_of(&OracleConfig::rms_tolerance)},
        {"growth", field_of(&OracleConfig::growth)},
        {"probe_state", field_of(&OracleConfig::probe_state)},
        {"perturbation", field_of(&OracleConfig::perturbation)},
        {"settle_periods", field_of(&OracleConfig::settle_periods)},
        {"probe_horizon_periods", field_of(&OracleConfig::probe_horizon_periods)},
    };
    return f;
}

template <class T>
void apply_field(const std::map<std::string, Field<T>>& fields, T& obj, const std::string& section,
                 const std::string& key, const json& value) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw UsageError("unknown key '" + section + "." + key + "'");
    try {
        it->second.set(obj, value);
    } catch (const json::exception&) {
        throw UsageError("bad value for '" + section + "." + key + "'");
    }
}

template <class T>
void apply_section(const std::map<std::string, Field<T>>& fields, T& obj, const std::string& section,
                   const json& doc) {
    if (!doc.is_object()) throw UsageError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : doc.items()) apply_field(fields, obj, section, key, value);
}

template <class T>
json dump_section(const std::map<std::string, Field<T>>& fields, const T& obj) {
    json out = json::object();
    for (const auto& [key, f] : fields) out[key] = f.get(obj);
    return out;
}

SweepAxis parse_axis(const json& doc, const std::string& which) {
    if (!doc.is_object()) throw UsageError("sweep." + which + " must be an object");
    SweepAxis axis;
    std::optional<double> start, stop;
    std::optional<int> count;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "name") axis.name = value.get<std::string>();
            else if (key == "unit") axis.unit = value.get<std::string>();
            else if (key == "values") axis.values = value.get<std::vector<double>>();
            else if (key == "start") start = value.get<double>();
            else if (key == "stop") stop = value.get<double>();
            else if (key == "count") count = value.get<int>();
            else throw UsageError("unknown key 'sweep." + which + "." + key + "'");
        } catch (const json::exception&) {
            throw UsageError("bad value for 'sweep." + which + "." + key + "'");
        }
    }
    if (axis.name.empty()) throw UsageError("sweep." + which + ".name is required");
    if (start || stop || count) {
        if (!axis.values.empty()) throw UsageError("sweep." + which + ": give either values or start/stop/count");
        if (!start || !stop || !count || *count < 1) {
            throw UsageError("sweep." + which + ": start, stop and count (>= 1) are required together");
        }
        for (int i = 0; i < *count; ++i) {
            axis.values.push_back(*count == 1 ? *start : *start + (*stop - *start) * i / (*count - 1));
        }
    }
    return axis;
}

json dump_axis(const SweepAxis& axis) { return {{"name", axis.name}, {"unit", axis.unit}, {"values", axis.values}}; }

json parse_scalar(const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos == text.size()) {
            if (text.find_first_of(".eE") == std::string::npos && std::abs(v) < 2e9) return static_cast<int>(v);
            return v;
        }
    } catch (const std::exception&) {
    }
    return text;
}

// ---------------------------------------------------------------------------
// Model access
// ---------------------------------------------------------------------------

SystemModel closed_loop(const RunConfig& cfg) {
    if (cfg.builtin_case()) return cases::build_case(cfg.case_name, cfg.params).closed_loop;
    return cases::load_linear_model(cfg.case_name);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw UsageError("cannot write '" + (dir / name).string() + "'");
    return os;
}

void write_spectrum_csv(std::ostream& os, const SystemModel& model, const SpectralVector& X) {
    os << "state,k,re,im\n";
    for (int i = 0; i < X.n_states(); ++i) {
        for (int k = -X.truncation(); k <= X.truncation(); ++k) {
            const Complex c = X.at(k, i);
            os << model.state_labels[static_cast<std::size_t>(i)] << ',' << k << ',' << csv::number(c.real()) << ','
               << csv::number(c.imag()) << '\n';
        }
    }
}

oracle::Trajectory waveform_table(const SystemModel& model, const CMatrix& waveforms, const HarmonicGrid& grid) {
    oracle::Trajectory t;
    t.step = grid.step();
    t.model_name = model.name;
    t.state_labels = model.state_labels;
    t.x = waveforms;
    for (int m = 0; m < waveforms.cols(); ++m) t.t.push_back(grid.time(m));
    return t;
}

json report_of(const SolverResult& r, double seconds) {
    return {{"converged", r.converged},
            {"iterations", r.iterations},
            {"residual_history", r.residual_history},
            {"fixed_point_residual", r.fixed_point_residual},
            {"timing_s", seconds}};
}

struct Solved {
    SystemModel model;
    SolverResult result;
    bool converged = false;
};

/// Solves the PSS and writes the solve artifacts. Non-convergence keeps the
/// partial iterate and is reported through `converged`.
Solved solve_and_write(const RunConfig& cfg, const fs::path& out_dir, std::ostream& err) {
    Solved s{closed_loop(cfg), {}, false};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        s.result = solve_pss(s.model, cfg.solver);
        s.converged = true;
    } catch (const PssNotConverged& e) {
        s.result = e.partial();
        err << "solve: " << e.what() << '\n';
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const HarmonicGrid grid = cfg.solver.grid();
    {
        auto os = open_out(out_dir, "pss_spectrum.csv");
        write_spectrum_csv(os, s.model, s.result.X);
    }
    {
        auto os = open_out(out_dir, "pss_waveforms.csv");
        oracle::write_trajectory_csv(os, waveform_table(s.model, s.result.waveforms, grid));
    }
    {
        json report = report_of(s.result, seconds);
        report["case"] = cfg.case_name;
        auto os = open_out(out_dir, "run_report.json");
        os << report.dump(2) << '\n';
    }
    return s;
}

int cmd_solve(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const Solved s = solve_and_write(cfg, out_dir, err);
    out << "converged: " << (s.converged ? "true" : "false") << " iterations: " << s.result.iterations << '\n';
    return s.converged ? kOk : kNotConverged;
}

int cmd_eig(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const Solved s = solve_and_write(cfg, out_dir, err);
    if (!s.converged) return kNotConverged;
    const ModeSet modes = analyze_modes(s.result.hss, cfg.analysis.marginal_band);
    {
        auto os = open_out(out_dir, "eigenvalues.csv");
        os << "re,im\n";
        for (const Complex& l : modes.eigenvalues) os << csv::number(l.real()) << ',' << csv::number(l.imag()) << '\n';
    }
    out << "weakest: " << csv::number(modes.weakest.real()) << ' ' << csv::number(modes.weakest.imag())
        << " verdict: " << to_string(modes.verdict) << '\n';
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream&) {
    if (!cfg.axis1 || !cfg.axis2) throw UsageError("sweep requires sweep.axis1 and sweep.axis2 in the config");
    if (!cfg.builtin_case()) throw UsageError("sweep requires a built-in case");
    SweepSpec spec{*cfg.axis1, *cfg.axis2, cfg.params, cfg.solver, cfg.workers};
    const std::string name = cfg.case_name;
    const SweepResult result =
        run_sweep([name](const ParameterSet& p) { return cases::build_case(name, p).closed_loop; }, spec);
    {
        auto os = open_out(out_dir, "trait.csv");
        write_trait_csv(os, result);
    }
    if (result.converged_count() == 0) {
        out << "sweep: no cell converged\n";
        return kNotConverged;
    }
    const Region region = extract_region(result);
    {
        auto os = open_out(out_dir, "region.csv");
        write_region_csv(os, result, region);
    }
    {
        auto os = open_out(out_dir, "boundary.csv");
        write_boundary_csv(os, region);
    }
    int unstable = 0;
    for (const auto& row : region.unstable) {
        for (bool u : row) unstable += u ? 1 : 0;
    }
    out << "cells: " << result.cells.size() << " converged: " << result.converged_count() << " unstable: " << unstable
        << '\n';
    return kOk;
}

int cmd_impedance(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const Solved s = solve_and_write(cfg, out_dir, err);
    if (!s.converged) return kNotConverged;
    const HssMatrices hss = cfg.builtin_case()
                                ? cases::open_loop_hss(cases::build_case(cfg.case_name, cfg.params), s.result, cfg.solver)
                                : s.result.hss;
    if (cfg.analysis.input_index < 0 || cfg.analysis.input_index >= hss.m) {
        throw UsageError("analysis.input_index out of range");
    }
    if (cfg.analysis.output_index < 0 || cfg.analysis.output_index >= hss.p) {
        throw UsageError("analysis.output_index out of range");
    }
    int mirror = cfg.analysis.mirror_input_index;
    if (mirror < 0) mirror = cfg.builtin_case() ? cfg.analysis.input_index ^ 1 : cfg.analysis.input_index;
    if (mirror >= hss.m) throw UsageError("analysis.mirror_input_index out of range");
    const auto scan =
        frequency_scan(hss, cfg.analysis.frequencies(), cfg.analysis.input_index, cfg.analysis.output_index, mirror);
    auto os = open_out(out_dir, "scan.csv");
    write_scan_csv(os, scan);
    int singular = 0;
    for (const auto& p : scan) singular += p.singular ? 1 : 0;
    out << "points: " << scan.size() << " singular: " << singular << '\n';
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const Solved s = solve_and_write(cfg, out_dir, err);
    if (!s.converged) return kNotConverged;
    const OracleConfig& oc = cfg.oracle;
    const double T = s.model.period();
    const CVector x0 = oc.start == "pss" ? CVector(s.result.waveforms.col(0)) : CVector::Zero(s.model.n_states);

    json report;
    report["case"] = cfg.case_name;
    report["rms_tolerance"] = oc.rms_tolerance;
    bool pass = true;
    try {
        const oracle::Trajectory traj = oracle::integrate(s.model, x0, 0.0, std::round(oc.horizon_periods) * T, oc.step);
        const CMatrix tail = oracle::last_period(traj, T);
        const oracle::WaveformError e = oracle::compare_waveforms(tail, s.result.waveforms);
        json states = json::object();
        for (int i = 0; i < s.model.n_states; ++i) {
            const bool ok = e.rms(i) <= oc.rms_tolerance;
            pass = pass && ok;
            states[s.model.state_labels[static_cast<std::size_t>(i)]] = {
                {"rms_error", e.rms(i)}, {"max_error", e.max(i)}, {"pass", ok}};
        }
        report["states"] = states;
    } catch (const oracle::TrajectoryDiverged& e) {
        pass = false;
        report["diverged_at"] = e.time();
    }

    if (oc.growth) {
        if (oc.probe_state < 0 || oc.probe_state >= s.model.n_states) throw UsageError("oracle.probe_state out of range");
        const ModeSet modes = analyze_modes(s.result.hss, cfg.analysis.marginal_band);
        oracle::ProbeConfig probe;
        probe.state = oc.probe_state;
        probe.magnitude = oc.perturbation;
        probe.settle_periods = oc.settle_periods;
        probe.horizon_periods = oc.probe_horizon_periods;
        probe.step = oc.step;
        const oracle::GrowthFit fit = oracle::perturbation_growth(s.model, s.result.waveforms.col(0), probe);
        const bool agree = (fit.rate > 0.0) == (modes.weakest.real() > 0.0);
        pass = pass && agree;
        report["growth"] = {{"fitted_rate", fit.rate},
                            {"floor_hit", fit.floor_hit},
                            {"weakest_re", modes.weakest.real()},
                            {"weakest_im", modes.weakest.imag()},
                            {"sign_agreement", agree}};
    }
    report["pass"] = pass;
    auto os = open_out(out_dir, "verify_report.json");
    os << report.dump(2) << '\n';
    out << "verify: " << (pass ? "pass" : "FAIL") << '\n';
    return pass ? kOk : kVerifyFailed;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<double> AnalysisConfig::frequencies() const {
    if (f_points < 1) throw UsageError("analysis.f_points must be >= 1");
    if (!(f_min > 0.0) || !(f_max >= f_min)) throw UsageError("analysis frequency range must satisfy 0 < f_min <= f_max");
    std::vector<double> f(static_cast<std::size_t>(f_points));
    for (int i = 0; i < f_points; ++i) {
        const double s = f_points == 1 ? 0.0 : static_cast<double>(i) / (f_points - 1);
        f[static_cast<std::size_t>(i)] =
            log_spacing ? f_min * std::pow(f_max / f_min, s) : f_min + (f_max - f_min) * s;
    }
    return f;
}

RunConfig resolve_config(const std::optional<std::string>& case_flag, const std::string& config_json,
                         const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (!config_json.empty()) {
        try {
            doc = json::parse(config_json);
        } catch (const json::exception& e) {
            throw UsageError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw UsageError("config must be a JSON object");
    }
    static const std::vector<std::string> sections = {"case", "set", "solver", "analysis", "oracle", "sweep", "workers"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(sections.begin(), sections.end(), key) == sections.end()) {
            throw UsageError("unknown key '" + key + "'");
        }
    }

    RunConfig cfg;
    if (case_flag) cfg.case_name = *case_flag;
    else if (doc.contains("case")) cfg.case_name = doc["case"].get<std::string>();
    if (cfg.builtin_case()) {
        cfg.params = cases::case_defaults(cfg.case_name);
    } else if (!fs::exists(cfg.case_name)) {
        throw UsageError("unknown case '" + cfg.case_name + "' (expected case1, case2 or a model file)");
    }

    if (doc.contains("set")) {
        if (!doc["set"].is_object()) throw UsageError("config 'set' must be an object");
        for (const auto& [key, value] : doc["set"].items()) {
            if (!value.is_number()) throw UsageError("bad value for parameter '" + key + "'");
            cfg.params.set(key, value.get<double>());
        }
    }
    if (doc.contains("solver")) apply_section(solver_fields(), cfg.solver, "solver", doc["solver"]);
    if (doc.contains("analysis")) apply_section(analysis_fields(), cfg.analysis, "analysis", doc["analysis"]);
    if (doc.contains("oracle")) apply_section(oracle_fields(), cfg.oracle, "oracle", doc["oracle"]);
    if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        if (!sw.is_object()) throw UsageError("config 'sweep' must be an object");
        for (const auto& [key, value] : sw.items()) {
            if (key == "axis1") cfg.axis1 = parse_axis(value, key);
            else if (key == "axis2") cfg.axis2 = parse_axis(value, key);
            else throw UsageError("unknown key 'sweep." + key + "'");
        }
    }

    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const json value = parse_scalar(item.substr(eq + 1));
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            if (!value.is_number()) throw UsageError("bad value for parameter '" + key + "'");
            cfg.params.set(key, value.get<double>());
            continue;
        }
        const std::string section = key.substr(0, dot);
        const std::string name = key.substr(dot + 1);
        if (section == "solver") apply_field(solver_fields(), cfg.solver, section, name, value);
        else if (section == "analysis") apply_field(analysis_fields(), cfg.analysis, section, name, value);
        else if (section == "oracle") apply_field(oracle_fields(), cfg.oracle, section, name, value);
        else throw UsageError("unknown key '" + key + "'");
    }
    cfg.solver.validate();
    if (cfg.workers < 1) throw UsageError("workers must be >= 1");
    if (cfg.oracle.start != "zero" && cfg.oracle.start != "pss") throw UsageError("oracle.start must be zero or pss");
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    json doc;
    doc["case"] = cfg.case_name;
    doc["set"] = json::object();
    for (const auto& [k, v] : cfg.params.values()) doc["set"][k] = v;
    doc["solver"] = dump_section(solver_fields(), cfg.solver);
    doc["analysis"] = dump_section(analysis_fields(), cfg.analysis);
    doc["oracle"] = dump_section(oracle_fields(), cfg.oracle);
    doc["workers"] = cfg.workers;
    if (cfg.axis1 || cfg.axis2) {
        doc["sweep"] = json::object();
        if (cfg.axis1) doc["sweep"]["axis1"] = dump_axis(*cfg.axis1);
        if (cfg.axis2) doc["sweep"]["axis2"] = dump_axis(*cfg.axis2);
    }
    return doc.dump(2);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic steady state, harmonic state-space stability and impedance analysis", "ltpkit"};
    app.require_subcommand(1);
    std::optional<std::string> case_flag;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::optional<int> workers;
    bool dump = false;
    app.add_option("--case", case_flag, "case1, case2 or path to a linear model JSON file");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--set", overrides, "override key=value (repeatable)")->allow_extra_args(false);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "sweep worker threads");
    app.add_flag("--dump-config", dump, "print the resolved config and exit");
    app.fallthrough();

    using Command = std::function<int(const RunConfig&, const fs::path&, std::ostream&, std::ostream&)>;
    const std::vector<std::pair<std::string, Command>> commands = {
        {"solve", cmd_solve}, {"eig", cmd_eig}, {"sweep", cmd_sweep}, {"impedance", cmd_impedance}, {"verify", cmd_verify}};
    const std::map<std::string, std::string> help = {
        {"solve", "periodic steady state: spectrum, waveforms, run report"},
        {"eig", "solve, then HSS eigenvalues and the weakest mode"},
        {"sweep", "two-parameter stability trait, region and boundary"},
        {"impedance", "harmonic transfer function scan of the open loop"},
        {"verify", "compare against time-domain integration"}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg = resolve_config(case_flag, config_path.empty() ? "" : read_file(config_path), overrides);
        if (workers) {
            if (*workers < 1) throw UsageError("workers must be >= 1");
            cfg.workers = *workers;
        }
        if (dump) {
            out << dump_config(cfg) << '\n';
            return kOk;
        }
        fs::create_directories(out_dir);
        for (const auto& [name, fn] : commands) {
            if (app.got_subcommand(name)) return fn(cfg, fs::path(out_dir), out, err);
        }
        return kConfigError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNotConverged;
    }
}

}  // namespace ltp::cli
