// Copyright 2026 The certgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "certgate/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "certgate/config.hpp"

namespace certgate {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string herald_name(HeraldKind kind) {
    switch (kind) {
        case HeraldKind::none: return "none";
        case HeraldKind::error: return "error";
        case HeraldKind::false_positive: return "false_positive";
    }
    return "unknown";
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json statistics_json(const EnsembleStatistics& s) {
    json j;
    j["trials"] = s.trials;
    j["mode"] = to_string(s.mode);
    j["herald_rate"] = s.herald_rate;
    j["herald_rate_se"] = s.herald_rate_se;
    j["wilson_low"] = s.wilson_low;
    j["wilson_high"] = s.wilson_high;
    j["no_flag_probability"] = s.no_flag_probability;
    j["conditional_fidelity_defined"] = s.conditional_fidelity.has_value();
    j["conditional_fidelity"] = optional_number(s.conditional_fidelity);
    j["conditional_fidelity_se"] = s.conditional_fidelity_se;
    j["min_conditional_fidelity"] = optional_number(s.min_conditional_fidelity);
    j["unconditional_fidelity"] = s.unconditional_fidelity;
    j["unconditional_fidelity_se"] = s.unconditional_fidelity_se;
    j["clamp_count"] = s.clamp_count;
    j["rms_delta_pi"] = s.rms_delta_pi;
    j["analytic_flag_probability"] = s.analytic_flag_probability;
    j["approx_flag_probability"] = s.approx_flag_probability;
    j["transfer_flags"] = s.transfer_flags;
    json channels = json::array();
    for (const auto& c : s.channels) {
        channels.push_back({{"transfer", c.key.transfer + 1},
                            {"ion", c.key.ion},
                            {"flagged", c.flagged},
                            {"reached", c.reached},
                            {"rate", c.rate}});
    }
    j["channels"] = channels;
    return j;
}

class Table {
public:
    Table(const json& config, std::vector<std::string> header) : columns_(header.size()) {
        text_ << "# config=" << config.dump() << "\n";
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("table row has the wrong width");
        for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
        text_ << "\n";
    }
    std::string str() const { return text_.str(); }

private:
    std::size_t columns_;
    std::ostringstream text_;
};

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }
    void write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + p.string());
        written_.push_back(name);
    }
    const fs::path& path() const { return dir_; }
    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

std::string trajectories_csv(const json& config, const EnsembleRun& run, int n_transfers) {
    std::vector<std::string> header{"trajectory"};
    for (int k = 0; k < n_transfers; ++k) header.push_back("delta_pi_" + std::to_string(k + 1));
    for (const char* h : {"clamped", "flag_probability", "flag_transfer", "flag_ion", "conditional_fidelity",
                          "unconditional_fidelity"}) {
        header.emplace_back(h);
    }
    for (const auto& c : run.channels) {
        header.push_back("flag_t" + std::to_string(c.transfer + 1) + "_ion" + std::to_string(c.ion));
    }
    Table t(config, header);
    for (const auto& r : run.trajectories) {
        std::vector<std::string> cells{std::to_string(r.index)};
        for (double e : r.errors) cells.push_back(num(e));
        cells.push_back(std::to_string(r.clamped));
        cells.push_back(num(r.flag_probability));
        cells.push_back(r.flag_transfer < 0 ? "" : std::to_string(r.flag_transfer + 1));
        cells.push_back(r.flag_ion < 0 ? "" : std::to_string(r.flag_ion));
        cells.push_back(r.conditional_fidelity ? num(*r.conditional_fidelity) : "undefined");
        cells.push_back(num(r.unconditional_fidelity));
        for (double f : r.channel_flags) cells.push_back(num(f));
        t.row(cells);
    }
    return t.str();
}

std::string channels_csv(const json& config, const EnsembleStatistics& s) {
    Table t(config, {"transfer", "ion", "flagged", "reached", "rate"});
    for (const auto& c : s.channels) {
        t.row({std::to_string(c.key.transfer + 1), std::to_string(c.key.ion), num(c.flagged), num(c.reached),
               num(c.rate)});
    }
    return t.str();
}

std::string transfers_csv(const json& config, const EnsembleStatistics& s) {
    Table t(config, {"transfer", "flagged"});
    for (std::size_t k = 0; k < s.transfer_flags.size(); ++k) t.row({std::to_string(k + 1), num(s.transfer_flags[k])});
    return t.str();
}

json branches_json(const ProtocolOutcome& outcome) {
    json arr = json::array();
    for (const auto& b : outcome.branches) {
        json j{{"probability", b.probability}, {"flagged", b.flagged}, {"herald", herald_name(b.herald)}};
        j["transfer"] = b.flag_transfer < 0 ? json(nullptr) : json(b.flag_transfer + 1);
        j["ion"] = b.flag_ion < 0 ? json(nullptr) : json(b.flag_ion);
        arr.push_back(j);
    }
    return arr;
}

std::string branches_csv(const json& config, const ProtocolOutcome& outcome) {
    Table t(config, {"branch", "probability", "flagged", "herald", "transfer", "ion"});
    for (std::size_t i = 0; i < outcome.branches.size(); ++i) {
        const auto& b = outcome.branches[i];
        t.row({std::to_string(i), num(b.probability), b.flagged ? "1" : "0", herald_name(b.herald),
               b.flag_transfer < 0 ? "" : std::to_string(b.flag_transfer + 1),
               b.flag_ion < 0 ? "" : std::to_string(b.flag_ion)});
    }
    return t.str();
}

std::string state_csv(const json& config, const PureState& state, const PureState& ideal) {
    const StateSpace& space = state.space();
    std::vector<std::string> header;
    for (int ion = 0; ion < space.n_ions(); ++ion) header.push_back("ion" + std::to_string(ion));
    for (const char* h : {"fock", "re", "im", "population", "ideal_re", "ideal_im"}) header.emplace_back(h);
    Table t(config, header);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        const Complex a = state[i];
        const Complex b = ideal[i];
        if (a == Complex(0.0) && b == Complex(0.0)) continue;
        std::vector<std::string> cells;
        for (int ion = 0; ion < space.n_ions(); ++ion) cells.push_back(level_name(space.level_of(i, ion)));
        cells.push_back(std::to_string(space.fock_of(i)));
        for (double x : {a.real(), a.imag(), std::norm(a), b.real(), b.imag()}) cells.push_back(num(x));
        t.row(cells);
    }
    return t.str();
}

json state_json(const PureState& state) {
    json arr = json::array();
    const StateSpace& space = state.space();
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        const Complex a = state[i];
        if (a == Complex(0.0)) continue;
        arr.push_back({{"basis", space.label(i)}, {"re", a.real()}, {"im", a.imag()}});
    }
    return arr;
}

struct Invocation {
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string mode;
    std::string parameter;
    std::vector<double> values;
    unsigned workers = 0;
    bool quiet = false;
    bool has_seed = false;
    bool has_trials = false;
    bool has_mode = false;
    bool has_parameter = false;
    bool has_values = false;
};

RunConfig resolve(const Invocation& inv) {
    json doc = inv.config_path.empty() ? json::object() : load_config_document(inv.config_path);
    if (!doc.is_object()) throw ConfigError("/", "expected an object at the top level");
    std::string hint;
    if (inv.command == "sweep") {
        if (inv.has_parameter) doc["sweep"]["parameter"] = inv.parameter;
        if (inv.has_values) doc["sweep"]["values"] = inv.values;
        if (!doc.contains("sweep")) throw ConfigError("/sweep", "the sweep command needs a sweep section or --parameter/--values");
    } else {
        if (doc.contains("protocol") && doc["protocol"] != inv.command) {
            throw ConfigError("/protocol", "config is for protocol " + doc["protocol"].dump() + " but the command is " +
                                               inv.command);
        }
        if (doc.contains("sweep")) throw ConfigError("/sweep", "sweeps run through the sweep command");
        hint = inv.command;
    }
    if (inv.has_seed) doc["seed"] = inv.seed;
    if (inv.has_trials) doc["trials"] = inv.trials;
    if (inv.has_mode) doc["mode"] = inv.mode;
    return parse_config(doc, hint);
}

void run_single_protocol(const std::string& command, const RunConfig& cfg, const json& resolved, unsigned workers,
                         OutputDir& dir, json& summary) {
    const ExperimentSpec& spec = cfg.experiment;
    const EnsembleRun run = run_ensemble_detailed(spec, workers);
    summary["statistics"] = statistics_json(run.statistics);
    if (command == "single") {
        const CertifiedVsBare c = compare_certified_vs_bare(spec, workers);
        summary["comparison"] = {{"certified_herald_rate", c.certified_herald_rate},
                                 {"certified_herald_rate_se", c.certified_herald_rate_se},
                                 {"certified_conditional_infidelity", c.certified_conditional_infidelity},
                                 {"bare_infidelity", c.bare_infidelity},
                                 {"bare_infidelity_se", c.bare_infidelity_se},
                                 {"ratio", std::isnan(c.ratio) ? json(nullptr) : json(c.ratio)},
                                 {"rms_delta_pi", c.rms_delta_pi}};
    }
    const ProtocolBranch* nf = run.first_outcome.no_flag();
    if (cfg.output.branch_table) {
        summary["branches"] = branches_json(run.first_outcome);
        summary["final_state"] = nf ? state_json(*nf->state) : json(nullptr);
        dir.write("branches.csv", branches_csv(resolved, run.first_outcome));
        if (nf) {
            const PureState input = prepare_input(spec);
            dir.write("state.csv", state_csv(resolved, *nf->state, ideal_output(spec, input)));
        }
    }
    if (cfg.output.trajectory_table) {
        dir.write("trajectories.csv", trajectories_csv(resolved, run, spec.n_transfers()));
    }
    dir.write("channels.csv", channels_csv(resolved, run.statistics));
    dir.write("transfers.csv", transfers_csv(resolved, run.statistics));
}

void run_sweep(const RunConfig& cfg, const json& resolved, unsigned workers, OutputDir& dir, json& summary) {
    const std::vector<SweepRow> rows = sweep(cfg.experiment, cfg.sweep->parameter, cfg.sweep->values, workers);
    Table t(resolved, {cfg.sweep->parameter, "herald_rate", "herald_rate_se", "wilson_low", "wilson_high",
                       "no_flag_probability", "conditional_fidelity", "min_conditional_fidelity",
                       "unconditional_fidelity", "rms_delta_pi", "analytic_flag_probability",
                       "approx_flag_probability", "clamp_count"});
    json arr = json::array();
    for (const auto& r : rows) {
        const auto& s = r.statistics;
        t.row({num(r.value), num(s.herald_rate), num(s.herald_rate_se), num(s.wilson_low), num(s.wilson_high),
               num(s.no_flag_probability), s.conditional_fidelity ? num(*s.conditional_fidelity) : "undefined",
               s.min_conditional_fidelity ? num(*s.min_conditional_fidelity) : "undefined",
               num(s.unconditional_fidelity), num(s.rms_delta_pi), num(s.analytic_flag_probability),
               num(s.approx_flag_probability), std::to_string(s.clamp_count)});
        arr.push_back({{"value", r.value}, {"statistics", statistics_json(s)}});
    }
    summary["rows"] = arr;
    dir.write("sweep.csv", t.str());
}

int execute(const Invocation& inv, std::ostream& out) {
    const RunConfig cfg = resolve(inv);
    const json resolved = to_json(cfg);
    const fs::path out_dir = !inv.out_dir.empty()        ? fs::path(inv.out_dir)
                             : !cfg.output.dir.empty() ? fs::path(cfg.output.dir)
                                                       : fs::path(default_output_dir());
    const unsigned workers = inv.workers ? inv.workers : std::max(1U, std::thread::hardware_concurrency());

    if (!inv.quiet) out << "resolved config:\n" << resolved.dump(2) << "\n";

    OutputDir dir(out_dir);
    json summary;
    summary["command"] = inv.command;
    summary["config"] = resolved;
    summary["seed"] = cfg.experiment.master_seed;
    if (inv.command == "sweep") {
        run_sweep(cfg, resolved, workers, dir, summary);
    } else {
        run_single_protocol(inv.command, cfg, resolved, workers, dir, summary);
    }
    dir.write("summary.json", summary.dump(2) + "\n");

    if (!inv.quiet) {
        if (summary.contains("statistics")) {
            const json& s = summary["statistics"];
            out << "herald_rate " << num(s["herald_rate"].get<double>()) << " +- "
                << num(s["herald_rate_se"].get<double>()) << "\n";
            out << "no_flag_probability " << num(s["no_flag_probability"].get<double>()) << "\n";
            out << "conditional_fidelity "
                << (s["conditional_fidelity"].is_null() ? "undefined" : num(s["conditional_fidelity"].get<double>()))
                << "\n";
        }
        for (const auto& name : dir.written()) out << "wrote " << (dir.path() / name).string() << "\n";
    }
    return kExitOk;
}

}  // namespace

std::string default_output_dir() {
    if (const char* env = std::getenv("CERTGATE_OUT_DIR"); env && *env) return env;
    return "certgate-out";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified trapped-ion gates under pulse-area errors", "certgate"};
    app.require_subcommand(1);
    Invocation inv;

    struct Bound {
        CLI::App* app;
        CLI::Option* seed;
        CLI::Option* trials;
        CLI::Option* mode;
        CLI::Option* parameter = nullptr;
        CLI::Option* values = nullptr;
    };
    std::vector<Bound> subs;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"single", "certified single-qubit gate"},
        {"cz", "certified Cirac-Zoller CZ gate"},
        {"addressing", "addressed gate with crosstalk certification"},
        {"sweep", "one ensemble per parameter value"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", inv.config_path, "JSON config, or a summary.json to re-run")
            ->check(CLI::ExistingFile);
        sub->add_option("--out,-o", inv.out_dir, "output directory");
        sub->add_option("--workers,-j", inv.workers, "worker threads (results do not depend on it)");
        sub->add_flag("--quiet,-q", inv.quiet, "do not echo the resolved config");
        Bound b{sub, sub->add_option("--seed", inv.seed, "master seed"),
                sub->add_option("--trials", inv.trials, "number of trajectories"),
                sub->add_option("--mode", inv.mode, "branch | mc")->check(CLI::IsMember({"branch", "mc"}))};
        if (name == "sweep") {
            b.parameter = sub->add_option("--parameter", inv.parameter,
                                          "delta_pi | sigma | selectivity | r_neighbor | theta_gate");
            b.values = sub->add_option("--values", inv.values, "comma-separated values")->delimiter(',');
        }
        subs.push_back(b);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    for (const Bound& b : subs) {
        if (!b.app->parsed()) continue;
        inv.command = b.app->get_name();
        inv.has_seed = b.seed->count() > 0;
        inv.has_trials = b.trials->count() > 0;
        inv.has_mode = b.mode->count() > 0;
        inv.has_parameter = b.parameter && b.parameter->count() > 0;
        inv.has_values = b.values && b.values->count() > 0;
    }

    try {
        return execute(inv, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace certgate
