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

#include "certgate/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace certgate {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects anything it was not asked for.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* find(const std::string& key) {
        allowed_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ConfigError(at(key), "expected a number");
        return v->get<double>();
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v->get<long long>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(at(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
            out.push_back((*v)[i].get<double>());
        }
        return out;
    }

    /// Rejects keys never requested, and keys in `not_applicable`.
    void finish(const std::set<std::string>& not_applicable = {}, const std::string& context = "") const {
        for (const auto& [key, value] : obj_.items()) {
            if (not_applicable.count(key)) throw ConfigError(at(key), "key '" + key + "' is not applicable " + context);
            if (!allowed_.count(key)) throw ConfigError(at(key), "unknown key '" + key + "'");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> allowed_;
};

template <typename Fn>
auto domain(const std::string& where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
}

AmplitudeErrorModel parse_error_model(const json& doc) {
    ObjectReader r(doc, "/error_model");
    const std::string kind_name = r.string("kind", "constant");
    AmplitudeErrorModel m;
    m.kind = domain(r.at("kind"), [&] { return error_kind_from_string(kind_name); });
    using K = AmplitudeErrorModel::Kind;
    switch (m.kind) {
        case K::constant: m.delta_pi = r.number("delta_pi", 0.0); break;
        case K::gaussian_iid: m.sigma = r.number("sigma", 0.0); break;
        case K::linear_drift:
            m.delta_pi = r.number("delta_pi", 0.0);
            m.slope = r.number("slope", 0.0);
            break;
        case K::random_walk:
            m.delta_pi = r.number("delta_pi", 0.0);
            m.sigma = r.number("sigma", 0.0);
            break;
    }
    r.finish();
    domain("/error_model", [&] { m.validate(); });
    return m;
}

InputSpec parse_input(const json& doc, int n_ions) {
    ObjectReader r(doc, "/input_state");
    InputSpec in;
    const std::string kind_name = r.string("kind", "basis");
    in.kind = domain(r.at("kind"), [&] { return input_kind_from_string(kind_name); });
    if (in.kind == InputSpec::Kind::basis) {
        in.label = r.string("label", std::string(static_cast<std::size_t>(n_ions), '0'));
    } else {
        in.label.clear();
    }
    if (in.kind == InputSpec::Kind::amplitudes) {
        const json* amps = r.find("amplitudes");
        if (!amps || !amps->is_array()) throw ConfigError(r.at("amplitudes"), "expected an array of amplitudes");
        for (std::size_t i = 0; i < amps->size(); ++i) {
            const json& a = (*amps)[i];
            const std::string where = r.at("amplitudes") + "/" + std::to_string(i);
            if (a.is_number()) {
                in.amplitudes.emplace_back(a.get<double>(), 0.0);
            } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
                in.amplitudes.emplace_back(a[0].get<double>(), a[1].get<double>());
            } else {
                throw ConfigError(where, "expected a number or [re, im]");
            }
        }
    }
    r.finish();
    return in;
}

std::string field_of(const std::string& message) {
    const auto colon = message.find(':');
    if (colon == std::string::npos || message.find(' ') < colon) return "/";
    std::string field = message.substr(0, colon);
    std::replace(field.begin(), field.end(), '.', '/');
    return "/" + field;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::string& protocol_hint) {
    ObjectReader r(doc, "");
    RunConfig cfg;
    ExperimentSpec& e = cfg.experiment;

    const std::string protocol_name = r.string("protocol", protocol_hint.empty() ? "single" : protocol_hint);
    e.protocol = domain(r.at("protocol"), [&] { return protocol_from_string(protocol_name); });

    if (const json* g = r.find("gate")) {
        ObjectReader gr(*g, "/gate");
        e.gate.axis.theta = gr.number("theta", 0.0);
        e.gate.axis.phi = gr.number("phi", 0.0);
        e.gate.angle = gr.number("angle", 0.0);
        gr.finish();
    }
    if (const json* m = r.find("error_model")) e.error_model = parse_error_model(*m);
    e.selectivity = r.number("selectivity", 1.0);

    const long long trials = r.integer("trials", 1);
    if (trials < 1 || trials > 100000000) throw ConfigError(r.at("trials"), "must lie in [1, 1e8]");
    e.trials = static_cast<int>(trials);
    e.master_seed = r.unsigned_integer("seed", 0);
    const std::string mode = r.string("mode", "branch");
    e.mode = domain(r.at("mode"), [&] { return execution_mode_from_string(mode); });

    std::set<std::string> not_applicable;
    if (e.protocol == ProtocolKind::cz) {
        const long long cutoff = r.integer("fock_cutoff", kDefaultFockCutoff);
        if (cutoff < 0 || cutoff > 16) throw ConfigError(r.at("fock_cutoff"), "must lie in [0, 16]");
        e.fock_cutoff = static_cast<int>(cutoff);
    } else {
        not_applicable.insert("fock_cutoff");
    }
    if (e.protocol == ProtocolKind::addressing) {
        const long long n = r.integer("n_ions", 3);
        if (n < 1 || n > kMaxIons) throw ConfigError(r.at("n_ions"), "must lie in [1, 4]");
        e.n_ions = static_cast<int>(n);
        const long long target = r.integer("target", std::min<long long>(1, n - 1));
        if (target < 0 || target >= n) throw ConfigError(r.at("target"), "must be a valid ion index");
        e.target = static_cast<int>(target);
        std::vector<double> ratios(static_cast<std::size_t>(n), 0.0);
        ratios[static_cast<std::size_t>(target)] = 1.0;
        e.crosstalk = r.numbers("crosstalk", ratios);
    } else {
        not_applicable.insert({"n_ions", "target", "crosstalk"});
        e.n_ions = 1;
        e.target = 0;
    }

    const int n_ions = e.protocol == ProtocolKind::cz ? 2 : e.n_ions;
    if (const json* in = r.find("input_state")) {
        e.input = parse_input(*in, n_ions);
    } else {
        e.input.label = std::string(static_cast<std::size_t>(n_ions), '0');
    }

    if (const json* s = r.find("sweep")) {
        ObjectReader sr(*s, "/sweep");
        SweepSpec sweep;
        sweep.parameter = sr.string("parameter", "");
        if (sweep.parameter.empty()) throw ConfigError(sr.at("parameter"), "missing sweep parameter");
        sweep.values = sr.numbers("values", {});
        if (sweep.values.empty()) throw ConfigError(sr.at("values"), "needs at least one value");
        sr.finish();
        for (std::size_t i = 0; i < sweep.values.size(); ++i) {
            const std::string where = sr.at("values") + "/" + std::to_string(i);
            domain(where, [&] { with_parameter(e, sweep.parameter, sweep.values[i]).validate(); });
        }
        cfg.sweep = std::move(sweep);
    }
    if (const json* o = r.find("output")) {
        ObjectReader orr(*o, "/output");
        cfg.output.dir = orr.string("dir", "");
        cfg.output.branch_table = orr.boolean("branch_table", true);
        cfg.output.trajectory_table = orr.boolean("trajectory_table", true);
        orr.finish();
    }
    r.finish(not_applicable, "to protocol " + to_string(e.protocol));

    try {
        e.validate();
    } catch (const std::invalid_argument& ex) {
        const std::string message = ex.what();
        const std::string field = field_of(message);
        throw ConfigError(field, field == "/" ? message : message.substr(message.find(':') + 2));
    }
    return cfg;
}

json load_config_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col), "malformed JSON");
    }
    if (doc.is_object() && doc.contains("config") && doc.contains("command")) return doc["config"];
    return doc;
}

json to_json(const ExperimentSpec& e) {
    json j;
    j["protocol"] = to_string(e.protocol);
    j["gate"] = {{"theta", e.gate.axis.theta}, {"phi", e.gate.axis.phi}, {"angle", e.gate.angle}};
    json m;
    m["kind"] = to_string(e.error_model.kind);
    using K = AmplitudeErrorModel::Kind;
    switch (e.error_model.kind) {
        case K::constant: m["delta_pi"] = e.error_model.delta_pi; break;
        case K::gaussian_iid: m["sigma"] = e.error_model.sigma; break;
        case K::linear_drift:
            m["delta_pi"] = e.error_model.delta_pi;
            m["slope"] = e.error_model.slope;
            break;
        case K::random_walk:
            m["delta_pi"] = e.error_model.delta_pi;
            m["sigma"] = e.error_model.sigma;
            break;
    }
    j["error_model"] = m;
    j["selectivity"] = e.selectivity;
    json in;
    in["kind"] = to_string(e.input.kind);
    if (e.input.kind == InputSpec::Kind::basis) in["label"] = e.input.label;
    if (e.input.kind == InputSpec::Kind::amplitudes) {
        json amps = json::array();
        for (Complex a : e.input.amplitudes) amps.push_back({a.real(), a.imag()});
        in["amplitudes"] = amps;
    }
    j["input_state"] = in;
    j["trials"] = e.trials;
    j["seed"] = e.master_seed;
    j["mode"] = to_string(e.mode);
    if (e.protocol == ProtocolKind::cz) j["fock_cutoff"] = e.fock_cutoff;
    if (e.protocol == ProtocolKind::addressing) {
        j["n_ions"] = e.n_ions;
        j["target"] = e.target;
        j["crosstalk"] = e.crosstalk;
    }
    return j;
}

ExperimentSpec experiment_from_json(const json& doc) { return parse_config(doc).experiment; }

json to_json(const RunConfig& config) {
    json j = to_json(config.experiment);
    if (config.sweep) j["sweep"] = {{"parameter", config.sweep->parameter}, {"values", config.sweep->values}};
    j["output"] = {{"branch_table", config.output.branch_table}, {"trajectory_table", config.output.trajectory_table}};
    return j;
}

}  // namespace certgate
