#include "vistra/jsonl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "vistra/error.hpp"

namespace vistra::io {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<double> number_array(const ojson& arr, const std::string& what) {
    if (!arr.is_array()) throw DataError(what + " must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw DataError(what + "[" + std::to_string(i) + "] is not a number");
        out.push_back(arr[i].get<double>());
    }
    return out;
}

MultiChannelSignal from_json(const ojson& j, std::size_t index) {
    if (!j.is_object()) throw DataError("record is not a JSON object");
    MultiChannelSignal s;
    if (j.contains("id")) {
        if (!j["id"].is_string()) throw DataError("'id' must be a string");
        s.id = j["id"].get<std::string>();
    } else {
        s.id = "s" + std::to_string(index);
    }
    if (!j.contains("label") || !j["label"].is_string()) throw DataError("'label' must be a string");
    s.label = j["label"].get<std::string>();
    if (!j.contains("snr_db")) throw DataError("'snr_db' is required (number or null)");
    if (j["snr_db"].is_number()) {
        s.snr_db = j["snr_db"].get<double>();
    } else if (!j["snr_db"].is_null()) {
        throw DataError("'snr_db' must be a number or null");
    }
    if (!j.contains("dt") || !j["dt"].is_number()) throw DataError("'dt' must be a number");
    const double dt = j["dt"].get<double>();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DataError("'dt' must be positive");
    double t0 = 0.0;
    if (j.contains("t0")) {
        if (!j["t0"].is_number()) throw DataError("'t0' must be a number");
        t0 = j["t0"].get<double>();
    }
    if (!j.contains("channels") || !j["channels"].is_object() || j["channels"].empty()) {
        throw DataError("'channels' must be a non-empty object");
    }
    const ojson* times = nullptr;
    if (j.contains("t")) {
        if (!j["t"].is_object()) throw DataError("'t' must be an object");
        times = &j["t"];
    }
    for (const auto& [name, arr] : j["channels"].items()) {
        auto values = number_array(arr, "channels." + name);
        try {
            if (times && times->contains(name)) {
                s.add_channel(name, TimeSeries::with_times(std::move(values), number_array((*times)[name], "t." + name), dt));
            } else {
                s.add_channel(name, TimeSeries(std::move(values), dt, t0));
            }
        } catch (const std::invalid_argument& e) {
            throw DataError("channel '" + name + "': " + e.what());
        }
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    return s;
}

}  // namespace

MultiChannelSignal parse_signal(const std::string& line, std::size_t index) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    return from_json(j, index);
}

std::string format_signal(const MultiChannelSignal& s) {
    ojson j;
    j["id"] = s.id;
    j["label"] = s.label;
    j["snr_db"] = s.snr_db ? ojson(*s.snr_db) : ojson(nullptr);
    j["dt"] = s.channels.empty() ? 1.0 : s.channels.front().dt();
    bool any_times = false;
    if (!s.channels.empty() && !s.channels.front().has_explicit_times() && s.channels.front().t0() != 0.0) {
        j["t0"] = s.channels.front().t0();
    }
    ojson ch = ojson::object();
    ojson ts = ojson::object();
    for (std::size_t i = 0; i < s.channels.size(); ++i) {
        const auto v = s.channels[i].values();
        ch[s.channel_names[i]] = std::vector<double>(v.begin(), v.end());
        if (s.channels[i].has_explicit_times()) {
            const auto t = s.channels[i].explicit_times();
            ts[s.channel_names[i]] = std::vector<double>(t.begin(), t.end());
            any_times = true;
        }
    }
    j["channels"] = ch;
    if (any_times) j["t"] = ts;
    return j.dump();
}

std::vector<MultiChannelSignal> read_signals(std::istream& in) {
    std::vector<MultiChannelSignal> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_signal(line, out.size()));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<MultiChannelSignal> read_signals(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path.string());
    try {
        return read_signals(f);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_signals(const std::vector<MultiChannelSignal>& signals, std::ostream& out) {
    for (const auto& s : signals) out << format_signal(s) << '\n';
}

void write_signals(const std::vector<MultiChannelSignal>& signals, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    write_signals(signals, f);
}

ValidationResult validate_signals(std::istream& in, const ValidationOptions& opts) {
    ValidationResult res;
    std::string line;
    std::size_t lineno = 0;
    const std::set<std::string> allowed(opts.allowed_labels.begin(), opts.allowed_labels.end());
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto err = [&](const std::string& msg) { res.errors.push_back("line " + std::to_string(lineno) + ": " + msg); };
        try {
            const auto s = parse_signal(line, res.records);
            ++res.records;
            if (!seen_ids.insert(s.id).second) err("duplicate id '" + s.id + "'");
            if (!allowed.empty() && !allowed.count(s.label)) err("label '" + s.label + "' not allowed");
            for (const auto& name : opts.expect_channels) {
                if (!s.find_channel(name)) err("missing channel '" + name + "'");
            }
            if (opts.expect_length) {
                for (std::size_t i = 0; i < s.channels.size(); ++i) {
                    if (s.channels[i].size() != *opts.expect_length) {
                        err("channel '" + s.channel_names[i] + "' has length " + std::to_string(s.channels[i].size()) +
                            ", expected " + std::to_string(*opts.expect_length));
                    }
                }
            }
        } catch (const DataError& e) {
            ++res.records;
            err(e.what());
        }
    }
    return res;
}

}  // namespace vistra::io
