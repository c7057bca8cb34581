#include "frontlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "frontlab/error.hpp"

namespace frontlab {

using nlohmann::json;

const std::vector<KeySpec>& config_schema() {
    using T = ValueType;
    static const std::vector<KeySpec> schema = {
        {"model", "name", T::String, "fkpp", "registered model name"},
        {"model", "symbol", T::String, "", "user symbol P_0|P_1|...; replaces the registry model"},
        {"model", "jacobian", T::String, "", "user linearization J (with model.symbol)"},
        {"output", "out", T::String, "", "output directory"},
        {"output", "seed", T::Int, "0", "seed for randomized multi-starts"},
        {"tolerances", "newton", T::Real, "1e-10", "front Newton residual"},
        {"tolerances", "bvp", T::Real, "1e-10", "wave-train Newton residual"},
        {"tolerances", "root", T::Real, "1e-10", "double-root Newton residual"},
        {"speed", "c_lo", T::Real, "", "bracket lower end"},
        {"speed", "c_hi", T::Real, "", "bracket upper end"},
        {"speed", "include_multiple", T::Bool, "false", "accept DoubleDouble roots"},
        {"roots", "c", T::Real, "", "frame speed; defaults to c_lin"},
        {"spectrum", "c", T::Real, "0", "frame speed"},
        {"spectrum", "eta", T::Real, "0", "exponential weight"},
        {"spectrum", "k_max", T::Real, "5", "largest sampled wavenumber"},
        {"spectrum", "n_k", T::Int, "401", "number of sampled wavenumbers"},
        {"simulate", "L", T::Real, "300", "domain length"},
        {"simulate", "n", T::Int, "3001", "grid points"},
        {"simulate", "dt", T::Real, "0.05", "time step"},
        {"simulate", "t_end", T::Real, "100", "final time"},
        {"simulate", "bc", T::String, "invasion", "invasion | periodic"},
        {"simulate", "ic", T::String, "step", "step | negative_step | gaussian | zero"},
        {"simulate", "ic_width", T::Real, "10", "initial support width"},
        {"simulate", "ic_amplitude", T::Real, "1", "initial amplitude"},
        {"simulate", "comoving", T::Real, "", "run in a frame of this speed"},
        {"simulate", "threshold", T::Real, "0", "level-set threshold; 0 selects 10% of the wake"},
        {"simulate", "component", T::Int, "-1", "tracked component, -1 for the norm"},
        {"simulate", "envelope", T::Real, "0", "running-max window for oscillatory wakes"},
        {"simulate", "sample_interval", T::Real, "0.5", "track sampling interval"},
        {"simulate", "snapshots", T::RealList, "", "snapshot times"},
        {"simulate", "linear", T::Bool, "false", "integrate the linearization instead"},
        {"simulate", "parallel", T::Bool, "false", "OpenMP reaction kernels"},
        {"front", "mode", T::String, "free", "free | fixed | pulled"},
        {"front", "L", T::Real, "60", "domain length"},
        {"front", "h", T::Real, "0.05", "grid spacing"},
        {"front", "c", T::Real, "", "speed (fixed mode, pulled mode) or initial guess (free mode)"},
        {"front", "eta", T::Real, "", "leading-edge rate for pulled mode; defaults to eta_lin"},
        {"front", "steepness", T::Real, "0.7", "decay rate of the initial guess"},
        {"front", "phase_center", T::Real, "0.35", "phase window center as a fraction of L"},
        {"front", "spectrum", T::Bool, "false", "also compute the weighted front spectrum"},
        {"front", "weight", T::Real, "", "spectral weight; defaults to c/2"},
        {"front", "n_eigs", T::Int, "8", "eigenvalues reported"},
        {"front", "continue_param", T::String, "", "continue the free front in this parameter"},
        {"front", "continue_to", T::Real, "", "continuation end value"},
        {"front", "continue_steps", T::Int, "20", "continuation output points"},
        {"front", "arclength", T::Bool, "false", "pseudo-arclength continuation"},
        {"transition", "param", T::String, "", "family parameter"},
        {"transition", "lo", T::Real, "", "bracket lower end"},
        {"transition", "hi", T::Real, "", "bracket upper end"},
        {"transition", "L", T::Real, "80", "domain length"},
        {"wavenumber", "p", T::Int, "1", "resonance numerator"},
        {"wavenumber", "q", T::Int, "1", "resonance denominator"},
        {"wavenumber", "k_lo", T::Real, "", "curve range lower end; defaults to the unstable band"},
        {"wavenumber", "k_hi", T::Real, "", "curve range upper end"},
        {"wavenumber", "n_samples", T::Int, "61", "curve samples"},
        {"wavenumber", "n_per", T::Int, "64", "collocation points per period"},
        {"sweep", "command", T::String, "speed", "command mapped over the grid"},
        {"sweep", "grid", T::String, "", "name=lo:hi:n, several separated by ','"},
    };
    return schema;
}

namespace {

const KeySpec& spec_for(const std::string& section, const std::string& key) {
    for (const auto& s : config_schema())
        if (s.section == section && s.key == key) return s;
    throw Error(ErrorKind::ConfigError, "unknown key '" + section + "." + key + "'");
}

double parse_real(const std::string& s, const std::string& what) {
    std::string t = s;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw Error(ErrorKind::ConfigError, what + ": '" + s + "' is not a number");
    return v;
}

std::string canonical(const KeySpec& spec, const std::string& value) {
    const std::string what = spec.section + "." + spec.key;
    switch (spec.type) {
        case ValueType::Real:
            return format_real(parse_real(value, what));
        case ValueType::Int: {
            double v = parse_real(value, what);
            if (v != std::floor(v) || std::abs(v) > 2e9)
                throw Error(ErrorKind::ConfigError, what + ": '" + value + "' is not an integer");
            return std::to_string(static_cast<long long>(v));
        }
        case ValueType::Bool:
            if (value == "true" || value == "1" || value == "yes" || value == "on") return "true";
            if (value == "false" || value == "0" || value == "no" || value == "off") return "false";
            throw Error(ErrorKind::ConfigError, what + ": '" + value + "' is not a boolean");
        case ValueType::RealList: {
            std::string out;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.find_first_not_of(" \t") == std::string::npos) continue;
                if (!out.empty()) out += ",";
                out += format_real(parse_real(item, what));
            }
            return out;
        }
        case ValueType::String:
            return value;
    }
    return value;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

json typed(const KeySpec& spec, const std::string& v) {
    switch (spec.type) {
        case ValueType::Real: return parse_real(v, spec.key);
        case ValueType::Int: return std::stoll(v);
        case ValueType::Bool: return v == "true";
        case ValueType::RealList: {
            json arr = json::array();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) arr.push_back(parse_real(item, spec.key));
            return arr;
        }
        case ValueType::String: return v;
    }
    return v;
}

std::string untyped(const std::string& what, const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number()) return format_real(j.get<double>());
    if (j.is_array()) {
        std::string out;
        for (const auto& e : j) {
            if (!e.is_number()) throw Error(ErrorKind::ConfigError, what + ": list entries must be numbers");
            if (!out.empty()) out += ",";
            out += format_real(e.get<double>());
        }
        return out;
    }
    throw Error(ErrorKind::ConfigError, what + ": unsupported JSON value");
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    if (section == "params") {
        set_param(key, parse_real(value, "params." + key));
        return;
    }
    const KeySpec& spec = spec_for(section, key);
    values_[section][key] = canonical(spec, trim(value));
}

void RunConfig::set_param(const std::string& name, double value) {
    if (name.empty()) throw Error(ErrorKind::ConfigError, "empty parameter name");
    params_[name] = value;
}

void RunConfig::unset(const std::string& section, const std::string& key) {
    auto it = values_.find(section);
    if (it != values_.end()) it->second.erase(key);
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto it = values_.find(section);
    if (it != values_.end() && it->second.count(key)) return true;
    return !spec_for(section, key).fallback.empty();
}

std::string RunConfig::str(const std::string& section, const std::string& key) const {
    const KeySpec& spec = spec_for(section, key);
    auto it = values_.find(section);
    if (it != values_.end()) {
        auto jt = it->second.find(key);
        if (jt != it->second.end()) return jt->second;
    }
    if (spec.fallback.empty() && spec.type != ValueType::String && spec.type != ValueType::RealList)
        throw Error(ErrorKind::ConfigError, section + "." + key + " is required here");
    return spec.fallback;
}

double RunConfig::real(const std::string& section, const std::string& key) const {
    return parse_real(str(section, key), section + "." + key);
}

int RunConfig::integer(const std::string& section, const std::string& key) const {
    return static_cast<int>(std::stoll(str(section, key)));
}

bool RunConfig::boolean(const std::string& section, const std::string& key) const { return str(section, key) == "true"; }

std::vector<double> RunConfig::reals(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(section, key));
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_real(item, section + "." + key));
    return out;
}

json RunConfig::to_json(bool resolved) const {
    json j = json::object();
    if (resolved)
        for (const auto& s : config_schema())
            if (!s.fallback.empty()) j[s.section][s.key] = typed(s, s.fallback);
    for (const auto& [section, kv] : values_)
        for (const auto& [k, v] : kv) j[section][k] = typed(spec_for(section, k), v);
    for (const auto& [k, v] : params_) j["params"][k] = v;
    return j;
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    bool first = true;
    auto header = [&](const std::string& s) {
        if (!first) os << "\n";
        first = false;
        os << "[" << s << "]\n";
    };
    for (const auto& [section, kv] : values_) {
        if (kv.empty()) continue;
        header(section);
        for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
    }
    if (!params_.empty()) {
        header("params");
        for (const auto& [k, v] : params_) os << k << " = " << format_real(v) << "\n";
    }
    return os.str();
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, "configuration must be a JSON object");
    RunConfig cfg;
    for (const auto& [section, kv] : j.items()) {
        if (!kv.is_object()) throw Error(ErrorKind::ConfigError, "section '" + section + "' must be an object");
        for (const auto& [k, v] : kv.items()) {
            if (section == "params") {
                if (!v.is_number()) throw Error(ErrorKind::ConfigError, "params." + k + " must be a number");
                cfg.set_param(k, v.get<double>());
            } else {
                cfg.set(section, k, untyped(section + "." + k, v));
            }
        }
    }
    return cfg;
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": key outside a section");
        try {
            cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
        }
        return from_json(j);
    }
    return from_text(text);
}

void RunConfig::validate() const {
    if (!str("model", "symbol").empty()) {
        if (!params_.empty()) throw Error(ErrorKind::ConfigError, "user symbols take no parameters");
        return;
    }
    ParamMap defaults = default_params(str("model", "name"));
    for (const auto& [k, v] : params_)
        if (!defaults.count(k))
            throw Error(ErrorKind::ConfigError, "model '" + str("model", "name") + "' has no parameter '" + k + "'");
}

std::vector<Mat> parse_matrices(const std::string& text) {
    std::vector<Mat> out;
    std::stringstream ms(text);
    std::string mtext;
    while (std::getline(ms, mtext, '|')) {
        std::vector<std::vector<double>> rows;
        std::stringstream rs(mtext);
        std::string rtext;
        while (std::getline(rs, rtext, ';')) {
            std::vector<double> row;
            std::stringstream es(rtext);
            std::string e;
            while (std::getline(es, e, ','))
                if (!trim(e).empty()) row.push_back(parse_real(e, "matrix entry"));
            if (!row.empty()) rows.push_back(row);
        }
        if (rows.empty()) throw Error(ErrorKind::ConfigError, "empty matrix in '" + text + "'");
        Mat M(rows.size(), rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size()) throw Error(ErrorKind::ConfigError, "ragged matrix in '" + text + "'");
            for (size_t k = 0; k < rows[i].size(); ++k) M(i, k) = rows[i][k];
        }
        if (M.rows() != M.cols()) throw Error(ErrorKind::ConfigError, "matrices must be square");
        out.push_back(M);
    }
    return out;
}

ModelSpec resolve_model(const RunConfig& cfg) {
    cfg.validate();
    std::string sym = cfg.str("model", "symbol");
    if (sym.empty()) return get_model(cfg.str("model", "name"), cfg.params());
    std::vector<Mat> P = parse_matrices(sym);
    const long N = P[0].rows();
    for (const Mat& m : P)
        if (m.rows() != N) throw Error(ErrorKind::ConfigError, "symbol coefficients differ in size");
    std::string jt = cfg.str("model", "jacobian");
    Mat J = jt.empty() ? Mat::Zero(N, N) : parse_matrices(jt).at(0);
    if (J.rows() != N) throw Error(ErrorKind::ConfigError, "jacobian size does not match the symbol");
    return user_model("user", MatrixPolynomial(P, J));
}

}  // namespace frontlab
