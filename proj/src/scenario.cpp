#include "sbpc/scenario.hpp"

#include "sbpc/sim_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sbpc {

namespace {

std::string join_errors(const std::vector<std::string>& errors)
{
    std::string out = "scenario validation failed:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
}

} // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors))
{
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct RawScenario {
    // section -> key -> value, insertion order preserved per section
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
};

RawScenario tokenize(const std::string& text, const std::string& source, std::vector<std::string>& errors)
{
    RawScenario raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(source + ":" + std::to_string(lineno) + ": malformed section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            raw.sections.try_emplace(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(source + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
            continue;
        }
        if (section.empty()) {
            errors.push_back(source + ":" + std::to_string(lineno) + ": key outside any [section]");
            continue;
        }
        raw.sections[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return raw;
}

// Typed key extraction over one section with error collection and
// unknown-key detection.
class SectionReader {
public:
    SectionReader(const RawScenario& raw, std::string section, std::vector<std::string>& errors)
        : section_(std::move(section)), errors_(errors)
    {
        auto it = raw.sections.find(section_);
        if (it != raw.sections.end()) {
            present_ = true;
            for (const auto& [k, v] : it->second) {
                if (!entries_.emplace(k, v).second)
                    fail(k, "duplicate key");
            }
        }
    }

    bool present() const { return present_; }

    void finish()
    {
        for (const auto& [k, v] : entries_)
            if (!consumed_.count(k)) fail(k, "unknown key");
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        return v == nullptr ? fallback : *v;
    }

    double get_double(const std::string& key, double fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        if (v == nullptr) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            if (!std::isfinite(d) && *v != "inf") throw std::invalid_argument("");
            return d;
        } catch (const std::exception&) {
            if (*v == "inf") return std::numeric_limits<double>::infinity();
            fail(key, "expected a number, got '" + *v + "'");
            return fallback;
        }
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        if (v == nullptr) return fallback;
        try {
            std::size_t pos = 0;
            const long long i = std::stoll(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return i;
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + *v + "'");
            return fallback;
        }
    }

    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        if (v == nullptr) return fallback;
        try {
            std::size_t pos = 0;
            const unsigned long long i = std::stoull(*v, &pos);
            if (pos != v->size() || v->front() == '-') throw std::invalid_argument("");
            return i;
        } catch (const std::exception&) {
            fail(key, "expected a nonnegative integer, got '" + *v + "'");
            return fallback;
        }
    }

    bool get_bool(const std::string& key, bool fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        if (v == nullptr) return fallback;
        if (*v == "true") return true;
        if (*v == "false") return false;
        fail(key, "expected true or false, got '" + *v + "'");
        return fallback;
    }

    // Delimited list: "(a, b, ...)" or "{a, b, ...}". Empty list allowed.
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback, bool required = false)
    {
        const auto* v = fetch(key, required);
        if (v == nullptr) return fallback;
        const std::string& s = *v;
        if (s.size() < 2 || (s.front() != '(' && s.front() != '{')
            || (s.front() == '(' && s.back() != ')') || (s.front() == '{' && s.back() != '}')) {
            fail(key, "expected a list like (a, b) or {a, b}, got '" + s + "'");
            return fallback;
        }
        std::vector<double> out;
        const std::string body = trim(s.substr(1, s.size() - 2));
        if (body.empty()) return out;
        std::istringstream in(body);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            try {
                std::size_t pos = 0;
                const double d = std::stod(item, &pos);
                if (pos != item.size() || !std::isfinite(d)) throw std::invalid_argument("");
                out.push_back(d);
            } catch (const std::exception&) {
                fail(key, "list entry '" + item + "' is not a number");
                return fallback;
            }
        }
        return out;
    }

    void fail(const std::string& key, const std::string& msg)
    {
        errors_.push_back("[" + section_ + "] " + key + ": " + msg);
    }

private:
    const std::string* fetch(const std::string& key, bool required)
    {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            if (required) fail(key, "missing required key");
            return nullptr;
        }
        return &it->second;
    }

    std::string section_;
    std::vector<std::string>& errors_;
    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
    bool present_ = false;
};

void cross_validate(const ScenarioFile& s, std::vector<std::string>& errors)
{
    auto fail = [&](const std::string& field, const std::string& msg) {
        errors.push_back(field + ": " + msg);
    };

    if (s.model_kind != "integrator" && s.model_kind != "train")
        fail("[model] kind", "must be 'integrator' or 'train', got '" + s.model_kind + "'");
    if (!(s.T_s > 0)) fail("[model] T_s", "must be > 0");
    if (s.x0.size() != 2) fail("[model] x0", "must have 2 entries");
    if (s.model_kind == "train") {
        if (s.track_path.empty()) fail("[model] track", "required for the train model");
        try {
            s.train.validate();
        } catch (const ArgumentError& e) {
            fail("[model]", e.what());
        }
    }

    if (s.k_f < 1) fail("[horizon] k_f", "must be >= 1");
    if (s.L < 1) fail("[blocking] L", "must be >= 1");
    if (s.k_f >= 1 && s.L > s.k_f) fail("[blocking] L", "must be <= k_f");
    if (s.blocking_variant != "shrinking" && s.blocking_variant != "constant")
        fail("[blocking] variant", "must be 'shrinking' or 'constant'");

    if (s.input_mode == "alphabet") {
        if (s.alphabet.empty() && !s.cruise) fail("[input] alphabet", "must not be empty in alphabet mode");
    } else if (s.input_mode == "continuous") {
        if (!(s.input_lower <= s.input_upper)) fail("[input] lower", "must be <= upper");
        if (s.cruise) fail("[input] cruise", "only available with an alphabet");
    } else {
        fail("[input] mode", "must be 'alphabet' or 'continuous'");
    }
    if (s.cruise && s.model_kind != "train") fail("[input] cruise", "only the train model supports cruise");

    if (s.terminal_center.size() != 2) fail("[terminal] center", "must have 2 entries");
    if (s.terminal_half_widths.size() != 2) fail("[terminal] half_widths", "must have 2 entries");
    if (s.terminal_weights.size() != 2) fail("[terminal] weights", "must have 2 entries");
    for (double h : s.terminal_half_widths)
        if (h < 0) fail("[terminal] half_widths", "entries must be >= 0");
    for (double w : s.terminal_weights)
        if (!(w > 0)) fail("[terminal] weights", "entries must be > 0");

    if (s.d_bar < 0) fail("[disturbance] d_bar", "must be >= 0");
    if (s.distribution != "uniform" && s.distribution != "extreme" && s.distribution != "fixed")
        fail("[disturbance] distribution", "must be 'uniform', 'extreme' or 'fixed'");
    if (s.distribution == "fixed") {
        if (s.fixed_disturbance.empty()) fail("[disturbance] fixed", "required for the fixed distribution");
        for (double d : s.fixed_disturbance)
            if (std::abs(d) > s.d_bar + 1e-12) fail("[disturbance] fixed", "entries must satisfy |d| <= d_bar");
    }

    if (!s.moduli_mode.empty()) {
        if (s.moduli_mode != "estimate" && s.moduli_mode != "linear")
            fail("[bounds] moduli", "must be 'estimate' or 'linear'");
        if (s.moduli_mode == "linear") {
            if (s.a_x_gain < 0) fail("[bounds] a_x", "must be >= 0");
            if (s.a_u_gain < 0) fail("[bounds] a_u", "must be >= 0");
        }
        if (s.moduli_mode == "estimate") {
            if (s.state_box_center.size() != 2) fail("[bounds] state_center", "must have 2 entries");
            if (s.state_box_half.size() != 2) fail("[bounds] state_half", "must have 2 entries");
            if (!(s.input_box_half > 0)) fail("[bounds] input_half", "must be > 0");
            if (s.moduli_samples < 1000) fail("[bounds] samples", "must be >= 1000");
        }
    }

    if (s.backend != "enumerate" && s.backend != "continuous")
        fail("[solver] backend", "must be 'enumerate' or 'continuous'");
    if (s.backend == "enumerate" && s.input_mode == "continuous")
        fail("[solver] backend", "enumerate requires an alphabet input set");
    if (s.backend == "continuous" && s.input_mode == "alphabet")
        fail("[solver] backend", "continuous requires a continuous input set");
    if (s.candidate_cap < 1) fail("[solver] candidate_cap", "must be >= 1");
    if (s.starts < 1) fail("[solver] starts", "must be >= 1");
    if (s.max_sweeps < 1) fail("[solver] max_sweeps", "must be >= 1");

    if (s.algorithm != "nominal" && s.algorithm != "relaxed" && s.algorithm != "multiobjective")
        fail("[run] algorithm", "must be 'nominal', 'relaxed' or 'multiobjective'");
    if (s.algorithm == "multiobjective" && !(s.omega > 0)) fail("[run] omega", "must be > 0");
    if (s.runs < 1) fail("[run] runs", "must be >= 1");
}

} // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& source)
{
    std::vector<std::string> errors;
    const RawScenario raw = tokenize(text, source, errors);

    static const std::set<std::string> known_sections
        = {"model", "horizon", "blocking", "input", "terminal", "disturbance", "bounds", "solver", "run"};
    for (const auto& [name, _] : raw.sections)
        if (!known_sections.count(name)) errors.push_back("unknown section [" + name + "]");

    ScenarioFile s;

    {
        SectionReader r(raw, "model", errors);
        s.model_kind = r.get_string("kind", s.model_kind, true);
        s.T_s = r.get_double("T_s", s.T_s);
        s.x0 = r.get_list("x0", s.x0);
        if (s.model_kind == "train") {
            s.track_path = r.get_string("track", "", true);
            s.train.M = r.get_double("M", 0, true);
            s.train.M_s = r.get_double("M_s", 0, true);
            s.train.A = r.get_double("A", 0, true);
            s.train.B = r.get_double("B", 0, true);
            s.train.C = r.get_double("C", 0, true);
            s.train.D = r.get_double("D", 0, true);
            s.train.g_grav = r.get_double("g_grav", s.train.g_grav);
            s.train.F_T_max = r.get_double("F_T_max", 0, true);
            s.train.P_max = r.get_double("P_max", 0, true);
            s.train.F_B_max = r.get_double("F_B_max", 0, true);
            s.train.T_s = s.T_s;
        }
        r.finish();
    }
    {
        SectionReader r(raw, "horizon", errors);
        s.k_f = static_cast<int>(r.get_int("k_f", s.k_f, true));
        r.finish();
    }
    {
        SectionReader r(raw, "blocking", errors);
        s.L = static_cast<int>(r.get_int("L", s.L, true));
        s.blocking_variant = r.get_string("variant", s.blocking_variant);
        r.finish();
    }
    {
        SectionReader r(raw, "input", errors);
        s.input_mode = r.get_string("mode", s.input_mode, true);
        if (s.input_mode == "alphabet") {
            s.alphabet = r.get_list("alphabet", {}, true);
            s.cruise = r.get_bool("cruise", s.cruise);
        } else {
            s.input_lower = r.get_double("lower", s.input_lower);
            s.input_upper = r.get_double("upper", s.input_upper);
        }
        r.finish();
    }
    {
        SectionReader r(raw, "terminal", errors);
        s.terminal_center = r.get_list("center", {}, true);
        s.terminal_half_widths = r.get_list("half_widths", {}, true);
        s.terminal_weights = r.get_list("weights", s.terminal_weights);
        r.finish();
    }
    {
        SectionReader r(raw, "disturbance", errors);
        if (r.present()) {
            s.d_bar = r.get_double("d_bar", s.d_bar);
            s.distribution = r.get_string("distribution", s.distribution);
            s.seed = r.get_uint("seed", s.seed);
            s.fixed_disturbance = r.get_list("fixed", s.fixed_disturbance);
        }
        r.finish();
    }
    {
        SectionReader r(raw, "bounds", errors);
        if (r.present()) {
            s.moduli_mode = r.get_string("moduli", "estimate");
            if (s.moduli_mode == "linear") {
                s.a_x_gain = r.get_double("a_x", 0, true);
                s.a_u_gain = r.get_double("a_u", 0, true);
            } else {
                s.state_box_center = r.get_list("state_center", {}, true);
                s.state_box_half = r.get_list("state_half", {}, true);
                s.input_box_center = r.get_double("input_center", s.input_box_center);
                s.input_box_half = r.get_double("input_half", s.input_box_half);
                s.moduli_samples = static_cast<int>(r.get_int("samples", s.moduli_samples));
                s.moduli_seed = r.get_uint("moduli_seed", s.moduli_seed);
            }
        }
        r.finish();
    }
    {
        SectionReader r(raw, "solver", errors);
        if (r.present()) {
            s.backend = r.get_string("backend", s.backend);
            s.candidate_cap = r.get_int("candidate_cap", s.candidate_cap);
            s.starts = static_cast<int>(r.get_int("starts", s.starts));
            s.max_sweeps = static_cast<int>(r.get_int("max_sweeps", s.max_sweeps));
            s.solver_seed = r.get_uint("solver_seed", s.solver_seed);
        }
        r.finish();
    }
    {
        SectionReader r(raw, "run", errors);
        s.algorithm = r.get_string("algorithm", s.algorithm, true);
        s.omega = r.get_double("omega", s.omega);
        s.runs = static_cast<int>(r.get_int("runs", s.runs));
        s.log_timing = r.get_bool("log_timing", s.log_timing);
        r.finish();
    }

    cross_validate(s, errors);
    if (!errors.empty()) throw ScenarioError(std::move(errors));
    return s;
}

ScenarioFile parse_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError({"cannot open scenario file '" + path + "'"});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str(), path);
}

namespace {

std::string list_str(const std::vector<double>& v, char open, char close)
{
    std::string out(1, open);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(v[i]);
    }
    out += close;
    return out;
}

} // namespace

std::string serialize_scenario(const ScenarioFile& s)
{
    std::ostringstream out;
    out << "[model]\n";
    out << "kind = " << s.model_kind << "\n";
    out << "T_s = " << format_double(s.T_s) << "\n";
    out << "x0 = " << list_str(s.x0, '(', ')') << "\n";
    if (s.model_kind == "train") {
        out << "track = " << s.track_path << "\n";
        out << "M = " << format_double(s.train.M) << "\n";
        out << "M_s = " << format_double(s.train.M_s) << "\n";
        out << "A = " << format_double(s.train.A) << "\n";
        out << "B = " << format_double(s.train.B) << "\n";
        out << "C = " << format_double(s.train.C) << "\n";
        out << "D = " << format_double(s.train.D) << "\n";
        out << "g_grav = " << format_double(s.train.g_grav) << "\n";
        out << "F_T_max = " << format_double(s.train.F_T_max) << "\n";
        out << "P_max = " << format_double(s.train.P_max) << "\n";
        out << "F_B_max = " << format_double(s.train.F_B_max) << "\n";
    }
    out << "\n[horizon]\n";
    out << "k_f = " << s.k_f << "\n";
    out << "\n[blocking]\n";
    out << "L = " << s.L << "\n";
    out << "variant = " << s.blocking_variant << "\n";
    out << "\n[input]\n";
    out << "mode = " << s.input_mode << "\n";
    if (s.input_mode == "alphabet") {
        out << "alphabet = " << list_str(s.alphabet, '{', '}') << "\n";
        out << "cruise = " << (s.cruise ? "true" : "false") << "\n";
    } else {
        out << "lower = " << format_double(s.input_lower) << "\n";
        out << "upper = " << format_double(s.input_upper) << "\n";
    }
    out << "\n[terminal]\n";
    out << "center = " << list_str(s.terminal_center, '(', ')') << "\n";
    out << "half_widths = " << list_str(s.terminal_half_widths, '(', ')') << "\n";
    out << "weights = " << list_str(s.terminal_weights, '(', ')') << "\n";
    out << "\n[disturbance]\n";
    out << "d_bar = " << format_double(s.d_bar) << "\n";
    out << "distribution = " << s.distribution << "\n";
    out << "seed = " << s.seed << "\n";
    if (!s.fixed_disturbance.empty())
        out << "fixed = " << list_str(s.fixed_disturbance, '(', ')') << "\n";
    if (!s.moduli_mode.empty()) {
        out << "\n[bounds]\n";
        out << "moduli = " << s.moduli_mode << "\n";
        if (s.moduli_mode == "linear") {
            out << "a_x = " << format_double(s.a_x_gain) << "\n";
            out << "a_u = " << format_double(s.a_u_gain) << "\n";
        } else {
            out << "state_center = " << list_str(s.state_box_center, '(', ')') << "\n";
            out << "state_half = " << list_str(s.state_box_half, '(', ')') << "\n";
            out << "input_center = " << format_double(s.input_box_center) << "\n";
            out << "input_half = " << format_double(s.input_box_half) << "\n";
            out << "samples = " << s.moduli_samples << "\n";
            out << "moduli_seed = " << s.moduli_seed << "\n";
        }
    }
    out << "\n[solver]\n";
    out << "backend = " << s.backend << "\n";
    out << "candidate_cap = " << s.candidate_cap << "\n";
    if (s.backend == "continuous") {
        out << "starts = " << s.starts << "\n";
        out << "max_sweeps = " << s.max_sweeps << "\n";
        out << "solver_seed = " << s.solver_seed << "\n";
    }
    out << "\n[run]\n";
    out << "algorithm = " << s.algorithm << "\n";
    if (s.algorithm == "multiobjective") out << "omega = " << format_double(s.omega) << "\n";
    out << "runs = " << s.runs << "\n";
    out << "log_timing = " << (s.log_timing ? "true" : "false") << "\n";
    return out.str();
}

Scenario build_scenario(ScenarioFile file, const std::string& base_dir)
{
    Scenario sc;
    sc.file = std::move(file);
    const ScenarioFile& s = sc.file;

    if (s.model_kind == "train") {
        namespace fs = std::filesystem;
        fs::path track = s.track_path;
        if (track.is_relative()) track = fs::path(base_dir) / track;
        TrackProfile profile = read_track_profile(track.string());
        sc.model = std::make_unique<TrainModel>(s.train, std::move(profile));
    } else {
        sc.model = std::make_unique<IntegratorModel>(s.T_s);
    }

    RunConfig cfg;
    cfg.model = sc.model.get();
    cfg.x0 = Eigen::Map<const Vec>(s.x0.data(), static_cast<Eigen::Index>(s.x0.size()));
    cfg.k_f = s.k_f;
    cfg.policy.L = s.L;
    cfg.policy.variant
        = s.blocking_variant == "constant" ? BlockingVariant::ConstantN : BlockingVariant::ShrinkingN;
    if (s.input_mode == "alphabet") {
        cfg.input.mode = InputSpec::Mode::Alphabet;
        for (double a : s.alphabet) {
            Input u(1);
            u(0) = a;
            cfg.input.alphabet.push_back(std::move(u));
        }
        cfg.input.with_cruise = s.cruise;
    } else {
        cfg.input.mode = InputSpec::Mode::ContinuousBox;
        cfg.input.lower = Vec::Constant(1, s.input_lower);
        cfg.input.upper = Vec::Constant(1, s.input_upper);
    }
    cfg.terminal.center = Eigen::Map<const Vec>(s.terminal_center.data(), 2);
    cfg.terminal.half_widths = Eigen::Map<const Vec>(s.terminal_half_widths.data(), 2);
    cfg.terminal.weights = Eigen::Map<const Vec>(s.terminal_weights.data(), 2);
    cfg.distance.weights = cfg.terminal.weights;
    cfg.solver.candidate_cap = s.candidate_cap;
    cfg.solver.starts = s.starts;
    cfg.solver.max_sweeps = s.max_sweeps;
    cfg.solver.seed = s.solver_seed;
    cfg.disturbance.d_bar = s.d_bar;
    cfg.disturbance.kind = s.distribution == "extreme" ? DisturbanceKind::Extreme
        : s.distribution == "fixed"                    ? DisturbanceKind::Fixed
                                                       : DisturbanceKind::Uniform;
    cfg.disturbance.seed = s.seed;
    for (double d : s.fixed_disturbance) {
        Input v(1);
        v(0) = d;
        cfg.disturbance.fixed.push_back(std::move(v));
    }
    sc.config = std::move(cfg);

    sc.algorithm = s.algorithm == "relaxed" ? Algorithm::Relaxed
        : s.algorithm == "multiobjective"   ? Algorithm::MultiObjective
                                            : Algorithm::Nominal;
    sc.omega = s.omega;
    sc.runs = s.runs;
    sc.log_timing = s.log_timing;

    try {
        sc.config.validate();
    } catch (const ArgumentError& e) {
        throw ScenarioError({std::string("scenario is inconsistent: ") + e.what()});
    }
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    auto file = parse_scenario(path);
    const auto dir = std::filesystem::path(path).parent_path().string();
    return build_scenario(std::move(file), dir.empty() ? "." : dir);
}

ModuliEstimate resolve_moduli(const Scenario& scenario)
{
    const ScenarioFile& s = scenario.file;
    if (s.moduli_mode.empty())
        throw ScenarioError({"[bounds]: section required for bound computations"});
    if (s.moduli_mode == "linear") {
        ModuliEstimate est;
        est.moduli.a_x = KFunction::linear(s.a_x_gain);
        est.moduli.a_u = KFunction::linear(s.a_u_gain);
        est.k_x_raw = s.a_x_gain;
        est.k_u_raw = s.a_u_gain;
        est.inflation = 1.0;
        return est;
    }
    Box state_box{Eigen::Map<const Vec>(s.state_box_center.data(), 2),
                  Eigen::Map<const Vec>(s.state_box_half.data(), 2)};
    Box input_box{Vec::Constant(1, s.input_box_center), Vec::Constant(1, s.input_box_half)};
    return estimate_moduli(*scenario.model, state_box, input_box, s.moduli_samples,
                           scenario.config.distance.weights, s.moduli_seed);
}

} // namespace sbpc
