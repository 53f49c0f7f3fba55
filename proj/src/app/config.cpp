#include "crawlsim/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crawlsim/errors.hpp"

namespace crawlsim::app {

namespace {

using nlohmann::json;

// A JSON object whose keys must all be consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "must be an object");
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw InvalidInput(path + " " + what);
    }

    std::string at(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json& raw(const char* key) {
        if (!j_.contains(key)) fail(at(key), "is required");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const char* key) {
        const json& v = raw(key);
        if (!v.is_number()) fail(at(key), "must be a number");
        return v.get<double>();
    }

    double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

    std::int64_t integer(const char* key, std::int64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(at(key), "must be an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_unsigned()) fail(at(key), "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const char* key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(at(key), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const char* key) {
        const json& v = raw(key);
        if (!v.is_string()) fail(at(key), "must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const char* key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(at(key), "must be an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "must be a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<std::int64_t> integers(const char* key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(at(key), "must be an array of integers");
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) {
                fail(at(key) + "[" + std::to_string(i) + "]", "must be an integer");
            }
            out.push_back(v[i].get<std::int64_t>());
        }
        return out;
    }

    Section child(const char* key) { return Section(raw(key), at(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(at(it.key()), "is not a recognised key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Re-throws core validation errors with the JSON path prepended when the
// message does not already name it.
template <class F>
auto scoped(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw InvalidInput(path + ": " + msg);
    }
}

GaitProgram parse_gait(Section s) {
    const std::string kind = s.string("kind");
    GaitProgram g = scoped(s.at("kind"), [&] {
        if (kind == "constant") return GaitProgram::constant(s.number("length"));
        if (kind == "sinusoid") {
            const double length = s.number("length");
            const double amplitude = s.number("amplitude");
            double omega = 0.0;
            if (s.has("omega") == s.has("period")) {
                Section::fail(s.at("omega"), "or period must be given (exactly one)");
            }
            if (s.has("omega")) {
                omega = s.number("omega");
            } else {
                const double period = s.number("period");
                if (!(period > 0.0)) Section::fail(s.at("period"), "must be > 0");
                omega = 2.0 * 3.14159265358979323846 / period;
            }
            return GaitProgram::sinusoid(length, amplitude, omega, s.number("phase", 0.0));
        }
        if (kind == "parabolic") {
            std::vector<ParabolicSegment> segs;
            const json& arr = s.raw("segments");
            if (!arr.is_array()) Section::fail(s.at("segments"), "must be an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                Section seg(arr[i], s.at("segments") + "[" + std::to_string(i) + "]");
                segs.push_back({seg.number("duration"), seg.number("accel")});
                seg.finish();
            }
            return GaitProgram::parabolic(s.number("start_length"), s.number("start_rate", 0.0),
                                          std::move(segs));
        }
        if (kind == "spline") {
            std::vector<SplineSample> samples;
            const json& arr = s.raw("samples");
            if (!arr.is_array()) Section::fail(s.at("samples"), "must be an array of [t, length]");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const json& e = arr[i];
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                    Section::fail(s.at("samples") + "[" + std::to_string(i) + "]",
                                  "must be a pair [t, length]");
                }
                samples.push_back({e[0].get<double>(), e[1].get<double>()});
            }
            return GaitProgram::spline(std::move(samples), s.number("start_slope", 0.0),
                                       s.number("end_slope", 0.0));
        }
        Section::fail(s.at("kind"), "must be one of constant, sinusoid, parabolic, spline");
    });
    s.finish();
    return g;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    Section top(root, "");
    ScenarioConfig cfg;
    if (top.has("name")) cfg.name = top.string("name");

    const bool two_body = top.has("params") || top.has("gait");
    if (two_body && top.has("chain")) {
        Section::fail("chain", "cannot be combined with params/gait");
    }
    if (top.has("chain")) {
        Section c = top.child("chain");
        std::vector<GaitProgram> links;
        const json& arr = c.raw("links");
        if (!arr.is_array()) Section::fail(c.at("links"), "must be an array of gaits");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            links.push_back(parse_gait(Section(arr[i], c.at("links") + "[" + std::to_string(i) + "]")));
        }
        const auto masses = c.numbers("masses");
        const auto frictions = c.numbers("frictions");
        cfg.chain.emplace(masses, frictions, std::move(links));
        c.finish();
    } else {
        Section p = top.child("params");
        const double m1 = p.number("m1"), m2 = p.number("m2");
        const double f1 = p.number("f1"), f2 = p.number("f2");
        p.finish();
        cfg.params.emplace(scoped("params", [&] { return PhysicalParams(m1, m2, f1, f2); }));
        cfg.gait.emplace(parse_gait(top.child("gait")));
    }

    if (top.has("initial")) {
        Section s = top.child("initial");
        cfg.initial.y0 = s.number("y0", 0.0);
        cfg.initial.x10 = s.number("x10", 0.0);
        s.finish();
        scoped("initial", [&] { cfg.initial.validate(); return 0; });
    }

    cfg.horizon = top.number("horizon");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) Section::fail("horizon", "must be > 0");

    if (top.has("solver")) {
        Section s = top.child("solver");
        auto& v = cfg.solver;
        v.rtol = s.number("rtol", v.rtol);
        v.atol = s.number("atol", v.atol);
        v.h_max = s.number("h_max", v.h_max);
        v.output_grid = s.number("output_grid", v.output_grid);
        v.stiffness_guard = s.number("stiffness_guard", v.stiffness_guard);
        s.finish();
    }
    cfg.solver.validate();

    if (top.has("refinement")) {
        Section s = top.child("refinement");
        auto& r = cfg.refinement;
        if (s.has("n0")) {
            const auto n0 = s.integers("n0");
            for (std::int64_t v : n0) {
                if (v < 1) Section::fail("refinement.n0", "entries must be >= 1");
            }
            if (cfg.is_chain()) {
                if (n0.size() != cfg.chain->bodies()) {
                    Section::fail("refinement.n0", "needs one index per chain body");
                }
                cfg.chain_n0 = n0;
            } else {
                if (n0.size() != 2) Section::fail("refinement.n0", "must be [n1, n2]");
                r.n0 = RegularizationIndex(n0[0], n0[1]);
            }
        }
        r.epsilon = s.number("epsilon", r.epsilon);
        if (!(r.epsilon > 0.0)) Section::fail("refinement.epsilon", "must be > 0");
        r.k_max = static_cast<int>(s.integer("k_max", r.k_max));
        if (r.k_max < 0 || r.k_max > 30) Section::fail("refinement.k_max", "must be in [0, 30]");
        r.parallel = s.boolean("parallel", r.parallel);
        s.finish();
    }
    if (cfg.is_chain() && cfg.chain_n0.empty()) {
        cfg.chain_n0.assign(cfg.chain->bodies(), cfg.refinement.n0.n1());
    }

    if (top.has("oracle")) {
        Section s = top.child("oracle");
        auto& o = cfg.oracle;
        o.v_stick = s.number("v_stick", o.v_stick);
        o.a_stick = s.number("a_stick", o.a_stick);
        o.event_scan = s.number("event_scan", o.event_scan);
        o.event_tol = s.number("event_tol", o.event_tol);
        o.zeno_cap = static_cast<std::size_t>(s.unsigned_integer("zeno_cap", o.zeno_cap));
        o.zeno_window = s.number("zeno_window", o.zeno_window);
        s.finish();
        scoped("oracle", [&] { o.validate(); return 0; });
    }

    if (top.has("verify")) {
        Section s = top.child("verify");
        auto& v = cfg.verify;
        v.seed = s.unsigned_integer("seed", v.seed);
        v.random_windows = static_cast<int>(s.integer("random_windows", v.random_windows));
        if (v.random_windows < 0) Section::fail("verify.random_windows", "must be >= 0");
        if (s.has("epsilon")) {
            v.epsilon = s.number("epsilon");
            if (!(v.epsilon >= 0.0)) Section::fail("verify.epsilon", "must be >= 0");
        }
        if (s.has("trajectory")) cfg.verify_trajectory = s.string("trajectory");
        s.finish();
    }

    if (top.has("compare")) {
        Section s = top.child("compare");
        cfg.compare_tolerance = s.number("tolerance", cfg.compare_tolerance);
        cfg.drift_tolerance = s.number("drift_tolerance", cfg.drift_tolerance);
        if (!(cfg.compare_tolerance > 0.0)) Section::fail("compare.tolerance", "must be > 0");
        if (!(cfg.drift_tolerance > 0.0)) Section::fail("compare.drift_tolerance", "must be > 0");
        s.finish();
    }

    if (top.has("outputs")) {
        Section s = top.child("outputs");
        if (s.has("dir")) cfg.outputs.dir = s.string("dir");
        cfg.outputs.plots = s.boolean("plots", false);
        s.finish();
    }
    top.finish();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config file " + path.string() + " cannot be opened");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace crawlsim::app
