#include "mibie/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <variant>

namespace mibie::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
        throw ArgumentError("key '" + key + "': '" + v + "' is not a finite number");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end) throw ArgumentError("key '" + key + "': '" + v + "' is not an integer");
    return x;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split(v, ',')) out.push_back(to_int(key, s));
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + f(xs[i]);
    return s;
}

std::string num(double x) { return harness::format_number(x); }

const std::vector<std::string> kCurveKeys = {"curve",   "center_x",  "center_y",    "radius",
                                             "semi_a",  "semi_b",    "fourier_r0",  "fourier_cos",
                                             "fourier_sin"};

}  // namespace

KeyValues KeyValues::parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ArgumentError("config line " + std::to_string(lineno) + ": empty key");
        kv.values_[key] = value;
    }
    return kv;
}

KeyValues KeyValues::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config file '" + path + "'");
    return parse(in);
}

const std::string& KeyValues::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ArgumentError("missing config key '" + key + "'");
    return it->second;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "omega",         "gamma",          "lambda",     "curve",         "center_x",     "center_y",
        "radius",        "semi_a",         "semi_b",     "fourier_r0",    "fourier_cos",  "fourier_sin",
        "panels",        "nodes_per_panel", "p_values",  "h_order",       "h_panels",     "qbx_order",
        "upsample",      "radius_factor",  "kr_cap",     "methods",       "tol",          "max_iter",
        "guard",         "sources",        "proj_panels", "proj_nodes",   "proj_source_depth",
        "proj_distances", "proj_points",   "spec_panels", "spec_nodes",   "spec_qbx_order", "cluster_radius",
        "grid_n",        "grid_min",       "grid_max",   "grid_exclusion", "grid_method"};
    return keys;
}

harness::ExperimentConfig apply(const KeyValues& kv, harness::ExperimentConfig c) {
    const auto& known = known_keys();
    for (const auto& [k, v] : kv.values())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ArgumentError("unknown config key '" + k + "'");
    auto dbl = [&](const char* key, double& dst) {
        if (kv.has(key)) dst = to_double(key, kv.get(key));
    };
    auto integer = [&](const char* key, int& dst) {
        if (kv.has(key)) dst = to_int(key, kv.get(key));
    };
    dbl("omega", c.params.omega);
    dbl("gamma", c.params.gamma);
    dbl("lambda", c.params.lambda);

    bool curve_touched = false;
    for (const auto& k : kCurveKeys) curve_touched = curve_touched || kv.has(k);
    if (curve_touched) {
        std::string kind = std::holds_alternative<geometry::Circle>(c.shape)    ? "circle"
                           : std::holds_alternative<geometry::Ellipse>(c.shape) ? "ellipse"
                                                                                 : "fourier";
        if (kv.has("curve")) kind = kv.get("curve");
        Point2 center = std::visit([](const auto& s) { return s.center; }, c.shape);
        if (kind == "apple" || kind == "fourier") {
            geometry::Fourier f = kind == "apple" ? geometry::apple_shape()
                                  : std::holds_alternative<geometry::Fourier>(c.shape)
                                      ? std::get<geometry::Fourier>(c.shape)
                                      : geometry::Fourier{center, 1.0, {}, {}};
            if (kind == "fourier") f.center = center;
            dbl("center_x", f.center.x);
            dbl("center_y", f.center.y);
            dbl("fourier_r0", f.r0);
            if (kv.has("fourier_cos")) f.cos_coeffs = to_doubles("fourier_cos", kv.get("fourier_cos"));
            if (kv.has("fourier_sin")) f.sin_coeffs = to_doubles("fourier_sin", kv.get("fourier_sin"));
            c.shape = f;
        } else if (kind == "circle") {
            geometry::Circle g = std::holds_alternative<geometry::Circle>(c.shape) ? std::get<geometry::Circle>(c.shape)
                                                                                  : geometry::Circle{center, 1.0};
            dbl("center_x", g.center.x);
            dbl("center_y", g.center.y);
            dbl("radius", g.radius);
            c.shape = g;
        } else if (kind == "ellipse") {
            geometry::Ellipse g = std::holds_alternative<geometry::Ellipse>(c.shape)
                                      ? std::get<geometry::Ellipse>(c.shape)
                                      : geometry::Ellipse{center, 1.0, 1.0};
            dbl("center_x", g.center.x);
            dbl("center_y", g.center.y);
            dbl("semi_a", g.a);
            dbl("semi_b", g.b);
            c.shape = g;
        } else {
            throw ArgumentError("key 'curve': expected circle, ellipse, fourier or apple, got '" + kind + "'");
        }
    }

    integer("panels", c.n_panels);
    integer("nodes_per_panel", c.nodes_per_panel);
    if (kv.has("p_values")) c.p_values = to_ints("p_values", kv.get("p_values"));
    integer("h_order", c.h_order);
    if (kv.has("h_panels")) c.h_panels = to_ints("h_panels", kv.get("h_panels"));
    integer("qbx_order", c.qbx_order);
    integer("upsample", c.upsample);
    dbl("radius_factor", c.radius_factor);
    dbl("kr_cap", c.kr_cap);
    if (kv.has("methods")) {
        c.methods.clear();
        for (const auto& m : split(kv.get("methods"), ',')) c.methods.push_back(formulations::parse_method(m));
    }
    dbl("tol", c.tol);
    integer("max_iter", c.max_iter);
    dbl("guard", c.guard);
    if (kv.has("sources")) {
        c.sources.clear();
        for (const auto& entry : split(kv.get("sources"), ';')) {
            const auto v = to_doubles("sources", entry);
            if (v.size() != 4) throw ArgumentError("key 'sources': each entry needs x, y, re, im");
            c.sources.push_back({{v[0], v[1]}, {v[2], v[3]}});
        }
    }
    integer("proj_panels", c.proj_panels);
    integer("proj_nodes", c.proj_nodes);
    dbl("proj_source_depth", c.proj_source_depth);
    if (kv.has("proj_distances")) c.proj_distances = to_doubles("proj_distances", kv.get("proj_distances"));
    integer("proj_points", c.proj_points);
    integer("spec_panels", c.spec_panels);
    integer("spec_nodes", c.spec_nodes);
    integer("spec_qbx_order", c.spec_qbx_order);
    dbl("cluster_radius", c.cluster_radius);
    integer("grid_n", c.grid_n);
    dbl("grid_min", c.grid_min);
    dbl("grid_max", c.grid_max);
    dbl("grid_exclusion", c.grid_exclusion);
    if (kv.has("grid_method")) c.grid_method = formulations::parse_method(kv.get("grid_method"));
    return c;
}

KeyValues to_key_values(const harness::ExperimentConfig& c) {
    KeyValues kv;
    kv.set("omega", num(c.params.omega));
    kv.set("gamma", num(c.params.gamma));
    kv.set("lambda", num(c.params.lambda));
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            kv.set("center_x", num(s.center.x));
            kv.set("center_y", num(s.center.y));
            if constexpr (std::is_same_v<S, geometry::Circle>) {
                kv.set("curve", "circle");
                kv.set("radius", num(s.radius));
            } else if constexpr (std::is_same_v<S, geometry::Ellipse>) {
                kv.set("curve", "ellipse");
                kv.set("semi_a", num(s.a));
                kv.set("semi_b", num(s.b));
            } else {
                kv.set("curve", "fourier");
                kv.set("fourier_r0", num(s.r0));
                kv.set("fourier_cos", join(s.cos_coeffs, num));
                kv.set("fourier_sin", join(s.sin_coeffs, num));
            }
        },
        c.shape);
    auto i2s = [](int x) { return std::to_string(x); };
    kv.set("panels", i2s(c.n_panels));
    kv.set("nodes_per_panel", i2s(c.nodes_per_panel));
    kv.set("p_values", join(c.p_values, i2s));
    kv.set("h_order", i2s(c.h_order));
    kv.set("h_panels", join(c.h_panels, i2s));
    kv.set("qbx_order", i2s(c.qbx_order));
    kv.set("upsample", i2s(c.upsample));
    kv.set("radius_factor", num(c.radius_factor));
    kv.set("kr_cap", num(c.kr_cap));
    kv.set("methods", join(c.methods, [](harness::Method m) { return std::string(formulations::method_name(m)); }));
    kv.set("tol", num(c.tol));
    kv.set("max_iter", i2s(c.max_iter));
    kv.set("guard", num(c.guard));
    std::string src;
    for (std::size_t i = 0; i < c.sources.size(); ++i) {
        const auto& s = c.sources[i];
        src += (i ? "; " : "") + num(s.position.x) + "," + num(s.position.y) + "," + num(s.strength.real()) + "," +
               num(s.strength.imag());
    }
    kv.set("sources", src);
    kv.set("proj_panels", i2s(c.proj_panels));
    kv.set("proj_nodes", i2s(c.proj_nodes));
    kv.set("proj_source_depth", num(c.proj_source_depth));
    kv.set("proj_distances", join(c.proj_distances, num));
    kv.set("proj_points", i2s(c.proj_points));
    kv.set("spec_panels", i2s(c.spec_panels));
    kv.set("spec_nodes", i2s(c.spec_nodes));
    kv.set("spec_qbx_order", i2s(c.spec_qbx_order));
    kv.set("cluster_radius", num(c.cluster_radius));
    kv.set("grid_n", i2s(c.grid_n));
    kv.set("grid_min", num(c.grid_min));
    kv.set("grid_max", num(c.grid_max));
    kv.set("grid_exclusion", num(c.grid_exclusion));
    kv.set("grid_method", formulations::method_name(c.grid_method));
    return kv;
}

}  // namespace mibie::config
